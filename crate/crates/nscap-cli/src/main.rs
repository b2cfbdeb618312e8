//! `nscap`: compute assisted success probabilities, sweep rate regions, and
//! run the verification suites.
//!
//! Exit codes: 0 success, 1 failed verification check, 2 parse/validation
//! error, 3 resource limit, 4 numeric failure. Output is JSON-first; the
//! human-readable lines on stdout/stderr are a formatting layer. The
//! `NSCAP_THREADS` environment variable caps the suite work pool.

mod report;
mod suites;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nscap_core::jsonio::{self, assist_name};
use nscap_core::regions::{self, SweepConfig};
use nscap_core::scenario::{Assist, ScenarioChannel};
use nscap_core::{Error, Result};

#[derive(Parser)]
#[command(name = "nscap", version, about = "non-signaling coding workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Optimal success probability of a scenario file.
    Success {
        scenario: PathBuf,
        /// Write the optimal box table as JSON (fully assisted class only).
        #[arg(long)]
        emit_box: Option<PathBuf>,
        /// Write the result record as JSON.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rate-region boundary sweep of a broadcast channel file.
    Region {
        channel: PathBuf,
        #[arg(long, value_enum)]
        method: RegionMethod,
        /// Number of boundary directions.
        #[arg(long, default_value_t = 8)]
        directions: usize,
        /// Restart seed for the nonconvex searches.
        #[arg(long, default_value_t = 0x5eed)]
        seed: u64,
        /// Dirichlet restarts per search.
        #[arg(long, default_value_t = regions::DEFAULT_RESTARTS)]
        restarts: usize,
        /// Duality-gap tolerance of the coupling minimization.
        #[arg(long, default_value_t = regions::SATO_GAP_TOL)]
        tol: f64,
        /// Erasure probability of user 1 (semidet-erasure).
        #[arg(long)]
        gamma1: Option<f64>,
        /// Erasure probability of user 2 (semidet-erasure).
        #[arg(long)]
        gamma2: Option<f64>,
        /// Second factor channel (prsd).
        #[arg(long)]
        second: Option<PathBuf>,
        /// Write CSV (`lambda1,lambda2,support,R1,R2`) here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the full estimate (with argmax distributions) as JSON.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Run a verification suite on fixture and seeded random instances.
    Verify {
        #[arg(value_parser = suites::SUITES)]
        suite: String,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Number of random instances.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Write the JSON report here (stdout otherwise).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Load a channel file, validate it, and print a summary.
    ChannelValidate { channel: PathBuf },
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum RegionMethod {
    Ks,
    Sato,
    Semidet,
    SemidetErasure,
    Prsd,
}

fn main() -> ExitCode {
    // the suites run instances in a work pool; NSCAP_THREADS caps it
    if let Ok(threads) = std::env::var("NSCAP_THREADS") {
        if let Ok(n) = threads.parse::<usize>() {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
        }
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::InvalidArgument(_) => ExitCode::from(2),
                Error::ResourceLimit(_) => ExitCode::from(3),
                Error::NumericFailure(_) => ExitCode::from(4),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Success { scenario, emit_box, out } => cmd_success(&scenario, emit_box, out),
        Command::Region {
            channel,
            method,
            directions,
            seed,
            restarts,
            tol,
            gamma1,
            gamma2,
            second,
            out,
            json,
        } => cmd_region(
            &channel, method, directions, seed, restarts, tol, gamma1, gamma2, second, out, json,
        ),
        Command::Verify { suite, seed, count, out } => cmd_verify(&suite, seed, count, out),
        Command::ChannelValidate { channel } => cmd_channel_validate(&channel),
    }
}

#[derive(serde::Serialize)]
struct SuccessRecord {
    eta: f64,
    assist: &'static str,
    method: &'static str,
    status: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_vars: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    lp_rows: Option<usize>,
}

fn cmd_success(
    path: &std::path::Path,
    emit_box: Option<PathBuf>,
    out: Option<PathBuf>,
) -> Result<ExitCode> {
    let sc = jsonio::load_scenario(path)?;
    let broadcast = sc.user_count() > 1;
    let record = match sc.assist() {
        Assist::Full => {
            let opt = sc.optimal_success()?;
            if let Some(box_path) = emit_box {
                write_file(&box_path, &serde_json::to_string_pretty(&opt.bx).unwrap())?;
            }
            SuccessRecord {
                eta: opt.eta,
                assist: assist_name(Assist::Full, broadcast),
                method: "box-polytope-lp",
                status: "optimal",
                lp_vars: Some(opt.lp_vars),
                lp_rows: Some(opt.lp_rows),
            }
        }
        Assist::Classical => {
            let eta = sc.classical_optimal_success()?;
            SuccessRecord {
                eta,
                assist: "c",
                method: "exact-enumeration",
                status: "optimal",
                lp_vars: None,
                lp_rows: None,
            }
        }
        partial => {
            let eta = sc.mixed_optimal_success()?;
            SuccessRecord {
                eta,
                assist: assist_name(partial, broadcast),
                method: "enumeration-plus-lp",
                status: "optimal",
                lp_vars: None,
                lp_rows: None,
            }
        }
    };
    println!("{:.6}", record.eta);
    println!("status: {} ({})", record.status, record.method);
    if let (Some(v), Some(r)) = (record.lp_vars, record.lp_rows) {
        println!("lp: {v} variables, {r} constraints");
    }
    if let Some(out) = out {
        write_file(&out, &serde_json::to_string_pretty(&record).unwrap())?;
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_region(
    path: &std::path::Path,
    method: RegionMethod,
    directions: usize,
    seed: u64,
    restarts: usize,
    tol: f64,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    second: Option<PathBuf>,
    out: Option<PathBuf>,
    json: Option<PathBuf>,
) -> Result<ExitCode> {
    let ScenarioChannel::Broadcast(bc) = jsonio::load_channel(path)? else {
        return Err(Error::InvalidArgument(
            "region sweeps take a broadcast channel file".into(),
        ));
    };
    if directions < 2 {
        return Err(Error::InvalidArgument("need at least 2 directions".into()));
    }
    let cfg = SweepConfig { directions, restarts, seed, ..Default::default() };
    let est = match method {
        RegionMethod::Ks => regions::region_ks(&bc, regions::default_u_size(&bc), &cfg)?,
        RegionMethod::Sato => regions::region_sato(&bc, tol, &cfg)?,
        RegionMethod::Semidet => regions::semidet_region_closed(&bc, &cfg)?,
        RegionMethod::SemidetErasure => {
            let (Some(g1), Some(g2)) = (gamma1, gamma2) else {
                return Err(Error::InvalidArgument(
                    "--gamma1 and --gamma2 are required for semidet-erasure".into(),
                ));
            };
            regions::semidet_erasure_region_closed(&bc, g1, g2, &cfg)?
        }
        RegionMethod::Prsd => {
            let Some(second) = second else {
                return Err(Error::InvalidArgument(
                    "--second <channel.json> is required for prsd".into(),
                ));
            };
            let ScenarioChannel::Broadcast(bc2) = jsonio::load_channel(&second)? else {
                return Err(Error::InvalidArgument(
                    "the second factor must be a broadcast channel".into(),
                ));
            };
            regions::prsd_region(&bc, &bc2, &cfg)?
        }
    };
    let mut csv = String::from("lambda1,lambda2,support,R1,R2\n");
    for p in &est.points {
        csv.push_str(&format!(
            "{},{},{},{},{}\n",
            p.lambda.0, p.lambda.1, p.support, p.r1, p.r2
        ));
    }
    match out {
        Some(path) => write_file(&path, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(path) = json {
        write_file(&path, &serde_json::to_string_pretty(&est).unwrap())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_verify(suite: &str, seed: u64, count: usize, out: Option<PathBuf>) -> Result<ExitCode> {
    let report = suites::run_suite(suite, seed, count)?;
    let json = report.to_json();
    match out {
        Some(path) => write_file(&path, &json)?,
        None => println!("{json}"),
    }
    eprintln!("{}", report.human_summary());
    for c in report.checks.iter().filter(|c| !c.pass) {
        eprintln!(
            "FAIL {} [{}]: lhs {} vs rhs {} (tol {})",
            c.id, c.anchor, c.lhs, c.rhs, c.tolerance
        );
    }
    if report.all_passed() {
        Ok(ExitCode::SUCCESS)
    } else {
        Ok(ExitCode::from(1))
    }
}

fn cmd_channel_validate(path: &std::path::Path) -> Result<ExitCode> {
    let ch = jsonio::load_channel(path)?;
    let summary = match &ch {
        ScenarioChannel::WithState(c) => serde_json::json!({
            "kind": "channel_with_state",
            "x": c.x_size(),
            "y": [c.y_size()],
            "s": c.s_size(),
            "valid": true,
        }),
        ScenarioChannel::Broadcast(b) => serde_json::json!({
            "kind": "broadcast",
            "x": b.x_size(),
            "y": b.y_sizes(),
            "users": b.user_count(),
            "valid": true,
        }),
    };
    println!("{}", serde_json::to_string_pretty(&summary).unwrap());
    Ok(ExitCode::SUCCESS)
}

fn write_file(path: &std::path::Path, contents: &str) -> Result<()> {
    let mut f = std::fs::File::create(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))?;
    f.write_all(contents.as_bytes())
        .and_then(|_| f.write_all(b"\n"))
        .map_err(|e| Error::InvalidArgument(format!("cannot write {}: {e}", path.display())))
}
