//! Regenerates the JSON fixtures under `fixtures/` at the workspace root.
//!
//! Run with `cargo run -p nscap-cli --example gen_fixtures` from anywhere in
//! the workspace.

use std::fs;
use std::path::PathBuf;

use nscap_core::channels::{blackwell, concat_erasure, fading_dirt, ErasureCoupling};
use nscap_core::jsonio::channel_to_json;
use nscap_core::random::{random_broadcast, rng_from_seed};
use nscap_core::scenario::ScenarioChannel;

fn main() {
    let root = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures");
    fs::create_dir_all(&root).unwrap();
    let write = |name: &str, contents: String| {
        fs::write(root.join(name), contents + "\n").unwrap();
        println!("wrote fixtures/{name}");
    };

    write("blackwell.json", channel_to_json(&ScenarioChannel::Broadcast(blackwell())));
    for gamma in [0.25f64, 0.5] {
        let e = concat_erasure(&blackwell(), &[gamma, gamma], ErasureCoupling::Independent)
            .unwrap();
        write(
            &format!("blackwell_erasure_g{:02}.json", (gamma * 100.0) as u32),
            channel_to_json(&ScenarioChannel::Broadcast(e)),
        );
    }
    for q in [2usize, 3] {
        write(
            &format!("fading_dirt_q{q}.json"),
            channel_to_json(&ScenarioChannel::WithState(fading_dirt(q).unwrap())),
        );
    }
    // output independent of both input and state
    write(
        "broken_channel.json",
        channel_to_json(&ScenarioChannel::WithState(nscap_core::channels::broken_channel(
            2,
            nscap_core::probspace::Pmf::uniform(2),
            nscap_core::probspace::Pmf::new(vec![0.5, 0.3, 0.2]).unwrap(),
        ))),
    );
    // a fixed 2-user channel for the side-information scenario
    let bc = random_broadcast(&mut rng_from_seed(1), 2, &[2, 2]);
    write("bc_2user.json", channel_to_json(&ScenarioChannel::Broadcast(bc)));

    write(
        "scenario_fading_dirt_q2_ns.json",
        r#"{
  "channel": "fading_dirt_q2.json",
  "n": 1,
  "messages": [2],
  "assist": "ns"
}"#
        .to_string(),
    );
    write(
        "scenario_fading_dirt_q2_c.json",
        r#"{
  "channel": "fading_dirt_q2.json",
  "n": 1,
  "messages": [2],
  "assist": "c"
}"#
        .to_string(),
    );
    write(
        "scenario_broken_m3.json",
        r#"{
  "channel": "broken_channel.json",
  "n": 1,
  "messages": [3],
  "assist": "ns"
}"#
        .to_string(),
    );
    write(
        "scenario_si_2user.json",
        r#"{
  "channel": "bc_2user.json",
  "n": 1,
  "messages": [2, 2],
  "assist": "ns_full",
  "si": {"1": [2]},
  "si_available": [1]
}"#
        .to_string(),
    );
}
