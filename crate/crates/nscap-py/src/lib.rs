//! Python bindings for the workbench: channels, coding scenarios, the
//! optimal-success solvers and the region sweeps. See
//! `python/smoke_test.py` for a usage tour.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use nscap_core::jsonio;
use nscap_core::probspace::Pmf;
use nscap_core::regions::{self, SweepConfig};
use nscap_core::scenario::ScenarioChannel;
use nscap_core::Error;

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(m) => PyValueError::new_err(m),
        Error::ResourceLimit(m) => PyRuntimeError::new_err(format!("resource limit: {m}")),
        Error::NumericFailure(m) => PyRuntimeError::new_err(format!("numeric failure: {m}")),
    }
}

/// A point-to-point channel with state or a broadcast channel.
#[pyclass(from_py_object)]
#[derive(Clone)]
struct Channel {
    inner: ScenarioChannel,
}

#[pymethods]
impl Channel {
    /// Parse the JSON channel document used by the CLI and fixtures.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: jsonio::channel_from_json(text).map_err(to_py_err)? })
    }

    /// The state-fading channel over GF(q): output `(x + g*s, g)`.
    #[staticmethod]
    fn fading_dirt(q: usize) -> PyResult<Self> {
        Ok(Self {
            inner: ScenarioChannel::WithState(
                nscap_core::channels::fading_dirt(q).map_err(to_py_err)?,
            ),
        })
    }

    /// The three-input deterministic broadcast channel.
    #[staticmethod]
    fn blackwell() -> Self {
        Self { inner: ScenarioChannel::Broadcast(nscap_core::channels::blackwell()) }
    }

    fn to_json(&self) -> String {
        jsonio::channel_to_json(&self.inner)
    }

    fn kind(&self) -> &'static str {
        match self.inner {
            ScenarioChannel::WithState(_) => "channel_with_state",
            ScenarioChannel::Broadcast(_) => "broadcast",
        }
    }

    /// Reveal the state to the receiver as an extra output coordinate.
    fn augment_with_csir(&self) -> PyResult<Self> {
        match &self.inner {
            ScenarioChannel::WithState(ch) => Ok(Self {
                inner: ScenarioChannel::WithState(nscap_core::channels::augment_with_csir(ch)),
            }),
            ScenarioChannel::Broadcast(_) => {
                Err(PyValueError::new_err("broadcast channels carry no state"))
            }
        }
    }

    /// Concatenate independent per-user erasure channels (broadcast only).
    fn concat_erasure(&self, gammas: Vec<f64>) -> PyResult<Self> {
        match &self.inner {
            ScenarioChannel::Broadcast(bc) => Ok(Self {
                inner: ScenarioChannel::Broadcast(
                    nscap_core::channels::concat_erasure(
                        bc,
                        &gammas,
                        nscap_core::channels::ErasureCoupling::Independent,
                    )
                    .map_err(to_py_err)?,
                ),
            }),
            ScenarioChannel::WithState(_) => {
                Err(PyValueError::new_err("erasure concatenation applies to broadcast channels"))
            }
        }
    }
}

/// A coding scenario: channel, blocklength, message sizes, assistance class
/// and side-information wiring, ready to optimize.
#[pyclass]
struct Scenario {
    inner: nscap_core::NsScenario,
}

#[pymethods]
impl Scenario {
    /// Parse the JSON scenario document used by the CLI (`base_dir`
    /// resolves a relative channel path).
    #[staticmethod]
    #[pyo3(signature = (text, base_dir = "."))]
    fn from_json(text: &str, base_dir: &str) -> PyResult<Self> {
        Ok(Self {
            inner: jsonio::scenario_from_json(text, std::path::Path::new(base_dir))
                .map_err(to_py_err)?,
        })
    }

    /// Build a scenario directly. `assist` is one of
    /// `c | ns | ns0 | ns1 | ns2 | ns_full`; `si` maps 1-based user ids to
    /// lists of 1-based message indices.
    #[new]
    #[pyo3(signature = (channel, messages, assist, n = 1, si = None, si_available = None))]
    fn new(
        channel: &Channel,
        messages: Vec<usize>,
        assist: &str,
        n: usize,
        si: Option<std::collections::BTreeMap<String, Vec<usize>>>,
        si_available: Option<Vec<usize>>,
    ) -> PyResult<Self> {
        let doc = jsonio::ScenarioDoc {
            channel: jsonio::ChannelRef::Inline(jsonio::ChannelDoc::from_channel(&channel.inner)),
            n,
            messages,
            assist: assist.to_string(),
            si: si.unwrap_or_default(),
            si_available,
        };
        Ok(Self {
            inner: jsonio::scenario_from_doc(&doc, std::path::Path::new("."))
                .map_err(to_py_err)?,
        })
    }

    /// Optimal success probability of the fully assisted class; returns
    /// `(eta, box_json)`.
    fn optimal_success(&self) -> PyResult<(f64, String)> {
        let opt = self.inner.optimal_success().map_err(to_py_err)?;
        Ok((opt.eta, serde_json::to_string(&opt.bx).expect("box serializes")))
    }

    /// Exact optimum over deterministic encoders/decoders.
    fn classical_optimal_success(&self) -> PyResult<f64> {
        self.inner.classical_optimal_success().map_err(to_py_err)
    }

    /// Optimum of the partially assisted classes (ns0/ns1/ns2).
    fn mixed_optimal_success(&self) -> PyResult<f64> {
        self.inner.mixed_optimal_success().map_err(to_py_err)
    }
}

/// Shannon entropy of a distribution, in bits.
#[pyfunction]
fn entropy(probs: Vec<f64>) -> PyResult<f64> {
    Ok(nscap_core::probspace::entropy(&Pmf::new(probs).map_err(to_py_err)?))
}

/// Capacity of a channel with state known at both ends.
#[pyfunction]
#[pyo3(signature = (channel, tol = 1e-9))]
fn csir_capacity(channel: &Channel, tol: f64) -> PyResult<f64> {
    match &channel.inner {
        ScenarioChannel::WithState(ch) => regions::csir_capacity(ch, tol).map_err(to_py_err),
        ScenarioChannel::Broadcast(_) => {
            Err(PyValueError::new_err("capacity with state needs a channel with state"))
        }
    }
}

/// Lower estimate of the classical capacity with transmitter-only state
/// knowledge.
#[pyfunction]
#[pyo3(signature = (channel, u_size = None, restarts = 32))]
fn gelfand_pinsker_estimate(
    channel: &Channel,
    u_size: Option<usize>,
    restarts: usize,
) -> PyResult<f64> {
    match &channel.inner {
        ScenarioChannel::WithState(ch) => {
            let u = u_size
                .unwrap_or_else(|| (ch.x_size() * ch.s_size()).min(ch.y_size() + ch.s_size() - 1));
            regions::gelfand_pinsker_estimate(ch, u, restarts).map_err(to_py_err)
        }
        ScenarioChannel::Broadcast(_) => {
            Err(PyValueError::new_err("the estimate needs a channel with state"))
        }
    }
}

/// Rate-region boundary sweep. `method` is one of
/// `ks | sato | semidet | semidet-erasure | prsd`; returns
/// `[(lambda1, lambda2, support, r1, r2), ..]`.
#[pyfunction]
#[pyo3(signature = (channel, method, directions = 8, seed = 0x5eed, restarts = 32,
                    gamma1 = None, gamma2 = None, second = None))]
#[allow(clippy::too_many_arguments)]
fn region(
    channel: &Channel,
    method: &str,
    directions: usize,
    seed: u64,
    restarts: usize,
    gamma1: Option<f64>,
    gamma2: Option<f64>,
    second: Option<&Channel>,
) -> PyResult<Vec<(f64, f64, f64, f64, f64)>> {
    let ScenarioChannel::Broadcast(bc) = &channel.inner else {
        return Err(PyValueError::new_err("region sweeps need a broadcast channel"));
    };
    let cfg = SweepConfig { directions, restarts, seed, ..Default::default() };
    let est = match method {
        "ks" => regions::region_ks(bc, regions::default_u_size(bc), &cfg),
        "sato" => regions::region_sato(bc, regions::SATO_GAP_TOL, &cfg),
        "semidet" => regions::semidet_region_closed(bc, &cfg),
        "semidet-erasure" => {
            let (Some(g1), Some(g2)) = (gamma1, gamma2) else {
                return Err(PyValueError::new_err("gamma1 and gamma2 are required"));
            };
            regions::semidet_erasure_region_closed(bc, g1, g2, &cfg)
        }
        "prsd" => {
            let Some(second) = second else {
                return Err(PyValueError::new_err("second factor channel required"));
            };
            let ScenarioChannel::Broadcast(bc2) = &second.inner else {
                return Err(PyValueError::new_err("second factor must be broadcast"));
            };
            regions::prsd_region(bc, bc2, &cfg)
        }
        other => return Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
    .map_err(to_py_err)?;
    Ok(est
        .points
        .iter()
        .map(|p| (p.lambda.0, p.lambda.1, p.support, p.r1, p.r2))
        .collect())
}

#[pymodule]
fn nscap_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Channel>()?;
    m.add_class::<Scenario>()?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(csir_capacity, m)?)?;
    m.add_function(wrap_pyfunction!(gelfand_pinsker_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(region, m)?)?;
    Ok(())
}
