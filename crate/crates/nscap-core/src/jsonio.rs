//! JSON schemas for channels and scenarios, shared by the CLI, fixtures and
//! the Python bindings.
//!
//! Channel document:
//! `{"kind": "channel_with_state" | "broadcast", "x": int, "y": [int, ..],
//!   "s": int?, "p_s": [..]?, "kernel": [[..], ..], "labels": {..}?}`
//! with kernel rows indexed row-major by `(x, s)` (state fastest) for
//! channels with state and by `x` for broadcast channels; probabilities are
//! validated on load. An erasure symbol, when present, is the final element
//! of its alphabet.
//!
//! Scenario document:
//! `{"channel": <path or inline channel>, "n": int, "messages": [M_1, ..],
//!   "assist": "c" | "ns" | "ns0" | "ns1" | "ns2" | "ns_full",
//!   "si": {"1": [2], ..}, "si_available": [1, ..]}`
//! where `si` maps 1-based user ids to lists of 1-based message indices and
//! `si_available` (default: every user) names the users whose
//! side-information input is connected.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::channels::{BroadcastChannel, ChannelWithState, SideInfoStructure};
use crate::probspace::{CondPmf, Pmf};
use crate::scenario::{Assist, NsScenario, ScenarioChannel};
use crate::{Error, Result};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChannelDoc {
    pub kind: String,
    pub x: usize,
    pub y: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p_s: Option<Vec<f64>>,
    pub kernel: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub labels: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelRef {
    Path(String),
    Inline(ChannelDoc),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioDoc {
    pub channel: ChannelRef,
    #[serde(default = "default_n")]
    pub n: usize,
    pub messages: Vec<usize>,
    pub assist: String,
    #[serde(default)]
    pub si: BTreeMap<String, Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub si_available: Option<Vec<usize>>,
}

fn default_n() -> usize {
    1
}

fn parse_err(e: impl std::fmt::Display) -> Error {
    Error::InvalidArgument(format!("parse error: {e}"))
}

impl ChannelDoc {
    pub fn to_channel(&self) -> Result<ScenarioChannel> {
        let flat: Vec<f64> = self.kernel.iter().flatten().copied().collect();
        match self.kind.as_str() {
            "channel_with_state" => {
                if self.y.len() != 1 {
                    return Err(Error::InvalidArgument(
                        "channel_with_state expects a single output alphabet".into(),
                    ));
                }
                let s = self.s.unwrap_or(1);
                let state = match &self.p_s {
                    Some(p) => Pmf::new(p.clone())?,
                    None => Pmf::uniform(s),
                };
                if state.len() != s {
                    return Err(Error::InvalidArgument(format!(
                        "p_s has {} entries, s = {s}",
                        state.len()
                    )));
                }
                if self.kernel.len() != self.x * s {
                    return Err(Error::InvalidArgument(format!(
                        "kernel has {} rows, expected x*s = {}",
                        self.kernel.len(),
                        self.x * s
                    )));
                }
                let kernel = CondPmf::new(flat, self.x * s, self.y[0])?;
                Ok(ScenarioChannel::WithState(ChannelWithState::new(kernel, state, self.x)?))
            }
            "broadcast" => {
                if self.kernel.len() != self.x {
                    return Err(Error::InvalidArgument(format!(
                        "kernel has {} rows, expected x = {}",
                        self.kernel.len(),
                        self.x
                    )));
                }
                let total: usize = self.y.iter().product();
                let kernel = CondPmf::new(flat, self.x, total)?;
                Ok(ScenarioChannel::Broadcast(BroadcastChannel::new(kernel, self.y.clone())?))
            }
            other => Err(Error::InvalidArgument(format!("unknown channel kind {other:?}"))),
        }
    }

    pub fn from_channel(ch: &ScenarioChannel) -> ChannelDoc {
        match ch {
            ScenarioChannel::WithState(c) => ChannelDoc {
                kind: "channel_with_state".into(),
                x: c.x_size(),
                y: vec![c.y_size()],
                s: Some(c.s_size()),
                p_s: Some(c.state().probs().to_vec()),
                kernel: (0..c.x_size() * c.s_size())
                    .map(|r| c.kernel().row(r).to_vec())
                    .collect(),
                labels: None,
            },
            ScenarioChannel::Broadcast(b) => ChannelDoc {
                kind: "broadcast".into(),
                x: b.x_size(),
                y: b.y_sizes().to_vec(),
                s: None,
                p_s: None,
                kernel: (0..b.x_size()).map(|r| b.kernel().row(r).to_vec()).collect(),
                labels: None,
            },
        }
    }
}

pub fn channel_from_json(text: &str) -> Result<ScenarioChannel> {
    let doc: ChannelDoc = serde_json::from_str(text).map_err(parse_err)?;
    doc.to_channel()
}

pub fn channel_to_json(ch: &ScenarioChannel) -> String {
    serde_json::to_string_pretty(&ChannelDoc::from_channel(ch)).expect("serializable")
}

pub fn load_channel(path: &Path) -> Result<ScenarioChannel> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    channel_from_json(&text)
}

pub fn parse_assist(s: &str) -> Result<Assist> {
    Ok(match s {
        "c" => Assist::Classical,
        "ns" | "ns_full" => Assist::Full,
        "ns0" => Assist::Ns0,
        "ns1" => Assist::Ns1,
        "ns2" => Assist::Ns2,
        other => {
            return Err(Error::InvalidArgument(format!(
                "unknown assistance class {other:?} (expected c|ns|ns0|ns1|ns2|ns_full)"
            )))
        }
    })
}

pub fn assist_name(a: Assist, broadcast: bool) -> &'static str {
    match a {
        Assist::Classical => "c",
        Assist::Full => {
            if broadcast {
                "ns_full"
            } else {
                "ns"
            }
        }
        Assist::Ns0 => "ns0",
        Assist::Ns1 => "ns1",
        Assist::Ns2 => "ns2",
    }
}

/// Parse a scenario document; `base_dir` resolves a relative channel path.
pub fn scenario_from_json(text: &str, base_dir: &Path) -> Result<NsScenario> {
    let doc: ScenarioDoc = serde_json::from_str(text).map_err(parse_err)?;
    scenario_from_doc(&doc, base_dir)
}

pub fn scenario_from_doc(doc: &ScenarioDoc, base_dir: &Path) -> Result<NsScenario> {
    let channel = match &doc.channel {
        ChannelRef::Path(p) => {
            let path = Path::new(p);
            let resolved =
                if path.is_absolute() { path.to_path_buf() } else { base_dir.join(path) };
            load_channel(&resolved)?
        }
        ChannelRef::Inline(c) => c.to_channel()?,
    };
    let assist = parse_assist(&doc.assist)?;
    match channel {
        ScenarioChannel::WithState(ch) => {
            if doc.messages.len() != 1 {
                return Err(Error::InvalidArgument(
                    "point-to-point scenarios take a single message size".into(),
                ));
            }
            if !doc.si.is_empty() {
                return Err(Error::InvalidArgument(
                    "side information applies to broadcast scenarios".into(),
                ));
            }
            NsScenario::point_to_point(ch, doc.messages[0], doc.n, assist)
        }
        ScenarioChannel::Broadcast(bc) => {
            let k = bc.user_count();
            let mut known = vec![Vec::new(); k];
            for (user, msgs) in &doc.si {
                let u: usize = user
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad si user key {user:?}")))?;
                if u < 1 || u > k {
                    return Err(Error::InvalidArgument(format!("si user {u} out of range")));
                }
                for &m in msgs {
                    if m < 1 || m > k {
                        return Err(Error::InvalidArgument(format!(
                            "si message index {m} out of range"
                        )));
                    }
                    known[u - 1].push(m - 1);
                }
            }
            let side_info = SideInfoStructure::new(k, known)?;
            let avail: Vec<usize> = match &doc.si_available {
                Some(users) => {
                    let mut v = Vec::new();
                    for &u in users {
                        if u < 1 || u > k {
                            return Err(Error::InvalidArgument(format!(
                                "si_available user {u} out of range"
                            )));
                        }
                        v.push(u - 1);
                    }
                    v
                }
                None => (0..k).collect(),
            };
            NsScenario::broadcast(bc, doc.messages.clone(), doc.n, assist, side_info, &avail)
        }
    }
}

pub fn load_scenario(path: &Path) -> Result<NsScenario> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::InvalidArgument(format!("cannot read {}: {e}", path.display())))?;
    let base = path.parent().unwrap_or(Path::new("."));
    scenario_from_json(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::blackwell;

    #[test]
    fn channel_round_trip() {
        let ch = ScenarioChannel::Broadcast(blackwell());
        let json = channel_to_json(&ch);
        let back = channel_from_json(&json).unwrap();
        match (back, ch) {
            (ScenarioChannel::Broadcast(a), ScenarioChannel::Broadcast(b)) => assert_eq!(a, b),
            _ => panic!("kind changed in round trip"),
        }
    }

    #[test]
    fn with_state_round_trip() {
        let ch = ScenarioChannel::WithState(crate::channels::fading_dirt(2).unwrap());
        let json = channel_to_json(&ch);
        let back = channel_from_json(&json).unwrap();
        match (back, ch) {
            (ScenarioChannel::WithState(a), ScenarioChannel::WithState(b)) => assert_eq!(a, b),
            _ => panic!("kind changed in round trip"),
        }
    }

    #[test]
    fn invalid_probabilities_rejected() {
        let bad = r#"{"kind":"broadcast","x":1,"y":[2],"kernel":[[0.6,0.6]]}"#;
        assert!(channel_from_json(bad).is_err());
        let unknown = r#"{"kind":"mystery","x":1,"y":[2],"kernel":[[0.5,0.5]]}"#;
        assert!(channel_from_json(unknown).is_err());
    }

    #[test]
    fn scenario_with_inline_channel_and_si() {
        let text = r#"{
            "channel": {"kind":"broadcast","x":3,"y":[2,2],
                        "kernel":[[1,0,0,0],[0,0,0,1],[0,1,0,0]]},
            "n": 1,
            "messages": [2, 2],
            "assist": "ns_full",
            "si": {"1": [2]},
            "si_available": [1]
        }"#;
        let sc = scenario_from_json(text, Path::new(".")).unwrap();
        assert_eq!(sc.messages(), &[2, 2]);
        assert_eq!(sc.side_info().known_by(0), &[1]);
        assert!(sc.si_available()[0]);
        assert!(!sc.si_available()[1]);
    }

    #[test]
    fn assist_parsing() {
        assert!(matches!(parse_assist("c").unwrap(), Assist::Classical));
        assert!(matches!(parse_assist("ns").unwrap(), Assist::Full));
        assert!(matches!(parse_assist("ns_full").unwrap(), Assist::Full));
        assert!(matches!(parse_assist("ns1").unwrap(), Assist::Ns1));
        assert!(parse_assist("quantum").is_err());
    }
}
