//! Workbench for non-signaling-assisted coding over discrete memoryless
//! channels.
//!
//! The crate computes exact finite-blocklength optimal success probabilities
//! of coding schemes assisted by non-signaling boxes, via linear programming
//! over the box polytope, and evaluates the matching single-letter capacity
//! expressions and two-user rate regions. Supported channel models are
//! point-to-point channels with state (non-causal state knowledge at the
//! transmitter), K-user broadcast channels, and broadcast channels with
//! message side information at the receivers.

pub mod boxes;
pub mod channels;
pub mod gf;
pub mod jsonio;
pub mod lp;
pub mod probspace;
pub mod random;
pub mod regions;
pub mod scenario;

/// Crate-wide error type. The variants mirror the failure classes surfaced
/// by the CLI exit codes.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
    #[error("numeric failure: {0}")]
    NumericFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub use boxes::{BoxTable, PartyWire, WireRole};
pub use channels::{BroadcastChannel, ChannelWithState, SideInfoStructure};
pub use lp::{LpModel, LpSolution, LpStatus};
pub use probspace::{CondPmf, JointDist, Pmf};
pub use regions::{Polymatroid2, RegionEstimate};
pub use scenario::{Assist, NsScenario, ScenarioChannel};
