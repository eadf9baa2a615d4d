//! Design-level quantities built on the closed-form model: per-frequency
//! metrics, the isolation-limited bandwidth, sweeps over modulation depth and
//! frequency, and the modulation feed network.

mod bandwidth;
mod metrics;
mod modnet;
mod sweep;

use lptv_core::CoreError;
use thiserror::Error;

pub use bandwidth::{bandwidth, Bandwidth, BandwidthFlag, Limit};
pub use metrics::{frequency_response, metrics_at, refine_center, MetricsRow, Response};
pub use modnet::{
    max_gain_residual, mod_network_gain, mod_network_gain_q, synthesize_mod_network,
    synthesize_mod_network_q, ModNetwork, Synthesis, DEFAULT_QK,
};
pub use sweep::{sweep, DesignPoints, SweepConfig, SweepResult};

pub use lptv_core::retune_c0;

/// Default IL ceiling β and IX floor γ of the bandwidth definition (dB).
pub const DEFAULT_BETA: f64 = 4.0;
pub const DEFAULT_GAMMA: f64 = 20.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DesignError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("isolation maximum at {fc} Hz sits on the edge of the grid; widen it")]
    CenterNotBracketed { fc: f64 },
    #[error("the {which} band reaches the grid edge at {edge} Hz; widen the grid")]
    BandNotCovered { which: &'static str, edge: f64 },
    #[error("invalid network parameters: {0}")]
    InvalidNetwork(String),
    #[error("modulation network gain is singular (1 − ωm²·Lm·Ck = 0) at Lm = {lm} H")]
    SingularGain { lm: f64 },
    #[error("no modulation network with Lm in (20L, 1e4·L] and positive Cm: {0}")]
    Infeasible(String),
}
