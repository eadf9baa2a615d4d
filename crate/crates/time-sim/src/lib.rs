//! Time-domain simulation of the three-tank delta junction.
//!
//! The Kirchhoff equations are integrated with an adaptive Dormand–Prince
//! scheme on a commensurate frequency grid, and steady-state harmonics are
//! read off by exact projection over whole common periods. Besides the
//! linear prescribed-capacitance model this supports polynomial varactors,
//! which drive the compression and two-tone experiments, and random
//! modulation jitter.

mod dopri;
mod drive;
mod experiments;
mod extract;
mod snap;
mod sparams;
mod system;
mod transient;
mod varactor;

use lptv_core::CoreError;
use thiserror::Error;

pub use dopri::{Stats, Tolerances};
pub use drive::{DriveSpec, JitterSpec, Tone};
pub use experiments::{
    compression_sweep, jittered_isolation, two_tone_test, CompressionOptions, CompressionPoint,
    CompressionResult, JitterResult, TwoTonePoint, TwoToneResult,
};
pub use extract::{run_steady, samples_per_base, ClipReport, ExtractOptions, SteadyState};
pub use snap::{snap, Snap, DEFAULT_SNAP_TOL};
pub use sparams::{extract_s_parameters, probe_amplitude, SimSRow};
pub use system::{assemble_system, System, DIM, PORT_NODE};
pub use transient::{integrate, steady_state_harmonics, Trajectory, TrajectoryHarmonics};
pub use varactor::{effective_capacitance_shift, VaractorModel};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid drive: {0}")]
    InvalidDrive(String),
    #[error("invalid varactor model: {0}")]
    InvalidVaractor(String),
    #[error("frequencies are not commensurate with the modulation (best relative deviation {best_deviation:e})")]
    NonCommensurate { best_deviation: f64 },
    #[error("frequency {f} Hz is not on the {fb} Hz grid")]
    OffGrid { f: f64, fb: f64 },
    #[error("integrator step underflow at t = {t} s (h = {h} s)")]
    StepUnderflow { t: f64, h: f64 },
    #[error("steady state not reached after {periods} base periods (relative change {change:e})")]
    NotSettled { change: f64, periods: u64 },
    #[error("{0}")]
    Experiment(String),
}
