//! Closed-form harmonic S-parameter model of a magnet-less circulator built
//! from three modulated parallel LC tanks in a delta loop.
//!
//! Port 1 sits at the node where tank 1 starts. The transmitted wave for the
//! forward direction appears at port 2, the node between tanks 2 and 3, so
//! that power circulates 1 → 2 → 3 → 1. Modulation is Cₙ(t) = C0 + ΔC·cos(ωm·t + φₙ)
//! with φₙ = (n−1)·α.

mod error;
mod harmonics;
mod model;
pub mod modes;
mod params;
mod smatrix;

pub use error::CoreError;
pub use harmonics::{Harmonics, KS};
pub use model::{
    branch_currents, denominators, group_delay, group_delay_of, harmonic_s_row, harmonic_transfer,
    input_impedance, mode_voltages, solve, HarmonicSRow, HarmonicTransfer, Solution,
};
pub use modes::{tank_voltages, ModeVoltages, TankVoltages};
pub use params::{
    resonance_frequency, retune_c0, CapacitorLaw, CircuitParams, Direction, ModulationParams,
};
pub use smatrix::{full_s_matrix, HarmonicSMatrix};

pub use num_complex::Complex64;

/// Default group-delay difference step (Hz).
pub const DEFAULT_GROUP_DELAY_STEP: f64 = 10e3;

impl Solution {
    pub fn input_impedance(&self, c: &CircuitParams, k: i32) -> Result<Complex64, CoreError> {
        model::impedance_from(c, self, k)
    }
}
