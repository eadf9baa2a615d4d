//! Commensurate-frequency snapping: every tone and the modulation frequency
//! are placed on a common grid j·fb with fb = fm/M, so the whole drive is
//! periodic with 1/fb and harmonics can be read off exactly.

use crate::SimError;

pub const DEFAULT_SNAP_TOL: f64 = 1e-6;
pub const MAX_BASE_DIVISOR: u64 = 10_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Snap {
    /// Base frequency (Hz).
    pub fb: f64,
    /// fm = M·fb.
    pub m: u64,
    /// Largest relative distance between a requested and a snapped frequency.
    pub deviation: f64,
}

impl Snap {
    /// Nearest grid frequency.
    pub fn snapped(&self, f: f64) -> f64 {
        self.index(f) as f64 * self.fb
    }

    /// Grid index of `f`, allowing negative frequencies.
    pub fn index(&self, f: f64) -> i64 {
        (f / self.fb).round() as i64
    }

    pub fn period(&self) -> f64 {
        1.0 / self.fb
    }
}

/// Smallest divisor M ≤ 10⁴ that puts every frequency within `tol`
/// (relative) of a multiple of fm/M.
pub fn snap(fm: f64, freqs: &[f64], tol: f64) -> Result<Snap, SimError> {
    let mut best = f64::INFINITY;
    for m in 1..=MAX_BASE_DIVISOR {
        let fb = fm / m as f64;
        let mut dev: f64 = 0.0;
        for &f in freqs {
            let n = (f / fb).round();
            if n == 0.0 {
                dev = f64::INFINITY;
                break;
            }
            dev = dev.max((f - n * fb).abs() / f.abs());
        }
        if dev <= tol {
            return Ok(Snap {
                fb,
                m,
                deviation: dev,
            });
        }
        best = best.min(dev);
    }
    Err(SimError::NonCommensurate {
        best_deviation: best,
    })
}
