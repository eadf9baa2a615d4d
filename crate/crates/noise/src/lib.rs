//! Receive-port noise from antenna and transmitter noise, including the
//! contributions that the modulation folds in from f ± fm.
//!
//! PSDs are one-sided, in V²/Hz referred to Z0.

use lptv_core::{harmonic_s_row, CircuitParams, CoreError, ModulationParams};
use rayon::prelude::*;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error(transparent)]
    Core(#[from] CoreError),
    #[error("invalid PSD: {0}")]
    InvalidPsd(String),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
    #[error("f − fm must be positive, got f = {f} Hz with fm = {fm} Hz")]
    BelowModulation { f: f64, fm: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PsdSpec {
    White(f64),
    /// (Hz, V²/Hz) points, linearly interpolated and held constant beyond
    /// the first and last point.
    Tabulated(Vec<(f64, f64)>),
}

impl PsdSpec {
    pub fn validate(&self) -> Result<(), NoiseError> {
        let level = |v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(NoiseError::InvalidPsd(format!("level must be nonnegative and finite, got {v}")))
            }
        };
        match self {
            PsdSpec::White(v) => level(*v),
            PsdSpec::Tabulated(pts) => {
                if pts.is_empty() {
                    return Err(NoiseError::InvalidPsd("empty table".into()));
                }
                for &(f, v) in pts {
                    if !f.is_finite() {
                        return Err(NoiseError::InvalidPsd(format!("non-finite frequency {f}")));
                    }
                    level(v)?;
                }
                if pts.windows(2).any(|w| w[1].0 <= w[0].0) {
                    return Err(NoiseError::InvalidPsd("table frequencies must be strictly ascending".into()));
                }
                Ok(())
            }
        }
    }

    pub fn at(&self, f: f64) -> f64 {
        match self {
            PsdSpec::White(v) => *v,
            PsdSpec::Tabulated(pts) => {
                let i = pts.partition_point(|p| p.0 <= f);
                if i == 0 {
                    return pts[0].1;
                }
                if i == pts.len() {
                    return pts[i - 1].1;
                }
                let ((f0, v0), (f1, v1)) = (pts[i - 1], pts[i]);
                v0 + (v1 - v0) * (f - f0) / (f1 - f0)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseRow {
    pub f: f64,
    pub psd_rx: f64,
    /// Antenna noise received at its own frequency.
    pub in_band: f64,
    /// Antenna and transmitter noise translated from f ± fm.
    pub folded: f64,
}

/// One row per grid frequency. The entry for input at f + k·fm and output at
/// f is the port-1 harmonic row evaluated at f + k·fm, output harmonic −k.
/// The transmitter term at k = 0 is left out.
pub fn noise_fold(
    c: &CircuitParams,
    m: &ModulationParams,
    ant: &PsdSpec,
    tx: &PsdSpec,
    grid: &[f64],
) -> Result<Vec<NoiseRow>, NoiseError> {
    c.validate()?;
    m.validate(c)?;
    ant.validate()?;
    tx.validate()?;
    if grid.is_empty() {
        return Err(NoiseError::InvalidGrid("empty".into()));
    }
    for &f in grid {
        if !(f.is_finite() && f > 0.0) {
            return Err(NoiseError::InvalidGrid(format!("frequencies must be positive and finite, got {f}")));
        }
        if f - m.fm <= 0.0 {
            return Err(NoiseError::BelowModulation { f, fm: m.fm });
        }
    }
    grid.par_iter()
        .map(|&f| {
            let own = harmonic_s_row(c, m, f)?[0];
            let in_band = ant.at(f) * own.s21.norm_sqr();
            let mut folded = 0.0;
            for k in [-1i32, 1] {
                let fin = f + k as f64 * m.fm;
                let s = harmonic_s_row(c, m, fin)?[-k];
                folded += ant.at(fin) * s.s21.norm_sqr() + tx.at(fin) * s.s31.norm_sqr();
            }
            Ok(NoiseRow {
                f,
                psd_rx: in_band + folded,
                in_band,
                folded,
            })
        })
        .collect()
}
