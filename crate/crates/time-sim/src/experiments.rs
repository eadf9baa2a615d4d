//! Large-signal and Monte-Carlo experiments on top of the steady-state runner.
//!
//! Power levels are available source power in dBm, A²/(8·Z0); output power
//! is the power delivered into the port load, |V|²/(2·Z0). Port 1 is always
//! the input; the transmitted and isolated ports follow the direction.

use lptv_core::{CircuitParams, Direction, ModulationParams};
use rayon::prelude::*;

use crate::extract::{run_steady, ExtractOptions};
use crate::{assemble_system, DriveSpec, JitterSpec, SimError, Tone, VaractorModel};

fn amplitude(z0: f64, dbm: f64) -> f64 {
    (8.0 * z0 * 10f64.powf((dbm - 30.0) / 10.0)).sqrt()
}

fn dbm(z0: f64, v: f64) -> f64 {
    10.0 * (v * v / (2.0 * z0)).log10() + 30.0
}

/// (transmitted, isolated) port for input at port 1.
fn ports(d: Direction) -> (usize, usize) {
    match d {
        Direction::Forward => (2, 3),
        Direction::Reverse => (3, 2),
    }
}

/// Linear interpolation of the abscissa where `y` first drops to `level`.
fn crossing(x: &[f64], y: &[f64], level: f64) -> Option<f64> {
    for i in 1..x.len() {
        if y[i] <= level && y[i - 1] > level {
            let t = (y[i - 1] - level) / (y[i - 1] - y[i]);
            return Some(x[i - 1] + t * (x[i] - x[i - 1]));
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionOptions {
    /// Gain compression defining the X-dB point.
    pub x_db: f64,
    /// Minimum isolation.
    pub sigma_db: f64,
    pub extract: ExtractOptions,
}

impl Default for CompressionOptions {
    fn default() -> Self {
        Self {
            x_db: 1.0,
            sigma_db: 20.0,
            extract: ExtractOptions {
                content_order: 5,
                ..ExtractOptions::default()
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompressionPoint {
    pub pin_dbm: f64,
    pub pout_dbm: f64,
    pub gain_db: f64,
    pub ix_db: f64,
    pub clip: bool,
    /// Worst varactor excursion beyond the safe window (V); negative is margin.
    pub clip_margin: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompressionResult {
    pub points: Vec<CompressionPoint>,
    /// Gain at the lowest grid power.
    pub small_signal_gain_db: f64,
    /// X-dB compression point; `None` when the grid does not bracket it.
    pub p1db_dbm: Option<f64>,
    /// Highest input power at which isolation still exceeds σ; `None` if it
    /// never drops below σ on the grid.
    pub pix_dbm: Option<f64>,
    /// min(X-dB point, isolation limit) over whichever limits were found.
    pub pmax_dbm: Option<f64>,
}

/// Steps the input power and records gain, isolation and clipping at `f`.
/// Without a varactor the prescribed-capacitance model is used, which is
/// linear in the RF signal.
pub fn compression_sweep(
    circuit: &CircuitParams,
    m: &ModulationParams,
    varactor: Option<&VaractorModel>,
    f: f64,
    pin_grid: &[f64],
    opts: &CompressionOptions,
) -> Result<CompressionResult, SimError> {
    if pin_grid.len() < 2 || pin_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::InvalidDrive("power grid must be ascending with at least two points".into()));
    }
    let (tx, iso) = ports(m.direction);
    let z0 = circuit.z0;
    let points = pin_grid
        .par_iter()
        .map(|&p| {
            let drive = DriveSpec::new(
                vec![Tone {
                    port: 1,
                    freq: f,
                    amp: amplitude(z0, p),
                    phase: 0.0,
                }],
                *m,
            );
            let sys = assemble_system(circuit, &drive, varactor)?;
            let ss = run_steady(&sys, &[sys.snap.snapped(f)], &opts.extract)?;
            let pout = dbm(z0, ss.port_voltage(0, tx).norm());
            let piso = dbm(z0, ss.port_voltage(0, iso).norm());
            Ok(CompressionPoint {
                pin_dbm: p,
                pout_dbm: pout,
                gain_db: pout - p,
                ix_db: p - piso,
                clip: ss.clip.is_some_and(|c| c.events > 0),
                clip_margin: ss.clip.map(|c| c.max_excursion),
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;
    let pins: Vec<f64> = points.iter().map(|p| p.pin_dbm).collect();
    let gains: Vec<f64> = points.iter().map(|p| p.gain_db).collect();
    let ixs: Vec<f64> = points.iter().map(|p| p.ix_db).collect();
    let g0 = gains[0];
    let p1db = crossing(&pins, &gains, g0 - opts.x_db);
    let pix = if ixs[0] <= opts.sigma_db {
        Some(pins[0])
    } else {
        crossing(&pins, &ixs, opts.sigma_db)
    };
    let pmax = match (p1db, pix) {
        (Some(a), Some(b)) => Some(a.min(b)),
        (a, b) => a.or(b),
    };
    Ok(CompressionResult {
        points,
        small_signal_gain_db: g0,
        p1db_dbm: p1db,
        pix_dbm: pix,
        pmax_dbm: pmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoTonePoint {
    /// Available power per tone.
    pub pin_dbm: f64,
    pub pout_fund_dbm: f64,
    /// Output at 2f₁ − f₂.
    pub pout_im3_dbm: f64,
    pub clip: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TwoToneResult {
    pub points: Vec<TwoTonePoint>,
    /// Input-referred intercept; +∞ when the IM3 product is below the numeric floor.
    pub iip3_dbm: f64,
    /// Least-squares IM3 slope over the fit points (dB/dB).
    pub im3_slope: Option<f64>,
    pub fund_slope: f64,
    pub n_fit: usize,
}

/// IM3 below the fundamental by more than this is treated as numerical noise.
pub const IM3_FLOOR_DBC: f64 = -150.0;

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

/// Equal-power tones at f₁ and f₂ into port 1; the intercept comes from the
/// 1:1 and 3:1 asymptotes anchored on the lowest `n_fit` grid points.
pub fn two_tone_test(
    circuit: &CircuitParams,
    m: &ModulationParams,
    varactor: Option<&VaractorModel>,
    f1: f64,
    f2: f64,
    pin_grid: &[f64],
    n_fit: usize,
    extract: &ExtractOptions,
) -> Result<TwoToneResult, SimError> {
    if f1 == f2 {
        return Err(SimError::InvalidDrive("two-tone frequencies must differ".into()));
    }
    if n_fit < 2 || pin_grid.len() < n_fit || pin_grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(SimError::InvalidDrive(format!(
            "power grid must be ascending with at least {} points",
            n_fit.max(2)
        )));
    }
    let (tx, _) = ports(m.direction);
    let z0 = circuit.z0;
    let fim = 2.0 * f1 - f2;
    if fim <= 0.0 {
        return Err(SimError::InvalidDrive("2f1 − f2 must be positive".into()));
    }
    let points = pin_grid
        .par_iter()
        .map(|&p| {
            let a = amplitude(z0, p);
            let tone = |freq| Tone {
                port: 1,
                freq,
                amp: a,
                phase: 0.0,
            };
            let drive = DriveSpec::new(vec![tone(f1), tone(f2)], *m);
            let sys = assemble_system(circuit, &drive, varactor)?;
            let probe = [sys.snap.snapped(f1), sys.snap.snapped(fim)];
            let ss = run_steady(&sys, &probe, extract)?;
            Ok(TwoTonePoint {
                pin_dbm: p,
                pout_fund_dbm: dbm(z0, ss.port_voltage(0, tx).norm()),
                pout_im3_dbm: dbm(z0, ss.port_voltage(1, tx).norm()),
                clip: ss.clip.is_some_and(|c| c.events > 0),
            })
        })
        .collect::<Result<Vec<_>, SimError>>()?;

    let fit = &points[..n_fit];
    let x: Vec<f64> = fit.iter().map(|p| p.pin_dbm).collect();
    let y1: Vec<f64> = fit.iter().map(|p| p.pout_fund_dbm).collect();
    let y3: Vec<f64> = fit.iter().map(|p| p.pout_im3_dbm).collect();
    let fund_slope = ls_slope(&x, &y1);
    let below = fit
        .iter()
        .filter(|p| !(p.pout_im3_dbm - p.pout_fund_dbm > IM3_FLOOR_DBC))
        .count();
    if below == n_fit {
        return Ok(TwoToneResult {
            points,
            iip3_dbm: f64::INFINITY,
            im3_slope: None,
            fund_slope,
            n_fit,
        });
    }
    if below > 0 {
        return Err(SimError::Experiment(format!(
            "{below} of {n_fit} fit points have IM3 below the numeric floor; raise the lowest grid power"
        )));
    }
    let n = n_fit as f64;
    let c1 = x.iter().zip(&y1).map(|(a, b)| b - a).sum::<f64>() / n;
    let c3 = x.iter().zip(&y3).map(|(a, b)| b - 3.0 * a).sum::<f64>() / n;
    Ok(TwoToneResult {
        points,
        iip3_dbm: (c1 - c3) / 2.0,
        im3_slope: Some(ls_slope(&x, &y3)),
        fund_slope,
        n_fit,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct JitterResult {
    pub ix_db: Vec<f64>,
    pub il_db: Vec<f64>,
    pub mean_ix_db: f64,
    pub std_ix_db: f64,
    pub mean_il_db: f64,
    pub std_il_db: f64,
    /// Trials that failed to settle; they are excluded from the statistics.
    pub failures: usize,
}

fn mean_std(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let m = x.iter().sum::<f64>() / n;
    let v = x.iter().map(|a| (a - m).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (m, v.sqrt())
}

/// Monte-Carlo over `trials` seeds (`jitter.seed + i`) of small-signal IL and
/// IX at `f` with noisy modulation.
pub fn jittered_isolation(
    circuit: &CircuitParams,
    m: &ModulationParams,
    jitter: &JitterSpec,
    f: f64,
    trials: usize,
    extract: &ExtractOptions,
) -> Result<JitterResult, SimError> {
    if trials < 10 {
        return Err(SimError::InvalidDrive(format!("need at least 10 trials, got {trials}")));
    }
    let (tx, iso) = ports(m.direction);
    let amp = (8.0 * circuit.z0).sqrt();
    let runs: Vec<Result<(f64, f64), SimError>> = (0..trials as u64)
        .into_par_iter()
        .map(|i| {
            let mut drive = DriveSpec::new(
                vec![Tone {
                    port: 1,
                    freq: f,
                    amp,
                    phase: 0.0,
                }],
                *m,
            );
            drive.jitter = Some(JitterSpec {
                seed: jitter.seed.wrapping_add(i),
                ..*jitter
            });
            let sys = assemble_system(circuit, &drive, None)?;
            let ss = run_steady(&sys, &[sys.snap.snapped(f)], extract)?;
            let inc = amp / 2.0;
            let il = -20.0 * (ss.port_voltage(0, tx).norm() / inc).log10();
            let ix = -20.0 * (ss.port_voltage(0, iso).norm() / inc).log10();
            Ok((ix, il))
        })
        .collect();
    let mut ix = Vec::new();
    let mut il = Vec::new();
    let mut failures = 0;
    for r in runs {
        match r {
            Ok((a, b)) => {
                ix.push(a);
                il.push(b);
            }
            Err(SimError::NotSettled { .. }) => failures += 1,
            Err(e) => return Err(e),
        }
    }
    if ix.len() < 2 {
        return Err(SimError::Experiment(format!("{failures} of {trials} trials failed to settle")));
    }
    let (mean_ix_db, std_ix_db) = mean_std(&ix);
    let (mean_il_db, std_il_db) = mean_std(&il);
    Ok(JitterResult {
        ix_db: ix,
        il_db: il,
        mean_ix_db,
        std_ix_db,
        mean_il_db,
        std_il_db,
        failures,
    })
}
