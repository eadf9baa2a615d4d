use lptv_core::{
    group_delay, harmonic_s_row, CircuitParams, Complex64 as C64, CoreError, Direction,
    ModulationParams, DEFAULT_GROUP_DELAY_STEP,
};
use rayon::prelude::*;

use crate::DesignError;

/// Small-signal figures of merit at one input frequency.
///
/// The transmitted port is 2 for the forward direction and 3 for the
/// reverse one; IL and IX are taken at the transmitted and isolated port
/// respectively, so both stay meaningful when the rotation is reversed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsRow {
    pub f: f64,
    /// −20·log|S_tx,1| at k = 0.
    pub il_db: f64,
    /// 20·log|S11| at k = 0 (negative when matched).
    pub rl_db: f64,
    /// −20·log|S_iso,1| at k = 0.
    pub ix_db: f64,
    /// Port-1 input impedance; `None` where port 1 draws no current.
    pub zin: Option<C64>,
    pub tau_g: Option<f64>,
    /// Transmitted-port k = −1 and k = +1 products relative to k = 0 (dBc).
    pub im_dbc: [f64; 2],
    pub s11: C64,
    pub s21: C64,
    pub s31: C64,
}

fn db(x: C64) -> f64 {
    20.0 * x.norm().log10()
}

pub fn metrics_at(c: &CircuitParams, m: &ModulationParams, f: f64) -> Result<MetricsRow, CoreError> {
    let mut row = s_metrics(c, m, f)?;
    row.tau_g = match m.direction {
        Direction::Forward => group_delay(c, m, f, DEFAULT_GROUP_DELAY_STEP).ok(),
        Direction::Reverse => lptv_core::group_delay_of(
            |x| Ok(harmonic_s_row(c, m, x)?[0].s31),
            f,
            DEFAULT_GROUP_DELAY_STEP,
        )
        .ok(),
    };
    row.zin = lptv_core::input_impedance(c, m, f, 0).ok();
    Ok(row)
}

/// S-parameter metrics only; `zin` and `tau_g` are left empty.
pub(crate) fn s_metrics(c: &CircuitParams, m: &ModulationParams, f: f64) -> Result<MetricsRow, CoreError> {
    let rows = harmonic_s_row(c, m, f)?;
    let r = rows[0];
    let (tx, iso) = match m.direction {
        Direction::Forward => (r.s21, r.s31),
        Direction::Reverse => (r.s31, r.s21),
    };
    let side = |k: i32| {
        let s = rows[k];
        let t = match m.direction {
            Direction::Forward => s.s21,
            Direction::Reverse => s.s31,
        };
        db(t) - db(tx)
    };
    Ok(MetricsRow {
        f,
        il_db: -db(tx),
        rl_db: db(r.s11),
        ix_db: -db(iso),
        zin: None,
        tau_g: None,
        im_dbc: [side(-1), side(1)],
        s11: r.s11,
        s21: r.s21,
        s31: r.s31,
    })
}

/// Metrics over a frequency grid. Degenerate points keep their error and do
/// not abort the sweep.
#[derive(Debug, Clone)]
pub struct Response {
    pub rows: Vec<Result<MetricsRow, CoreError>>,
}

impl Response {
    pub fn freqs(&self) -> Vec<f64> {
        self.rows
            .iter()
            .map(|r| match r {
                Ok(m) => m.f,
                Err(e) => e.frequency().unwrap_or(f64::NAN),
            })
            .collect()
    }

    /// Index of the largest isolation (first one on ties).
    pub fn center(&self) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for (i, r) in self.rows.iter().enumerate() {
            if let Ok(m) = r {
                if m.ix_db.is_nan() {
                    continue;
                }
                if best.is_none_or(|(_, b)| m.ix_db > b) {
                    best = Some((i, m.ix_db));
                }
            }
        }
        best.map(|b| b.0)
    }

    pub fn fc(&self) -> Option<f64> {
        self.center().map(|i| self.rows[i].as_ref().unwrap().f)
    }
}

pub(crate) fn check_grid(grid: &[f64]) -> Result<(), DesignError> {
    if grid.is_empty() {
        return Err(DesignError::InvalidGrid("empty".into()));
    }
    if grid.iter().any(|f| !(*f > 0.0 && f.is_finite())) {
        return Err(DesignError::InvalidGrid("frequencies must be positive and finite".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(DesignError::InvalidGrid("frequencies must be strictly ascending".into()));
    }
    Ok(())
}

pub fn frequency_response(
    c: &CircuitParams,
    m: &ModulationParams,
    grid: &[f64],
) -> Result<Response, DesignError> {
    c.validate()?;
    m.validate(c)?;
    check_grid(grid)?;
    let rows = grid.par_iter().map(|&f| metrics_at(c, m, f)).collect();
    Ok(Response { rows })
}

/// Golden-section search for the isolation maximum inside [lo, hi].
pub fn refine_center(c: &CircuitParams, m: &ModulationParams, lo: f64, hi: f64) -> Result<f64, DesignError> {
    if !(lo > 0.0 && hi > lo) {
        return Err(DesignError::InvalidGrid(format!("bad bracket [{lo}, {hi}]")));
    }
    let ix = |f: f64| -> Result<f64, DesignError> { Ok(metrics_at(c, m, f)?.ix_db) };
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (ix(x1)?, ix(x2)?);
    while b - a > 1e-12 * b {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = ix(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = ix(x2)?;
        }
    }
    Ok(0.5 * (a + b))
}
