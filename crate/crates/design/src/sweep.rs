use lptv_core::{retune_c0, CapacitorLaw, CircuitParams, Direction, ModulationParams};
use rayon::prelude::*;

use crate::bandwidth::bandwidth;
use crate::metrics::{check_grid, metrics_at, Response};
use crate::{DesignError, DEFAULT_BETA, DEFAULT_GAMMA};

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Frequency at which the per-cell metrics are read.
    pub f_eval: f64,
    /// fm / f_eval values.
    pub fm_axis: Vec<f64>,
    /// ΔC / C0 values.
    pub dc_axis: Vec<f64>,
    pub beta: f64,
    pub gamma: f64,
    /// Replace C0 by the value that resonates L at f_eval.
    pub retune_c0: bool,
    /// Frequency window for the per-cell bandwidth, relative to f_eval.
    pub bw_span: (f64, f64),
    pub bw_points: usize,
    pub law: CapacitorLaw,
    pub direction: Direction,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

impl SweepConfig {
    /// 100 × 100 cells over fm/f ∈ [0.05, 0.35] and ΔC/C0 ∈ [0.05, 0.70].
    pub fn standard(f_eval: f64) -> Self {
        Self {
            f_eval,
            fm_axis: linspace(0.05, 0.35, 100),
            dc_axis: linspace(0.05, 0.70, 100),
            beta: DEFAULT_BETA,
            gamma: DEFAULT_GAMMA,
            retune_c0: false,
            bw_span: (0.9, 1.1),
            bw_points: 401,
            law: CapacitorLaw::Incremental,
            direction: Direction::Forward,
        }
    }
}

/// Grid cell (fm index, ΔC index) of each design point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DesignPoints {
    /// Best return loss.
    pub p1: (usize, usize),
    /// Lowest insertion loss.
    pub p2: (usize, usize),
    /// Highest isolation.
    pub p3: (usize, usize),
    /// Widest bandwidth.
    pub p4: (usize, usize),
}

/// Per-cell grids indexed `[fm][dc]`; cells that failed hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub fm_axis: Vec<f64>,
    pub dc_axis: Vec<f64>,
    pub circuit: CircuitParams,
    pub il_db: Vec<Vec<f64>>,
    pub rl_db: Vec<Vec<f64>>,
    pub ix_db: Vec<Vec<f64>>,
    pub bw_frac: Vec<Vec<f64>>,
    pub design_points: DesignPoints,
}

impl SweepResult {
    /// Modulation of cell (i, j) with the sweep's law and direction.
    pub fn modulation(&self, cfg: &SweepConfig, cell: (usize, usize)) -> ModulationParams {
        ModulationParams::new(self.fm_axis[cell.0] * cfg.f_eval, self.dc_axis[cell.1] * self.circuit.c0)
            .with_law(cfg.law)
            .with_direction(cfg.direction)
    }
}

struct Cell {
    il: f64,
    rl: f64,
    ix: f64,
    bw: f64,
}

/// First cell in (fm, ΔC) order maximising `key`; NaN cells are skipped.
fn argmax(grid: &[Vec<f64>], key: impl Fn(f64) -> f64) -> (usize, usize) {
    let mut best = (0, 0);
    let mut val = f64::NEG_INFINITY;
    for (i, row) in grid.iter().enumerate() {
        for (j, &x) in row.iter().enumerate() {
            let k = key(x);
            if !k.is_nan() && k > val {
                val = k;
                best = (i, j);
            }
        }
    }
    best
}

/// Evaluates every (fm, ΔC) cell at `f_eval` and locates the design points.
pub fn sweep(circuit: &CircuitParams, cfg: &SweepConfig) -> Result<SweepResult, DesignError> {
    circuit.validate()?;
    check_grid(&cfg.fm_axis).map_err(|_| DesignError::InvalidGrid("fm axis must be positive and ascending".into()))?;
    check_grid(&cfg.dc_axis).map_err(|_| DesignError::InvalidGrid("ΔC axis must be positive and ascending".into()))?;
    if !(cfg.f_eval > 0.0) || cfg.bw_points < 3 || !(cfg.bw_span.0 < 1.0 && cfg.bw_span.1 > 1.0) {
        return Err(DesignError::InvalidGrid("bandwidth window must straddle f_eval with ≥ 3 points".into()));
    }
    let mut c = *circuit;
    if cfg.retune_c0 {
        c.c0 = retune_c0(c.l, cfg.f_eval);
    }
    let bw_grid: Vec<f64> = (0..cfg.bw_points)
        .map(|i| cfg.f_eval * (cfg.bw_span.0 + (cfg.bw_span.1 - cfg.bw_span.0) * i as f64 / (cfg.bw_points - 1) as f64))
        .collect();
    let n_dc = cfg.dc_axis.len();
    let cells: Vec<Cell> = (0..cfg.fm_axis.len() * n_dc)
        .into_par_iter()
        .map(|idx| {
            let m = ModulationParams::new(cfg.fm_axis[idx / n_dc] * cfg.f_eval, cfg.dc_axis[idx % n_dc] * c.c0)
                .with_law(cfg.law)
                .with_direction(cfg.direction);
            let nan = Cell {
                il: f64::NAN,
                rl: f64::NAN,
                ix: f64::NAN,
                bw: f64::NAN,
            };
            if m.validate(&c).is_err() {
                return nan;
            }
            let Ok(row) = metrics_at(&c, &m, cfg.f_eval) else {
                return nan;
            };
            let resp = Response {
                rows: bw_grid.iter().map(|&f| crate::metrics::s_metrics(&c, &m, f)).collect(),
            };
            let bw = bandwidth(&resp, cfg.beta, cfg.gamma).map_or(f64::NAN, |b| b.frac);
            Cell {
                il: row.il_db,
                rl: row.rl_db,
                ix: row.ix_db,
                bw,
            }
        })
        .collect();
    let grid = |f: fn(&Cell) -> f64| -> Vec<Vec<f64>> { cells.chunks(n_dc).map(|r| r.iter().map(f).collect()).collect() };
    let il_db = grid(|c| c.il);
    let rl_db = grid(|c| c.rl);
    let ix_db = grid(|c| c.ix);
    let bw_frac = grid(|c| c.bw);
    let design_points = DesignPoints {
        p1: argmax(&rl_db, |x| -x),
        p2: argmax(&il_db, |x| -x),
        p3: argmax(&ix_db, |x| x),
        p4: argmax(&bw_frac, |x| x),
    };
    Ok(SweepResult {
        fm_axis: cfg.fm_axis.clone(),
        dc_axis: cfg.dc_axis.clone(),
        circuit: c,
        il_db,
        rl_db,
        ix_db,
        bw_frac,
        design_points,
    })
}
