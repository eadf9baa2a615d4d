//! Periodic-steady-state harmonic extraction.
//!
//! The system is integrated from rest on the commensurate grid; uniform
//! samples taken from the dense output are projected onto e^{−j2πft} over
//! windows of whole base periods. Settling is declared when two consecutive
//! windows agree to a relative tolerance.

use num_complex::Complex64 as C64;

use crate::dopri::{Dopri5, Stats, Tolerances};
use crate::snap::Snap;
use crate::system::{System, DIM, PORT_NODE};
use crate::SimError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExtractOptions {
    /// Base periods discarded before measurement.
    pub n_settle: u64,
    /// Base periods per measurement window.
    pub n_meas: u64,
    pub tol: Tolerances,
    /// Allowed relative change between the last two windows.
    pub settle_tol: f64,
    /// The settling time may double until it reaches this multiple.
    pub max_settle_factor: u64,
    /// Highest multiple of (tone + fm) the sampling must resolve without aliasing.
    pub content_order: u32,
}

impl Default for ExtractOptions {
    fn default() -> Self {
        Self {
            n_settle: 200,
            n_meas: 50,
            tol: Tolerances::default(),
            settle_tol: 1e-4,
            max_settle_factor: 4,
            content_order: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct ClipReport {
    /// Samples in the final window with a varactor outside its safe window.
    pub events: u64,
    /// Largest excursion beyond the window (V); negative is the margin left.
    pub max_excursion: f64,
}

/// Complex amplitudes x(t) = Re{X·e^{j2πft}} of the node and tank voltages.
#[derive(Debug, Clone)]
pub struct SteadyState {
    pub freqs: Vec<f64>,
    /// Node voltages per requested frequency, by node index.
    pub node: Vec<[C64; 3]>,
    pub tank: Vec<[C64; 3]>,
    pub settle_change: f64,
    /// Base periods integrated in total.
    pub periods: u64,
    pub snap: Snap,
    pub clip: Option<ClipReport>,
    pub stats: Stats,
}

impl SteadyState {
    /// Voltage at `port` (1-based) for the i-th requested frequency.
    pub fn port_voltage(&self, i: usize, port: usize) -> C64 {
        self.node[i][PORT_NODE[port - 1]]
    }

    /// Largest |v₁ + v₂ + v₃| relative to the largest tank voltage.
    pub fn common_mode_ratio(&self) -> f64 {
        let mut cm: f64 = 0.0;
        let mut mx: f64 = 0.0;
        for v in &self.tank {
            cm = cm.max((v[0] + v[1] + v[2]).norm());
            mx = mx.max(v.iter().map(|z| z.norm()).fold(0.0, f64::max));
        }
        if mx == 0.0 {
            0.0
        } else {
            cm / mx
        }
    }
}

pub(crate) struct Projector {
    n: usize,
    table: Vec<C64>,
    bins: Vec<i64>,
}

impl Projector {
    pub(crate) fn new(n: usize, bins: Vec<i64>) -> Self {
        let table = (0..n)
            .map(|q| C64::from_polar(1.0, -2.0 * std::f64::consts::PI * q as f64 / n as f64))
            .collect();
        Self { n, table, bins }
    }

    #[inline]
    pub(crate) fn phasor(&self, bin: usize, sample: u64) -> C64 {
        let q = (self.bins[bin] * (sample % self.n as u64) as i64).rem_euclid(self.n as i64);
        self.table[q as usize]
    }
}

fn max_rel_change(a: &[[C64; 3]], b: &[[C64; 3]]) -> f64 {
    let scale = b
        .iter()
        .flat_map(|r| r.iter())
        .map(|z| z.norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        return 0.0;
    }
    a.iter()
        .zip(b)
        .flat_map(|(x, y)| x.iter().zip(y.iter()))
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
        / scale
}

/// Samples per base period for a given system and options.
pub fn samples_per_base(sys: &System, freqs: &[f64], order: u32) -> usize {
    let fb = sys.snap.fb;
    let fmax_req = freqs.iter().fold(0.0f64, |a, f| a.max(f.abs()));
    let content = (order.max(1) as f64 * sys.f_max()).max(fmax_req);
    ((4.0 * content / fb).ceil() as usize).max(8)
}

/// Integrates `sys` from rest and returns steady-state amplitudes at `freqs`.
pub fn run_steady(sys: &System, freqs: &[f64], opts: &ExtractOptions) -> Result<SteadyState, SimError> {
    if opts.n_meas == 0 {
        return Err(SimError::InvalidDrive("n_meas must be positive".into()));
    }
    let snap = sys.snap;
    let mut bins = Vec::with_capacity(freqs.len());
    for &f in freqs {
        let b = snap.index(f);
        if b <= 0 || ((f - b as f64 * snap.fb).abs() > 1e-6 * f.abs()) {
            return Err(SimError::OffGrid { f, fb: snap.fb });
        }
        bins.push(b);
    }
    let n = samples_per_base(sys, freqs, opts.content_order);
    let proj = Projector::new(n, bins.clone());
    let dt = 1.0 / (n as f64 * snap.fb);
    let per_window = n as u64 * opts.n_meas;
    let settle = opts.n_settle.max(opts.n_meas).div_ceil(opts.n_meas) * opts.n_meas;

    let fmax = sys.f_max().max(snap.fb);
    let mut ig = Dopri5::new(
        |t: f64, y: &[f64; DIM], dy: &mut [f64; DIM]| sys.rhs(t, y, dy),
        0.0,
        [0.0; DIM],
        0.02 / fmax,
        0.25 / fmax,
        opts.tol,
    );
    ig.unchecked = 1;

    let nf = freqs.len();
    let zero = [C64::new(0.0, 0.0); 3];
    let mut acc_node = vec![zero; nf];
    let mut acc_tank = vec![zero; nf];
    let mut windows: Vec<(Vec<[C64; 3]>, Vec<[C64; 3]>)> = Vec::new();
    let mut clip = ClipReport {
        events: 0,
        max_excursion: f64::NEG_INFINITY,
    };
    let mut win_clip = clip;
    let mut next: u64 = 0;
    let norm = 2.0 / per_window as f64;

    let mut factor = 1;
    loop {
        let total = settle * factor + opts.n_meas;
        let t_end = total as f64 / snap.fb;
        ig.advance(t_end, Some((0.0, dt)), &mut next, |i, t, y| {
            // Samples exactly at a window edge belong to the next window.
            if i > 0 && i % per_window == 0 {
                windows.push((
                    acc_node.iter().map(|r| r.map(|z| z * norm)).collect(),
                    acc_tank.iter().map(|r| r.map(|z| z * norm)).collect(),
                ));
                acc_node.iter_mut().for_each(|r| *r = zero);
                acc_tank.iter_mut().for_each(|r| *r = zero);
                clip = win_clip;
                win_clip = ClipReport {
                    events: 0,
                    max_excursion: f64::NEG_INFINITY,
                };
            }
            let e = sys.node_voltages(t, y);
            for (b, (an, at)) in acc_node.iter_mut().zip(acc_tank.iter_mut()).enumerate() {
                let p = proj.phasor(b, i);
                for k in 0..3 {
                    an[k] += p * e[k];
                    at[k] += p * y[k];
                }
            }
            if let Some(x) = sys.clip_excursion(t, &[y[0], y[1], y[2]]) {
                if x > 0.0 {
                    win_clip.events += 1;
                }
                win_clip.max_excursion = win_clip.max_excursion.max(x);
            }
        })?;
        // The sample at t_end (index total·n) has already closed the last window.
        let w = windows.len();
        if w < 2 {
            return Err(SimError::InvalidDrive("run too short for two measurement windows".into()));
        }
        let change = max_rel_change(&windows[w - 2].0, &windows[w - 1].0);
        if change < opts.settle_tol {
            let (node, tank) = windows.pop().unwrap();
            return Ok(SteadyState {
                freqs: bins.iter().map(|&b| b as f64 * snap.fb).collect(),
                node,
                tank,
                settle_change: change,
                periods: total,
                snap,
                clip: sys.is_nonlinear().then_some(clip),
                stats: ig.stats,
            });
        }
        if factor >= opts.max_settle_factor {
            return Err(SimError::NotSettled {
                change,
                periods: total,
            });
        }
        factor *= 2;
    }
}
