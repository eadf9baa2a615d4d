use num_complex::Complex64 as C64;

use crate::dopri::{Dopri5, Stats, Tolerances};
use crate::extract::Projector;
use crate::system::{System, DIM, PORT_NODE};
use crate::SimError;

/// Uniformly sampled solution of a transient run starting at t = 0.
#[derive(Debug, Clone, Default)]
pub struct Trajectory {
    pub fb: f64,
    pub samples_per_base: usize,
    pub dt: f64,
    pub times: Vec<f64>,
    /// Tank voltages.
    pub v: Vec<[f64; 3]>,
    pub il: Vec<[f64; 3]>,
    /// Tank charges.
    pub q: Vec<[f64; 3]>,
    /// Port voltages and currents in port order.
    pub port_voltages: Vec<[f64; 3]>,
    pub port_currents: Vec<[f64; 3]>,
    /// Energy delivered into the port resistors so far.
    pub dissipated: Vec<f64>,
    pub stored: Vec<f64>,
    pub stats: Stats,
}

/// Integrates `sys` over [0, t_end] from the state `y0` (tank voltages then
/// inductor currents; zero if `None`), sampling `samples_per_base` times per
/// common period.
pub fn integrate(
    sys: &System,
    y0: Option<[f64; 6]>,
    t_end: f64,
    samples_per_base: usize,
    tol: Tolerances,
) -> Result<Trajectory, SimError> {
    if !(t_end > 0.0) || samples_per_base == 0 {
        return Err(SimError::InvalidDrive("need t_end > 0 and at least one sample per period".into()));
    }
    let mut y = [0.0; DIM];
    if let Some(s) = y0 {
        y[..6].copy_from_slice(&s);
    }
    let fb = sys.snap.fb;
    let dt = 1.0 / (samples_per_base as f64 * fb);
    let fmax = sys.f_max().max(sys.circuit.omega0() / (2.0 * std::f64::consts::PI));
    let mut ig = Dopri5::new(
        |t: f64, y: &[f64; DIM], dy: &mut [f64; DIM]| sys.rhs(t, y, dy),
        0.0,
        y,
        0.02 / fmax,
        0.25 / fmax,
        tol,
    );
    ig.unchecked = 1;
    let mut tr = Trajectory {
        fb,
        samples_per_base,
        dt,
        ..Default::default()
    };
    let mut next = 0;
    ig.advance(t_end, Some((0.0, dt)), &mut next, |_, t, y| {
        let v = [y[0], y[1], y[2]];
        let e = sys.node_voltages(t, y);
        tr.times.push(t);
        tr.v.push(v);
        tr.il.push([y[3], y[4], y[5]]);
        tr.q.push(sys.charges(t, &v));
        tr.port_voltages.push(std::array::from_fn(|p| e[PORT_NODE[p]]));
        tr.port_currents.push(sys.port_currents(t, y));
        tr.dissipated.push(y[6]);
        tr.stored.push(sys.stored_energy(t, y));
    })?;
    tr.stats = ig.stats;
    Ok(tr)
}

/// Harmonic amplitudes read from the tail of a trajectory.
#[derive(Debug, Clone)]
pub struct TrajectoryHarmonics {
    pub freqs: Vec<f64>,
    pub port_voltage: Vec<[C64; 3]>,
    pub tank: Vec<[C64; 3]>,
    /// Relative change between the last two windows.
    pub change: f64,
}

/// Projects the last `n_meas` common periods of `traj` onto `freqs` (which
/// must lie on the grid) and checks them against the window before.
pub fn steady_state_harmonics(
    traj: &Trajectory,
    freqs: &[f64],
    n_meas: u64,
    settle_tol: f64,
) -> Result<TrajectoryHarmonics, SimError> {
    let n = traj.samples_per_base;
    let per = n * n_meas as usize;
    let periods = (traj.times.len().saturating_sub(1)) / n;
    if n_meas == 0 || periods < 2 * n_meas as usize {
        return Err(SimError::Experiment(format!(
            "trajectory spans {periods} common periods, need {}",
            2 * n_meas
        )));
    }
    let mut bins = Vec::new();
    for &f in freqs {
        let b = (f / traj.fb).round() as i64;
        if b <= 0 || (f - b as f64 * traj.fb).abs() > 1e-6 * f {
            return Err(SimError::OffGrid { f, fb: traj.fb });
        }
        bins.push(b);
    }
    let proj = Projector::new(n, bins);
    let end = periods * n;
    let window = |start: usize| -> (Vec<[C64; 3]>, Vec<[C64; 3]>) {
        let mut pv = vec![[C64::new(0.0, 0.0); 3]; freqs.len()];
        let mut tv = pv.clone();
        for i in start..start + per {
            for b in 0..freqs.len() {
                let p = proj.phasor(b, i as u64) * (2.0 / per as f64);
                for k in 0..3 {
                    pv[b][k] += p * traj.port_voltages[i][k];
                    tv[b][k] += p * traj.v[i][k];
                }
            }
        }
        (pv, tv)
    };
    let (p1, _) = window(end - 2 * per);
    let (p2, t2) = window(end - per);
    let scale = p2.iter().flatten().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = p1
        .iter()
        .flatten()
        .zip(p2.iter().flatten())
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    let change = if scale == 0.0 { 0.0 } else { diff / scale };
    if change > settle_tol {
        return Err(SimError::NotSettled {
            change,
            periods: periods as u64,
        });
    }
    Ok(TrajectoryHarmonics {
        freqs: freqs.to_vec(),
        port_voltage: p2,
        tank: t2,
        change,
    })
}
