//! Dormand–Prince 5(4) with FSAL and the quartic dense output, so that
//! uniformly spaced samples can be taken without constraining the step size.

use crate::SimError;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];

// 5th-order minus embedded 4th-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

// Dense output: y(t + θh) = y + h·Σᵢ kᵢ·Σⱼ P[i][j]·θ^{j+1}.
const P: [[f64; 4]; 7] = [
    [1.0, -8048581381.0 / 2820520608.0, 8663915743.0 / 2820520608.0, -12715105075.0 / 11282082432.0],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200.0 / 32700410799.0, -68118460800.0 / 10900136933.0, 87487479700.0 / 32700410799.0],
    [0.0, -1754552775.0 / 470086768.0, 14199869525.0 / 1410260304.0, -10690763975.0 / 1880347072.0],
    [0.0, 127303824393.0 / 49829197408.0, -318862633887.0 / 49829197408.0, 701980252875.0 / 199316789632.0],
    [0.0, -282668133.0 / 205662961.0, 2019193451.0 / 616988883.0, -1453857185.0 / 822651844.0],
    [0.0, 40617522.0 / 29380423.0, -110615467.0 / 29380423.0, 69997945.0 / 29380423.0],
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub rtol: f64,
    pub atol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            rtol: 1e-9,
            atol: 1e-12,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Stats {
    pub accepted: u64,
    pub rejected: u64,
    pub evaluations: u64,
}

/// Adaptive integrator state that can be advanced repeatedly.
pub struct Dopri5<const N: usize, F> {
    f: F,
    pub t: f64,
    pub y: [f64; N],
    h: f64,
    k1: [f64; N],
    tol: Tolerances,
    h_max: f64,
    /// Components excluded from error control (e.g. running integrals).
    pub unchecked: usize,
    pub stats: Stats,
}

impl<const N: usize, F> Dopri5<N, F>
where
    F: FnMut(f64, &[f64; N], &mut [f64; N]),
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], h0: f64, h_max: f64, tol: Tolerances) -> Self {
        let mut k1 = [0.0; N];
        f(t0, &y0, &mut k1);
        Self {
            f,
            t: t0,
            y: y0,
            h: h0.min(h_max),
            k1,
            tol,
            h_max,
            unchecked: 0,
            stats: Stats {
                evaluations: 1,
                ..Stats::default()
            },
        }
    }

    /// Integrates to `t_end`. For every sample time `t0 + i·dt` passed on the
    /// way (i from `*next`), `on_sample(i, t, y)` receives the dense-output state.
    pub fn advance(
        &mut self,
        t_end: f64,
        sampling: Option<(f64, f64)>,
        next: &mut u64,
        mut on_sample: impl FnMut(u64, f64, &[f64; N]),
    ) -> Result<(), SimError> {
        let mut k = [[0.0; N]; 7];
        let mut ytmp = [0.0; N];
        let mut ynew = [0.0; N];
        while self.t < t_end {
            let last = self.t + self.h >= t_end;
            let h = if last { t_end - self.t } else { self.h };
            if h <= self.t.abs() * 1e-15 || h < 1e-300 {
                return Err(SimError::StepUnderflow { t: self.t, h });
            }
            k[0] = self.k1;
            for s in 1..7 {
                for i in 0..N {
                    let mut acc = 0.0;
                    for (r, a) in A[s][..s].iter().enumerate() {
                        acc += a * k[r][i];
                    }
                    ytmp[i] = self.y[i] + h * acc;
                }
                if s == 6 {
                    ynew = ytmp;
                }
                (self.f)(self.t + C[s] * h, &ytmp, &mut k[s]);
            }
            self.stats.evaluations += 6;

            let mut err = 0.0;
            let checked = N - self.unchecked;
            for i in 0..checked {
                let mut e = 0.0;
                for (s, ks) in k.iter().enumerate() {
                    e += E[s] * ks[i];
                }
                let sc = self.tol.atol + self.tol.rtol * self.y[i].abs().max(ynew[i].abs());
                let r = h * e / sc;
                err += r * r;
            }
            let err = (err / checked as f64).sqrt();

            if err <= 1.0 {
                if let Some((t0, dt)) = sampling {
                    let t_next = self.t + h;
                    loop {
                        let ts = t0 + *next as f64 * dt;
                        if ts > t_next + 1e-12 * dt {
                            break;
                        }
                        let th = ((ts - self.t) / h).clamp(0.0, 1.0);
                        let mut ys = self.y;
                        let pw = [th, th * th, th * th * th, th * th * th * th];
                        for i in 0..N {
                            let mut acc = 0.0;
                            for (s, ks) in k.iter().enumerate() {
                                let b = P[s][0] * pw[0] + P[s][1] * pw[1] + P[s][2] * pw[2] + P[s][3] * pw[3];
                                acc += b * ks[i];
                            }
                            ys[i] += h * acc;
                        }
                        on_sample(*next, ts, &ys);
                        *next += 1;
                    }
                }
                self.t = if last { t_end } else { self.t + h };
                self.y = ynew;
                self.k1 = k[6];
                self.stats.accepted += 1;
                let fac = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                if !last {
                    self.h = (h * fac).min(self.h_max);
                }
            } else {
                self.stats.rejected += 1;
                self.h = h * (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            }
        }
        Ok(())
    }
}
