//! Closed-form small-signal response of the modulated delta junction.
//!
//! With α = ±120° the two rotating modes couple only in pairs — each mode at
//! ω talks to the opposite mode at exactly one sideband — so every 2×2 pair
//! closes without truncation and the response is exact within the
//! first-order (sinusoidal) capacitance model.

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use crate::modes::{tank_voltages, ModeVoltages, TankVoltages};
use crate::{CapacitorLaw, CircuitParams, CoreError, Harmonics, ModulationParams};

const J: C64 = C64 { re: 0.0, im: 1.0 };

/// Projection weights of a unit port-1 excitation onto the ± modes.
fn mode_weight(plus: bool) -> C64 {
    let s3 = 3f64.sqrt();
    if plus {
        C64::new(3.0, -s3) / 6.0
    } else {
        C64::new(3.0, s3) / 6.0
    }
}

/// Modal LTI admittance-like polynomial: −3Z0C0x² + 3Z0/L + jx(1 + 3Z0/R).
pub(crate) fn y_poly(c: &CircuitParams, x: f64) -> C64 {
    C64::new(
        3.0 * c.z0 * (1.0 / c.l - c.c0 * x * x),
        x * (1.0 + 3.0 * c.z0 * c.g()),
    )
}

/// Tank admittance 1/R + jxC0 + 1/(jxL).
pub(crate) fn y_tank(c: &CircuitParams, x: f64) -> C64 {
    C64::new(c.g(), x * c.c0 - 1.0 / (x * c.l))
}

/// Coupling into the equation at `w_out` from the opposite mode at `w_src`.
fn kappa(c: &CircuitParams, m: &ModulationParams, w_out: f64, w_src: f64) -> f64 {
    let w2 = match m.law {
        CapacitorLaw::Incremental => w_src,
        CapacitorLaw::Charge => w_out,
    };
    1.5 * c.z0 * m.dc * w_out * w2
}

fn denom_name(s: i32) -> &'static str {
    if s > 0 {
        "D+"
    } else {
        "D-"
    }
}

fn denom(c: &CircuitParams, m: &ModulationParams, w: f64, s: i32) -> C64 {
    let wq = w + s as f64 * m.omega_m();
    y_poly(c, w) * y_poly(c, wq) - kappa(c, m, w, wq) * kappa(c, m, wq, w)
}

fn check(d: C64, s: i32, w: f64) -> Result<C64, CoreError> {
    if !d.re.is_finite() || !d.im.is_finite() || d.norm() < 1e-300 {
        return Err(CoreError::Degenerate {
            which: denom_name(s),
            f: w / (2.0 * PI),
        });
    }
    Ok(d)
}

/// Solves one coupled pair: mode (`plus`) excited at `w`, its partner at
/// w + s·ωm. Returns (own amplitude, partner amplitude).
fn pair(
    c: &CircuitParams,
    m: &ModulationParams,
    w: f64,
    plus: bool,
    s: i32,
) -> Result<(C64, C64), CoreError> {
    let wq = w + s as f64 * m.omega_m();
    let d = check(denom(c, m, w, s), s, w)?;
    let drive = J * w * mode_weight(plus) / d;
    Ok((drive * y_poly(c, wq), drive * kappa(c, m, wq, w)))
}

/// Sideband on which the + mode finds its partner (+1 forward, −1 reverse).
fn plus_side(m: &ModulationParams) -> i32 {
    m.direction.sign() as i32
}

/// (D₊(ω), D₋(ω)), where D± pairs ω with ω ± ωm.
pub fn denominators(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
) -> Result<(C64, C64), CoreError> {
    let w = 2.0 * PI * f;
    Ok((
        check(denom(c, m, w, 1), 1, w)?,
        check(denom(c, m, w, -1), -1, w)?,
    ))
}

/// The nonvanishing harmonic transfer functions of the two rotating modes.
///
/// `h_plus_cross` is H^+_{k₊}(ω) = V₊(ω)/V_s1(ω + k₊ωm) and `h_minus_cross`
/// is H^−_{−k₊}(ω); k₊ = +1 for the forward direction. The other cross pair
/// is identically zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicTransfer {
    pub h0_plus: C64,
    pub h0_minus: C64,
    pub h_plus_cross: C64,
    pub h_minus_cross: C64,
    pub k_plus: i32,
    pub d_plus: C64,
    pub d_minus: C64,
}

impl HarmonicTransfer {
    pub fn h_plus(&self, k: i32) -> C64 {
        match k {
            0 => self.h0_plus,
            k if k == self.k_plus => self.h_plus_cross,
            _ => C64::new(0.0, 0.0),
        }
    }

    pub fn h_minus(&self, k: i32) -> C64 {
        match k {
            0 => self.h0_minus,
            k if k == -self.k_plus => self.h_minus_cross,
            _ => C64::new(0.0, 0.0),
        }
    }
}

pub fn harmonic_transfer(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
) -> Result<HarmonicTransfer, CoreError> {
    let w = 2.0 * PI * f;
    let wm = m.omega_m();
    let sp = plus_side(m);
    let (d_plus, d_minus) = denominators(c, m, f)?;
    let (h0_plus, _) = pair(c, m, w, true, sp)?;
    let (h0_minus, _) = pair(c, m, w, false, -sp)?;
    // A tone at ω + sp·ωm drives the − mode there, whose partner sits at ω.
    let (_, h_plus_cross) = pair(c, m, w + sp as f64 * wm, false, -sp)?;
    let (_, h_minus_cross) = pair(c, m, w - sp as f64 * wm, true, sp)?;
    Ok(HarmonicTransfer {
        h0_plus,
        h0_minus,
        h_plus_cross,
        h_minus_cross,
        k_plus: sp,
        d_plus,
        d_minus,
    })
}

/// Mode amplitudes at ω and ω ± ωm for a unit tone V_s1(ω) = 1.
pub fn mode_voltages(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
) -> Result<ModeVoltages, CoreError> {
    let w = 2.0 * PI * f;
    let sp = plus_side(m);
    let zero = C64::new(0.0, 0.0);
    let mut vplus = Harmonics([zero; 3]);
    let mut vminus = Harmonics([zero; 3]);
    let (p0, m_side) = pair(c, m, w, true, sp)?;
    let (m0, p_side) = pair(c, m, w, false, -sp)?;
    vplus[0] = p0;
    vminus[sp] = m_side;
    vminus[0] = m0;
    vplus[-sp] = p_side;
    Ok(ModeVoltages {
        vcm: Harmonics([zero; 3]),
        vplus,
        vminus,
    })
}

/// Branch currents I₁..I₃ of the three tanks at ω + kωm, including the
/// modulation cross-coupling between adjacent harmonics.
pub fn branch_currents(
    c: &CircuitParams,
    m: &ModulationParams,
    v: &TankVoltages,
    f: f64,
) -> Harmonics<[C64; 3]> {
    let w = 2.0 * PI * f;
    let wm = m.omega_m();
    let wk = |k: i32| w + k as f64 * wm;
    Harmonics::from_fn(|k| {
        let mut out = [C64::new(0.0, 0.0); 3];
        for (n, slot) in out.iter_mut().enumerate() {
            let ph = C64::from_polar(1.0, m.phase(n + 1));
            let mut i = y_tank(c, wk(k)) * v[k][n];
            for s in [-1, 1] {
                let ks = k - s;
                if !(-1..=1).contains(&ks) {
                    continue;
                }
                let rot = if s > 0 { ph } else { ph.conj() };
                let wf = match m.law {
                    CapacitorLaw::Incremental => wk(ks),
                    CapacitorLaw::Charge => wk(k),
                };
                i += J * 0.5 * m.dc * wf * rot * v[ks][n];
            }
            *slot = i;
        }
        out
    })
}

/// One port-1 excitation row: S₁₁, S₂₁, S₃₁ at output harmonic k.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HarmonicSRow {
    pub k: i32,
    pub input_freq: f64,
    pub output_freq: f64,
    pub s11: C64,
    pub s21: C64,
    pub s31: C64,
}

/// Everything the S-parameters are built from, for reuse by callers that
/// need currents or impedances as well.
#[derive(Debug, Clone, Copy)]
pub struct Solution {
    pub f: f64,
    pub modes: ModeVoltages,
    pub tanks: TankVoltages,
    pub currents: Harmonics<[C64; 3]>,
}

pub fn solve(c: &CircuitParams, m: &ModulationParams, f: f64) -> Result<Solution, CoreError> {
    for k in [-1, 1] {
        if f + k as f64 * m.fm == 0.0 {
            return Err(CoreError::Degenerate {
                which: "zero output frequency",
                f,
            });
        }
    }
    let modes = mode_voltages(c, m, f)?;
    let tanks = tank_voltages(&modes);
    let currents = branch_currents(c, m, &tanks, f);
    Ok(Solution {
        f,
        modes,
        tanks,
        currents,
    })
}

impl Solution {
    pub fn s_rows(&self, c: &CircuitParams, fm: f64) -> Harmonics<HarmonicSRow> {
        Harmonics::from_fn(|k| {
            let [i1, i2, i3] = self.currents[k];
            let delta = if k == 0 { 1.0 } else { 0.0 };
            let z2 = 2.0 * c.z0;
            HarmonicSRow {
                k,
                input_freq: self.f,
                output_freq: self.f + k as f64 * fm,
                s11: delta - z2 * (i1 - i3),
                s21: z2 * (i2 - i3),
                s31: z2 * (i1 - i2),
            }
        })
    }
}

pub fn harmonic_s_row(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
) -> Result<Harmonics<HarmonicSRow>, CoreError> {
    Ok(solve(c, m, f)?.s_rows(c, m.fm))
}

/// Port-1 input impedance V_s1(ω)/(I₁ − I₃)(ω_k) − Z0.
pub fn input_impedance(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
    k: i32,
) -> Result<C64, CoreError> {
    let sol = solve(c, m, f)?;
    impedance_from(c, &sol, k)
}

pub(crate) fn impedance_from(c: &CircuitParams, sol: &Solution, k: i32) -> Result<C64, CoreError> {
    let [i1, _, i3] = sol.currents[k];
    let di = i1 - i3;
    if di.norm() * c.z0 < 1e-12 || !di.re.is_finite() {
        return Err(CoreError::OpenCircuit { f: sol.f, k });
    }
    Ok(1.0 / di - c.z0)
}

/// −d∠S₂₁/dω at k = 0 by central difference over ±df.
pub fn group_delay(
    c: &CircuitParams,
    m: &ModulationParams,
    f: f64,
    df: f64,
) -> Result<f64, CoreError> {
    group_delay_of(|x| Ok(harmonic_s_row(c, m, x)?[0].s21), f, df)
}

/// Central-difference group delay of an arbitrary transfer function.
pub fn group_delay_of(
    mut h: impl FnMut(f64) -> Result<C64, CoreError>,
    f: f64,
    df: f64,
) -> Result<f64, CoreError> {
    if !(df > 0.0) {
        return Err(CoreError::invalid(format!("df must be positive, got {df}")));
    }
    let hi = h(f + df)?;
    let lo = h(f - df)?;
    let step = (hi / lo).arg();
    if step.abs() > PI / 2.0 {
        return Err(CoreError::Unwrap { f, step });
    }
    Ok(-step / (2.0 * PI * 2.0 * df))
}
