//! Modulation feed network: source Rsrc, shunt Cm, series Lm, varactor Ck.
//!
//! The network transfer is bilinear in Cm, Vm/Vsrc = Zk / (A + Cm·B) with
//! A = Rsrc + Zs, B = jωRsrc·Zs and Zs = jωLm + Zk, so for fixed Lm the
//! gain-maximising Cm is the one that minimises |A + Cm·B|.

use std::f64::consts::PI;

use lptv_core::Complex64 as C64;

use crate::DesignError;

/// Varactor quality factor at fm unless given; equal to the tank Q.
pub const DEFAULT_QK: f64 = 70.0;

const SCAN_POINTS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModNetwork {
    pub lm: f64,
    pub cm: f64,
    pub gm: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Synthesis {
    Network(ModNetwork),
    /// Zero source impedance: the source drives the varactor directly, Gm = 1.
    Direct,
}

struct Terms {
    zk: C64,
    a: C64,
    b: C64,
}

fn terms(lm: f64, ck: f64, rsrc: f64, fm: f64, qk: f64) -> Terms {
    let w = 2.0 * PI * fm;
    let zk = C64::new(1.0 / (w * ck * qk), -1.0 / (w * ck));
    let zs = C64::new(0.0, w * lm) + zk;
    Terms {
        zk,
        a: zs + rsrc,
        b: C64::new(0.0, w * rsrc) * zs,
    }
}

fn check_positive(vals: &[(&str, f64)]) -> Result<(), DesignError> {
    for (name, v) in vals {
        if !(*v > 0.0 && v.is_finite()) {
            return Err(DesignError::InvalidNetwork(format!("{name} must be positive and finite, got {v}")));
        }
    }
    Ok(())
}

fn check_common(ck: f64, rsrc: f64, fm: f64, qk: f64) -> Result<(), DesignError> {
    check_positive(&[("Ck", ck), ("fm", fm)])?;
    if !(rsrc >= 0.0 && rsrc.is_finite()) {
        return Err(DesignError::InvalidNetwork(format!("Rsrc must be ≥ 0, got {rsrc}")));
    }
    if !(qk > 0.0) {
        return Err(DesignError::InvalidNetwork(format!("Qk must be positive, got {qk}")));
    }
    Ok(())
}

/// |Vm / Vsrc| with the default varactor Q.
pub fn mod_network_gain(lm: f64, cm: f64, ck: f64, rsrc: f64, fm: f64) -> Result<f64, DesignError> {
    mod_network_gain_q(lm, cm, ck, rsrc, fm, DEFAULT_QK)
}

/// |Vm / Vsrc|; `qk = ∞` models a lossless varactor.
pub fn mod_network_gain_q(lm: f64, cm: f64, ck: f64, rsrc: f64, fm: f64, qk: f64) -> Result<f64, DesignError> {
    check_positive(&[("Lm", lm), ("Cm", cm)])?;
    check_common(ck, rsrc, fm, qk)?;
    let t = terms(lm, ck, rsrc, fm, qk);
    let den = t.a + t.b * cm;
    if den.norm() <= 1e-12 * t.zk.norm() {
        return Err(DesignError::SingularGain { lm });
    }
    Ok((t.zk / den).norm())
}

/// Relative violation of the maximum-gain condition ∂|Gm|/∂Cm = 0.
pub fn max_gain_residual(lm: f64, cm: f64, ck: f64, rsrc: f64, fm: f64, qk: f64) -> f64 {
    let t = terms(lm, ck, rsrc, fm, qk);
    ((t.a + t.b * cm) * t.b.conj()).re.abs() / (t.a.norm() * t.b.norm())
}

/// Gain-maximising Cm for this Lm and the gain it gives; `None` if that Cm is
/// not positive.
fn best_at(lm: f64, ck: f64, rsrc: f64, fm: f64, qk: f64) -> Option<(f64, f64)> {
    let t = terms(lm, ck, rsrc, fm, qk);
    let cm = -(t.a * t.b.conj()).re / t.b.norm_sqr();
    if !(cm > 0.0) {
        return None;
    }
    let g = (t.zk / (t.a + t.b * cm)).norm();
    g.is_finite().then_some((cm, g))
}

pub fn synthesize_mod_network(ck: f64, rsrc: f64, fm: f64, l: f64) -> Result<Synthesis, DesignError> {
    synthesize_mod_network_q(ck, rsrc, fm, l, DEFAULT_QK)
}

/// Maximum-gain network with Lm in (20L, 10⁴L]: a log-spaced scan of Lm with
/// the optimal Cm at each point, refined by bisection on d|Gm|/dLm.
pub fn synthesize_mod_network_q(ck: f64, rsrc: f64, fm: f64, l: f64, qk: f64) -> Result<Synthesis, DesignError> {
    check_common(ck, rsrc, fm, qk)?;
    check_positive(&[("L", l)])?;
    if rsrc == 0.0 {
        return Ok(Synthesis::Direct);
    }
    let (lo, hi) = (20.0 * l, 1e4 * l);
    let lms: Vec<f64> = (1..=SCAN_POINTS)
        .map(|i| lo * (hi / lo).powf(i as f64 / SCAN_POINTS as f64))
        .collect();
    let gains: Vec<Option<(f64, f64)>> = lms.iter().map(|&lm| best_at(lm, ck, rsrc, fm, qk)).collect();
    let Some(ib) = (0..lms.len())
        .filter(|&i| gains[i].is_some())
        .max_by(|&a, &b| gains[a].unwrap().1.total_cmp(&gains[b].unwrap().1))
    else {
        return Err(DesignError::Infeasible(format!(
            "optimal Cm is non-positive for every Lm (Ck = {ck} F, Rsrc = {rsrc} Ω, fm = {fm} Hz)"
        )));
    };
    let g = |lm: f64| best_at(lm, ck, rsrc, fm, qk).map_or(f64::NEG_INFINITY, |x| x.1);
    let slope = |lm: f64| {
        let h = 1e-7 * lm;
        g(lm + h) - g(lm - h)
    };
    let mut lm = lms[ib];
    let interior = ib > 0 && ib + 1 < lms.len() && gains[ib - 1].is_some() && gains[ib + 1].is_some();
    if interior {
        let (mut a, mut b) = (lms[ib - 1], lms[ib + 1]);
        if slope(a) > 0.0 && slope(b) < 0.0 {
            while b - a > 1e-13 * b {
                let mid = 0.5 * (a + b);
                if slope(mid) > 0.0 {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            let mid = 0.5 * (a + b);
            if g(mid) >= gains[ib].unwrap().1 {
                lm = mid;
            }
        }
    }
    let (cm, gm) = best_at(lm, ck, rsrc, fm, qk).expect("feasible point stays feasible");
    Ok(Synthesis::Network(ModNetwork { lm, cm, gm }))
}
