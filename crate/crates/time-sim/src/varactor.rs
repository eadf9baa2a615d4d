use crate::SimError;

/// Polynomial C–V law of one varactor about its bias point:
/// C(u) = C0q + Σₖ aₖ·uᵏ, with u the incremental device voltage.
#[derive(Debug, Clone, PartialEq)]
pub struct VaractorModel {
    /// a₁..a_K in F/Vᵏ.
    pub a: Vec<f64>,
    /// Quiescent capacitance (F).
    pub c0q: f64,
    /// Forward-conduction voltage (V).
    pub vf: f64,
    /// Breakdown voltage (V).
    pub vb: f64,
    /// Bias (V).
    pub vdc: f64,
    /// Identical devices in series.
    pub stack: u32,
    /// Lower bound on the effective capacitance as a fraction of the quiescent
    /// value; the polynomial is clamped there if it dips below.
    pub floor_frac: f64,
}

impl VaractorModel {
    pub fn new(a: Vec<f64>, c0q: f64, vf: f64, vb: f64, vdc: f64, stack: u32) -> Result<Self, SimError> {
        let v = Self {
            a,
            c0q,
            vf,
            vb,
            vdc,
            stack,
            floor_frac: 0.05,
        };
        v.validate()?;
        Ok(v)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let bad = |m: String| Err(SimError::InvalidVaractor(m));
        if self.a.is_empty() {
            return bad("at least one polynomial coefficient is required".into());
        }
        if !(self.c0q > 0.0) {
            return bad(format!("quiescent capacitance must be positive, got {}", self.c0q));
        }
        if !(self.vf < self.vdc && self.vdc < self.vb) {
            return bad(format!("need Vf < VDC < VB, got {} / {} / {}", self.vf, self.vdc, self.vb));
        }
        if self.stack == 0 {
            return bad("stack must be at least 1".into());
        }
        if !(self.floor_frac > 0.0 && self.floor_frac < 1.0) {
            return bad(format!("capacitance floor must be in (0, 1), got {}", self.floor_frac));
        }
        Ok(())
    }

    fn coeff(&self, k: usize) -> f64 {
        self.a.get(k - 1).copied().unwrap_or(0.0)
    }

    /// Stack-equivalent quiescent capacitance C0q/s.
    pub fn c0_eff(&self) -> f64 {
        self.c0q / self.stack as f64
    }

    /// Stack-equivalent coefficients: per-device voltage v/s and series
    /// combination of s equal capacitors give aₖ/s^{k+1}.
    pub fn a_eff(&self) -> Vec<f64> {
        let s = self.stack as f64;
        self.a
            .iter()
            .enumerate()
            .map(|(i, a)| a / s.powi(i as i32 + 2))
            .collect()
    }

    /// Window of total stack voltage (relative to bias) inside which no device
    /// conducts or breaks down.
    pub fn window(&self) -> (f64, f64) {
        let s = self.stack as f64;
        (s * (self.vf - self.vdc), s * (self.vb - self.vdc))
    }

    /// Modulation depth ΔC produced by a modulation amplitude `vm` across the
    /// stack, to first order.
    pub fn delta_c(&self, vm: f64) -> f64 {
        self.a_eff()[0] * vm
    }
}

/// Effective stack capacitance C(u) evaluated by Horner's rule, clamped at the floor.
#[derive(Debug, Clone)]
pub(crate) struct EffectivePoly {
    c0: f64,
    a: Vec<f64>,
    floor: f64,
}

impl EffectivePoly {
    pub(crate) fn new(v: &VaractorModel) -> Self {
        Self {
            c0: v.c0_eff(),
            a: v.a_eff(),
            floor: v.floor_frac * v.c0_eff(),
        }
    }

    pub(crate) fn c(&self, u: f64) -> f64 {
        let mut acc = 0.0;
        for a in self.a.iter().rev() {
            acc = (acc + a) * u;
        }
        (self.c0 + acc).max(self.floor)
    }

    /// ∫_{u0}^{u1} C(u) du by 8-point Gauss–Legendre (exact for the unclamped
    /// polynomial up to degree 15).
    pub(crate) fn charge(&self, u0: f64, u1: f64) -> f64 {
        const X: [f64; 4] = [0.183_434_642_495_649_8, 0.525_532_409_916_329, 0.796_666_477_413_626_7, 0.960_289_856_497_536_3];
        const W: [f64; 4] = [0.362_683_783_378_362, 0.313_706_645_877_887_3, 0.222_381_034_453_374_5, 0.101_228_536_290_376_3];
        let (m, r) = ((u0 + u1) / 2.0, (u1 - u0) / 2.0);
        let mut acc = 0.0;
        for (x, w) in X.iter().zip(W) {
            acc += w * (self.c(m + r * x) + self.c(m - r * x));
        }
        acc * r
    }
}

/// Capacitance-shift coefficients (b₀, b₁, d₁) of a device driven by a
/// modulation amplitude `vm` and an RF amplitude `vrf`, truncated after the
/// cubic term.
pub fn effective_capacitance_shift(v: &VaractorModel, vm: f64, vrf: f64) -> (f64, f64, f64) {
    let (a1, a2, a3) = (v.coeff(1), v.coeff(2), v.coeff(3));
    let b0 = v.c0q + 0.5 * a2 * (vm * vm + vrf * vrf);
    let b1 = a1 * vm + 0.75 * a3 * vm.powi(3);
    let d1 = a1 * vrf + 0.75 * a3 * vrf.powi(3);
    (b0, b1, d1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> VaractorModel {
        VaractorModel::new(vec![1e-12, 0.1e-12, -0.01e-12], 8e-12, -0.6, 15.0, 5.0, 1).unwrap()
    }

    #[test]
    fn quiescent_shift() {
        let v = cubic();
        assert_eq!(effective_capacitance_shift(&v, 0.0, 0.0), (8e-12, 0.0, 0.0));
        let (b0, _, _) = effective_capacitance_shift(&v, 2.0, 0.0);
        assert!(b0 > v.c0q);
    }

    #[test]
    fn linear_law_reduces_to_first_order_depth() {
        let v = VaractorModel::new(vec![0.7e-12], 8e-12, -0.6, 15.0, 5.0, 1).unwrap();
        let (b0, b1, d1) = effective_capacitance_shift(&v, 3.0, 0.5);
        assert_eq!(b0, 8e-12);
        assert_eq!(b1, 0.7e-12 * 3.0);
        assert_eq!(d1, 0.7e-12 * 0.5);
    }

    #[test]
    fn stacking_rule() {
        let mut v = cubic();
        v.stack = 2;
        let p = EffectivePoly::new(&v);
        // Two devices in series, each seeing u/2.
        let u: f64 = 1.3;
        let dev = 8e-12 + 1e-12 * (u / 2.0) + 0.1e-12 * (u / 2.0).powi(2) - 0.01e-12 * (u / 2.0).powi(3);
        assert!((p.c(u) - dev / 2.0).abs() < 1e-24);
        assert_eq!(v.window(), (2.0 * (-5.6), 20.0));
    }

    #[test]
    fn charge_of_constant_capacitance() {
        let v = VaractorModel::new(vec![0.0], 5e-12, -0.6, 15.0, 5.0, 1).unwrap();
        let p = EffectivePoly::new(&v);
        assert!((p.charge(0.0, 2.5) - 5e-12 * 2.5).abs() < 1e-25);
        assert!((p.charge(-1.0, 3.0) - 5e-12 * 4.0).abs() < 1e-25);
    }
}
