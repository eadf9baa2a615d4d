use std::f64::consts::PI;

use crate::CoreError;

/// Static description of one junction: three identical parallel RLC tanks
/// connected in a delta between three ports of impedance `z0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircuitParams {
    /// Tank inductance (H).
    pub l: f64,
    /// Static tank capacitance (F).
    pub c0: f64,
    /// Unloaded quality factor; `f64::INFINITY` means a lossless tank.
    pub q: f64,
    /// Port reference impedance (Ω).
    pub z0: f64,
}

impl CircuitParams {
    pub fn new(l: f64, c0: f64, q: f64, z0: f64) -> Result<Self, CoreError> {
        let c = Self { l, c0, q, z0 };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<(), CoreError> {
        let ok = |v: f64| v.is_finite() && v > 0.0;
        if !ok(self.l) {
            return Err(CoreError::invalid(format!("L must be positive, got {}", self.l)));
        }
        if !ok(self.c0) {
            return Err(CoreError::invalid(format!("C0 must be positive, got {}", self.c0)));
        }
        if !ok(self.z0) {
            return Err(CoreError::invalid(format!("Z0 must be positive, got {}", self.z0)));
        }
        if self.q.is_nan() || self.q <= 0.0 {
            return Err(CoreError::invalid(format!("Q must be positive, got {}", self.q)));
        }
        Ok(())
    }

    /// Angular resonance 1/√(L·C0).
    pub fn omega0(&self) -> f64 {
        1.0 / (self.l * self.c0).sqrt()
    }

    /// Parallel loss resistance R = Q·ω0·L, fixed at ω0 (dispersion-less).
    pub fn r(&self) -> f64 {
        self.q * self.omega0() * self.l
    }

    /// 1/R, exactly zero for an infinite Q.
    pub fn g(&self) -> f64 {
        if self.q.is_infinite() {
            0.0
        } else {
            1.0 / self.r()
        }
    }
}

/// Sign of the 120° phase progression between tanks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Direction {
    #[default]
    Forward,
    Reverse,
}

impl Direction {
    pub fn sign(self) -> f64 {
        match self {
            Direction::Forward => 1.0,
            Direction::Reverse => -1.0,
        }
    }

    pub fn from_sign(s: i32) -> Option<Self> {
        match s {
            1 => Some(Direction::Forward),
            -1 => Some(Direction::Reverse),
            _ => None,
        }
    }

    /// Phase step α in radians (±2π/3).
    pub fn alpha(self) -> f64 {
        self.sign() * 2.0 * PI / 3.0
    }
}

/// How a time-varying capacitance turns voltage into current.
///
/// `Incremental` is i = C(t)·dv/dt, the form the classical LPTV derivation
/// uses. `Charge` is i = d(C·v)/dt, the physical law for a varactor. Both
/// give the same k = 0 response; the k = ±1 sidebands differ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CapacitorLaw {
    #[default]
    Incremental,
    Charge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationParams {
    /// Modulation frequency (Hz).
    pub fm: f64,
    /// Modulation capacitance amplitude ΔC (F).
    pub dc: f64,
    pub direction: Direction,
    /// Modulation amplitude (V); only meaningful with a varactor model.
    pub vm: Option<f64>,
    pub law: CapacitorLaw,
}

impl ModulationParams {
    pub fn new(fm: f64, dc: f64) -> Self {
        Self {
            fm,
            dc,
            direction: Direction::Forward,
            vm: None,
            law: CapacitorLaw::Incremental,
        }
    }

    pub fn with_direction(mut self, d: Direction) -> Self {
        self.direction = d;
        self
    }

    pub fn with_law(mut self, law: CapacitorLaw) -> Self {
        self.law = law;
        self
    }

    pub fn validate(&self, circuit: &CircuitParams) -> Result<(), CoreError> {
        if !(self.fm.is_finite() && self.fm > 0.0) {
            return Err(CoreError::invalid(format!("fm must be positive, got {}", self.fm)));
        }
        if !(self.dc.is_finite() && self.dc >= 0.0 && self.dc < circuit.c0) {
            return Err(CoreError::invalid(format!(
                "dC must lie in [0, C0), got {} with C0 = {}",
                self.dc, circuit.c0
            )));
        }
        Ok(())
    }

    pub fn omega_m(&self) -> f64 {
        2.0 * PI * self.fm
    }

    /// Modulation phase φₙ = (n−1)·α of tank `n` (1-based).
    pub fn phase(&self, n: usize) -> f64 {
        (n as f64 - 1.0) * self.direction.alpha()
    }
}

/// f0 = 1/(2π√(L·C0)).
pub fn resonance_frequency(circuit: &CircuitParams) -> f64 {
    1.0 / (2.0 * PI * (circuit.l * circuit.c0).sqrt())
}

/// Static capacitance that resonates `l` at `f_target`.
pub fn retune_c0(l: f64, f_target: f64) -> f64 {
    let w = 2.0 * PI * f_target;
    1.0 / (l * w * w)
}
