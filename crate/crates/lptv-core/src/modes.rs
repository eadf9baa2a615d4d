//! Symmetric-component decomposition of the three tank quantities into a
//! common mode and two counter-rotating modes.

use num_complex::Complex64 as C64;

use crate::Harmonics;

/// e^{j2π/3}.
pub fn a() -> C64 {
    C64::from_polar(1.0, 2.0 * std::f64::consts::PI / 3.0)
}

/// (v1, v2, v3) → (v_cm, v₊, v₋).
pub fn to_modes(v: [C64; 3]) -> (C64, C64, C64) {
    let a = a();
    let a2 = a * a;
    let third = 1.0 / 3.0;
    let cm = (v[0] + v[1] + v[2]) * third;
    let plus = (v[0] + a2 * v[1] + a * v[2]) * third;
    let minus = (v[0] + a * v[1] + a2 * v[2]) * third;
    (cm, plus, minus)
}

/// (v_cm, v₊, v₋) → (v1, v2, v3), with vₙ = v_cm + v₊·a^{n−1} + v₋·a^{−(n−1)}.
pub fn from_modes(cm: C64, plus: C64, minus: C64) -> [C64; 3] {
    let a = a();
    let ac = a.conj();
    [cm + plus + minus, cm + a * plus + ac * minus, cm + ac * plus + a * minus]
}

/// Mode amplitudes for a unit port-1 tone, per output harmonic k ∈ {−1, 0, +1}.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeVoltages {
    pub vcm: Harmonics<C64>,
    pub vplus: Harmonics<C64>,
    pub vminus: Harmonics<C64>,
}

/// Tank voltages (V1, V2, V3) per output harmonic.
pub type TankVoltages = Harmonics<[C64; 3]>;

pub fn tank_voltages(m: &ModeVoltages) -> TankVoltages {
    Harmonics::from_fn(|k| from_modes(m.vcm[k], m.vplus[k], m.vminus[k]))
}
