//! Kirchhoff equations of the delta junction in the time domain.
//!
//! Tank n runs from node aₙ to aₙ₊₁ and carries iₙ = vₙ/R + i_Lₙ + i_Cₙ.
//! Each node aₙ is fed by a source v_sₙ behind Z0. With the port currents
//! i_pₙ = (v_sₙ − eₙ)/Z0 flowing into the nodes, KCL gives iₙ = iₙ₋₁ + i_pₙ,
//! and the node voltages follow from the tank voltages as
//! eₙ = (Σ v_s + vₙ − vₙ₋₁)/3.
//!
//! For the unmodulated linear tank this reduces to the textbook form
//! C0·v″ + v′/R + v/L = i′ with the loop coupling of the three tanks.
//!
//! The capacitor current is written as i_C = K·v′ + M. For the incremental
//! law K = C(t), M = 0. For the charge law with a prescribed C(t),
//! K = C(t), M = Ċ(t)·v. For a varactor carrying the modulation voltage
//! v_mod(t) it is the RF part of dQ(v_mod + v)/dt, so
//! K = C(v_mod + v), M = v̇_mod·(C(v_mod + v) − C(v_mod)).
//! Together with Σ vₙ = 0 this fixes the unknown loop current J = i₁ in
//! closed form, so the state equations are explicit.

use std::f64::consts::PI;

use lptv_core::{CapacitorLaw, CircuitParams};

use crate::drive::{jitter_processes, Multisine};
use crate::snap::{snap, Snap};
use crate::varactor::EffectivePoly;
use crate::{DriveSpec, SimError, VaractorModel};

/// Node index behind each port. Port 2 sits between tanks 2 and 3 so that
/// the forward direction circulates 1 → 2 → 3 → 1.
pub const PORT_NODE: [usize; 3] = [0, 2, 1];

/// State layout: tank voltages, inductor currents, dissipated port energy.
pub const DIM: usize = 7;

#[derive(Debug, Clone)]
enum Capacitance {
    Linear {
        c0: f64,
        dc: f64,
    },
    Varactor {
        poly: EffectivePoly,
        vm: f64,
        window: (f64, f64),
    },
}

#[derive(Debug, Clone)]
pub struct System {
    pub circuit: CircuitParams,
    pub drive: DriveSpec,
    pub law: CapacitorLaw,
    pub snap: Snap,
    cap: Capacitance,
    /// (node, ω, amplitude, phase) of every tone.
    tones: Vec<(usize, f64, f64, f64)>,
    wm: f64,
    phases: [f64; 3],
    jitter: Option<[(Multisine, Multisine); 3]>,
    g: f64,
}

/// Builds the state-derivative function for a drive and an optional varactor.
///
/// Without a varactor the capacitance follows the prescribed sinusoidal law
/// C0 + ΔC·cos(ωm·t + φₙ). With one, the modulation is an ideal voltage
/// V_m·cos(ωm·t + φₙ) added to the capacitance argument.
pub fn assemble_system(
    circuit: &CircuitParams,
    drive: &DriveSpec,
    varactor: Option<&VaractorModel>,
) -> Result<System, SimError> {
    circuit.validate()?;
    drive.validate()?;
    let m = drive.modulation;
    let cap = match varactor {
        None => {
            m.validate(circuit)?;
            Capacitance::Linear {
                c0: circuit.c0,
                dc: m.dc,
            }
        }
        Some(v) => {
            v.validate()?;
            if drive.jitter.is_some() {
                return Err(SimError::InvalidDrive(
                    "modulation jitter is only modelled for the prescribed capacitance law".into(),
                ));
            }
            let vm = m.vm.ok_or_else(|| {
                SimError::InvalidDrive("a varactor model needs the modulation amplitude Vm".into())
            })?;
            Capacitance::Varactor {
                poly: EffectivePoly::new(v),
                vm,
                window: v.window(),
            }
        }
    };
    let mut freqs: Vec<f64> = drive.tones.iter().map(|t| t.freq).collect();
    freqs.push(m.fm);
    let snap = snap(m.fm, &freqs, crate::snap::DEFAULT_SNAP_TOL)?;
    let tones = drive
        .tones
        .iter()
        .map(|t| (PORT_NODE[t.port - 1], 2.0 * PI * snap.snapped(t.freq), t.amp, t.phase))
        .collect();
    let jitter = drive.jitter.map(|j| jitter_processes(&j, snap.fb));
    Ok(System {
        circuit: *circuit,
        drive: drive.clone(),
        law: m.law,
        cap,
        tones,
        wm: 2.0 * PI * snap.snapped(m.fm),
        phases: [m.phase(1), m.phase(2), m.phase(3)],
        jitter,
        g: circuit.g(),
        snap,
    })
}

impl System {
    pub fn sources(&self, t: f64) -> [f64; 3] {
        let mut vs = [0.0; 3];
        for &(n, w, a, p) in &self.tones {
            vs[n] += a * (w * t + p).cos();
        }
        vs
    }

    /// Modulation argument ωm·t + φₙ (+ phase noise) and its rate.
    fn mod_arg(&self, n: usize, t: f64) -> (f64, f64, f64, f64) {
        let (mut da, mut dda, mut th, mut dth) = (0.0, 0.0, 0.0, 0.0);
        if let Some(j) = &self.jitter {
            (da, dda) = j[n].0.eval(t);
            (th, dth) = j[n].1.eval(t);
        }
        (self.wm * t + self.phases[n] + th, self.wm + dth, da, dda)
    }

    /// (K, M) of the capacitor current i_C = K·v′ + M for tank n.
    #[inline]
    fn cap_terms(&self, n: usize, t: f64, v: f64) -> (f64, f64) {
        match &self.cap {
            Capacitance::Linear { c0, dc } => {
                let (arg, rate, da, dda) = self.mod_arg(n, t);
                let (s, c) = arg.sin_cos();
                let amp = dc + da;
                let cap = c0 + amp * c;
                match self.law {
                    CapacitorLaw::Incremental => (cap, 0.0),
                    CapacitorLaw::Charge => (cap, (dda * c - amp * s * rate) * v),
                }
            }
            Capacitance::Varactor { poly, vm, .. } => {
                let (s, c) = (self.wm * t + self.phases[n]).sin_cos();
                let u = vm * c;
                let cap = poly.c(u + v);
                match self.law {
                    CapacitorLaw::Incremental => (cap, 0.0),
                    CapacitorLaw::Charge => (cap, -vm * self.wm * s * (cap - poly.c(u))),
                }
            }
        }
    }

    /// Tank capacitances at time t.
    pub fn capacitance(&self, t: f64, v: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|n| self.cap_terms(n, t, v[n]).0)
    }

    /// Charges held by the RF voltage, ∫ C du over the RF swing.
    pub fn charges(&self, t: f64, v: &[f64; 3]) -> [f64; 3] {
        std::array::from_fn(|n| match &self.cap {
            Capacitance::Linear { .. } => self.cap_terms(n, t, v[n]).0 * v[n],
            Capacitance::Varactor { poly, vm, .. } => {
                let u = vm * (self.wm * t + self.phases[n]).cos();
                poly.charge(u, u + v[n])
            }
        })
    }

    pub fn node_voltages(&self, t: f64, y: &[f64; DIM]) -> [f64; 3] {
        let vs = self.sources(t);
        let sum = vs[0] + vs[1] + vs[2];
        std::array::from_fn(|n| (sum + y[n] - y[(n + 2) % 3]) / 3.0)
    }

    /// Currents flowing from the sources into the nodes, by node index.
    pub fn node_currents(&self, t: f64, y: &[f64; DIM]) -> [f64; 3] {
        let vs = self.sources(t);
        let e = self.node_voltages(t, y);
        std::array::from_fn(|n| (vs[n] - e[n]) / self.circuit.z0)
    }

    /// Port currents in port order.
    pub fn port_currents(&self, t: f64, y: &[f64; DIM]) -> [f64; 3] {
        let i = self.node_currents(t, y);
        std::array::from_fn(|p| i[PORT_NODE[p]])
    }

    pub fn rhs(&self, t: f64, y: &[f64; DIM], dy: &mut [f64; DIM]) {
        let z0 = self.circuit.z0;
        let ip = self.node_currents(t, y);
        let s = [0.0, ip[1], ip[1] + ip[2]];
        let mut a = [0.0; 3];
        let mut inv_k = [0.0; 3];
        let (mut num, mut den) = (0.0, 0.0);
        for n in 0..3 {
            let (k, m) = self.cap_terms(n, t, y[n]);
            inv_k[n] = 1.0 / k;
            a[n] = s[n] - self.g * y[n] - y[3 + n] - m;
            num += a[n] * inv_k[n];
            den += inv_k[n];
        }
        let j = -num / den;
        for n in 0..3 {
            dy[n] = (j + a[n]) * inv_k[n];
            dy[3 + n] = y[n] / self.circuit.l;
        }
        dy[6] = z0 * (ip[0] * ip[0] + ip[1] * ip[1] + ip[2] * ip[2]);
    }

    /// Energy stored in capacitors and inductors.
    pub fn stored_energy(&self, t: f64, y: &[f64; DIM]) -> f64 {
        let c = self.capacitance(t, &[y[0], y[1], y[2]]);
        (0..3)
            .map(|n| 0.5 * c[n] * y[n] * y[n] + 0.5 * self.circuit.l * y[3 + n] * y[3 + n])
            .sum()
    }

    /// Largest excursion (V) of any tank's total varactor voltage beyond the
    /// safe window; positive means clipping. `None` for the prescribed law.
    pub fn clip_excursion(&self, t: f64, v: &[f64; 3]) -> Option<f64> {
        match &self.cap {
            Capacitance::Linear { .. } => None,
            Capacitance::Varactor { vm, window, .. } => {
                let mut worst = f64::NEG_INFINITY;
                for n in 0..3 {
                    let u = vm * (self.wm * t + self.phases[n]).cos() + v[n];
                    worst = worst.max(window.0 - u).max(u - window.1);
                }
                Some(worst)
            }
        }
    }

    /// Fastest frequency the state is expected to carry, for step and sample sizing.
    pub fn f_max(&self) -> f64 {
        let ftone = self
            .tones
            .iter()
            .map(|t| t.1 / (2.0 * PI))
            .fold(0.0, f64::max);
        ftone + self.wm / (2.0 * PI)
    }

    pub fn is_nonlinear(&self) -> bool {
        matches!(self.cap, Capacitance::Varactor { .. })
    }
}
