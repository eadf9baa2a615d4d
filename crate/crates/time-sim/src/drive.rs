use std::f64::consts::PI;

use lptv_core::ModulationParams;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::SimError;

/// One sinusoidal source A·cos(2πft + φ) behind port `port` (1-based).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tone {
    pub port: usize,
    pub freq: f64,
    pub amp: f64,
    pub phase: f64,
}

/// Random modulation imperfections, independent per tank.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JitterSpec {
    /// RMS of the modulation phase noise θₙ(t) (rad).
    pub phase_rms: f64,
    /// RMS of the modulation amplitude noise δCₙ(t) (F).
    pub amp_rms: f64,
    /// One-sided noise bandwidth (Hz).
    pub bandwidth: f64,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DriveSpec {
    pub tones: Vec<Tone>,
    pub modulation: ModulationParams,
    pub jitter: Option<JitterSpec>,
}

impl DriveSpec {
    pub fn new(tones: Vec<Tone>, modulation: ModulationParams) -> Self {
        Self {
            tones,
            modulation,
            jitter: None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        for t in &self.tones {
            if !(1..=3).contains(&t.port) {
                return Err(SimError::InvalidDrive(format!("port {} outside 1..=3", t.port)));
            }
            if !(t.freq > 0.0 && t.freq.is_finite()) {
                return Err(SimError::InvalidDrive(format!("tone frequency {} must be positive", t.freq)));
            }
        }
        if let Some(j) = self.jitter {
            if j.phase_rms < 0.0 || j.amp_rms < 0.0 || !(j.bandwidth >= 0.0) {
                return Err(SimError::InvalidDrive("jitter RMS and bandwidth must be nonnegative".into()));
            }
        }
        Ok(())
    }
}

/// Band-limited white process realised as a multisine on the base grid
/// j·fb, j = 0..=J, so that it is periodic with the common period and the
/// steady state stays well defined. Each bin (including DC) carries the same power.
#[derive(Debug, Clone, Default)]
pub(crate) struct Multisine {
    dc: f64,
    comps: Vec<(f64, f64, f64)>, // (ω, amplitude, phase)
}

impl Multisine {
    pub(crate) fn new(rms: f64, bandwidth: f64, fb: f64, rng: &mut ChaCha8Rng) -> Self {
        if rms == 0.0 {
            return Self::default();
        }
        let nbins = (bandwidth / fb).floor() as usize;
        let c = rms * (2.0 / (nbins as f64 + 1.0)).sqrt();
        let sign = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let comps = (1..=nbins)
            .map(|j| (2.0 * PI * j as f64 * fb, c, rng.gen_range(0.0..2.0 * PI)))
            .collect();
        Self {
            dc: sign * c / 2f64.sqrt(),
            comps,
        }
    }

    /// (value, time derivative).
    pub(crate) fn eval(&self, t: f64) -> (f64, f64) {
        let mut x = self.dc;
        let mut dx = 0.0;
        for &(w, a, p) in &self.comps {
            let (s, c) = (w * t + p).sin_cos();
            x += a * c;
            dx -= a * w * s;
        }
        (x, dx)
    }
}

/// Per-tank (amplitude noise, phase noise) processes.
pub(crate) fn jitter_processes(j: &JitterSpec, fb: f64) -> [(Multisine, Multisine); 3] {
    let mut rng = ChaCha8Rng::seed_from_u64(j.seed);
    std::array::from_fn(|_| {
        let a = Multisine::new(j.amp_rms, j.bandwidth, fb, &mut rng);
        let p = Multisine::new(j.phase_rms, j.bandwidth, fb, &mut rng);
        (a, p)
    })
}
