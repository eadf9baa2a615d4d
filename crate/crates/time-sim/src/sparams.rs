use lptv_core::{CircuitParams, ModulationParams, KS};
use num_complex::Complex64 as C64;

use crate::extract::{run_steady, ExtractOptions};
use crate::{assemble_system, DriveSpec, SimError, Tone, VaractorModel};

/// One column of the harmonic S-matrix measured in the time domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimSRow {
    pub k: i32,
    pub input_freq: f64,
    pub output_freq: f64,
    /// S_{q,p} for output ports q = 1, 2, 3.
    pub s: [C64; 3],
}

/// Source EMF used for small-signal S-parameters: unit available power
/// (A²/8Z0 = 1 W at 50 Ω) for the linear model, and 1 % of the modulation
/// amplitude for a varactor so that the RF swing stays a perturbation.
pub fn probe_amplitude(circuit: &CircuitParams, m: &ModulationParams, varactor: Option<&VaractorModel>) -> f64 {
    match (varactor, m.vm) {
        (Some(_), Some(vm)) => vm / 100.0,
        _ => (8.0 * circuit.z0).sqrt(),
    }
}

/// Drives `input_port` at `f` and returns the k = −1, 0, +1 columns.
pub fn extract_s_parameters(
    circuit: &CircuitParams,
    m: &ModulationParams,
    varactor: Option<&VaractorModel>,
    f: f64,
    input_port: usize,
    opts: &ExtractOptions,
) -> Result<[SimSRow; 3], SimError> {
    let amp = probe_amplitude(circuit, m, varactor);
    let drive = DriveSpec::new(
        vec![Tone {
            port: input_port,
            freq: f,
            amp,
            phase: 0.0,
        }],
        *m,
    );
    let sys = assemble_system(circuit, &drive, varactor)?;
    let fs = sys.snap.snapped(f);
    let fm = sys.snap.snapped(m.fm);
    let outs: Vec<f64> = KS.iter().map(|&k| fs + k as f64 * fm).collect();
    if let Some(&o) = outs.iter().find(|o| o.abs() < 0.5 * sys.snap.fb) {
        return Err(SimError::Experiment(format!("output frequency {o} Hz collapses to DC")));
    }
    let probe: Vec<f64> = outs.iter().map(|o| o.abs()).collect();
    let ss = run_steady(&sys, &probe, opts)?;
    let incident = amp / 2.0;
    Ok(std::array::from_fn(|i| {
        let k = KS[i];
        let s = std::array::from_fn(|q| {
            let mut v = ss.port_voltage(i, q + 1);
            // A negative output frequency is the conjugate image of the positive one.
            if outs[i] < 0.0 {
                v = v.conj();
            }
            if k == 0 && q + 1 == input_port {
                v -= incident;
            }
            v / incident
        });
        SimSRow {
            k,
            input_freq: fs,
            output_freq: outs[i],
            s,
        }
    }))
}
