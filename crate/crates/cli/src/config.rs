//! JSON run configuration. Every key carries its unit; unknown keys are
//! rejected so a misspelt unit never falls back to a default silently.

use design::SweepConfig;
use lptv_core::{retune_c0, CapacitorLaw, CircuitParams, Direction, ModulationParams};
use noise::PsdSpec;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use time_sim::{ExtractOptions, VaractorModel};

use crate::CliError;

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub circuit: Option<CircuitCfg>,
    pub modulation: Option<ModulationCfg>,
    pub varactor: Option<VaractorCfg>,
    pub grid: Option<GridCfg>,
    pub bandwidth: Option<BandwidthCfg>,
    pub sweep: Option<SweepCfg>,
    pub transient: Option<TransientCfg>,
    pub compress: Option<CompressCfg>,
    pub twotone: Option<TwoToneCfg>,
    pub noise: Option<NoiseCfg>,
    pub modnet: Option<ModnetCfg>,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitCfg {
    #[serde(rename = "L_H")]
    pub l: f64,
    /// Either C0 directly or the resonance it should produce with L.
    #[serde(rename = "C0_F")]
    pub c0: Option<f64>,
    #[serde(rename = "f0_Hz")]
    pub f0: Option<f64>,
    /// Unloaded Q; omitted means lossless.
    #[serde(rename = "Q")]
    pub q: Option<f64>,
    #[serde(rename = "Z0_ohm", default = "default_z0")]
    pub z0: f64,
}

fn default_z0() -> f64 {
    50.0
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum LawCfg {
    #[default]
    Incremental,
    Charge,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize, Default)]
#[serde(rename_all = "lowercase")]
pub enum DirectionCfg {
    #[default]
    Forward,
    Reverse,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModulationCfg {
    #[serde(rename = "fm_Hz")]
    pub fm: f64,
    /// Depth as a fraction of C0; with a varactor it may be omitted and is
    /// then a₁·Vm.
    #[serde(rename = "dC_over_C0")]
    pub dc_over_c0: Option<f64>,
    #[serde(rename = "Vm_V")]
    pub vm: Option<f64>,
    #[serde(default)]
    pub law: LawCfg,
    #[serde(default)]
    pub direction: DirectionCfg,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct VaractorCfg {
    /// a₁..a_K of one device, F/Vᵏ.
    #[serde(rename = "a_F_per_Vk")]
    pub a: Vec<f64>,
    #[serde(rename = "C0q_F")]
    pub c0q: f64,
    #[serde(rename = "Vf_V")]
    pub vf: f64,
    #[serde(rename = "VB_V")]
    pub vb: f64,
    #[serde(rename = "VDC_V")]
    pub vdc: f64,
    pub stack: u32,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct GridCfg {
    #[serde(rename = "start_Hz")]
    pub start: f64,
    #[serde(rename = "stop_Hz")]
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct BandwidthCfg {
    #[serde(rename = "beta_dB")]
    pub beta: f64,
    #[serde(rename = "gamma_dB")]
    pub gamma: f64,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct AxisCfg {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SweepCfg {
    #[serde(rename = "f_eval_Hz")]
    pub f_eval: f64,
    pub fm_over_frf: AxisCfg,
    #[serde(rename = "dC_over_C0")]
    pub dc_over_c0: AxisCfg,
    #[serde(rename = "retune_C0", default)]
    pub retune_c0: bool,
    /// Bandwidth window [lo, hi]·f_eval.
    #[serde(default = "default_bw_span")]
    pub bw_span_over_f: [f64; 2],
    #[serde(default = "default_bw_points")]
    pub bw_points: usize,
}

fn default_bw_span() -> [f64; 2] {
    [0.9, 1.1]
}

fn default_bw_points() -> usize {
    401
}

/// Steady-state detection for the time-domain verbs, in common periods.
#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct SettleCfg {
    pub periods_settle: u64,
    pub periods_meas: u64,
    #[serde(default = "default_settle_tol")]
    pub settle_tol: f64,
    #[serde(default = "default_rtol")]
    pub rtol: f64,
}

fn default_settle_tol() -> f64 {
    1e-4
}

fn default_rtol() -> f64 {
    1e-9
}

impl SettleCfg {
    pub fn extract(this: &Option<SettleCfg>, content_order: u32) -> ExtractOptions {
        let mut o = ExtractOptions {
            content_order,
            ..Default::default()
        };
        if let Some(s) = this {
            o.n_settle = s.periods_settle;
            o.n_meas = s.periods_meas;
            o.settle_tol = s.settle_tol;
            o.tol.rtol = s.rtol;
        }
        o
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TransientCfg {
    #[serde(rename = "f_Hz")]
    pub f: f64,
    #[serde(default = "default_port")]
    pub input_port: usize,
    /// Source EMF amplitude; defaults to the small-signal probe.
    #[serde(rename = "drive_V")]
    pub drive: Option<f64>,
    /// Tank voltages (V) then inductor currents (A).
    #[serde(rename = "initial_state_V_A")]
    pub initial_state: Option<[f64; 6]>,
    /// Common periods written to the trajectory file, counted from the end.
    #[serde(default = "default_traj_periods")]
    pub trajectory_periods: u64,
    pub settle: Option<SettleCfg>,
    pub jitter: Option<JitterCfg>,
}

fn default_port() -> usize {
    1
}

fn default_traj_periods() -> u64 {
    2
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct JitterCfg {
    #[serde(rename = "phase_rms_rad")]
    pub phase_rms: f64,
    #[serde(rename = "amp_rms_over_dC")]
    pub amp_rms_over_dc: f64,
    #[serde(rename = "bandwidth_Hz")]
    pub bandwidth: f64,
    pub trials: usize,
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct CompressCfg {
    #[serde(rename = "f_Hz")]
    pub f: f64,
    #[serde(rename = "pin_dBm")]
    pub pin: Vec<f64>,
    #[serde(rename = "x_dB", default = "default_x")]
    pub x: f64,
    #[serde(rename = "sigma_dB", default = "default_sigma")]
    pub sigma: f64,
    /// Fail (exit 4) when P1dB is not bracketed by the power grid.
    #[serde(default)]
    pub require_p1db: bool,
    pub settle: Option<SettleCfg>,
}

fn default_x() -> f64 {
    1.0
}

fn default_sigma() -> f64 {
    20.0
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct TwoToneCfg {
    #[serde(rename = "f1_Hz")]
    pub f1: f64,
    #[serde(rename = "f2_Hz")]
    pub f2: f64,
    #[serde(rename = "pin_dBm")]
    pub pin: Vec<f64>,
    #[serde(default = "default_n_fit")]
    pub n_fit: usize,
    /// Fail (exit 4) when no finite intercept is found.
    #[serde(default)]
    pub require_intercept: bool,
    pub settle: Option<SettleCfg>,
}

fn default_n_fit() -> usize {
    3
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct PsdCfg {
    #[serde(rename = "white_V2_per_Hz")]
    pub white: Option<f64>,
    /// [[f_Hz, V²/Hz], ...], linearly interpolated.
    #[serde(rename = "table_Hz_V2_per_Hz")]
    pub table: Option<Vec<[f64; 2]>>,
}

impl PsdCfg {
    fn spec(&self, which: &str) -> Result<PsdSpec, CliError> {
        match (self.white, &self.table) {
            (Some(v), None) => Ok(PsdSpec::White(v)),
            (None, Some(t)) => Ok(PsdSpec::Tabulated(t.iter().map(|p| (p[0], p[1])).collect())),
            _ => Err(CliError::Config(format!(
                "noise.{which}: give exactly one of white_V2_per_Hz and table_Hz_V2_per_Hz"
            ))),
        }
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseCfg {
    pub ant: PsdCfg,
    pub tx: PsdCfg,
}

impl NoiseCfg {
    pub fn specs(&self) -> Result<(PsdSpec, PsdSpec), CliError> {
        Ok((self.ant.spec("ant")?, self.tx.spec("tx")?))
    }
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct ModnetCfg {
    #[serde(rename = "Ck_F")]
    pub ck: f64,
    #[serde(rename = "Rsrc_ohm")]
    pub rsrc: f64,
    /// Defaults to modulation.fm_Hz.
    #[serde(rename = "fm_Hz")]
    pub fm: Option<f64>,
    /// RF inductance bounding Lm from below; defaults to circuit.L_H.
    #[serde(rename = "L_H")]
    pub l: Option<f64>,
    #[serde(rename = "Qk", default = "default_qk")]
    pub qk: f64,
    /// An existing network to evaluate alongside the synthesis.
    pub check: Option<NetworkCfg>,
}

fn default_qk() -> f64 {
    design::DEFAULT_QK
}

#[derive(Debug, Clone, Deserialize, Serialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkCfg {
    #[serde(rename = "Lm_H")]
    pub lm: f64,
    #[serde(rename = "Cm_F")]
    pub cm: f64,
}

/// A parsed config together with the hash of its canonical form.
#[derive(Debug, Clone)]
pub struct Loaded {
    pub config: RunConfig,
    pub hash: String,
}

pub fn parse(text: &str) -> Result<Loaded, CliError> {
    let value: serde_json::Value = serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
    // serde_json keeps object keys sorted, so this is canonical.
    let canonical = serde_json::to_string(&value).expect("re-serialising parsed JSON");
    let hash = format!("{:x}", Sha256::digest(canonical.as_bytes()));
    let config = serde_json::from_value(value).map_err(|e| CliError::Config(e.to_string()))?;
    Ok(Loaded { config, hash })
}

fn need<'a, T>(x: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
    x.as_ref().ok_or_else(|| CliError::Config(format!("missing \"{what}\" section")))
}

impl RunConfig {
    pub fn circuit(&self) -> Result<CircuitParams, CliError> {
        let c = need(&self.circuit, "circuit")?;
        let c0 = match (c.c0, c.f0) {
            (Some(c0), None) => c0,
            (None, Some(f0)) => {
                if !(f0 > 0.0 && c.l > 0.0) {
                    return Err(CliError::Config("f0_Hz and L_H must be positive".into()));
                }
                retune_c0(c.l, f0)
            }
            _ => return Err(CliError::Config("circuit: give exactly one of C0_F and f0_Hz".into())),
        };
        Ok(CircuitParams::new(c.l, c0, c.q.unwrap_or(f64::INFINITY), c.z0)?)
    }

    pub fn varactor(&self) -> Result<Option<VaractorModel>, CliError> {
        self.varactor
            .as_ref()
            .map(|v| VaractorModel::new(v.a.clone(), v.c0q, v.vf, v.vb, v.vdc, v.stack).map_err(CliError::from))
            .transpose()
    }

    pub fn modulation(&self) -> Result<ModulationParams, CliError> {
        let m = need(&self.modulation, "modulation")?;
        let c = self.circuit()?;
        let dc = match (m.dc_over_c0, self.varactor()?, m.vm) {
            (Some(x), _, _) => x * c.c0,
            (None, Some(v), Some(vm)) => v.delta_c(vm),
            _ => {
                return Err(CliError::Config(
                    "modulation: dC_over_C0 is required unless a varactor and Vm_V are given".into(),
                ))
            }
        };
        let mut p = ModulationParams::new(m.fm, dc)
            .with_law(match m.law {
                LawCfg::Incremental => CapacitorLaw::Incremental,
                LawCfg::Charge => CapacitorLaw::Charge,
            })
            .with_direction(match m.direction {
                DirectionCfg::Forward => Direction::Forward,
                DirectionCfg::Reverse => Direction::Reverse,
            });
        p.vm = m.vm;
        p.validate(&c)?;
        Ok(p)
    }

    pub fn grid(&self) -> Result<Vec<f64>, CliError> {
        let g = need(&self.grid, "grid")?;
        linspace(g.start, g.stop, g.points, "grid")
    }

    pub fn beta_gamma(&self) -> (f64, f64) {
        self.bandwidth
            .as_ref()
            .map_or((design::DEFAULT_BETA, design::DEFAULT_GAMMA), |b| (b.beta, b.gamma))
    }

    pub fn sweep(&self) -> Result<SweepConfig, CliError> {
        let s = need(&self.sweep, "sweep")?;
        let (beta, gamma) = self.beta_gamma();
        let m = self.modulation.as_ref();
        Ok(SweepConfig {
            f_eval: s.f_eval,
            fm_axis: linspace(s.fm_over_frf.start, s.fm_over_frf.stop, s.fm_over_frf.points, "sweep.fm_over_frf")?,
            dc_axis: linspace(s.dc_over_c0.start, s.dc_over_c0.stop, s.dc_over_c0.points, "sweep.dC_over_C0")?,
            beta,
            gamma,
            retune_c0: s.retune_c0,
            bw_span: (s.bw_span_over_f[0], s.bw_span_over_f[1]),
            bw_points: s.bw_points,
            law: match m.map(|m| m.law).unwrap_or_default() {
                LawCfg::Incremental => CapacitorLaw::Incremental,
                LawCfg::Charge => CapacitorLaw::Charge,
            },
            direction: match m.map(|m| m.direction).unwrap_or_default() {
                DirectionCfg::Forward => Direction::Forward,
                DirectionCfg::Reverse => Direction::Reverse,
            },
        })
    }

    pub fn section<'a, T>(&self, x: &'a Option<T>, what: &str) -> Result<&'a T, CliError> {
        need(x, what)
    }
}

pub fn linspace(a: f64, b: f64, n: usize, what: &str) -> Result<Vec<f64>, CliError> {
    if n == 0 || !a.is_finite() || !b.is_finite() || (n > 1 && b <= a) {
        return Err(CliError::Config(format!("{what}: need stop > start and at least one point")));
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}
