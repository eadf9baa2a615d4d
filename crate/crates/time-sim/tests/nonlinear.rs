//! Large-signal behaviour with polynomial varactors.

use lptv_core::*;
use time_sim::*;

const C0: f64 = 7.67e-12;
const VM: f64 = 3.62;

fn circuit() -> CircuitParams {
    CircuitParams::new(3.4e-9, C0, 70.0, 50.0).unwrap()
}

/// Convex cubic law scaled so that a₁·Vm ≈ 0.46·C0 at Vm = 3.62 V.
fn convex_cubic() -> VaractorModel {
    VaractorModel::new(vec![0.127 * C0, 0.0107 * C0, -7.7e-4 * C0], C0, -0.6, 15.0, 5.0, 1).unwrap()
}

fn modulation(vm: f64) -> ModulationParams {
    let mut m = ModulationParams::new(190e6, 0.127 * C0 * vm).with_law(CapacitorLaw::Charge);
    m.vm = Some(vm);
    m
}

fn fast() -> ExtractOptions {
    ExtractOptions {
        n_settle: 10,
        n_meas: 5,
        content_order: 5,
        ..Default::default()
    }
}

fn s21_db(v: &VaractorModel, vm: f64, f: f64) -> f64 {
    let r = extract_s_parameters(&circuit(), &modulation(vm), Some(v), f, 1, &fast()).unwrap();
    20.0 * r[1].s[1].norm().log10()
}

/// Transmission maximum on a 5 MHz grid refined by a parabola through the
/// three samples around the largest one.
fn transmission_peak(v: &VaractorModel, vm: f64) -> f64 {
    let fs: Vec<f64> = (0..=16).map(|i| 930e6 + i as f64 * 5e6).collect();
    let s: Vec<f64> = fs.iter().map(|&f| s21_db(v, vm, f)).collect();
    let i = (1..s.len() - 1).max_by(|&a, &b| s[a].total_cmp(&s[b])).unwrap();
    assert!(s[i] >= s[i - 1] && s[i] >= s[i + 1], "peak at the scan edge for Vm = {vm}");
    let den = s[i - 1] - 2.0 * s[i] + s[i + 1];
    fs[i] + 0.5 * 5e6 * (s[i - 1] - s[i + 1]) / den
}

#[test]
fn transmission_peak_shifts_down_with_modulation_amplitude() {
    let v = convex_cubic();
    let peaks: Vec<f64> = [3.0, VM, 4.0].iter().map(|&vm| transmission_peak(&v, vm)).collect();
    assert!(peaks.windows(2).all(|w| w[1] <= w[0]), "peaks {peaks:?}");
}

#[test]
fn quadratic_term_raises_the_mean_capacitance() {
    let v = convex_cubic();
    let (b0, b1, d1) = effective_capacitance_shift(&v, VM, 0.0);
    assert!(b0 > C0);
    assert!((b1 - (0.127 * VM + 0.75 * -7.7e-4 * VM.powi(3)) * C0).abs() < 1e-24);
    assert_eq!(d1, 0.0);
}

#[test]
fn linear_model_does_not_compress() {
    let m = ModulationParams::new(190e6, 0.46 * C0);
    let grid: Vec<f64> = (0..=6).map(|i| i as f64 * 5.0).collect();
    let opts = CompressionOptions {
        extract: fast(),
        ..Default::default()
    };
    let r = compression_sweep(&circuit(), &m, None, 1e9, &grid, &opts).unwrap();
    assert_eq!(r.p1db_dbm, None);
    assert!(r.points.iter().all(|p| (p.gain_db - r.small_signal_gain_db).abs() < 1e-6 && p.clip_margin.is_none()));
}

#[track_caller]
fn assert_monotone_past_onset(r: &CompressionResult) {
    let g: Vec<f64> = r.points.iter().map(|p| p.gain_db).collect();
    let onset = g
        .iter()
        .position(|&x| x < r.small_signal_gain_db - 0.05)
        .expect("no compression onset on the grid");
    for w in g[onset - 1..].windows(2) {
        assert!(w[1] < w[0], "gain not monotone past onset: {g:?}");
    }
}

#[test]
fn cubic_only_law_compresses_monotonically() {
    let v = VaractorModel::new(vec![0.127 * C0, 0.0, -7.7e-4 * C0], C0, -0.6, 15.0, 5.0, 1).unwrap();
    let grid: Vec<f64> = (0..=14).map(|i| -6.0 + i as f64 * 2.0).collect();
    let opts = CompressionOptions {
        extract: fast(),
        ..Default::default()
    };
    let r = compression_sweep(&circuit(), &modulation(VM), Some(&v), 970e6, &grid, &opts).unwrap();
    assert_monotone_past_onset(&r);
    assert!(r.p1db_dbm.is_some());
}

#[test]
fn convex_cubic_compression_and_isolation_degrade_together() {
    let grid: Vec<f64> = (0..=11).map(|i| i as f64 * 2.0).collect();
    let opts = CompressionOptions {
        extract: fast(),
        ..Default::default()
    };
    let r = compression_sweep(&circuit(), &modulation(VM), Some(&convex_cubic()), 970e6, &grid, &opts).unwrap();
    assert_monotone_past_onset(&r);
    let ix: Vec<f64> = r.points.iter().map(|p| p.ix_db).collect();
    assert!(ix.windows(2).all(|w| w[1] < w[0]), "IX {ix:?}");
    // Clipping shows up at the top of the grid and is only a diagnostic.
    assert!(!r.points[0].clip && r.points.last().unwrap().clip);
    let (p1, pix, pmax) = (r.p1db_dbm.unwrap(), r.pix_dbm.unwrap(), r.pmax_dbm.unwrap());
    assert_eq!(pmax, p1.min(pix));
}

#[test]
fn two_tone_third_order_slope() {
    let grid = [-20.0, -15.0, -10.0, -5.0, 0.0];
    let opts = ExtractOptions {
        n_settle: 4,
        n_meas: 2,
        ..fast()
    };
    let r = two_tone_test(&circuit(), &modulation(VM), Some(&convex_cubic()), 969.5e6, 970.5e6, &grid, 3, &opts).unwrap();
    let slope = r.im3_slope.unwrap();
    assert!((slope - 3.0).abs() <= 0.1, "IM3 slope {slope}");
    assert!((r.fund_slope - 1.0).abs() < 0.01);
    assert!(r.iip3_dbm.is_finite());
}

#[test]
fn linear_model_has_no_intercept() {
    let m = ModulationParams::new(190e6, 0.46 * C0);
    let opts = ExtractOptions {
        n_settle: 4,
        n_meas: 2,
        ..fast()
    };
    let r = two_tone_test(&circuit(), &m, None, 969.5e6, 970.5e6, &[-20.0, -10.0, 0.0], 3, &opts).unwrap();
    assert_eq!(r.iip3_dbm, f64::INFINITY);
    assert_eq!(r.im3_slope, None);
}

#[test]
fn experiment_inputs_are_checked() {
    let m = modulation(VM);
    let v = convex_cubic();
    let opts = CompressionOptions::default();
    assert!(compression_sweep(&circuit(), &m, Some(&v), 970e6, &[0.0, 0.0], &opts).is_err());
    assert!(two_tone_test(&circuit(), &m, Some(&v), 970e6, 970e6, &[0.0, 1.0, 2.0], 3, &fast()).is_err());
    let mut no_vm = m;
    no_vm.vm = None;
    assert!(matches!(
        compression_sweep(&circuit(), &no_vm, Some(&v), 970e6, &[0.0, 1.0], &opts),
        Err(SimError::InvalidDrive(_))
    ));
}
