//! Reference values from an independent high-precision evaluation.

use design::*;
use lptv_core::*;

const FC: f64 = 998_412_341.267_325_6;

fn table1() -> (CircuitParams, ModulationParams) {
    let c = CircuitParams::new(3.4e-9, 7.67e-12, 70.0, 50.0).unwrap();
    (c, ModulationParams::new(190e6, 0.46 * 7.67e-12))
}

fn grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

#[track_caller]
fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!((got - want).abs() <= tol, "{what}: {got} vs {want}");
}

#[test]
fn table1_metrics_at_null() {
    let (c, m) = table1();
    let r = metrics_at(&c, &m, FC).unwrap();
    close(r.il_db, 3.343_979_412_196_644, 1e-9, "IL");
    close(r.rl_db, -9.196_639_635_500_025, 1e-9, "RL");
    close(r.ix_db, 32.059_067_038_469_87, 1e-6, "IX");
    close(r.im_dbc[0], -9.637_048_968_160_935, 1e-9, "IM−1");
    close(r.im_dbc[1], -9.920_059_925_374_745, 1e-9, "IM+1");
}

#[test]
fn input_impedance_and_group_delay_at_one_gigahertz() {
    let (c, m) = table1();
    let r = metrics_at(&c, &m, 1e9).unwrap();
    let z = r.zin.unwrap();
    close(z.re, 101.615_965_343_532_18, 1e-8, "Re Zin");
    close(z.im, -8.924_254_436_626_836, 1e-8, "Im Zin");
    close(r.tau_g.unwrap(), 1.310_033_572_375_196_7e-9, 1e-13, "τg");
}

#[test]
fn null_frequency_found_on_grid_and_refined() {
    let (c, m) = table1();
    let g = grid(0.9e9, 1.1e9, 2001);
    let resp = frequency_response(&c, &m, &g).unwrap();
    let fc = resp.fc().unwrap();
    assert!((fc - FC).abs() <= g[1] - g[0], "grid fc {fc}");
    let fine = refine_center(&c, &m, fc - 1e6, fc + 1e6).unwrap();
    close(fine, FC, 1e3, "refined fc");
}

#[test]
fn table1_bandwidth() {
    let (c, m) = table1();
    let resp = frequency_response(&c, &m, &grid(0.9e9, 1.1e9, 2001)).unwrap();
    let bw = bandwidth(&resp, 4.0, 20.0).unwrap();
    assert_eq!(bw.limited_by, Some(Limit::Isolation));
    assert_eq!(bw.flag, None);
    let (lo, hi) = bw.ix_band.unwrap();
    close(lo, 986_655_494.385_950_8, 2e3, "IX lower edge");
    close(hi, 1_010_903_852.019_919_8, 2e3, "IX upper edge");
    let (lo, hi) = bw.il_band.unwrap();
    close(lo, 975_337_843.764_561_3, 2e3, "IL lower edge");
    close(hi, 1_032_144_869.799_080_7, 2e3, "IL upper edge");
    close(bw.frac, 0.024_286_916_969_785_76, 1e-5, "fractional BW");
}

#[test]
fn deeper_modulation_null() {
    let c = CircuitParams::new(3.4e-9, 7.67e-12, 70.0, 50.0).unwrap();
    let m = ModulationParams::new(190e6, 0.4907 * 7.67e-12);
    let r = metrics_at(&c, &m, 999_052_377.719_982_8).unwrap();
    close(r.il_db, 2.945_689_330_756_939, 1e-9, "IL");
    close(r.rl_db, -10.742_809_948_781_387, 1e-9, "RL");
    close(r.ix_db, 105.745_979_629_537_9, 1e-3, "IX");
    let resp = frequency_response(&c, &m, &grid(0.9e9, 1.1e9, 2001)).unwrap();
    let bw = bandwidth(&resp, 4.0, 20.0).unwrap();
    close(bw.frac, 0.027_409_055_665_950_325, 1e-5, "fractional BW");
}

#[test]
fn table2_network_gain() {
    let g = mod_network_gain(72e-9, 24e-12, 8e-12, 50.0, 190e6).unwrap();
    close(g, 1.307_303_811_132_461_7, 1e-12, "Gm");
    let g = mod_network_gain_q(72e-9, 24e-12, 8e-12, 50.0, 190e6, 100.0).unwrap();
    close(g, 1.312_189_859_687_308_8, 1e-12, "Gm (Qk = 100)");
    assert!(g > 1.0);
}

#[test]
fn synthesized_network_matches_two_dimensional_optimum() {
    let Synthesis::Network(n) = synthesize_mod_network(8e-12, 50.0, 190e6, 3.3e-9).unwrap() else {
        panic!("expected a network");
    };
    close(n.lm, 9.484_380_387_675_828e-8, 1e-6 * n.lm, "Lm");
    close(n.cm, 9.539_966_964_165_747e-11, 1e-6 * n.cm, "Cm");
    close(n.gm, 6.054_337_195_479_664, 1e-9, "Gm");
}

#[test]
fn retune_c0_places_resonance() {
    let c0 = retune_c0(3.4e-9, 1e9);
    close(c0, 7.450_087_032_524_836e-12, 1e-24, "C0");
    let c = CircuitParams::new(3.4e-9, c0, 70.0, 50.0).unwrap();
    close(resonance_frequency(&c), 1e9, 1e-3, "round trip");
}
