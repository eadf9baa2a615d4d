use design::*;
use lptv_core::*;

fn circuit() -> CircuitParams {
    CircuitParams::new(3.4e-9, 7.67e-12, 70.0, 50.0).unwrap()
}

fn axis(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect()
}

fn small() -> SweepConfig {
    SweepConfig {
        fm_axis: axis(0.15, 0.25, 21),
        dc_axis: axis(0.35, 0.60, 21),
        bw_points: 201,
        ..SweepConfig::standard(1e9)
    }
}

#[test]
fn standard_axes() {
    let cfg = SweepConfig::standard(1e9);
    assert_eq!((cfg.fm_axis.len(), cfg.dc_axis.len()), (100, 100));
    assert_eq!((cfg.fm_axis[0], cfg.fm_axis[99]), (0.05, 0.35));
    assert_eq!((cfg.dc_axis[0], cfg.dc_axis[99]), (0.05, 0.70));
    assert!(!cfg.retune_c0);
}

#[test]
fn isolation_peak_dominates_its_neighbours() {
    let r = sweep(&circuit(), &small()).unwrap();
    let (i, j) = r.design_points.p3;
    assert!(i > 0 && j > 0 && i < 20 && j < 20, "p3 {:?} on the grid edge", (i, j));
    let best = r.ix_db[i][j];
    for di in -1..=1i32 {
        for dj in -1..=1i32 {
            let x = r.ix_db[(i as i32 + di) as usize][(j as i32 + dj) as usize];
            assert!(x <= best, "neighbour ({di},{dj}) {x} > {best}");
        }
    }
}

#[test]
fn design_points_are_extrema() {
    let r = sweep(&circuit(), &small()).unwrap();
    let d = r.design_points;
    let all = |g: &Vec<Vec<f64>>| g.iter().flatten().copied().filter(|x| !x.is_nan()).collect::<Vec<_>>();
    assert_eq!(r.rl_db[d.p1.0][d.p1.1], all(&r.rl_db).into_iter().fold(f64::INFINITY, f64::min));
    assert_eq!(r.il_db[d.p2.0][d.p2.1], all(&r.il_db).into_iter().fold(f64::INFINITY, f64::min));
    assert_eq!(r.bw_frac[d.p4.0][d.p4.1], all(&r.bw_frac).into_iter().fold(f64::NEG_INFINITY, f64::max));
}

#[test]
fn cell_matches_direct_evaluation() {
    let cfg = small();
    let r = sweep(&circuit(), &cfg).unwrap();
    let cell = (7, 13);
    let m = r.modulation(&cfg, cell);
    let row = metrics_at(&circuit(), &m, 1e9).unwrap();
    assert_eq!(r.il_db[7][13], row.il_db);
    assert_eq!(r.ix_db[7][13], row.ix_db);
    assert_eq!(r.rl_db[7][13], row.rl_db);
}

#[test]
fn sweep_is_deterministic() {
    let a = sweep(&circuit(), &small()).unwrap();
    let b = sweep(&circuit(), &small()).unwrap();
    assert_eq!(format!("{a:?}"), format!("{b:?}"));
}

#[test]
fn single_cell() {
    let cfg = SweepConfig {
        fm_axis: vec![0.19],
        dc_axis: vec![0.46],
        ..SweepConfig::standard(1e9)
    };
    let r = sweep(&circuit(), &cfg).unwrap();
    let d = r.design_points;
    assert!([d.p1, d.p2, d.p3, d.p4].iter().all(|&p| p == (0, 0)));
    assert!(r.bw_frac[0][0] > 0.0);
}

#[test]
fn retuning_moves_c0_to_the_evaluation_frequency() {
    let cfg = SweepConfig {
        retune_c0: true,
        fm_axis: vec![0.19],
        dc_axis: vec![0.46],
        ..SweepConfig::standard(1e9)
    };
    let r = sweep(&circuit(), &cfg).unwrap();
    assert!((resonance_frequency(&r.circuit) - 1e9).abs() < 1e-3);
}

#[test]
fn invalid_cells_are_skipped() {
    // ΔC ≥ C0 is rejected per cell; the remaining cells still define the points.
    let cfg = SweepConfig {
        fm_axis: vec![0.19, 0.2],
        dc_axis: vec![0.46, 1.2],
        ..SweepConfig::standard(1e9)
    };
    let r = sweep(&circuit(), &cfg).unwrap();
    assert!(r.ix_db[0][1].is_nan() && r.ix_db[1][1].is_nan());
    assert_eq!(r.design_points.p3.1, 0);
}

#[test]
fn bad_configs_rejected() {
    let mut cfg = small();
    cfg.fm_axis = vec![0.2, 0.1];
    assert!(matches!(sweep(&circuit(), &cfg), Err(DesignError::InvalidGrid(_))));
    let mut cfg = small();
    cfg.bw_span = (1.01, 1.1);
    assert!(matches!(sweep(&circuit(), &cfg), Err(DesignError::InvalidGrid(_))));
}
