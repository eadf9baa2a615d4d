use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use lptv_core::{full_s_matrix, harmonic_s_row, CircuitParams, Complex64 as C64, Direction, ModulationParams};
use serde_json::Value;
use tempfile::TempDir;

const CONFIGS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/configs");

fn bundled(name: &str) -> PathBuf {
    Path::new(CONFIGS).join(name)
}

fn lptv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lptv")).args(args).output().expect("binary runs")
}

/// Runs a verb on a config file into a fresh directory.
fn run(verb: &str, config: &Path, extra: &[&str]) -> (TempDir, Output) {
    let dir = tempfile::tempdir().unwrap();
    let mut args = vec![
        verb,
        "--config",
        config.to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    let out = lptv(&args);
    (dir, out)
}

fn run_ok(verb: &str, config: &Path, extra: &[&str]) -> (TempDir, Value) {
    let (dir, out) = run(verb, config, extra);
    assert!(
        out.status.success(),
        "{verb} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let summary = serde_json::from_slice(&out.stdout).expect("stdout is the JSON summary");
    (dir, summary)
}

/// Writes an inline config to a temporary file.
fn inline(text: &str) -> (TempDir, PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("config.json");
    fs::write(&p, text).unwrap();
    (dir, p)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn csv(p: &Path) -> (String, Vec<String>, Vec<Vec<String>>) {
    let text = fs::read_to_string(p).unwrap();
    let mut lines = text.lines();
    let meta = lines.next().unwrap().to_string();
    let header = lines.next().unwrap().split(',').map(String::from).collect();
    let rows = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    (meta, header, rows)
}

fn column(header: &[String], rows: &[Vec<String>], name: &str) -> Vec<f64> {
    let i = header.iter().position(|h| h == name).unwrap_or_else(|| panic!("no column {name}"));
    rows.iter().map(|r| r[i].parse().unwrap()).collect()
}

fn check_meta(line: &str, comment: &str, verb: &str) {
    let rest = line.strip_prefix(comment).unwrap_or_else(|| panic!("bad meta line {line}"));
    let want = format!(" lptv {} verb={verb} config_sha256=", env!("CARGO_PKG_VERSION"));
    assert!(rest.starts_with(&want), "{line}");
    let hash = rest[want.len()..].split(' ').next().unwrap();
    assert_eq!(hash.len(), 64);
    assert!(hash.chars().all(|c| c.is_ascii_hexdigit()));
}

fn table1_params() -> (CircuitParams, ModulationParams) {
    let c = CircuitParams::new(3.4e-9, 7.67e-12, 70.0, 50.0).unwrap();
    (c, ModulationParams::new(190e6, 0.46 * 7.67e-12))
}

#[test]
fn sparams_files_carry_headers_and_full_precision() {
    let (dir, summary) = run_ok("sparams", &bundled("table1.json"), &[]);
    let text = fs::read_to_string(dir.path().join("response.csv")).unwrap();
    assert!(!text.contains('\r'));
    assert!(text.ends_with('\n'));
    let (meta, header, rows) = csv(&dir.path().join("response.csv"));
    check_meta(&meta, "#", "sparams");
    assert_eq!(header[0], "f_Hz");
    assert_eq!(rows.len(), 2001);
    // d.dddddddddddddddde±x: 17 significant digits
    for cell in &rows[7] {
        let mantissa = cell.split('e').next().unwrap().trim_start_matches('-');
        assert_eq!(mantissa.replace('.', "").len(), 17, "{cell}");
    }
    let s3p = fs::read_to_string(dir.path().join("response.s3p")).unwrap();
    check_meta(s3p.lines().next().unwrap(), "!", "sparams");
    assert_eq!(s3p.lines().nth(1).unwrap(), "# Hz S RI R 50");
    for name in ["sparams.svg", "sparams_phase.svg"] {
        let svg = fs::read_to_string(dir.path().join(name)).unwrap();
        assert!(svg.contains("xmlns=\"http://www.w3.org/2000/svg\""));
        assert!(svg.contains("<desc>") && svg.contains("config_sha256="));
    }
    let on_disk = read_json(&dir.path().join("summary.json"));
    assert_eq!(on_disk["meta"]["version"], env!("CARGO_PKG_VERSION"));
    assert!(meta.contains(on_disk["meta"]["config_sha256"].as_str().unwrap()));
    let fc = summary["fc_Hz"].as_f64().unwrap();
    assert!((fc - 998_412_341.267_325_6).abs() < 1e3, "{fc}");
    assert!((summary["IL_dB"].as_f64().unwrap() - 3.343_979_412_196_644).abs() < 1e-6);
}

#[test]
fn touchstone_round_trips_against_the_model() {
    let (dir, _) = run_ok("sparams", &bundled("table1.json"), &[]);
    let (c, m) = table1_params();
    let text = fs::read_to_string(dir.path().join("response.s3p")).unwrap();
    let nums: Vec<f64> = text
        .lines()
        .filter(|l| !l.starts_with('!') && !l.starts_with('#'))
        .flat_map(|l| l.split_whitespace().map(|x| x.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect();
    // f + 9 complex entries per frequency
    assert_eq!(nums.len(), 2001 * 19);
    for rec in nums.chunks(19).step_by(97) {
        let f = rec[0];
        let full = full_s_matrix(&harmonic_s_row(&c, &m, f).unwrap(), Direction::Forward);
        for q in 0..3 {
            for p in 0..3 {
                let idx = 1 + 2 * (3 * q + p);
                let got = C64::new(rec[idx], rec[idx + 1]);
                assert!((got - full[0].s[q][p]).norm() < 1e-9, "S{}{} at {f}", q + 1, p + 1);
            }
        }
    }
}

#[test]
fn json_format_writes_rows_with_meta() {
    let (dir, _) = run_ok("sparams", &bundled("unmodulated.json"), &["--format", "json"]);
    assert!(!dir.path().join("response.csv").exists());
    let j = read_json(&dir.path().join("response.json"));
    assert_eq!(j["meta"]["verb"], "sparams");
    assert_eq!(j["rows"].as_array().unwrap().len(), 201);
    assert!(j["rows"][0]["f_Hz"].is_number());
}

#[test]
fn unmodulated_junction_is_symmetric_and_has_no_sidebands() {
    let (dir, _) = run_ok("sparams", &bundled("unmodulated.json"), &[]);
    let (_, h, rows) = csv(&dir.path().join("response.csv"));
    for part in ["re", "im"] {
        let s21 = column(&h, &rows, &format!("S21_{part}_k0"));
        let s31 = column(&h, &rows, &format!("S31_{part}_k0"));
        for (a, b) in s21.iter().zip(&s31) {
            assert!((a - b).abs() < 1e-12);
        }
        for k in ["km1", "kp1"] {
            assert!(column(&h, &rows, &format!("S21_{part}_{k}")).iter().all(|&x| x == 0.0));
        }
    }
}

#[test]
fn unknown_key_is_a_config_error() {
    let (_d, p) = inline(r#"{ "circuit": { "L_H": 3.4e-9, "C0_F": 7.67e-12, "Qq": 70 } }"#);
    let (_, out) = run("sparams", &p, &[]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Qq"));
}

#[test]
fn missing_inputs_are_config_errors() {
    // no sweep section
    let (_, out) = run("sweep", &bundled("table1.json"), &[]);
    assert_eq!(out.status.code(), Some(2));
    // both C0 and f0
    let (_d, p) = inline(
        r#"{ "circuit": { "L_H": 3.4e-9, "C0_F": 7.67e-12, "f0_Hz": 1e9 },
             "modulation": { "fm_Hz": 190e6, "dC_over_C0": 0.4 },
             "grid": { "start_Hz": 0.9e9, "stop_Hz": 1.1e9, "points": 11 } }"#,
    );
    assert_eq!(run("sparams", &p, &[]).1.status.code(), Some(2));
    // no --config at all
    assert_eq!(lptv(&["sparams"]).status.code(), Some(2));
    assert_eq!(run("sparams", &bundled("table1.json"), &["--threads", "0"]).1.status.code(), Some(2));
    let (_d, p) = inline("{ not json");
    assert_eq!(run("modnet", &p, &[]).1.status.code(), Some(2));
}

#[test]
fn zero_output_frequency_is_a_degeneracy() {
    let (_d, p) = inline(
        r#"{ "circuit": { "L_H": 3.4e-9, "C0_F": 7.67e-12, "Q": 70 },
             "modulation": { "fm_Hz": 190e6, "dC_over_C0": 0.46 },
             "grid": { "start_Hz": 180e6, "stop_Hz": 200e6, "points": 3 } }"#,
    );
    let (_, out) = run("sparams", &p, &[]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("190000000"));
}

#[test]
fn linear_compression_cannot_bracket_p1db() {
    let (_, summary) = run_ok("compress", &bundled("linear_compress.json"), &[]);
    assert_eq!(summary["P1dB_bracketed"], false);
    assert!(summary["P1dB_dBm"].is_null());
    let text = fs::read_to_string(bundled("linear_compress.json")).unwrap();
    let text = text.replace("\"f_Hz\": 1e9,", "\"f_Hz\": 1e9, \"require_p1db\": true,");
    let (_d, p) = inline(&text);
    let (dir, out) = run("compress", &p, &[]);
    assert_eq!(out.status.code(), Some(4));
    // results are still written before the failure is reported
    assert!(dir.path().join("compression.csv").exists());
}

#[test]
fn compression_annotations_match_the_summary() {
    let (dir, s) = run_ok("compress", &bundled("nonlinear.json"), &[]);
    let p1 = s["P1dB_dBm"].as_f64().unwrap();
    assert!((10.0..25.0).contains(&p1), "{p1}");
    let svg = fs::read_to_string(dir.path().join("compression.svg")).unwrap();
    assert!(svg.contains(&format!("P1dB = {} dBm", cli::output::num(p1))));
    let (meta, h, rows) = csv(&dir.path().join("compression.csv"));
    check_meta(&meta, "#", "compress");
    assert_eq!(column(&h, &rows, "pin_dBm").len(), 12);
}

#[test]
fn twotone_reports_a_slope_three_intercept() {
    let text = fs::read_to_string(bundled("nonlinear.json")).unwrap();
    let v: Value = serde_json::from_str(&text).unwrap();
    let mut v = v.as_object().unwrap().clone();
    v.remove("compress");
    v["twotone"]["pin_dBm"] = serde_json::json!([-20, -15, -10]);
    let (_d, p) = inline(&Value::Object(v).to_string());
    let (dir, s) = run_ok("twotone", &p, &[]);
    let slope = s["IM3_slope"].as_f64().unwrap();
    assert!((slope - 3.0).abs() < 0.1, "{slope}");
    // no compression section: the difference is not invented
    assert!(s["IIP3_minus_P1dB_dB"].is_null());
    let svg = fs::read_to_string(dir.path().join("twotone.svg")).unwrap();
    let iip3 = s["IIP3_dBm"].as_f64().unwrap();
    assert!(svg.contains(&format!("IIP3 = {} dBm", cli::output::num(iip3))));
}

fn small_sweep(fm_points: usize, dc_points: usize) -> String {
    format!(
        r#"{{ "circuit": {{ "L_H": 3.4e-9, "C0_F": 7.67e-12, "Q": 70 }},
             "sweep": {{ "f_eval_Hz": 1e9,
                        "fm_over_frf": {{ "start": 0.15, "stop": 0.25, "points": {fm_points} }},
                        "dC_over_C0": {{ "start": 0.4, "stop": 0.6, "points": {dc_points} }},
                        "bw_points": 101 }} }}"#
    )
}

#[test]
fn single_cell_sweep_puts_every_design_point_there() {
    let (_d, p) = inline(&small_sweep(1, 1));
    let (dir, _) = run_ok("sweep", &p, &[]);
    let j = read_json(&dir.path().join("designpoints.json"));
    for k in ["p1", "p2", "p3", "p4"] {
        assert_eq!(j["design_points"][k]["i"], 0);
        assert_eq!(j["design_points"][k]["j"], 0);
    }
    for name in ["il.svg", "rl.svg", "ix.svg", "bw.svg"] {
        assert!(dir.path().join(name).exists());
    }
}

#[test]
fn sweep_output_is_deterministic_across_runs_and_threads() {
    let (_d, p) = inline(&small_sweep(6, 5));
    let (a, _) = run_ok("sweep", &p, &[]);
    let (b, _) = run_ok("sweep", &p, &["--threads", "1"]);
    let (c, _) = run_ok("sweep", &p, &["--threads", "3"]);
    let grid = |d: &TempDir| fs::read(d.path().join("grid.csv")).unwrap();
    assert_eq!(grid(&a), grid(&b));
    assert_eq!(grid(&a), grid(&c));
    let (_, h, rows) = csv(&a.path().join("grid.csv"));
    assert_eq!(rows.len(), 30);
    assert!(column(&h, &rows, "IX_dB").iter().all(|x| x.is_finite()));
}

#[test]
fn config_hash_ignores_formatting_but_not_values() {
    let a = cli::parse(r#"{"circuit":{"L_H":3.4e-9,"C0_F":7.67e-12}}"#).unwrap();
    let b = cli::parse("{\n  \"circuit\": { \"C0_F\": 7.67e-12,\n \"L_H\": 3.4e-9 } }\n").unwrap();
    let c = cli::parse(r#"{"circuit":{"L_H":3.5e-9,"C0_F":7.67e-12}}"#).unwrap();
    assert_eq!(a.hash, b.hash);
    assert_ne!(a.hash, c.hash);
}

#[test]
fn undriven_transient_stays_at_rest() {
    let (_d, p) = inline(
        r#"{ "circuit": { "L_H": 3.4e-9, "C0_F": 7.67e-12, "Q": 70 },
             "modulation": { "fm_Hz": 190e6, "dC_over_C0": 0.46 },
             "transient": { "f_Hz": 1e9, "drive_V": 0,
                            "settle": { "periods_settle": 2, "periods_meas": 1 } } }"#,
    );
    let (dir, s) = run_ok("transient", &p, &[]);
    assert!(s["comparison_all_pass"].is_null());
    assert!(!dir.path().join("comparison.csv").exists());
    let h = read_json(&dir.path().join("harmonics.json"));
    for k in h["harmonics"].as_array().unwrap() {
        for v in k["port_voltage_V"].as_array().unwrap() {
            assert_eq!(v[0].as_f64().unwrap(), 0.0);
            assert_eq!(v[1].as_f64().unwrap(), 0.0);
        }
    }
}

#[test]
fn lossless_ringdown_conserves_energy() {
    let (dir, s) = run_ok("transient", &bundled("lossless_ringdown.json"), &[]);
    let drift = s["energy_drift"].as_f64().unwrap();
    assert!(drift < 1e-6, "{drift}");
    let (meta, h, rows) = csv(&dir.path().join("trajectory.csv"));
    check_meta(&meta, "#", "transient");
    // the only loss is the port terminations, so dissipation only grows
    let d = column(&h, &rows, "dissipated_J");
    assert!(d.windows(2).all(|w| w[1] >= w[0]));
}

#[test]
fn table1_transient_agrees_with_the_closed_form() {
    let (dir, s) = run_ok("transient", &bundled("table1.json"), &[]);
    assert_eq!(s["comparison_all_pass"], true);
    let (_, h, rows) = csv(&dir.path().join("comparison.csv"));
    assert_eq!(rows.len(), 9);
    assert!(column(&h, &rows, "delta_dB").iter().all(|x| x.abs() < 0.1));
}

#[test]
fn noisefold_separates_folded_from_in_band() {
    let (dir, s) = run_ok("noisefold", &bundled("table1.json"), &[]);
    assert_eq!(s["all_folded_zero"], false);
    let (_, h, rows) = csv(&dir.path().join("noise.csv"));
    let f = column(&h, &rows, "f_Hz");
    let inb = column(&h, &rows, "in_band_V2_per_Hz");
    let fold = column(&h, &rows, "folded_V2_per_Hz");
    let total = column(&h, &rows, "psd_rx_V2_per_Hz");
    for i in 0..f.len() {
        assert!((total[i] - inb[i] - fold[i]).abs() <= 1e-12 * total[i]);
        if (987e6..=1010.5e6).contains(&f[i]) {
            assert!(fold[i] < inb[i], "at {}", f[i]);
        }
    }
    let (_, s) = run_ok("noisefold", &bundled("unmodulated.json"), &[]);
    assert_eq!(s["all_folded_zero"], true);
}

#[test]
fn modnet_table2_and_synthesis() {
    let (dir, s) = run_ok("modnet", &bundled("table2.json"), &[]);
    let gm = s["check"]["Gm"].as_f64().unwrap();
    assert!((gm - 1.307_303_811_132_461_7).abs() < 1e-9, "{gm}");
    let syn = &s["synthesis"];
    assert_eq!(syn["kind"], "network");
    assert!((syn["Gm"].as_f64().unwrap() - 6.054_337_195_479_664).abs() < 1e-5);
    assert!(syn["residual"].as_f64().unwrap() < 1e-9);
    assert!(syn["Lm_over_L"].as_f64().unwrap() > 20.0);
    assert_eq!(read_json(&dir.path().join("modnet.json"))["meta"]["verb"], "modnet");

    let text = fs::read_to_string(bundled("table2.json")).unwrap().replace("\"Rsrc_ohm\": 50", "\"Rsrc_ohm\": 0");
    let (_d, p) = inline(&text);
    let (_, s) = run_ok("modnet", &p, &[]);
    assert_eq!(s["synthesis"]["kind"], "direct");
    assert_eq!(s["synthesis"]["Gm"], 1.0);
}

#[test]
fn seed_is_recorded_and_drives_jitter() {
    let cfg = r#"{ "circuit": { "L_H": 3.4e-9, "C0_F": 7.67e-12, "Q": 70 },
                   "modulation": { "fm_Hz": 190e6, "dC_over_C0": 0.46 },
                   "transient": { "f_Hz": 1e9, "settle": { "periods_settle": 4, "periods_meas": 2 },
                                  "jitter": { "phase_rms_rad": 0.01, "amp_rms_over_dC": 0.01,
                                              "bandwidth_Hz": 2e6, "trials": 10 } } }"#;
    let (_d, p) = inline(cfg);
    let (a, _) = run_ok("transient", &p, &["--seed", "7"]);
    let (b, _) = run_ok("transient", &p, &["--seed", "7"]);
    let (c, _) = run_ok("transient", &p, &["--seed", "8"]);
    let ix = |d: &TempDir| read_json(&d.path().join("jitter.json"))["IX_dB"].clone();
    assert_eq!(ix(&a), ix(&b));
    assert_ne!(ix(&a), ix(&c));
    assert_eq!(read_json(&a.path().join("jitter.json"))["meta"]["seed"], 7);
}
