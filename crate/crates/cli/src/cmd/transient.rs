use lptv_core::{full_s_matrix, harmonic_s_row, Complex64 as C64, KS};
use serde_json::{json, Value};
use time_sim::{
    assemble_system, integrate, jittered_isolation, probe_amplitude, samples_per_base, steady_state_harmonics,
    DriveSpec, JitterSpec, Tone,
};

use super::{db, jnum};
use crate::config::SettleCfg;
use crate::output::{write_json, Cell, Table};
use crate::{CliError, Ctx, Report};

/// Magnitude (dB) and phase (°) tolerances of the closed-form comparison,
/// applied to entries above the floor.
const CMP_DB: f64 = 0.1;
const CMP_DEG: f64 = 1.0;
const CMP_FLOOR_DB: f64 = -80.0;

fn cjson(z: C64) -> Value {
    json!([jnum(z.re), jnum(z.im)])
}

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let t = cfg.section(&cfg.transient, "transient")?;
    let c = cfg.circuit()?;
    let m = cfg.modulation()?;
    let var = cfg.varactor()?;
    if !(1..=3).contains(&t.input_port) {
        return Err(CliError::Config(format!("transient.input_port must be 1..=3, got {}", t.input_port)));
    }
    let amp = t.drive.unwrap_or_else(|| probe_amplitude(&c, &m, var.as_ref()));
    if !(amp >= 0.0 && amp.is_finite()) {
        return Err(CliError::Config("transient.drive_V must be nonnegative".into()));
    }
    let drive = DriveSpec::new(
        vec![Tone {
            port: t.input_port,
            freq: t.f,
            amp,
            phase: 0.0,
        }],
        m,
    );
    let sys = assemble_system(&c, &drive, var.as_ref())?;
    let opts = SettleCfg::extract(&t.settle, if var.is_some() { 5 } else { 1 });
    let fs = sys.snap.snapped(t.f);
    let fm = sys.snap.snapped(m.fm);
    let outs: Vec<f64> = KS.iter().map(|&k| fs + k as f64 * fm).collect();
    if outs.iter().any(|o| o.abs() < 0.5 * sys.snap.fb) {
        return Err(CliError::Config("an output harmonic falls on DC; choose f ≠ fm".into()));
    }
    let probe: Vec<f64> = outs.iter().map(|o| o.abs()).collect();
    let n = samples_per_base(&sys, &probe, opts.content_order);
    let periods = opts.n_settle + opts.n_meas;
    let traj = integrate(&sys, t.initial_state, periods as f64 / sys.snap.fb, n, opts.tol)?;
    // An undriven run is a ring-down; there is no steady state to wait for.
    let settle_tol = if amp == 0.0 { f64::INFINITY } else { opts.settle_tol };
    let h = steady_state_harmonics(&traj, &probe, opts.n_meas, settle_tol)?;

    let mut traj_table = Table::new([
        "t_s", "v1_V", "v2_V", "v3_V", "iL1_A", "iL2_A", "iL3_A", "vp1_V", "vp2_V", "vp3_V", "ip1_A", "ip2_A",
        "ip3_A", "stored_J", "dissipated_J",
    ]);
    let keep = (t.trajectory_periods as usize * n + 1).min(traj.times.len());
    for i in traj.times.len() - keep..traj.times.len() {
        let mut row = vec![Cell::F(traj.times[i])];
        for arr in [&traj.v[i], &traj.il[i], &traj.port_voltages[i], &traj.port_currents[i]] {
            row.extend(arr.iter().map(|&x| Cell::F(x)));
        }
        row.push(Cell::F(traj.stored[i]));
        row.push(Cell::F(traj.dissipated[i]));
        traj_table.push(row);
    }
    let mut files = vec![traj_table.write(&ctx.out, "trajectory", ctx.format, &ctx.meta)?];

    // Energy bookkeeping is only closed without drive, loss or modulation.
    let e0 = traj.stored[0];
    let energy_drift = (amp == 0.0 && c.q.is_infinite() && m.dc == 0.0 && var.is_none() && e0 > 0.0).then(|| {
        traj.stored
            .iter()
            .zip(&traj.dissipated)
            .map(|(s, d)| ((s + d - e0) / e0).abs())
            .fold(0.0, f64::max)
    });

    // Closed-form comparison; meaningful only for a small-signal drive.
    let incident = amp / 2.0;
    let mut cmp = Table::new([
        "k", "out_port", "cf_re", "cf_im", "td_re", "td_im", "cf_dB", "td_dB", "delta_dB", "delta_deg", "checked",
        "pass",
    ]);
    let mut all_pass = Value::Null;
    if amp > 0.0 {
        let full = full_s_matrix(&harmonic_s_row(&c, &m, fs)?, m.direction);
        let mut ok = true;
        for (i, &k) in KS.iter().enumerate() {
            for q in 0..3 {
                let mut v = h.port_voltage[i][q];
                if outs[i] < 0.0 {
                    v = v.conj();
                }
                if k == 0 && q + 1 == t.input_port {
                    v -= incident;
                }
                let td = v / incident;
                let cf = full[k].s[q][t.input_port - 1];
                let (dcf, dtd) = (db(cf.norm()), db(td.norm()));
                let ddeg = (td / cf).arg().to_degrees();
                let checked = dcf > CMP_FLOOR_DB;
                let pass = !checked || ((dtd - dcf).abs() < CMP_DB && ddeg.abs() < CMP_DEG);
                ok &= pass;
                cmp.push(vec![
                    Cell::I(k as i64),
                    Cell::I(q as i64 + 1),
                    Cell::F(cf.re),
                    Cell::F(cf.im),
                    Cell::F(td.re),
                    Cell::F(td.im),
                    Cell::F(dcf),
                    Cell::F(dtd),
                    Cell::F(dtd - dcf),
                    Cell::F(ddeg),
                    Cell::B(checked),
                    Cell::B(pass),
                ]);
            }
        }
        all_pass = Value::Bool(ok);
        files.push(cmp.write(&ctx.out, "comparison", ctx.format, &ctx.meta)?);
    }

    let harmonics: Vec<Value> = KS
        .iter()
        .enumerate()
        .map(|(i, &k)| {
            json!({
                "k": k,
                "output_freq_Hz": outs[i],
                "port_voltage_V": h.port_voltage[i].iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
                "tank_voltage_V": h.tank[i].iter().map(|&z| cjson(z)).collect::<Vec<_>>(),
            })
        })
        .collect();
    let mut summary = json!({
        "f_Hz": fs,
        "fb_Hz": sys.snap.fb,
        "samples_per_base": n,
        "periods": periods,
        "drive_V": amp,
        "settle_change": h.change,
        "energy_drift": energy_drift.map(jnum),
        "comparison_all_pass": all_pass,
        "stats": format!("{:?}", traj.stats),
    });
    files.push(write_json(
        &ctx.out,
        "harmonics.json",
        &ctx.meta,
        json!({ "summary": summary.clone(), "harmonics": harmonics }),
    )?);

    if let Some(j) = &t.jitter {
        let spec = JitterSpec {
            phase_rms: j.phase_rms,
            amp_rms: j.amp_rms_over_dc * m.dc,
            bandwidth: j.bandwidth,
            seed: ctx.seed,
        };
        let r = jittered_isolation(&c, &m, &spec, t.f, j.trials, &opts)?;
        let body = json!({
            "trials": j.trials,
            "failures": r.failures,
            "IX_dB": r.ix_db.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
            "IL_dB": r.il_db.iter().map(|&x| jnum(x)).collect::<Vec<_>>(),
            "mean_IX_dB": jnum(r.mean_ix_db),
            "std_IX_dB": jnum(r.std_ix_db),
            "mean_IL_dB": jnum(r.mean_il_db),
            "std_IL_dB": jnum(r.std_il_db),
        });
        summary["jitter"] = json!({ "mean_IX_dB": jnum(r.mean_ix_db), "std_IX_dB": jnum(r.std_ix_db) });
        files.push(write_json(&ctx.out, "jitter.json", &ctx.meta, body)?);
    }
    Ok(Report { files, summary })
}
