use design::{bandwidth, frequency_response, metrics_at, refine_center};
use lptv_core::{full_s_matrix, harmonic_s_row, Complex64 as C64, KS};
use serde_json::json;

use super::{db, jnum, jopt};
use crate::output::{touchstone, write_json, write_text, Cell, Table};
use crate::svg::{line_plot, LinePlot, Series};
use crate::{CliError, Ctx, Report};

fn ktag(k: i32) -> &'static str {
    match k {
        -1 => "km1",
        0 => "k0",
        _ => "kp1",
    }
}

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let c = cfg.circuit()?;
    let m = cfg.modulation()?;
    let grid = cfg.grid()?;
    let (beta, gamma) = cfg.beta_gamma();
    let resp = frequency_response(&c, &m, &grid)?;

    let mut cols = vec!["f_Hz".to_string()];
    for k in KS {
        for s in ["S11", "S21", "S31"] {
            cols.push(format!("{s}_re_{}", ktag(k)));
            cols.push(format!("{s}_im_{}", ktag(k)));
        }
    }
    cols.extend(
        ["IL_dB", "RL_dB", "IX_dB", "Zin_re_ohm", "Zin_im_ohm", "tau_g_s", "IM_km1_dBc", "IM_kp1_dBc"]
            .map(String::from),
    );
    let mut table = Table::new(cols);
    let mut ts = Vec::with_capacity(grid.len());
    for row in &resp.rows {
        // Any degenerate point aborts with the offending frequency.
        let r = row.as_ref().map_err(|e| CliError::from(e.clone()))?;
        let h = harmonic_s_row(&c, &m, r.f)?;
        let mut cells = vec![Cell::F(r.f)];
        for k in KS {
            for z in [h[k].s11, h[k].s21, h[k].s31] {
                cells.push(Cell::F(z.re));
                cells.push(Cell::F(z.im));
            }
        }
        let zin = r.zin.unwrap_or(C64::new(f64::NAN, f64::NAN));
        cells.extend(
            [r.il_db, r.rl_db, r.ix_db, zin.re, zin.im, r.tau_g.unwrap_or(f64::NAN), r.im_dbc[0], r.im_dbc[1]]
                .map(Cell::F),
        );
        table.push(cells);
        ts.push((r.f, full_s_matrix(&h, m.direction)[0].s));
    }
    let mut files = vec![table.write(&ctx.out, "response", ctx.format, &ctx.meta)?];
    files.push(write_text(&ctx.out, "response.s3p", &touchstone(&ctx.meta, c.z0, &ts))?);

    // Summary at the refined isolation maximum.
    let ic = resp.center().ok_or_else(|| CliError::Experiment("no valid frequency rows".into()))?;
    let fc = if ic > 0 && ic + 1 < grid.len() {
        refine_center(&c, &m, grid[ic - 1], grid[ic + 1])?
    } else {
        grid[ic]
    };
    let at = metrics_at(&c, &m, fc)?;
    let bw = bandwidth(&resp, beta, gamma);
    let bw_json = match &bw {
        Ok(b) => json!({
            "abs_Hz": jnum(b.abs_hz),
            "frac": jnum(b.frac),
            "grid_fc_Hz": jnum(b.fc),
            "il_band_Hz": b.il_band.map(|x| [x.0, x.1]),
            "ix_band_Hz": b.ix_band.map(|x| [x.0, x.1]),
            "limited_by": b.limited_by.map(|l| format!("{l:?}")),
            "flag": b.flag.map(|f| format!("{f:?}")),
        }),
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = json!({
        "fc_Hz": jnum(fc),
        "fc_on_grid_edge": ic == 0 || ic + 1 == grid.len(),
        "IL_dB": jnum(at.il_db),
        "RL_dB": jnum(at.rl_db),
        "IX_dB": jnum(at.ix_db),
        "IM_km1_dBc": jnum(at.im_dbc[0]),
        "IM_kp1_dBc": jnum(at.im_dbc[1]),
        "tau_g_s": jopt(at.tau_g),
        "beta_dB": beta,
        "gamma_dB": gamma,
        "bandwidth": bw_json,
    });
    files.push(write_json(&ctx.out, "summary.json", &ctx.meta, summary.clone())?);

    let ghz: Vec<f64> = grid.iter().map(|f| f / 1e9).collect();
    let k0: Vec<[C64; 3]> = resp
        .rows
        .iter()
        .map(|r| {
            let r = r.as_ref().unwrap();
            [r.s11, r.s21, r.s31]
        })
        .collect();
    let series = |name: &str, q: usize, f: fn(C64) -> f64| Series {
        label: name.into(),
        x: ghz.clone(),
        y: k0.iter().map(|s| f(s[q])).collect(),
    };
    let notes = vec![
        format!("fc = {:.6} GHz", fc / 1e9),
        format!("IL = {:.3} dB", at.il_db),
        format!("RL = {:.3} dB", at.rl_db),
        format!("IX = {:.2} dB", at.ix_db),
        match &bw {
            Ok(b) => format!("BW = {:.3} %", 100.0 * b.frac),
            Err(_) => "BW not covered".into(),
        },
    ];
    let mag = LinePlot {
        title: "Harmonic S-parameters, k = 0".into(),
        x_label: "f (GHz)".into(),
        y_label: "|S| (dB)".into(),
        series: vec![
            series("|S11|", 0, |z| db(z.norm())),
            series("|S21|", 1, |z| db(z.norm())),
            series("|S31|", 2, |z| db(z.norm())),
        ],
        notes: notes.clone(),
    };
    files.push(write_text(&ctx.out, "sparams.svg", &line_plot(&ctx.meta, &mag))?);
    let phase = LinePlot {
        title: "Harmonic S-parameter phase, k = 0".into(),
        x_label: "f (GHz)".into(),
        y_label: "phase (deg)".into(),
        series: vec![
            series("∠S11", 0, |z| z.arg().to_degrees()),
            series("∠S21", 1, |z| z.arg().to_degrees()),
            series("∠S31", 2, |z| z.arg().to_degrees()),
        ],
        notes,
    };
    files.push(write_text(&ctx.out, "sparams_phase.svg", &line_plot(&ctx.meta, &phase))?);
    Ok(Report { files, summary })
}
