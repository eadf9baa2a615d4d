use design::{bandwidth, frequency_response, sweep};
use serde_json::{json, Value};

use super::jnum;
use crate::output::{write_json, write_text, Cell, Table};
use crate::svg::{heatmap, Heatmap};
use crate::{CliError, Ctx, Report};

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = ctx.config.sweep()?;
    let c = ctx.config.circuit()?;
    let r = sweep(&c, &cfg)?;

    let mut table = Table::new(["fm_over_frf", "dC_over_C0", "IL_dB", "RL_dB", "IX_dB", "BW_frac"]);
    for (i, &fm) in r.fm_axis.iter().enumerate() {
        for (j, &dc) in r.dc_axis.iter().enumerate() {
            table.push(vec![
                Cell::F(fm),
                Cell::F(dc),
                Cell::F(r.il_db[i][j]),
                Cell::F(r.rl_db[i][j]),
                Cell::F(r.ix_db[i][j]),
                Cell::F(r.bw_frac[i][j]),
            ]);
        }
    }
    let mut files = vec![table.write(&ctx.out, "grid", ctx.format, &ctx.meta)?];

    let d = r.design_points;
    let named = [("p1", d.p1), ("p2", d.p2), ("p3", d.p3), ("p4", d.p4)];
    let point = |(i, j): (usize, usize)| {
        json!({
            "i": i,
            "j": j,
            "fm_over_frf": r.fm_axis[i],
            "dC_over_C0": r.dc_axis[j],
            "IL_dB": jnum(r.il_db[i][j]),
            "RL_dB": jnum(r.rl_db[i][j]),
            "IX_dB": jnum(r.ix_db[i][j]),
            "BW_frac": jnum(r.bw_frac[i][j]),
        })
    };
    let mut points = serde_json::Map::new();
    for (name, p) in named {
        points.insert(name.into(), point(p));
    }
    // Which limit sets the bandwidth at the isolation optimum.
    let m3 = r.modulation(&cfg, d.p3);
    let n = cfg.bw_points;
    let g: Vec<f64> = (0..n)
        .map(|k| cfg.f_eval * (cfg.bw_span.0 + (cfg.bw_span.1 - cfg.bw_span.0) * k as f64 / (n - 1) as f64))
        .collect();
    let p3_bands = match frequency_response(&r.circuit, &m3, &g).and_then(|resp| bandwidth(&resp, cfg.beta, cfg.gamma)) {
        Ok(b) => {
            let contains = match (b.il_band, b.ix_band) {
                (Some(il), Some(ix)) => Value::Bool(il.0 <= ix.0 && il.1 >= ix.1),
                _ => Value::Null,
            };
            json!({
                "il_band_Hz": b.il_band.map(|x| [x.0, x.1]),
                "ix_band_Hz": b.ix_band.map(|x| [x.0, x.1]),
                "il_band_contains_ix_band": contains,
            })
        }
        Err(e) => json!({ "error": e.to_string() }),
    };
    let summary = json!({
        "f_eval_Hz": cfg.f_eval,
        "C0_F": r.circuit.c0,
        "retune_C0": cfg.retune_c0,
        "cells": [r.fm_axis.len(), r.dc_axis.len()],
        "design_points": points,
        "p3_bands": p3_bands,
    });
    files.push(write_json(&ctx.out, "designpoints.json", &ctx.meta, summary.clone())?);

    let markers: Vec<(usize, usize, String)> = named.iter().map(|(n, p)| (p.0, p.1, n.to_string())).collect();
    for (stem, title, z) in [
        ("il", "Insertion loss (dB)", &r.il_db),
        ("rl", "Return loss S11 (dB)", &r.rl_db),
        ("ix", "Isolation (dB)", &r.ix_db),
        ("bw", "Fractional bandwidth", &r.bw_frac),
    ] {
        let h = Heatmap {
            title,
            x_label: "fm / frf",
            y_label: "ΔC / C0",
            x: &r.fm_axis,
            y: &r.dc_axis,
            z,
            markers: markers.clone(),
        };
        files.push(write_text(&ctx.out, &format!("{stem}.svg"), &heatmap(&ctx.meta, &h))?);
    }
    Ok(Report { files, summary })
}
