use noise::noise_fold;
use serde_json::json;

use super::jnum;
use crate::output::{write_json, write_text, Cell, Table};
use crate::svg::{line_plot, LinePlot, Series};
use crate::{CliError, Ctx, Report};

/// Power spectral density in dBm/Hz of a voltage PSD referred to z0.
fn dbm_hz(psd: f64, z0: f64) -> f64 {
    10.0 * (psd / z0 / 1e-3).log10()
}

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let nc = cfg.section(&cfg.noise, "noise")?;
    let c = cfg.circuit()?;
    let m = cfg.modulation()?;
    let grid = cfg.grid()?;
    let (ant, tx) = nc.specs()?;
    let rows = noise_fold(&c, &m, &ant, &tx, &grid)?;

    let mut table = Table::new([
        "f_Hz",
        "psd_rx_V2_per_Hz",
        "in_band_V2_per_Hz",
        "folded_V2_per_Hz",
        "psd_rx_dBm_per_Hz",
        "folded_over_in_band",
    ]);
    for r in &rows {
        table.push(
            [r.f, r.psd_rx, r.in_band, r.folded, dbm_hz(r.psd_rx, c.z0), r.folded / r.in_band]
                .map(Cell::F)
                .to_vec(),
        );
    }
    let mut files = vec![table.write(&ctx.out, "noise", ctx.format, &ctx.meta)?];
    let max_ratio = rows
        .iter()
        .map(|r| r.folded / r.in_band)
        .filter(|x| x.is_finite())
        .fold(f64::NEG_INFINITY, f64::max);
    let summary = json!({
        "points": rows.len(),
        "max_folded_over_in_band": jnum(max_ratio),
        "all_folded_zero": rows.iter().all(|r| r.folded == 0.0),
    });
    files.push(write_json(&ctx.out, "noise_summary.json", &ctx.meta, summary.clone())?);
    let ghz: Vec<f64> = grid.iter().map(|f| f / 1e9).collect();
    let plot = LinePlot {
        title: "Receive-port noise".into(),
        x_label: "f (GHz)".into(),
        y_label: "PSD (dBm/Hz)".into(),
        series: vec![
            Series {
                label: "total".into(),
                x: ghz.clone(),
                y: rows.iter().map(|r| dbm_hz(r.psd_rx, c.z0)).collect(),
            },
            Series {
                label: "in-band".into(),
                x: ghz.clone(),
                y: rows.iter().map(|r| dbm_hz(r.in_band, c.z0)).collect(),
            },
            Series {
                label: "folded".into(),
                x: ghz,
                y: rows.iter().map(|r| dbm_hz(r.folded, c.z0)).collect(),
            },
        ],
        notes: vec![format!("max folded/in-band = {max_ratio:.4}")],
    };
    files.push(write_text(&ctx.out, "noise.svg", &line_plot(&ctx.meta, &plot))?);
    Ok(Report { files, summary })
}
