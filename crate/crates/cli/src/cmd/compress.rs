use serde_json::json;
use time_sim::{compression_sweep, CompressionOptions, CompressionResult};

use super::{jnum, jopt};
use crate::config::{CompressCfg, SettleCfg};
use crate::output::{num, write_json, write_text, Cell, Table};
use crate::svg::{line_plot, LinePlot, Series};
use crate::{CliError, Ctx, Report};

pub(crate) fn simulate(ctx: &Ctx, k: &CompressCfg) -> Result<CompressionResult, CliError> {
    let cfg = &ctx.config;
    let c = cfg.circuit()?;
    let m = cfg.modulation()?;
    let var = cfg.varactor()?;
    let opts = CompressionOptions {
        x_db: k.x,
        sigma_db: k.sigma,
        extract: SettleCfg::extract(&k.settle, 5),
    };
    Ok(compression_sweep(&c, &m, var.as_ref(), k.f, &k.pin, &opts)?)
}

/// Annotation text; values are printed in full so they match the summary exactly.
pub(crate) fn annotate(name: &str, v: Option<f64>) -> String {
    match v {
        Some(x) => format!("{name} = {} dBm", num(x)),
        None => format!("{name}: not bracketed"),
    }
}

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let k = ctx.config.section(&ctx.config.compress, "compress")?;
    let r = simulate(ctx, k)?;
    let mut table = Table::new(["pin_dBm", "pout_dBm", "gain_dB", "IX_dB", "clip", "clip_margin_V"]);
    for p in &r.points {
        table.push(vec![
            Cell::F(p.pin_dbm),
            Cell::F(p.pout_dbm),
            Cell::F(p.gain_db),
            Cell::F(p.ix_db),
            Cell::B(p.clip),
            Cell::F(p.clip_margin.unwrap_or(f64::NAN)),
        ]);
    }
    let mut files = vec![table.write(&ctx.out, "compression", ctx.format, &ctx.meta)?];
    let summary = json!({
        "f_Hz": k.f,
        "small_signal_gain_dB": jnum(r.small_signal_gain_db),
        "P1dB_dBm": jopt(r.p1db_dbm),
        "P1dB_bracketed": r.p1db_dbm.is_some(),
        "Pix_dBm": jopt(r.pix_dbm),
        "Pmax_dBm": jopt(r.pmax_dbm),
        "x_dB": k.x,
        "sigma_dB": k.sigma,
        "clipped_points": r.points.iter().filter(|p| p.clip).count(),
    });
    files.push(write_json(&ctx.out, "compression_summary.json", &ctx.meta, summary.clone())?);
    let pin: Vec<f64> = r.points.iter().map(|p| p.pin_dbm).collect();
    let plot = LinePlot {
        title: "Large-signal compression".into(),
        x_label: "Pin (dBm)".into(),
        y_label: "dBm / dB".into(),
        series: vec![
            Series {
                label: "Pout (dBm)".into(),
                x: pin.clone(),
                y: r.points.iter().map(|p| p.pout_dbm).collect(),
            },
            Series {
                label: "gain (dB)".into(),
                x: pin.clone(),
                y: r.points.iter().map(|p| p.gain_db).collect(),
            },
            Series {
                label: "IX (dB)".into(),
                x: pin,
                y: r.points.iter().map(|p| p.ix_db).collect(),
            },
        ],
        notes: vec![
            annotate("P1dB", r.p1db_dbm),
            annotate("Pix", r.pix_dbm),
            annotate("Pmax", r.pmax_dbm),
        ],
    };
    files.push(write_text(&ctx.out, "compression.svg", &line_plot(&ctx.meta, &plot))?);
    if k.require_p1db && r.p1db_dbm.is_none() {
        return Err(CliError::Experiment(format!(
            "P1dB not bracketed by the power grid (results written to {})",
            ctx.out.display()
        )));
    }
    Ok(Report { files, summary })
}
