use serde_json::{json, Value};
use time_sim::two_tone_test;

use super::compress::{annotate, simulate};
use super::{jnum, jopt};
use crate::config::SettleCfg;
use crate::output::{write_json, write_text, Cell, Table};
use crate::svg::{line_plot, LinePlot, Series};
use crate::{CliError, Ctx, Report};

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let t = cfg.section(&cfg.twotone, "twotone")?;
    let c = cfg.circuit()?;
    let m = cfg.modulation()?;
    let var = cfg.varactor()?;
    let opts = SettleCfg::extract(&t.settle, 5);
    let r = two_tone_test(&c, &m, var.as_ref(), t.f1, t.f2, &t.pin, t.n_fit, &opts)?;

    let mut table = Table::new(["pin_dBm", "pout_fund_dBm", "pout_im3_dBm", "clip"]);
    for p in &r.points {
        table.push(vec![Cell::F(p.pin_dbm), Cell::F(p.pout_fund_dbm), Cell::F(p.pout_im3_dbm), Cell::B(p.clip)]);
    }
    let mut files = vec![table.write(&ctx.out, "twotone", ctx.format, &ctx.meta)?];

    let iip3 = r.iip3_dbm.is_finite().then_some(r.iip3_dbm);
    // IIP3 − P1dB from the simulation itself, when a compression run is configured.
    let p1db = match &cfg.compress {
        Some(k) => simulate(ctx, k)?.p1db_dbm,
        None => None,
    };
    let summary = json!({
        "f1_Hz": t.f1,
        "f2_Hz": t.f2,
        "IIP3_dBm": jopt(iip3),
        "intercept": if iip3.is_some() { "finite" } else { "none (IM3 below numeric floor)" },
        "IM3_slope": jopt(r.im3_slope),
        "fund_slope": jnum(r.fund_slope),
        "n_fit": r.n_fit,
        "P1dB_dBm": jopt(p1db),
        "IIP3_minus_P1dB_dB": match (iip3, p1db) {
            (Some(a), Some(b)) => jnum(a - b),
            _ => Value::Null,
        },
    });
    files.push(write_json(&ctx.out, "twotone_summary.json", &ctx.meta, summary.clone())?);

    let pin: Vec<f64> = r.points.iter().map(|p| p.pin_dbm).collect();
    let mut series = vec![
        Series {
            label: "fundamental".into(),
            x: pin.clone(),
            y: r.points.iter().map(|p| p.pout_fund_dbm).collect(),
        },
        Series {
            label: "IM3".into(),
            x: pin.clone(),
            y: r.points.iter().map(|p| p.pout_im3_dbm).collect(),
        },
    ];
    if let Some(ip) = iip3 {
        // Fitted 1:1 and 3:1 asymptotes meeting at the intercept.
        let p0 = &r.points[0];
        let oip3 = p0.pout_fund_dbm + (ip - p0.pin_dbm);
        let xs = vec![pin[0], ip];
        series.push(Series {
            label: "1:1 fit".into(),
            x: xs.clone(),
            y: xs.iter().map(|x| oip3 - (ip - x)).collect(),
        });
        series.push(Series {
            label: "3:1 fit".into(),
            x: xs.clone(),
            y: xs.iter().map(|x| oip3 - 3.0 * (ip - x)).collect(),
        });
    }
    let plot = LinePlot {
        title: "Two-tone intermodulation".into(),
        x_label: "Pin per tone (dBm)".into(),
        y_label: "Pout (dBm)".into(),
        series,
        notes: vec![
            annotate("IIP3", iip3),
            match r.im3_slope {
                Some(s) => format!("IM3 slope = {s:.4}"),
                None => "IM3 below floor".into(),
            },
        ],
    };
    files.push(write_text(&ctx.out, "twotone.svg", &line_plot(&ctx.meta, &plot))?);
    if t.require_intercept && iip3.is_none() {
        return Err(CliError::Experiment("no finite IIP3: IM3 stays below the numeric floor".into()));
    }
    Ok(Report { files, summary })
}
