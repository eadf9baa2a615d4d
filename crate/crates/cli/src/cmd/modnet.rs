use design::{max_gain_residual, mod_network_gain_q, synthesize_mod_network_q, Synthesis};
use serde_json::{json, Value};

use super::jnum;
use crate::output::write_json;
use crate::{CliError, Ctx, Report};

pub fn run(ctx: &Ctx) -> Result<Report, CliError> {
    let cfg = &ctx.config;
    let n = cfg.section(&cfg.modnet, "modnet")?;
    let fm = match (n.fm, &cfg.modulation) {
        (Some(f), _) => f,
        (None, Some(m)) => m.fm,
        (None, None) => return Err(CliError::Config("modnet.fm_Hz or modulation.fm_Hz is required".into())),
    };
    let l = match (n.l, &cfg.circuit) {
        (Some(l), _) => l,
        (None, Some(c)) => c.l,
        (None, None) => return Err(CliError::Config("modnet.L_H or circuit.L_H is required".into())),
    };
    let synthesis = match synthesize_mod_network_q(n.ck, n.rsrc, fm, l, n.qk)? {
        Synthesis::Direct => json!({ "kind": "direct", "Gm": 1.0 }),
        Synthesis::Network(net) => json!({
            "kind": "network",
            "Lm_H": net.lm,
            "Cm_F": net.cm,
            "Gm": net.gm,
            "Lm_over_L": net.lm / l,
            "residual": jnum(max_gain_residual(net.lm, net.cm, n.ck, n.rsrc, fm, n.qk)),
        }),
    };
    let check = match &n.check {
        Some(k) => json!({
            "Lm_H": k.lm,
            "Cm_F": k.cm,
            "Gm": mod_network_gain_q(k.lm, k.cm, n.ck, n.rsrc, fm, n.qk)?,
        }),
        None => Value::Null,
    };
    let summary = json!({
        "inputs": { "Ck_F": n.ck, "Rsrc_ohm": n.rsrc, "fm_Hz": fm, "L_H": l, "Qk": n.qk },
        "synthesis": synthesis,
        "check": check,
    });
    let files = vec![write_json(&ctx.out, "modnet.json", &ctx.meta, summary.clone())?];
    Ok(Report { files, summary })
}
