use crate::metrics::{MetricsRow, Response};
use crate::DesignError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Limit {
    Isolation,
    InsertionLoss,
}

/// Why a bandwidth came out as zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BandwidthFlag {
    /// IL ≥ β already at the isolation maximum.
    NoTransmission,
    /// IX ≤ γ everywhere, including the isolation maximum.
    NoIsolation,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth {
    pub fc: f64,
    /// min(width of the IL < β band, width of the IX > γ band), both taken
    /// as the contiguous interval around fc.
    pub abs_hz: f64,
    pub frac: f64,
    pub il_band: Option<(f64, f64)>,
    pub ix_band: Option<(f64, f64)>,
    pub limited_by: Option<Limit>,
    pub flag: Option<BandwidthFlag>,
}

/// Walks outward from `ic` while `ok` holds and interpolates the crossing of
/// `value` through `level` between the last passing and first failing row.
fn band(
    resp: &Response,
    ic: usize,
    value: impl Fn(&MetricsRow) -> f64,
    level: f64,
    ok: impl Fn(f64) -> bool,
    which: &'static str,
) -> Result<Option<(f64, f64)>, DesignError> {
    let pass = |i: usize| resp.rows[i].as_ref().ok().map(&value).filter(|v| ok(*v));
    if pass(ic).is_none() {
        return Ok(None);
    }
    let n = resp.rows.len();
    let edge = |inside: usize, outside: usize| -> f64 {
        let a = resp.rows[inside].as_ref().unwrap();
        match &resp.rows[outside] {
            Ok(b) => {
                let (va, vb) = (value(a), value(b));
                if va.is_finite() && vb.is_finite() && va != vb {
                    a.f + (level - va) / (vb - va) * (b.f - a.f)
                } else {
                    a.f
                }
            }
            Err(_) => a.f,
        }
    };
    let mut lo = ic;
    while lo > 0 && pass(lo - 1).is_some() {
        lo -= 1;
    }
    let mut hi = ic;
    while hi + 1 < n && pass(hi + 1).is_some() {
        hi += 1;
    }
    if lo == 0 || hi == n - 1 {
        let i = if lo == 0 { 0 } else { n - 1 };
        return Err(DesignError::BandNotCovered {
            which,
            edge: resp.rows[i].as_ref().unwrap().f,
        });
    }
    Ok(Some((edge(lo, lo - 1), edge(hi, hi + 1))))
}

/// Bandwidth around the isolation maximum fc: the narrower of the band where
/// IL < β and the band where IX > γ.
pub fn bandwidth(resp: &Response, beta: f64, gamma: f64) -> Result<Bandwidth, DesignError> {
    let ic = resp
        .center()
        .ok_or_else(|| DesignError::InvalidGrid("no valid rows in the response".into()))?;
    let fc = resp.rows[ic].as_ref().unwrap().f;
    if ic == 0 || ic == resp.rows.len() - 1 {
        return Err(DesignError::CenterNotBracketed { fc });
    }
    let ix_band = band(resp, ic, |r| r.ix_db, gamma, |v| v > gamma, "isolation");
    let il_band = band(resp, ic, |r| r.il_db, beta, |v| v < beta, "insertion-loss");
    // A zero bandwidth is a flagged result, not an error, even if the other
    // band runs off the grid.
    let (il_band, ix_band) = match (il_band, ix_band) {
        (il, Ok(None)) => (il.ok().flatten(), None),
        (Ok(None), ix) => (None, ix.ok().flatten()),
        (il, ix) => (il?, ix?),
    };
    let width = |b: Option<(f64, f64)>| b.map_or(0.0, |(l, h)| h - l);
    let (wi, wx) = (width(il_band), width(ix_band));
    let flag = if ix_band.is_none() {
        Some(BandwidthFlag::NoIsolation)
    } else if il_band.is_none() {
        Some(BandwidthFlag::NoTransmission)
    } else {
        None
    };
    let limited_by = flag.is_none().then(|| if wx <= wi { Limit::Isolation } else { Limit::InsertionLoss });
    let abs_hz = if flag.is_some() { 0.0 } else { wi.min(wx) };
    Ok(Bandwidth {
        fc,
        abs_hz,
        frac: abs_hz / fc,
        il_band,
        ix_band,
        limited_by,
        flag,
    })
}
