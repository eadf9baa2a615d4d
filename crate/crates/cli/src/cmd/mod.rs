pub mod compress;
pub mod modnet;
pub mod noisefold;
pub mod sparams;
pub mod sweep;
pub mod transient;
pub mod twotone;

use serde_json::Value;

/// JSON number, or null for NaN/∞.
pub(crate) fn jnum(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

pub(crate) fn jopt(x: Option<f64>) -> Value {
    x.map_or(Value::Null, jnum)
}

pub(crate) fn db(x: f64) -> f64 {
    20.0 * x.log10()
}
