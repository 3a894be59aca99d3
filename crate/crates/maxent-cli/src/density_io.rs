//! JSON persistence for calibrated densities.
//!
//! The schema is three parallel arrays:
//!
//! ```json
//! {
//!   "breakpoints": [0.0e0, 1.0e2],
//!   "log_alpha": [-4.6e0, -3.5e0],
//!   "beta": [-1.2e-2, -2.4e-2]
//! }
//! ```
//!
//! Numbers are written with 17 significant digits, enough to reconstruct
//! every IEEE-754 double exactly, so write → read is lossless.

use maxent_core::PiecewiseExpDensity;
use serde::Deserialize;

/// 17 significant digits; round-trips any finite double.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn to_json(d: &PiecewiseExpDensity) -> String {
    let arr = |v: &[f64]| v.iter().map(|x| fmt17(*x)).collect::<Vec<_>>().join(", ");
    format!(
        "{{\n  \"breakpoints\": [{}],\n  \"log_alpha\": [{}],\n  \"beta\": [{}]\n}}\n",
        arr(d.breakpoints()),
        arr(d.log_alpha()),
        arr(d.beta())
    )
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDensity {
    breakpoints: Vec<f64>,
    log_alpha: Vec<f64>,
    beta: Vec<f64>,
}

/// Parse and validate. The error is a human-readable description of the
/// first structural defect; validation runs before construction because the
/// constructor treats malformed parameters as a programming error.
pub fn from_json(text: &str) -> Result<PiecewiseExpDensity, String> {
    let raw: RawDensity = serde_json::from_str(text).map_err(|e| format!("density JSON: {e}"))?;
    if raw.breakpoints.is_empty() {
        return Err("density needs at least one segment".into());
    }
    if raw.breakpoints.len() != raw.log_alpha.len() || raw.breakpoints.len() != raw.beta.len() {
        return Err(format!(
            "array lengths differ: {} breakpoints, {} log_alpha, {} beta",
            raw.breakpoints.len(),
            raw.log_alpha.len(),
            raw.beta.len()
        ));
    }
    if raw.breakpoints[0] != 0.0 {
        return Err(format!(
            "first breakpoint must be 0 (the support starts there), got {}",
            raw.breakpoints[0]
        ));
    }
    if let Some(w) = raw.breakpoints.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(format!(
            "breakpoints must increase strictly: {} is not below {}",
            w[0], w[1]
        ));
    }
    if raw
        .breakpoints
        .iter()
        .chain(&raw.log_alpha)
        .chain(&raw.beta)
        .any(|v| !v.is_finite())
    {
        return Err("all density parameters must be finite".into());
    }
    let last = *raw.beta.last().unwrap();
    if !(last < 0.0) {
        return Err(format!(
            "last slope must be negative for the density to integrate, got {last}"
        ));
    }
    Ok(PiecewiseExpDensity::from_parts(
        raw.breakpoints,
        raw.log_alpha,
        raw.beta,
    ))
}
