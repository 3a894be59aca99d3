//! Convergence-study tables: calibrate strike subsets of one quote file by
//! several methods and compare each against the entropy maximizer on the
//! same subset.

use clap::ValueEnum;
use maxent_core::density::{build_density, relative_entropy};
use maxent_core::market::{ccs_digitals, EndpointRule};
use maxent_core::{solve_buchen_kelly, DigitalVector, MarketSlice, SolverConfig};

use crate::quotes::QuoteFile;
use crate::{bs, calibration_error, CliError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Method {
    /// Damped Newton maximization of the entropy surface.
    Bk,
    /// Centered call-spread digitals, no iteration.
    Ccs,
    /// Flat Black-Scholes digitals (needs --sigma and a numeric maturity).
    Bs,
}

impl Method {
    fn tag(self) -> &'static str {
        match self {
            Method::Bk => "BK",
            Method::Ccs => "CCS",
            Method::Bs => "BS",
        }
    }
}

/// How the centered-spread method fills the two endpoint digitals, where no
/// centered difference exists.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Endpoints {
    /// Borrow the entropy maximizer's endpoint values (the comparison then
    /// isolates the interior interpolation error).
    Bk,
    /// Midpoints of the arbitrage rectangle.
    Midpoint,
}

pub struct StudyConfig {
    pub methods: Vec<Method>,
    pub endpoints: Endpoints,
    pub sigma: Option<f64>,
    pub grad_tol: f64,
    pub max_iter: usize,
}

/// Parse `--subsets "0,8,16;0,4,8,12,16"` into index lists over `n` strikes.
pub fn parse_subsets(text: &str, n: usize) -> Result<Vec<Vec<usize>>, String> {
    let mut subsets = Vec::new();
    for part in text.split(';') {
        let part = part.trim();
        if part.is_empty() {
            return Err("empty subset in --subsets".into());
        }
        let mut subset = Vec::new();
        for tok in part.split(',') {
            let idx: usize = tok
                .trim()
                .parse()
                .map_err(|_| format!("cannot parse strike index '{}'", tok.trim()))?;
            if idx >= n {
                return Err(format!(
                    "strike index {idx} out of range (file has {n} strikes)"
                ));
            }
            if let Some(&prev) = subset.last() {
                if idx <= prev {
                    return Err(format!(
                        "subset indices must increase strictly ({prev} then {idx})"
                    ));
                }
            }
            subset.push(idx);
        }
        subsets.push(subset);
    }
    Ok(subsets)
}

/// One line of the output table before formatting.
struct StudyRow {
    method: Method,
    subset: Vec<usize>,
    entropy: f64,
    rel_entropy: f64,
    digitals: Vec<f64>,
}

/// Run every (subset, method) combination and format the CSV. Entropies are
/// printed with four decimals and digitals with three, like the comparison
/// tables this reproduces; rerun with identical inputs is byte-identical.
pub fn run(
    file: &QuoteFile,
    subsets: &[Vec<usize>],
    cfg: &StudyConfig,
) -> Result<String, CliError> {
    let (full_slice, _) = file.to_market();
    let maturity: Option<f64> = file.maturity.as_ref().and_then(|m| m.parse().ok());
    if cfg.methods.contains(&Method::Bs) {
        if cfg.sigma.is_none() {
            return Err(CliError::Domain("the bs method needs --sigma".to_string()));
        }
        if maturity.is_none() {
            return Err(CliError::Domain(
                "the bs method needs a numeric '# maturity=' header in the quote file".to_string(),
            ));
        }
    }

    let mut rows = Vec::new();
    for subset in subsets {
        let strikes: Vec<f64> = subset.iter().map(|&i| full_slice.strikes[i]).collect();
        let calls: Vec<f64> = subset.iter().map(|&i| full_slice.calls[i]).collect();
        let slice = MarketSlice::new(
            full_slice.forward,
            full_slice.discount_factor,
            strikes.clone(),
            calls,
        );
        let solver_cfg = SolverConfig {
            grad_tol: cfg.grad_tol,
            max_iter: cfg.max_iter,
            ..SolverConfig::default()
        };
        let (bk_density, bk_report) = solve_buchen_kelly(&slice, &solver_cfg)
            .map_err(|e| calibration_error(&e, &slice.strikes))?;

        for &method in &cfg.methods {
            let (density, digitals) = match method {
                Method::Bk => (bk_density.clone(), bk_report.solution.clone()),
                Method::Ccs => {
                    let rule = match cfg.endpoints {
                        Endpoints::Bk => EndpointRule::Supplied {
                            first: bk_report.solution.values[0],
                            last: *bk_report.solution.values.last().unwrap(),
                        },
                        Endpoints::Midpoint => EndpointRule::RectangleMidpoint,
                    };
                    let d = ccs_digitals(&slice, rule)
                        .map_err(|e| calibration_error(&e.into(), &slice.strikes))?;
                    let g = build_density(&slice, &d)
                        .map_err(|e| calibration_error(&e, &slice.strikes))?;
                    (g, d)
                }
                Method::Bs => {
                    let sigma = cfg.sigma.unwrap();
                    let t = maturity.unwrap();
                    let d = DigitalVector::new(
                        strikes
                            .iter()
                            .map(|&k| bs::digital(slice.forward, k, sigma, t))
                            .collect(),
                    );
                    let g = build_density(&slice, &d)
                        .map_err(|e| calibration_error(&e, &slice.strikes))?;
                    (g, d)
                }
            };
            let rel = relative_entropy(&density, &bk_density)
                .map_err(|e| calibration_error(&e, &slice.strikes))?;
            rows.push(StudyRow {
                method,
                subset: subset.clone(),
                entropy: density.entropy(),
                rel_entropy: rel,
                digitals: digitals.values,
            });
        }
    }
    Ok(format_csv(&full_slice.strikes, &rows))
}

fn format_csv(full_strikes: &[f64], rows: &[StudyRow]) -> String {
    let mut out = String::from("method,n,entropy,rel_entropy");
    for k in full_strikes {
        out.push_str(&format!(",D@{k}"));
    }
    out.push('\n');
    for row in rows {
        out.push_str(&format!(
            "{},{},{:.4},{:.4}",
            row.method.tag(),
            row.subset.len(),
            row.entropy,
            row.rel_entropy
        ));
        let mut cells = vec![String::new(); full_strikes.len()];
        for (pos, &idx) in row.subset.iter().enumerate() {
            cells[idx] = format!("{:.3}", row.digitals[pos]);
        }
        for cell in cells {
            out.push(',');
            out.push_str(&cell);
        }
        out.push('\n');
    }
    out
}
