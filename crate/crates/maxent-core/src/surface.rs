//! The entropy surface over interior digital vectors: value, gradient,
//! tridiagonal Hessian, and the a-posteriori distance bounds that come from
//! strong concavity.
//!
//! Everything here is driven by one shared evaluation: solve each bucket's
//! slope from its conditional mean, then read entropy and derivatives off
//! the solved parameters. The gradient entry at strike `Kᵢ` turns out to be
//! the jump of the log-density across `Kᵢ`, which is what makes "gradient
//! small" and "density continuous" the same statement.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::density::{grid_buckets, solve_buckets, PiecewiseExpDensity};
use crate::market::{bucket_stats, DigitalVector, MarketSlice};
use crate::segment;
use crate::CalibrationError;

/// Gradient of the entropy with respect to the interior digital prices.
#[derive(Debug, Clone, PartialEq)]
pub struct Gradient {
    pub values: Vec<f64>,
}

impl Gradient {
    pub fn norm(&self) -> f64 {
        self.values.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Symmetric tridiagonal Hessian: `diag` has one entry per strike, `off`
/// one per adjacent pair.
#[derive(Debug, Clone, PartialEq)]
pub struct TridiagonalHessian {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl TridiagonalHessian {
    /// `dᵀ H d` for a direction `d`.
    pub fn quad_form(&self, d: &[f64]) -> f64 {
        assert_eq!(d.len(), self.diag.len());
        let mut q = 0.0;
        for i in 0..d.len() {
            q += self.diag[i] * d[i] * d[i];
            if i + 1 < d.len() {
                q += 2.0 * self.off[i] * d[i] * d[i + 1];
            }
        }
        q
    }
}

/// How far a digital vector can be from the entropy maximizer, given only
/// its gradient norm. `m` is the strong-concavity constant of the surface.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub m: f64,
    pub grad_norm: f64,
    /// `H(D̂) − H(D) ≤ ‖∇H(D)‖² / (2m)`
    pub entropy_gap_bound: f64,
    /// `‖D − D̂‖ ≤ 2‖∇H(D)‖ / m`
    pub digital_dist_bound: f64,
    /// `‖g_D − ĝ‖_{L¹} ≤ ‖∇H(D)‖ / √m`
    pub l1_bound: f64,
}

/// Every derived quantity the solver needs at one digital vector, computed
/// from a single pass of bucket solves.
pub(crate) struct Eval {
    pub(crate) p: Vec<f64>,
    pub(crate) kbar: Vec<f64>,
    pub(crate) beta: Vec<f64>,
    pub(crate) log_alpha: Vec<f64>,
    /// second derivative of the log-partition at the solved slope, i.e. the
    /// conditional variance of each bucket
    pub(crate) cpp: Vec<f64>,
}

pub(crate) fn evaluate(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<Eval, CalibrationError> {
    let stats = bucket_stats(slice, digitals)?;
    let buckets = grid_buckets(&slice.strikes);
    let (beta, log_alpha) = solve_buckets(&stats, &buckets)?;
    let mut cpp = Vec::with_capacity(buckets.len());
    for (bucket, b) in buckets.iter().zip(&beta) {
        cpp.push(segment::c_double_prime(*bucket, *b)?);
    }
    Ok(Eval {
        p: stats.p,
        kbar: stats.kbar,
        beta,
        log_alpha,
        cpp,
    })
}

impl Eval {
    pub(crate) fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for i in 0..self.p.len() {
            h -= self.p[i] * (self.log_alpha[i] + self.beta[i] * self.kbar[i]);
        }
        h
    }

    pub(crate) fn gradient_values(&self, strikes: &[f64]) -> Vec<f64> {
        strikes
            .iter()
            .enumerate()
            .map(|(j, k)| {
                (self.log_alpha[j] + self.beta[j] * k)
                    - (self.log_alpha[j + 1] + self.beta[j + 1] * k)
            })
            .collect()
    }

    pub(crate) fn hessian_parts(&self, strikes: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let n = strikes.len();
        let mut diag = Vec::with_capacity(n);
        let mut off = Vec::with_capacity(n.saturating_sub(1));
        for j in 0..n {
            let k = strikes[j];
            let left = (k - self.kbar[j]) * (k - self.kbar[j]) / (self.p[j] * self.cpp[j]);
            let right =
                (self.kbar[j + 1] - k) * (self.kbar[j + 1] - k) / (self.p[j + 1] * self.cpp[j + 1]);
            diag.push(-1.0 / self.p[j] - 1.0 / self.p[j + 1] - left - right);
            if j + 1 < n {
                off.push(
                    1.0 / self.p[j + 1]
                        - (self.kbar[j + 1] - k) * (strikes[j + 1] - self.kbar[j + 1])
                            / (self.p[j + 1] * self.cpp[j + 1]),
                );
            }
        }
        (diag, off)
    }

    pub(crate) fn into_density(self, strikes: &[f64]) -> PiecewiseExpDensity {
        let mut breakpoints = Vec::with_capacity(strikes.len() + 1);
        breakpoints.push(0.0);
        breakpoints.extend_from_slice(strikes);
        PiecewiseExpDensity::from_parts(breakpoints, self.log_alpha, self.beta)
    }
}

/// Entropy of the maximum-entropy density matching the slice's calls and
/// the given digitals, without building the density object.
pub fn entropy_from_market(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<f64, CalibrationError> {
    Ok(evaluate(slice, digitals)?.entropy())
}

pub fn gradient(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<Gradient, CalibrationError> {
    let eval = evaluate(slice, digitals)?;
    Ok(Gradient {
        values: eval.gradient_values(&slice.strikes),
    })
}

pub fn hessian(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<TridiagonalHessian, CalibrationError> {
    let eval = evaluate(slice, digitals)?;
    let (diag, off) = eval.hessian_parts(&slice.strikes);
    Ok(TridiagonalHessian { diag, off })
}

/// `m(n) = 4 sin²(π / (2n + 2))`: a uniform lower bound on the curvature of
/// the entropy surface over the whole feasible rectangle, coming from the
/// smallest eigenvalue of the discrete second-difference part of the
/// Hessian. Decreases like `(π / (n + 1))²`.
pub fn strong_concavity_constant(n: usize) -> f64 {
    assert!(n >= 1);
    let s = (PI / (2.0 * (n as f64) + 2.0)).sin();
    4.0 * s * s
}

pub(crate) fn bounds_from_norm(n: usize, grad_norm: f64) -> BoundsReport {
    let m = strong_concavity_constant(n);
    BoundsReport {
        m,
        grad_norm,
        entropy_gap_bound: grad_norm * grad_norm / (2.0 * m),
        digital_dist_bound: 2.0 * grad_norm / m,
        l1_bound: grad_norm / m.sqrt(),
    }
}

/// Distance bounds to the (unknown) entropy maximizer from the gradient at
/// the given digitals.
pub fn bounds_report(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<BoundsReport, CalibrationError> {
    let g = gradient(slice, digitals)?;
    Ok(bounds_from_norm(slice.n(), g.norm()))
}
