//! Per-bucket log-partition functions and the slope root-finder.
//!
//! A bucket is a strike interval `[lo, hi)`; the calibrated density is a
//! single exponential piece `α e^{βx}` on each bucket. All bucket-level
//! quantities derive from
//!
//! ```text
//! c(β)  = ln ∫_lo^hi e^{βx} dx        (log-partition)
//! c′(β) = bucket mean under e^{βx}    (strictly increasing, range (lo, hi))
//! c″(β) = bucket variance             (always positive)
//! ```
//!
//! and the convex conjugate `c*(K) = βK − c(β)` at the β with `c′(β) = K`.
//! The last bucket is `[lo, ∞)` and needs `β < 0` to integrate.
//!
//! Written out naively, the finite-bucket formulas cancel catastrophically
//! near `β = 0`. Everything here is therefore expressed in the scaled
//! variable `x = β·Δ` (Δ = bucket width) through three kernels with series
//! fallbacks near zero; see `log_em1_over`, `q_kernel`, `s_kernel`.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use core::fmt;

/// One strike interval. The final bucket of a grid is unbounded above.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bucket {
    lo: f64,
    hi: f64,
}

impl Bucket {
    /// Bounded bucket `[lo, hi)`.
    pub fn finite(lo: f64, hi: f64) -> Bucket {
        assert!(
            lo >= 0.0 && lo < hi && hi.is_finite(),
            "bucket bounds must satisfy 0 <= lo < hi < inf"
        );
        Bucket { lo, hi }
    }

    /// Unbounded last bucket `[lo, ∞)`.
    pub fn tail(lo: f64) -> Bucket {
        assert!(
            lo >= 0.0 && lo.is_finite(),
            "tail bucket needs a finite lo >= 0"
        );
        Bucket {
            lo,
            hi: f64::INFINITY,
        }
    }

    pub fn lo(&self) -> f64 {
        self.lo
    }

    pub fn hi(&self) -> f64 {
        self.hi
    }

    pub fn is_tail(&self) -> bool {
        self.hi == f64::INFINITY
    }

    /// Width `hi − lo` (infinite for the tail bucket).
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SegmentError {
    /// β ≥ 0 on the unbounded bucket, or a non-finite argument.
    Domain,
    /// Target mean outside the open bucket interval.
    OutOfRange,
    /// Root-finder hit its iteration cap. The bracketing bisection fallback
    /// makes this unreachable for valid inputs; treat as a bug signal.
    NoConvergence,
}

impl fmt::Display for SegmentError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SegmentError::Domain => write!(f, "slope out of domain for this bucket"),
            SegmentError::OutOfRange => write!(f, "target mean outside the open bucket interval"),
            SegmentError::NoConvergence => write!(f, "slope root-finder did not converge"),
        }
    }
}

impl core::error::Error for SegmentError {}

/// Tolerances for [`solve_beta`].
///
/// `abs_tol` bounds the residual `|c′(β) − kbar|` in price units; when unset
/// it defaults to `1e-12·(1 + |kbar|)`.
#[derive(Debug, Clone, Copy)]
pub struct BetaSolveConfig {
    pub abs_tol: Option<f64>,
    pub max_iter: usize,
}

impl Default for BetaSolveConfig {
    fn default() -> Self {
        BetaSolveConfig {
            abs_tol: None,
            max_iter: 100,
        }
    }
}

impl BetaSolveConfig {
    fn effective_tol(&self, kbar: f64) -> f64 {
        match self.abs_tol {
            Some(t) => t,
            None => 1e-12 * (1.0 + kbar.abs()),
        }
    }
}

/// `ln((e^x − 1)/x)`: log-partition of a width-1 bucket, `L(0) = 0`.
fn log_em1_over(x: f64) -> f64 {
    if x.abs() < 0.02 {
        // x/2 + x²/24 − x⁴/2880; next term x⁶/181440 is < 4e-16 relative here
        let x2 = x * x;
        0.5 * x + x2 / 24.0 - x2 * x2 / 2880.0
    } else if x > 700.0 {
        // e^x would overflow; ln((e^x−1)/x) = x − ln x up to e^{-x}
        x - x.ln()
    } else {
        (x.exp_m1() / x).ln()
    }
}

/// `Q(x) = 1/(1 − e^{−x}) − 1/x`: mean of a width-1 bucket, increasing from
/// 0 to 1 with `Q(0) = 1/2`. Saturates gracefully for huge |x|.
fn q_kernel(x: f64) -> f64 {
    if x.abs() < 0.02 {
        let x2 = x * x;
        0.5 + x / 12.0 - x * x2 / 720.0 + x * x2 * x2 / 30240.0
    } else {
        1.0 / (-(-x).exp_m1()) - 1.0 / x
    }
}

/// `S(x) = Q′(x) = 1/x² − e^x/(e^x − 1)²`: variance of a width-1 bucket,
/// decreasing in |x| from `S(0) = 1/12`, asymptotically `1/x²`.
fn s_kernel(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 0.15 {
        // even series with Bernoulli-number coefficients; enough terms that
        // the branches agree to ~1e-13 relative at the crossover
        let x2 = x * x;
        ((((x2 / 5322240.0 - 1.0 / 172800.0) * x2 + 1.0 / 6048.0) * x2 - 1.0 / 240.0) * x2)
            + 1.0 / 12.0
    } else if ax > 40.0 {
        // e^x/(e^x−1)² = x²e^{−|x|}·(1/x²)… below 4e-15 relative to 1/x² here
        1.0 / (x * x)
    } else {
        // algebraic rearrangement of Q′ in terms of Q avoids the raw
        // 1/x² − e^x/(e^x−1)² cancellation
        let q = q_kernel(x);
        q * (1.0 - q) - (2.0 * q - 1.0) / x
    }
}

/// Log-partition `c(β)` of the bucket.
///
/// Finite bucket: `β·lo + ln Δ + L(βΔ)`, continuous at `β = 0` with value
/// `ln Δ`. Tail bucket (β < 0 required): `β·lo − ln(−β)`.
pub fn c(bucket: Bucket, beta: f64) -> Result<f64, SegmentError> {
    if !beta.is_finite() {
        return Err(SegmentError::Domain);
    }
    if bucket.is_tail() {
        if beta >= 0.0 {
            return Err(SegmentError::Domain);
        }
        Ok(beta * bucket.lo - (-beta).ln())
    } else {
        let w = bucket.width();
        Ok(beta * bucket.lo + w.ln() + log_em1_over(beta * w))
    }
}

/// Bucket mean `c′(β)`; strictly increasing in β with range `(lo, hi)`
/// (`(lo, ∞)` for the tail bucket), and `c′(0) = (lo+hi)/2`.
pub fn c_prime(bucket: Bucket, beta: f64) -> Result<f64, SegmentError> {
    if !beta.is_finite() {
        return Err(SegmentError::Domain);
    }
    if bucket.is_tail() {
        if beta >= 0.0 {
            return Err(SegmentError::Domain);
        }
        Ok(bucket.lo - 1.0 / beta)
    } else {
        let w = bucket.width();
        Ok(bucket.lo + w * q_kernel(beta * w))
    }
}

/// Bucket variance `c″(β) > 0`, with `c″(0) = Δ²/12`; `1/β²` on the tail.
pub fn c_double_prime(bucket: Bucket, beta: f64) -> Result<f64, SegmentError> {
    if !beta.is_finite() {
        return Err(SegmentError::Domain);
    }
    if bucket.is_tail() {
        if beta >= 0.0 {
            return Err(SegmentError::Domain);
        }
        Ok(1.0 / (beta * beta))
    } else {
        let w = bucket.width();
        Ok(w * w * s_kernel(beta * w))
    }
}

/// Solve `c′(β) = kbar` for β.
///
/// The tail bucket has the closed form `β = −1/(kbar − lo)`. Finite buckets
/// run a safeguarded Newton iteration on `Q(x) = (kbar − lo)/Δ` in the
/// scaled variable `x = βΔ`: the initial guess `x₀ = 12(q − ½)` inverts the
/// small-x expansion, a bracket is grown geometrically around it, and any
/// Newton step leaving the bracket is replaced by bisection.
pub fn solve_beta(bucket: Bucket, kbar: f64, cfg: &BetaSolveConfig) -> Result<f64, SegmentError> {
    if !kbar.is_finite() {
        return Err(SegmentError::OutOfRange);
    }
    if bucket.is_tail() {
        if kbar <= bucket.lo {
            return Err(SegmentError::OutOfRange);
        }
        return Ok(-1.0 / (kbar - bucket.lo));
    }
    if !(bucket.lo < kbar && kbar < bucket.hi) {
        return Err(SegmentError::OutOfRange);
    }
    let w = bucket.width();
    let q = (kbar - bucket.lo) / w;
    // |c′(β) − kbar| = Δ·|Q(x) − q|, so the Q-space tolerance is abs_tol/Δ
    let qtol = cfg.effective_tol(kbar) / w;

    let mut x = 12.0 * (q - 0.5);
    let mut step = f64::max(1.0, x.abs());
    let (mut xa, mut xb);
    if q_kernel(x) < q {
        xa = x;
        loop {
            let t = xa + step;
            if q_kernel(t) >= q {
                xb = t;
                break;
            }
            xa = t;
            step *= 2.0;
        }
    } else {
        xb = x;
        loop {
            let t = xb - step;
            if q_kernel(t) <= q {
                xa = t;
                break;
            }
            xb = t;
            step *= 2.0;
        }
    }

    // Iterate to a fixed point of the update rather than stopping at the
    // tolerance: the leftover residual otherwise sets a noise floor in the
    // entropy gradient and caps how far the outer Newton solve can converge.
    for _ in 0..cfg.max_iter {
        let f = q_kernel(x) - q;
        if f == 0.0 {
            return Ok(x / w);
        }
        if f < 0.0 {
            xa = x;
        } else {
            xb = x;
        }
        let mut next = x - f / s_kernel(x);
        if !(next > xa && next < xb) {
            next = 0.5 * (xa + xb);
        }
        if next == x {
            break;
        }
        x = next;
    }
    if (q_kernel(x) - q).abs() <= qtol {
        Ok(x / w)
    } else {
        Err(SegmentError::NoConvergence)
    }
}

/// Convex conjugate `c*(kbar) = β·kbar − c(β)` at the matching slope.
///
/// By the identity `c(β) + c*(K) = βK` at `K = c′(β)`, this is the only
/// value of the conjugate the calibration ever needs. For finite buckets
/// `c*` is convex in `kbar` with its minimum `−ln Δ` at the midpoint.
pub fn conjugate_value(bucket: Bucket, kbar: f64) -> Result<f64, SegmentError> {
    let beta = solve_beta(bucket, kbar, &BetaSolveConfig::default())?;
    Ok(beta * kbar - c(bucket, beta)?)
}
