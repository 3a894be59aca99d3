//! Option quotes for one maturity, arbitrage checks, and the digital-price
//! rectangle they induce.
//!
//! Everything downstream works with *undiscounted* prices: the forward is
//! the price of a 0-strike call, `C̃₀ = F` at `K₀ = 0`, and virtual
//! endpoints `K_{n+1} = ∞`, `C̃_{n+1} = 0` close the grid. A digital
//! (binary) price vector `D̃` is consistent with the calls exactly when each
//! component sits strictly between the adjacent call-spread slopes; the
//! resulting open box is the calibration domain Ω.

use alloc::vec::Vec;
use core::fmt;

/// One maturity's quotes: forward, discount factor, and undiscounted calls
/// at ascending strikes. `n = strikes.len()` may be zero (forward only).
#[derive(Debug, Clone, PartialEq)]
pub struct MarketSlice {
    pub forward: f64,
    pub discount_factor: f64,
    pub strikes: Vec<f64>,
    pub calls: Vec<f64>,
}

impl MarketSlice {
    pub fn new(forward: f64, discount_factor: f64, strikes: Vec<f64>, calls: Vec<f64>) -> Self {
        assert_eq!(strikes.len(), calls.len(), "one call quote per strike");
        MarketSlice {
            forward,
            discount_factor,
            strikes,
            calls,
        }
    }

    pub fn n(&self) -> usize {
        self.strikes.len()
    }

    /// Call price at grid index `i` ∈ 0..=n+1, including the virtual
    /// endpoints `C̃₀ = forward` and `C̃_{n+1} = 0`.
    pub(crate) fn call_at(&self, i: usize) -> f64 {
        if i == 0 {
            self.forward
        } else if i <= self.n() {
            self.calls[i - 1]
        } else {
            0.0
        }
    }

    /// Strike at grid index `i` ∈ 0..=n, with `K₀ = 0`.
    pub(crate) fn strike_at(&self, i: usize) -> f64 {
        if i == 0 {
            0.0
        } else {
            self.strikes[i - 1]
        }
    }
}

/// Componentwise bounds of the open box Ω of arbitrage-consistent digital
/// prices. `lower[i]` is the call-spread slope to the right of strike i+1,
/// `upper[i]` the slope to the left.
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalRectangle {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

impl DigitalRectangle {
    pub fn n(&self) -> usize {
        self.lower.len()
    }

    pub fn width(&self, i: usize) -> f64 {
        self.upper[i] - self.lower[i]
    }

    /// Strict interior membership, component by component.
    pub fn contains(&self, values: &[f64]) -> bool {
        values.len() == self.n()
            && values
                .iter()
                .zip(self.lower.iter().zip(&self.upper))
                .all(|(v, (lo, hi))| lo < v && v < hi)
    }

    /// Index of the first component outside the open box, if any.
    fn first_violation(&self, values: &[f64]) -> Option<usize> {
        values
            .iter()
            .zip(self.lower.iter().zip(&self.upper))
            .position(|(v, (lo, hi))| !(lo < v && v < hi))
    }
}

/// Candidate undiscounted digital prices `D̃₁ … D̃ₙ` (the implicit endpoints
/// are `D̃₀ = 1`, `D̃_{n+1} = 0`).
#[derive(Debug, Clone, PartialEq)]
pub struct DigitalVector {
    pub values: Vec<f64>,
}

impl DigitalVector {
    pub fn new(values: Vec<f64>) -> Self {
        DigitalVector { values }
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Per-bucket probabilities `pᵢ = D̃ᵢ − D̃_{i+1}` and conditional means
/// `K̄ᵢ`, indexed 0..=n over the buckets `[Kᵢ, K_{i+1})`.
#[derive(Debug, Clone, PartialEq)]
pub struct BucketStats {
    pub p: Vec<f64>,
    pub kbar: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MarketError {
    /// Strikes not strictly increasing and positive (1-based index).
    BadStrikes { index: usize },
    /// Some `C̃ᵢ ≤ C̃_{i+1}` (1-based index of the left quote; 0 = forward).
    NonMonotoneCalls { index: usize },
    /// Adjacent call-spread slopes out of order at this strike: the digital
    /// rectangle would be empty.
    NonConvexCalls { index: usize },
    /// First call quote at or below intrinsic value (`C̃₁ ≤ F − K₁`), so no
    /// digital price below 1 can be consistent with it.
    BelowIntrinsic,
    /// A digital price at or outside its rectangle bound (1-based index).
    OutOfRectangle { index: usize },
    /// Digital vector length does not match the strike count.
    WrongDigitalCount { expected: usize, got: usize },
}

impl fmt::Display for MarketError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MarketError::BadStrikes { index } => {
                write!(f, "strike #{index} is not positive and strictly increasing")
            }
            MarketError::NonMonotoneCalls { index } => {
                write!(
                    f,
                    "call quote #{index} is not strictly above its right neighbor"
                )
            }
            MarketError::NonConvexCalls { index } => {
                write!(
                    f,
                    "call quotes are not strictly convex around strike #{index}"
                )
            }
            MarketError::BelowIntrinsic => {
                write!(f, "first call quote is at or below intrinsic value")
            }
            MarketError::OutOfRectangle { index } => {
                write!(f, "digital price #{index} violates its call-spread bounds")
            }
            MarketError::WrongDigitalCount { expected, got } => {
                write!(f, "expected {expected} digital prices, got {got}")
            }
        }
    }
}

impl core::error::Error for MarketError {}

/// Check a slice for static arbitrage and return the digital rectangle Ω.
///
/// Rejects, in order: non-finite or degenerate fields, unsorted or
/// non-positive strikes, non-decreasing calls, a first quote at or below
/// intrinsic (which would force `D̃₁ ≥ 1`), and non-convex quotes (empty Ω).
pub fn validate_slice(slice: &MarketSlice) -> Result<DigitalRectangle, MarketError> {
    let n = slice.n();
    if !(slice.forward.is_finite() && slice.forward > 0.0) {
        return Err(MarketError::NonMonotoneCalls { index: 0 });
    }
    let mut prev = 0.0;
    for i in 0..n {
        let k = slice.strikes[i];
        if !(k.is_finite() && k > prev) {
            return Err(MarketError::BadStrikes { index: i + 1 });
        }
        prev = k;
    }
    // strict monotonicity across the full grid, virtual endpoints included
    for i in 0..=n {
        let left = slice.call_at(i);
        let right = slice.call_at(i + 1);
        if !(left.is_finite() && left > right) {
            return Err(MarketError::NonMonotoneCalls { index: i });
        }
    }
    if n > 0 {
        // C̃₁ > F − K₁, i.e. the slope of the first chord stays below 1;
        // with convexity this keeps every quote above intrinsic and pins
        // p₀ = 1 − D̃₁ > 0 for all interior digitals.
        if slice.forward - slice.calls[0] >= slice.strikes[0] {
            return Err(MarketError::BelowIntrinsic);
        }
    }

    let mut lower = Vec::with_capacity(n);
    let mut upper = Vec::with_capacity(n);
    for i in 1..=n {
        let up = -(slice.call_at(i) - slice.call_at(i - 1))
            / (slice.strike_at(i) - slice.strike_at(i - 1));
        let lo = if i == n {
            0.0
        } else {
            -(slice.call_at(i + 1) - slice.call_at(i))
                / (slice.strike_at(i + 1) - slice.strike_at(i))
        };
        if !(lo < up) {
            return Err(MarketError::NonConvexCalls { index: i });
        }
        lower.push(lo);
        upper.push(up);
    }
    Ok(DigitalRectangle { lower, upper })
}

/// Bucket probabilities and conditional means implied by `(slice, digitals)`.
///
/// `pᵢ = D̃ᵢ − D̃_{i+1}` and
/// `K̄ᵢ = [(C̃ᵢ + Kᵢ D̃ᵢ) − (C̃_{i+1} + K_{i+1} D̃_{i+1})] / pᵢ`
/// with the convention `K_{n+1} D̃_{n+1} := 0`. The sums telescope:
/// `Σ pᵢ = 1` and `Σ pᵢ K̄ᵢ = forward` hold to roundoff by construction.
pub fn bucket_stats(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<BucketStats, MarketError> {
    let n = slice.n();
    if digitals.len() != n {
        return Err(MarketError::WrongDigitalCount {
            expected: n,
            got: digitals.len(),
        });
    }
    let rect = validate_slice(slice)?;
    if let Some(i) = rect.first_violation(&digitals.values) {
        return Err(MarketError::OutOfRectangle { index: i + 1 });
    }

    let digital_at = |i: usize| -> f64 {
        if i == 0 {
            1.0
        } else if i <= n {
            digitals.values[i - 1]
        } else {
            0.0
        }
    };
    let mut p = Vec::with_capacity(n + 1);
    let mut kbar = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let pi = digital_at(i) - digital_at(i + 1);
        let head = slice.call_at(i) + slice.strike_at(i) * digital_at(i);
        let tail = if i == n {
            0.0
        } else {
            slice.call_at(i + 1) + slice.strike_at(i + 1) * digital_at(i + 1)
        };
        p.push(pi);
        kbar.push((head - tail) / pi);
    }
    Ok(BucketStats { p, kbar })
}

/// How to fill the first and last digital price in [`ccs_digitals`], where
/// the centered difference quotient has no left/right neighbor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EndpointRule {
    /// Midpoint of the rectangle bounds.
    RectangleMidpoint,
    /// Caller-provided values (e.g. previously solved continuous-density
    /// digitals when building comparison tables).
    Supplied { first: f64, last: f64 },
}

/// Digital prices estimated from centered call spreads:
/// `D̃ᵢ = −(C̃_{i+1} − C̃_{i−1}) / (K_{i+1} − K_{i−1})` for interior strikes,
/// endpoints per `rule`. Any value that ties or crosses a rectangle bound is
/// pulled inside by `1e-9` of the bound width, so the result is always a
/// valid strictly interior starting point.
pub fn ccs_digitals(slice: &MarketSlice, rule: EndpointRule) -> Result<DigitalVector, MarketError> {
    let n = slice.n();
    assert!(n >= 1, "centered call spreads need at least one strike");
    let rect = validate_slice(slice)?;

    let mut values = Vec::with_capacity(n);
    for i in 1..=n {
        let v = if i == 1 || i == n {
            match rule {
                EndpointRule::RectangleMidpoint => 0.5 * (rect.lower[i - 1] + rect.upper[i - 1]),
                EndpointRule::Supplied { first, last } => {
                    if i == 1 {
                        first
                    } else {
                        last
                    }
                }
            }
        } else {
            -(slice.call_at(i + 1) - slice.call_at(i - 1))
                / (slice.strike_at(i + 1) - slice.strike_at(i - 1))
        };
        values.push(v);
    }
    for i in 0..n {
        let margin = 1e-9 * rect.width(i);
        values[i] = values[i]
            .max(rect.lower[i] + margin)
            .min(rect.upper[i] - margin);
    }
    Ok(DigitalVector::new(values))
}
