//! Calibration of maximum-entropy densities to European option quotes.
//!
//! Given undiscounted call prices `C̃₁ > … > C̃ₙ` at strikes `K₁ < … < Kₙ`
//! for a single maturity, the set of risk-neutral densities matching those
//! prices and a vector of digital (binary) prices `D̃` is non-empty exactly
//! when `D̃` lies in an open rectangle `Ω` bounded by call-spread slopes.
//! For each such `D̃` the entropy-maximizing density is piecewise
//! exponential, one segment per strike bucket, and its entropy `H(D̃)` is a
//! smooth strictly concave function on `Ω` with a tridiagonal Hessian.
//!
//! This crate computes:
//!
//! * the rectangle `Ω` and per-bucket statistics ([`market`]),
//! * the per-bucket log-partition function family and its convex conjugate
//!   ([`segment`]),
//! * the density itself with analytic pricing, entropy, relative entropy,
//!   and conversions to the Buchen-Kelly `(μ, λ)` parameterization
//!   ([`density`]),
//! * `H`, its gradient and Hessian over `Ω`, plus a-priori error bounds
//!   derived from strong concavity ([`surface`]),
//! * the damped Newton iteration that maximizes `H`, whose optimum is the
//!   unique *continuous* calibrated density — the Buchen-Kelly density
//!   ([`solver`]).
//!
//! The crate is `no_std`-compatible: disable the default `std` feature and
//! enable `libm` to supply the math functions.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

mod float;

pub mod density;
pub mod market;
pub mod segment;
pub mod solver;
pub mod surface;

use core::fmt;

pub use density::PiecewiseExpDensity;
pub use market::{DigitalVector, MarketSlice};
pub use solver::{solve_buchen_kelly, SolverConfig, SolverReport};

/// Errors from density construction, surface evaluation, and the solver.
///
/// Quote-level problems keep their [`market::MarketError`] payload so
/// callers can point at the offending strike.
#[derive(Debug, Clone, PartialEq)]
pub enum CalibrationError {
    /// Invalid quotes or digitals outside the arbitrage rectangle.
    Market(market::MarketError),
    /// A per-bucket root solve failed (out-of-range mean or no convergence).
    Segment(segment::SegmentError),
    /// Conversion to Buchen-Kelly form requires a continuous density; the
    /// largest log-density jump and the strike where it occurs are reported.
    NotContinuous { strike: f64, jump: f64 },
    /// A Buchen-Kelly parameter vector whose total slope is nonnegative on
    /// the last segment does not integrate.
    NotIntegrable,
    /// Relative entropy requires identical breakpoint vectors.
    GridMismatch,
    /// Argument outside an operation's domain (e.g. quantile level not in (0,1)).
    Domain(&'static str),
    /// Tridiagonal elimination hit a zero pivot; cannot happen for the
    /// negative-definite Hessians produced here, so this flags a bug.
    SingularPivot,
    /// The Newton iteration hit its iteration cap. Degenerate, near-arbitrage
    /// quotes are the usual cause; the best iterate is returned for triage.
    MaxIterExceeded(alloc::boxed::Box<solver::Unconverged>),
}

impl From<market::MarketError> for CalibrationError {
    fn from(e: market::MarketError) -> Self {
        CalibrationError::Market(e)
    }
}

impl From<segment::SegmentError> for CalibrationError {
    fn from(e: segment::SegmentError) -> Self {
        CalibrationError::Segment(e)
    }
}

impl fmt::Display for CalibrationError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CalibrationError::Market(e) => write!(f, "{e}"),
            CalibrationError::Segment(e) => write!(f, "{e}"),
            CalibrationError::NotContinuous { strike, jump } => write!(
                f,
                "density is discontinuous: log-density jump {jump:e} at strike {strike}"
            ),
            CalibrationError::NotIntegrable => {
                write!(
                    f,
                    "slope sum is nonnegative on the last segment; density does not integrate"
                )
            }
            CalibrationError::GridMismatch => {
                write!(f, "densities live on different breakpoint grids")
            }
            CalibrationError::Domain(what) => write!(f, "{what}"),
            CalibrationError::SingularPivot => {
                write!(
                    f,
                    "singular pivot in tridiagonal solve (bug: Hessian should be definite)"
                )
            }
            CalibrationError::MaxIterExceeded(u) => write!(
                f,
                "solver hit the iteration cap ({} iterations, gradient norm {:e})",
                u.report.iterations,
                u.report
                    .grad_norm_history
                    .last()
                    .copied()
                    .unwrap_or(f64::NAN)
            ),
        }
    }
}

impl core::error::Error for CalibrationError {}
