//! Damped Newton ascent of the entropy surface.
//!
//! The iteration lives in the open rectangle of arbitrage-free digital
//! vectors. Each step solves the tridiagonal Newton system, shrinks the
//! step until the candidate is strictly inside the rectangle, then
//! backtracks under an Armijo condition on the entropy. Because the
//! surface is strongly concave, the gradient norm at the final iterate
//! converts into hard distance bounds, which are returned with the result.

use alloc::boxed::Box;
use alloc::vec::Vec;

use crate::density::PiecewiseExpDensity;
use crate::market::{ccs_digitals, validate_slice, DigitalVector, EndpointRule, MarketSlice};
use crate::surface::{bounds_from_norm, evaluate, BoundsReport, TridiagonalHessian};
use crate::CalibrationError;

/// Where the iteration starts.
#[derive(Debug, Clone, PartialEq)]
pub enum Start {
    /// Closed-form interpolation digitals, endpoints at the rectangle
    /// midpoints. A cheap, always-feasible warm start.
    CcsMidpoint,
    /// Caller-provided digitals (must lie strictly inside the rectangle).
    Supplied(DigitalVector),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    /// Stop once the gradient norm drops to this level.
    pub grad_tol: f64,
    /// Cap on accepted Newton steps before giving up.
    pub max_iter: usize,
    /// Armijo backtracking factor.
    pub backtrack_shrink: f64,
    /// Required fraction of the predicted linear increase.
    pub armijo_c: f64,
    /// Shrink factor while pulling the candidate back inside the rectangle.
    pub feasibility_shrink: f64,
    pub start: Start,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            grad_tol: 1e-9,
            max_iter: 100,
            backtrack_shrink: 0.5,
            armijo_c: 0.01,
            feasibility_shrink: 0.5,
            start: Start::CcsMidpoint,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Termination {
    /// Gradient norm reached `grad_tol`.
    Converged,
    /// Iteration cap hit first.
    MaxIter,
    /// No iteration ran: the density was built at caller-supplied digitals.
    Direct,
}

/// What the solver did, step by step.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverReport {
    /// The digital vector the iteration stopped at.
    pub solution: DigitalVector,
    /// Number of accepted Newton steps.
    pub iterations: usize,
    /// Gradient norm at the start point and after each accepted step
    /// (`iterations + 1` entries).
    pub grad_norm_history: Vec<f64>,
    /// Accepted step length per iteration, after feasibility pull-back and
    /// Armijo backtracking.
    pub step_sizes: Vec<f64>,
    /// Every iterate, starting point included.
    pub iterates: Vec<DigitalVector>,
    /// Distance bounds at the final iterate.
    pub bounds: BoundsReport,
    pub termination: Termination,
}

/// Payload of [`CalibrationError::MaxIterExceeded`]: the best iterate is
/// still a perfectly valid (just not entropy-maximal) calibrated density,
/// so it is handed back along with the full report.
#[derive(Debug, Clone, PartialEq)]
pub struct Unconverged {
    pub density: PiecewiseExpDensity,
    pub report: SolverReport,
}

/// Solve `T x = rhs` for a symmetric tridiagonal `T` by elimination.
/// Rejects zero or non-finite pivots instead of dividing through them; on
/// the negative-definite Hessians this solver sees, that only fires on a
/// bug upstream.
pub fn tridiag_solve(t: &TridiagonalHessian, rhs: &[f64]) -> Result<Vec<f64>, CalibrationError> {
    let n = t.diag.len();
    assert_eq!(rhs.len(), n);
    assert_eq!(t.off.len(), n.saturating_sub(1));
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut diag = t.diag.clone();
    let mut b = rhs.to_vec();
    for i in 1..n {
        let pivot = diag[i - 1];
        if pivot == 0.0 || !pivot.is_finite() {
            return Err(CalibrationError::SingularPivot);
        }
        let w = t.off[i - 1] / pivot;
        diag[i] -= w * t.off[i - 1];
        b[i] -= w * b[i - 1];
    }
    let last = diag[n - 1];
    if last == 0.0 || !last.is_finite() {
        return Err(CalibrationError::SingularPivot);
    }
    let mut x = b;
    x[n - 1] /= last;
    for i in (0..n - 1).rev() {
        x[i] = (x[i] - t.off[i] * x[i + 1]) / diag[i];
    }
    Ok(x)
}

fn norm(v: &[f64]) -> f64 {
    #[cfg(not(feature = "std"))]
    use crate::float::FloatExt;
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Maximize the entropy over the arbitrage rectangle; the optimum is the
/// unique continuous calibrated density.
pub fn solve_buchen_kelly(
    slice: &MarketSlice,
    config: &SolverConfig,
) -> Result<(PiecewiseExpDensity, SolverReport), CalibrationError> {
    if slice.n() == 0 {
        return Err(CalibrationError::Domain(
            "iteration needs at least one strike; an empty grid has nothing to solve",
        ));
    }
    let rect = validate_slice(slice)?;
    let mut d = match &config.start {
        Start::CcsMidpoint => ccs_digitals(slice, EndpointRule::RectangleMidpoint)?,
        Start::Supplied(v) => v.clone(),
    };
    let mut eval = evaluate(slice, &d)?;

    let mut grad_norm_history = Vec::new();
    let mut step_sizes = Vec::new();
    let mut iterates = alloc::vec![d.clone()];
    let mut iterations = 0usize;

    loop {
        let g = eval.gradient_values(&slice.strikes);
        let gn = norm(&g);
        grad_norm_history.push(gn);

        let finish = |termination: Termination| SolverReport {
            solution: d.clone(),
            iterations,
            grad_norm_history: grad_norm_history.clone(),
            step_sizes: step_sizes.clone(),
            iterates: iterates.clone(),
            bounds: bounds_from_norm(slice.n(), gn),
            termination,
        };

        if gn <= config.grad_tol {
            let report = finish(Termination::Converged);
            return Ok((eval.into_density(&slice.strikes), report));
        }
        if iterations >= config.max_iter {
            let report = finish(Termination::MaxIter);
            return Err(CalibrationError::MaxIterExceeded(Box::new(Unconverged {
                density: eval.into_density(&slice.strikes),
                report,
            })));
        }

        let (diag, off) = eval.hessian_parts(&slice.strikes);
        let hess = TridiagonalHessian { diag, off };
        let mut dir = tridiag_solve(&hess, &g)?;
        for v in dir.iter_mut() {
            if !v.is_finite() {
                return Err(CalibrationError::SingularPivot);
            }
            *v = -*v;
        }

        let candidate =
            |t: f64| -> Vec<f64> { d.values.iter().zip(&dir).map(|(x, s)| x + t * s).collect() };

        let mut t = 1.0;
        while !rect.contains(&candidate(t)) {
            t *= config.feasibility_shrink;
            if t < 1e-300 {
                return Err(CalibrationError::Domain(
                    "no feasible step along the Newton direction",
                ));
            }
        }

        let h0 = eval.entropy();
        let slope: f64 = g.iter().zip(&dir).map(|(a, b)| a * b).sum();
        // In the endgame the predicted increase (~‖∇H‖²) sinks below the
        // roundoff of an entropy evaluation; without a noise allowance the
        // test would reject sound Newton steps at random and stall the
        // iteration just above tolerance.
        let noise = 16.0 * f64::EPSILON * (1.0 + h0.abs());
        loop {
            let trial = DigitalVector::new(candidate(t));
            let trial_eval = evaluate(slice, &trial)?;
            if trial_eval.entropy() >= h0 + config.armijo_c * t * slope - noise {
                d = trial;
                eval = trial_eval;
                break;
            }
            t *= config.backtrack_shrink;
            if t < 1e-300 {
                return Err(CalibrationError::Domain(
                    "line search stalled: no step satisfied the ascent condition",
                ));
            }
        }
        iterations += 1;
        step_sizes.push(t);
        iterates.push(d.clone());
    }
}

/// Build the maximum-entropy density at caller-chosen digitals and report
/// the distance bounds there — no iteration, the constrained problem has a
/// closed-form answer once the digitals are fixed.
pub fn solve_constrained(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<(PiecewiseExpDensity, SolverReport), CalibrationError> {
    if slice.n() == 0 {
        return Err(CalibrationError::Domain(
            "distance bounds need at least one strike",
        ));
    }
    let eval = evaluate(slice, digitals)?;
    let gn = norm(&eval.gradient_values(&slice.strikes));
    let report = SolverReport {
        solution: digitals.clone(),
        iterations: 0,
        grad_norm_history: alloc::vec![gn],
        step_sizes: Vec::new(),
        iterates: alloc::vec![digitals.clone()],
        bounds: bounds_from_norm(slice.n(), gn),
        termination: Termination::Direct,
    };
    Ok((eval.into_density(&slice.strikes), report))
}
