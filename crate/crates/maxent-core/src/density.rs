//! The calibrated density itself: piecewise-exponential segments, analytic
//! pricing, entropy, relative entropy, and the Buchen-Kelly `(μ, λ)` form.

#[cfg(not(feature = "std"))]
use crate::float::FloatExt;
use alloc::vec::Vec;

use crate::market::{bucket_stats, BucketStats, DigitalVector, MarketSlice};
use crate::segment::{self, BetaSolveConfig, Bucket};
use crate::CalibrationError;

/// Density `g(x) = αᵢ e^{βᵢ x}` on each segment `[Kᵢ, K_{i+1})`, with
/// breakpoints `K₀ = 0 < K₁ < … < Kₙ` and an unbounded last segment
/// (`βₙ < 0` so it integrates). Parameters are kept in log form — strikes
/// in the thousands with moderate slopes would overflow `e^{βK}` otherwise.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseExpDensity {
    breakpoints: Vec<f64>,
    log_alpha: Vec<f64>,
    beta: Vec<f64>,
}

/// `g(x) = (1/μ) exp(Σ λⱼ (x − Kⱼ)⁺)` with anchors `K₁ = 0 < K₂ < … < K_m`:
/// the historical parameterization of the same density, well-defined only
/// when the density is continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct BuchenKellyForm {
    pub mu: f64,
    pub lambdas: Vec<f64>,
    pub anchors: Vec<f64>,
}

impl PiecewiseExpDensity {
    /// Assemble from raw segment parameters. Panics on structural defects
    /// (this is a programming-error boundary, not a data-validation one).
    pub fn from_parts(breakpoints: Vec<f64>, log_alpha: Vec<f64>, beta: Vec<f64>) -> Self {
        assert!(
            !breakpoints.is_empty(),
            "need at least the origin breakpoint"
        );
        assert_eq!(breakpoints[0], 0.0, "support starts at 0");
        assert!(
            breakpoints.windows(2).all(|w| w[0] < w[1]),
            "breakpoints must increase strictly"
        );
        assert_eq!(breakpoints.len(), log_alpha.len());
        assert_eq!(breakpoints.len(), beta.len());
        assert!(
            *beta.last().unwrap() < 0.0,
            "last segment needs a negative slope to integrate"
        );
        assert!(
            log_alpha.iter().chain(beta.iter()).all(|v| v.is_finite()),
            "segment parameters must be finite"
        );
        PiecewiseExpDensity {
            breakpoints,
            log_alpha,
            beta,
        }
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn log_alpha(&self) -> &[f64] {
        &self.log_alpha
    }

    pub fn beta(&self) -> &[f64] {
        &self.beta
    }

    /// Number of segments (breakpoint count; the grid has n strikes and
    /// n + 1 segments).
    pub fn segments(&self) -> usize {
        self.breakpoints.len()
    }

    fn bucket(&self, i: usize) -> Bucket {
        if i + 1 == self.breakpoints.len() {
            Bucket::tail(self.breakpoints[i])
        } else {
            Bucket::finite(self.breakpoints[i], self.breakpoints[i + 1])
        }
    }

    /// Mass and first moment of segment `i` restricted to `[from, K_{i+1})`.
    /// `from` must lie in `[Kᵢ, K_{i+1})`.
    fn segment_part(&self, i: usize, from: f64) -> (f64, f64) {
        let full = self.bucket(i);
        let sub = if full.is_tail() {
            Bucket::tail(from)
        } else {
            Bucket::finite(from, full.hi())
        };
        let beta = self.beta[i];
        let log_mass = self.log_alpha[i] + segment::c(sub, beta).expect("tail slope is negative");
        let mass = log_mass.exp();
        let mean = segment::c_prime(sub, beta).expect("tail slope is negative");
        (mass, mass * mean)
    }

    /// Density value at `x` (0 for negative `x`; right-continuous at the
    /// breakpoints).
    pub fn value(&self, x: f64) -> f64 {
        if x < 0.0 {
            return 0.0;
        }
        let i = self.segment_index(x);
        (self.log_alpha[i] + self.beta[i] * x).exp()
    }

    fn segment_index(&self, x: f64) -> usize {
        self.breakpoints
            .partition_point(|b| *b <= x)
            .saturating_sub(1)
    }

    /// Undiscounted call price `∫ (x − strike)⁺ g(x) dx`, exact per segment.
    pub fn price_call(&self, strike: f64) -> f64 {
        assert!(strike >= 0.0 && strike.is_finite());
        let mut total = 0.0;
        for i in 0..self.segments() {
            let b = self.bucket(i);
            if !b.is_tail() && b.hi() <= strike {
                continue;
            }
            let from = f64::max(b.lo(), strike);
            let (mass, first) = self.segment_part(i, from);
            total += first - strike * mass;
        }
        total
    }

    /// Undiscounted digital price `∫_strike^∞ g(x) dx`; 1 at strike 0.
    pub fn price_digital(&self, strike: f64) -> f64 {
        assert!(strike >= 0.0 && strike.is_finite());
        let mut total = 0.0;
        for i in 0..self.segments() {
            let b = self.bucket(i);
            if !b.is_tail() && b.hi() <= strike {
                continue;
            }
            let from = f64::max(b.lo(), strike);
            total += self.segment_part(i, from).0;
        }
        total
    }

    pub fn cdf(&self, x: f64) -> Result<f64, CalibrationError> {
        if !(x >= 0.0) {
            return Err(CalibrationError::Domain("cdf argument must be >= 0"));
        }
        Ok(1.0 - self.price_digital(x))
    }

    /// Inverse of the cdf; each segment inverts in closed form as the
    /// logarithm of an affine expression.
    pub fn quantile(&self, u: f64) -> Result<f64, CalibrationError> {
        if !(u > 0.0 && u < 1.0) {
            return Err(CalibrationError::Domain(
                "quantile level must lie in (0, 1)",
            ));
        }
        let mut cum = 0.0;
        let last = self.segments() - 1;
        for i in 0..=last {
            let (mass, _) = self.segment_part(i, self.breakpoints[i]);
            if cum + mass >= u || i == last {
                let r = u - cum;
                let lo = self.breakpoints[i];
                let beta = self.beta[i];
                let x = if beta == 0.0 {
                    lo + r * (-self.log_alpha[i]).exp()
                } else {
                    // solve ∫_lo^x α e^{βt} dt = r
                    let z = r * beta * (-(self.log_alpha[i] + beta * lo)).exp();
                    lo + z.ln_1p() / beta
                };
                return Ok(x);
            }
            cum += mass;
        }
        unreachable!("segment walk covers (0, 1)")
    }

    /// Differential entropy `−∫ g ln g`, summed analytically per segment:
    /// `−Σ mᵢ (ln αᵢ + βᵢ·meanᵢ)`.
    pub fn entropy(&self) -> f64 {
        let mut total = 0.0;
        for i in 0..self.segments() {
            let (mass, first) = self.segment_part(i, self.breakpoints[i]);
            total -= mass * self.log_alpha[i] + self.beta[i] * first;
        }
        total
    }

    /// Log-density jumps `ln g(Kᵢ−) − ln g(Kᵢ+)` at the interior
    /// breakpoints, i = 1..n.
    pub fn log_density_jumps(&self) -> Vec<f64> {
        (1..self.segments())
            .map(|i| {
                let k = self.breakpoints[i];
                (self.log_alpha[i - 1] + self.beta[i - 1] * k)
                    - (self.log_alpha[i] + self.beta[i] * k)
            })
            .collect()
    }

    /// Convert to `(μ, λ)` form. Fails with the largest jump and its strike
    /// if the density is discontinuous beyond `jump_tol` (in log-density
    /// units; 1e-6 pairs naturally with the solver's default gradient
    /// tolerance, since the gradient is exactly the vector of log jumps).
    pub fn to_buchen_kelly(&self, jump_tol: f64) -> Result<BuchenKellyForm, CalibrationError> {
        let jumps = self.log_density_jumps();
        let mut worst = 0.0f64;
        let mut worst_at = 0.0f64;
        for (i, j) in jumps.iter().enumerate() {
            if j.abs() > worst.abs() {
                worst = *j;
                worst_at = self.breakpoints[i + 1];
            }
        }
        if worst.abs() > jump_tol {
            return Err(CalibrationError::NotContinuous {
                strike: worst_at,
                jump: worst,
            });
        }
        let mut lambdas = Vec::with_capacity(self.segments());
        lambdas.push(self.beta[0]);
        for i in 1..self.segments() {
            lambdas.push(self.beta[i] - self.beta[i - 1]);
        }
        Ok(BuchenKellyForm {
            mu: (-self.log_alpha[0]).exp(),
            lambdas,
            anchors: self.breakpoints.clone(),
        })
    }
}

/// Rebuild segment parameters from `(μ, λ)` form: `β` is the running sum of
/// the `λ`s and `ln α` drops by `λ_{j+1}·K_{j+1}` at each anchor.
pub fn from_buchen_kelly(bk: &BuchenKellyForm) -> Result<PiecewiseExpDensity, CalibrationError> {
    assert_eq!(bk.lambdas.len(), bk.anchors.len());
    assert!(!bk.anchors.is_empty() && bk.anchors[0] == 0.0);
    assert!(bk.mu > 0.0 && bk.mu.is_finite());
    let total: f64 = bk.lambdas.iter().sum();
    if !(total < 0.0) {
        return Err(CalibrationError::NotIntegrable);
    }
    let m = bk.lambdas.len();
    let mut beta = Vec::with_capacity(m);
    let mut log_alpha = Vec::with_capacity(m);
    beta.push(bk.lambdas[0]);
    log_alpha.push(-bk.mu.ln());
    for j in 1..m {
        beta.push(beta[j - 1] + bk.lambdas[j]);
        log_alpha.push(log_alpha[j - 1] - bk.lambdas[j] * bk.anchors[j]);
    }
    Ok(PiecewiseExpDensity::from_parts(
        bk.anchors.clone(),
        log_alpha,
        beta,
    ))
}

/// Relative entropy `I(g‖p) = ∫ g ln(g/p)` for two densities on the same
/// breakpoint grid, via the segment moments of `g`:
/// `Σ (ln αᵢ − ln α̂ᵢ)·mᵢ + (βᵢ − β̂ᵢ)·sᵢ`. Nonnegative, zero iff equal.
pub fn relative_entropy(
    g: &PiecewiseExpDensity,
    p: &PiecewiseExpDensity,
) -> Result<f64, CalibrationError> {
    if g.breakpoints != p.breakpoints {
        return Err(CalibrationError::GridMismatch);
    }
    let mut total = 0.0;
    for i in 0..g.segments() {
        let (mass, first) = g.segment_part(i, g.breakpoints[i]);
        total += (g.log_alpha[i] - p.log_alpha[i]) * mass + (g.beta[i] - p.beta[i]) * first;
    }
    Ok(total)
}

/// The buckets of a strike grid: `[0, K₁), [K₁, K₂), …, [Kₙ, ∞)`.
pub(crate) fn grid_buckets(strikes: &[f64]) -> Vec<Bucket> {
    let n = strikes.len();
    let mut buckets = Vec::with_capacity(n + 1);
    for i in 0..=n {
        let lo = if i == 0 { 0.0 } else { strikes[i - 1] };
        buckets.push(if i == n {
            Bucket::tail(lo)
        } else {
            Bucket::finite(lo, strikes[i])
        });
    }
    buckets
}

/// Solve every bucket's slope from its conditional mean and recover the
/// log-levels: `βᵢ` from `c′(βᵢ) = K̄ᵢ`, then `ln αᵢ = ln pᵢ − c(βᵢ)`.
pub(crate) fn solve_buckets(
    stats: &BucketStats,
    buckets: &[Bucket],
) -> Result<(Vec<f64>, Vec<f64>), CalibrationError> {
    let cfg = BetaSolveConfig::default();
    let mut beta = Vec::with_capacity(buckets.len());
    let mut log_alpha = Vec::with_capacity(buckets.len());
    for (i, bucket) in buckets.iter().enumerate() {
        let b = segment::solve_beta(*bucket, stats.kbar[i], &cfg)?;
        beta.push(b);
        log_alpha.push(stats.p[i].ln() - segment::c(*bucket, b)?);
    }
    Ok((beta, log_alpha))
}

/// The maximum-entropy density matching `slice`'s calls and the given
/// digital prices. Reprices every input to roundoff by construction.
pub fn build_density(
    slice: &MarketSlice,
    digitals: &DigitalVector,
) -> Result<PiecewiseExpDensity, CalibrationError> {
    let stats = bucket_stats(slice, digitals)?;
    let buckets = grid_buckets(&slice.strikes);
    let (beta, log_alpha) = solve_buckets(&stats, &buckets)?;
    let mut breakpoints = Vec::with_capacity(slice.n() + 1);
    breakpoints.push(0.0);
    breakpoints.extend_from_slice(&slice.strikes);
    Ok(PiecewiseExpDensity::from_parts(
        breakpoints,
        log_alpha,
        beta,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::market::MarketSlice;

    fn ex1_density() -> PiecewiseExpDensity {
        let s = MarketSlice::new(100.0, 1.0, vec![100.0], vec![9.9477]);
        build_density(&s, &DigitalVector::new(vec![0.4962])).unwrap()
    }

    fn ex2_density() -> PiecewiseExpDensity {
        let s = MarketSlice::new(100.0, 1.0, vec![80.0, 120.0], vec![22.2656, 3.7059]);
        build_density(&s, &DigitalVector::new(vec![0.7884, 0.1991])).unwrap()
    }

    #[test]
    fn forward_only_market_yields_the_exponential_density() {
        let s = MarketSlice::new(100.0, 1.0, vec![], vec![]);
        let d = build_density(&s, &DigitalVector::new(vec![])).unwrap();
        assert!((d.beta()[0] + 0.01).abs() < 1e-15);
        assert!((d.log_alpha()[0] + 100.0f64.ln()).abs() < 1e-12);
        // entropy of an exponential with mean F is 1 + ln F
        assert!((d.entropy() - 5.605170185988091).abs() < 1e-12);
        assert!((d.price_digital(100.0) - (-1.0f64).exp()).abs() < 1e-14);
        assert!((d.quantile(0.5).unwrap() - 69.31471805599453).abs() < 1e-10);
        assert_eq!(d.cdf(0.0).unwrap(), 0.0);
    }

    #[test]
    fn single_quote_density_entropy() {
        assert!((ex1_density().entropy() - 4.6801).abs() < 5e-4);
    }

    #[test]
    fn two_quote_density_entropy() {
        let h = ex2_density().entropy();
        assert!((h - 4.6208).abs() < 5e-4);
        // pinned value for this exact digital vector
        assert!((h - 4.6208134414025004).abs() < 1e-9);
    }

    #[test]
    fn density_reprices_its_inputs() {
        let s = MarketSlice::new(100.0, 1.0, vec![80.0, 120.0], vec![22.2656, 3.7059]);
        let digitals = vec![0.7884, 0.1991];
        let d = build_density(&s, &DigitalVector::new(digitals.clone())).unwrap();
        assert!((d.price_call(0.0) - 100.0).abs() / 100.0 < 1e-12);
        for (k, c) in s.strikes.iter().zip(&s.calls) {
            assert!((d.price_call(*k) - c).abs() / c < 1e-9);
        }
        for (k, dig) in s.strikes.iter().zip(&digitals) {
            assert!((d.price_digital(*k) - dig).abs() / dig < 1e-9);
        }
        assert!((d.price_digital(0.0) - 1.0).abs() < 1e-12);
        assert!(d.price_call(1e9) < 1e-12);
    }

    #[test]
    fn quantile_inverts_cdf() {
        let d = ex2_density();
        for x in [5.0, 60.0, 80.0, 99.5, 119.0, 150.0, 300.0] {
            let u = d.cdf(x).unwrap();
            let back = d.quantile(u).unwrap();
            assert!((back - x).abs() / x < 1e-9, "x {x} back {back}");
        }
        assert!(matches!(d.quantile(0.0), Err(CalibrationError::Domain(_))));
        assert!(matches!(d.quantile(1.0), Err(CalibrationError::Domain(_))));
        assert!(matches!(d.cdf(-1.0), Err(CalibrationError::Domain(_))));
    }

    #[test]
    fn entropy_of_a_unit_uniform_is_zero() {
        // β = 0 on [0, 1), then a tail segment carrying ~e-745 of mass:
        // numerically the uniform density on the unit interval
        let d = PiecewiseExpDensity::from_parts(vec![0.0, 1.0], vec![0.0, -745.0], vec![0.0, -1.0]);
        assert!(d.entropy().abs() < 1e-12);
        assert!((d.price_digital(0.0) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn relative_entropy_of_a_density_with_itself_is_zero() {
        let d = ex2_density();
        assert_eq!(relative_entropy(&d, &d).unwrap(), 0.0);
    }

    #[test]
    fn relative_entropy_requires_matching_grids() {
        let a = ex1_density();
        let b = ex2_density();
        assert_eq!(
            relative_entropy(&a, &b),
            Err(CalibrationError::GridMismatch)
        );
    }

    #[test]
    fn buchen_kelly_round_trip_for_the_exponential() {
        let s = MarketSlice::new(100.0, 1.0, vec![], vec![]);
        let d = build_density(&s, &DigitalVector::new(vec![])).unwrap();
        let bk = d.to_buchen_kelly(1e-6).unwrap();
        assert!((bk.mu - 100.0).abs() < 1e-10);
        assert_eq!(bk.lambdas.len(), 1);
        assert!((bk.lambdas[0] + 0.01).abs() < 1e-15);
        let back = from_buchen_kelly(&bk).unwrap();
        assert!((back.beta()[0] - d.beta()[0]).abs() < 1e-12);
        assert!((back.log_alpha()[0] - d.log_alpha()[0]).abs() < 1e-12);
    }

    #[test]
    fn discontinuous_density_refuses_lambda_form() {
        // off-optimum digitals make the density jump at the strikes
        let err = ex2_density().to_buchen_kelly(1e-6).unwrap_err();
        match err {
            CalibrationError::NotContinuous { strike, jump } => {
                assert!(strike == 80.0 || strike == 120.0);
                assert!(jump.abs() > 1e-4);
            }
            other => panic!("expected NotContinuous, got {other:?}"),
        }
    }

    #[test]
    fn non_integrable_lambda_form_is_rejected() {
        let bk = BuchenKellyForm {
            mu: 1.0,
            lambdas: vec![-0.1, 0.2],
            anchors: vec![0.0, 50.0],
        };
        assert_eq!(from_buchen_kelly(&bk), Err(CalibrationError::NotIntegrable));
    }

    #[test]
    fn density_value_is_right_continuous_at_breakpoints() {
        let d = ex2_density();
        let k = 80.0;
        let right = (d.log_alpha()[1] + d.beta()[1] * k).exp();
        assert_eq!(d.value(k), right);
        assert_eq!(d.value(-5.0), 0.0);
    }
}
