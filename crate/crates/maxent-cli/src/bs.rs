//! Flat-volatility Black-Scholes quotes, used to synthesise test markets.

use core::f64::consts::SQRT_2;

/// Standard normal CDF. The complementary error function keeps the result
/// accurate in absolute terms far into both tails (well below 1e-12).
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / SQRT_2)
}

/// Undiscounted call on the forward: `F N(d1) - K N(d2)`.
pub fn call(forward: f64, strike: f64, sigma: f64, maturity: f64) -> f64 {
    let sd = sigma * maturity.sqrt();
    let d1 = ((forward / strike).ln() + 0.5 * sd * sd) / sd;
    forward * norm_cdf(d1) - strike * norm_cdf(d1 - sd)
}

/// Undiscounted digital (probability of finishing above the strike): `N(d2)`.
pub fn digital(forward: f64, strike: f64, sigma: f64, maturity: f64) -> f64 {
    let sd = sigma * maturity.sqrt();
    norm_cdf(((forward / strike).ln() - 0.5 * sd * sd) / sd)
}
