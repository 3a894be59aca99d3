//! Math shim: `f64` transcendentals come from `std` when available and from
//! `libm` otherwise, behind a private extension trait.

#[cfg(all(not(feature = "std"), not(feature = "libm")))]
compile_error!("maxent-core needs either the default `std` feature or the `libm` feature");

#[cfg(not(feature = "std"))]
pub(crate) trait FloatExt: Sized {
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn exp_m1(self) -> Self;
    fn ln(self) -> Self;
    fn ln_1p(self) -> Self;
    fn sin(self) -> Self;
}

#[cfg(not(feature = "std"))]
impl FloatExt for f64 {
    #[inline]
    fn sqrt(self) -> f64 {
        libm::sqrt(self)
    }
    #[inline]
    fn exp(self) -> f64 {
        libm::exp(self)
    }
    #[inline]
    fn exp_m1(self) -> f64 {
        libm::expm1(self)
    }
    #[inline]
    fn ln(self) -> f64 {
        libm::log(self)
    }
    #[inline]
    fn ln_1p(self) -> f64 {
        libm::log1p(self)
    }
    #[inline]
    fn sin(self) -> f64 {
        libm::sin(self)
    }
}
