//! Complex-coefficient polynomials in two layouts.
//!
//! [`MultiAffinePoly`] stores one coefficient per subset of the variables,
//! [`DensePoly`] stores a full box `0 <= alpha <= kappa` of exponents.
//! Variables are 0-based throughout the library API.

mod dense;
mod json;
mod multiaffine;
mod ops;

pub use dense::DensePoly;
pub use json::{PolyJson, TermJson};
pub use multiaffine::MultiAffinePoly;
pub use ops::{delta, delta_by_parts, discriminant_d, wronskian, ClosureOp};

use num_complex::Complex64;

pub type Scalar = Complex64;

/// Absolute tolerance for "is zero" and "is real" tests on coefficients.
pub const EPS_ZERO: f64 = 1e-10;

/// Largest arity accepted by [`MultiAffinePoly`].
pub const MAX_MULTIAFFINE_ARITY: usize = 24;

/// Largest number of coefficients in a [`DensePoly`] box.
pub const MAX_BOX_VOLUME: usize = 1 << 22;

#[cfg(test)]
pub(crate) fn c(re: f64, im: f64) -> Scalar {
    Complex64::new(re, im)
}

#[cfg(test)]
pub(crate) fn r(re: f64) -> Scalar {
    Complex64::new(re, 0.0)
}

pub(crate) fn check_finite(z: Scalar) -> crate::Result<Scalar> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(crate::Error::NonFinite)
    }
}

/// Binomial coefficient as f64 (exact for the sizes used here).
pub fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for t in 0..k {
        acc = acc * (n - t) as f64 / (t + 1) as f64;
    }
    acc.round()
}
