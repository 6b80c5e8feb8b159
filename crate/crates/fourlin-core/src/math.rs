//! Scalar math routed through libm, so `no_std` builds and std-linked test
//! builds run the same implementations bit for bit.

pub(crate) use libm::{cos, exp, fabs, sin, sqrt};

/// `x^p` for real exponents.
pub(crate) fn powf(x: f64, p: f64) -> f64 {
    libm::pow(x, p)
}

/// `x^n` by squaring; exact products for the small integer exponents used
/// in mode weights.
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    let mut base = x;
    let mut e = n.unsigned_abs();
    let mut acc = 1.0f64;
    while e > 0 {
        if e & 1 == 1 {
            acc *= base;
        }
        base *= base;
        e >>= 1;
    }
    if n < 0 {
        1.0 / acc
    } else {
        acc
    }
}

/// Natural logarithm.
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}
