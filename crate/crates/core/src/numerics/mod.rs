//! Special functions and adaptive quadrature shared by the analytic layer.

mod quadrature;
mod special;

pub use quadrature::{adaptive_integrate, integrate_with_breaks, QuadratureSpec};
pub(crate) use special::phi;
pub use special::{erfc, std_normal_cdf};

use crate::error::{domain, Result};

/// `x ln x` with the continuous extension `0 ln 0 = 0`.
pub fn xlogx(x: f64) -> Result<f64> {
    if x.is_nan() || x < 0.0 {
        return Err(domain("xlogx requires x >= 0"));
    }
    Ok(xlogx_unchecked(x))
}

#[inline]
pub(crate) fn xlogx_unchecked(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * libm::log(x)
    }
}

/// `ln(e^x + e^y)` without overflow or underflow. Either argument may be `-∞`.
#[inline]
pub fn log_sum_exp(x: f64, y: f64) -> f64 {
    let (hi, lo) = if x >= y { (x, y) } else { (y, x) };
    if hi == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    hi + libm::log1p(libm::exp(lo - hi))
}
