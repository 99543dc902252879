//! Analytic predictor for the Gaussian-filter truncation error.
//!
//! In the large-`alpha` limit the relative weight error behaves as
//!
//! `exp(-alpha^2 [C - beta/T_max]^2 / 2) / (sqrt(2 pi) alpha [C - beta/T_max])`
//!
//! with a positive constant `C` of order one; the expression is only valid
//! for `beta / T_max < C` and saturates at 1 beyond.

use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorPredictorParams<T> {
    pub c: T,
}

impl<T: Scalar> ErrorPredictorParams<T> {
    pub fn new(c: T) -> Result<Self> {
        if !(c > T::zero()) {
            return Err(Error::InvalidParameter("predictor constant C must be positive".into()));
        }
        Ok(Self { c })
    }
}

/// Predicted relative error at `alpha = delta T_max`.
pub fn predict_gf_error<T: Scalar>(
    alpha: T,
    beta: T,
    t_max: T,
    params: &ErrorPredictorParams<T>,
) -> Result<T> {
    if !(alpha > T::zero()) {
        return Err(Error::InvalidParameter("alpha must be positive".into()));
    }
    let ratio = beta / t_max;
    if ratio >= params.c {
        return Ok(T::one());
    }
    let gap = params.c - ratio;
    let exponent = -(alpha * alpha) * gap * gap * T::half();
    let denom = (T::two() * T::PI()).sqrt() * alpha * gap;
    Ok(exponent.exp() / denom)
}

/// Fit `C` to measured `(alpha, relative error)` pairs at fixed `beta` and
/// `T_max` by least squares in log space (golden-section search; the
/// objective is smooth and effectively unimodal over the bracket).
pub fn fit_error_constant<T: Scalar>(
    points: &[(T, T)],
    beta: T,
    t_max: T,
) -> Result<ErrorPredictorParams<T>> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("need at least two points to fit C".into()));
    }
    let ratio = beta / t_max;
    let sse = |c: T| -> T {
        let params = ErrorPredictorParams { c };
        points
            .iter()
            .map(|&(alpha, err)| {
                let pred = predict_gf_error(alpha, beta, t_max, &params).unwrap();
                let d = pred.max(T::min_positive_value()).ln() - err.max(T::min_positive_value()).ln();
                d * d
            })
            .sum()
    };
    let mut lo = ratio + T::from_f64_lit(1e-3);
    let mut hi = T::from_f64_lit(5.0);
    let phi = (T::from_f64_lit(5.0).sqrt() - T::one()) * T::half();
    for _ in 0..200 {
        let d = (hi - lo) * phi;
        let x1 = hi - d;
        let x2 = lo + d;
        if sse(x1) < sse(x2) {
            hi = x2;
        } else {
            lo = x1;
        }
    }
    ErrorPredictorParams::new((lo + hi) * T::half())
}
