//! Quantile filter and discrepancy-principle selection of its level.
//!
//! Shot noise shows up in NNLS densities as small spurious peaks; the ones
//! below the true support get amplified by `e^{-beta omega}`. Truncating
//! the density outside the `[q, 1-q]` quantile range removes them, and the
//! discrepancy principle picks the largest `q` whose truncated density
//! still fits the series to within the expected noise.

use crate::error::{Error, Result};
use crate::grid::TimeSeries;
use crate::scalar::Scalar;

use super::nnls::{chi_squared_weighted, EffectiveSigmas};
use super::SpectralDensity;

/// Zero all bins strictly below `Q(q)` or strictly above `Q(1-q)`, where
/// `Q` is the inverse of the discrete CDF (`Q(p) = inf {omega : CDF >= p}`).
/// The result is not renormalized.
pub fn quantile_truncate<T: Scalar>(
    density: &SpectralDensity<T>,
    q: T,
) -> Result<SpectralDensity<T>> {
    if q < T::zero() || q >= T::half() {
        return Err(Error::InvalidParameter(format!("quantile level {q} outside [0, 0.5)")));
    }
    if !density.is_nonnegative() {
        return Err(Error::InvalidParameter("quantile filter needs a nonnegative density".into()));
    }
    let total = density.total_mass();
    let n = density.weights().len();
    let mut lo = 0usize;
    let mut cdf = T::zero();
    for (j, &w) in density.weights().iter().enumerate() {
        cdf += w;
        if cdf >= q * total {
            lo = j;
            break;
        }
    }
    let mut hi = n - 1;
    let mut cdf_from_top = T::zero();
    for j in (0..n).rev() {
        cdf_from_top += density.weights()[j];
        if cdf_from_top >= q * total {
            hi = j;
            break;
        }
    }
    let weights = density
        .weights()
        .iter()
        .enumerate()
        .map(|(j, &w)| if j < lo || j > hi { T::zero() } else { w })
        .collect();
    SpectralDensity::new(*density.grid(), weights)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuantileSelection<T> {
    pub q: T,
    pub chi2: T,
    /// Set when even the untruncated density misses the target, in which
    /// case `q = 0` is returned as a best effort.
    pub best_effort: bool,
}

/// Largest quantile level whose truncated density keeps
/// `chi^2 <= chi2_target`.
///
/// The truncation pattern, and with it chi^2, is piecewise constant in `q`
/// and only changes across the cumulative-mass breakpoints of the density,
/// so the search bisects over one representative `q` per distinct pattern
/// (the first level reaching it) instead of a continuous scan.
pub fn select_quantile<T: Scalar>(
    density: &SpectralDensity<T>,
    series: &TimeSeries<T>,
    chi2_target: T,
) -> Result<QuantileSelection<T>> {
    let sigmas = EffectiveSigmas::from_series(series);
    let chi2_at = |q: T| -> Result<T> {
        let truncated = quantile_truncate(density, q)?;
        Ok(chi_squared_weighted(&truncated, series, &sigmas))
    };
    let chi2_zero = chi2_at(T::zero())?;
    if chi2_zero > chi2_target {
        return Ok(QuantileSelection { q: T::zero(), chi2: chi2_zero, best_effort: true });
    }

    // breakpoints: cumulative masses from both ends, clipped to [0, 0.5)
    let total = density.total_mass();
    let mut levels: Vec<T> = Vec::new();
    for forward in [true, false] {
        let mut acc = T::zero();
        let iter: Box<dyn Iterator<Item = &T>> = if forward {
            Box::new(density.weights().iter())
        } else {
            Box::new(density.weights().iter().rev())
        };
        for &w in iter {
            if w > T::zero() {
                acc += w;
                let q = acc / total;
                if q < T::half() {
                    levels.push(q);
                }
            }
        }
    }
    levels.push(T::half());
    levels.sort_by(|a, b| a.partial_cmp(b).expect("mass is not NaN"));
    levels.dedup();

    // one representative q inside each half-open interval between levels,
    // deduplicated by the truncation pattern it produces
    let mut candidates: Vec<T> = vec![T::zero()];
    let mut prev = T::zero();
    for &level in &levels {
        if level > prev {
            candidates.push((prev + level) * T::half());
        }
        prev = level;
    }
    let pattern = |q: T| -> Result<(usize, usize)> {
        let truncated = quantile_truncate(density, q)?;
        let lo = truncated.weights().iter().position(|&w| w > T::zero()).unwrap_or(0);
        let hi = truncated.weights().iter().rposition(|&w| w > T::zero()).unwrap_or(0);
        Ok((lo, hi))
    };
    let mut reps: Vec<T> = Vec::new();
    let mut last_pattern = None;
    for &q in &candidates {
        let p = pattern(q)?;
        if last_pattern != Some(p) {
            reps.push(q);
            last_pattern = Some(p);
        }
    }

    // bisect for the strongest truncation still within the target
    let mut best = (T::zero(), chi2_zero);
    let mut lo = 0usize;
    let mut hi = reps.len();
    while lo < hi {
        let mid = (lo + hi) / 2;
        let q = reps[mid];
        let chi2 = chi2_at(q)?;
        if chi2 <= chi2_target {
            best = (q, chi2);
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    Ok(QuantileSelection { q: best.0, chi2: best.1, best_effort: false })
}
