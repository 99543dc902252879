//! Direct Fourier transform and the Gaussian filter method.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::TimeSeries;
use crate::scalar::Scalar;

use super::{FrequencyGrid, SpectralDensity};

/// Discrete Fourier transform of the conjugate-symmetrically extended
/// series (`G(-t) = conj G(t)`, `G(0) = 1`). Output bin masses are real and
/// may be signed; they sum to `G(0) = 1` on a full Nyquist window.
pub fn direct_fourier<T: Scalar>(
    series: &TimeSeries<T>,
    grid: &FrequencyGrid<T>,
) -> SpectralDensity<T> {
    filtered_fourier(series, grid, None)
}

/// Fourier transform of the series damped by `e^{-delta^2 t^2 / 2}`.
pub fn gaussian_filtered_density<T: Scalar>(
    series: &TimeSeries<T>,
    delta: T,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    if !(delta > T::zero()) {
        return Err(Error::InvalidParameter("filter width delta must be positive".into()));
    }
    Ok(filtered_fourier(series, grid, Some(delta)))
}

fn filtered_fourier<T: Scalar>(
    series: &TimeSeries<T>,
    grid: &FrequencyGrid<T>,
    delta: Option<T>,
) -> SpectralDensity<T> {
    let dt = series.grid().dt();
    let prefactor = dt * grid.spacing() / (T::two() * T::PI());
    let damped: Vec<Complex<T>> = series
        .values()
        .iter()
        .zip(series.grid().times())
        .map(|(g, t)| match delta {
            Some(d) => *g * (-(d * d) * t * t * T::half()).exp(),
            None => *g,
        })
        .collect();
    let weights = grid
        .omegas()
        .map(|omega| {
            // k = 0 contributes G(0) = 1; +-k pairs contribute twice the
            // real part
            let mut acc = T::one();
            for (g, t) in damped.iter().zip(series.grid().times()) {
                let phase = Complex::new(T::zero(), omega * t).exp();
                acc += (phase * g).re * T::two();
            }
            acc * prefactor
        })
        .collect();
    SpectralDensity::new(*grid, weights).expect("weights built on the grid")
}

/// Boltzmann weight via the Gaussian filter method: damp, transform, cut
/// everything below `c_cut` times the largest negative excursion, integrate
/// against `e^{-beta omega}` and undo the broadening scale factor
/// `e^{beta^2 delta^2 / 2}`. Returns the weight and the cut density.
pub fn gaussian_filter_weight<T: Scalar>(
    series: &TimeSeries<T>,
    beta: T,
    delta: T,
    c_cut: T,
    grid: &FrequencyGrid<T>,
) -> Result<(T, SpectralDensity<T>)> {
    let density = gaussian_filtered_density(series, delta, grid)?;
    let cut = cut_density(&density, c_cut);
    let integral: T = cut
        .grid()
        .omegas()
        .zip(cut.weights())
        .map(|(omega, &mass)| mass * (-beta * omega).exp())
        .sum();
    let scale = (beta * beta * delta * delta * T::half()).exp();
    Ok((integral / scale, cut))
}

/// Zero all values below `c_cut * max{|D| : D < 0}`; the cut is zero (and
/// nothing is removed but the negative part) when no negative values exist.
pub(crate) fn cut_density<T: Scalar>(density: &SpectralDensity<T>, c_cut: T) -> SpectralDensity<T> {
    let largest_negative = density
        .weights()
        .iter()
        .filter(|&&w| w < T::zero())
        .fold(T::zero(), |acc, &w| acc.max(-w));
    let threshold = c_cut * largest_negative;
    let weights = density
        .weights()
        .iter()
        .map(|&w| if w < threshold { T::zero() } else { w })
        .collect();
    SpectralDensity::new(*density.grid(), weights).expect("same grid")
}

/// Largest usable filter width at a low sampling rate: interference with
/// the periodic images limits `delta` to `(pi/dt - max|E|) / 2` once the
/// window is narrower than twice the spectral range.
pub fn gaussian_delta_cap<T: Scalar>(dt: T, max_abs_energy: T) -> Option<T> {
    let edge = T::PI() / dt;
    if edge < T::two() * max_abs_energy {
        Some((edge - max_abs_energy) * T::half())
    } else {
        None
    }
}

/// Filter width for a target `alpha = delta T_max`, capped when the
/// sampling rate requires it.
pub fn effective_delta<T: Scalar>(alpha: T, t_max: T, dt: T, max_abs_energy: T) -> T {
    let delta = alpha / t_max;
    match gaussian_delta_cap(dt, max_abs_energy) {
        Some(cap) => delta.min(cap),
        None => delta,
    }
}
