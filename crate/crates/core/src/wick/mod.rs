//! Wick rotation: reconstruct the local density of states from a truncated,
//! possibly noisy time series and integrate it into Boltzmann weights.
//!
//! Three reconstruction routes are provided. The direct Fourier transform
//! is exact only for infinite series and develops negative sinc lobes under
//! truncation. The Gaussian filter damps the series before transforming and
//! compensates with a known scale factor. Non-negative least squares fits a
//! nonnegative density directly to the data and is the route the sampler
//! uses, with a quantile filter chosen by the discrepancy principle to
//! absorb shot noise.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

mod fourier;
mod moments;
mod nnls;
mod predictor;
mod quantile;

pub use fourier::{direct_fourier, gaussian_filter_weight, gaussian_filtered_density};
pub use moments::adjust_moments;
pub use nnls::{chi_squared, nnls_density, EffectiveSigmas};
pub use predictor::{fit_error_constant, predict_gf_error, ErrorPredictorParams};
pub use quantile::{quantile_truncate, select_quantile, QuantileSelection};

/// Uniform frequency grid over `[omega_min, omega_max)` with `n_omega` bins
/// at `omega_j = omega_min + j * spacing`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyGrid<T> {
    omega_min: T,
    omega_max: T,
    n_omega: usize,
}

impl<T: Scalar> FrequencyGrid<T> {
    pub fn new(omega_min: T, omega_max: T, n_omega: usize) -> Result<Self> {
        if n_omega == 0 {
            return Err(Error::InvalidParameter("n_omega must be positive".into()));
        }
        if !(omega_max > omega_min) {
            return Err(Error::InvalidParameter("omega_max must exceed omega_min".into()));
        }
        Ok(Self { omega_min, omega_max, n_omega })
    }

    /// Full Nyquist window `[-pi/dt, pi/dt)` of a series sampled at `dt`.
    pub fn nyquist_window(dt: T, n_omega: usize) -> Result<Self> {
        if !(dt > T::zero()) {
            return Err(Error::InvalidParameter("dt must be positive".into()));
        }
        let edge = T::PI() / dt;
        Self::new(-edge, edge, n_omega)
    }

    /// Default bin count for a series of `n_t` points.
    pub fn default_n_omega(n_t: usize) -> usize {
        (8 * n_t).max(256)
    }

    pub fn n_omega(&self) -> usize {
        self.n_omega
    }

    pub fn omega_min(&self) -> T {
        self.omega_min
    }

    pub fn omega_max(&self) -> T {
        self.omega_max
    }

    pub fn spacing(&self) -> T {
        (self.omega_max - self.omega_min) / T::from_usize_lit(self.n_omega)
    }

    pub fn omega(&self, j: usize) -> T {
        debug_assert!(j < self.n_omega);
        self.omega_min + self.spacing() * T::from_usize_lit(j)
    }

    pub fn omegas(&self) -> impl Iterator<Item = T> + '_ {
        (0..self.n_omega).map(move |j| self.omega(j))
    }
}

/// Spectral weight on a [`FrequencyGrid`], stored as bin masses
/// (density integrated over each bin). NNLS output is nonnegative; the
/// direct Fourier transform of a truncated series may be signed.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDensity<T> {
    grid: FrequencyGrid<T>,
    weights: Vec<T>,
}

impl<T: Scalar> SpectralDensity<T> {
    pub fn new(grid: FrequencyGrid<T>, weights: Vec<T>) -> Result<Self> {
        if weights.len() != grid.n_omega() {
            return Err(Error::SizeMismatch(format!(
                "{} weights on a {}-bin grid",
                weights.len(),
                grid.n_omega()
            )));
        }
        Ok(Self { grid, weights })
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn total_mass(&self) -> T {
        self.weights.iter().copied().sum()
    }

    pub fn is_nonnegative(&self) -> bool {
        self.weights.iter().all(|&w| w >= T::zero())
    }

    /// Mean of the density (requires positive total mass).
    pub fn mean(&self) -> T {
        let mass = self.total_mass();
        self.grid
            .omegas()
            .zip(&self.weights)
            .map(|(w, &m)| w * m)
            .sum::<T>()
            / mass
    }

    /// Standard deviation about the mean.
    pub fn std_dev(&self) -> T {
        let mass = self.total_mass();
        let mean = self.mean();
        let var = self
            .grid
            .omegas()
            .zip(&self.weights)
            .map(|(w, &m)| (w - mean) * (w - mean) * m)
            .sum::<T>()
            / mass;
        var.max(T::zero()).sqrt()
    }

    pub fn save(&self, path: &Path, meta: &DensityMeta) -> Result<()> {
        let file = DensityFile {
            omega: self.grid.omegas().map(|w| w.to_f64_lossy()).collect(),
            weights: self.weights.iter().map(|w| w.to_f64_lossy()).collect(),
            dt: meta.dt,
            method: meta.method.clone(),
            q: meta.q,
            chi2: meta.chi2,
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }
}

/// Provenance fields of the density file format.
#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct DensityMeta {
    pub dt: f64,
    pub method: String,
    pub q: Option<f64>,
    pub chi2: Option<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
struct DensityFile {
    omega: Vec<f64>,
    weights: Vec<f64>,
    dt: f64,
    method: String,
    q: Option<f64>,
    chi2: Option<f64>,
}

/// Wick-rotation method selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WickMethod {
    Direct,
    GaussianFilter,
    Nnls,
}

/// Knobs of the reconstruction pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WickConfig<T> {
    pub method: WickMethod,
    /// Target `alpha = delta * T_max` for the Gaussian filter.
    pub alpha: T,
    /// Cut multiplier on the largest negative density excursion.
    pub c_cut: T,
    /// Discrepancy target factor `c` (chi^2 target is `c * n_t`); `None`
    /// disables the quantile filter.
    pub quantile_chi2_factor: Option<T>,
    /// Mild broadening in units of the grid spacing, applied when
    /// integrating NNLS densities.
    pub mild_broadening_factor: T,
    /// Re-impose the exact first two moments after truncation.
    pub adjust_moments: bool,
    /// Frequency bins; `None` uses [`FrequencyGrid::default_n_omega`].
    pub n_omega: Option<usize>,
}

impl<T: Scalar> Default for WickConfig<T> {
    fn default() -> Self {
        Self {
            method: WickMethod::Nnls,
            alpha: T::from_f64_lit(8.0),
            c_cut: T::two(),
            quantile_chi2_factor: Some(T::two()),
            mild_broadening_factor: T::one(),
            adjust_moments: false,
            n_omega: None,
        }
    }
}

impl<T: Scalar> WickConfig<T> {
    pub fn nnls_exact() -> Self {
        Self { quantile_chi2_factor: None, ..Self::default() }
    }

    pub fn grid_for(&self, dt: T, n_t: usize) -> Result<FrequencyGrid<T>> {
        let n_omega = self.n_omega.unwrap_or_else(|| FrequencyGrid::<T>::default_n_omega(n_t));
        FrequencyGrid::nyquist_window(dt, n_omega)
    }
}

/// Boltzmann weight from a density: optional Gaussian broadening of the
/// given width, then `sum_j w_j e^{-beta omega_j}`, then division by the
/// broadening scale factor `e^{beta^2 width^2 / 2}`.
///
/// The convolution is taken on the unbounded extension of the grid, which
/// collapses to a single width- and beta-dependent factor multiplying the
/// plain sum; normalized weight ratios are unaffected by it.
pub fn weight_from_density<T: Scalar>(
    density: &SpectralDensity<T>,
    beta: T,
    mild_broadening: T,
) -> T {
    let plain: T = density
        .grid()
        .omegas()
        .zip(density.weights())
        .map(|(w, &m)| m * (-beta * w).exp())
        .sum();
    if mild_broadening == T::zero() {
        return plain;
    }
    let spacing = density.grid().spacing();
    let kernel = gaussian_kernel(mild_broadening, spacing);
    // sum_l g_l e^{-beta l spacing}, the exact effect of convolving on an
    // infinite grid before integrating
    let mut factor = kernel[0];
    for (l, &g) in kernel.iter().enumerate().skip(1) {
        let arg = beta * spacing * T::from_usize_lit(l);
        factor += g * (arg.exp() + (-arg).exp());
    }
    let scale = (beta * beta * mild_broadening * mild_broadening * T::half()).exp();
    plain * factor / scale
}

/// Discretized, normalized Gaussian kernel (one-sided; entry 0 is the
/// center). Extends to `6 sigma`.
pub(crate) fn gaussian_kernel<T: Scalar>(sigma: T, spacing: T) -> Vec<T> {
    let half_width = (sigma / spacing * T::from_f64_lit(6.0))
        .ceil()
        .to_usize()
        .unwrap_or(1)
        .max(1);
    let mut kernel: Vec<T> = (0..=half_width)
        .map(|l| {
            let x = spacing * T::from_usize_lit(l) / sigma;
            (-(x * x) * T::half()).exp()
        })
        .collect();
    let total = kernel[0] + kernel.iter().skip(1).map(|&g| g + g).sum::<T>();
    for g in &mut kernel {
        *g = *g / total;
    }
    kernel
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn grid_covers_half_open_window() {
        let grid = FrequencyGrid::nyquist_window(0.1f64, 64).unwrap();
        let edge = std::f64::consts::PI / 0.1;
        assert_relative_eq!(grid.omega(0), -edge);
        assert!(grid.omega(63) < edge);
        assert_relative_eq!(grid.spacing(), 2.0 * edge / 64.0);
        assert_eq!(FrequencyGrid::<f64>::default_n_omega(8), 256);
        assert_eq!(FrequencyGrid::<f64>::default_n_omega(64), 512);
    }

    #[test]
    fn single_bin_weight() {
        // one unit of mass at omega = -11: W(0.5) = e^{5.5}
        let grid = FrequencyGrid::new(-16.0f64, 16.0, 64).unwrap();
        let j = (0..64).min_by_key(|&j| ((grid.omega(j) + 11.0).abs() * 1e9) as i64).unwrap();
        assert_relative_eq!(grid.omega(j), -11.0);
        let mut weights = vec![0.0; 64];
        weights[j] = 1.0;
        let density = SpectralDensity::new(grid, weights).unwrap();
        let w = weight_from_density(&density, 0.5, 0.0);
        assert_relative_eq!(w, (5.5f64).exp(), max_relative = 1e-12);
        // beta = 0 returns the total mass
        assert_relative_eq!(weight_from_density(&density, 0.0, 0.0), 1.0);
    }

    #[test]
    fn broadening_factor_cancels_to_high_order() {
        let grid = FrequencyGrid::new(-16.0f64, 16.0, 512).unwrap();
        let mut weights = vec![0.0; 512];
        weights[160] = 0.7;
        weights[300] = 0.3;
        let density = SpectralDensity::new(grid, weights).unwrap();
        let beta = 0.9;
        let plain = weight_from_density(&density, beta, 0.0);
        let broadened = weight_from_density(&density, beta, grid.spacing());
        assert_relative_eq!(plain, broadened, max_relative = 1e-8);
    }

    #[test]
    fn moments_of_two_point_density() {
        let grid = FrequencyGrid::new(-2.0f64, 2.0, 4).unwrap();
        // bins at -2, -1, 0, 1; masses 0.5 at -2 and 0.5 at 0
        let density = SpectralDensity::new(grid, vec![0.5, 0.0, 0.5, 0.0]).unwrap();
        assert_relative_eq!(density.mean(), -1.0);
        assert_relative_eq!(density.std_dev(), 1.0);
        assert_relative_eq!(density.total_mass(), 1.0);
    }
}
