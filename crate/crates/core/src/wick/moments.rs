//! Moment adjustment: re-impose the exactly known mean and standard
//! deviation of a product-state density after truncation.

use log::warn;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::SpectralDensity;

/// Renormalize to unit mass, then map `omega -> E_psi + (sigma_psi /
/// sigma_hat)(omega - mu_hat)` so the first two moments match exactly, and
/// re-bin onto the original grid (linear split between neighboring bins,
/// which conserves mass and mean; the re-binning perturbs mean and std by
/// at most one grid spacing).
pub fn adjust_moments<T: Scalar>(
    density: &SpectralDensity<T>,
    e_psi: T,
    sigma_psi: T,
) -> Result<SpectralDensity<T>> {
    let mass = density.total_mass();
    if !(mass > T::zero()) {
        return Err(Error::InvalidParameter("moment adjustment needs positive total mass".into()));
    }
    let grid = *density.grid();
    let mu = density.mean();
    let sigma = density.std_dev();
    let mut out = vec![T::zero(); grid.n_omega()];

    if sigma == T::zero() {
        if sigma_psi > T::zero() {
            warn!(
                "single-bin density cannot match a positive energy spread; \
                 placing unit mass at the mean energy"
            );
        }
        deposit(&mut out, &grid, e_psi, T::one());
        return SpectralDensity::new(grid, out);
    }

    let stretch = sigma_psi / sigma;
    for (omega, &w) in grid.omegas().zip(density.weights()) {
        if w != T::zero() {
            let target = e_psi + stretch * (omega - mu);
            deposit(&mut out, &grid, target, w / mass);
        }
    }
    SpectralDensity::new(grid, out)
}

/// Linear split of `mass` between the two bins bracketing `omega`;
/// positions outside the window are clamped to the edge bins.
fn deposit<T: Scalar>(out: &mut [T], grid: &super::FrequencyGrid<T>, omega: T, mass: T) {
    let n = out.len();
    let u = (omega - grid.omega_min()) / grid.spacing();
    if u <= T::zero() {
        out[0] += mass;
        return;
    }
    let max_u = T::from_usize_lit(n - 1);
    if u >= max_u {
        out[n - 1] += mass;
        return;
    }
    let j = u.floor().to_usize().unwrap();
    let frac = u - u.floor();
    out[j] += mass * (T::one() - frac);
    out[j + 1] += mass * frac;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wick::FrequencyGrid;
    use approx::assert_relative_eq;

    #[test]
    fn already_matching_moments_change_little() {
        let grid = FrequencyGrid::new(-8.0f64, 8.0, 128).unwrap();
        let spacing = grid.spacing();
        let mut weights = vec![0.0; 128];
        weights[40] = 0.5;
        weights[80] = 0.5;
        let density = SpectralDensity::new(grid, weights).unwrap();
        let adjusted = adjust_moments(&density, density.mean(), density.std_dev()).unwrap();
        assert_relative_eq!(adjusted.total_mass(), 1.0, epsilon = 1e-12);
        assert!((adjusted.mean() - density.mean()).abs() <= spacing);
        assert!((adjusted.std_dev() - density.std_dev()).abs() <= spacing);
    }

    #[test]
    fn moments_are_imposed() {
        let grid = FrequencyGrid::new(-8.0f64, 8.0, 256).unwrap();
        let spacing = grid.spacing();
        let mut weights = vec![0.0; 256];
        weights[60] = 0.3;
        weights[100] = 0.5;
        weights[170] = 0.2;
        let density = SpectralDensity::new(grid, weights).unwrap();
        let (e, sigma) = (-1.7, 2.4);
        let adjusted = adjust_moments(&density, e, sigma).unwrap();
        assert!((adjusted.mean() - e).abs() <= spacing, "mean {}", adjusted.mean());
        assert!((adjusted.std_dev() - sigma).abs() <= spacing, "std {}", adjusted.std_dev());
        assert_relative_eq!(adjusted.total_mass(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn single_bin_with_positive_target_spread() {
        let grid = FrequencyGrid::new(-8.0f64, 8.0, 64).unwrap();
        let mut weights = vec![0.0; 64];
        weights[10] = 2.0; // unnormalized on purpose
        let density = SpectralDensity::new(grid, weights).unwrap();
        let adjusted = adjust_moments(&density, -3.0, 1.0).unwrap();
        assert_relative_eq!(adjusted.total_mass(), 1.0, epsilon = 1e-12);
        assert!((adjusted.mean() + 3.0).abs() <= grid.spacing());
        // mass stays within the two bins around the target energy
        let support: Vec<usize> =
            adjusted.weights().iter().enumerate().filter(|(_, &w)| w > 0.0).map(|(j, _)| j).collect();
        assert!(support.len() <= 2);
    }

    #[test]
    fn empty_density_rejected() {
        let grid = FrequencyGrid::new(-8.0f64, 8.0, 64).unwrap();
        let density = SpectralDensity::new(grid, vec![0.0; 64]).unwrap();
        assert!(adjust_moments(&density, 0.0, 1.0).is_err());
    }
}
