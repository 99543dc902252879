//! Shot-noise simulation of the Hadamard-test measurement.
//!
//! Real and imaginary parts are measured by separate circuits, so each gets
//! an independent budget of `n_shots` Bernoulli outcomes per time point.
//! The estimator variances are `Var[Re G] = (1 - Re(G)^2) / N_shots` and
//! likewise for the imaginary part.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Binomial, Distribution, Normal};

use crate::error::{Error, Result};
use crate::grid::TimeSeries;
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NoiseMode {
    /// Zero-mean Gaussian noise with the exact estimator variance.
    Gaussian,
    /// Bernoulli counts: `N_shots` outcomes with `P(0) = (1 + x) / 2`,
    /// returned as the unbiased estimator `(n_0 - n_1) / N_shots`.
    Binomial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShotModel {
    pub n_shots: u64,
    pub mode: NoiseMode,
    pub seed: u64,
}

impl ShotModel {
    pub fn new(n_shots: u64, mode: NoiseMode, seed: u64) -> Result<Self> {
        if n_shots == 0 {
            return Err(Error::InvalidParameter("n_shots must be at least 1".into()));
        }
        Ok(Self { n_shots, mode, seed })
    }

    pub fn gaussian(n_shots: u64, seed: u64) -> Self {
        Self { n_shots, mode: NoiseMode::Gaussian, seed }
    }

    pub fn binomial(n_shots: u64, seed: u64) -> Self {
        Self { n_shots, mode: NoiseMode::Binomial, seed }
    }
}

/// Turn an exact series into a shot-limited estimate. Each (point,
/// component) pair draws from its own counter-derived stream, so the output
/// is independent of evaluation order and bit-identical for a fixed seed.
/// The implicit `t = 0` datum stays exact.
pub fn noisify<T: Scalar>(series: &TimeSeries<T>, model: &ShotModel) -> Result<TimeSeries<T>> {
    if !series.is_exact() {
        return Err(Error::AlreadyNoisy);
    }
    let n = T::from_u64(model.n_shots).unwrap();
    let mut values = Vec::with_capacity(series.n_t());
    let mut re_var = Vec::with_capacity(series.n_t());
    let mut im_var = Vec::with_capacity(series.n_t());
    for (k, g) in series.values().iter().enumerate() {
        let var_re = component_variance(g.re, n)?;
        let var_im = component_variance(g.im, n)?;
        let re = sample_component(g.re, var_re, model, 2 * k as u64);
        let im = sample_component(g.im, var_im, model, 2 * k as u64 + 1);
        values.push(Complex::new(re, im));
        re_var.push(var_re);
        im_var.push(var_im);
    }
    TimeSeries::with_noise(*series.grid(), values, re_var, im_var, model.n_shots)
}

fn component_variance<T: Scalar>(x: T, n_shots: T) -> Result<T> {
    let var = (T::one() - x * x) / n_shots;
    if var < T::zero() {
        return Err(Error::CorruptedSeries(format!(
            "|component| = {} exceeds 1, variance would be negative",
            x.abs()
        )));
    }
    Ok(var)
}

fn sample_component<T: Scalar>(x: T, var: T, model: &ShotModel, stream: u64) -> T {
    let mut rng = ChaCha12Rng::seed_from_u64(model.seed);
    rng.set_stream(stream);
    match model.mode {
        NoiseMode::Gaussian => {
            if var == T::zero() {
                return x;
            }
            let sd = var.to_f64_lossy().sqrt();
            let draw = Normal::new(0.0, sd).expect("positive std").sample(&mut rng);
            x + T::from_f64_lit(draw)
        }
        NoiseMode::Binomial => {
            let p0 = (T::one() + x).to_f64_lossy() / 2.0;
            let n0 = Binomial::new(model.n_shots, p0.clamp(0.0, 1.0))
                .expect("probability in range")
                .sample(&mut rng);
            let n = model.n_shots as f64;
            T::from_f64_lit((2.0 * n0 as f64 - n) / n)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;

    fn test_series() -> TimeSeries<f64> {
        let grid = TimeGrid::new(0.25, 3).unwrap();
        TimeSeries::exact(
            grid,
            vec![
                Complex::new(0.8, -0.3),
                Complex::new(0.2, -0.7),
                Complex::new(-0.4, -0.1),
            ],
        )
        .unwrap()
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let series = test_series();
        let model = ShotModel::gaussian(1000, 42);
        let a = noisify(&series, &model).unwrap();
        let b = noisify(&series, &model).unwrap();
        assert_eq!(a, b);
        let c = noisify(&series, &ShotModel::gaussian(1000, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn double_noisify_rejected() {
        let series = test_series();
        let model = ShotModel::gaussian(1000, 42);
        let noisy = noisify(&series, &model).unwrap();
        assert!(matches!(noisify(&noisy, &model), Err(Error::AlreadyNoisy)));
    }

    #[test]
    fn corrupted_input_rejected() {
        let grid = TimeGrid::new(0.25, 1).unwrap();
        let bad = TimeSeries::exact(grid, vec![Complex::new(1.5, 0.0)]).unwrap();
        assert!(matches!(
            noisify(&bad, &ShotModel::gaussian(10, 0)),
            Err(Error::CorruptedSeries(_))
        ));
    }

    #[test]
    fn large_shot_budget_is_close_to_exact() {
        let series = test_series();
        let model = ShotModel::gaussian(1_000_000_000, 7);
        let noisy = noisify(&series, &model).unwrap();
        for (a, b) in series.values().iter().zip(noisy.values()) {
            assert!((a - b).norm() < 1e-3);
        }
    }

    #[test]
    fn unit_magnitude_component_is_unchanged() {
        let grid = TimeGrid::new(0.25, 1).unwrap();
        let series = TimeSeries::exact(grid, vec![Complex::new(1.0, 0.0)]).unwrap();
        let noisy = noisify(&series, &ShotModel::gaussian(100, 3)).unwrap();
        assert_eq!(noisy.values()[0].re, 1.0);
        assert_eq!(noisy.re_var()[0], 0.0);
        // the imaginary part is 0 there and does fluctuate
        assert!(noisy.im_var()[0] > 0.0);
    }

    #[test]
    fn empirical_variance_matches_formula() {
        let series = test_series();
        for mode in [NoiseMode::Gaussian, NoiseMode::Binomial] {
            let mut sums = vec![(0.0f64, 0.0f64); 3];
            let draws = 20_000;
            for seed in 0..draws {
                let model = ShotModel { n_shots: 100, mode, seed };
                let noisy = noisify(&series, &model).unwrap();
                for (s, (g, g0)) in sums
                    .iter_mut()
                    .zip(noisy.values().iter().zip(series.values()))
                {
                    let d = g.re - g0.re;
                    s.0 += d;
                    s.1 += d * d;
                }
            }
            for (k, &(sum, sum_sq)) in sums.iter().enumerate() {
                let mean = sum / draws as f64;
                let var = sum_sq / draws as f64 - mean * mean;
                let expected = (1.0 - series.values()[k].re.powi(2)) / 100.0;
                let rel = (var - expected).abs() / expected;
                assert!(rel < 0.05, "point {k} mode {mode:?}: rel err {rel}");
                assert!(mean.abs() < 5.0 * (expected / draws as f64).sqrt());
            }
        }
    }

    #[test]
    fn binomial_estimates_stay_bounded() {
        let series = test_series();
        for seed in 0..200 {
            let model = ShotModel::binomial(5, seed);
            let noisy = noisify(&series, &model).unwrap();
            for g in noisy.values() {
                assert!(g.re.abs() <= 1.0 && g.im.abs() <= 1.0);
            }
        }
    }
}
