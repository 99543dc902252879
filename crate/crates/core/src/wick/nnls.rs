//! Non-negative least squares reconstruction of the density of states.
//!
//! The density is the nonnegative minimizer of the variance-weighted fit
//!
//! `chi^2[D] = sum_k |G(t_k) - sum_j e^{-i omega_j t_k} D_j|^2 / Var_k`
//!
//! solved with the Lawson-Hanson active-set algorithm. The exactly known
//! `G(0) = 1` enters as a normalization row with a much smaller effective
//! standard deviation than the measured points.

use crate::error::{Error, Result};
use crate::grid::TimeSeries;
use crate::scalar::Scalar;

use super::{FrequencyGrid, SpectralDensity};

/// Effective standard deviation assigned to exact data when building the
/// weighted system (any common scale cancels in the minimizer).
fn exact_sigma<T: Scalar>() -> T {
    T::from_f64_lit(1e-8).max(T::epsilon() * T::from_f64_lit(16.0))
}

/// Default ratio of the normalization-row sigma to the median point sigma.
fn t0_sigma_factor<T: Scalar>() -> T {
    T::from_f64_lit(1e-4)
}

/// Per-row standard deviations used for weighting and for chi-squared.
///
/// Exact series get a uniform small sigma (equivalent to unit weights in
/// the solver, and strict in the discrepancy sense: any avoidable residual
/// is enormous against it). Noisy series use the stored variances, with
/// zero-variance points floored to the normalization sigma.
#[derive(Debug, Clone)]
pub struct EffectiveSigmas<T> {
    pub re: Vec<T>,
    pub im: Vec<T>,
    pub norm_row: T,
}

impl<T: Scalar> EffectiveSigmas<T> {
    pub fn from_series(series: &TimeSeries<T>) -> Self {
        Self::with_t0_factor(series, t0_sigma_factor::<T>())
    }

    pub fn with_t0_factor(series: &TimeSeries<T>, t0_factor: T) -> Self {
        let n = series.n_t();
        let mut re: Vec<T> = series.re_var().iter().map(|&v| v.sqrt()).collect();
        let mut im: Vec<T> = series.im_var().iter().map(|&v| v.sqrt()).collect();
        let mut positive: Vec<T> =
            re.iter().chain(im.iter()).copied().filter(|&s| s > T::zero()).collect();
        if positive.is_empty() {
            let sigma = exact_sigma::<T>();
            return Self { re: vec![sigma; n], im: vec![sigma; n], norm_row: sigma * t0_factor };
        }
        positive.sort_by(|a, b| a.partial_cmp(b).expect("sigma is not NaN"));
        let median = positive[positive.len() / 2];
        let floor = median * t0_factor;
        for s in re.iter_mut().chain(im.iter_mut()) {
            if *s < floor {
                *s = floor;
            }
        }
        Self { re, im, norm_row: floor }
    }
}

/// Variance-weighted chi-squared of a density against a series, summed over
/// the `2 n_t` measured components (the normalization row is not included).
pub fn chi_squared<T: Scalar>(density: &SpectralDensity<T>, series: &TimeSeries<T>) -> T {
    chi_squared_weighted(density, series, &EffectiveSigmas::from_series(series))
}

pub fn chi_squared_weighted<T: Scalar>(
    density: &SpectralDensity<T>,
    series: &TimeSeries<T>,
    sigmas: &EffectiveSigmas<T>,
) -> T {
    let mut chi2 = T::zero();
    for (k, (g, t)) in series.values().iter().zip(series.grid().times()).enumerate() {
        let mut model_re = T::zero();
        let mut model_im = T::zero();
        for (omega, &mass) in density.grid().omegas().zip(density.weights()) {
            if mass != T::zero() {
                let arg = omega * t;
                model_re += mass * arg.cos();
                model_im -= mass * arg.sin();
            }
        }
        let dre = (g.re - model_re) / sigmas.re[k];
        let dim = (g.im - model_im) / sigmas.im[k];
        chi2 += dre * dre + dim * dim;
    }
    chi2
}

/// Nonnegative density best fitting the series on the grid.
pub fn nnls_density<T: Scalar>(
    series: &TimeSeries<T>,
    grid: &FrequencyGrid<T>,
) -> Result<SpectralDensity<T>> {
    nnls_density_weighted(series, grid, &EffectiveSigmas::from_series(series))
}

pub fn nnls_density_weighted<T: Scalar>(
    series: &TimeSeries<T>,
    grid: &FrequencyGrid<T>,
    sigmas: &EffectiveSigmas<T>,
) -> Result<SpectralDensity<T>> {
    let n_t = series.n_t();
    let n = grid.n_omega();
    let m = 2 * n_t + 1;
    let mut a = vec![T::zero(); m * n];
    let mut b = vec![T::zero(); m];
    for (k, (g, t)) in series.values().iter().zip(series.grid().times()).enumerate() {
        let w_re = T::one() / sigmas.re[k];
        let w_im = T::one() / sigmas.im[k];
        for (j, omega) in grid.omegas().enumerate() {
            let arg = omega * t;
            a[(2 * k) * n + j] = arg.cos() * w_re;
            a[(2 * k + 1) * n + j] = -arg.sin() * w_im;
        }
        b[2 * k] = g.re * w_re;
        b[2 * k + 1] = g.im * w_im;
    }
    // normalization row: sum_j D_j = G(0) = 1
    let w0 = T::one() / sigmas.norm_row;
    for j in 0..n {
        a[(m - 1) * n + j] = w0;
    }
    b[m - 1] = w0;

    let x = lawson_hanson(m, n, &a, &b, 3 * n)?;
    SpectralDensity::new(*grid, x)
}

/// Lawson-Hanson active-set NNLS: minimize `||A x - b||` subject to
/// `x >= 0`. `a` is row-major `m x n`.
pub(crate) fn lawson_hanson<T: Scalar>(
    m: usize,
    n: usize,
    a: &[T],
    b: &[T],
    max_iter: usize,
) -> Result<Vec<T>> {
    let mut x = vec![T::zero(); n];
    let mut passive: Vec<usize> = Vec::new();
    let mut in_passive = vec![false; n];
    let mut residual = b.to_vec();

    // dual tolerance relative to the initial gradient scale
    let grad0 = mat_t_vec(m, n, a, &residual);
    let scale = grad0.iter().fold(T::zero(), |acc, &g| acc.max(g.abs()));
    let tol = scale * T::epsilon() * T::from_f64_lit(256.0);

    let mut solves = 0usize;
    let mut workspace = QrWorkspace::new(m);
    // candidates whose insertion produced a nonpositive coefficient; they
    // stay barred until the residual changes, which breaks the add-remove
    // cycling the original algorithm guards against
    let mut barred = vec![false; n];
    'outer: loop {
        let w = mat_t_vec(m, n, a, &residual);
        let mut z = loop {
            let mut best: Option<(usize, T)> = None;
            for (j, &wj) in w.iter().enumerate() {
                if !in_passive[j] && !barred[j] && best.map_or(true, |(_, bw)| wj > bw) {
                    best = Some((j, wj));
                }
            }
            let Some((candidate, w_max)) = best else { break 'outer };
            if w_max <= tol || passive.len() == m {
                break 'outer;
            }
            // trial insertion: reject the candidate if its own coefficient
            // comes back nonpositive
            passive.push(candidate);
            solves += 1;
            if solves > max_iter {
                return Err(Error::NonConvergence(format!(
                    "active-set iteration cap {max_iter} reached (grid too fine or ill-posed)"
                )));
            }
            let z = workspace.least_squares(m, n, a, b, &passive)?;
            if *z.last().expect("nonempty passive set") > T::zero() {
                in_passive[candidate] = true;
                break z;
            }
            passive.pop();
            barred[candidate] = true;
        };

        loop {
            if z.iter().all(|&v| v > T::zero()) {
                for (&p, &zp) in passive.iter().zip(&z) {
                    x[p] = zp;
                }
                break;
            }
            // interpolate toward z until the first passive variable hits zero
            let mut alpha = T::infinity();
            let mut leaving = usize::MAX;
            for (idx, (&p, &zp)) in passive.iter().zip(&z).enumerate() {
                if zp <= T::zero() {
                    let step = x[p] / (x[p] - zp);
                    if step < alpha {
                        alpha = step;
                        leaving = idx;
                    }
                }
            }
            for (&p, &zp) in passive.iter().zip(&z) {
                x[p] = x[p] + alpha * (zp - x[p]);
            }
            x[passive[leaving]] = T::zero();
            let mut idx = 0;
            passive.retain(|&p| {
                let keep = x[p] > T::zero() && idx != leaving;
                if !keep {
                    in_passive[p] = false;
                    x[p] = T::zero();
                }
                idx += 1;
                keep
            });
            solves += 1;
            if solves > max_iter {
                return Err(Error::NonConvergence(format!(
                    "active-set iteration cap {max_iter} reached (grid too fine or ill-posed)"
                )));
            }
            z = workspace.least_squares(m, n, a, b, &passive)?;
        }

        residual.copy_from_slice(b);
        for &p in &passive {
            let xp = x[p];
            for i in 0..m {
                residual[i] -= a[i * n + p] * xp;
            }
        }
        barred.iter_mut().for_each(|b| *b = false);
    }
    Ok(x)
}

/// `A^T v` for row-major `A`.
fn mat_t_vec<T: Scalar>(m: usize, n: usize, a: &[T], v: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for i in 0..m {
        let vi = v[i];
        if vi != T::zero() {
            let row = &a[i * n..(i + 1) * n];
            for (o, &aij) in out.iter_mut().zip(row) {
                *o += aij * vi;
            }
        }
    }
    out
}

/// Householder QR least squares on a column subset of `A`.
struct QrWorkspace<T> {
    cols: Vec<T>,
    rhs: Vec<T>,
    u: Vec<T>,
}

impl<T: Scalar> QrWorkspace<T> {
    fn new(m: usize) -> Self {
        Self { cols: Vec::new(), rhs: vec![T::zero(); m], u: vec![T::zero(); m] }
    }

    /// Minimize `||A_P z - b||` over the columns listed in `passive`.
    fn least_squares(
        &mut self,
        m: usize,
        n: usize,
        a: &[T],
        b: &[T],
        passive: &[usize],
    ) -> Result<Vec<T>> {
        let k = passive.len();
        debug_assert!(k <= m);
        self.cols.clear();
        self.cols.resize(k * m, T::zero());
        for (c, &p) in passive.iter().enumerate() {
            for i in 0..m {
                self.cols[c * m + i] = a[i * n + p];
            }
        }
        self.rhs[..m].copy_from_slice(b);

        for j in 0..k {
            // Householder vector for column j below the diagonal
            let mut norm_sq = T::zero();
            for i in j..m {
                let v = self.cols[j * m + i];
                norm_sq += v * v;
            }
            let norm = norm_sq.sqrt();
            if norm == T::zero() {
                return Err(Error::NonConvergence(
                    "rank-deficient least-squares subproblem".into(),
                ));
            }
            let x0 = self.cols[j * m + j];
            let r_jj = if x0 >= T::zero() { -norm } else { norm };
            self.u[j] = x0 - r_jj;
            for i in (j + 1)..m {
                self.u[i] = self.cols[j * m + i];
            }
            let u_norm_sq = norm_sq - x0 * x0 + self.u[j] * self.u[j];
            self.cols[j * m + j] = r_jj;

            for l in (j + 1)..k {
                let mut dot = T::zero();
                for i in j..m {
                    dot += self.u[i] * self.cols[l * m + i];
                }
                let f = T::two() * dot / u_norm_sq;
                for i in j..m {
                    let ui = self.u[i];
                    self.cols[l * m + i] -= f * ui;
                }
            }
            let mut dot = T::zero();
            for i in j..m {
                dot += self.u[i] * self.rhs[i];
            }
            let f = T::two() * dot / u_norm_sq;
            for i in j..m {
                self.rhs[i] -= f * self.u[i];
            }
        }

        // back substitution on the upper-triangular factor
        let mut z = vec![T::zero(); k];
        for j in (0..k).rev() {
            let mut acc = self.rhs[j];
            for l in (j + 1)..k {
                acc -= self.cols[l * m + j] * z[l];
            }
            let r_jj = self.cols[j * m + j];
            if r_jj == T::zero() {
                return Err(Error::NonConvergence(
                    "singular triangular factor in least squares".into(),
                ));
            }
            z[j] = acc / r_jj;
        }
        Ok(z)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::TimeGrid;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    #[test]
    fn solver_matches_unconstrained_when_feasible() {
        // A = I, b >= 0: solution is b
        let a = [1.0, 0.0, 0.0, 1.0];
        let b = [0.3, 0.7];
        let x = lawson_hanson(2, 2, &a, &b, 10).unwrap();
        assert_relative_eq!(x[0], 0.3);
        assert_relative_eq!(x[1], 0.7);
    }

    #[test]
    fn solver_clamps_negative_component() {
        // unconstrained solution of min ||x1 + x2 - [1, -1]|| has a
        // negative part; NNLS must zero it
        let a = [1.0, 0.0, 0.0, 1.0];
        let b = [1.0, -1.0];
        let x = lawson_hanson(2, 2, &a, &b, 10).unwrap();
        assert_relative_eq!(x[0], 1.0);
        assert_relative_eq!(x[1], 0.0);
    }

    #[test]
    fn solver_handles_correlated_columns() {
        // 3 rows, 4 columns, known sparse nonnegative generator
        let a = [
            1.0, 0.5, 0.2, 0.1, //
            0.0, 1.0, 0.5, 0.3, //
            0.0, 0.0, 1.0, 0.9,
        ];
        let x_true = [0.0, 2.0, 0.0, 1.5];
        let mut b = [0.0; 3];
        for i in 0..3 {
            for j in 0..4 {
                b[i] += a[i * 4 + j] * x_true[j];
            }
        }
        let x = lawson_hanson(3, 4, &a, &b, 40).unwrap();
        let mut r = [0.0f64; 3];
        for i in 0..3 {
            r[i] = b[i] - (0..4).map(|j| a[i * 4 + j] * x[j]).sum::<f64>();
        }
        let res: f64 = r.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(res < 1e-12, "residual {res}, x = {x:?}");
        assert!(x.iter().all(|&v| v >= 0.0));
    }

    #[test]
    fn recovers_on_grid_deltas_exactly() {
        let dt = std::f64::consts::PI / 16.0;
        let grid = FrequencyGrid::nyquist_window(dt, 256).unwrap();
        let spots = [(40usize, 0.5), (128, 0.3), (200, 0.2)];
        let tgrid = TimeGrid::new(dt, 16).unwrap();
        let values: Vec<Complex<f64>> = tgrid
            .times()
            .map(|t| {
                spots
                    .iter()
                    .map(|&(j, w)| Complex::new(0.0, -grid.omega(j) * t).exp() * w)
                    .sum()
            })
            .collect();
        let series = TimeSeries::exact(tgrid, values).unwrap();
        let density = nnls_density(&series, &grid).unwrap();
        for (j, &w) in density.weights().iter().enumerate() {
            let expected = spots.iter().find(|&&(s, _)| s == j).map_or(0.0, |&(_, v)| v);
            assert!(
                (w - expected).abs() < 1e-8,
                "bin {j}: got {w}, expected {expected}"
            );
        }
        assert!(density.is_nonnegative());
        let chi2 = chi_squared(&density, &series);
        assert!(chi2 < 1e-6, "chi2 = {chi2}");
    }

    #[test]
    fn weighting_prefers_accurate_points() {
        // two incompatible measurements of the same frequency content; the
        // low-variance one must win
        let dt = 0.1f64;
        let tgrid = TimeGrid::new(dt, 2).unwrap();
        let grid = FrequencyGrid::nyquist_window(dt, 8).unwrap();
        let omega = grid.omega(5);
        let good = Complex::new(0.0, -omega * dt).exp();
        let bad = Complex::new(0.35, 0.1);
        let series = TimeSeries::with_noise(
            tgrid,
            vec![good, bad],
            vec![1e-8, 1.0],
            vec![1e-8, 1.0],
            100,
        )
        .unwrap();
        let density = nnls_density(&series, &grid).unwrap();
        let sigmas = EffectiveSigmas::from_series(&series);
        assert!(sigmas.re[0] < sigmas.re[1]);
        // the fitted model should track the good point closely
        let model_re: f64 = grid
            .omegas()
            .zip(density.weights())
            .map(|(w, &m)| m * (w * dt).cos())
            .sum();
        assert!((model_re - good.re).abs() < 1e-3, "model {model_re} vs {}", good.re);
    }

    #[test]
    fn iteration_cap_reported() {
        let dt = 0.5f64;
        let tgrid = TimeGrid::new(dt, 4).unwrap();
        let values = tgrid.times().map(|t| Complex::new(0.0, -1.3 * t).exp()).collect();
        let series = TimeSeries::exact(tgrid, values).unwrap();
        let grid = FrequencyGrid::nyquist_window(dt, 64).unwrap();
        // max_iter 0 forces the failure path
        let sigmas = EffectiveSigmas::from_series(&series);
        let n_t = series.n_t();
        let n = grid.n_omega();
        let m = 2 * n_t + 1;
        let mut a = vec![0.0; m * n];
        let mut b = vec![0.0; m];
        for (k, (g, t)) in series.values().iter().zip(series.grid().times()).enumerate() {
            for (j, omega) in grid.omegas().enumerate() {
                a[(2 * k) * n + j] = (omega * t).cos() / sigmas.re[k];
                a[(2 * k + 1) * n + j] = -(omega * t).sin() / sigmas.im[k];
            }
            b[2 * k] = g.re / sigmas.re[k];
            b[2 * k + 1] = g.im / sigmas.im[k];
        }
        assert!(matches!(
            lawson_hanson(m, n, &a, &b, 1),
            Err(Error::NonConvergence(_))
        ));
    }
}
