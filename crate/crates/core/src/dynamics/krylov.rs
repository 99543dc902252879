//! Lanczos extremal eigenvalues and Krylov-subspace propagation.
//!
//! Both work off matrix-vector products with the sparse Hamiltonian, so
//! they scale to system sizes where dense diagonalization is not an option.

use num_complex::Complex;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, TimeSeries};
use crate::scalar::Scalar;
use crate::spin::SpinConfig;

use super::hamiltonian::SparseHamiltonian;

/// Fixed seed for the Lanczos start vector; extremal values do not depend
/// on it once converged, determinism does.
const LANCZOS_SEED: u64 = 0x1ce_b00da;

/// Relative tolerance of Krylov propagation.
pub fn echo_tolerance<T: Scalar>() -> T {
    let eps32 = T::epsilon() * T::from_f64_lit(32.0);
    T::from_f64_lit(1e-10).max(eps32)
}

/// Smallest and largest eigenvalue via plain Lanczos (three-term
/// recurrence, no reorthogonalization; ghost eigenvalues duplicate
/// converged Ritz values and leave the extremes intact).
pub fn lanczos_extremal<T: Scalar>(
    h: &SparseHamiltonian<T>,
    max_iter: usize,
    tol: T,
) -> Result<(T, T)> {
    let dim = h.dim();
    let mut rng = ChaCha12Rng::seed_from_u64(LANCZOS_SEED);
    let mut v: Vec<T> = (0..dim).map(|_| T::from_f64_lit(rng.random::<f64>() - 0.5)).collect();
    normalize(&mut v);
    let mut v_prev = vec![T::zero(); dim];
    let mut w = vec![T::zero(); dim];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();

    let cap = max_iter.min(dim);
    let mut last: Option<(T, T)> = None;
    let mut stable_checks = 0usize;
    for m in 1..=cap {
        h.apply_real(&v, &mut w);
        let alpha = dot(&v, &w);
        alphas.push(alpha);
        for i in 0..dim {
            w[i] = w[i] - alpha * v[i] - betas.last().copied().unwrap_or_else(T::zero) * v_prev[i];
        }
        let beta = norm(&w);
        let scale = alpha.abs().max(beta).max(T::one());
        if beta <= scale * T::epsilon() * T::from_f64_lit(64.0) {
            // invariant subspace found: its spectrum is exact
            let (lo, hi) = tridiag_extremes(&alphas, &betas);
            return Ok((lo, hi));
        }
        betas.push(beta);
        std::mem::swap(&mut v_prev, &mut v);
        for i in 0..dim {
            v[i] = w[i] / beta;
        }

        let check_now = m % 10 == 0 || m == cap;
        if check_now && m >= 3 {
            let (lo, hi) = tridiag_extremes(&alphas, &betas[..betas.len() - 1]);
            if let Some((plo, phi)) = last {
                let scale = lo.abs().max(hi.abs()).max(T::one());
                if (lo - plo).abs() <= tol * scale && (hi - phi).abs() <= tol * scale {
                    stable_checks += 1;
                    if stable_checks >= 3 {
                        return Ok((lo, hi));
                    }
                } else {
                    stable_checks = 0;
                }
            }
            last = Some((lo, hi));
        }
    }
    if cap == dim {
        // Krylov space is the whole space; the last estimate is exact
        let (lo, hi) = tridiag_extremes(&alphas, &betas[..betas.len().saturating_sub(1)]);
        return Ok((lo, hi));
    }
    Err(Error::NonConvergence(format!("Lanczos extremes not stable after {cap} iterations")))
}

/// Krylov propagator: applies `exp(-i H dt)` step by step and records
/// overlaps with the initial state.
pub struct KrylovPropagator<'a, T> {
    h: &'a SparseHamiltonian<T>,
    tol: T,
    max_m: usize,
}

impl<'a, T: Scalar> KrylovPropagator<'a, T> {
    pub fn new(h: &'a SparseHamiltonian<T>) -> Self {
        Self { h, tol: echo_tolerance::<T>(), max_m: 90 }
    }

    /// `G(t_k) = <psi | e^{-i H t_k} | psi>` over the grid.
    pub fn echoes(&self, psi: &SpinConfig, grid: &TimeGrid<T>) -> Result<TimeSeries<T>> {
        let dim = self.h.dim();
        let s0 = psi.bits() as usize;
        let mut phi = vec![Complex::new(T::zero(), T::zero()); dim];
        phi[s0] = Complex::new(T::one(), T::zero());
        let mut values = Vec::with_capacity(grid.n_t());
        for _ in 0..grid.n_t() {
            self.step(&mut phi, grid.dt())?;
            values.push(phi[s0]);
        }
        TimeSeries::exact(*grid, values)
    }

    /// One step `phi <- exp(-i H dt) phi`, adaptive Krylov dimension.
    pub fn step(&self, phi: &mut [Complex<T>], dt: T) -> Result<()> {
        let dim = phi.len();
        let beta0 = cnorm(phi);
        if beta0 == T::zero() {
            return Ok(());
        }
        let mut basis: Vec<Vec<Complex<T>>> = Vec::new();
        let mut first = phi.to_vec();
        for a in first.iter_mut() {
            *a = *a / beta0;
        }
        basis.push(first);
        let mut alphas: Vec<T> = Vec::new();
        let mut betas: Vec<T> = Vec::new();
        let mut w = vec![Complex::new(T::zero(), T::zero()); dim];

        let coeffs = loop {
            let m = basis.len();
            self.h.apply(&basis[m - 1], &mut w);
            let alpha = cdot(&basis[m - 1], &w).re;
            alphas.push(alpha);
            for i in 0..dim {
                let mut x = w[i] - basis[m - 1][i] * alpha;
                if m >= 2 {
                    x = x - basis[m - 2][i] * betas[m - 2];
                }
                w[i] = x;
            }
            // one pass of reorthogonalization keeps the short recurrence honest
            for b in &basis {
                let proj = cdot(b, &w);
                for i in 0..dim {
                    w[i] = w[i] - b[i] * proj;
                }
            }
            let beta = cnorm(&w);
            let coeffs = expm_tridiag_e1(&alphas, &betas, dt);
            let breakdown = beta <= T::epsilon() * T::from_f64_lit(64.0) * alpha.abs().max(T::one());
            let err_est = beta * coeffs[m - 1].norm() * dt.abs();
            if breakdown || err_est <= self.tol {
                break coeffs;
            }
            if m == self.max_m {
                return Err(Error::NonConvergence(format!(
                    "Krylov step did not reach tolerance with {m} vectors (dt = {dt})"
                )));
            }
            betas.push(beta);
            let mut next = w.clone();
            for a in next.iter_mut() {
                *a = *a / beta;
            }
            basis.push(next);
        };

        for x in phi.iter_mut() {
            *x = Complex::new(T::zero(), T::zero());
        }
        for (b, &c) in basis.iter().zip(&coeffs) {
            let c = c * beta0;
            for i in 0..dim {
                phi[i] += b[i] * c;
            }
        }
        Ok(())
    }
}

/// First column of `exp(-i T dt)` for the symmetric tridiagonal `T`.
fn expm_tridiag_e1<T: Scalar>(alphas: &[T], betas: &[T], dt: T) -> Vec<Complex<T>> {
    let m = alphas.len();
    let mut dense = vec![T::zero(); m * m];
    for i in 0..m {
        dense[i * m + i] = alphas[i];
        if i + 1 < m {
            dense[i * m + i + 1] = betas[i];
            dense[(i + 1) * m + i] = betas[i];
        }
    }
    let (theta, u) = T::symmetric_eigen(m, &dense);
    // exp(-i T dt) e1 = U diag(e^{-i theta dt}) U^T e1
    (0..m)
        .map(|row| {
            let mut acc = Complex::new(T::zero(), T::zero());
            for k in 0..m {
                let phase = Complex::new(T::zero(), -theta[k] * dt).exp();
                acc += phase * (u[k * m + row] * u[k * m]);
            }
            acc
        })
        .collect()
}

fn tridiag_extremes<T: Scalar>(alphas: &[T], betas: &[T]) -> (T, T) {
    let m = alphas.len();
    debug_assert!(betas.len() + 1 >= m);
    let mut dense = vec![T::zero(); m * m];
    for i in 0..m {
        dense[i * m + i] = alphas[i];
        if i + 1 < m {
            dense[i * m + i + 1] = betas[i];
            dense[(i + 1) * m + i] = betas[i];
        }
    }
    let (theta, _) = T::symmetric_eigen(m, &dense);
    (theta[0], theta[m - 1])
}

fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

fn norm<T: Scalar>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn cdot<T: Scalar>(a: &[Complex<T>], b: &[Complex<T>]) -> Complex<T> {
    let mut acc = Complex::new(T::zero(), T::zero());
    for (x, y) in a.iter().zip(b) {
        acc += x.conj() * y;
    }
    acc
}

fn cnorm<T: Scalar>(a: &[Complex<T>]) -> T {
    a.iter().map(|x| x.norm_sqr()).sum::<T>().sqrt()
}

fn normalize<T: Scalar>(v: &mut [T]) {
    let n = norm(v);
    for x in v.iter_mut() {
        *x = *x / n;
    }
}
