//! Dense full diagonalization backend for small systems.
//!
//! The eigendecomposition is computed once and reused for echoes, local
//! densities of states, Boltzmann weights and exact thermal averages; it is
//! the oracle everything else is checked against.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, TimeSeries};
use crate::lattice::{Lattice, TfimParams};
use crate::scalar::Scalar;
use crate::spin::SpinConfig;

use super::hamiltonian::bond_energies;

/// Largest site count handled by dense diagonalization.
pub const FULL_DIAG_MAX_SITES: usize = 14;

pub struct FullDiag<T> {
    n_sites: usize,
    dim: usize,
    /// Ascending eigenvalues.
    energies: Vec<T>,
    /// Column-major eigenvectors: `vectors[k * dim + s]`.
    vectors: Vec<T>,
}

impl<T: Scalar> FullDiag<T> {
    pub fn new(lattice: &Lattice, params: &TfimParams<T>) -> Result<Self> {
        let n_sites = lattice.n_sites();
        if n_sites > FULL_DIAG_MAX_SITES {
            return Err(Error::CapacityExceeded(format!(
                "full diagonalization supports up to {FULL_DIAG_MAX_SITES} sites, got {n_sites}"
            )));
        }
        let dim = 1usize << n_sites;
        let diag = bond_energies(lattice, params.j);
        let mut matrix = vec![T::zero(); dim * dim];
        for s in 0..dim {
            matrix[s * dim + s] = diag[s];
            if params.h_x != T::zero() {
                for i in 0..n_sites {
                    matrix[s * dim + (s ^ (1 << i))] = params.h_x;
                }
            }
        }
        let (energies, vectors) = T::symmetric_eigen(dim, &matrix);
        Ok(Self { n_sites, dim, energies, vectors })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn energies(&self) -> &[T] {
        &self.energies
    }

    /// `|<psi|n>|^2` for every eigenstate.
    pub fn overlaps(&self, psi: &SpinConfig) -> Vec<T> {
        let s = psi.bits() as usize;
        (0..self.dim)
            .map(|k| {
                let c = self.vectors[k * self.dim + s];
                c * c
            })
            .collect()
    }

    /// `G(t_k) = sum_n |<psi|n>|^2 e^{-i E_n t_k}`.
    pub fn echoes(&self, psi: &SpinConfig, grid: &TimeGrid<T>) -> TimeSeries<T> {
        let overlaps = self.overlaps(psi);
        let values = grid
            .times()
            .map(|t| {
                let mut g = Complex::new(T::zero(), T::zero());
                for (o, &e) in overlaps.iter().zip(&self.energies) {
                    if *o != T::zero() {
                        g += Complex::new(T::zero(), -e * t).exp() * *o;
                    }
                }
                g
            })
            .collect();
        TimeSeries::exact(*grid, values).expect("grid and values agree by construction")
    }

    /// `W_psi(beta) = sum_n |<psi|n>|^2 e^{-beta E_n}`.
    pub fn boltzmann(&self, psi: &SpinConfig, beta: T) -> T {
        self.overlaps(psi)
            .iter()
            .zip(&self.energies)
            .map(|(&o, &e)| o * (-beta * e).exp())
            .sum()
    }

    /// Boltzmann weights of every basis state at once.
    pub fn boltzmann_table(&self, beta: T) -> Vec<T> {
        let mut weights = vec![T::zero(); self.dim];
        for k in 0..self.dim {
            let factor = (-beta * self.energies[k]).exp();
            let col = &self.vectors[k * self.dim..(k + 1) * self.dim];
            for (w, &c) in weights.iter_mut().zip(col) {
                *w += c * c * factor;
            }
        }
        weights
    }

    /// Exact thermal average of the squared magnetization.
    pub fn thermal_m2(&self, beta: T) -> T {
        let weights = self.boltzmann_table(beta);
        let mut num = T::zero();
        let mut den = T::zero();
        for (s, &w) in weights.iter().enumerate() {
            let psi = SpinConfig::new(s as u64, self.n_sites).unwrap();
            num += w * psi.magnetization_sq();
            den += w;
        }
        num / den
    }

    /// Smallest and largest eigenvalue.
    pub fn extremal(&self) -> (T, T) {
        (self.energies[0], self.energies[self.dim - 1])
    }
}
