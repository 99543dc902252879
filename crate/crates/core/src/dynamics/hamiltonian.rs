//! Sparse application of the TFIM Hamiltonian on statevectors.
//!
//! In the Z product basis the bond term is diagonal and the field term
//! flips single bits, so `H v` needs one table of diagonal energies and one
//! XOR per site; the full matrix is never formed.

use num_complex::Complex;
use rayon::prelude::*;

use crate::lattice::{Lattice, TfimParams};
use crate::scalar::Scalar;
use crate::spin::SpinConfig;

/// Dimension above which applications are parallelized.
const PAR_MIN_DIM: usize = 1 << 14;

pub struct SparseHamiltonian<T> {
    n_sites: usize,
    dim: usize,
    h_x: T,
    diag: Vec<T>,
}

impl<T: Scalar> SparseHamiltonian<T> {
    pub fn new(lattice: &Lattice, params: &TfimParams<T>) -> Self {
        let n_sites = lattice.n_sites();
        assert!(n_sites <= 26, "statevector backend is limited to 26 sites");
        let dim = 1usize << n_sites;
        let diag = bond_energies(lattice, params.j);
        Self { n_sites, dim, h_x: params.h_x, diag }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Diagonal (bond) energy of every basis state.
    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    /// `out = H input` for complex amplitudes.
    pub fn apply(&self, input: &[Complex<T>], out: &mut [Complex<T>]) {
        debug_assert_eq!(input.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        let h_x = self.h_x;
        let n = self.n_sites;
        let diag = &self.diag;
        let kernel = |s: usize, out_s: &mut Complex<T>| {
            let mut acc = input[s] * diag[s];
            if h_x != T::zero() {
                for i in 0..n {
                    acc = acc + input[s ^ (1 << i)] * h_x;
                }
            }
            *out_s = acc;
        };
        if self.dim >= PAR_MIN_DIM {
            out.par_iter_mut().enumerate().for_each(|(s, o)| kernel(s, o));
        } else {
            out.iter_mut().enumerate().for_each(|(s, o)| kernel(s, o));
        }
    }

    /// `out = H input` for real amplitudes (the Hamiltonian is real in this
    /// basis).
    pub fn apply_real(&self, input: &[T], out: &mut [T]) {
        debug_assert_eq!(input.len(), self.dim);
        debug_assert_eq!(out.len(), self.dim);
        let h_x = self.h_x;
        let n = self.n_sites;
        let diag = &self.diag;
        let kernel = |s: usize, out_s: &mut T| {
            let mut acc = input[s] * diag[s];
            if h_x != T::zero() {
                for i in 0..n {
                    acc += input[s ^ (1 << i)] * h_x;
                }
            }
            *out_s = acc;
        };
        if self.dim >= PAR_MIN_DIM {
            out.par_iter_mut().enumerate().for_each(|(s, o)| kernel(s, o));
        } else {
            out.iter_mut().enumerate().for_each(|(s, o)| kernel(s, o));
        }
    }
}

/// `-J sum_<ij> z_i z_j` for every basis state.
pub fn bond_energies<T: Scalar>(lattice: &Lattice, j: T) -> Vec<T> {
    let dim = 1usize << lattice.n_sites();
    let mut diag = Vec::with_capacity(dim);
    for s in 0..dim as u64 {
        let mut aligned = 0i64;
        for &(a, b) in lattice.bonds() {
            let za = (s >> a) & 1;
            let zb = (s >> b) & 1;
            aligned += if za == zb { 1 } else { -1 };
        }
        diag.push(-j * T::from_i64(aligned).unwrap());
    }
    diag
}

/// `<psi|H|psi>` of a product state: only the bond term survives.
pub fn product_state_energy_unchecked<T: Scalar>(
    psi: &SpinConfig,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> T {
    let mut aligned = 0i64;
    for &(a, b) in lattice.bonds() {
        aligned += (psi.spin(a) * psi.spin(b)) as i64;
    }
    -params.j * T::from_i64(aligned).unwrap()
}
