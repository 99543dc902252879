//! Floating-point abstraction for the numerical pipeline.
//!
//! All reconstruction math is written against [`Scalar`] so the same code
//! runs in double precision (the default) or single precision. Dense
//! symmetric eigendecompositions are delegated to nalgebra through
//! [`EigenBackend`], implemented for the concrete float types; generic code
//! never touches nalgebra's trait hierarchy directly.

use std::fmt;
use std::iter::Sum;

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

/// Dense symmetric eigensolver entry point, one impl per concrete float type.
pub trait EigenBackend: Sized {
    /// Eigendecomposition of a dense symmetric `n x n` matrix in row-major
    /// storage. Returns eigenvalues in ascending order and eigenvectors as a
    /// column-major matrix (`vectors[k * n + i]` is component `i` of the
    /// eigenvector for eigenvalue `k`).
    fn symmetric_eigen(n: usize, matrix: &[Self]) -> (Vec<Self>, Vec<Self>);
}

macro_rules! impl_eigen_backend {
    ($t:ty) => {
        impl EigenBackend for $t {
            fn symmetric_eigen(n: usize, matrix: &[Self]) -> (Vec<Self>, Vec<Self>) {
                assert_eq!(matrix.len(), n * n, "matrix storage must be n*n");
                let m = nalgebra::DMatrix::<$t>::from_row_slice(n, n, matrix);
                let eig = nalgebra::SymmetricEigen::new(m);
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by(|&a, &b| {
                    eig.eigenvalues[a]
                        .partial_cmp(&eig.eigenvalues[b])
                        .expect("eigenvalue is NaN")
                });
                let mut values = Vec::with_capacity(n);
                let mut vectors = vec![0.0; n * n];
                for (k, &src) in order.iter().enumerate() {
                    values.push(eig.eigenvalues[src]);
                    let col = eig.eigenvectors.column(src);
                    for i in 0..n {
                        vectors[k * n + i] = col[i];
                    }
                }
                (values, vectors)
            }
        }
    };
}

impl_eigen_backend!(f32);
impl_eigen_backend!(f64);

/// Floating-point scalar for densities, weights and statevector amplitudes.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum<Self>
    + EigenBackend
    + fmt::Debug
    + fmt::Display
    + fmt::LowerExp
    + Send
    + Sync
    + 'static
{
    /// Lossless-enough conversion from f64 literals and counts.
    fn from_f64_lit(v: f64) -> Self {
        Self::from_f64(v).expect("f64 literal not representable")
    }

    fn from_usize_lit(v: usize) -> Self {
        Self::from_usize(v).expect("usize not representable")
    }

    fn to_f64_lossy(self) -> f64 {
        self.to_f64().expect("scalar not representable as f64")
    }

    fn two() -> Self {
        Self::one() + Self::one()
    }

    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Scalar for f32 {}
impl Scalar for f64 {}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_orthonormal() {
        // symmetric 3x3 with known spectrum {1, 2, 5}
        // built as Q diag(1,2,5) Q^T for a permutation-free rotation
        let a = [4.0, 1.0, 1.0, 1.0, 2.0, 0.0, 1.0, 0.0, 2.0f64];
        let (vals, vecs) = f64::symmetric_eigen(3, &a);
        assert!(vals.windows(2).all(|w| w[0] <= w[1]));
        // residual check: A v = lambda v
        for k in 0..3 {
            for i in 0..3 {
                let av: f64 = (0..3).map(|j| a[i * 3 + j] * vecs[k * 3 + j]).sum();
                assert!((av - vals[k] * vecs[k * 3 + i]).abs() < 1e-12);
            }
        }
        let trace: f64 = vals.iter().sum();
        assert!((trace - 8.0).abs() < 1e-12);
    }
}
