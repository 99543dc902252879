//! Finite-temperature observables of the transverse-field Ising model from
//! real-time dynamics: simulated Loschmidt echoes with shot noise, robust
//! Wick rotation (Gaussian filter and non-negative least squares with
//! quantile/discrepancy regularization), and Metropolis-Hastings sampling
//! with a reweighted Wolff cluster proposal.

pub mod dynamics;
pub mod error;
pub mod grid;
pub mod lattice;
pub mod scalar;
pub mod shots;
pub mod spin;
pub mod wick;

pub use error::{Error, Result};
pub use grid::{Shots, TimeGrid, TimeSeries};
pub use lattice::{build_lattice, spectral_bound, Lattice, TfimParams};
pub use scalar::Scalar;
pub use spin::SpinConfig;

/// Critical inverse temperature of the classical honeycomb Ising model,
/// `log(2 + sqrt(3)) / 2`.
pub fn beta_critical<T: Scalar>() -> T {
    (T::two() + T::from_f64_lit(3.0).sqrt()).ln() * T::half()
}

/// Default working precision.
pub type Real = f64;

pub type TimeGrid64 = TimeGrid<f64>;
pub type TimeSeries64 = TimeSeries<f64>;
pub type TfimParams64 = TfimParams<f64>;

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_c_value() {
        let b: f64 = beta_critical();
        assert!((b - 0.6584789484624083).abs() < 1e-15);
    }
}
