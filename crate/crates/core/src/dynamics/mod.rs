//! TFIM statevector dynamics: exact and Trotterized Loschmidt echoes,
//! spectra, Boltzmann weights and classical product-state quantities.

use crate::error::{Error, Result};
use crate::grid::{TimeGrid, TimeSeries};
use crate::lattice::{Lattice, TfimParams};
use crate::scalar::Scalar;
use crate::spin::SpinConfig;

pub mod full_diag;
pub mod hamiltonian;
pub mod krylov;
pub mod trotter;

pub use full_diag::{FullDiag, FULL_DIAG_MAX_SITES};
pub use hamiltonian::SparseHamiltonian;
pub use krylov::{lanczos_extremal, KrylovPropagator};
pub use trotter::{TrotterEvolver, TrotterSteps};

/// Eigen-expansion of a product state: sorted energies with the overlap
/// weights `|<psi|n>|^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition<T> {
    pub energies: Vec<T>,
    pub overlaps: Vec<T>,
}

/// `<psi|H|psi>`; the transverse term averages to zero on Z products.
pub fn product_state_energy<T: Scalar>(
    psi: &SpinConfig,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<T> {
    psi.check_compatible(lattice)?;
    Ok(hamiltonian::product_state_energy_unchecked(psi, lattice, params))
}

/// Mean energy and energy standard deviation of a product state:
/// `E_psi = <psi|H|psi>`, `sigma_psi = |h_x| sqrt(N)`.
pub fn moments<T: Scalar>(
    psi: &SpinConfig,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<(T, T)> {
    let energy = product_state_energy(psi, lattice, params)?;
    let sigma = params.h_x.abs() * T::from_usize_lit(lattice.n_sites()).sqrt();
    Ok((energy, sigma))
}

/// Numerically exact echoes: dense diagonalization up to
/// [`FULL_DIAG_MAX_SITES`] sites, Krylov propagation beyond.
pub fn exact_echoes<T: Scalar>(
    psi: &SpinConfig,
    grid: &TimeGrid<T>,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<TimeSeries<T>> {
    psi.check_compatible(lattice)?;
    if lattice.n_sites() <= FULL_DIAG_MAX_SITES {
        Ok(FullDiag::new(lattice, params)?.echoes(psi, grid))
    } else {
        let h = SparseHamiltonian::new(lattice, params);
        KrylovPropagator::new(&h).echoes(psi, grid)
    }
}

/// Echoes from second-order Trotterization; converges to [`exact_echoes`]
/// as the step count grows.
pub fn trotter_echoes<T: Scalar>(
    psi: &SpinConfig,
    grid: &TimeGrid<T>,
    lattice: &Lattice,
    params: &TfimParams<T>,
    steps: TrotterSteps<T>,
) -> Result<TimeSeries<T>> {
    psi.check_compatible(lattice)?;
    TrotterEvolver::new(lattice, params).echoes(psi, grid, steps)
}

/// Exact local density of states of `psi` (energies plus overlap weights).
pub fn exact_dos<T: Scalar>(
    psi: &SpinConfig,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<EigenDecomposition<T>> {
    psi.check_compatible(lattice)?;
    let fd = FullDiag::new(lattice, params)?;
    Ok(EigenDecomposition { energies: fd.energies().to_vec(), overlaps: fd.overlaps(psi) })
}

/// Exact Boltzmann weight `W_psi(beta) = <psi|e^{-beta H}|psi>`.
pub fn exact_boltzmann<T: Scalar>(
    psi: &SpinConfig,
    beta: T,
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<T> {
    psi.check_compatible(lattice)?;
    if beta < T::zero() {
        return Err(Error::InvalidParameter("beta must be nonnegative".into()));
    }
    Ok(FullDiag::new(lattice, params)?.boltzmann(psi, beta))
}

/// Lowest and highest eigenvalue, iteratively (dense diagonalization as a
/// fallback for small systems if the iteration stalls).
pub fn extremal_energies<T: Scalar>(
    lattice: &Lattice,
    params: &TfimParams<T>,
) -> Result<(T, T)> {
    let h = SparseHamiltonian::new(lattice, params);
    let tol = T::from_f64_lit(1e-9).max(T::epsilon() * T::from_f64_lit(256.0));
    match lanczos_extremal(&h, 800, tol) {
        Ok(extremes) => Ok(extremes),
        Err(err) => {
            if lattice.n_sites() <= FULL_DIAG_MAX_SITES {
                Ok(FullDiag::new(lattice, params)?.extremal())
            } else {
                Err(err)
            }
        }
    }
}

/// Sampling interval saturating the Nyquist condition: `pi / max |E_i|`.
pub fn nyquist_dt<T: Scalar>(max_abs_energy: T) -> Result<T> {
    if !(max_abs_energy > T::zero()) {
        return Err(Error::InvalidParameter("max |E| must be positive".into()));
    }
    Ok(T::PI() / max_abs_energy)
}

/// Thermal `<m^2>` of the classical Ising model (`h_x = 0`) by state
/// enumeration; the reference curve for the quantum results.
pub fn classical_thermal_m2<T: Scalar>(lattice: &Lattice, j: T, beta: T) -> T {
    let n = lattice.n_sites();
    let mut num = T::zero();
    let mut den = T::zero();
    let params = TfimParams { j, h_x: T::zero() };
    for psi in SpinConfig::enumerate(n) {
        let e = hamiltonian::product_state_energy_unchecked(&psi, lattice, &params);
        let w = (-beta * e).exp();
        num += w * psi.magnetization_sq();
        den += w;
    }
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_complex::Complex;

    fn honeycomb10_params() -> (Lattice, TfimParams<f64>) {
        (Lattice::honeycomb10(), TfimParams::with_field(1.0))
    }

    #[test]
    fn product_energies() {
        let (lat, params) = honeycomb10_params();
        let up = SpinConfig::all_up(10);
        assert_eq!(product_state_energy(&up, &lat, &params).unwrap(), -11.0);
        // flipping a degree-3 site flips three bonds
        let flipped = up.flipped(2);
        assert_eq!(lat.degree(2), 3);
        assert_eq!(product_state_energy(&flipped, &lat, &params).unwrap(), -5.0);
        // the field strength does not enter
        let strong = TfimParams::with_field(2.0);
        let zero = TfimParams::with_field(0.0);
        for bits in [0u64, 5, 1023, 700] {
            let psi = SpinConfig::new(bits, 10).unwrap();
            assert_eq!(
                product_state_energy(&psi, &lat, &strong).unwrap(),
                product_state_energy(&psi, &lat, &zero).unwrap()
            );
        }
    }

    #[test]
    fn size_mismatch_rejected() {
        let (lat, params) = honeycomb10_params();
        let psi = SpinConfig::all_up(4);
        assert!(matches!(
            product_state_energy(&psi, &lat, &params),
            Err(Error::SizeMismatch(_))
        ));
    }

    #[test]
    fn moment_values() {
        let (lat, params) = honeycomb10_params();
        let up = SpinConfig::all_up(10);
        let (e, sigma) = moments(&up, &lat, &params).unwrap();
        assert_eq!(e, -11.0);
        assert_relative_eq!(sigma, 10.0f64.sqrt(), max_relative = 1e-15);
        let zero = TfimParams::with_field(0.0);
        assert_eq!(moments(&up, &lat, &zero).unwrap().1, 0.0);
        let lat16 = Lattice::honeycomb16();
        let up16 = SpinConfig::all_up(16);
        assert_eq!(moments(&up16, &lat16, &TfimParams::with_field(1.0)).unwrap().1, 4.0);
    }

    #[test]
    fn eigenstate_echo_is_a_phase() {
        let lat = Lattice::honeycomb10();
        let params = TfimParams::with_field(0.0);
        let grid = TimeGrid::new(0.3, 8).unwrap();
        let up = SpinConfig::all_up(10);
        let series = exact_echoes(&up, &grid, &lat, &params).unwrap();
        for (k, g) in series.values().iter().enumerate() {
            let t = grid.time(k + 1);
            let expected = Complex::new(0.0, 11.0 * t).exp();
            assert_relative_eq!(g.re, expected.re, epsilon = 1e-12);
            assert_relative_eq!(g.im, expected.im, epsilon = 1e-12);
            assert_relative_eq!(g.norm(), 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn dos_overlaps_sum_to_one() {
        let (lat, params) = honeycomb10_params();
        for bits in [0u64, 77, 1023] {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let dos = exact_dos(&psi, &lat, &params).unwrap();
            let total: f64 = dos.overlaps.iter().sum();
            assert_relative_eq!(total, 1.0, epsilon = 1e-12);
            assert!(dos.overlaps.iter().all(|&o| o >= -1e-15));
            assert!(dos.energies.windows(2).all(|w| w[0] <= w[1]));
        }
    }

    #[test]
    fn ground_state_energy_value() {
        let (lat, params) = honeycomb10_params();
        let dos = exact_dos(&SpinConfig::all_up(10), &lat, &params).unwrap();
        // lowest eigenvalue of the 10-site system at h_x = 1
        assert!((dos.energies[0] + 13.4778).abs() < 1e-3, "E_0 = {}", dos.energies[0]);
    }

    #[test]
    fn classical_boltzmann_weight() {
        let lat = Lattice::honeycomb10();
        let params = TfimParams::with_field(0.0);
        let up = SpinConfig::all_up(10);
        let w = exact_boltzmann(&up, 0.5, &lat, &params).unwrap();
        assert_relative_eq!(w, (5.5f64).exp(), max_relative = 1e-12);
        // beta = 0 gives unit weight for every state
        for bits in [0u64, 12, 1000] {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let w = exact_boltzmann(&psi, 0.0, &lat, &TfimParams::with_field(1.0)).unwrap();
            assert_relative_eq!(w, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn extremal_energies_match_dense() {
        let (lat, params) = honeycomb10_params();
        let (lo, hi) = extremal_energies(&lat, &params).unwrap();
        let fd = FullDiag::new(&lat, &params).unwrap();
        let (dlo, dhi) = fd.extremal();
        assert_relative_eq!(lo, dlo, epsilon = 1e-7);
        assert_relative_eq!(hi, dhi, epsilon = 1e-7);
        assert!((lo.abs().max(hi.abs()) - 13.4778).abs() < 1e-3);
        // classical limit: ground state aligns every bond
        let (lo0, _) = extremal_energies(&lat, &TfimParams::with_field(0.0)).unwrap();
        assert_relative_eq!(lo0, -11.0, epsilon = 1e-9);
    }

    #[test]
    fn extremes_within_spectral_bound() {
        use crate::lattice::spectral_bound;
        for (lat, h_x) in [
            (Lattice::honeycomb10(), 1.0f64),
            (Lattice::honeycomb10(), 0.5),
            (Lattice::honeycomb16(), 1.0),
        ] {
            let params = TfimParams::with_field(h_x);
            let (lo, hi) = extremal_energies(&lat, &params).unwrap();
            let bound = spectral_bound(&lat, &params);
            assert!(lo.abs().max(hi.abs()) <= bound, "{lat:?} h_x={h_x}");
        }
    }

    #[test]
    fn open_16_site_extremal_value() {
        let lat = Lattice::honeycomb16_open();
        let params = TfimParams::with_field(1.0f64);
        let (lo, hi) = extremal_energies(&lat, &params).unwrap();
        assert!((lo.abs().max(hi.abs()) - 22.6223).abs() < 1e-3, "got {lo}, {hi}");
    }

    #[test]
    fn nyquist_values() {
        assert_relative_eq!(nyquist_dt(13.4478f64).unwrap(), 0.23362, epsilon = 1e-5);
        assert_relative_eq!(nyquist_dt(std::f64::consts::PI).unwrap(), 1.0, epsilon = 1e-15);
        assert!(nyquist_dt(0.0f64).is_err());
    }

    #[test]
    fn echo_magnitudes_bounded() {
        let (lat, params) = honeycomb10_params();
        let grid = TimeGrid::new(0.25, 16).unwrap();
        for bits in [0u64, 341, 512] {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let series = exact_echoes(&psi, &grid, &lat, &params).unwrap();
            let total: f64 = series.values().iter().map(|g| g.norm()).sum();
            assert!(total <= grid.n_t() as f64);
            for g in series.values() {
                assert!(g.norm() <= 1.0 + 1e-10);
            }
        }
    }

    #[test]
    fn krylov_matches_dense_echoes() {
        let (lat, params) = honeycomb10_params();
        let grid = TimeGrid::new(0.2, 10).unwrap();
        let psi = SpinConfig::new(0b0000011111, 10).unwrap();
        let dense = exact_echoes(&psi, &grid, &lat, &params).unwrap();
        let h = SparseHamiltonian::new(&lat, &params);
        let krylov = KrylovPropagator::new(&h).echoes(&psi, &grid).unwrap();
        for (a, b) in dense.values().iter().zip(krylov.values()) {
            assert!((a - b).norm() < 1e-9, "{a} vs {b}");
        }
    }

    #[test]
    fn boltzmann_consistent_with_dense_exponential() {
        // independent route: scaled-and-squared Taylor series of e^{-beta H}
        // on a 6-site ring
        let lat = Lattice::new(6, vec![(0, 1), (1, 2), (2, 3), (3, 4), (4, 5), (5, 0)], None)
            .unwrap();
        let params = TfimParams::with_field(0.8);
        let beta = 0.659;
        let dim = 64usize;
        let mut h = vec![0.0f64; dim * dim];
        let diag = hamiltonian::bond_energies(&lat, params.j);
        for s in 0..dim {
            h[s * dim + s] = diag[s];
            for i in 0..6 {
                h[s * dim + (s ^ (1 << i))] = params.h_x;
            }
        }
        let expm = dense_expm_neg(&h, dim, beta);
        for bits in [0u64, 21, 63] {
            let psi = SpinConfig::new(bits, 6).unwrap();
            let via_eigen = exact_boltzmann(&psi, beta, &lat, &params).unwrap();
            let via_expm = expm[bits as usize * dim + bits as usize];
            assert_relative_eq!(via_eigen, via_expm, max_relative = 1e-10);
        }
    }

    /// Test-only oracle: `exp(-beta H)` by scaling and squaring a Taylor sum.
    fn dense_expm_neg(h: &[f64], dim: usize, beta: f64) -> Vec<f64> {
        let norm: f64 = h.iter().fold(0.0f64, |m, &v| m.max(v.abs())) * dim as f64;
        let squarings = (beta * norm).log2().ceil().max(0.0) as usize + 1;
        let scale = -beta / (1u64 << squarings) as f64;
        let mut term: Vec<f64> = (0..dim * dim).map(|i| if i % (dim + 1) == 0 { 1.0 } else { 0.0 }).collect();
        let mut acc = term.clone();
        for order in 1..=24 {
            let mut next = vec![0.0; dim * dim];
            for i in 0..dim {
                for k in 0..dim {
                    let t = term[i * dim + k];
                    if t != 0.0 {
                        let f = t * scale / order as f64;
                        for j in 0..dim {
                            next[i * dim + j] += f * h[k * dim + j];
                        }
                    }
                }
            }
            for (a, n) in acc.iter_mut().zip(&next) {
                *a += n;
            }
            term = next;
        }
        let mut result = acc;
        for _ in 0..squarings {
            let mut sq = vec![0.0; dim * dim];
            for i in 0..dim {
                for k in 0..dim {
                    let t = result[i * dim + k];
                    if t != 0.0 {
                        for j in 0..dim {
                            sq[i * dim + j] += t * result[k * dim + j];
                        }
                    }
                }
            }
            result = sq;
        }
        result
    }

    #[test]
    fn trotter_classical_limit_is_exact() {
        let lat = Lattice::honeycomb10();
        let params = TfimParams::with_field(0.0);
        let grid = TimeGrid::new(0.25, 8).unwrap();
        let psi = SpinConfig::new(0b1100110011, 10).unwrap();
        let exact = exact_echoes(&psi, &grid, &lat, &params).unwrap();
        for n in [1usize, 3] {
            let trot = trotter_echoes(&psi, &grid, &lat, &params, TrotterSteps::PerDt(n)).unwrap();
            for (a, b) in exact.values().iter().zip(trot.values()) {
                assert!((a - b).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn trotter_is_second_order() {
        let (lat, params) = honeycomb10_params();
        let grid = TimeGrid::new(0.25, 4).unwrap();
        let psi = SpinConfig::all_up(10);
        let exact = exact_echoes(&psi, &grid, &lat, &params).unwrap();
        let err = |n: usize| -> f64 {
            let trot =
                trotter_echoes(&psi, &grid, &lat, &params, TrotterSteps::PerDt(n)).unwrap();
            exact
                .values()
                .iter()
                .zip(trot.values())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let errors: Vec<f64> = [1usize, 2, 4, 8].iter().map(|&n| err(n)).collect();
        // slope of log(err) vs log(step size) across successive halvings
        for w in errors.windows(2) {
            let slope = (w[0] / w[1]).log2();
            assert!((1.7..=2.3).contains(&slope), "slope {slope} in {errors:?}");
        }
    }

    #[test]
    fn variable_step_counts() {
        let lat = Lattice::honeycomb16();
        let params = TfimParams::with_field(1.0);
        let evolver = TrotterEvolver::new(&lat, &params);
        let grid = TimeGrid::new(0.125, 8).unwrap();
        let counts = evolver.step_counts(&grid, TrotterSteps::MaxStep(0.25));
        assert_eq!(counts, vec![1, 1, 2, 2, 3, 3, 4, 4]);
    }

    #[test]
    fn parseval_consistency() {
        let (lat, params) = honeycomb10_params();
        let beta = 0.4;
        for bits in [0u64, 600] {
            let psi = SpinConfig::new(bits, 10).unwrap();
            let via_op = exact_boltzmann(&psi, beta, &lat, &params).unwrap();
            let dos = exact_dos(&psi, &lat, &params).unwrap();
            let via_dos: f64 = dos
                .overlaps
                .iter()
                .zip(&dos.energies)
                .map(|(&o, &e)| o * (-beta * e).exp())
                .sum();
            assert_relative_eq!(via_op, via_dos, max_relative = 1e-10);
        }
    }
}
