//! Z-basis product states as bit patterns.

use std::fmt;

use crate::error::{Error, Result};
use crate::lattice::Lattice;
use crate::scalar::Scalar;

/// A product state of N spins. Bit i clear means spin up (`z_i = +1`),
/// bit i set means spin down (`z_i = -1`), so the zero pattern is all-up.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpinConfig {
    bits: u64,
    n_sites: usize,
}

impl SpinConfig {
    pub fn new(bits: u64, n_sites: usize) -> Result<Self> {
        if n_sites == 0 || n_sites > 64 {
            return Err(Error::InvalidParameter(format!(
                "n_sites {n_sites} outside supported range 1..=64"
            )));
        }
        if n_sites < 64 && bits >> n_sites != 0 {
            return Err(Error::SizeMismatch(format!(
                "bit pattern {bits:#x} uses more than {n_sites} sites"
            )));
        }
        Ok(Self { bits, n_sites })
    }

    pub fn all_up(n_sites: usize) -> Self {
        Self::new(0, n_sites).expect("all-up pattern is always valid")
    }

    pub fn all_down(n_sites: usize) -> Self {
        let bits = if n_sites == 64 { u64::MAX } else { (1u64 << n_sites) - 1 };
        Self { bits, n_sites }
    }

    pub fn bits(&self) -> u64 {
        self.bits
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    /// Spin at `site` as +1/-1.
    pub fn spin(&self, site: usize) -> i32 {
        debug_assert!(site < self.n_sites);
        1 - 2 * ((self.bits >> site) & 1) as i32
    }

    /// New configuration with one site reversed.
    pub fn flipped(&self, site: usize) -> Self {
        debug_assert!(site < self.n_sites);
        Self { bits: self.bits ^ (1 << site), n_sites: self.n_sites }
    }

    /// New configuration with every listed site reversed.
    pub fn flipped_all(&self, sites: &[usize]) -> Self {
        let mut bits = self.bits;
        for &site in sites {
            debug_assert!(site < self.n_sites);
            bits ^= 1 << site;
        }
        Self { bits, n_sites: self.n_sites }
    }

    /// Net magnetization `sum_i z_i / N`.
    pub fn magnetization<T: Scalar>(&self) -> T {
        let n = self.n_sites as i64;
        let down = self.bits.count_ones() as i64;
        T::from_i64(n - 2 * down).unwrap() / T::from_usize_lit(self.n_sites)
    }

    /// Squared magnetization `(sum_i z_i / N)^2`, the sampled observable.
    pub fn magnetization_sq<T: Scalar>(&self) -> T {
        let m: T = self.magnetization();
        m * m
    }

    pub fn check_compatible(&self, lattice: &Lattice) -> Result<()> {
        if self.n_sites != lattice.n_sites() {
            return Err(Error::SizeMismatch(format!(
                "state has {} sites, lattice has {}",
                self.n_sites,
                lattice.n_sites()
            )));
        }
        Ok(())
    }

    /// All 2^N configurations, ascending by bit pattern.
    pub fn enumerate(n_sites: usize) -> impl Iterator<Item = SpinConfig> {
        assert!(n_sites <= 24, "state enumeration is for small systems");
        (0..1u64 << n_sites).map(move |bits| SpinConfig { bits, n_sites })
    }
}

impl fmt::Display for SpinConfig {
    /// Bitstring with site 0 leftmost; `0` is up, `1` is down.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for site in 0..self.n_sites {
            write!(f, "{}", (self.bits >> site) & 1)?;
        }
        Ok(())
    }
}
