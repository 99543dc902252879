//! Honeycomb lattice graphs and model parameters.
//!
//! Only the graph structure matters here: sites, bonds and a partition of
//! the bonds into groups of pairwise-disjoint bonds. The groups mirror the
//! three bond orientations of the honeycomb lattice and are a
//! parallelization hint for the time-evolution circuits, not physics.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Transverse-field Ising couplings: `H = -J sum_<ij> Z_i Z_j + h_x sum_i X_i`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams<T> {
    pub j: T,
    pub h_x: T,
}

impl<T: Scalar> TfimParams<T> {
    pub fn new(j: T, h_x: T) -> Result<Self> {
        if !j.is_finite() || !h_x.is_finite() {
            return Err(Error::InvalidParameter("J and h_x must be finite".into()));
        }
        Ok(Self { j, h_x })
    }

    /// Ferromagnetic coupling J = 1 with the given transverse field.
    pub fn with_field(h_x: T) -> Self {
        Self { j: T::one(), h_x }
    }
}

/// Immutable lattice graph: construct once, share freely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lattice {
    n_sites: usize,
    bonds: Vec<(usize, usize)>,
    bond_groups: Vec<Vec<usize>>,
    adjacency: Vec<Vec<usize>>,
}

/// On-disk lattice description.
#[derive(Debug, Serialize, Deserialize)]
struct LatticeFile {
    n_sites: usize,
    bonds: Vec<[usize; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<Vec<Vec<usize>>>,
}

impl Lattice {
    /// Build from explicit bonds; groups are checked, or computed by a
    /// greedy edge coloring when absent.
    pub fn new(
        n_sites: usize,
        bonds: Vec<(usize, usize)>,
        groups: Option<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if n_sites == 0 {
            return Err(Error::MalformedLattice("n_sites must be positive".into()));
        }
        let mut seen = HashSet::new();
        for &(a, b) in &bonds {
            if a == b {
                return Err(Error::MalformedLattice(format!("self-bond at site {a}")));
            }
            if a >= n_sites || b >= n_sites {
                return Err(Error::MalformedLattice(format!(
                    "bond ({a}, {b}) outside 0..{n_sites}"
                )));
            }
            let key = (a.min(b), a.max(b));
            if !seen.insert(key) {
                return Err(Error::MalformedLattice(format!("duplicate bond ({a}, {b})")));
            }
        }
        let bond_groups = match groups {
            Some(groups) => {
                validate_groups(&bonds, &groups)?;
                groups
            }
            None => greedy_edge_coloring(&bonds),
        };
        let mut adjacency = vec![Vec::new(); n_sites];
        for &(a, b) in &bonds {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        Ok(Self { n_sites, bonds, bond_groups, adjacency })
    }

    /// The 10-site honeycomb: two fused hexagons (a 10-ring plus the shared
    /// 2-7 edge), bonds grouped by orientation.
    pub fn honeycomb10() -> Self {
        let bonds = vec![
            (0, 1),
            (2, 3),
            (5, 6),
            (7, 8),
            (1, 2),
            (3, 4),
            (6, 7),
            (8, 9),
            (0, 9),
            (2, 7),
            (4, 5),
        ];
        let groups = vec![vec![0, 1, 2, 3], vec![4, 5, 6, 7], vec![8, 9, 10]];
        Self::new(10, bonds, Some(groups)).expect("builtin lattice is valid")
    }

    /// Periodic honeycomb with a 2 x 4 grid of two-site cells: 16 sites,
    /// 24 bonds, every site of degree 3.
    pub fn honeycomb16() -> Self {
        Self::periodic_honeycomb(2, 4)
    }

    /// Open 16-site honeycomb: a 2 x 2 block of four hexagons, 19 bonds.
    /// Sites are numbered row by row from the top of the patch; groups
    /// collect the three bond orientations.
    pub fn honeycomb16_open() -> Self {
        let bonds = vec![
            (0, 2),
            (0, 3),
            (1, 3),
            (1, 4),
            (2, 5),
            (3, 6),
            (4, 7),
            (5, 8),
            (5, 9),
            (6, 9),
            (6, 10),
            (7, 10),
            (8, 11),
            (9, 12),
            (10, 13),
            (11, 14),
            (12, 14),
            (12, 15),
            (13, 15),
        ];
        let groups = vec![
            vec![0, 2, 7, 9, 11, 16, 18],
            vec![4, 5, 6, 12, 13, 14],
            vec![1, 3, 8, 10, 15, 17],
        ];
        Self::new(16, bonds, Some(groups)).expect("builtin lattice is valid")
    }

    /// Periodic degree-3 honeycomb on `rows x cols` unit cells of two sites.
    pub fn periodic_honeycomb(rows: usize, cols: usize) -> Self {
        assert!(rows >= 2 && cols >= 2, "periodic honeycomb needs at least 2x2 cells");
        let site = |r: usize, c: usize, s: usize| (r * cols + c) * 2 + s;
        let mut bonds = Vec::new();
        let mut groups = vec![Vec::new(), Vec::new(), Vec::new()];
        for r in 0..rows {
            for c in 0..cols {
                let a = site(r, c, 0);
                groups[0].push(bonds.len());
                bonds.push((a, site(r, c, 1)));
                groups[1].push(bonds.len());
                bonds.push((a, site(r, (c + cols - 1) % cols, 1)));
                groups[2].push(bonds.len());
                bonds.push((a, site((r + rows - 1) % rows, c, 1)));
            }
        }
        Self::new(2 * rows * cols, bonds, Some(groups)).expect("generator produces a valid lattice")
    }

    /// Load from a JSON lattice file.
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let parsed: LatticeFile =
            serde_json::from_str(&text).map_err(|e| Error::MalformedLattice(e.to_string()))?;
        let bonds = parsed.bonds.iter().map(|&[a, b]| (a, b)).collect();
        Self::new(parsed.n_sites, bonds, parsed.groups)
    }

    /// Write the JSON lattice file format.
    pub fn to_file(&self, path: &Path) -> Result<()> {
        let file = LatticeFile {
            n_sites: self.n_sites,
            bonds: self.bonds.iter().map(|&(a, b)| [a, b]).collect(),
            groups: Some(self.bond_groups.clone()),
        };
        std::fs::write(path, serde_json::to_string_pretty(&file)?)?;
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn n_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn bonds(&self) -> &[(usize, usize)] {
        &self.bonds
    }

    pub fn bond_groups(&self) -> &[Vec<usize>] {
        &self.bond_groups
    }

    pub fn neighbors(&self, site: usize) -> &[usize] {
        &self.adjacency[site]
    }

    pub fn degree(&self, site: usize) -> usize {
        self.adjacency[site].len()
    }
}

/// Resolve a built-in name or a path to a lattice file.
pub fn build_lattice(name_or_file: &str) -> Result<Lattice> {
    match name_or_file {
        "honeycomb10" => Ok(Lattice::honeycomb10()),
        "honeycomb16" => Ok(Lattice::honeycomb16()),
        "honeycomb16-open" => Ok(Lattice::honeycomb16_open()),
        other => {
            let path = Path::new(other);
            if path.exists() {
                Lattice::from_file(path)
            } else {
                Err(Error::UnknownLattice(other.into()))
            }
        }
    }
}

/// Analytic bound on the spectrum: `|J| N_bonds + |h_x| N_sites >= max |E_i|`.
pub fn spectral_bound<T: Scalar>(lattice: &Lattice, params: &TfimParams<T>) -> T {
    params.j.abs() * T::from_usize_lit(lattice.n_bonds())
        + params.h_x.abs() * T::from_usize_lit(lattice.n_sites())
}

fn validate_groups(bonds: &[(usize, usize)], groups: &[Vec<usize>]) -> Result<()> {
    let mut covered = vec![false; bonds.len()];
    for group in groups {
        let mut sites = HashSet::new();
        for &idx in group {
            let &(a, b) = bonds
                .get(idx)
                .ok_or_else(|| Error::MalformedLattice(format!("group references bond {idx}")))?;
            if covered[idx] {
                return Err(Error::MalformedLattice(format!("bond {idx} in two groups")));
            }
            covered[idx] = true;
            if !sites.insert(a) || !sites.insert(b) {
                return Err(Error::MalformedLattice(format!(
                    "bonds within a group share site (bond {idx})"
                )));
            }
        }
    }
    if let Some(idx) = covered.iter().position(|&c| !c) {
        return Err(Error::MalformedLattice(format!("bond {idx} not covered by any group")));
    }
    Ok(())
}

/// Greedy edge coloring: first group whose sites are all free takes the bond.
fn greedy_edge_coloring(bonds: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut group_sites: Vec<HashSet<usize>> = Vec::new();
    for (idx, &(a, b)) in bonds.iter().enumerate() {
        let slot = group_sites
            .iter()
            .position(|sites| !sites.contains(&a) && !sites.contains(&b));
        match slot {
            Some(g) => {
                groups[g].push(idx);
                group_sites[g].extend([a, b]);
            }
            None => {
                groups.push(vec![idx]);
                group_sites.push(HashSet::from([a, b]));
            }
        }
    }
    groups
}
