//! Entanglement entropy of stabilizer states and topological-entropy
//! extraction.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::geometry::{Lattice, Site};
use crate::stabilizer::{StabilizerError, StabilizerGroup};

/// A set of qubits `A`; the complement `B` is implied by the qubit count.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Region {
    qubits: Vec<usize>,
}

impl Region {
    pub fn new<I: IntoIterator<Item = usize>>(qubits: I) -> Self {
        let set: BTreeSet<usize> = qubits.into_iter().collect();
        Self {
            qubits: set.into_iter().collect(),
        }
    }

    /// `width × height` block whose lowest-index corner is `corner`. Wraps
    /// on periodic lattices.
    pub fn block(lattice: &Lattice, corner: Site, width: usize, height: usize) -> Result<Self, StabilizerError> {
        if !lattice.contains(corner) {
            return Err(StabilizerError::InvalidRegion(format!(
                "corner {corner} outside lattice"
            )));
        }
        if width > lattice.cols || height > lattice.rows {
            return Err(StabilizerError::InvalidRegion(format!(
                "{width}x{height} block does not fit on {}x{}",
                lattice.cols, lattice.rows
            )));
        }
        let mut qubits = Vec::with_capacity(width * height);
        for dj in 0..height {
            for di in 0..width {
                let s = lattice.shift(corner, di as isize, dj as isize).ok_or_else(|| {
                    StabilizerError::InvalidRegion(format!("block from {corner} leaves the open lattice"))
                })?;
                qubits.push(lattice.index(s));
            }
        }
        Ok(Self::new(qubits))
    }

    /// Inclusive rectangle between two corners in 1-based coordinates.
    pub fn rectangle(lattice: &Lattice, from: Site, to: Site) -> Result<Self, StabilizerError> {
        if from.i > to.i || from.j > to.j || !lattice.contains(to) {
            return Err(StabilizerError::InvalidRegion(format!("bad rectangle {from}:{to}")));
        }
        Self::block(lattice, from, to.i - from.i + 1, to.j - from.j + 1)
    }

    pub fn qubits(&self) -> &[usize] {
        &self.qubits
    }

    pub fn len(&self) -> usize {
        self.qubits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.qubits.is_empty()
    }

    pub fn contains(&self, q: usize) -> bool {
        self.qubits.binary_search(&q).is_ok()
    }

    pub fn union(&self, other: &Region) -> Region {
        Region::new(self.qubits.iter().chain(&other.qubits).copied())
    }

    pub fn complement(&self, n_qubits: usize) -> Region {
        Region {
            qubits: (0..n_qubits).filter(|q| !self.contains(*q)).collect(),
        }
    }

    /// Qubits of the region with at least one lattice neighbour outside it.
    pub fn boundary(&self, lattice: &Lattice) -> Vec<usize> {
        self.qubits
            .iter()
            .copied()
            .filter(|&q| {
                lattice
                    .neighbors(lattice.site(q))
                    .iter()
                    .any(|&s| !self.contains(lattice.index(s)))
            })
            .collect()
    }
}

/// Von Neumann entropy in bits of the reduced state on `region`, for the pure
/// stabilizer state of `group`.
///
/// Equals `|A| - log2 |S_A|`, evaluated as the rank of the generator matrix
/// restricted to the complement's columns minus `|B|`.
pub fn region_entropy(group: &StabilizerGroup, region: &Region) -> Result<usize, StabilizerError> {
    let n = group.n_qubits();
    if !group.is_pure() {
        return Err(StabilizerError::NotPure {
            rank: group.rank(),
            n_qubits: n,
        });
    }
    if let Some(&q) = region.qubits().iter().find(|&&q| q >= n) {
        return Err(StabilizerError::RegionOutOfRange { qubit: q, n_qubits: n });
    }
    let b = region.complement(n);
    if b.is_empty() {
        return Ok(0);
    }
    let cols: Vec<usize> = b
        .qubits()
        .iter()
        .copied()
        .chain(b.qubits().iter().map(|&q| q + n))
        .collect();
    let rank = group.matrix().select_columns(&cols).rank();
    Ok(rank - b.len())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GammaScheme {
    /// Alternating sum over a three-block partition of a square.
    Additive,
    /// Intercept of entropy against boundary size over nested squares.
    LinearFit,
}

impl fmt::Display for GammaScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            GammaScheme::Additive => "additive",
            GammaScheme::LinearFit => "linear-fit",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GammaEstimate {
    pub scheme: GammaScheme,
    pub gamma: f64,
    /// Named region entropies that entered the estimate.
    pub entropies: Vec<(String, usize)>,
    /// `(boundary size, entropy)` points, linear fit only.
    pub points: Vec<(usize, usize)>,
    pub slope: Option<f64>,
}

/// Smallest lattice side accepted by the additive scheme.
pub const ADDITIVE_MIN_SIDE: usize = 6;
/// Smallest lattice side accepted by the linear fit (two square sizes).
pub const FIT_MIN_SIDE: usize = 6;

/// The three blocks of the additive scheme: inside an `s × s` square with
/// `s = 2⌊L/3⌋`, `A` is the top half, `B` and `C` split the bottom half.
pub fn additive_blocks(lattice: &Lattice) -> Result<[Region; 3], StabilizerError> {
    let side = lattice.rows.min(lattice.cols);
    if side < ADDITIVE_MIN_SIDE {
        return Err(StabilizerError::LatticeTooSmall {
            rows: lattice.rows,
            cols: lattice.cols,
            reason: format!("additive scheme needs both sides >= {ADDITIVE_MIN_SIDE}"),
        });
    }
    let s = 2 * (side / 3);
    let h = s / 2;
    let a = Region::block(lattice, Site::new(1, 1), s, h)?;
    let b = Region::block(lattice, Site::new(1, h + 1), h, h)?;
    let c = Region::block(lattice, Site::new(h + 1, h + 1), h, h)?;
    Ok([a, b, c])
}

pub fn topological_gamma(
    group: &StabilizerGroup,
    scheme: GammaScheme,
    lattice: &Lattice,
) -> Result<GammaEstimate, StabilizerError> {
    if lattice.n_sites() != group.n_qubits() {
        return Err(StabilizerError::InvalidRegion(format!(
            "lattice has {} sites but the state has {} qubits",
            lattice.n_sites(),
            group.n_qubits()
        )));
    }
    match scheme {
        GammaScheme::Additive => additive(group, lattice),
        GammaScheme::LinearFit => linear_fit(group, lattice),
    }
}

fn additive(group: &StabilizerGroup, lattice: &Lattice) -> Result<GammaEstimate, StabilizerError> {
    let [a, b, c] = additive_blocks(lattice)?;
    let parts = [
        ("A", a.clone(), 1),
        ("B", b.clone(), 1),
        ("C", c.clone(), 1),
        ("AB", a.union(&b), -1),
        ("BC", b.union(&c), -1),
        ("AC", a.union(&c), -1),
        ("ABC", a.union(&b).union(&c), 1),
    ];
    let mut total = 0i64;
    let mut entropies = Vec::with_capacity(parts.len());
    for (name, region, weight) in parts {
        let s = region_entropy(group, &region)?;
        total += weight * s as i64;
        entropies.push((name.to_string(), s));
    }
    Ok(GammaEstimate {
        scheme: GammaScheme::Additive,
        gamma: -(total as f64) + 0.0,
        entropies,
        points: Vec::new(),
        slope: None,
    })
}

fn linear_fit(group: &StabilizerGroup, lattice: &Lattice) -> Result<GammaEstimate, StabilizerError> {
    let side = lattice.rows.min(lattice.cols);
    if side < FIT_MIN_SIDE {
        return Err(StabilizerError::LatticeTooSmall {
            rows: lattice.rows,
            cols: lattice.cols,
            reason: format!("linear fit needs both sides >= {FIT_MIN_SIDE}"),
        });
    }
    let mut points = Vec::new();
    let mut entropies = Vec::new();
    for s in 2..=side / 2 {
        let region = Region::block(lattice, Site::new(1, 1), s, s)?;
        let entropy = region_entropy(group, &region)?;
        points.push((region.boundary(lattice).len(), entropy));
        entropies.push((format!("{s}x{s}"), entropy));
    }
    let (slope, intercept) = least_squares(&points);
    Ok(GammaEstimate {
        scheme: GammaScheme::LinearFit,
        gamma: -intercept + 0.0,
        entropies,
        points,
        slope: Some(slope),
    })
}

fn least_squares(points: &[(usize, usize)]) -> (f64, f64) {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0 as f64).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1 as f64).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 as f64 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 as f64 - mx) * (p.1 as f64 - my)).sum();
    let slope = if sxx == 0.0 { 0.0 } else { sxy / sxx };
    (slope, my - slope * mx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Boundary;
    use crate::pauli::{Pauli, PauliString};

    fn product_state(n: usize) -> StabilizerGroup {
        StabilizerGroup::new(n, (0..n).map(|q| PauliString::single(n, q, Pauli::Z)).collect()).unwrap()
    }

    #[test]
    fn empty_region_has_zero_entropy() {
        let g = product_state(4);
        assert_eq!(region_entropy(&g, &Region::default()).unwrap(), 0);
    }

    #[test]
    fn bell_pair_entropy() {
        let g = StabilizerGroup::new(
            2,
            vec![
                PauliString::from_factors(2, [(0, Pauli::X), (1, Pauli::X)]).unwrap(),
                PauliString::from_factors(2, [(0, Pauli::Z), (1, Pauli::Z)]).unwrap(),
            ],
        )
        .unwrap();
        assert_eq!(region_entropy(&g, &Region::new([0])).unwrap(), 1);
        assert_eq!(region_entropy(&g, &Region::new([0, 1])).unwrap(), 0);
    }

    #[test]
    fn product_state_gamma_vanishes() {
        let l = Lattice::new(6, 6, Boundary::Periodic);
        let g = product_state(36);
        for scheme in [GammaScheme::Additive, GammaScheme::LinearFit] {
            assert_eq!(topological_gamma(&g, scheme, &l).unwrap().gamma, 0.0);
        }
    }

    #[test]
    fn small_lattice_rejected() {
        let l = Lattice::new(4, 4, Boundary::Periodic);
        assert!(matches!(
            topological_gamma(&product_state(16), GammaScheme::Additive, &l),
            Err(StabilizerError::LatticeTooSmall { .. })
        ));
    }

    #[test]
    fn rectangle_and_boundary() {
        let l = Lattice::new(4, 4, Boundary::Periodic);
        let r = Region::rectangle(&l, Site::new(1, 1), Site::new(3, 3)).unwrap();
        assert_eq!(r.len(), 9);
        assert_eq!(r.boundary(&l).len(), 8);
        let wrapped = Region::block(&l, Site::new(4, 4), 2, 2).unwrap();
        assert!(wrapped.contains(l.index(Site::new(1, 1))));
    }
}
