//! Stabilizer groups: canonical generators, signed membership, ground-space
//! dimension and purification.

use std::fmt;

use thiserror::Error;

use crate::gf2::BitMatrix;
use crate::pauli::{PauliError, PauliString};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum StabilizerError {
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("generators {first} and {second} anticommute")]
    NonCommuting { first: usize, second: usize },
    #[error("generator {0} is not Hermitian")]
    NonHermitian(usize),
    #[error("generators multiply to -identity; the group is inconsistent")]
    Inconsistent,
    #[error("state is not pure: rank {rank} < {n_qubits} qubits")]
    NotPure { rank: usize, n_qubits: usize },
    #[error("region qubit {qubit} out of range for {n_qubits} qubits")]
    RegionOutOfRange { qubit: usize, n_qubits: usize },
    #[error("lattice {rows}x{cols} too small: {reason}")]
    LatticeTooSmall { rows: usize, cols: usize, reason: String },
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("degeneracy 2^{0} does not fit in 128 bits")]
    DegeneracyOverflow(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Membership {
    /// `p` itself is in the group.
    Plus,
    /// `-p` is in the group.
    Minus,
    NotMember,
}

impl fmt::Display for Membership {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Membership::Plus => "+1 member",
            Membership::Minus => "-1 member",
            Membership::NotMember => "not a member",
        })
    }
}

/// Returns the first anticommuting pair, if any.
pub fn find_anticommuting(terms: &[PauliString]) -> Option<(usize, usize)> {
    for a in 0..terms.len() {
        for b in a + 1..terms.len() {
            if !terms[a].commutes_unchecked(&terms[b]) {
                return Some((a, b));
            }
        }
    }
    None
}

fn check_sizes(n: usize, terms: &[PauliString]) -> Result<(), StabilizerError> {
    match terms.iter().find(|t| t.n_qubits() != n) {
        Some(t) => Err(PauliError::SizeMismatch {
            left: n,
            right: t.n_qubits(),
        }
        .into()),
        None => Ok(()),
    }
}

#[inline]
fn symplectic_bit(p: &PauliString, col: usize) -> bool {
    let n = p.n_qubits();
    if col < n {
        p.x_bits().get(col)
    } else {
        p.z_bits().get(col - n)
    }
}

/// Gauss-Jordan elimination over the symplectic columns `[x | z]`, carrying
/// exact phases through every row operation. Returns the independent rows,
/// their pivots and the residual scalars left by dependent rows.
fn eliminate(n: usize, rows: &[PauliString]) -> (Vec<PauliString>, Vec<usize>, Vec<PauliString>) {
    let mut rows = rows.to_vec();
    let mut pivots = Vec::new();
    for col in 0..2 * n {
        let k = pivots.len();
        if k == rows.len() {
            break;
        }
        let Some(p) = (k..rows.len()).find(|&r| symplectic_bit(&rows[r], col)) else {
            continue;
        };
        rows.swap(k, p);
        let pivot = rows[k].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != k && symplectic_bit(row, col) {
                *row = &pivot * row;
            }
        }
        pivots.push(col);
    }
    let residue = rows.split_off(pivots.len());
    (rows, pivots, residue)
}

#[derive(Clone, Debug)]
pub struct StabilizerGroup {
    n: usize,
    raw: Vec<PauliString>,
    canonical: Vec<PauliString>,
    pivots: Vec<usize>,
    matrix: BitMatrix,
}

impl StabilizerGroup {
    /// Builds the group generated by `generators`, canonicalizing eagerly.
    ///
    /// Fails on size mismatch, a non-Hermitian generator, an anticommuting
    /// pair, or a product of generators equal to `-I`.
    pub fn new(n: usize, generators: Vec<PauliString>) -> Result<Self, StabilizerError> {
        check_sizes(n, &generators)?;
        if let Some(k) = generators.iter().position(|g| !g.is_hermitian()) {
            return Err(StabilizerError::NonHermitian(k));
        }
        if let Some((first, second)) = find_anticommuting(&generators) {
            return Err(StabilizerError::NonCommuting { first, second });
        }
        let (canonical, pivots, residue) = eliminate(n, &generators);
        if residue.iter().any(|r| !r.is_identity()) {
            return Err(StabilizerError::Inconsistent);
        }
        let matrix = BitMatrix::from_rows(2 * n, canonical.iter().map(PauliString::symplectic).collect())
            .expect("symplectic rows have 2n bits");
        Ok(Self {
            n,
            raw: generators,
            canonical,
            pivots,
            matrix,
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.canonical.len()
    }

    pub fn is_pure(&self) -> bool {
        self.rank() == self.n
    }

    /// Independent, reduced generators (signs tracked).
    pub fn generators(&self) -> &[PauliString] {
        &self.canonical
    }

    /// Generators as supplied by the caller.
    pub fn raw_generators(&self) -> &[PauliString] {
        &self.raw
    }

    /// Pivot columns of the canonical generator matrix.
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Canonical generator matrix, `rank × 2n`, columns `[x | z]`.
    pub fn matrix(&self) -> &BitMatrix {
        &self.matrix
    }

    /// The same group presented by its canonical generators.
    pub fn canonicalize(&self) -> StabilizerGroup {
        StabilizerGroup {
            n: self.n,
            raw: self.canonical.clone(),
            canonical: self.canonical.clone(),
            pivots: self.pivots.clone(),
            matrix: self.matrix.clone(),
        }
    }

    /// Decides whether `p` or `-p` belongs to the group.
    pub fn member_with_sign(&self, p: &PauliString) -> Result<Membership, PauliError> {
        if p.n_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: p.n_qubits(),
            });
        }
        // Strip pivots in order: r = g_km ... g_k1 · p. The canonical rows are
        // reduced, so clearing one pivot never disturbs another.
        let mut r = p.clone();
        for (g, &col) in self.canonical.iter().zip(&self.pivots) {
            if symplectic_bit(&r, col) {
                r = g * &r;
            }
        }
        if !r.is_scalar() {
            return Ok(Membership::NotMember);
        }
        // Generators are involutions, so p = (g_k1 ... g_km) · i^phase(r).
        Ok(match r.phase_exponent() {
            0 => Membership::Plus,
            2 => Membership::Minus,
            _ => Membership::NotMember,
        })
    }

    /// Adds `n - rank` commuting logical operators so the result stabilizes a
    /// single state inside the code space.
    pub fn purify(&self) -> StabilizerGroup {
        if self.is_pure() {
            return self.clone();
        }
        // Normalizer: v with <s, v> = 0 for all s, i.e. kernel of the
        // half-swapped generator matrix.
        let n = self.n;
        let swapped: Vec<_> = self.canonical.iter().map(|g| g.z_bits().concat(g.x_bits())).collect();
        let omega = BitMatrix::from_rows(2 * n, swapped).expect("2n columns");
        let mut pool: Vec<PauliString> = omega
            .kernel_basis()
            .into_iter()
            .map(|v| {
                let x = v.select(&(0..n).collect::<Vec<_>>());
                let z = v.select(&(n..2 * n).collect::<Vec<_>>());
                PauliString::from_symplectic(x, z)
            })
            .collect();
        // Symplectic Gram-Schmidt: keep one operator from each conjugate pair.
        let mut logicals = Vec::new();
        while let Some(v) = pool.pop() {
            let Some(k) = pool.iter().position(|w| !v.commutes_unchecked(w)) else {
                continue;
            };
            let w = pool.swap_remove(k);
            for u in pool.iter_mut() {
                let mut next = u.clone();
                if !u.commutes_unchecked(&w) {
                    next = &next * &v;
                }
                if !u.commutes_unchecked(&v) {
                    next = &next * &w;
                }
                *u = next.unsigned();
            }
            logicals.push(v);
        }
        let mut gens = self.canonical.clone();
        gens.extend(logicals);
        StabilizerGroup::new(n, gens).expect("logical extension stays abelian and consistent")
    }
}

/// GF(2) rank of the symplectic matrix of `terms` (signs ignored).
pub fn symplectic_rank(n: usize, terms: &[PauliString]) -> usize {
    BitMatrix::from_rows(2 * n, terms.iter().map(PauliString::symplectic).collect())
        .expect("2n columns")
        .rank()
}

/// `log2` of the dimension of the common `+1` eigenspace of `terms`.
pub fn ground_degeneracy_log2(terms: &[PauliString], n: usize) -> Result<usize, StabilizerError> {
    let group = StabilizerGroup::new(n, terms.to_vec())?;
    Ok(n - group.rank())
}

/// Dimension `2^(n - rank)` of the common `+1` eigenspace of commuting
/// Hermitian `terms`.
pub fn ground_degeneracy(terms: &[PauliString], n: usize) -> Result<u128, StabilizerError> {
    let k = ground_degeneracy_log2(terms, n)?;
    1u128
        .checked_shl(k as u32)
        .filter(|_| k < 128)
        .ok_or(StabilizerError::DegeneracyOverflow(k))
}
