//! Spectra of Pauli Hamiltonians and small state vectors.
//!
//! Two independent engines compute the spectrum of `coupling · Σ terms`:
//! [`dense_spectrum`] diagonalizes the Hamiltonian numerically, block by
//! block, and [`commuting_spectrum`] counts consistent sign patterns of a
//! commuting term set.

use std::collections::{BTreeMap, HashMap};
use std::env;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::entropy::Region;
use crate::geometry::{Boundary, Lattice};
use crate::models::{relations_of, toric_loops, ModelKind, TermSet};
use crate::pauli::{Pauli, PauliString};
use crate::stabilizer::{find_anticommuting, StabilizerError, StabilizerGroup};

/// Default qubit cap of the dense oracle.
pub const DEFAULT_ORACLE_CAP: usize = 14;
/// Hard ceiling for explicit state vectors.
pub const MAX_STATE_QUBITS: usize = 26;
/// Eigenvalues closer than this are one level.
pub const LEVEL_TOLERANCE: f64 = 1e-9;
const MAX_RELATIONS: usize = 20;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("{n} qubits exceed the dense cap of {cap} (set LATDUAL_ORACLE_CAP to raise it)")]
    TooManyQubits { n: usize, cap: usize },
    #[error("terms {first} and {second} anticommute")]
    NonCommuting { first: String, second: String },
    #[error("term {0} is not Hermitian")]
    NonHermitian(String),
    #[error("{0} independent relations is too many to enumerate")]
    TooManyRelations(usize),
    #[error("multiplicity overflows 128 bits")]
    Overflow,
    #[error("projector annihilates every basis state")]
    Annihilated,
    #[error("loop states need a periodic toric model, got {0}")]
    NotToric(String),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
}

/// Dense cap, overridable through `LATDUAL_ORACLE_CAP`.
pub fn oracle_cap() -> usize {
    env::var("LATDUAL_ORACLE_CAP")
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .unwrap_or(DEFAULT_ORACLE_CAP)
}

fn integral<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    if x.fract() == 0.0 && x.abs() < 1e15 {
        s.serialize_i64(*x as i64)
    } else {
        s.serialize_f64(*x)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Level {
    #[serde(serialize_with = "integral")]
    pub energy: f64,
    pub multiplicity: u128,
}

/// Energy levels in increasing order.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSummary {
    pub levels: Vec<Level>,
}

impl SpectrumSummary {
    /// Groups eigenvalues that lie within [`LEVEL_TOLERANCE`] of their
    /// neighbour; each level reports the mean of its members.
    pub fn from_eigenvalues(mut values: Vec<f64>) -> Self {
        values.sort_by(f64::total_cmp);
        let mut levels: Vec<(f64, u128, f64)> = Vec::new();
        for v in values {
            match levels.last_mut() {
                Some((sum, count, last)) if (v - *last).abs() <= LEVEL_TOLERANCE => {
                    *sum += v;
                    *count += 1;
                    *last = v;
                }
                _ => levels.push((v, 1, v)),
            }
        }
        Self {
            levels: levels
                .into_iter()
                .map(|(sum, count, _)| {
                    let mean = sum / count as f64;
                    let rounded = mean.round();
                    Level {
                        energy: if (mean - rounded).abs() < 1e-7 {
                            rounded + 0.0
                        } else {
                            mean
                        },
                        multiplicity: count,
                    }
                })
                .collect(),
        }
    }

    pub fn total(&self) -> u128 {
        self.levels.iter().map(|l| l.multiplicity).sum()
    }

    pub fn ground(&self) -> Option<&Level> {
        self.levels.first()
    }

    /// Level-by-level equality with energies compared to tolerance.
    pub fn matches(&self, other: &SpectrumSummary) -> bool {
        self.levels.len() == other.levels.len()
            && self
                .levels
                .iter()
                .zip(&other.levels)
                .all(|(a, b)| a.multiplicity == b.multiplicity && (a.energy - b.energy).abs() <= 1e-7)
    }
}

struct Bits {
    weight: f64,
    x: u64,
    z: u64,
    phase: u8,
}

fn to_bits(weight: f64, p: &PauliString) -> Bits {
    let word = |v: &crate::gf2::BitVec| v.words().first().copied().unwrap_or(0);
    Bits {
        weight,
        x: word(p.x_bits()),
        z: word(p.z_bits()),
        phase: p.phase_exponent(),
    }
}

fn i_pow(k: u8) -> Complex64 {
    match k % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

fn xor_rank(vectors: impl Iterator<Item = u64>) -> usize {
    let mut basis: Vec<u64> = Vec::new();
    for mut v in vectors {
        for &b in &basis {
            v = v.min(v ^ b);
        }
        if v != 0 {
            basis.push(v);
            basis.sort_unstable_by(|a, b| b.cmp(a));
        }
    }
    basis.len()
}

/// Per-qubit choice of which Pauli is made diagonal: 0 = Z, 1 = X, 2 = Y.
fn off_diagonal_masks(terms: &[PauliString], choice: &[u8]) -> Vec<u64> {
    terms
        .iter()
        .map(|p| {
            let mut m = 0u64;
            for q in p.support() {
                let d = match p.pauli_at(q) {
                    Pauli::Z => 0,
                    Pauli::X => 1,
                    Pauli::Y => 2,
                    Pauli::I => continue,
                };
                if d != choice[q] {
                    m |= 1 << q;
                }
            }
            m
        })
        .collect()
}

/// Picks a local basis that keeps the off-diagonal span small, starting
/// from uniform and checkerboard choices and improving one qubit at a time.
fn choose_local_basis(n: usize, terms: &[PauliString], lattice: Option<&Lattice>) -> Vec<u8> {
    let cost = |c: &[u8]| xor_rank(off_diagonal_masks(terms, c).into_iter());
    let mut starts: Vec<Vec<u8>> = vec![vec![0; n], vec![1; n], vec![2; n]];
    if let Some(l) = lattice.filter(|l| l.n_sites() == n) {
        for (even, odd) in [(0, 1), (1, 0)] {
            starts.push((0..n).map(|q| if l.site(q).is_even() { even } else { odd }).collect());
        }
    }
    let mut best = starts
        .into_iter()
        .min_by_key(|c| cost(c))
        .expect("non-empty candidates");
    let mut best_cost = cost(&best);
    for _ in 0..4 {
        let mut improved = false;
        for q in 0..n {
            for d in 0..3u8 {
                if d == best[q] {
                    continue;
                }
                let old = best[q];
                best[q] = d;
                let c = cost(&best);
                if c < best_cost {
                    best_cost = c;
                    improved = true;
                } else {
                    best[q] = old;
                }
            }
        }
        if !improved {
            break;
        }
    }
    best
}

/// Rotates qubit `q` so that the chosen Pauli becomes `Z`.
fn rotate(p: &PauliString, choice: &[u8]) -> PauliString {
    let mut out = p.clone();
    for (q, &d) in choice.iter().enumerate() {
        use crate::clifford::CliffordGate as G;
        let gates: &[G] = match d {
            0 => &[],
            1 => &[G::h(q)],
            // Y → X under S†, then X → Z under H.
            _ => &[G::s(q), G::s(q), G::s(q), G::h(q)],
        };
        for g in gates {
            out = out.conjugate(g).expect("qubit in range");
        }
    }
    out
}

/// Full spectrum of `coupling_sign · Σ terms` for a term set within the
/// dense cap. Terms need not commute.
pub fn dense_spectrum(set: &TermSet) -> Result<SpectrumSummary, SpectrumError> {
    let w = set.spec.coupling_sign as f64;
    let weighted: Vec<(f64, PauliString)> = set.terms.iter().map(|t| (w, t.string.clone())).collect();
    for t in &set.terms {
        if !t.string.is_hermitian() {
            return Err(SpectrumError::NonHermitian(t.label.clone()));
        }
    }
    dense_spectrum_of(set.n_qubits(), &weighted, Some(&set.spec.lattice()))
}

/// Spectrum of `Σ weight · term`. The Hamiltonian is block diagonal in any
/// product basis: basis states connected by the off-diagonal parts of the
/// terms form cosets of one subgroup, and each coset is diagonalized on its
/// own after a local change of basis that keeps the cosets small.
pub fn dense_spectrum_of(
    n: usize,
    terms: &[(f64, PauliString)],
    lattice: Option<&Lattice>,
) -> Result<SpectrumSummary, SpectrumError> {
    let cap = oracle_cap().min(MAX_STATE_QUBITS);
    if n > cap {
        return Err(SpectrumError::TooManyQubits { n, cap });
    }
    let strings: Vec<PauliString> = terms.iter().map(|t| t.1.clone()).collect();
    let choice = choose_local_basis(n, &strings, lattice);
    let bits: Vec<Bits> = terms.iter().map(|(w, p)| to_bits(*w, &rotate(p, &choice))).collect();

    // Subgroup of flips reachable from |0…0⟩.
    let dim = 1usize << n;
    let mut local = vec![u32::MAX; dim];
    let mut flips: Vec<u64> = vec![0];
    local[0] = 0;
    let mut head = 0;
    while head < flips.len() {
        let s = flips[head];
        head += 1;
        for b in &bits {
            let t = (s ^ b.x) as usize;
            if local[t] == u32::MAX {
                local[t] = flips.len() as u32;
                flips.push(t as u64);
            }
        }
    }
    let block = flips.len();
    let mut reps = Vec::with_capacity(dim / block);
    let mut seen = vec![false; dim];
    for r in 0..dim {
        if !seen[r] {
            reps.push(r as u64);
            for &s in &flips {
                seen[(r as u64 ^ s) as usize] = true;
            }
        }
    }

    let eigen: Vec<Vec<f64>> = reps
        .par_iter()
        .map(|&r| {
            let mut h = DMatrix::<Complex64>::zeros(block, block);
            for (col, &s) in flips.iter().enumerate() {
                let state = r ^ s;
                for b in &bits {
                    let row = local[(s ^ b.x) as usize] as usize;
                    let sign = if (b.z & state).count_ones() % 2 == 1 { -1.0 } else { 1.0 };
                    h[(row, col)] += i_pow(b.phase) * (b.weight * sign);
                }
            }
            h.symmetric_eigenvalues().iter().copied().collect()
        })
        .collect();
    Ok(SpectrumSummary::from_eigenvalues(eigen.into_iter().flatten().collect()))
}

/// Exact spectrum of a commuting term set: every joint sign pattern that
/// respects the product relations among the terms is one eigenspace of
/// dimension `2^(n - rank)`.
pub fn commuting_spectrum(set: &TermSet) -> Result<SpectrumSummary, SpectrumError> {
    let strings = set.strings();
    if let Some((a, b)) = find_anticommuting(&strings) {
        return Err(SpectrumError::NonCommuting {
            first: set.terms[a].label.clone(),
            second: set.terms[b].label.clone(),
        });
    }
    if let Some(t) = set.terms.iter().find(|t| !t.string.is_hermitian()) {
        return Err(SpectrumError::NonHermitian(t.label.clone()));
    }
    let n = set.n_qubits();
    let m = strings.len();
    let relations = relations_of(n, &strings);
    let r = relations.len();
    if r > MAX_RELATIONS {
        return Err(SpectrumError::TooManyRelations(r));
    }
    let rank = m - r;
    let mut masks = vec![0u64; m];
    let mut target = 0u64;
    for (k, rel) in relations.iter().enumerate() {
        for &t in &rel.members {
            masks[t] |= 1 << k;
        }
        if rel.sign == -1 {
            target |= 1 << k;
        }
    }
    // dp[mask][f]: sign patterns over the terms so far with relation parity
    // `mask` and `f` terms at -1.
    let mut dp: HashMap<u64, Vec<u128>> = HashMap::new();
    dp.insert(0, vec![1]);
    for &mask in &masks {
        let mut next: HashMap<u64, Vec<u128>> = HashMap::new();
        for (&parity, counts) in &dp {
            for (f, &c) in counts.iter().enumerate() {
                for (p, g) in [(parity, f), (parity ^ mask, f + 1)] {
                    let v = next.entry(p).or_default();
                    if v.len() <= g {
                        v.resize(g + 1, 0);
                    }
                    v[g] = v[g].checked_add(c).ok_or(SpectrumError::Overflow)?;
                }
            }
        }
        dp = next;
    }
    let free = n - rank;
    let degeneracy = 1u128
        .checked_shl(free as u32)
        .filter(|_| free < 128)
        .ok_or(SpectrumError::Overflow)?;
    let sign = set.spec.coupling_sign as i64;
    let mut levels: BTreeMap<i64, u128> = BTreeMap::new();
    for (f, &c) in dp.get(&target).into_iter().flatten().enumerate() {
        if c == 0 {
            continue;
        }
        let energy = sign * (m as i64 - 2 * f as i64);
        let mult = c.checked_mul(degeneracy).ok_or(SpectrumError::Overflow)?;
        *levels.entry(energy).or_default() += mult;
    }
    Ok(SpectrumSummary {
        levels: levels
            .into_iter()
            .map(|(e, k)| Level {
                energy: e as f64,
                multiplicity: k,
            })
            .collect(),
    })
}

/// A normalized `2^n` amplitude vector. Qubit `q` is bit `q` of the basis
/// index.
#[derive(Clone, Debug, PartialEq)]
pub struct StateVector {
    n: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    fn check(n: usize) {
        assert!(n <= MAX_STATE_QUBITS, "{n} qubits exceed the state-vector limit");
    }

    pub fn basis(n: usize, index: usize) -> Self {
        Self::check(n);
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << n];
        amps[index] = Complex64::new(1.0, 0.0);
        Self { n, amps }
    }

    /// `|+⟩^⊗n`.
    pub fn plus(n: usize) -> Self {
        Self::check(n);
        let a = Complex64::new((1u64 << n) as f64, 0.0).sqrt().inv();
        Self {
            n,
            amps: vec![a; 1 << n],
        }
    }

    /// `Π CZ |+⟩^⊗n` over the lattice bonds.
    pub fn cluster(lattice: &Lattice) -> Self {
        let mut psi = Self::plus(lattice.n_sites());
        for (a, b) in lattice.bonds() {
            psi.apply_cz(lattice.index(a), lattice.index(b));
        }
        psi
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn normalized(mut self) -> Self {
        let k = self.norm();
        for a in &mut self.amps {
            *a /= k;
        }
        self
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &StateVector) -> Complex64 {
        self.amps.iter().zip(&other.amps).map(|(a, b)| a.conj() * b).sum()
    }

    pub fn distance(&self, other: &StateVector) -> f64 {
        self.amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    pub fn apply_pauli(&self, p: &PauliString) -> StateVector {
        assert_eq!(p.n_qubits(), self.n, "size mismatch");
        let b = to_bits(1.0, p);
        let phase = i_pow(b.phase);
        let mut out = vec![Complex64::new(0.0, 0.0); self.amps.len()];
        for (s, a) in self.amps.iter().enumerate() {
            let sign = if (b.z & s as u64).count_ones() % 2 == 1 {
                -1.0
            } else {
                1.0
            };
            out[s ^ b.x as usize] = a * phase * sign;
        }
        StateVector { n: self.n, amps: out }
    }

    pub fn apply_cz(&mut self, a: usize, b: usize) {
        let mask = (1usize << a) | (1usize << b);
        for (s, amp) in self.amps.iter_mut().enumerate() {
            if s & mask == mask {
                *amp = -*amp;
            }
        }
    }

    /// `‖Pψ - λψ‖`.
    pub fn eigen_residual(&self, p: &PauliString, eigenvalue: f64) -> f64 {
        let applied = self.apply_pauli(p);
        applied
            .amps
            .iter()
            .zip(&self.amps)
            .map(|(x, y)| (x - y * eigenvalue).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Basis states with `|amplitude| > tol`.
    pub fn support_size(&self, tol: f64) -> usize {
        self.amps.iter().filter(|a| a.norm() > tol).count()
    }

    /// Von Neumann entropy in bits of the reduced state on `region`, from
    /// the eigenvalues of the smaller of the two reduced density matrices.
    pub fn entropy(&self, region: &Region) -> f64 {
        let a: Vec<usize> = region.qubits().to_vec();
        let b: Vec<usize> = region.complement(self.n).qubits().to_vec();
        if a.is_empty() || b.is_empty() {
            return 0.0;
        }
        let (rows, cols) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
        let gather = |s: usize, qs: &[usize]| {
            qs.iter()
                .enumerate()
                .fold(0usize, |acc, (k, &q)| acc | (((s >> q) & 1) << k))
        };
        let mut m = DMatrix::<Complex64>::zeros(1 << rows.len(), 1 << cols.len());
        for (s, amp) in self.amps.iter().enumerate() {
            m[(gather(s, rows), gather(s, cols))] = *amp;
        }
        let rho = &m * m.adjoint();
        rho.symmetric_eigenvalues()
            .iter()
            .filter(|&&l| l > 1e-12)
            .map(|&l| -l * l.log2())
            .sum()
    }
}

/// The normalized projection `Π (1 + P)/2 |s⟩` of the first basis state `s`
/// (in index order, starting from all zeros) that survives the projector.
pub fn build_stabilizer_ground(set: &TermSet) -> Result<StateVector, SpectrumError> {
    let n = set.n_qubits();
    let cap = oracle_cap().min(MAX_STATE_QUBITS);
    if n > cap {
        return Err(SpectrumError::TooManyQubits { n, cap });
    }
    StabilizerGroup::new(n, set.strings())?;
    for start in 0..1usize << n {
        let mut psi = StateVector::basis(n, start);
        for t in &set.terms {
            let applied = psi.apply_pauli(&t.string);
            for (a, b) in psi.amps.iter_mut().zip(&applied.amps) {
                *a = (*a + b) * 0.5;
            }
        }
        if psi.norm() > 1e-6 {
            return Ok(psi.normalized());
        }
    }
    Err(SpectrumError::Annihilated)
}

/// `|ψ0⟩, w1|ψ0⟩, w2|ψ0⟩, w1 w2|ψ0⟩` for the toric code with X loops
/// `w1` (along the first row) and `w2` (along the first column).
pub fn loop_states(set: &TermSet) -> Result<[StateVector; 4], SpectrumError> {
    if set.spec.model != ModelKind::Toric || set.spec.boundary != Boundary::Periodic {
        return Err(SpectrumError::NotToric(set.spec.to_string()));
    }
    let psi = build_stabilizer_ground(set)?;
    let (w1, w2) = toric_loops(&set.spec, Pauli::X);
    let a = psi.apply_pauli(&w1);
    let b = psi.apply_pauli(&w2);
    let c = a.apply_pauli(&w2);
    Ok([psi, a, b, c])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models::{build, ModelSpec, Term};

    fn levels(s: &SpectrumSummary) -> Vec<(i64, u128)> {
        s.levels.iter().map(|l| (l.energy as i64, l.multiplicity)).collect()
    }

    #[test]
    fn cluster_chain_levels() {
        let set = build(&ModelSpec::new(ModelKind::Cluster1d, 1, 3, Boundary::Open)).unwrap();
        let want = vec![(-3, 1), (-1, 3), (1, 3), (3, 1)];
        assert_eq!(levels(&dense_spectrum(&set).unwrap()), want);
        assert_eq!(levels(&commuting_spectrum(&set).unwrap()), want);
    }

    #[test]
    fn single_term() {
        let spec = ModelSpec::new(ModelKind::Cluster1d, 1, 2, Boundary::Open);
        let set = TermSet::new(
            spec,
            vec![Term {
                label: "X".into(),
                string: PauliString::single(2, 0, Pauli::X),
            }],
        );
        assert_eq!(levels(&dense_spectrum(&set).unwrap()), vec![(-1, 2), (1, 2)]);
    }

    #[test]
    fn wen_ground_multiplicities() {
        let open = build(&ModelSpec::new(ModelKind::Wen, 3, 3, Boundary::Open)).unwrap();
        assert_eq!(dense_spectrum(&open).unwrap().ground().unwrap().multiplicity, 32);
        let p44 = build(&ModelSpec::new(ModelKind::Wen, 4, 4, Boundary::Periodic)).unwrap();
        assert_eq!(commuting_spectrum(&p44).unwrap().ground().unwrap().multiplicity, 4);
        let p34 = build(&ModelSpec::new(ModelKind::Wen, 3, 4, Boundary::Periodic)).unwrap();
        let c = commuting_spectrum(&p34).unwrap();
        assert_eq!(c.ground().unwrap().multiplicity, 2);
        assert!(c.matches(&dense_spectrum(&p34).unwrap()));
    }

    #[test]
    fn cluster_torus_ground() {
        let set = build(&ModelSpec::new(ModelKind::Cluster2d, 4, 4, Boundary::Periodic)).unwrap();
        let s = commuting_spectrum(&set).unwrap();
        assert_eq!(levels(&s)[0], (-16, 1));
        assert_eq!(s.total(), 1 << 16);
    }

    #[test]
    fn spectrum_json_uses_integers() {
        let s = SpectrumSummary::from_eigenvalues(vec![-1.0, 1.0, 1.0]);
        assert_eq!(
            serde_json::to_string(&s).unwrap(),
            r#"{"levels":[{"energy":-1,"multiplicity":1},{"energy":1,"multiplicity":2}]}"#
        );
    }

    #[test]
    fn ground_of_single_z() {
        let spec = ModelSpec::new(ModelKind::Cluster1d, 1, 2, Boundary::Open);
        let set = TermSet::new(
            spec,
            vec![Term {
                label: "Z".into(),
                string: PauliString::single(2, 0, Pauli::Z),
            }],
        );
        let psi = build_stabilizer_ground(&set).unwrap();
        assert!(psi.distance(&StateVector::basis(2, 0)) < 1e-12);
    }

    #[test]
    fn cluster_ground_matches_cz_circuit() {
        let spec = ModelSpec::new(ModelKind::Cluster2d, 2, 2, Boundary::Open);
        let set = build(&spec).unwrap();
        let psi = build_stabilizer_ground(&set).unwrap();
        let cz = StateVector::cluster(&spec.lattice());
        let overlap = psi.inner(&cz);
        assert!((overlap.norm() - 1.0).abs() < 1e-12);
        // Fix the global phase before comparing amplitudes.
        let phase = overlap / overlap.norm();
        let aligned = StateVector {
            n: psi.n,
            amps: psi.amps.iter().map(|a| a * phase).collect(),
        };
        assert!(aligned.distance(&cz) < 1e-12);
    }

    #[test]
    fn bell_entropy() {
        let mut psi = StateVector::plus(2);
        psi.apply_cz(0, 1);
        assert!((psi.entropy(&Region::new([0])) - 1.0).abs() < 1e-12);
    }
}
