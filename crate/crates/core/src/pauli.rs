//! n-qubit Pauli strings with exact phases, and their conjugation by
//! Clifford gates.
//!
//! A string is stored as `(x, z, k)` and denotes the matrix
//! `i^k · (∏ X_q^{x_q}) · (∏ Z_q^{z_q})`. A `Y` factor is therefore an
//! overlapping x/z bit together with one unit of `i` in `k`, since
//! `Y = i·X·Z`. Multiplication reduces to XORs plus a popcount for the
//! phase.

use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{CliffordCircuit, CliffordGate, GateKind};
use crate::geometry::{Lattice, Site};
use crate::gf2::BitVec;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PauliError {
    #[error("size mismatch: {left} vs {right} qubits")]
    SizeMismatch { left: usize, right: usize },
    #[error("qubit {qubit} out of range for {n_qubits} qubits")]
    InvalidTarget { qubit: usize, n_qubits: usize },
    #[error("{kind:?} takes {} target(s), got {found}", kind.arity())]
    GateArity { kind: GateKind, found: usize },
    #[error("two-qubit gate repeats qubit {0}")]
    RepeatedTarget(usize),
    #[error("cannot parse Pauli string {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: BitVec,
    z: BitVec,
    phase: u8,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        Self {
            n,
            x: BitVec::zeros(n),
            z: BitVec::zeros(n),
            phase: 0,
        }
    }

    pub fn single(n: usize, q: usize, p: Pauli) -> Self {
        let mut s = Self::identity(n);
        s.set_factor(q, p);
        s
    }

    /// Tensor product of single-qubit factors on distinct qubits, with sign +1.
    pub fn from_factors<I: IntoIterator<Item = (usize, Pauli)>>(n: usize, factors: I) -> Result<Self, PauliError> {
        let mut s = Self::identity(n);
        let mut seen = BitVec::zeros(n);
        for (q, p) in factors {
            if q >= n {
                return Err(PauliError::InvalidTarget { qubit: q, n_qubits: n });
            }
            if seen.get(q) {
                return Err(PauliError::RepeatedTarget(q));
            }
            seen.set(q, true);
            s.set_factor(q, p);
        }
        Ok(s)
    }

    /// The Hermitian string with `+1` sign whose symplectic part is `(x, z)`.
    pub fn from_symplectic(x: BitVec, z: BitVec) -> Self {
        assert_eq!(x.len(), z.len());
        let phase = (x.and_count(&z) % 4) as u8;
        Self {
            n: x.len(),
            x,
            z,
            phase,
        }
    }

    /// Raw constructor for `i^phase · X^x · Z^z`.
    pub fn from_parts(x: BitVec, z: BitVec, phase: u8) -> Self {
        assert_eq!(x.len(), z.len());
        Self {
            n: x.len(),
            x,
            z,
            phase: phase % 4,
        }
    }

    fn set_factor(&mut self, q: usize, p: Pauli) {
        // Overwrites the factor on q while keeping the displayed sign.
        let old_y = self.x.get(q) && self.z.get(q);
        let (xb, zb) = p.bits();
        self.x.set(q, xb);
        self.z.set(q, zb);
        let new_y = xb && zb;
        self.phase = (self.phase + 4 + new_y as u8 - old_y as u8) % 4;
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_bits(&self) -> &BitVec {
        &self.x
    }

    pub fn z_bits(&self) -> &BitVec {
        &self.z
    }

    /// `k` in the stored form `i^k · X^x · Z^z`.
    pub fn phase_exponent(&self) -> u8 {
        self.phase
    }

    /// `e` such that the string equals `i^e` times the tensor product of the
    /// letters returned by [`PauliString::pauli_at`].
    pub fn display_phase(&self) -> u8 {
        let ys = (self.x.and_count(&self.z) % 4) as u8;
        (self.phase + 4 - ys) % 4
    }

    pub fn pauli_at(&self, q: usize) -> Pauli {
        match (self.x.get(q), self.z.get(q)) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    pub fn is_hermitian(&self) -> bool {
        self.display_phase().is_multiple_of(2)
    }

    /// `Some(±1)` for Hermitian strings.
    pub fn sign(&self) -> Option<i8> {
        match self.display_phase() {
            0 => Some(1),
            2 => Some(-1),
            _ => None,
        }
    }

    pub fn negated(&self) -> Self {
        self.times_i(2)
    }

    pub fn times_i(&self, k: u8) -> Self {
        let mut out = self.clone();
        out.phase = (out.phase + k) % 4;
        out
    }

    /// Same operator with the displayed sign forced to `+1`.
    pub fn unsigned(&self) -> Self {
        Self::from_symplectic(self.x.clone(), self.z.clone())
    }

    /// True when no qubit carries a non-identity factor (any phase).
    pub fn is_scalar(&self) -> bool {
        self.x.is_zero() && self.z.is_zero()
    }

    /// Exactly the identity matrix, phase included.
    pub fn is_identity(&self) -> bool {
        self.is_scalar() && self.phase == 0
    }

    pub fn support(&self) -> Vec<usize> {
        self.x.or(&self.z).ones().collect()
    }

    pub fn weight(&self) -> usize {
        self.x.or(&self.z).count_ones()
    }

    /// Symplectic row `[x | z]` of length `2n`.
    pub fn symplectic(&self) -> BitVec {
        self.x.concat(&self.z)
    }

    fn check_size(&self, other: &Self) -> Result<(), PauliError> {
        if self.n != other.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        Ok(())
    }

    /// `self · other`, phase exact.
    pub fn multiply(&self, other: &Self) -> Result<Self, PauliError> {
        self.check_size(other)?;
        Ok(self.mul_unchecked(other))
    }

    fn mul_unchecked(&self, other: &Self) -> Self {
        // (i^a X^x1 Z^z1)(i^b X^x2 Z^z2) = i^(a+b) (-1)^|z1 & x2| X^(x1^x2) Z^(z1^z2)
        let swaps = (self.z.and_count(&other.x) % 2) as u8;
        Self {
            n: self.n,
            x: self.x.xor(&other.x),
            z: self.z.xor(&other.z),
            phase: (self.phase + other.phase + 2 * swaps) % 4,
        }
    }

    pub fn commutes(&self, other: &Self) -> Result<bool, PauliError> {
        self.check_size(other)?;
        Ok(self.commutes_unchecked(other))
    }

    pub(crate) fn commutes_unchecked(&self, other: &Self) -> bool {
        (self.x.and_count(&other.z) + self.z.and_count(&other.x)).is_multiple_of(2)
    }

    /// `g · self · g†`.
    pub fn conjugate(&self, gate: &CliffordGate) -> Result<Self, PauliError> {
        if let Some(&q) = gate.targets.iter().find(|&&q| q >= self.n) {
            return Err(PauliError::InvalidTarget {
                qubit: q,
                n_qubits: self.n,
            });
        }
        // self = rest · X_loc · Z_loc where rest carries the phase and every
        // factor away from the gate's qubits.
        let mut rest = self.clone();
        let mut x_loc = Vec::new();
        let mut z_loc = Vec::new();
        for (slot, &q) in gate.targets.iter().enumerate() {
            if rest.x.get(q) {
                x_loc.push(slot);
            }
            if rest.z.get(q) {
                z_loc.push(slot);
            }
            rest.x.set(q, false);
            rest.z.set(q, false);
        }
        let mut out = rest;
        for slot in x_loc {
            out = out.mul_unchecked(&gate_image(self.n, gate, slot, Pauli::X));
        }
        for slot in z_loc {
            out = out.mul_unchecked(&gate_image(self.n, gate, slot, Pauli::Z));
        }
        Ok(out)
    }

    /// Conjugates by each gate in application order, giving `U · self · U†`
    /// for the circuit unitary `U`.
    pub fn conjugate_circuit(&self, circuit: &CliffordCircuit) -> Result<Self, PauliError> {
        if circuit.n_qubits() != self.n {
            return Err(PauliError::SizeMismatch {
                left: self.n,
                right: circuit.n_qubits(),
            });
        }
        circuit.gates().iter().try_fold(self.clone(), |p, g| p.conjugate(g))
    }

    /// Renders as `"<sign> P(i,j) P(i,j) ..."` with factors in qubit order
    /// and 1-based lattice coordinates. The sign token is one of `+`, `-`,
    /// `+i`, `-i`; the identity renders as `"+ I"`.
    pub fn render(&self, lattice: &Lattice) -> String {
        let sign = ["+", "+i", "-", "-i"][self.display_phase() as usize];
        let mut out = String::from(sign);
        let support = self.support();
        if support.is_empty() {
            out.push_str(" I");
        }
        for q in support {
            let s = lattice.site(q);
            out.push(' ');
            out.push(self.pauli_at(q).letter());
            out.push_str(&format!("({},{})", s.i, s.j));
        }
        out
    }

    /// Inverse of [`PauliString::render`]. Factors may appear in any order
    /// but each site at most once.
    pub fn parse(input: &str, lattice: &Lattice) -> Result<Self, PauliError> {
        let err = |reason: &str| PauliError::Parse {
            input: input.to_string(),
            reason: reason.to_string(),
        };
        let mut tokens = input.split_whitespace();
        let phase = match tokens.next() {
            Some("+") => 0,
            Some("+i") => 1,
            Some("-") => 2,
            Some("-i") => 3,
            _ => return Err(err("expected sign token +, -, +i or -i")),
        };
        let n = lattice.n_sites();
        let rest: Vec<&str> = tokens.collect();
        let mut factors = Vec::new();
        if rest != ["I"] {
            for tok in rest {
                let (letter, coords) = tok.split_at(1);
                let p = match letter {
                    "X" => Pauli::X,
                    "Y" => Pauli::Y,
                    "Z" => Pauli::Z,
                    _ => return Err(err("factor must start with X, Y or Z")),
                };
                let inner = coords
                    .strip_prefix('(')
                    .and_then(|c| c.strip_suffix(')'))
                    .ok_or_else(|| err("factor coordinates must be (i,j)"))?;
                let (i, j) = inner
                    .split_once(',')
                    .ok_or_else(|| err("factor coordinates must be (i,j)"))?;
                let i: usize = i.trim().parse().map_err(|_| err("bad column index"))?;
                let j: usize = j.trim().parse().map_err(|_| err("bad row index"))?;
                let site = Site::new(i, j);
                if !lattice.contains(site) {
                    return Err(err("site outside lattice"));
                }
                factors.push((lattice.index(site), p));
            }
        }
        let base = Self::from_factors(n, factors).map_err(|e| err(&e.to_string()))?;
        Ok(base.times_i(phase))
    }
}

/// Image of the single-qubit Pauli `p` on `gate.targets[slot]` under
/// conjugation by `gate`.
fn gate_image(n: usize, gate: &CliffordGate, slot: usize, p: Pauli) -> PauliString {
    let t = &gate.targets;
    let q = t[slot];
    let single = |q: usize, p: Pauli| PauliString::single(n, q, p);
    let pair =
        |a: (usize, Pauli), b: (usize, Pauli)| PauliString::from_factors(n, [a, b]).expect("distinct gate targets");
    match (gate.kind, p) {
        (GateKind::H, Pauli::X) => single(q, Pauli::Z),
        (GateKind::H, Pauli::Z) => single(q, Pauli::X),
        (GateKind::S, Pauli::X) => single(q, Pauli::Y),
        (GateKind::S, Pauli::Z) => single(q, Pauli::Z),
        (GateKind::X, Pauli::X) => single(q, Pauli::X),
        (GateKind::X, Pauli::Z) => single(q, Pauli::Z).negated(),
        (GateKind::Z, Pauli::X) => single(q, Pauli::X).negated(),
        (GateKind::Z, Pauli::Z) => single(q, Pauli::Z),
        (GateKind::Cnot, Pauli::X) if slot == 0 => pair((t[0], Pauli::X), (t[1], Pauli::X)),
        (GateKind::Cnot, Pauli::X) => single(q, Pauli::X),
        (GateKind::Cnot, Pauli::Z) if slot == 0 => single(q, Pauli::Z),
        (GateKind::Cnot, Pauli::Z) => pair((t[0], Pauli::Z), (t[1], Pauli::Z)),
        (GateKind::Cz, Pauli::X) => pair((q, Pauli::X), (t[1 - slot], Pauli::Z)),
        (GateKind::Cz, Pauli::Z) => single(q, Pauli::Z),
        (_, Pauli::I) | (_, Pauli::Y) => unreachable!("images are built from X and Z only"),
    }
}

impl Mul for &PauliString {
    type Output = PauliString;

    /// Panics on a size mismatch; use [`PauliString::multiply`] to get an error.
    fn mul(self, rhs: &PauliString) -> PauliString {
        self.multiply(rhs).expect("Pauli size mismatch")
    }
}

impl fmt::Display for PauliString {
    /// Dense form such as `+XIZ` or `-iYY`, qubit 0 first.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(["+", "+i", "-", "-i"][self.display_phase() as usize])?;
        for q in 0..self.n {
            write!(f, "{}", self.pauli_at(q).letter())?;
        }
        Ok(())
    }
}

impl fmt::Debug for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PauliString({self})")
    }
}
