//! Clifford gates and circuits acting on flat qubit indices.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::pauli::PauliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum GateKind {
    H,
    S,
    X,
    Z,
    Cnot,
    Cz,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::Cnot | GateKind::Cz => 2,
            _ => 1,
        }
    }
}

/// A gate with its qubit targets. For CNOT the first target is the control.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CliffordGate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
}

impl CliffordGate {
    pub fn new(kind: GateKind, targets: Vec<usize>) -> Result<Self, PauliError> {
        if targets.len() != kind.arity() {
            return Err(PauliError::GateArity {
                kind,
                found: targets.len(),
            });
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(PauliError::RepeatedTarget(targets[0]));
        }
        Ok(Self { kind, targets })
    }

    pub fn h(q: usize) -> Self {
        Self {
            kind: GateKind::H,
            targets: vec![q],
        }
    }

    pub fn s(q: usize) -> Self {
        Self {
            kind: GateKind::S,
            targets: vec![q],
        }
    }

    pub fn x(q: usize) -> Self {
        Self {
            kind: GateKind::X,
            targets: vec![q],
        }
    }

    pub fn z(q: usize) -> Self {
        Self {
            kind: GateKind::Z,
            targets: vec![q],
        }
    }

    /// Panics if `control == target`.
    pub fn cnot(control: usize, target: usize) -> Self {
        assert_ne!(control, target, "CNOT needs distinct qubits");
        Self {
            kind: GateKind::Cnot,
            targets: vec![control, target],
        }
    }

    /// Panics if `a == b`.
    pub fn cz(a: usize, b: usize) -> Self {
        assert_ne!(a, b, "CZ needs distinct qubits");
        Self {
            kind: GateKind::Cz,
            targets: vec![a, b],
        }
    }

    pub fn max_target(&self) -> usize {
        self.targets.iter().copied().max().unwrap_or(0)
    }

    /// True for gates equal to their own inverse.
    pub fn is_involution(&self) -> bool {
        self.kind != GateKind::S
    }
}

impl fmt::Display for CliffordGate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.kind {
            GateKind::H => "H",
            GateKind::S => "S",
            GateKind::X => "X",
            GateKind::Z => "Z",
            GateKind::Cnot => "CNOT",
            GateKind::Cz => "CZ",
        };
        write!(f, "{name}{:?}", self.targets)
    }
}

/// Gates in application order: `gates[0]` acts first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CliffordCircuit {
    n_qubits: usize,
    gates: Vec<CliffordGate>,
}

impl CliffordCircuit {
    pub fn new(n_qubits: usize) -> Self {
        Self {
            n_qubits,
            gates: Vec::new(),
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn gates(&self) -> &[CliffordGate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: CliffordGate) -> Result<(), PauliError> {
        if let Some(&q) = gate.targets.iter().find(|&&q| q >= self.n_qubits) {
            return Err(PauliError::InvalidTarget {
                qubit: q,
                n_qubits: self.n_qubits,
            });
        }
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend<I: IntoIterator<Item = CliffordGate>>(&mut self, gates: I) -> Result<(), PauliError> {
        for g in gates {
            self.push(g)?;
        }
        Ok(())
    }

    /// The inverse circuit. Every gate except S is self-inverse; S is
    /// replaced by S·S·S.
    pub fn inverse(&self) -> CliffordCircuit {
        let mut gates = Vec::with_capacity(self.gates.len());
        for g in self.gates.iter().rev() {
            if g.kind == GateKind::S {
                gates.extend(std::iter::repeat_n(g.clone(), 3));
            } else {
                gates.push(g.clone());
            }
        }
        CliffordCircuit {
            n_qubits: self.n_qubits,
            gates,
        }
    }

    /// As-soon-as-possible layering: a gate occupies the layer after the
    /// latest layer touching any of its qubits. Every gate costs one unit.
    pub fn depth(&self) -> usize {
        let mut busy = vec![0usize; self.n_qubits];
        let mut depth = 0;
        for g in &self.gates {
            let layer = g.targets.iter().map(|&q| busy[q]).max().unwrap_or(0) + 1;
            for &q in &g.targets {
                busy[q] = layer;
            }
            depth = depth.max(layer);
        }
        depth
    }
}
