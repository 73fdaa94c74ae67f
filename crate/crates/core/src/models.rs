//! Term sets for the cluster (1D and 2D), Wen plaquette and toric-code
//! models, plus constraint-relation discovery.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{Boundary, Lattice, Site};
use crate::gf2::BitMatrix;
use crate::pauli::{Pauli, PauliError, PauliString};
use crate::stabilizer::find_anticommuting;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ModelError {
    #[error("invalid model spec: {0}")]
    InvalidSpec(String),
    #[error("toric periodic requires even dimensions (got {rows}x{cols})")]
    OddToric { rows: usize, cols: usize },
    #[error("expected a {expected} spec, got {found}")]
    WrongModel { expected: &'static str, found: ModelKind },
    #[error("flip count {flips} out of range for {n} qubits")]
    FlipOutOfRange { n: usize, flips: usize },
    #[error("terms {first} and {second} anticommute")]
    NonCommuting { first: String, second: String },
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error("malformed model file: {0}")]
    Json(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Cluster1d,
    Cluster2d,
    Wen,
    Toric,
}

impl fmt::Display for ModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ModelKind::Cluster1d => "cluster1d",
            ModelKind::Cluster2d => "cluster2d",
            ModelKind::Wen => "wen",
            ModelKind::Toric => "toric",
        })
    }
}

impl std::str::FromStr for ModelKind {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cluster1d" => Ok(ModelKind::Cluster1d),
            "cluster2d" | "cluster" => Ok(ModelKind::Cluster2d),
            "wen" => Ok(ModelKind::Wen),
            "toric" => Ok(ModelKind::Toric),
            other => Err(ModelError::InvalidSpec(format!("unknown model '{other}'"))),
        }
    }
}

fn default_sign() -> i8 {
    -1
}

/// Lattice geometry plus model choice. `rows` is `M` (range of `j`), `cols`
/// is `N` (range of `i`). The Hamiltonian is `coupling_sign · Σ terms`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ModelSpec {
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
    pub model: ModelKind,
    #[serde(default = "default_sign")]
    pub coupling_sign: i8,
}

impl ModelSpec {
    pub fn new(model: ModelKind, rows: usize, cols: usize, boundary: Boundary) -> Self {
        Self {
            rows,
            cols,
            boundary,
            model,
            coupling_sign: -1,
        }
    }

    pub fn with_sign(mut self, sign: i8) -> Self {
        self.coupling_sign = sign;
        self
    }

    pub fn lattice(&self) -> Lattice {
        Lattice::new(self.rows, self.cols, self.boundary)
    }

    pub fn n_qubits(&self) -> usize {
        self.rows * self.cols
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.coupling_sign != 1 && self.coupling_sign != -1 {
            return Err(ModelError::InvalidSpec(format!(
                "coupling sign must be +1 or -1, got {}",
                self.coupling_sign
            )));
        }
        match self.model {
            ModelKind::Cluster1d => {
                if self.rows != 1 || self.cols < 2 {
                    return Err(ModelError::InvalidSpec(
                        "cluster1d needs rows = 1 and at least 2 sites".into(),
                    ));
                }
            }
            _ => {
                if self.rows < 2 || self.cols < 2 {
                    return Err(ModelError::InvalidSpec(format!(
                        "rows and cols must be >= 2 (got {}x{})",
                        self.rows, self.cols
                    )));
                }
            }
        }
        if self.model == ModelKind::Toric
            && self.boundary == Boundary::Periodic
            && (self.rows % 2 == 1 || self.cols % 2 == 1)
        {
            return Err(ModelError::OddToric {
                rows: self.rows,
                cols: self.cols,
            });
        }
        Ok(())
    }
}

impl fmt::Display for ModelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} {}x{} {} (sign {:+})",
            self.model, self.rows, self.cols, self.boundary, self.coupling_sign
        )
    }
}

/// `K(i,j)`, the label convention shared by all term sets.
pub fn term_label(kind: &str, site: Site) -> String {
    format!("{kind}{site}")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Term {
    pub label: String,
    pub string: PauliString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermSet {
    pub spec: ModelSpec,
    pub terms: Vec<Term>,
}

#[derive(Serialize, Deserialize)]
struct TermFile {
    spec: ModelSpec,
    terms: Vec<TermRecord>,
}

#[derive(Serialize, Deserialize)]
struct TermRecord {
    label: String,
    string: String,
}

impl TermSet {
    pub fn new(spec: ModelSpec, terms: Vec<Term>) -> Self {
        Self { spec, terms }
    }

    pub fn n_qubits(&self) -> usize {
        self.spec.n_qubits()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn strings(&self) -> Vec<PauliString> {
        self.terms.iter().map(|t| t.string.clone()).collect()
    }

    pub fn get(&self, label: &str) -> Option<&PauliString> {
        self.terms.iter().find(|t| t.label == label).map(|t| &t.string)
    }

    /// Fails with the first anticommuting pair.
    pub fn check_commuting(&self) -> Result<(), ModelError> {
        match find_anticommuting(&self.strings()) {
            Some((a, b)) => Err(ModelError::NonCommuting {
                first: self.terms[a].label.clone(),
                second: self.terms[b].label.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        let lattice = self.spec.lattice();
        let file = TermFile {
            spec: self.spec,
            terms: self
                .terms
                .iter()
                .map(|t| TermRecord {
                    label: t.label.clone(),
                    string: t.string.render(&lattice),
                })
                .collect(),
        };
        serde_json::to_value(file).expect("term file serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, ModelError> {
        let file: TermFile = serde_json::from_str(text).map_err(|e| ModelError::Json(e.to_string()))?;
        file.spec.validate()?;
        let lattice = file.spec.lattice();
        let terms = file
            .terms
            .into_iter()
            .map(|r| {
                Ok(Term {
                    string: PauliString::parse(&r.string, &lattice)?,
                    label: r.label,
                })
            })
            .collect::<Result<Vec<_>, ModelError>>()?;
        Ok(Self { spec: file.spec, terms })
    }
}

/// Builds the model named by `spec.model`.
pub fn build(spec: &ModelSpec) -> Result<TermSet, ModelError> {
    match spec.model {
        ModelKind::Cluster1d | ModelKind::Cluster2d => build_cluster(spec),
        ModelKind::Wen => build_wen(spec),
        ModelKind::Toric => build_toric(spec),
    }
}

fn string_on(lattice: &Lattice, factors: &[(Site, Pauli)]) -> PauliString {
    let mut p = PauliString::identity(lattice.n_sites());
    for &(s, f) in factors {
        p = &p * &PauliString::single(lattice.n_sites(), lattice.index(s), f);
    }
    p
}

/// `C(i,j) = X(i,j) · Π Z(neighbour)`, one per site. Open boundaries drop the
/// missing neighbours.
pub fn build_cluster(spec: &ModelSpec) -> Result<TermSet, ModelError> {
    if !matches!(spec.model, ModelKind::Cluster1d | ModelKind::Cluster2d) {
        return Err(ModelError::WrongModel {
            expected: "cluster",
            found: spec.model,
        });
    }
    spec.validate()?;
    let lattice = spec.lattice();
    let terms = lattice
        .sites()
        .map(|s| {
            let mut factors = vec![(s, Pauli::X)];
            factors.extend(lattice.neighbors(s).into_iter().map(|n| (n, Pauli::Z)));
            Term {
                label: term_label("C", s),
                string: string_on(&lattice, &factors),
            }
        })
        .collect();
    Ok(TermSet::new(*spec, terms))
}

/// Lower-left corners of the 2×2 plaquettes.
fn plaquette_corners(lattice: &Lattice) -> Vec<Site> {
    let (imax, jmax) = match lattice.boundary {
        Boundary::Periodic => (lattice.cols, lattice.rows),
        Boundary::Open => (lattice.cols - 1, lattice.rows - 1),
    };
    (1..=jmax)
        .flat_map(|j| (1..=imax).map(move |i| Site::new(i, j)))
        .collect()
}

/// The four sites `(i,j), (i+1,j), (i,j+1), (i+1,j+1)` with wrapping.
pub fn plaquette_sites(lattice: &Lattice, corner: Site) -> [Site; 4] {
    let step = |di, dj| lattice.shift(corner, di, dj).expect("plaquette inside lattice");
    [corner, step(1, 0), step(0, 1), step(1, 1)]
}

/// `W(i,j) = X(i,j) Z(i+1,j) Z(i,j+1) X(i+1,j+1)`.
pub fn wen_term(lattice: &Lattice, corner: Site) -> PauliString {
    let [a, b, c, d] = plaquette_sites(lattice, corner);
    string_on(lattice, &[(a, Pauli::X), (b, Pauli::Z), (c, Pauli::Z), (d, Pauli::X)])
}

pub fn build_wen(spec: &ModelSpec) -> Result<TermSet, ModelError> {
    if spec.model != ModelKind::Wen {
        return Err(ModelError::WrongModel {
            expected: "wen",
            found: spec.model,
        });
    }
    spec.validate()?;
    let lattice = spec.lattice();
    let terms = plaquette_corners(&lattice)
        .into_iter()
        .map(|s| Term {
            label: term_label("W", s),
            string: wen_term(&lattice, s),
        })
        .collect();
    Ok(TermSet::new(*spec, terms))
}

/// Vertex terms `A` (all X) on plaquettes with `i + j` even, plaquette terms
/// `B` (all Z) on the odd ones.
pub fn build_toric(spec: &ModelSpec) -> Result<TermSet, ModelError> {
    if spec.model != ModelKind::Toric {
        return Err(ModelError::WrongModel {
            expected: "toric",
            found: spec.model,
        });
    }
    spec.validate()?;
    let lattice = spec.lattice();
    let terms = plaquette_corners(&lattice)
        .into_iter()
        .map(|s| {
            let (kind, p) = if s.is_even() { ("A", Pauli::X) } else { ("B", Pauli::Z) };
            let factors: Vec<_> = plaquette_sites(&lattice, s).into_iter().map(|q| (q, p)).collect();
            Term {
                label: term_label(kind, s),
                string: string_on(&lattice, &factors),
            }
        })
        .collect();
    Ok(TermSet::new(*spec, terms))
}

/// Non-contractible loops of the toric code: `kind` on every site of row
/// `j = 1` (`w1`) and on every site of column `i = 1` (`w2`).
pub fn toric_loops(spec: &ModelSpec, kind: Pauli) -> (PauliString, PauliString) {
    let lattice = spec.lattice();
    let row: Vec<_> = (1..=lattice.cols).map(|i| (Site::new(i, 1), kind)).collect();
    let col: Vec<_> = (1..=lattice.rows).map(|j| (Site::new(1, j), kind)).collect();
    (string_on(&lattice, &row), string_on(&lattice, &col))
}

/// Energy `-n + 2·flips` of a cluster state with `flips` violated stabilizers.
pub fn cluster_level(n_qubits: usize, flip_count: usize) -> Result<i64, ModelError> {
    if flip_count > n_qubits {
        return Err(ModelError::FlipOutOfRange {
            n: n_qubits,
            flips: flip_count,
        });
    }
    Ok(2 * flip_count as i64 - n_qubits as i64)
}

/// A subset of terms whose product is `sign · I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Relation {
    pub members: Vec<usize>,
    pub sign: i8,
}

/// A basis of all term subsets multiplying to `±I`, in reduced form, each
/// with the exact sign of the ordered product.
pub fn constraint_relations(set: &TermSet) -> Vec<Relation> {
    relations_of(set.n_qubits(), &set.strings())
}

pub fn relations_of(n: usize, terms: &[PauliString]) -> Vec<Relation> {
    let m = terms.len();
    if m == 0 {
        return Vec::new();
    }
    let rows: Vec<_> = terms.iter().map(PauliString::symplectic).collect();
    let matrix = BitMatrix::from_rows(2 * n, rows).expect("2n columns");
    let kernel = matrix.transpose().kernel_basis();
    if kernel.is_empty() {
        return Vec::new();
    }
    let (reduced, pivots) = BitMatrix::from_rows(m, kernel).expect("m columns").row_reduce();
    reduced.rows()[..pivots.len()]
        .iter()
        .map(|v| {
            let members: Vec<usize> = v.ones().collect();
            let mut product = PauliString::identity(n);
            for &k in &members {
                product = &product * &terms[k];
            }
            debug_assert!(product.is_scalar());
            let sign = if product.phase_exponent() == 2 { -1 } else { 1 };
            Relation { members, sign }
        })
        .collect()
}
