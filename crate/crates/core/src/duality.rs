//! The diagonal duality between the 2D cluster model and the Wen plaquette
//! model on a periodic `N × N` lattice, its Clifford circuit, the boundary
//! images, and the sublattice map from Wen terms to toric-code terms.
//!
//! A site with standard coordinates `(i, j)` has diagonal coordinates
//! `(i', j') = (i - j + 1, j)`, wrapped mod `N`. Dual operators are labelled
//! by diagonal coordinates and live on the qubit of the same site, so the
//! dual model reuses the original flat indexing. On the dual qubit `μ^z`
//! becomes `X` and `μ^x` becomes `Z`.

use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::clifford::{CliffordCircuit, CliffordGate};
use crate::geometry::{Boundary, Lattice, Site};
use crate::models::{build_cluster, build_toric, term_label, ModelError, ModelKind, ModelSpec, Term, TermSet};
use crate::pauli::{Pauli, PauliString};
use crate::report::Check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DualityError {
    #[error("duality needs a periodic NxN lattice (got {rows}x{cols} {boundary})")]
    NotSquarePeriodic {
        rows: usize,
        cols: usize,
        boundary: Boundary,
    },
    #[error("N = {0} is too small for the duality (need N >= 3)")]
    TooSmall(usize),
    #[error("boundary analysis needs even N (got {0})")]
    OddN(usize),
    #[error("site ({i},{j}) outside the {n}x{n} lattice")]
    OutOfRange { i: usize, j: usize, n: usize },
    #[error("only X and Z have a dual expansion, got {0:?}")]
    NotXZ(Pauli),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Side length of a spec usable by the duality.
pub fn duality_size(spec: &ModelSpec) -> Result<usize, DualityError> {
    if spec.rows != spec.cols || spec.boundary != Boundary::Periodic {
        return Err(DualityError::NotSquarePeriodic {
            rows: spec.rows,
            cols: spec.cols,
            boundary: spec.boundary,
        });
    }
    if spec.rows < 3 {
        return Err(DualityError::TooSmall(spec.rows));
    }
    Ok(spec.rows)
}

fn torus(n: usize) -> Lattice {
    Lattice::new(n, n, Boundary::Periodic)
}

fn wrap(x: isize, n: usize) -> usize {
    ((x - 1).rem_euclid(n as isize) + 1) as usize
}

/// 1-based coordinates after the diagonal transform.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct DiagonalCoords {
    pub i_prime: usize,
    pub j_prime: usize,
}

impl DiagonalCoords {
    pub const fn new(i_prime: usize, j_prime: usize) -> Self {
        Self { i_prime, j_prime }
    }
}

impl fmt::Display for DiagonalCoords {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})'", self.i_prime, self.j_prime)
    }
}

fn check_range(i: usize, j: usize, n: usize) -> Result<(), DualityError> {
    if (1..=n).contains(&i) && (1..=n).contains(&j) {
        Ok(())
    } else {
        Err(DualityError::OutOfRange { i, j, n })
    }
}

pub fn to_diagonal(i: usize, j: usize, n: usize) -> Result<DiagonalCoords, DualityError> {
    check_range(i, j, n)?;
    Ok(DiagonalCoords::new(wrap(i as isize - j as isize + 1, n), j))
}

pub fn from_diagonal(d: DiagonalCoords, n: usize) -> Result<Site, DualityError> {
    check_range(d.i_prime, d.j_prime, n)?;
    Ok(Site::new(wrap((d.i_prime + d.j_prime) as isize - 1, n), d.j_prime))
}

fn qubit_of(d: DiagonalCoords, n: usize) -> usize {
    torus(n).index(from_diagonal(d, n).expect("diagonal site in range"))
}

fn label_of(q: usize, n: usize) -> DiagonalCoords {
    let s = torus(n).site(q);
    to_diagonal(s.i, s.j, n).expect("qubit in range")
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum MuKind {
    #[serde(rename = "mu_x")]
    X,
    #[serde(rename = "mu_z")]
    Z,
}

impl fmt::Display for MuKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MuKind::X => "mu_x",
            MuKind::Z => "mu_z",
        })
    }
}

/// A dual operator and its expansion over the original spins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MuOperator {
    pub kind: MuKind,
    pub site: DiagonalCoords,
    pub expansion: PauliString,
}

/// `μ^x(i',j') = Z(i',j') Z(i',j'+1)`, except `μ^x(i',N) = Z(i',N)`;
/// `μ^z(i',j') = Π_{k ≤ j'} X(i',k)`. Coordinates are diagonal.
pub fn mu_expand(kind: MuKind, site: DiagonalCoords, n: usize) -> Result<MuOperator, DualityError> {
    check_range(site.i_prime, site.j_prime, n)?;
    let nq = n * n;
    let at = |j: usize| qubit_of(DiagonalCoords::new(site.i_prime, j), n);
    let factors: Vec<(usize, Pauli)> = match kind {
        MuKind::X if site.j_prime < n => vec![(at(site.j_prime), Pauli::Z), (at(site.j_prime + 1), Pauli::Z)],
        MuKind::X => vec![(at(n), Pauli::Z)],
        MuKind::Z => (1..=site.j_prime).map(|k| (at(k), Pauli::X)).collect(),
    };
    Ok(MuOperator {
        kind,
        site,
        expansion: PauliString::from_factors(nq, factors).expect("distinct qubits"),
    })
}

pub type MuFactor = (MuKind, DiagonalCoords);

/// Dual factor at a standard-coordinate position, with wrapping.
pub fn mu_at(kind: MuKind, i: isize, j: isize, n: usize) -> MuFactor {
    let d = to_diagonal(wrap(i, n), wrap(j, n), n).expect("wrapped into range");
    (kind, d)
}

/// Expansions of every `μ` operator, replaceable entry by entry for fault
/// injection.
#[derive(Clone, Debug)]
pub struct MuTable {
    n: usize,
    x: Vec<PauliString>,
    z: Vec<PauliString>,
}

impl MuTable {
    pub fn new(n: usize) -> Result<Self, DualityError> {
        if n < 2 {
            return Err(DualityError::TooSmall(n));
        }
        let mut x = Vec::with_capacity(n * n);
        let mut z = Vec::with_capacity(n * n);
        for q in 0..n * n {
            let d = label_of(q, n);
            x.push(mu_expand(MuKind::X, d, n)?.expansion);
            z.push(mu_expand(MuKind::Z, d, n)?.expansion);
        }
        Ok(Self { n, x, z })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, kind: MuKind, site: DiagonalCoords) -> &PauliString {
        let q = qubit_of(site, self.n);
        match kind {
            MuKind::X => &self.x[q],
            MuKind::Z => &self.z[q],
        }
    }

    pub fn with_override(mut self, kind: MuKind, site: DiagonalCoords, string: PauliString) -> Self {
        let q = qubit_of(site, self.n);
        match kind {
            MuKind::X => self.x[q] = string,
            MuKind::Z => self.z[q] = string,
        }
        self
    }

    /// Ordered product of the expansions of `factors`.
    pub fn expand(&self, factors: &[MuFactor]) -> PauliString {
        let mut p = PauliString::identity(self.n * self.n);
        for &(k, d) in factors {
            p = &p * self.get(k, d);
        }
        p
    }
}

/// Inverse substitution: a single `X` or `Z` at diagonal `site` as a product
/// of dual operators. `X(i',j') = μ^z(i',j'-1) μ^z(i',j')` and
/// `Z(i',j') = Π_{k=j'}^{N} μ^x(i',k)`.
pub fn sigma_in_mu(kind: Pauli, site: DiagonalCoords, n: usize) -> Result<Vec<MuFactor>, DualityError> {
    check_range(site.i_prime, site.j_prime, n)?;
    let at = |j| DiagonalCoords::new(site.i_prime, j);
    match kind {
        Pauli::X if site.j_prime == 1 => Ok(vec![(MuKind::Z, site)]),
        Pauli::X => Ok(vec![(MuKind::Z, at(site.j_prime - 1)), (MuKind::Z, site)]),
        Pauli::Z => Ok((site.j_prime..=n).map(|k| (MuKind::X, at(k))).collect()),
        other => Err(DualityError::NotXZ(other)),
    }
}

/// Encodes a product of dual operators on the dual qubits.
pub fn mu_to_dual(factors: &[MuFactor], n: usize) -> PauliString {
    let nq = n * n;
    let mut p = PauliString::identity(nq);
    for &(k, d) in factors {
        let pauli = match k {
            MuKind::X => Pauli::Z,
            MuKind::Z => Pauli::X,
        };
        p = &p * &PauliString::single(nq, qubit_of(d, n), pauli);
    }
    p
}

/// Applies `X(q) → μ^x`, `Z(q) → μ^z` (labels taken from `q`'s diagonal
/// coordinates) and expands back over the original spins.
pub fn mu_substitute(p: &PauliString, table: &MuTable) -> PauliString {
    let n = table.n();
    let mut out = PauliString::identity(n * n).times_i(p.phase_exponent());
    for q in p.x_bits().ones() {
        out = &out * table.get(MuKind::X, label_of(q, n));
    }
    for q in p.z_bits().ones() {
        out = &out * table.get(MuKind::Z, label_of(q, n));
    }
    out
}

/// The operator `p` rewritten in dual operators and encoded on dual qubits.
pub fn dual_image(p: &PauliString, n: usize) -> PauliString {
    let mut out = PauliString::identity(n * n).times_i(p.phase_exponent());
    for q in p.x_bits().ones() {
        let f = sigma_in_mu(Pauli::X, label_of(q, n), n).expect("in range");
        out = &out * &mu_to_dual(&f, n);
    }
    for q in p.z_bits().ones() {
        let f = sigma_in_mu(Pauli::Z, label_of(q, n), n).expect("in range");
        out = &out * &mu_to_dual(&f, n);
    }
    out
}

/// The Wen plaquette with lower-left corner at standard `(i, j)` in dual
/// operators: `μ^z(i,j) μ^x(i+1,j) μ^x(i,j+1) μ^z(i+1,j+1)`.
pub fn wen_mu_plaquette(i: isize, j: isize, n: usize) -> [MuFactor; 4] {
    [
        mu_at(MuKind::Z, i, j, n),
        mu_at(MuKind::X, i + 1, j, n),
        mu_at(MuKind::X, i, j + 1, n),
        mu_at(MuKind::Z, i + 1, j + 1, n),
    ]
}

/// Per-term comparison of bulk cluster stabilizers with expanded Wen
/// plaquettes.
#[derive(Clone, Debug, Serialize)]
pub struct BulkReport {
    pub n: usize,
    pub checks: Vec<Check>,
    pub matched: usize,
    pub total: usize,
    /// How the plaquette orientation relates to the anti-diagonal form.
    pub correspondence: String,
}

pub fn verify_bulk_duality(n: usize) -> Result<BulkReport, DualityError> {
    verify_bulk_duality_with(&MuTable::new(n)?)
}

/// Bulk check against a caller-supplied table. Every cluster term `C(i,j)`
/// with `2 <= j <= N-1` must equal the expanded plaquette at `(i-1, j-1)`.
pub fn verify_bulk_duality_with(table: &MuTable) -> Result<BulkReport, DualityError> {
    let n = table.n();
    if n < 3 {
        return Err(DualityError::TooSmall(n));
    }
    let spec = ModelSpec::new(ModelKind::Cluster2d, n, n, Boundary::Periodic);
    let cluster = build_cluster(&spec)?;
    let sites: Vec<Site> = (2..n).flat_map(|j| (1..=n).map(move |i| Site::new(i, j))).collect();
    let lattice = torus(n);
    let checks: Vec<Check> = sites
        .par_iter()
        .map(|&s| {
            let c = cluster.get(&term_label("C", s)).expect("cluster term");
            let factors = wen_mu_plaquette(s.i as isize - 1, s.j as isize - 1, n);
            let expanded = table.expand(&factors);
            let corner = Site::new(wrap(s.i as isize - 1, n), s.j - 1);
            let name = format!("C{s} = W{corner}");
            if &expanded == c {
                Check::pass(name, c.render(&lattice))
            } else {
                Check::fail(
                    name,
                    format!(
                        "mismatch at {s}: cluster {} vs plaquette {}",
                        c.render(&lattice),
                        expanded.render(&lattice)
                    ),
                )
            }
        })
        .collect();
    let matched = checks.iter().filter(|c| c.passed).count();
    // The anti-diagonal placement μ^z(i,j-1) μ^z(i-1,j) μ^x(i-1,j-1) μ^x(i,j)
    // is the mirror image of the plaquette found here.
    let mirrored = {
        let f = [
            mu_at(MuKind::Z, 2, 1, n),
            mu_at(MuKind::Z, 1, 2, n),
            mu_at(MuKind::X, 1, 1, n),
            mu_at(MuKind::X, 2, 2, n),
        ];
        table.expand(&f)
    };
    let hit = cluster.terms.iter().any(|t| t.string == mirrored);
    let correspondence = format!(
        "cluster C(i,j) = mu_z(i-1,j-1) mu_x(i,j-1) mu_x(i-1,j) mu_z(i,j): mu_z on the main diagonal \
         of the plaquette, encoded as X Z Z X; the anti-diagonal placement of mu_z is its mirror image \
         and {} a cluster term",
        if hit { "is also" } else { "is not" }
    );
    Ok(BulkReport {
        n,
        total: checks.len(),
        matched,
        checks,
        correspondence,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ImageClass {
    BulkPlaquette,
    SkewedPlaquetteProduct,
    NonContractibleLoopX,
    NonContractibleLoopZ,
    Composite,
}

impl fmt::Display for ImageClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImageClass::BulkPlaquette => "bulk-plaquette",
            ImageClass::SkewedPlaquetteProduct => "skewed-plaquette-product",
            ImageClass::NonContractibleLoopX => "non-contractible-loop-X",
            ImageClass::NonContractibleLoopZ => "non-contractible-loop-Z",
            ImageClass::Composite => "composite",
        })
    }
}

/// Rows and columns touched by a loop on the effective `N × (N-1)` lattice.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Winding {
    pub columns_covered: usize,
    pub rows_covered: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryImage {
    pub label: String,
    pub class: ImageClass,
    pub winding: Option<Winding>,
    /// Rendered dual image.
    pub image: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundaryReport {
    pub n: usize,
    pub images: Vec<BoundaryImage>,
    /// Comparison of the closed-form boundary expressions with the derived
    /// images.
    pub formulas: Vec<Check>,
}

impl BoundaryReport {
    pub fn count(&self, class: ImageClass) -> usize {
        self.images.iter().filter(|b| b.class == class).count()
    }
}

fn classify(img: &PauliString, source: Option<Site>, n: usize) -> (ImageClass, Option<Winding>) {
    let lattice = torus(n);
    if let Some(s) = source {
        let w = mu_to_dual(&wen_mu_plaquette(s.i as isize - 1, s.j as isize - 1, n), n);
        if &w == img {
            return (ImageClass::BulkPlaquette, None);
        }
    }
    let toric = img
        .conjugate_circuit(&toric_map_circuit(&lattice))
        .expect("circuit fits");
    let sites: Vec<Site> = toric.support().into_iter().map(|q| lattice.site(q)).collect();
    let mut rows = vec![0usize; n + 1];
    let mut cols = vec![false; n + 1];
    for s in &sites {
        rows[s.j] += 1;
        cols[s.i] = true;
    }
    let rows_covered = (1..n).filter(|&j| rows[j] > 0).count();
    let columns_covered = (1..=n).filter(|&i| cols[i]).count();
    let pure_x = toric.z_bits().is_zero();
    let pure_z = toric.x_bits().is_zero();
    if !sites.is_empty() && (pure_x || pure_z) && rows[n] == 0 && rows_covered == n - 1 && columns_covered == n {
        let class = if pure_x {
            ImageClass::NonContractibleLoopX
        } else {
            ImageClass::NonContractibleLoopZ
        };
        return (
            class,
            Some(Winding {
                columns_covered,
                rows_covered,
            }),
        );
    }
    if sites.len() == 5 && rows[1] == 2 && rows[n - 1] == 2 && rows[n] == 1 {
        return (ImageClass::SkewedPlaquetteProduct, None);
    }
    (ImageClass::Composite, None)
}

/// Dual images of all cluster terms and of the products
/// `C(i-1,1) C(i,N)`, each classified by the geometry of its support.
pub fn classify_boundary_images(n: usize) -> Result<BoundaryReport, DualityError> {
    if n < 4 {
        return Err(DualityError::TooSmall(n));
    }
    if n % 2 == 1 {
        return Err(DualityError::OddN(n));
    }
    let lattice = torus(n);
    let spec = ModelSpec::new(ModelKind::Cluster2d, n, n, Boundary::Periodic);
    let cluster = build_cluster(&spec)?;
    let c = |i: usize, j: usize| cluster.get(&term_label("C", Site::new(i, j))).expect("term").clone();

    // Cluster terms come out in site order.
    let mut jobs: Vec<(String, PauliString, Option<Site>)> = lattice
        .sites()
        .zip(&cluster.terms)
        .map(|(s, t)| (t.label.clone(), t.string.clone(), Some(s)))
        .collect();
    for i in 1..=n {
        let prev = wrap(i as isize - 1, n);
        jobs.push((format!("C({prev},1)C({i},{n})"), &c(prev, 1) * &c(i, n), None));
    }
    let images: Vec<BoundaryImage> = jobs
        .par_iter()
        .map(|(label, p, source)| {
            let img = dual_image(p, n);
            let (class, winding) = classify(&img, *source, n);
            BoundaryImage {
                label: label.clone(),
                class,
                winding,
                image: img.render(&lattice),
            }
        })
        .collect();
    Ok(BoundaryReport {
        n,
        formulas: boundary_formula_checks(n, &c),
        images,
    })
}

/// Closed-form boundary images in standard coordinates, compared with the
/// derived ones. The `C(i,N)` expression is evaluated at `i = N+1` in place
/// of `i = 1`, its wrapped equivalent.
fn boundary_formula_checks(n: usize, c: &dyn Fn(usize, usize) -> PauliString) -> Vec<Check> {
    let ni = n as isize;
    let mut out = Vec::new();
    let mut compare = |name: String, factors: Vec<MuFactor>, term: PauliString| {
        let derived = dual_image(&term, n);
        let printed = mu_to_dual(&factors, n);
        let lattice = torus(n);
        out.push(if printed == derived {
            Check::pass(name, derived.render(&lattice))
        } else {
            Check::fail(
                name,
                format!(
                    "closed form {} vs derived {}",
                    printed.render(&lattice),
                    derived.render(&lattice)
                ),
            )
        });
    };
    for j in 2..n {
        let jj = j as isize;
        compare(
            format!("closed form C(1,{j})"),
            vec![
                mu_at(MuKind::Z, ni, jj - 1, n),
                mu_at(MuKind::X, 1, jj - 1, n),
                mu_at(MuKind::X, ni, jj, n),
                mu_at(MuKind::Z, 1, jj, n),
            ],
            c(1, j),
        );
        compare(
            format!("closed form C({n},{j})"),
            vec![
                mu_at(MuKind::Z, ni - 1, jj - 1, n),
                mu_at(MuKind::X, ni, jj - 1, n),
                mu_at(MuKind::X, ni - 1, jj, n),
                mu_at(MuKind::Z, ni, jj, n),
            ],
            c(n, j),
        );
    }
    for i in 1..=ni {
        let mut f = vec![mu_at(MuKind::X, i - 1, 1, n), mu_at(MuKind::Z, i, 1, n)];
        f.extend((1..=ni - i).map(|k| mu_at(MuKind::X, i + k, k, n)));
        f.extend((1..i).map(|k| mu_at(MuKind::X, k, ni - i + k, n)));
        compare(format!("closed form C({i},1)"), f, c(i as usize, 1));
    }
    for i in 2..=ni + 1 {
        let mut f = vec![
            mu_at(MuKind::Z, i - 1, ni - 1, n),
            mu_at(MuKind::X, i, ni - 1, n),
            mu_at(MuKind::Z, i, ni, n),
        ];
        f.extend((0..=ni - i).map(|k| mu_at(MuKind::X, i + k, 1 + k, n)));
        f.extend((1..=i - 2).map(|k| mu_at(MuKind::X, k, ni - i + 1 + k, n)));
        let iw = wrap(i, n);
        compare(format!("closed form C({iw},{n})"), f, c(iw, n));
    }
    for i in 1..=ni {
        let f = vec![
            mu_at(MuKind::X, i - 2, 1, n),
            mu_at(MuKind::Z, i - 1, 1, n),
            mu_at(MuKind::Z, i - 1, ni - 1, n),
            mu_at(MuKind::X, i, ni - 1, n),
            mu_at(MuKind::Z, i, ni, n),
        ];
        let prev = wrap(i - 1, n);
        compare(
            format!("closed form C({prev},1)C({i},{n})"),
            f,
            &c(prev, 1) * &c(i as usize, n),
        );
    }
    out
}

/// Dual images of every cluster term, labelled `D(i,j)` after their source.
pub fn duality_image_termset(spec: &ModelSpec) -> Result<TermSet, DualityError> {
    let n = duality_size(spec)?;
    let cluster_spec = ModelSpec {
        model: ModelKind::Cluster2d,
        ..*spec
    };
    let cluster = build_cluster(&cluster_spec)?;
    let terms = cluster
        .terms
        .par_iter()
        .map(|t| Term {
            label: format!("D{}", &t.label[1..]),
            string: dual_image(&t.string, n),
        })
        .collect();
    Ok(TermSet::new(
        ModelSpec {
            model: ModelKind::Wen,
            ..cluster_spec
        },
        terms,
    ))
}

/// Hadamards on every site of each diagonal, then for each diagonal the
/// CNOT chain `N → N-1, N-1 → N-2, …, 2 → 1` along `j'`. Diagonals act on
/// disjoint qubits, so their gates interleave layer by layer.
pub fn build_duality_circuit(n: usize) -> Result<CliffordCircuit, DualityError> {
    if n < 2 {
        return Err(DualityError::TooSmall(n));
    }
    let q = |a, b| qubit_of(DiagonalCoords::new(a, b), n);
    let mut c = CliffordCircuit::new(n * n);
    for a in 1..=n {
        for b in 1..=n {
            c.push(CliffordGate::h(q(a, b))).expect("in range");
        }
    }
    for t in 1..n {
        for a in 1..=n {
            c.push(CliffordGate::cnot(q(a, n - t + 1), q(a, n - t)))
                .expect("in range");
        }
    }
    Ok(c)
}

/// Circuit checks: single-site images, the 1D cluster chain along each
/// diagonal, and the depth.
pub fn verify_duality_circuit(n: usize) -> Result<Vec<Check>, DualityError> {
    let circuit = build_duality_circuit(n)?;
    let table = MuTable::new(n)?;
    let lattice = torus(n);
    let nq = n * n;
    let mut checks = Vec::new();

    let mut bad = Vec::new();
    for q in 0..nq {
        let d = label_of(q, n);
        for (p, kind) in [(Pauli::X, MuKind::X), (Pauli::Z, MuKind::Z)] {
            let img = PauliString::single(nq, q, p).conjugate_circuit(&circuit).expect("fits");
            if &img != table.get(kind, d) {
                bad.push(format!("{p:?}{}", lattice.site(q)));
            }
        }
    }
    checks.push(Check::new(
        "single-site images are mu operators",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{} sites, X -> mu_x and Z -> mu_z", nq)
        } else {
            format!("wrong images: {}", bad.join(", "))
        },
    ));

    let mut bad = Vec::new();
    let mut count = 0;
    for a in 1..=n {
        for b in 1..=n {
            let mut factors = vec![(qubit_of(DiagonalCoords::new(a, b), n), Pauli::X)];
            if b > 1 {
                factors.push((qubit_of(DiagonalCoords::new(a, b - 1), n), Pauli::Z));
            }
            if b < n {
                factors.push((qubit_of(DiagonalCoords::new(a, b + 1), n), Pauli::Z));
            }
            let k = PauliString::from_factors(nq, factors).expect("distinct");
            let via_circuit = k.conjugate_circuit(&circuit).expect("fits");
            let via_mu = mu_substitute(&k, &table);
            count += 1;
            if via_circuit != via_mu {
                bad.push(format!("chain term {} on diagonal {a}", DiagonalCoords::new(a, b)));
            }
        }
    }
    checks.push(Check::new(
        "diagonal cluster chains map to mu images",
        bad.is_empty(),
        if bad.is_empty() {
            format!("{count} chain stabilizers, sign-exact")
        } else {
            bad.join(", ")
        },
    ));

    let depth = circuit.depth();
    checks.push(Check::new(
        "depth equals N",
        depth == n,
        format!("depth {depth} for N = {n}"),
    ));
    Ok(checks)
}

/// Hadamard on every site with `i + j` odd.
pub fn toric_map_circuit(lattice: &Lattice) -> CliffordCircuit {
    let mut c = CliffordCircuit::new(lattice.n_sites());
    for s in lattice.sites().filter(|s| !s.is_even()) {
        c.push(CliffordGate::h(lattice.index(s))).expect("in range");
    }
    c
}

#[derive(Clone, Debug, Serialize)]
pub struct TermPair {
    pub wen: String,
    pub toric: String,
    pub matched: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct WenToricReport {
    pub circuit: CliffordCircuit,
    pub pairs: Vec<TermPair>,
    pub checks: Vec<Check>,
}

/// Conjugates each Wen term by the sublattice Hadamard layer and matches it
/// to the toric term on the same plaquette.
pub fn wen_to_toric(spec: &ModelSpec) -> Result<WenToricReport, DualityError> {
    let wen_spec = ModelSpec {
        model: ModelKind::Wen,
        ..*spec
    };
    let toric_spec = ModelSpec {
        model: ModelKind::Toric,
        ..*spec
    };
    toric_spec.validate()?;
    let wen = crate::models::build_wen(&wen_spec)?;
    let toric = build_toric(&toric_spec)?;
    let lattice = spec.lattice();
    let circuit = toric_map_circuit(&lattice);
    let pairs: Vec<TermPair> = wen
        .terms
        .par_iter()
        .zip(toric.terms.par_iter())
        .map(|(w, t)| {
            let img = w.string.conjugate_circuit(&circuit).expect("fits");
            TermPair {
                wen: w.label.clone(),
                toric: t.label.clone(),
                matched: img == t.string,
            }
        })
        .collect();
    let matched = pairs.iter().filter(|p| p.matched).count();
    let a = toric.terms.iter().filter(|t| t.label.starts_with('A')).count();
    let b = toric.terms.len() - a;
    let mut checks = vec![Check::new(
        "every Wen term maps onto its toric term",
        matched == pairs.len(),
        format!("{matched}/{} matched; {a} vertex + {b} plaquette", pairs.len()),
    )];
    let mut images: Vec<String> = wen
        .terms
        .iter()
        .map(|w| w.string.conjugate_circuit(&circuit).expect("fits").to_string())
        .collect();
    let mut targets: Vec<String> = toric.terms.iter().map(|t| t.string.to_string()).collect();
    images.sort();
    targets.sort();
    checks.push(Check::new(
        "image set equals toric set",
        images == targets,
        format!("{} terms", images.len()),
    ));
    Ok(WenToricReport { circuit, pairs, checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn render_diag(p: &PauliString, n: usize) -> String {
        p.support()
            .into_iter()
            .map(|q| {
                let d = label_of(q, n);
                format!("{:?}({},{})", p.pauli_at(q), d.i_prime, d.j_prime)
            })
            .collect::<Vec<_>>()
            .join(" ")
    }

    #[test]
    fn diagonal_coordinates() {
        assert_eq!(to_diagonal(1, 1, 6).unwrap(), DiagonalCoords::new(1, 1));
        assert_eq!(to_diagonal(2, 3, 6).unwrap(), DiagonalCoords::new(6, 3));
        assert_eq!(from_diagonal(DiagonalCoords::new(6, 3), 6).unwrap(), Site::new(2, 3));
        assert!(to_diagonal(7, 1, 6).is_err());
    }

    #[test]
    fn mu_expansions() {
        let x = mu_expand(MuKind::X, DiagonalCoords::new(2, 3), 4).unwrap();
        let mut parts: Vec<_> = render_diag(&x.expansion, 4).split(' ').map(String::from).collect();
        parts.sort();
        assert_eq!(parts, ["Z(2,3)", "Z(2,4)"]);
        let z = mu_expand(MuKind::Z, DiagonalCoords::new(2, 3), 4).unwrap();
        let mut parts: Vec<_> = render_diag(&z.expansion, 4).split(' ').map(String::from).collect();
        parts.sort();
        assert_eq!(parts, ["X(2,1)", "X(2,2)", "X(2,3)"]);
        let top = mu_expand(MuKind::X, DiagonalCoords::new(2, 4), 4).unwrap();
        assert_eq!(render_diag(&top.expansion, 4), "Z(2,4)");
    }

    #[test]
    fn sigma_round_trip() {
        let n = 4;
        let table = MuTable::new(n).unwrap();
        assert_eq!(
            sigma_in_mu(Pauli::Z, DiagonalCoords::new(1, 2), n).unwrap(),
            vec![
                (MuKind::X, DiagonalCoords::new(1, 2)),
                (MuKind::X, DiagonalCoords::new(1, 3)),
                (MuKind::X, DiagonalCoords::new(1, 4))
            ]
        );
        for q in 0..n * n {
            let d = label_of(q, n);
            for p in [Pauli::X, Pauli::Z] {
                let f = sigma_in_mu(p, d, n).unwrap();
                assert_eq!(table.expand(&f), PauliString::single(n * n, q, p));
            }
        }
    }

    #[test]
    fn bulk_duality_holds() {
        for n in [4, 6] {
            let r = verify_bulk_duality(n).unwrap();
            assert_eq!(r.matched, r.total);
            assert_eq!(r.total, n * (n - 2));
        }
    }

    #[test]
    fn corrupted_table_is_caught() {
        let n = 4;
        let d = DiagonalCoords::new(2, 2);
        let table = MuTable::new(n)
            .unwrap()
            .with_override(MuKind::X, d, PauliString::identity(n * n));
        let r = verify_bulk_duality_with(&table).unwrap();
        assert!(r.matched < r.total);
        assert!(r.checks.iter().any(|c| !c.passed && c.details.contains("mismatch at")));
    }

    #[test]
    fn boundary_classes() {
        let r = classify_boundary_images(4).unwrap();
        assert_eq!(r.count(ImageClass::NonContractibleLoopX), 2);
        assert_eq!(r.count(ImageClass::NonContractibleLoopZ), 2);
        assert_eq!(r.count(ImageClass::SkewedPlaquetteProduct), 4);
        assert_eq!(r.count(ImageClass::BulkPlaquette), 8);
        assert_eq!(r.count(ImageClass::Composite), 4);
        let find = |l: &str| r.images.iter().find(|b| b.label == l).unwrap().class;
        assert_eq!(find("C(2,1)"), ImageClass::NonContractibleLoopZ);
        assert_eq!(find("C(1,1)"), ImageClass::NonContractibleLoopX);
        assert_eq!(find("C(1,2)"), ImageClass::BulkPlaquette);
        assert_eq!(find("C(1,1)C(2,4)"), ImageClass::SkewedPlaquetteProduct);
        assert!(r.formulas.iter().all(|c| c.passed), "{:?}", r.formulas);
    }

    #[test]
    fn circuit_realizes_duality() {
        for n in [2, 3, 4, 5, 6] {
            let c = build_duality_circuit(n).unwrap();
            assert_eq!(c.depth(), n);
        }
        for n in [3, 4, 6] {
            let checks = verify_duality_circuit(n).unwrap();
            assert!(checks.iter().all(|c| c.passed), "{checks:?}");
        }
    }

    #[test]
    fn dual_image_agrees_with_inverse_circuit() {
        let n = 4;
        let u = build_duality_circuit(n).unwrap();
        let mut h = CliffordCircuit::new(n * n);
        h.extend((0..n * n).map(CliffordGate::h)).unwrap();
        let spec = ModelSpec::new(ModelKind::Cluster2d, n, n, Boundary::Periodic);
        for t in build_cluster(&spec).unwrap().terms {
            let via_circuit = t
                .string
                .conjugate_circuit(&u.inverse())
                .unwrap()
                .conjugate_circuit(&h)
                .unwrap();
            assert_eq!(via_circuit, dual_image(&t.string, n), "{}", t.label);
        }
    }

    #[test]
    fn wen_maps_to_toric() {
        for n in [4, 6] {
            let spec = ModelSpec::new(ModelKind::Wen, n, n, Boundary::Periodic);
            let r = wen_to_toric(&spec).unwrap();
            assert!(r.checks.iter().all(|c| c.passed));
            assert_eq!(r.pairs.len(), n * n);
        }
        let odd = ModelSpec::new(ModelKind::Wen, 3, 4, Boundary::Periodic);
        assert!(matches!(
            wen_to_toric(&odd),
            Err(DualityError::Model(ModelError::OddToric { .. }))
        ));
    }
}
