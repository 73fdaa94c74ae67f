//! Verification suites and report rendering behind the `latdual` binary.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use clap::ValueEnum;
use latdual::clifford::{CliffordCircuit, GateKind};
use latdual::duality::{
    build_duality_circuit, classify_boundary_images, duality_image_termset, duality_size, verify_bulk_duality_with,
    verify_duality_circuit, wen_to_toric, DualityError, ImageClass, MuTable,
};
use latdual::entropy::{region_entropy, topological_gamma, GammaScheme, Region};
use latdual::fermion::{
    bond_formula, bond_occupation, verify_open_decomposition, verify_periodic_decomposition, FermionError,
};
use latdual::geometry::{Boundary, Site};
use latdual::models::{build, constraint_relations, ModelError, ModelKind, ModelSpec, Term, TermSet};
use latdual::pauli::PauliString;
use latdual::report::Check;
use latdual::spectrum::{
    build_stabilizer_ground, commuting_spectrum, dense_spectrum, loop_states, oracle_cap, SpectrumError,
    SpectrumSummary,
};
use latdual::stabilizer::{ground_degeneracy, StabilizerError, StabilizerGroup};
use serde::{Serialize, Serializer};
use serde_json::Value;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Duality(#[from] DualityError),
    #[error(transparent)]
    Fermion(#[from] FermionError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error(transparent)]
    Stabilizer(#[from] StabilizerError),
    #[error("invalid region '{0}': expected i1,j1:i2,j2")]
    Region(String),
    #[error("suite {suite} needs {need}")]
    Unsupported { suite: Suite, need: String },
    #[error("{0}")]
    Io(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    DualityBulk,
    DualityBoundary,
    DualitySpectrum,
    WenToric,
    FermionOpen,
    FermionPeriodic,
    Constraints,
    Degeneracy,
    Entropy,
    Gamma,
    ToricGround,
    CircuitDepth,
}

impl Suite {
    pub const ALL: [Suite; 12] = [
        Suite::DualityBulk,
        Suite::DualityBoundary,
        Suite::DualitySpectrum,
        Suite::WenToric,
        Suite::FermionOpen,
        Suite::FermionPeriodic,
        Suite::Constraints,
        Suite::Degeneracy,
        Suite::Entropy,
        Suite::Gamma,
        Suite::ToricGround,
        Suite::CircuitDepth,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::DualityBulk => "duality-bulk",
            Suite::DualityBoundary => "duality-boundary",
            Suite::DualitySpectrum => "duality-spectrum",
            Suite::WenToric => "wen-toric",
            Suite::FermionOpen => "fermion-open",
            Suite::FermionPeriodic => "fermion-periodic",
            Suite::Constraints => "constraints",
            Suite::Degeneracy => "degeneracy",
            Suite::Entropy => "entropy",
            Suite::Gamma => "gamma",
            Suite::ToricGround => "toric-ground",
            Suite::CircuitDepth => "circuit-depth",
        }
    }

    /// Model, rows, cols and boundary used when no flag overrides them.
    pub fn default_spec(self) -> ModelSpec {
        let (model, rows, cols, bc) = match self {
            Suite::DualityBulk | Suite::DualityBoundary | Suite::DualitySpectrum | Suite::CircuitDepth => {
                (ModelKind::Cluster2d, 4, 4, Boundary::Periodic)
            }
            Suite::WenToric | Suite::FermionPeriodic | Suite::Constraints | Suite::Degeneracy => {
                (ModelKind::Wen, 4, 4, Boundary::Periodic)
            }
            Suite::FermionOpen => (ModelKind::Wen, 4, 4, Boundary::Open),
            Suite::Entropy => (ModelKind::Cluster2d, 3, 4, Boundary::Periodic),
            Suite::Gamma => (ModelKind::Cluster2d, 6, 6, Boundary::Periodic),
            Suite::ToricGround => (ModelKind::Toric, 2, 4, Boundary::Periodic),
        };
        ModelSpec::new(model, rows, cols, bc)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Inclusive rectangle `i1,j1:i2,j2` in 1-based coordinates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RegionArg {
    pub from: Site,
    pub to: Site,
}

impl FromStr for RegionArg {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CliError::Region(s.to_string());
        let corner = |t: &str| -> Result<Site, CliError> {
            let (i, j) = t.split_once(',').ok_or_else(bad)?;
            Ok(Site::new(
                i.trim().parse().map_err(|_| bad())?,
                j.trim().parse().map_err(|_| bad())?,
            ))
        };
        let (a, b) = s.split_once(':').ok_or_else(bad)?;
        Ok(Self {
            from: corner(a)?,
            to: corner(b)?,
        })
    }
}

impl fmt::Display for RegionArg {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}:{},{}", self.from.i, self.from.j, self.to.i, self.to.j)
    }
}

impl Serialize for RegionArg {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteParams {
    pub spec: ModelSpec,
    pub scheme: GammaScheme,
    pub region: Option<RegionArg>,
}

impl SuiteParams {
    pub fn defaults(suite: Suite) -> Self {
        Self {
            spec: suite.default_spec(),
            scheme: GammaScheme::Additive,
            region: None,
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RunOptions {
    /// Shift every reference value the suite compares against, so that a
    /// correct verifier must report failure.
    pub inject_fault: bool,
    /// Report `wall_ms` as 0 for byte-stable output.
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    Skipped,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Skipped => "SKIP",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub status: Status,
    pub details: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteReport {
    pub command: String,
    pub params: SuiteParams,
    pub status: Status,
    pub checks: Vec<CheckRecord>,
    pub metrics: BTreeMap<String, Value>,
    pub wall_ms: u64,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

/// Integers render without a fractional part.
pub fn metric_value(x: f64) -> Value {
    if x.is_finite() && x.fract() == 0.0 && x.abs() < 9.0e15 {
        Value::from(x as i64)
    } else {
        serde_json::Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

fn fmt_num(x: f64) -> String {
    metric_value(x).to_string()
}

struct Builder {
    checks: Vec<CheckRecord>,
    metrics: BTreeMap<String, Value>,
    fault: bool,
}

impl Builder {
    fn push(&mut self, name: impl Into<String>, status: Status, details: impl Into<String>) {
        self.checks.push(CheckRecord {
            name: name.into(),
            status,
            details: details.into(),
        });
    }

    fn check(&mut self, c: &Check) {
        let status = if c.passed { Status::Pass } else { Status::Fail };
        self.push(c.name.clone(), status, c.details.clone());
    }

    fn checks(&mut self, cs: &[Check]) {
        cs.iter().for_each(|c| self.check(c));
    }

    fn test(&mut self, name: &str, ok: bool, details: impl Into<String>) {
        self.push(name, if ok { Status::Pass } else { Status::Fail }, details);
    }

    fn skip(&mut self, name: &str, why: impl Into<String>) {
        self.push(name, Status::Skipped, why);
    }

    /// Exact comparison against a reference value.
    fn expect(&mut self, name: &str, got: f64, want: f64) {
        let want = if self.fault { want + 1.0 } else { want };
        self.test(
            name,
            got == want,
            format!("got {}, expected {}", fmt_num(got), fmt_num(want)),
        );
    }

    fn metric(&mut self, name: &str, x: f64) {
        self.metrics.insert(name.to_string(), metric_value(x));
    }
}

fn require(suite: Suite, ok: bool, need: &str) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Unsupported {
            suite,
            need: need.to_string(),
        })
    }
}

/// Reference ground-state degeneracies of the models.
pub fn reference_degeneracy(spec: &ModelSpec) -> Option<u128> {
    let periodic = spec.boundary == Boundary::Periodic;
    let even = spec.rows.is_multiple_of(2) && spec.cols.is_multiple_of(2);
    match spec.model {
        ModelKind::Cluster1d | ModelKind::Cluster2d => Some(1),
        ModelKind::Wen if periodic => Some(if even { 4 } else { 2 }),
        ModelKind::Toric if periodic => Some(4),
        _ => None,
    }
}

fn reference_relations(spec: &ModelSpec) -> Option<usize> {
    let periodic = spec.boundary == Boundary::Periodic;
    let even = spec.rows.is_multiple_of(2) && spec.cols.is_multiple_of(2);
    match spec.model {
        ModelKind::Cluster1d | ModelKind::Cluster2d => Some(0),
        ModelKind::Wen if periodic => Some(if even { 2 } else { 1 }),
        ModelKind::Toric if periodic => Some(2),
        _ => None,
    }
}

fn reference_gamma(spec: &ModelSpec, scheme: GammaScheme) -> Option<f64> {
    match (spec.model, scheme, spec.boundary) {
        (ModelKind::Cluster1d | ModelKind::Cluster2d, _, _) => Some(0.0),
        (ModelKind::Wen | ModelKind::Toric, GammaScheme::Additive, Boundary::Periodic) => Some(1.0),
        _ => None,
    }
}

/// Spectrum of the model Hamiltonian: combinatorial when the terms commute,
/// dense otherwise.
pub fn model_spectrum(spec: &ModelSpec) -> Result<SpectrumSummary, CliError> {
    let set = build(spec)?;
    Ok(match set.check_commuting() {
        Ok(()) => commuting_spectrum(&set)?,
        Err(_) => dense_spectrum(&set)?,
    })
}

/// The circuit associated with a suite, for `--emit-circuit`.
pub fn suite_circuit(suite: Suite, params: &SuiteParams) -> Result<CliffordCircuit, CliError> {
    match suite {
        Suite::CircuitDepth | Suite::DualityBulk | Suite::DualityBoundary | Suite::DualitySpectrum => {
            Ok(build_duality_circuit(duality_size(&params.spec)?)?)
        }
        Suite::WenToric => Ok(wen_to_toric(&params.spec)?.circuit),
        _ => Err(CliError::Unsupported {
            suite,
            need: "a duality or wen-toric suite to emit a circuit".into(),
        }),
    }
}

/// Pure stabilizer state of the model: the terms themselves, completed by
/// logical operators when the ground space is degenerate.
fn model_state(set: &TermSet) -> Result<(StabilizerGroup, bool), CliError> {
    let g = StabilizerGroup::new(set.n_qubits(), set.strings())?;
    Ok(if g.is_pure() { (g, true) } else { (g.purify(), false) })
}

pub fn run_suite(suite: Suite, params: &SuiteParams, options: &RunOptions) -> Result<SuiteReport, CliError> {
    params.spec.validate()?;
    let start = Instant::now();
    let mut b = Builder {
        checks: Vec::new(),
        metrics: BTreeMap::new(),
        fault: options.inject_fault,
    };
    let spec = params.spec;
    match suite {
        Suite::DualityBulk => {
            require(suite, spec.model == ModelKind::Cluster2d, "the cluster2d model")?;
            let n = duality_size(&spec)?;
            let r = verify_bulk_duality_with(&MuTable::new(n)?)?;
            b.checks(&r.checks);
            b.expect("bulk terms matched", r.matched as f64, r.total as f64);
            b.push("orientation", Status::Pass, r.correspondence);
            b.metric("n", n as f64);
            b.metric("matched", r.matched as f64);
            b.metric("total", r.total as f64);
        }
        Suite::DualityBoundary => {
            require(suite, spec.model == ModelKind::Cluster2d, "the cluster2d model")?;
            let n = duality_size(&spec)?;
            let r = classify_boundary_images(n)?;
            b.checks(&r.formulas);
            let x = r.count(ImageClass::NonContractibleLoopX);
            let z = r.count(ImageClass::NonContractibleLoopZ);
            b.expect("non-contractible loops", (x + z) as f64, n as f64);
            let alternating = (1..=n).all(|i| {
                let want = if i % 2 == 1 {
                    ImageClass::NonContractibleLoopX
                } else {
                    ImageClass::NonContractibleLoopZ
                };
                r.images
                    .iter()
                    .any(|img| img.label == format!("C({i},1)") && img.class == want)
            });
            b.test(
                "loop alternation",
                alternating,
                "C(i,1): X loop for odd i, Z loop for even i",
            );
            let skewed = r
                .images
                .iter()
                .filter(|img| img.label.contains(")C(") && img.class == ImageClass::SkewedPlaquetteProduct)
                .count();
            b.expect("skewed plaquette products", skewed as f64, n as f64);
            for class in [
                ImageClass::BulkPlaquette,
                ImageClass::SkewedPlaquetteProduct,
                ImageClass::NonContractibleLoopX,
                ImageClass::NonContractibleLoopZ,
                ImageClass::Composite,
            ] {
                b.metric(&class.to_string(), r.count(class) as f64);
            }
        }
        Suite::DualitySpectrum => {
            require(suite, spec.model == ModelKind::Cluster2d, "the cluster2d model")?;
            let n = duality_size(&spec)?;
            let cluster = build(&spec)?;
            let image = duality_image_termset(&spec)?;
            let a = commuting_spectrum(&cluster)?;
            let c = commuting_spectrum(&image)?;
            b.test("spectrum preserved", a == c, format!("{} levels each", a.levels.len()));
            b.expect("image dimension", c.total() as f64, (1u128 << (n * n)) as f64);
            if image.n_qubits() <= oracle_cap() {
                b.test(
                    "dense oracle",
                    dense_spectrum(&image)?.matches(&c),
                    "dense image spectrum",
                );
            } else {
                b.skip(
                    "dense oracle",
                    format!("{} qubits above the dense cap {}", image.n_qubits(), oracle_cap()),
                );
            }
            b.metric("levels", c.levels.len() as f64);
            if let Some(g) = c.ground() {
                b.metric("ground_energy", g.energy);
                b.metric("ground_multiplicity", g.multiplicity as f64);
            }
        }
        Suite::WenToric => {
            require(suite, spec.model == ModelKind::Wen, "the wen model")?;
            let r = wen_to_toric(&spec)?;
            b.checks(&r.checks);
            let matched = r.pairs.iter().filter(|p| p.matched).count();
            b.expect("terms mapped", matched as f64, (spec.rows * spec.cols) as f64);
            b.metric("hadamards", r.circuit.len() as f64);
            b.metric("depth", r.circuit.depth() as f64);
            b.metric("pairs", r.pairs.len() as f64);
        }
        Suite::FermionOpen => {
            let lattice = spec.lattice();
            let mut bonds = 0;
            let mut mismatched = Vec::new();
            for s in lattice.sites() {
                let Ok(occ) = bond_occupation(s, &lattice) else {
                    continue;
                };
                bonds += 1;
                if occ.string != bond_formula(s, &lattice)? {
                    mismatched.push(s.to_string());
                }
            }
            b.test(
                "bond closed form",
                mismatched.is_empty(),
                format!("{bonds} bonds, mismatched: {mismatched:?}"),
            );
            let r = verify_open_decomposition(&lattice)?;
            b.checks(&r.checks);
            b.expect("path components", r.components as f64, (spec.rows - 1) as f64);
            b.metric("bonds", bonds as f64);
            b.metric("components", r.components as f64);
            b.metric("terms", r.terms as f64);
            b.metric("matched", r.matched as f64);
        }
        Suite::FermionPeriodic => {
            let r = verify_periodic_decomposition(&spec.lattice())?;
            b.checks(&r.checks);
            b.test(
                "multiset equality",
                r.multiset_equal,
                "bond products and L_j against Wen terms",
            );
            let paired = r.pairing.iter().filter(|p| p.1.is_some()).count();
            b.expect("boundary operators paired", paired as f64, spec.rows as f64);
            b.metric("wen_terms", r.wen_terms as f64);
            b.metric("bond_products", r.bond_products as f64);
            b.metric("boundary_terms", r.boundary_terms as f64);
        }
        Suite::Constraints => {
            let set = build(&spec)?;
            let rels = constraint_relations(&set);
            let n = set.n_qubits();
            for (k, rel) in rels.iter().enumerate() {
                let product = rel
                    .members
                    .iter()
                    .fold(PauliString::identity(n), |acc, &t| &acc * &set.terms[t].string);
                let ok = product.is_identity() && product.sign() == Some(rel.sign);
                b.test(
                    &format!("relation {}", k + 1),
                    ok,
                    format!(
                        "{} terms, product {}",
                        rel.members.len(),
                        if rel.sign == 1 { "+1" } else { "-1" }
                    ),
                );
            }
            match reference_relations(&spec) {
                Some(want) => b.expect("relation count", rels.len() as f64, want as f64),
                None => b.skip("relation count", "no reference count for this model and boundary"),
            }
            b.metric("relations", rels.len() as f64);
            b.metric("terms", set.len() as f64);
            b.metric("rank", (set.len() - rels.len()) as f64);
        }
        Suite::Degeneracy => {
            let set = build(&spec.with_sign(-1))?;
            let n = set.n_qubits();
            let g = ground_degeneracy(&set.strings(), n)?;
            match reference_degeneracy(&spec) {
                Some(want) => b.expect("degeneracy", g as f64, want as f64),
                None => b.skip("degeneracy", "no reference value for this model and boundary"),
            }
            let ground = commuting_spectrum(&set)?.ground().map(|l| l.multiplicity).unwrap_or(0);
            b.test(
                "combinatorial spectrum",
                ground == g,
                format!("ground multiplicity {ground}"),
            );
            if n <= oracle_cap() {
                let dense = dense_spectrum(&set)?.ground().map(|l| l.multiplicity).unwrap_or(0);
                b.test("dense oracle", dense == g, format!("ground multiplicity {dense}"));
            } else {
                b.skip(
                    "dense oracle",
                    format!("{n} qubits above the dense cap {}", oracle_cap()),
                );
            }
            b.metric("degeneracy", g as f64);
            b.metric("log2_degeneracy", (g.trailing_zeros()) as f64);
            b.metric("qubits", n as f64);
        }
        Suite::Entropy => {
            let set = build(&spec)?;
            let lattice = spec.lattice();
            let (group, unique) = model_state(&set)?;
            let region = match params.region {
                Some(r) => Region::rectangle(&lattice, r.from, r.to)?,
                None => Region::block(&lattice, Site::new(1, 1), spec.cols.div_ceil(2), spec.rows.div_ceil(2))?,
            };
            let n = set.n_qubits();
            let s = region_entropy(&group, &region)?;
            let sc = region_entropy(&group, &region.complement(n))?;
            b.expect("complement symmetry", sc as f64, s as f64);
            if !unique {
                b.push(
                    "state",
                    Status::Pass,
                    "degenerate ground space; completed with logical operators",
                );
            }
            if n <= oracle_cap() {
                let terms = group
                    .generators()
                    .iter()
                    .enumerate()
                    .map(|(k, p)| Term {
                        label: format!("G{}", k + 1),
                        string: p.clone(),
                    })
                    .collect();
                let psi = build_stabilizer_ground(&TermSet::new(spec, terms))?;
                let dense = psi.entropy(&region);
                b.test(
                    "partial trace",
                    (dense - s as f64).abs() < 1e-9,
                    format!("dense entropy {dense:.12}"),
                );
            } else {
                b.skip(
                    "partial trace",
                    format!("{n} qubits above the dense cap {}", oracle_cap()),
                );
            }
            b.metric("entropy", s as f64);
            b.metric("region_size", region.len() as f64);
            b.metric("boundary_size", region.boundary(&lattice).len() as f64);
        }
        Suite::Gamma => {
            let set = build(&spec)?;
            let (group, _) = model_state(&set)?;
            let est = topological_gamma(&group, params.scheme, &spec.lattice())?;
            match reference_gamma(&spec, params.scheme) {
                Some(want) => b.expect("gamma", est.gamma, want),
                None => b.skip(
                    "gamma",
                    format!("no reference value for the {} scheme on this model", params.scheme),
                ),
            }
            b.metric("gamma", est.gamma);
            if let Some(slope) = est.slope {
                b.metric("slope", slope);
            }
            for (name, s) in &est.entropies {
                b.metric(&format!("S_{name}"), *s as f64);
            }
        }
        Suite::ToricGround => {
            require(
                suite,
                spec.model == ModelKind::Toric && spec.boundary == Boundary::Periodic,
                "a periodic toric model",
            )?;
            let set = build(&spec)?;
            let psi = build_stabilizer_ground(&set)?;
            let worst = set
                .terms
                .iter()
                .map(|t| psi.eigen_residual(&t.string, 1.0))
                .fold(0.0, f64::max);
            b.test(
                "stabilizer eigenvalues",
                worst <= 1e-12,
                format!("max residual {worst:.3e}"),
            );
            let mags: Vec<f64> = psi
                .amplitudes()
                .iter()
                .map(|a| a.norm())
                .filter(|&a| a > 1e-12)
                .collect();
            b.expect(
                "nonzero amplitudes",
                mags.len() as f64,
                (1u64 << (set.n_qubits() / 2 - 1)) as f64,
            );
            let spread = mags.iter().fold(0.0f64, |m, a| m.max((a - mags[0]).abs()));
            b.test("equal magnitudes", spread <= 1e-12, format!("spread {spread:.3e}"));
            let states = loop_states(&set)?;
            let mut gram = 0.0f64;
            for (i, x) in states.iter().enumerate() {
                for (j, y) in states.iter().enumerate() {
                    let target = if i == j { 1.0 } else { 0.0 };
                    gram = gram.max((x.inner(y) - target).norm());
                }
            }
            b.test(
                "loop states orthonormal",
                gram <= 1e-12,
                format!("max Gram deviation {gram:.3e}"),
            );
            b.metric("nonzero_amplitudes", mags.len() as f64);
            b.metric("qubits", set.n_qubits() as f64);
        }
        Suite::CircuitDepth => {
            require(suite, spec.model == ModelKind::Cluster2d, "the cluster2d model")?;
            let n = duality_size(&spec)?;
            b.checks(&verify_duality_circuit(n)?);
            let c = build_duality_circuit(n)?;
            b.expect("depth", c.depth() as f64, n as f64);
            let count = |k: GateKind| c.gates().iter().filter(|g| g.kind == k).count() as f64;
            b.metric("depth", c.depth() as f64);
            b.metric("gates", c.len() as f64);
            b.metric("cnot", count(GateKind::Cnot));
            b.metric("h", count(GateKind::H));
        }
    }
    let status = if b.checks.iter().any(|c| c.status == Status::Fail) {
        Status::Fail
    } else {
        Status::Pass
    };
    Ok(SuiteReport {
        command: suite.name().to_string(),
        params: params.clone(),
        status,
        checks: b.checks,
        metrics: b.metrics,
        wall_ms: if options.no_timing {
            0
        } else {
            start.elapsed().as_millis() as u64
        },
    })
}

/// A single report renders as an object, several as an array.
pub fn render_json(reports: &[SuiteReport]) -> String {
    let mut out = match reports {
        [one] => serde_json::to_string_pretty(one),
        many => serde_json::to_string_pretty(many),
    }
    .expect("reports serialize");
    out.push('\n');
    out
}

pub fn render_text(reports: &[SuiteReport]) -> String {
    let mut out = String::new();
    for (k, r) in reports.iter().enumerate() {
        if k > 0 {
            out.push('\n');
        }
        render_one(&mut out, r);
    }
    out
}

fn render_one(out: &mut String, r: &SuiteReport) {
    let count = |s: Status| r.checks.iter().filter(|c| c.status == s).count();
    let _ = writeln!(out, "{} {} ({} ms)", r.command, r.status, r.wall_ms);
    let _ = writeln!(out, "  spec    {}", r.params.spec);
    if r.command == Suite::Gamma.name() {
        let _ = writeln!(out, "  scheme  {}", r.params.scheme);
    }
    if let Some(region) = r.params.region {
        let _ = writeln!(out, "  region  {region}");
    }
    let _ = writeln!(
        out,
        "checks: {} passed, {} failed, {} skipped",
        count(Status::Pass),
        count(Status::Fail),
        count(Status::Skipped)
    );
    let width = r.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    for status in [Status::Fail, Status::Skipped, Status::Pass] {
        for c in r.checks.iter().filter(|c| c.status == status) {
            let _ = writeln!(out, "  {}  {:<width$}  {}", c.status, c.name, c.details);
        }
    }
    if !r.metrics.is_empty() {
        let _ = writeln!(out, "metrics:");
        let width = r.metrics.keys().map(String::len).max().unwrap_or(0);
        for (name, value) in &r.metrics {
            let _ = writeln!(out, "  {name:<width$}  {value}");
        }
    }
}

/// Gate list `[{kind, targets}]` in application order.
pub fn circuit_json(c: &CliffordCircuit) -> String {
    let mut s = serde_json::to_string_pretty(c.gates()).expect("gates serialize");
    s.push('\n');
    s
}

pub fn spectrum_json(s: &SpectrumSummary) -> String {
    let mut out = serde_json::to_string_pretty(s).expect("spectrum serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(suite: Suite) -> SuiteReport {
        run_suite(
            suite,
            &SuiteParams::defaults(suite),
            &RunOptions {
                no_timing: true,
                ..RunOptions::default()
            },
        )
        .unwrap()
    }

    #[test]
    fn every_suite_passes_on_defaults() {
        for suite in Suite::ALL {
            let r = run(suite);
            assert!(r.passed(), "{}", render_text(&[r]));
        }
    }

    #[test]
    fn wen_degeneracy_metric() {
        let r = run(Suite::Degeneracy);
        assert_eq!(r.metrics["degeneracy"], Value::from(4));
    }

    #[test]
    fn cluster_gamma_zero() {
        let r = run(Suite::Gamma);
        assert_eq!(r.metrics["gamma"], Value::from(0));
        assert!(r.passed());
    }

    #[test]
    fn region_parsing() {
        let r: RegionArg = "1,2:3,4".parse().unwrap();
        assert_eq!((r.from, r.to), (Site::new(1, 2), Site::new(3, 4)));
        assert_eq!(r.to_string(), "1,2:3,4");
        assert!("1,2-3,4".parse::<RegionArg>().is_err());
    }

    #[test]
    fn metric_formatting() {
        assert_eq!(metric_value(4.0).to_string(), "4");
        assert_eq!(metric_value(-0.5).to_string(), "-0.5");
    }

    #[test]
    fn failures_listed_first() {
        let mut r = run(Suite::CircuitDepth);
        r.checks.push(CheckRecord {
            name: "synthetic".into(),
            status: Status::Fail,
            details: String::new(),
        });
        let text = render_text(&[r]);
        let first = text
            .lines()
            .find(|l| l.starts_with("  PASS") || l.starts_with("  FAIL"))
            .unwrap();
        assert!(first.starts_with("  FAIL  synthetic"));
    }

    #[test]
    fn toric_needs_even_sides() {
        let mut p = SuiteParams::defaults(Suite::Degeneracy);
        p.spec = ModelSpec::new(ModelKind::Toric, 3, 4, Boundary::Periodic);
        let err = run_suite(Suite::Degeneracy, &p, &RunOptions::default()).unwrap_err();
        assert!(err.to_string().contains("toric periodic requires even dimensions"));
    }
}
