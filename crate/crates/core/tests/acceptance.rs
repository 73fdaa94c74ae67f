//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

use std::process::ExitCode;
use std::time::Instant;

use latdual::duality::{
    build_duality_circuit, classify_boundary_images, duality_image_termset, verify_bulk_duality,
    verify_duality_circuit, wen_to_toric, DualityError, ImageClass,
};
use latdual::entropy::{region_entropy, topological_gamma, GammaScheme, Region};
use latdual::fermion::{bond_formula, bond_occupation, verify_open_decomposition, verify_periodic_decomposition};
use latdual::geometry::{Boundary, Lattice};
use latdual::gf2::{BitMatrix, BitVec};
use latdual::models::{build, constraint_relations, toric_loops, ModelError, ModelKind, ModelSpec, TermSet};
use latdual::pauli::Pauli;
use latdual::report::all_passed;
use latdual::spectrum::{build_stabilizer_ground, commuting_spectrum, dense_spectrum, loop_states, StateVector};
use latdual::stabilizer::{ground_degeneracy, StabilizerGroup};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DENSE_LIMIT: usize = 12;
const AMPLITUDE_TOL: f64 = 1e-12;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn spec(model: ModelKind, rows: usize, cols: usize, bc: Boundary) -> ModelSpec {
    ModelSpec::new(model, rows, cols, bc)
}

fn built(s: &ModelSpec) -> Result<TermSet, String> {
    build(s).map_err(|e| format!("{s}: {e}"))
}

/// Every valid builder spec with `2 <= rows, cols <= 6` (one row for the
/// chain), both boundaries.
fn all_specs() -> Vec<ModelSpec> {
    let mut out = Vec::new();
    for bc in [Boundary::Open, Boundary::Periodic] {
        for cols in 2..=6 {
            out.push(spec(ModelKind::Cluster1d, 1, cols, bc));
        }
        for model in [ModelKind::Cluster2d, ModelKind::Wen, ModelKind::Toric] {
            for rows in 2..=6 {
                for cols in 2..=6 {
                    let s = spec(model, rows, cols, bc);
                    if s.validate().is_ok() {
                        out.push(s);
                    }
                }
            }
        }
    }
    out
}

fn expected_degeneracy(s: &ModelSpec) -> Option<u128> {
    let periodic = s.boundary == Boundary::Periodic;
    let even = s.rows.is_multiple_of(2) && s.cols.is_multiple_of(2);
    match s.model {
        ModelKind::Cluster1d | ModelKind::Cluster2d => Some(1),
        ModelKind::Wen if periodic => Some(if even { 4 } else { 2 }),
        ModelKind::Toric if periodic => Some(4),
        _ => None,
    }
}

fn degeneracy_table() -> Outcome {
    let (mut checked, mut dense) = (0, 0);
    for s in all_specs() {
        let set = built(&s)?;
        let g = ground_degeneracy(&set.strings(), set.n_qubits()).map_err(|e| format!("{s}: {e}"))?;
        if let Some(want) = expected_degeneracy(&s) {
            ensure(g == want, || format!("{s}: degeneracy {g}, expected {want}"))?;
            checked += 1;
        }
        if set.n_qubits() <= DENSE_LIMIT {
            let d = dense_spectrum(&set).map_err(|e| e.to_string())?;
            let m = d.ground().map(|l| l.multiplicity).unwrap_or(0);
            ensure(m == g, || {
                format!("{s}: dense ground multiplicity {m}, stabilizer count {g}")
            })?;
            dense += 1;
        }
    }
    Ok(format!("{checked} table entries exact, {dense} dense cross-checks"))
}

fn binomial(n: u128, k: u128) -> u128 {
    (0..k).fold(1, |acc, t| acc * (n - t) / (t + 1))
}

fn cluster_spectrum() -> Outcome {
    let mut count = 0;
    for bc in [Boundary::Open, Boundary::Periodic] {
        let mut specs: Vec<ModelSpec> = (2..=DENSE_LIMIT)
            .map(|c| spec(ModelKind::Cluster1d, 1, c, bc))
            .collect();
        for rows in 2..=6 {
            for cols in 2..=6 {
                if rows * cols <= DENSE_LIMIT {
                    specs.push(spec(ModelKind::Cluster2d, rows, cols, bc));
                }
            }
        }
        for s in specs {
            let n = s.n_qubits() as i64;
            let got = commuting_spectrum(&built(&s)?).map_err(|e| e.to_string())?;
            let want: Vec<(i64, u128)> = (0..=n).map(|k| (-n + 2 * k, binomial(n as u128, k as u128))).collect();
            let have: Vec<(i64, u128)> = got.levels.iter().map(|l| (l.energy as i64, l.multiplicity)).collect();
            ensure(have == want, || format!("{s}: levels {have:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count} cluster lattices match -N+2k with C(N,k)"))
}

fn bulk_identity() -> Outcome {
    let mut parts = Vec::new();
    for n in [4, 6] {
        let r = verify_bulk_duality(n).map_err(|e| e.to_string())?;
        ensure(r.total > 0 && r.matched == r.total && all_passed(&r.checks), || {
            format!("N={n}: {}/{} bulk terms matched", r.matched, r.total)
        })?;
        parts.push(format!("N={n} {}/{}", r.matched, r.total));
    }
    Ok(parts.join(", "))
}

fn spectrum_preserved() -> Outcome {
    let s = spec(ModelKind::Cluster2d, 4, 4, Boundary::Periodic);
    let cluster = commuting_spectrum(&built(&s)?).map_err(|e| e.to_string())?;
    let image = duality_image_termset(&s).map_err(|e| e.to_string())?;
    let dual = commuting_spectrum(&image).map_err(|e| e.to_string())?;
    ensure(cluster == dual, || "image spectrum differs".into())?;
    Ok(format!(
        "{} levels, total dimension {}",
        cluster.levels.len(),
        cluster.total()
    ))
}

fn boundary_classification() -> Outcome {
    let n = 4;
    let r = classify_boundary_images(n).map_err(|e| e.to_string())?;
    let loops: Vec<_> = r
        .images
        .iter()
        .filter(|b| {
            matches!(
                b.class,
                ImageClass::NonContractibleLoopX | ImageClass::NonContractibleLoopZ
            )
        })
        .collect();
    ensure(loops.len() == n, || format!("{} loops", loops.len()))?;
    for i in 1..=n {
        let label = format!("C({i},1)");
        let want = if i % 2 == 1 {
            ImageClass::NonContractibleLoopX
        } else {
            ImageClass::NonContractibleLoopZ
        };
        ensure(loops.iter().any(|b| b.label == label && b.class == want), || {
            format!("{label} is not {want}")
        })?;
    }
    let products: Vec<_> = r.images.iter().filter(|b| b.label.contains(")C(")).collect();
    ensure(
        products.len() == n && products.iter().all(|b| b.class == ImageClass::SkewedPlaquetteProduct),
        || "a boundary product is not a skewed plaquette".into(),
    )?;
    ensure(all_passed(&r.formulas), || {
        "closed-form boundary expression mismatch".into()
    })?;
    Ok(format!(
        "{} loops ({} X, {} Z), {} skewed products, {} bulk, {} composite",
        loops.len(),
        r.count(ImageClass::NonContractibleLoopX),
        r.count(ImageClass::NonContractibleLoopZ),
        products.len(),
        r.count(ImageClass::BulkPlaquette),
        r.count(ImageClass::Composite)
    ))
}

fn circuit() -> Outcome {
    let mut depths = Vec::new();
    for n in 3..=6 {
        let checks = verify_duality_circuit(n).map_err(|e| e.to_string())?;
        if let Some(c) = checks.iter().find(|c| !c.passed) {
            return Err(format!("N={n}: {} ({})", c.name, c.details));
        }
        let d = build_duality_circuit(n).map_err(|e| e.to_string())?.depth();
        ensure(d == n, || format!("N={n}: depth {d}"))?;
        depths.push(format!("{n}->{d}"));
    }
    Ok(format!("sign-exact images, depths {}", depths.join(" ")))
}

fn wen_toric() -> Outcome {
    let mut parts = Vec::new();
    for n in [4, 6] {
        let r = wen_to_toric(&spec(ModelKind::Wen, n, n, Boundary::Periodic)).map_err(|e| e.to_string())?;
        let matched = r.pairs.iter().filter(|p| p.matched).count();
        ensure(
            matched == n * n && r.pairs.len() == n * n && all_passed(&r.checks),
            || format!("{n}x{n}: {matched}/{} terms matched", r.pairs.len()),
        )?;
        parts.push(format!("{n}x{n} {matched}/{}", n * n));
    }
    for (rows, cols) in [(3, 4), (4, 5), (5, 5)] {
        let err = wen_to_toric(&spec(ModelKind::Wen, rows, cols, Boundary::Periodic));
        ensure(
            matches!(err, Err(DualityError::Model(ModelError::OddToric { .. }))),
            || format!("{rows}x{cols} not rejected: {:?}", err.map(|r| r.pairs.len())),
        )?;
    }
    parts.push("odd sizes rejected".into());
    Ok(parts.join(", "))
}

fn fermion() -> Outcome {
    let mut sites = 0;
    for bc in [Boundary::Open, Boundary::Periodic] {
        for rows in 2..=4 {
            for cols in 2..=4 {
                let l = Lattice::new(rows, cols, bc);
                for s in l.sites() {
                    let Ok(b) = bond_occupation(s, &l) else { continue };
                    let f = bond_formula(s, &l).map_err(|e| e.to_string())?;
                    ensure(b.string == f, || format!("{cols}x{rows} {bc} bond at {s}"))?;
                    sites += 1;
                }
                if bc == Boundary::Open {
                    let r = verify_open_decomposition(&l).map_err(|e| e.to_string())?;
                    ensure(r.components == rows - 1 && r.all_paths && all_passed(&r.checks), || {
                        format!("{cols}x{rows} open: {} components", r.components)
                    })?;
                }
            }
        }
    }
    for (cols, rows) in [(4, 2), (4, 4)] {
        let r =
            verify_periodic_decomposition(&Lattice::new(rows, cols, Boundary::Periodic)).map_err(|e| e.to_string())?;
        ensure(
            r.multiset_equal && r.pairing.iter().all(|p| p.1.is_some()) && all_passed(&r.checks),
            || format!("{cols}x{rows} periodic decomposition failed"),
        )?;
    }
    Ok(format!(
        "{sites} bond sites agree, open chains are M-1 paths, 4x2 and 4x4 periodic multisets equal"
    ))
}

fn span_rank(vectors: &[BitVec], n: usize) -> usize {
    BitMatrix::from_rows(n, vectors.to_vec()).expect("width").rank()
}

fn constraints() -> Outcome {
    let s = spec(ModelKind::Wen, 4, 4, Boundary::Periodic);
    let set = built(&s)?;
    let lattice = s.lattice();
    let rels = constraint_relations(&set);
    ensure(rels.len() == 2 && rels.iter().all(|r| r.sign == 1), || {
        format!("4x4: {rels:?}")
    })?;
    let m = set.len();
    let found: Vec<BitVec> = rels
        .iter()
        .map(|r| BitVec::from_indices(m, r.members.iter().copied()))
        .collect();
    let all = BitVec::from_indices(m, 0..m);
    let even = BitVec::from_indices(m, (0..m).filter(|&k| lattice.site(k).is_even()));
    let mut joint = found.clone();
    joint.extend([all, even]);
    ensure(span_rank(&found, m) == 2 && span_rank(&joint, m) == 2, || {
        "relation span differs".into()
    })?;
    let odd = constraint_relations(&built(&spec(ModelKind::Wen, 3, 4, Boundary::Periodic))?);
    ensure(odd.len() == 1 && odd[0].sign == 1 && odd[0].members.len() == 12, || {
        format!("3x4: {odd:?}")
    })?;
    Ok("4x4: all and even-sublattice products, sign +1; 3x4: one relation".into())
}

fn entropy() -> Outcome {
    let s = spec(ModelKind::Cluster2d, 4, 4, Boundary::Periodic);
    let lattice = s.lattice();
    let group = StabilizerGroup::new(16, built(&s)?.strings()).map_err(|e| e.to_string())?;
    let psi = StateVector::cluster(&lattice);
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for k in 0..20 {
        let region = Region::new((0..16).filter(|_| rng.random_bool(0.5)));
        let exact = region_entropy(&group, &region).map_err(|e| e.to_string())?;
        let dense = psi.entropy(&region);
        ensure((dense - exact as f64).abs() < 1e-9, || {
            format!("region {k}: {exact} vs {dense}")
        })?;
    }

    // The projected |0…0⟩ toric state is also fixed by the Z loops, which
    // complete its stabilizer group; compare every region of the 8-qubit torus.
    let toric8 = spec(ModelKind::Toric, 2, 4, Boundary::Periodic);
    let t8 = built(&toric8)?;
    let (z1, z2) = toric_loops(&toric8, Pauli::Z);
    let mut gens = t8.strings();
    gens.extend([z1, z2]);
    let g8 = StabilizerGroup::new(8, gens).map_err(|e| e.to_string())?;
    ensure(g8.is_pure(), || "toric state group is not pure".into())?;
    let psi8 = build_stabilizer_ground(&t8).map_err(|e| e.to_string())?;
    for mask in 1..255u32 {
        let region = Region::new((0..8).filter(|q| mask >> q & 1 == 1));
        let exact = region_entropy(&g8, &region).map_err(|e| e.to_string())?;
        let dense = psi8.entropy(&region);
        ensure((dense - exact as f64).abs() < 1e-9, || {
            format!("toric region {mask:#b}: {exact} vs {dense}")
        })?;
    }

    let mut gammas = Vec::new();
    for (model, want) in [(ModelKind::Cluster2d, 0.0), (ModelKind::Toric, 1.0)] {
        let s = spec(model, 6, 6, Boundary::Periodic);
        let set = built(&s)?;
        let g = StabilizerGroup::new(36, set.strings()).map_err(|e| e.to_string())?;
        let g = if g.is_pure() { g } else { g.purify() };
        let est = topological_gamma(&g, GammaScheme::Additive, &s.lattice()).map_err(|e| e.to_string())?;
        ensure(est.gamma == want, || {
            format!("{model} 6x6 additive gamma {}", est.gamma)
        })?;
        gammas.push(format!("{model} {}", est.gamma));
    }
    Ok(format!(
        "20 random cluster regions and all 254 toric 8-qubit regions agree with partial trace; additive gamma {}",
        gammas.join(", ")
    ))
}

fn toric_ground() -> Outcome {
    let s = spec(ModelKind::Toric, 2, 4, Boundary::Periodic);
    let set = built(&s)?;
    let psi = build_stabilizer_ground(&set).map_err(|e| e.to_string())?;
    for t in &set.terms {
        let r = psi.eigen_residual(&t.string, 1.0);
        ensure(r <= AMPLITUDE_TOL, || format!("{}: residual {r:e}", t.label))?;
    }
    let nonzero: Vec<f64> = psi
        .amplitudes()
        .iter()
        .map(|a| a.norm())
        .filter(|&a| a > AMPLITUDE_TOL)
        .collect();
    let want = 1usize << (s.n_qubits() / 2 - 1);
    ensure(nonzero.len() == want, || {
        format!("{} nonzero amplitudes, expected {want}", nonzero.len())
    })?;
    ensure(nonzero.iter().all(|a| (a - nonzero[0]).abs() <= AMPLITUDE_TOL), || {
        "unequal magnitudes".into()
    })?;
    let states = loop_states(&set).map_err(|e| e.to_string())?;
    for (a, x) in states.iter().enumerate() {
        for (b, y) in states.iter().enumerate() {
            let ip = x.inner(y);
            let target = if a == b { 1.0 } else { 0.0 };
            ensure(
                (ip.re - target).abs() <= AMPLITUDE_TOL && ip.im.abs() <= AMPLITUDE_TOL,
                || format!("<{a}|{b}> = {ip}"),
            )?;
        }
    }
    Ok(format!(
        "{} stabilizers at +1, {want} equal amplitudes, 4 orthonormal loop states",
        set.len()
    ))
}

fn oracle_equivalence() -> Outcome {
    let mut count = 0;
    for base in all_specs().into_iter().filter(|s| s.n_qubits() <= DENSE_LIMIT) {
        for sign in [-1, 1] {
            let s = base.with_sign(sign);
            let set = built(&s)?;
            if set.check_commuting().is_err() {
                continue;
            }
            let c = commuting_spectrum(&set).map_err(|e| format!("{s}: {e}"))?;
            let d = dense_spectrum(&set).map_err(|e| format!("{s}: {e}"))?;
            ensure(c.matches(&d), || format!("{s}: commuting {c:?} vs dense {d:?}"))?;
            count += 1;
        }
    }
    Ok(format!("{count}/{count} term sets agree"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 12] = [
        ("degeneracy table", degeneracy_table),
        ("cluster spectrum formula", cluster_spectrum),
        ("duality bulk identity", bulk_identity),
        ("duality spectrum preservation", spectrum_preserved),
        ("boundary classification", boundary_classification),
        ("duality circuit", circuit),
        ("wen to toric", wen_toric),
        ("fermionization identities", fermion),
        ("constraint relations", constraints),
        ("entropy", entropy),
        ("toric ground state", toric_ground),
        ("oracle equivalence", oracle_equivalence),
    ];
    let mut failed = 0;
    for (k, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let ms = start.elapsed().as_millis();
        match outcome {
            Ok(detail) => println!("PASS  {:>2}. {name}: {detail} ({ms} ms)", k + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {:>2}. {name}: {detail} ({ms} ms)", k + 1);
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
