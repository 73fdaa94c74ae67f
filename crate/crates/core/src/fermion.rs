//! Jordan-Wigner Majorana operators as Pauli strings, and term-by-term
//! checks of the fermionic form of the Wen model.
//!
//! Modes follow the flat row-major order. With `P(q)` the product of `Y` on
//! every qubit before `q`, `α = P·Z` and `β = P·X`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::{Boundary, Lattice, Site};
use crate::models::{build_wen, term_label, ModelError, ModelKind, ModelSpec};
use crate::pauli::{Pauli, PauliString};
use crate::report::Check;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FermionError {
    #[error("site {site} outside the {rows}x{cols} lattice")]
    InvalidSite { site: Site, rows: usize, cols: usize },
    #[error("bond at {0} has no partner on an open lattice")]
    NoPartner(Site),
    #[error("the {0} decomposition needs a {1} lattice")]
    WrongBoundary(&'static str, Boundary),
    #[error("periodic decomposition needs an even number of columns (got {0})")]
    OddColumns(usize),
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Flavor {
    Alpha,
    Beta,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Alpha => "alpha",
            Flavor::Beta => "beta",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MajoranaString {
    pub flavor: Flavor,
    pub site: Site,
    pub string: PauliString,
}

fn check_site(lattice: &Lattice, site: Site) -> Result<(), FermionError> {
    if lattice.contains(site) {
        Ok(())
    } else {
        Err(FermionError::InvalidSite {
            site,
            rows: lattice.rows,
            cols: lattice.cols,
        })
    }
}

pub fn majorana(flavor: Flavor, site: Site, lattice: &Lattice) -> Result<MajoranaString, FermionError> {
    check_site(lattice, site)?;
    let q = lattice.index(site);
    let last = match flavor {
        Flavor::Alpha => Pauli::Z,
        Flavor::Beta => Pauli::X,
    };
    let factors = (0..q).map(|k| (k, Pauli::Y)).chain([(q, last)]);
    Ok(MajoranaString {
        flavor,
        site,
        string: PauliString::from_factors(lattice.n_sites(), factors).expect("distinct qubits"),
    })
}

/// `2 d†d - 1` for the mode on the vertical bond from `(i,j)` to `(i,j+1)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BondOccupation {
    pub site: Site,
    pub string: PauliString,
}

fn partner(site: Site, lattice: &Lattice) -> Result<Site, FermionError> {
    check_site(lattice, site)?;
    lattice.shift(site, 0, 1).ok_or(FermionError::NoPartner(site))
}

/// `i · α(i,j) · β(i,j+1)`, built from the Majorana strings.
pub fn bond_occupation(site: Site, lattice: &Lattice) -> Result<BondOccupation, FermionError> {
    let up = partner(site, lattice)?;
    let a = majorana(Flavor::Alpha, site, lattice)?.string;
    let b = majorana(Flavor::Beta, up, lattice)?.string;
    Ok(BondOccupation {
        site,
        string: (&a * &b).times_i(1),
    })
}

/// The closed form of the bond operator: `X (Y … Y) X` across the strictly
/// intermediate qubits, or `Z (Y … Y) Z` when the bond wraps from the last
/// row to the first.
pub fn bond_formula(site: Site, lattice: &Lattice) -> Result<PauliString, FermionError> {
    let up = partner(site, lattice)?;
    let (a, b) = (lattice.index(site), lattice.index(up));
    let (lo, hi, end) = if a < b { (a, b, Pauli::X) } else { (b, a, Pauli::Z) };
    let factors = [(lo, end)]
        .into_iter()
        .chain((lo + 1..hi).map(|k| (k, Pauli::Y)))
        .chain([(hi, end)]);
    Ok(PauliString::from_factors(lattice.n_sites(), factors).expect("distinct qubits"))
}

#[derive(Clone, Debug, Serialize)]
pub struct OpenReport {
    pub checks: Vec<Check>,
    pub terms: usize,
    pub matched: usize,
    pub components: usize,
    pub all_paths: bool,
}

fn wen_spec(lattice: &Lattice) -> ModelSpec {
    ModelSpec::new(ModelKind::Wen, lattice.rows, lattice.cols, lattice.boundary)
}

/// Connected components of a graph given by edges; returns
/// `(component count, every component is a simple path)`.
fn path_components(nodes: usize, edges: &[(usize, usize)]) -> (usize, bool) {
    let mut parent: Vec<usize> = (0..nodes).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        let mut y = x;
        while p[y] != r {
            let next = p[y];
            p[y] = r;
            y = next;
        }
        r
    }
    let mut degree = vec![0usize; nodes];
    let mut acyclic = true;
    for &(a, b) in edges {
        degree[a] += 1;
        degree[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            acyclic = false;
        } else {
            parent[ra] = rb;
        }
    }
    let roots: BTreeSet<usize> = (0..nodes).map(|x| find(&mut parent, x)).collect();
    (roots.len(), acyclic && degree.iter().all(|&d| d <= 2))
}

/// Checks `W(i,j) = bond(i,j) · bond(i+1,j)` for every term of the open
/// model and finds the chain structure from the operators themselves.
pub fn verify_open_decomposition(lattice: &Lattice) -> Result<OpenReport, FermionError> {
    if lattice.boundary != Boundary::Open {
        return Err(FermionError::WrongBoundary("open", lattice.boundary));
    }
    let wen = build_wen(&wen_spec(lattice))?;
    let bond_sites: Vec<Site> = (1..lattice.rows)
        .flat_map(|j| (1..=lattice.cols).map(move |i| Site::new(i, j)))
        .collect();
    let bonds: Vec<PauliString> = bond_sites
        .iter()
        .map(|&s| bond_occupation(s, lattice).map(|b| b.string))
        .collect::<Result<_, _>>()?;

    let checks: Vec<Check> = wen
        .terms
        .par_iter()
        .map(|t| {
            let s = parse_label_site(&t.label);
            let product = &bond_occupation(s, lattice).expect("bond").string
                * &bond_occupation(Site::new(s.i + 1, s.j), lattice).expect("bond").string;
            Check::new(
                format!("{} = N{s} N({},{})", t.label, s.i + 1, s.j),
                product == t.string,
                product.render(lattice),
            )
        })
        .collect();
    let matched = checks.iter().filter(|c| c.passed).count();

    // Interaction graph: which bond pairs multiply to a Hamiltonian term.
    let targets: BTreeSet<String> = wen.terms.iter().map(|t| t.string.to_string()).collect();
    let mut edges = Vec::new();
    for a in 0..bonds.len() {
        for b in a + 1..bonds.len() {
            if targets.contains(&(&bonds[a] * &bonds[b]).to_string()) {
                edges.push((a, b));
            }
        }
    }
    let (components, all_paths) = path_components(bonds.len(), &edges);
    Ok(OpenReport {
        terms: wen.len(),
        matched,
        checks,
        components,
        all_paths,
    })
}

fn parse_label_site(label: &str) -> Site {
    let inner = label
        .trim_start_matches(|c: char| c.is_ascii_alphabetic())
        .trim_start_matches('(')
        .trim_end_matches(')');
    let (i, j) = inner.split_once(',').expect("label has coordinates");
    Site::new(i.parse().expect("integer"), j.parse().expect("integer"))
}

/// Fault injection for the periodic check: omit one Majorana from the
/// boundary operator of row `row`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DropMajorana {
    pub row: usize,
    pub flavor: Flavor,
    pub column: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct PeriodicReport {
    pub checks: Vec<Check>,
    pub wen_terms: usize,
    pub bond_products: usize,
    pub boundary_terms: usize,
    pub multiset_equal: bool,
    /// For each boundary operator `L_j`, the Wen term it equals (with sign),
    /// or `None`.
    pub pairing: Vec<(usize, Option<String>)>,
    /// Rows whose bond modes anticommute with `Π_i α(i,j)` and `Π_i β(i,j)`.
    pub flips: Vec<FlipPattern>,
}

#[derive(Clone, Debug, Serialize)]
pub struct FlipPattern {
    pub row: usize,
    pub alpha_flips: Vec<usize>,
    pub beta_flips: Vec<usize>,
}

/// `Π_{i=2}^{N-1} bond(i,j) · Π_i β(i,j) · Π_i α(i,j+1)`.
pub fn boundary_operator(
    row: usize,
    lattice: &Lattice,
    drop: Option<DropMajorana>,
) -> Result<PauliString, FermionError> {
    let n = lattice.cols;
    let next = lattice
        .shift(Site::new(1, row), 0, 1)
        .ok_or(FermionError::NoPartner(Site::new(1, row)))?
        .j;
    let mut p = PauliString::identity(lattice.n_sites());
    for i in 2..n {
        p = &p * &bond_occupation(Site::new(i, row), lattice)?.string;
    }
    let skip = |flavor: Flavor, i: usize| drop.is_some_and(|d| d.row == row && d.flavor == flavor && d.column == i);
    for i in 1..=n {
        if !skip(Flavor::Beta, i) {
            p = &p * &majorana(Flavor::Beta, Site::new(i, row), lattice)?.string;
        }
    }
    for i in 1..=n {
        if !skip(Flavor::Alpha, i) {
            p = &p * &majorana(Flavor::Alpha, Site::new(i, next), lattice)?.string;
        }
    }
    Ok(p)
}

fn row_product(flavor: Flavor, row: usize, lattice: &Lattice) -> Result<PauliString, FermionError> {
    let mut p = PauliString::identity(lattice.n_sites());
    for i in 1..=lattice.cols {
        p = &p * &majorana(flavor, Site::new(i, row), lattice)?.string;
    }
    Ok(p)
}

pub fn verify_periodic_decomposition(lattice: &Lattice) -> Result<PeriodicReport, FermionError> {
    verify_periodic_decomposition_with(lattice, None)
}

/// Compares the Wen terms, as a multiset of signed strings, with the
/// in-row bond products plus one boundary operator per row.
pub fn verify_periodic_decomposition_with(
    lattice: &Lattice,
    drop: Option<DropMajorana>,
) -> Result<PeriodicReport, FermionError> {
    if lattice.boundary != Boundary::Periodic {
        return Err(FermionError::WrongBoundary("periodic", lattice.boundary));
    }
    if lattice.cols % 2 == 1 {
        return Err(FermionError::OddColumns(lattice.cols));
    }
    let (n, m) = (lattice.cols, lattice.rows);
    let wen = build_wen(&wen_spec(lattice))?;
    let bond = |i: usize, j: usize| bond_occupation(Site::new(i, j), lattice).map(|b| b.string);

    let mut products = Vec::new();
    for j in 1..=m {
        for i in 1..n {
            products.push(&bond(i, j)? * &bond(i + 1, j)?);
        }
    }
    let boundary: Vec<PauliString> = (1..=m)
        .map(|j| boundary_operator(j, lattice, drop))
        .collect::<Result<_, _>>()?;

    let mut expected: BTreeMap<String, isize> = BTreeMap::new();
    for t in &wen.terms {
        *expected.entry(t.string.to_string()).or_default() += 1;
    }
    let mut found: BTreeMap<String, isize> = BTreeMap::new();
    for p in products.iter().chain(&boundary) {
        *found.entry(p.to_string()).or_default() += 1;
    }
    let multiset_equal = expected == found;

    let mut checks = Vec::new();
    let missing: Vec<String> = wen
        .terms
        .iter()
        .filter(|t| found.get(&t.string.to_string()).copied().unwrap_or(0) < expected[&t.string.to_string()])
        .map(|t| t.label.clone())
        .collect();
    checks.push(Check::new(
        "Wen terms equal bond products plus boundary operators",
        multiset_equal,
        if multiset_equal {
            format!("{} = {} + {}", wen.len(), products.len(), boundary.len())
        } else {
            format!("unmatched Wen terms: {}", missing.join(", "))
        },
    ));

    let pairing: Vec<(usize, Option<String>)> = boundary
        .iter()
        .enumerate()
        .map(|(k, l)| {
            let hit = wen.terms.iter().find_map(|t| {
                if &t.string == l {
                    Some(t.label.clone())
                } else if t.string.negated() == *l {
                    Some(format!("-{}", t.label))
                } else {
                    None
                }
            });
            (k + 1, hit)
        })
        .collect();
    let paired_rows: Vec<String> = pairing
        .iter()
        .map(|(j, hit)| format!("L{j} = {}", hit.as_deref().unwrap_or("?")))
        .collect();
    checks.push(Check::new(
        "each boundary operator is the wrapped plaquette of its row",
        pairing
            .iter()
            .all(|(j, hit)| hit.as_deref() == Some(term_label("W", Site::new(n, *j)).as_str())),
        paired_rows.join(", "),
    ));

    let commuting = boundary
        .iter()
        .all(|l| products.iter().all(|p| l.commutes(p).expect("same size")));
    checks.push(Check::new(
        "boundary operators commute with all bond products",
        commuting,
        format!("{} x {} pairs", boundary.len(), products.len()),
    ));

    let bond_rows: Vec<Vec<PauliString>> = (1..=m)
        .map(|j| (1..=n).map(|i| bond(i, j)).collect::<Result<_, _>>())
        .collect::<Result<_, _>>()?;
    let flipped = |op: &PauliString| -> Vec<usize> {
        (1..=m)
            .filter(|&j| bond_rows[j - 1].iter().all(|b| !op.commutes(b).expect("same size")))
            .collect()
    };
    let mut flips = Vec::new();
    let mut pattern_ok = true;
    for j in 1..=m {
        let a = flipped(&row_product(Flavor::Alpha, j, lattice)?);
        let b = flipped(&row_product(Flavor::Beta, j, lattice)?);
        let prev = lattice.shift(Site::new(1, j), 0, -1).expect("periodic").j;
        let untouched = |op: &PauliString, row: usize| {
            (1..=m)
                .filter(|&r| r != row)
                .all(|r| bond_rows[r - 1].iter().all(|x| op.commutes(x).expect("same size")))
        };
        pattern_ok &= a == vec![j]
            && b == vec![prev]
            && untouched(&row_product(Flavor::Alpha, j, lattice)?, j)
            && untouched(&row_product(Flavor::Beta, j, lattice)?, prev);
        flips.push(FlipPattern {
            row: j,
            alpha_flips: a,
            beta_flips: b,
        });
    }
    checks.push(Check::new(
        "alpha row products flip row j, beta row products flip row j-1",
        pattern_ok,
        flips
            .iter()
            .map(|f| format!("row {}: alpha {:?} beta {:?}", f.row, f.alpha_flips, f.beta_flips))
            .collect::<Vec<_>>()
            .join("; "),
    ));

    Ok(PeriodicReport {
        checks,
        wen_terms: wen.len(),
        bond_products: products.len(),
        boundary_terms: boundary.len(),
        multiset_equal,
        pairing,
        flips,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(cols: usize, rows: usize, bc: Boundary) -> Lattice {
        Lattice::new(rows, cols, bc)
    }

    #[test]
    fn single_site_majoranas() {
        let l = lat(2, 2, Boundary::Open);
        let a = majorana(Flavor::Alpha, Site::new(1, 1), &l).unwrap();
        assert_eq!(a.string.render(&l), "+ Z(1,1)");
        let b = majorana(Flavor::Beta, Site::new(1, 1), &l).unwrap();
        assert_eq!(b.string.render(&l), "+ X(1,1)");
        let b = majorana(Flavor::Beta, Site::new(1, 2), &l).unwrap();
        assert_eq!(b.string.render(&l), "+ Y(1,1) Y(2,1) X(1,2)");
    }

    #[test]
    fn bond_examples() {
        let l = lat(2, 2, Boundary::Open);
        let b = bond_occupation(Site::new(1, 1), &l).unwrap();
        assert_eq!(b.string.render(&l), "+ X(1,1) Y(2,1) X(1,2)");
        let b = bond_occupation(Site::new(2, 1), &l).unwrap();
        assert_eq!(b.string.render(&l), "+ X(2,1) Y(1,2) X(2,2)");
        assert!((&b.string * &b.string).is_identity());
        assert!(bond_occupation(Site::new(1, 2), &l).is_err());
    }

    #[test]
    fn both_constructions_agree() {
        for (c, r, bc) in [
            (4, 4, Boundary::Open),
            (4, 4, Boundary::Periodic),
            (3, 2, Boundary::Periodic),
        ] {
            let l = lat(c, r, bc);
            for s in l.sites() {
                if let Ok(b) = bond_occupation(s, &l) {
                    assert_eq!(b.string, bond_formula(s, &l).unwrap(), "{s}");
                }
            }
        }
    }

    #[test]
    fn open_chains() {
        let r = verify_open_decomposition(&lat(4, 4, Boundary::Open)).unwrap();
        assert_eq!((r.terms, r.matched, r.components, r.all_paths), (9, 9, 3, true));
        let r = verify_open_decomposition(&lat(2, 2, Boundary::Open)).unwrap();
        assert_eq!((r.terms, r.components), (1, 1));
        let r = verify_open_decomposition(&lat(5, 3, Boundary::Open)).unwrap();
        assert_eq!((r.terms, r.matched, r.components), (8, 8, 2));
    }

    #[test]
    fn periodic_multiset() {
        for (c, r) in [(4, 4), (4, 2)] {
            let rep = verify_periodic_decomposition(&lat(c, r, Boundary::Periodic)).unwrap();
            assert!(rep.checks.iter().all(|c| c.passed), "{:#?}", rep.checks);
            assert_eq!(rep.bond_products + rep.boundary_terms, rep.wen_terms);
        }
        assert!(verify_periodic_decomposition(&lat(3, 4, Boundary::Periodic)).is_err());
    }

    #[test]
    fn dropped_majorana_is_caught() {
        let drop = DropMajorana {
            row: 2,
            flavor: Flavor::Beta,
            column: 3,
        };
        let rep = verify_periodic_decomposition_with(&lat(4, 4, Boundary::Periodic), Some(drop)).unwrap();
        assert!(!rep.multiset_equal);
        assert!(!rep.checks[0].passed);
    }
}
