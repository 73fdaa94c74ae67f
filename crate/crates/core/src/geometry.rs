//! Square-lattice geometry shared by every model.
//!
//! Sites are addressed 1-based as `(i, j)` with `i` running along a row
//! (`1..=cols`) and `j` counting rows (`1..=rows`). Qubits are flattened
//! row-major and 0-based: `q = (j - 1) * cols + (i - 1)`.

use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Boundary {
    Open,
    Periodic,
}

impl fmt::Display for Boundary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Boundary::Open => "open",
            Boundary::Periodic => "periodic",
        })
    }
}

/// A 1-based lattice site `(i, j)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Site {
    pub i: usize,
    pub j: usize,
}

impl Site {
    pub const fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }

    /// Sublattice parity: `true` when `i + j` is even.
    pub fn is_even(&self) -> bool {
        (self.i + self.j).is_multiple_of(2)
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.i, self.j)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Lattice {
    pub rows: usize,
    pub cols: usize,
    pub boundary: Boundary,
}

impl Lattice {
    pub const fn new(rows: usize, cols: usize, boundary: Boundary) -> Self {
        Self { rows, cols, boundary }
    }

    pub fn n_sites(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn contains(&self, site: Site) -> bool {
        (1..=self.cols).contains(&site.i) && (1..=self.rows).contains(&site.j)
    }

    /// Flat 0-based qubit index of an in-range site.
    pub fn index(&self, site: Site) -> usize {
        debug_assert!(self.contains(site), "{site} outside {}x{}", self.rows, self.cols);
        (site.j - 1) * self.cols + (site.i - 1)
    }

    pub fn site(&self, q: usize) -> Site {
        Site::new(q % self.cols + 1, q / self.cols + 1)
    }

    pub fn sites(&self) -> impl Iterator<Item = Site> + '_ {
        (1..=self.rows).flat_map(move |j| (1..=self.cols).map(move |i| Site::new(i, j)))
    }

    /// Moves by `(di, dj)`. Periodic lattices wrap; open lattices return
    /// `None` when the step leaves the lattice.
    pub fn shift(&self, site: Site, di: isize, dj: isize) -> Option<Site> {
        let i = site.i as isize + di;
        let j = site.j as isize + dj;
        match self.boundary {
            Boundary::Periodic => Some(Site::new(wrap(i, self.cols as isize), wrap(j, self.rows as isize))),
            Boundary::Open => {
                let inside = (1..=self.cols as isize).contains(&i) && (1..=self.rows as isize).contains(&j);
                inside.then(|| Site::new(i as usize, j as usize))
            }
        }
    }

    /// Nearest neighbours in the order left, right, down, up. On small
    /// periodic lattices a site may appear twice; callers multiply Pauli
    /// factors, so repeated entries cancel as they should.
    pub fn neighbors(&self, site: Site) -> Vec<Site> {
        let mut out = Vec::with_capacity(4);
        for (di, dj) in [(-1, 0), (1, 0), (0, -1), (0, 1)] {
            if self.rows == 1 && dj != 0 {
                continue;
            }
            if let Some(n) = self.shift(site, di, dj) {
                out.push(n);
            }
        }
        out
    }

    /// Undirected nearest-neighbour bonds, each listed once per lattice
    /// direction (right and down). On a periodic lattice of width 2 both
    /// directions can name the same pair.
    pub fn bonds(&self) -> Vec<(Site, Site)> {
        let mut out = Vec::new();
        for s in self.sites() {
            if let Some(r) = self.shift(s, 1, 0) {
                if r != s {
                    out.push((s, r));
                }
            }
            if self.rows > 1 {
                if let Some(d) = self.shift(s, 0, 1) {
                    if d != s {
                        out.push((s, d));
                    }
                }
            }
        }
        out
    }
}

fn wrap(x: isize, n: isize) -> usize {
    ((x - 1).rem_euclid(n) + 1) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_index_is_row_major() {
        let l = Lattice::new(3, 4, Boundary::Open);
        assert_eq!(l.index(Site::new(1, 1)), 0);
        assert_eq!(l.index(Site::new(4, 1)), 3);
        assert_eq!(l.index(Site::new(1, 2)), 4);
        for q in 0..l.n_sites() {
            assert_eq!(l.index(l.site(q)), q);
        }
    }

    #[test]
    fn periodic_shift_wraps() {
        let l = Lattice::new(4, 4, Boundary::Periodic);
        assert_eq!(l.shift(Site::new(1, 1), -1, 0), Some(Site::new(4, 1)));
        assert_eq!(l.shift(Site::new(4, 4), 1, 1), Some(Site::new(1, 1)));
        let o = Lattice::new(4, 4, Boundary::Open);
        assert_eq!(o.shift(Site::new(1, 1), -1, 0), None);
    }

    #[test]
    fn open_corner_has_two_neighbors() {
        let l = Lattice::new(3, 3, Boundary::Open);
        assert_eq!(l.neighbors(Site::new(1, 1)).len(), 2);
        assert_eq!(l.neighbors(Site::new(2, 2)).len(), 4);
    }
}
