//! Bit-packed linear algebra over GF(2).
//!
//! Rows are packed into 64-bit words; bits past the logical length are kept
//! zero so word-level comparisons and popcounts are exact. All matrix
//! operations take `&self` and return fresh values.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

const WORD: usize = 64;

#[inline]
fn words_for(len: usize) -> usize {
    len.div_ceil(WORD)
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum Gf2Error {
    #[error("row has {found} bits, expected {expected}")]
    RowLength { expected: usize, found: usize },
    #[error("invalid bit character {0:?}")]
    BadChar(char),
}

/// A fixed-length vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; words_for(len)],
        }
    }

    pub fn from_indices<I: IntoIterator<Item = usize>>(len: usize, ones: I) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.set(i, true);
        }
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        Self::from_indices(bits.len(), bits.iter().enumerate().filter(|(_, b)| **b).map(|(i, _)| i))
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD] >> (i % WORD)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD);
        if value {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    #[inline]
    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD] ^= 1u64 << (i % WORD);
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// `self ^= other`. Lengths must match.
    #[inline]
    pub fn xor_assign(&mut self, other: &BitVec) {
        debug_assert_eq!(self.len, other.len);
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn xor(&self, other: &BitVec) -> BitVec {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    pub fn and(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    pub fn or(&self, other: &BitVec) -> BitVec {
        debug_assert_eq!(self.len, other.len);
        BitVec {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    /// Popcount of `self & other`.
    #[inline]
    pub fn and_count(&self, other: &BitVec) -> u32 {
        debug_assert_eq!(self.len, other.len);
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones())
            .sum()
    }

    /// Inner product over GF(2).
    #[inline]
    pub fn dot(&self, other: &BitVec) -> bool {
        self.and_count(other) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|w| *w == 0)
    }

    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * WORD + w.trailing_zeros() as usize)
    }

    /// Indices of set bits in increasing order.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    None
                } else {
                    let t = w.trailing_zeros() as usize;
                    w &= w - 1;
                    Some(k * WORD + t)
                }
            })
        })
    }

    /// Keeps the listed positions, in the given order.
    pub fn select(&self, positions: &[usize]) -> BitVec {
        let mut out = BitVec::zeros(positions.len());
        for (k, &p) in positions.iter().enumerate() {
            if self.get(p) {
                out.set(k, true);
            }
        }
        out
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        for i in self.ones() {
            out.set(i, true);
        }
        for i in other.ones() {
            out.set(self.len + i, true);
        }
        out
    }
}

impl fmt::Display for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            f.write_str(if self.get(i) { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVec({self})")
    }
}

impl FromStr for BitVec {
    type Err = Gf2Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut v = BitVec::zeros(s.chars().count());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => return Err(Gf2Error::BadChar(other)),
            }
        }
        Ok(v)
    }
}

/// Dense matrix over GF(2), one packed [`BitVec`] per row.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct BitMatrix {
    n_cols: usize,
    rows: Vec<BitVec>,
}

impl BitMatrix {
    pub fn zeros(n_rows: usize, n_cols: usize) -> Self {
        Self {
            n_cols,
            rows: vec![BitVec::zeros(n_cols); n_rows],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            n_cols: n,
            rows: (0..n).map(|i| BitVec::from_indices(n, [i])).collect(),
        }
    }

    pub fn from_rows(n_cols: usize, rows: Vec<BitVec>) -> Result<Self, Gf2Error> {
        if let Some(bad) = rows.iter().find(|r| r.len() != n_cols) {
            return Err(Gf2Error::RowLength {
                expected: n_cols,
                found: bad.len(),
            });
        }
        Ok(Self { n_cols, rows })
    }

    /// Parses rows written as `"0110"` strings; all rows must have equal length.
    pub fn parse_rows(rows: &[&str]) -> Result<Self, Gf2Error> {
        let parsed = rows
            .iter()
            .map(|r| r.parse::<BitVec>())
            .collect::<Result<Vec<_>, _>>()?;
        let n_cols = parsed.first().map_or(0, BitVec::len);
        Self::from_rows(n_cols, parsed)
    }

    pub fn n_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn rows(&self) -> &[BitVec] {
        &self.rows
    }

    pub fn row(&self, r: usize) -> &BitVec {
        &self.rows[r]
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.rows[r].get(c)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.n_cols, self.n_rows());
        for (r, row) in self.rows.iter().enumerate() {
            for c in row.ones() {
                t.rows[c].set(r, true);
            }
        }
        t
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> BitMatrix {
        BitMatrix {
            n_cols: cols.len(),
            rows: self.rows.iter().map(|r| r.select(cols)).collect(),
        }
    }

    /// Matrix-vector product `self · v`.
    pub fn mul_vec(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.n_cols);
        BitVec::from_indices(
            self.n_rows(),
            self.rows.iter().enumerate().filter(|(_, r)| r.dot(v)).map(|(i, _)| i),
        )
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.n_cols {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for r in tail.iter_mut() {
                if r.get(col) {
                    r.xor_assign(pivot);
                }
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Reduced row echelon form and the strictly increasing pivot columns.
    ///
    /// Pivots are chosen as the lowest-index column with a nonzero entry at
    /// or below the current row, taking the topmost such row. The output has
    /// the same shape as the input; zero rows sink to the bottom.
    pub fn row_reduce(&self) -> (BitMatrix, Vec<usize>) {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        for col in 0..self.n_cols {
            let k = pivots.len();
            if k == rows.len() {
                break;
            }
            let Some(p) = (k..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(k, p);
            let pivot = rows[k].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != k && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
        }
        (
            BitMatrix {
                n_cols: self.n_cols,
                rows,
            },
            pivots,
        )
    }

    /// A basis of `{ v : self · v = 0 }`, one vector per free column.
    pub fn kernel_basis(&self) -> Vec<BitVec> {
        let (rref, pivots) = self.row_reduce();
        let mut is_pivot = vec![false; self.n_cols];
        for &p in &pivots {
            is_pivot[p] = true;
        }
        (0..self.n_cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVec::zeros(self.n_cols);
                v.set(free, true);
                for (k, &p) in pivots.iter().enumerate() {
                    if rref.rows[k].get(free) {
                        v.set(p, true);
                    }
                }
                v
            })
            .collect()
    }
}
