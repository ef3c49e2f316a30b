use std::fmt;

use smallvec::SmallVec;

use super::bitvec::{low_mask, parity, BitVec, MAX_DIM};
use super::subspace::Subspace;
use crate::error::{Error, Result};

/// A dense matrix over F₂, row-major with rows packed into 64-bit words.
///
/// Any shape is allowed. Operations that produce or consume packed vectors
/// (`mul_vec`, `kernel`, `solve`, `inverse`) need the relevant dimension to be
/// at most 64.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: SmallVec<[u64; 8]>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = cols.div_ceil(64).max(1);
        Self {
            rows,
            cols,
            stride,
            data: SmallVec::from_elem(0, rows * stride),
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Rows given as packed words, `cols <= 64`.
    pub fn from_rows(cols: usize, rows: &[u64]) -> Self {
        assert!(cols <= MAX_DIM);
        let mask = low_mask(cols);
        Self {
            rows: rows.len(),
            cols,
            stride: 1,
            data: rows.iter().map(|r| r & mask).collect(),
        }
    }

    /// Columns given as packed words, `rows <= 64`.
    pub fn from_cols(rows: usize, cols: &[u64]) -> Self {
        assert!(rows <= MAX_DIM);
        let mut m = Self::zeros(rows, cols.len());
        for (j, &c) in cols.iter().enumerate() {
            for i in 0..rows {
                if (c >> i) & 1 == 1 {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn from_bool_rows(rows: &[Vec<bool>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            if r.len() != cols {
                return Err(Error::DimensionMismatch(format!(
                    "row {i} has {} entries, expected {cols}",
                    r.len()
                )));
            }
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b);
            }
        }
        Ok(m)
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        &mut self.data[i * self.stride..(i + 1) * self.stride]
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols);
        (self.data[i * self.stride + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols);
        let w = &mut self.data[i * self.stride + j / 64];
        if value {
            *w |= 1 << (j % 64);
        } else {
            *w &= !(1 << (j % 64));
        }
    }

    pub fn toggle(&mut self, i: usize, j: usize) {
        let v = self.get(i, j);
        self.set(i, j, !v);
    }

    /// Row `i` packed into one word (`cols <= 64`).
    #[inline]
    pub fn row_bits(&self, i: usize) -> u64 {
        debug_assert!(self.cols <= 64);
        self.data[i * self.stride]
    }

    /// Column `j` packed into one word (`rows <= 64`).
    pub fn col_bits(&self, j: usize) -> u64 {
        debug_assert!(self.rows <= 64);
        let (w, b) = (j / 64, j % 64);
        (0..self.rows).fold(0u64, |acc, i| {
            acc | (((self.data[i * self.stride + w] >> b) & 1) << i)
        })
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_bits(self.cols, self.row_bits(i))
    }

    pub fn col(&self, j: usize) -> BitVec {
        BitVec::from_bits(self.rows, self.col_bits(j))
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    /// `self · v` on packed words (`rows, cols <= 64`).
    #[inline]
    pub fn apply(&self, v: u64) -> u64 {
        debug_assert!(self.cols <= 64 && self.rows <= 64);
        let mut out = 0u64;
        for i in 0..self.rows {
            if parity(self.data[i] & v) {
                out |= 1 << i;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix applied to vector of length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok(BitVec::from_bits(self.rows, self.apply(v.bits())))
    }

    /// Matrix product `self · rhs`.
    pub fn mul(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = BitMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                if self.get(i, k) {
                    let (src_start, dst_start) = (k * rhs.stride, i * out.stride);
                    for w in 0..rhs.stride {
                        out.data[dst_start + w] ^= rhs.data[src_start + w];
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn add(&self, rhs: &BitMatrix) -> Result<BitMatrix> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "cannot add {}x{} and {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&rhs.data) {
            *a ^= b;
        }
        Ok(out)
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    t.set(j, i, true);
                }
            }
        }
        t
    }

    /// Dimension of the row space.
    pub fn rank(&self) -> usize {
        let mut m = self.clone();
        let mut rank = 0;
        for c in 0..self.cols {
            let (w, b) = (c / 64, c % 64);
            let Some(p) = (rank..m.rows).find(|&r| (m.data[r * m.stride + w] >> b) & 1 == 1) else {
                continue;
            };
            if p != rank {
                for k in 0..m.stride {
                    m.data.swap(p * m.stride + k, rank * m.stride + k);
                }
            }
            let pivot: SmallVec<[u64; 4]> = m.row_words(rank).iter().copied().collect();
            for r in (rank + 1)..m.rows {
                if (m.data[r * m.stride + w] >> b) & 1 == 1 {
                    for (x, y) in m.row_words_mut(r).iter_mut().zip(&pivot) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            if rank == m.rows {
                break;
            }
        }
        rank
    }

    /// Solution space of `self · v = 0` (`cols <= 64`).
    pub fn kernel(&self) -> Subspace {
        assert!(
            self.cols <= MAX_DIM,
            "kernel needs at most {MAX_DIM} columns"
        );
        // Row space in RREF, pivots at lowest set bits.
        let rowspace = Subspace::from_spanning(self.cols, (0..self.rows).map(|i| self.row_bits(i)));
        let pivot_mask: u64 = rowspace.pivots().fold(0, |m, p| m | (1 << p));
        let mut kernel = Subspace::zero(self.cols);
        for f in (0..self.cols).filter(|&f| (pivot_mask >> f) & 1 == 0) {
            let mut v = 1u64 << f;
            for &row in rowspace.basis_bits() {
                if (row >> f) & 1 == 1 {
                    v |= 1 << row.trailing_zeros();
                }
            }
            kernel.insert(v);
        }
        kernel
    }

    /// Column space (`rows <= 64`).
    pub fn image(&self) -> Subspace {
        assert!(self.rows <= MAX_DIM);
        Subspace::from_spanning(self.rows, (0..self.cols).map(|j| self.col_bits(j)))
    }

    /// Some `x` with `self · x = b`, or `None` when the system is inconsistent.
    pub fn solve(&self, b: &BitVec) -> Result<Option<BitVec>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!(
                "right-hand side has length {}, matrix has {} rows",
                b.len(),
                self.rows
            )));
        }
        assert!(self.cols <= MAX_DIM);
        // Eliminate on (row, rhs) pairs.
        let mut pivots: Vec<(u64, bool)> = Vec::new();
        for i in 0..self.rows {
            let (mut row, mut rhs) = (self.row_bits(i), b.get(i));
            for &(p, prhs) in &pivots {
                if (row >> p.trailing_zeros()) & 1 == 1 {
                    row ^= p;
                    rhs ^= prhs;
                }
            }
            if row == 0 {
                if rhs {
                    return Ok(None);
                }
                continue;
            }
            let pbit = row.trailing_zeros();
            for (p, prhs) in pivots.iter_mut() {
                if (*p >> pbit) & 1 == 1 {
                    *p ^= row;
                    *prhs ^= rhs;
                }
            }
            pivots.push((row, rhs));
        }
        let mut x = 0u64;
        for &(p, rhs) in &pivots {
            if rhs {
                x |= 1 << p.trailing_zeros();
            }
        }
        Ok(Some(BitVec::from_bits(self.cols, x)))
    }

    /// Inverse of a square matrix, if it is invertible (`n <= 64`).
    pub fn inverse(&self) -> Option<BitMatrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        assert!(n <= MAX_DIM);
        let mut a: Vec<u64> = (0..n).map(|i| self.row_bits(i)).collect();
        let mut inv: Vec<u64> = (0..n).map(|i| 1u64 << i).collect();
        for c in 0..n {
            let p = (c..n).find(|&r| (a[r] >> c) & 1 == 1)?;
            a.swap(p, c);
            inv.swap(p, c);
            for r in 0..n {
                if r != c && (a[r] >> c) & 1 == 1 {
                    a[r] ^= a[c];
                    inv[r] ^= inv[c];
                }
            }
        }
        Some(BitMatrix::from_rows(n, &inv))
    }

    /// Block-diagonal matrix `diag(self, other)`.
    pub fn block_diag(&self, other: &BitMatrix) -> BitMatrix {
        let mut m = BitMatrix::zeros(self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                if self.get(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                if other.get(i, j) {
                    m.set(self.rows + i, self.cols + j, true);
                }
            }
        }
        m
    }

    /// Images of the basis vectors, i.e. the packed columns.
    pub fn columns(&self) -> Vec<u64> {
        (0..self.cols).map(|j| self.col_bits(j)).collect()
    }
}

impl fmt::Display for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            if i > 0 {
                f.write_str("\n")?;
            }
            if self.cols == 0 {
                f.write_str("-")?;
            }
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            f.write_str("\n  ")?;
            for j in 0..self.cols {
                f.write_str(if self.get(i, j) { "1" } else { "0" })?;
            }
        }
        Ok(())
    }
}
