//! Quadratic spaces over F₂.
//!
//! A quadratic form `q` on F₂ⁿ is stored through the Gram matrix of its
//! polar form `B(x, y) = q(x + y) + q(x) + q(y)` (symmetric, zero diagonal)
//! and the values `q(e_i)` on the standard basis. These determine `q`:
//! `q(v) = Σ vᵢ q(eᵢ) + Σ_{i<j} vᵢ vⱼ B(eᵢ, eⱼ)`.

mod classify;

use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::f2::{low_mask, parity, BitMatrix, BitVec, Subspace, MAX_DIM};

pub use classify::{Decomposition, IsoClass};

/// The model spaces: the hyperbolic plane `H0`, the anisotropic plane `H1`,
/// and the lines `(x, 0)` and `(x, 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StandardSpace {
    H0,
    H1,
    Point0,
    Point1,
}

/// A finite-dimensional F₂-vector space with a (possibly degenerate)
/// quadratic form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadSpace {
    dim: usize,
    /// Gram matrix rows of the polar form.
    gram: SmallVec<[u64; 8]>,
    /// `q(e_i)` packed.
    diag: u64,
    /// `gram[i]` restricted to coordinates above `i`, for evaluation.
    upper: SmallVec<[u64; 8]>,
}

impl QuadSpace {
    /// Builds a space from its Gram matrix and diagonal values.
    pub fn new(gram: &BitMatrix, diag: &BitVec) -> Result<Self> {
        let n = diag.len();
        if gram.rows() != n || gram.cols() != n {
            return Err(Error::MalformedSpace(format!(
                "gram matrix is {}x{} but diagonal has length {n}",
                gram.rows(),
                gram.cols()
            )));
        }
        let rows: Vec<u64> = (0..n).map(|i| gram.row_bits(i)).collect();
        Self::from_bits(n, &rows, diag.bits())
    }

    /// Builds a space from packed Gram rows and packed diagonal values.
    pub fn from_bits(dim: usize, gram_rows: &[u64], diag: u64) -> Result<Self> {
        if dim > MAX_DIM {
            return Err(Error::DimensionTooLarge { dim, max: MAX_DIM });
        }
        if gram_rows.len() != dim {
            return Err(Error::MalformedSpace(format!(
                "expected {dim} gram rows, found {}",
                gram_rows.len()
            )));
        }
        let mask = low_mask(dim);
        if diag & !mask != 0 {
            return Err(Error::MalformedSpace(
                "diagonal has bits beyond dimension".into(),
            ));
        }
        for (i, &row) in gram_rows.iter().enumerate() {
            if row & !mask != 0 {
                return Err(Error::MalformedSpace(format!("gram row {i} is too long")));
            }
            if (row >> i) & 1 == 1 {
                return Err(Error::MalformedSpace(format!(
                    "gram diagonal entry {i} is 1; the polar form must be alternating"
                )));
            }
            for (j, &other) in gram_rows.iter().enumerate() {
                if ((row >> j) & 1) != ((other >> i) & 1) {
                    return Err(Error::MalformedSpace(format!(
                        "gram matrix is not symmetric at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self::from_bits_unchecked(
            dim,
            gram_rows.iter().copied().collect(),
            diag,
        ))
    }

    pub(crate) fn from_bits_unchecked(dim: usize, gram: SmallVec<[u64; 8]>, diag: u64) -> Self {
        let upper = gram
            .iter()
            .enumerate()
            .map(|(i, &row)| row & !low_mask(i + 1))
            .collect();
        Self {
            dim,
            gram,
            diag,
            upper,
        }
    }

    /// The zero space.
    pub fn zero() -> Self {
        Self::from_bits_unchecked(0, SmallVec::new(), 0)
    }

    pub fn standard(kind: StandardSpace) -> Self {
        match kind {
            // symplectic basis {a, b}: q(a) = q(b) = 0 resp. 1
            StandardSpace::H0 => {
                Self::from_bits_unchecked(2, [0b10, 0b01].into_iter().collect(), 0b00)
            }
            StandardSpace::H1 => {
                Self::from_bits_unchecked(2, [0b10, 0b01].into_iter().collect(), 0b11)
            }
            StandardSpace::Point0 => Self::from_bits_unchecked(1, [0].into_iter().collect(), 0),
            StandardSpace::Point1 => Self::from_bits_unchecked(1, [0].into_iter().collect(), 1),
        }
    }

    pub fn h0() -> Self {
        Self::standard(StandardSpace::H0)
    }

    pub fn h1() -> Self {
        Self::standard(StandardSpace::H1)
    }

    /// The line `(x, value)`.
    pub fn point(value: bool) -> Self {
        Self::standard(if value {
            StandardSpace::Point1
        } else {
            StandardSpace::Point0
        })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn gram(&self) -> BitMatrix {
        BitMatrix::from_rows(self.dim, &self.gram)
    }

    pub fn diag(&self) -> BitVec {
        BitVec::from_bits(self.dim, self.diag)
    }

    #[inline]
    pub(crate) fn gram_row(&self, i: usize) -> u64 {
        self.gram[i]
    }

    #[inline]
    pub(crate) fn diag_bits(&self) -> u64 {
        self.diag
    }

    /// `q` on a packed vector.
    #[inline]
    pub fn q_bits(&self, v: u64) -> bool {
        let mut acc = parity(v & self.diag);
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= parity(self.upper[i] & v);
        }
        acc
    }

    /// `B` on packed vectors.
    #[inline]
    pub fn b_bits(&self, u: u64, v: u64) -> bool {
        let mut acc = false;
        let mut rest = u;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= parity(self.gram[i] & v);
        }
        acc
    }

    /// The packed vector `w ↦ B(v, w)` as a linear functional.
    #[inline]
    pub(crate) fn polar_functional(&self, v: u64) -> u64 {
        let mut acc = 0u64;
        let mut rest = v;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            acc ^= self.gram[i];
        }
        acc
    }

    fn check_len(&self, v: &BitVec) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} in a space of dimension {}",
                v.len(),
                self.dim
            )));
        }
        Ok(())
    }

    /// `q(v)`.
    pub fn eval_q(&self, v: &BitVec) -> Result<bool> {
        self.check_len(v)?;
        Ok(self.q_bits(v.bits()))
    }

    /// `B(u, v) = q(u + v) + q(u) + q(v)`.
    pub fn eval_b(&self, u: &BitVec, v: &BitVec) -> Result<bool> {
        self.check_len(u)?;
        self.check_len(v)?;
        Ok(self.b_bits(u.bits(), v.bits()))
    }

    /// `Rad(V) = {v | B(v, w) = 0 for all w}`, the kernel of the Gram matrix.
    pub fn radical(&self) -> Subspace {
        self.gram().kernel()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.radical().is_zero()
    }

    pub(crate) fn require_nondegenerate(&self, role: &str) -> Result<()> {
        if self.is_nondegenerate() {
            Ok(())
        } else {
            Err(Error::Degenerate(format!(
                "{role} (dimension {}) has a radical of dimension {}",
                self.dim,
                self.radical().dim()
            )))
        }
    }

    /// The form induced on the span of `basis` (packed, assumed independent),
    /// expressed in that basis.
    pub fn restrict(&self, basis: &[u64]) -> QuadSpace {
        let k = basis.len();
        let mut gram: SmallVec<[u64; 8]> = SmallVec::from_elem(0, k);
        let mut diag = 0u64;
        for (i, &u) in basis.iter().enumerate() {
            if self.q_bits(u) {
                diag |= 1 << i;
            }
            let f = self.polar_functional(u);
            for (j, &v) in basis.iter().enumerate().skip(i + 1) {
                if parity(f & v) {
                    gram[i] |= 1 << j;
                    gram[j] |= 1 << i;
                }
            }
        }
        Self::from_bits_unchecked(k, gram, diag)
    }

    /// The form induced on a subspace, in its echelon basis.
    pub fn restrict_to(&self, sub: &Subspace) -> QuadSpace {
        assert_eq!(sub.ambient_dim(), self.dim);
        self.restrict(sub.basis_bits())
    }

    /// Block sum `self ⊥ other`; coordinates of `other` follow those of `self`.
    pub fn orthogonal_sum(&self, other: &QuadSpace) -> QuadSpace {
        let n = self.dim;
        assert!(
            n + other.dim <= MAX_DIM,
            "orthogonal sum exceeds {MAX_DIM} dimensions"
        );
        let gram = self
            .gram
            .iter()
            .copied()
            .chain(other.gram.iter().map(|&r| r << n))
            .collect();
        Self::from_bits_unchecked(n + other.dim, gram, self.diag | (other.diag << n))
    }

    /// `self ⊥ ... ⊥ self` (`count` copies).
    pub fn power(&self, count: usize) -> QuadSpace {
        (0..count).fold(QuadSpace::zero(), |acc, _| acc.orthogonal_sum(self))
    }

    /// Vectors of span(`within`) that are B-orthogonal to every vector of `against`.
    pub(crate) fn orthogonal_within(&self, within: &[u64], against: &[u64]) -> Subspace {
        let functionals: Vec<u64> = against.iter().map(|&a| self.polar_functional(a)).collect();
        // Coefficient c on `within` must satisfy Σ c_i B(w_i, a_j) = 0 for all j.
        let rows: Vec<u64> = functionals
            .iter()
            .map(|&f| {
                within
                    .iter()
                    .enumerate()
                    .fold(0u64, |acc, (i, &w)| acc | ((parity(f & w) as u64) << i))
            })
            .collect();
        let kernel = BitMatrix::from_rows(within.len(), &rows).kernel();
        Subspace::from_spanning(
            self.dim,
            kernel.basis_bits().iter().map(|&c| combine(within, c)),
        )
    }
}

/// `Σ c_i vectors[i]` for the packed coefficient word `c`.
#[inline]
pub(crate) fn combine(vectors: &[u64], c: u64) -> u64 {
    let mut acc = 0u64;
    let mut rest = c;
    while rest != 0 {
        let i = rest.trailing_zeros() as usize;
        rest &= rest - 1;
        acc ^= vectors[i];
    }
    acc
}

impl Ord for QuadSpace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.dim
            .cmp(&other.dim)
            .then(self.diag.cmp(&other.diag))
            .then_with(|| self.gram.as_slice().cmp(other.gram.as_slice()))
    }
}

impl PartialOrd for QuadSpace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for QuadSpace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QuadSpace(dim {}, diag {}", self.dim, self.diag())?;
        if self.dim > 0 {
            f.write_str(", gram ")?;
            for i in 0..self.dim {
                if i > 0 {
                    f.write_str("/")?;
                }
                write!(f, "{}", BitVec::from_bits(self.dim, self.gram[i]))?;
            }
        }
        f.write_str(")")
    }
}
