use std::cmp::Ordering;
use std::fmt;

use smallvec::SmallVec;

use super::bitvec::{low_mask, BitVec, MAX_DIM};
use crate::error::{Error, Result};

/// A linear subspace of F₂ⁿ (`n <= 64`) in reduced row-echelon form.
///
/// The pivot of a basis vector is its lowest set coordinate. Basis vectors are
/// sorted by pivot and every pivot coordinate is zero in all other basis
/// vectors, so each subspace has exactly one representation and `==` is
/// subspace equality.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: SmallVec<[u64; 8]>,
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        assert!(
            ambient <= MAX_DIM,
            "ambient dimension {ambient} exceeds {MAX_DIM}"
        );
        Self {
            ambient,
            basis: SmallVec::new(),
        }
    }

    pub fn full(ambient: usize) -> Self {
        assert!(
            ambient <= MAX_DIM,
            "ambient dimension {ambient} exceeds {MAX_DIM}"
        );
        Self {
            ambient,
            basis: (0..ambient).map(|i| 1u64 << i).collect(),
        }
    }

    /// Span of the given packed vectors.
    pub fn from_spanning<I: IntoIterator<Item = u64>>(ambient: usize, vectors: I) -> Self {
        let mut s = Self::zero(ambient);
        for v in vectors {
            s.insert(v);
        }
        s
    }

    pub fn span(ambient: usize, vectors: &[BitVec]) -> Self {
        for v in vectors {
            assert_eq!(v.len(), ambient, "spanning vector has wrong length");
        }
        Self::from_spanning(ambient, vectors.iter().map(BitVec::bits))
    }

    /// Adds `v` to the span. Returns `false` if it was already contained.
    pub fn insert(&mut self, v: u64) -> bool {
        debug_assert_eq!(v & !low_mask(self.ambient), 0);
        let v = self.reduce(v);
        if v == 0 {
            return false;
        }
        let pivot = v.trailing_zeros();
        for row in self.basis.iter_mut() {
            if (*row >> pivot) & 1 == 1 {
                *row ^= v;
            }
        }
        let pos = self
            .basis
            .iter()
            .position(|r| r.trailing_zeros() > pivot)
            .unwrap_or(self.basis.len());
        self.basis.insert(pos, v);
        true
    }

    /// Reduces `v` modulo the subspace; the result is zero iff `v` is contained.
    #[inline]
    pub fn reduce(&self, mut v: u64) -> u64 {
        for &row in &self.basis {
            if (v >> row.trailing_zeros()) & 1 == 1 {
                v ^= row;
            }
        }
        v
    }

    #[inline]
    pub fn contains_bits(&self, v: u64) -> bool {
        self.reduce(v) == 0
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ambient);
        self.contains_bits(v.bits())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn is_zero(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.basis.len() == self.ambient
    }

    /// Packed echelon basis.
    pub fn basis_bits(&self) -> &[u64] {
        &self.basis
    }

    pub fn basis(&self) -> Vec<BitVec> {
        self.basis
            .iter()
            .map(|&b| BitVec::from_bits(self.ambient, b))
            .collect()
    }

    pub fn pivots(&self) -> impl Iterator<Item = usize> + '_ {
        self.basis.iter().map(|r| r.trailing_zeros() as usize)
    }

    /// Coefficients of `v` in the echelon basis (bit `i` for basis vector `i`),
    /// or `None` if `v` is not in the subspace.
    pub fn coordinates(&self, v: u64) -> Option<u64> {
        let mut coeffs = 0u64;
        let mut rest = v;
        for (i, &row) in self.basis.iter().enumerate() {
            if (rest >> row.trailing_zeros()) & 1 == 1 {
                rest ^= row;
                coeffs |= 1 << i;
            }
        }
        (rest == 0).then_some(coeffs)
    }

    /// All `2^dim` elements, in order of their coordinate vectors.
    pub fn elements(&self) -> Vec<u64> {
        let k = self.basis.len();
        assert!(k < 32, "refusing to list 2^{k} elements");
        let mut out = Vec::with_capacity(1 << k);
        out.push(0u64);
        for &b in &self.basis {
            let n = out.len();
            for j in 0..n {
                out.push(out[j] ^ b);
            }
        }
        out
    }

    pub fn join(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        let mut s = self.clone();
        for &b in &other.basis {
            s.insert(b);
        }
        s
    }

    pub fn intersection(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient);
        // Solve sum a_i s_i = sum b_j o_j; track the left-hand combination.
        let mut pairs: Vec<(u64, u64)> = Vec::new();
        let mut out = Subspace::zero(self.ambient);
        let gens = self
            .basis
            .iter()
            .map(|&s| (s, s))
            .chain(other.basis.iter().map(|&o| (o, 0)));
        for (mut v, mut tag) in gens {
            for &(pv, ptag) in &pairs {
                if (v >> pv.trailing_zeros()) & 1 == 1 {
                    v ^= pv;
                    tag ^= ptag;
                }
            }
            if v == 0 {
                out.insert(tag);
            } else {
                pairs.push((v, tag));
            }
        }
        out
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && self.basis.iter().all(|&b| other.contains_bits(b))
    }

    /// Coordinate vectors `e_j` for the non-pivot positions `j`; together with
    /// the basis they span the ambient space.
    pub fn complement_basis(&self) -> Vec<u64> {
        let pivots: u64 = self
            .basis
            .iter()
            .fold(0, |acc, r| acc | (r & r.wrapping_neg()));
        (0..self.ambient)
            .filter(|&j| (pivots >> j) & 1 == 0)
            .map(|j| 1u64 << j)
            .collect()
    }

    /// Image under a coordinate map `bit i -> images[i]` into a space of
    /// dimension `target_dim`.
    pub fn map_through(&self, target_dim: usize, images: impl Fn(u64) -> u64) -> Subspace {
        Subspace::from_spanning(target_dim, self.basis.iter().map(|&b| images(b)))
    }
}

impl Ord for Subspace {
    fn cmp(&self, other: &Self) -> Ordering {
        self.ambient
            .cmp(&other.ambient)
            .then(self.basis.len().cmp(&other.basis.len()))
            .then_with(|| self.basis.as_slice().cmp(other.basis.as_slice()))
    }
}

impl PartialOrd for Subspace {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(F2^{}; [", self.ambient)?;
        for (i, v) in self.basis().iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{v}")?;
        }
        f.write_str("])")
    }
}

/// Every subspace of F₂ⁿ, ordered by dimension and then by echelon basis.
pub fn enumerate_subspaces(n: usize, bound: usize) -> Result<Vec<Subspace>> {
    if n > bound {
        return Err(Error::BoundExceeded {
            what: "subspace enumeration",
            dim: n,
            bound,
        });
    }
    let mut out = Vec::new();
    for k in 0..=n {
        out.extend(subspaces_of_dim(n, k));
    }
    out.sort();
    Ok(out)
}

/// Every `k`-dimensional subspace of F₂ⁿ in echelon order.
///
/// There is no bound check here; callers keep `k (n - k)` small.
pub fn subspaces_of_dim(n: usize, k: usize) -> Vec<Subspace> {
    assert!(n <= MAX_DIM && k <= n);
    let mut out = Vec::new();
    let mut pivots = Vec::with_capacity(k);
    choose_pivots(n, k, 0, &mut pivots, &mut out);
    out.sort();
    out
}

fn choose_pivots(
    n: usize,
    k: usize,
    start: usize,
    pivots: &mut Vec<usize>,
    out: &mut Vec<Subspace>,
) {
    if pivots.len() == k {
        fill_free_entries(n, pivots, out);
        return;
    }
    let remaining = k - pivots.len();
    for p in start..=(n - remaining) {
        pivots.push(p);
        choose_pivots(n, k, p + 1, pivots, out);
        pivots.pop();
    }
}

fn fill_free_entries(n: usize, pivots: &[usize], out: &mut Vec<Subspace>) {
    let pivot_mask: u64 = pivots.iter().fold(0, |m, &p| m | (1 << p));
    // Free coordinates of the row with pivot p: positions above p that are not pivots.
    let free: Vec<Vec<usize>> = pivots
        .iter()
        .map(|&p| {
            ((p + 1)..n)
                .filter(|j| (pivot_mask >> j) & 1 == 0)
                .collect()
        })
        .collect();
    let total: usize = free.iter().map(Vec::len).sum();
    assert!(total < 40, "too many free entries ({total}) to enumerate");
    for assignment in 0u64..(1u64 << total) {
        let mut bit = 0;
        let mut basis: SmallVec<[u64; 8]> = SmallVec::with_capacity(pivots.len());
        for (row, &p) in pivots.iter().enumerate() {
            let mut v = 1u64 << p;
            for &j in &free[row] {
                if (assignment >> bit) & 1 == 1 {
                    v |= 1 << j;
                }
                bit += 1;
            }
            basis.push(v);
        }
        out.push(Subspace { ambient: n, basis });
    }
}
