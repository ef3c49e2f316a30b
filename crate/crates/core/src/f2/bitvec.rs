use std::fmt;
use std::ops::{Add, AddAssign};
use std::str::FromStr;

use crate::error::{Error, Result};

/// Largest dimension a packed vector (and hence a quadratic space) may have.
pub const MAX_DIM: usize = 64;

/// Mask with the low `len` bits set.
#[inline]
pub(crate) fn low_mask(len: usize) -> u64 {
    if len >= 64 {
        u64::MAX
    } else {
        (1u64 << len) - 1
    }
}

#[inline]
pub(crate) fn parity(x: u64) -> bool {
    x.count_ones() & 1 == 1
}

/// A vector in F₂ⁿ, `n <= 64`, packed into one machine word.
///
/// Coordinate `i` is bit `i`; bits at or above `len` are always zero.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BitVec {
    len: usize,
    bits: u64,
}

impl BitVec {
    pub fn zero(len: usize) -> Self {
        assert!(len <= MAX_DIM, "vector length {len} exceeds {MAX_DIM}");
        Self { len, bits: 0 }
    }

    /// Builds a vector from packed bits; bits beyond `len` are cleared.
    pub fn from_bits(len: usize, bits: u64) -> Self {
        assert!(len <= MAX_DIM, "vector length {len} exceeds {MAX_DIM}");
        Self {
            len,
            bits: bits & low_mask(len),
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len, "unit index {i} out of range for length {len}");
        Self::from_bits(len, 1 << i)
    }

    pub fn from_bools(values: &[bool]) -> Self {
        let mut v = Self::zero(values.len());
        for (i, &b) in values.iter().enumerate() {
            v.set(i, b);
        }
        v
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
    pub fn bits(&self) -> u64 {
        self.bits
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len);
        (self.bits >> i) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len);
        if value {
            self.bits |= 1 << i;
        } else {
            self.bits &= !(1 << i);
        }
    }

    #[inline]
    pub fn is_zero(&self) -> bool {
        self.bits == 0
    }

    pub fn weight(&self) -> usize {
        self.bits.count_ones() as usize
    }

    /// Standard dot product over F₂.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len);
        parity(self.bits & other.bits)
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| (self.bits >> i) & 1 == 1)
    }
}

impl Add for BitVec {
    type Output = BitVec;

    fn add(self, rhs: BitVec) -> BitVec {
        assert_eq!(self.len, rhs.len, "length mismatch in vector sum");
        BitVec {
            len: self.len,
            bits: self.bits ^ rhs.bits,
        }
    }
}

impl AddAssign for BitVec {
    fn add_assign(&mut self, rhs: BitVec) {
        *self = *self + rhs;
    }
}

impl fmt::Display for BitVec {
    /// Coordinates in index order, e.g. `e_0 + e_2` in F₂³ prints as `101`.
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
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.len() > MAX_DIM {
            return Err(Error::DimensionTooLarge {
                dim: s.len(),
                max: MAX_DIM,
            });
        }
        let mut v = BitVec::zero(s.len());
        for (i, c) in s.chars().enumerate() {
            match c {
                '0' => {}
                '1' => v.set(i, true),
                other => {
                    return Err(Error::Parse(format!(
                        "expected 0/1 in vector {s:?}, found {other:?}"
                    )))
                }
            }
        }
        Ok(v)
    }
}
