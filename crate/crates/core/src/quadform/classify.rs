use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::QuadSpace;
use crate::error::{Error, Result};
use crate::f2::BitVec;

/// Isometry class of a quadratic space over F₂.
///
/// A space splits as `H ⊥ Rad(V)` with `H` non-degenerate and the radical
/// isometric to `(x,0)^r` or `(x,1)^r`. When the form does not vanish on the
/// radical, `H` is only determined up to dimension, so `arf` is absent.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct IsoClass {
    pub dim: usize,
    pub rad_dim: usize,
    /// Whether `q` is nonzero on the radical; `None` when the radical is zero.
    pub rad_type: Option<bool>,
    /// Arf invariant of the non-degenerate part; `None` when `rad_type == Some(true)`.
    pub arf: Option<bool>,
}

impl IsoClass {
    pub fn new(
        dim: usize,
        rad_dim: usize,
        rad_type: Option<bool>,
        arf: Option<bool>,
    ) -> Result<Self> {
        let c = Self {
            dim,
            rad_dim,
            rad_type,
            arf,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| {
            Err(Error::MalformedSpace(format!(
                "invalid class {self:?}: {msg}"
            )))
        };
        if self.rad_dim > self.dim {
            return bad("radical larger than the space");
        }
        if (self.dim - self.rad_dim) % 2 != 0 {
            return bad("non-degenerate part must have even dimension");
        }
        if self.rad_type.is_some() != (self.rad_dim > 0) {
            return bad("radical type is set exactly when the radical is nonzero");
        }
        if self.arf.is_none() != (self.rad_type == Some(true)) {
            return bad("Arf value is absent exactly when q is nonzero on the radical");
        }
        if self.dim == self.rad_dim && self.arf == Some(true) {
            return bad("the zero non-degenerate part has Arf invariant 0");
        }
        Ok(())
    }

    /// Every class of dimension `dim`, in increasing order.
    pub fn all_of_dim(dim: usize) -> Vec<IsoClass> {
        let mut out = Vec::new();
        for rad_dim in (0..=dim).filter(|r| (dim - r) % 2 == 0) {
            let types: &[Option<bool>] = if rad_dim == 0 {
                &[None]
            } else {
                &[Some(false), Some(true)]
            };
            for &rad_type in types {
                let arfs: &[Option<bool>] = if rad_type == Some(true) {
                    &[None]
                } else if dim == rad_dim {
                    &[Some(false)]
                } else {
                    &[Some(false), Some(true)]
                };
                for &arf in arfs {
                    out.push(IsoClass {
                        dim,
                        rad_dim,
                        rad_type,
                        arf,
                    });
                }
            }
        }
        out.sort();
        out
    }

    /// Half the dimension of the non-degenerate part.
    pub fn planes(&self) -> usize {
        (self.dim - self.rad_dim) / 2
    }
}

impl fmt::Display for IsoClass {
    /// Canonical block notation, e.g. `H1+H0+x0`; the zero space prints as `0`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts: Vec<&str> = Vec::new();
        let m = self.planes();
        if m > 0 {
            if self.arf == Some(true) {
                parts.push("H1");
                parts.extend(std::iter::repeat_n("H0", m - 1));
            } else {
                parts.extend(std::iter::repeat_n("H0", m));
            }
        }
        let line = if self.rad_type == Some(true) {
            "x1"
        } else {
            "x0"
        };
        parts.extend(std::iter::repeat_n(line, self.rad_dim));
        if parts.is_empty() {
            f.write_str("0")
        } else {
            f.write_str(&parts.join("+"))
        }
    }
}

impl FromStr for IsoClass {
    type Err = Error;

    /// Parses any block descriptor and returns its class.
    fn from_str(s: &str) -> Result<Self> {
        Ok(crate::text::parse_descriptor(s)?.iso_class())
    }
}

/// Output of [`QuadSpace::decompose`]: an orthogonal splitting into a
/// non-degenerate part and the radical.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    /// Symplectic basis of the non-degenerate part, ordered `a₁, b₁, a₂, b₂, …`.
    pub nondeg: Vec<BitVec>,
    /// Basis of the radical; all vectors share the value `q = rad_type`.
    pub radical: Vec<BitVec>,
    pub rad_type: Option<bool>,
}

impl QuadSpace {
    /// Symplectic basis of the span of `basis`, which must carry a
    /// non-degenerate induced form.
    pub(crate) fn symplectic_pairs(&self, basis: &[u64]) -> Result<Vec<(u64, u64)>> {
        let mut rest: Vec<u64> = basis.to_vec();
        let mut pairs = Vec::with_capacity(rest.len() / 2);
        while !rest.is_empty() {
            let a = rest[0];
            let fa = self.polar_functional(a);
            let Some(j) = (1..rest.len()).find(|&j| (fa & rest[j]).count_ones() & 1 == 1) else {
                return Err(Error::Degenerate(format!(
                    "no symplectic partner for a vector in a {}-dimensional span",
                    basis.len()
                )));
            };
            let b = rest[j];
            let fb = self.polar_functional(b);
            rest = rest
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != 0 && i != j)
                .map(|(_, &v)| {
                    let mut w = v;
                    if (fb & v).count_ones() & 1 == 1 {
                        w ^= a;
                    }
                    if (fa & v).count_ones() & 1 == 1 {
                        w ^= b;
                    }
                    w
                })
                .collect();
            pairs.push((a, b));
        }
        Ok(pairs)
    }

    pub(crate) fn arf_of_pairs(&self, pairs: &[(u64, u64)]) -> bool {
        pairs.iter().fold(false, |acc, &(a, b)| {
            acc ^ (self.q_bits(a) & self.q_bits(b))
        })
    }

    /// Pairs `(aᵢ, bᵢ)` with `B(aᵢ, bᵢ) = 1` and all other pairings zero.
    pub fn symplectic_basis(&self) -> Result<Vec<(BitVec, BitVec)>> {
        self.require_nondegenerate("symplectic basis input")?;
        let basis: Vec<u64> = (0..self.dim).map(|i| 1u64 << i).collect();
        Ok(self
            .symplectic_pairs(&basis)?
            .into_iter()
            .map(|(a, b)| {
                (
                    BitVec::from_bits(self.dim, a),
                    BitVec::from_bits(self.dim, b),
                )
            })
            .collect())
    }

    /// Arf invariant `Σ q(aᵢ) q(bᵢ)` over a symplectic basis.
    pub fn arf(&self) -> Result<bool> {
        self.require_nondegenerate("Arf invariant input")?;
        let basis: Vec<u64> = (0..self.dim).map(|i| 1u64 << i).collect();
        let pairs = self.symplectic_pairs(&basis)?;
        Ok(self.arf_of_pairs(&pairs))
    }

    /// Splits the space as `H ⊥ Rad(V)`.
    ///
    /// The radical basis is rebased so that every vector has `q = rad_type`.
    /// When `rad_type = 1` the non-degenerate part is normalized to Arf 0.
    pub fn decompose(&self) -> Decomposition {
        let (pairs, rad_basis, rad_type) = self.decompose_bits();
        let to_vec = |x: u64| BitVec::from_bits(self.dim, x);
        Decomposition {
            nondeg: pairs
                .iter()
                .flat_map(|&(a, b)| [to_vec(a), to_vec(b)])
                .collect(),
            radical: rad_basis.into_iter().map(to_vec).collect(),
            rad_type,
        }
    }

    /// Packed form of [`QuadSpace::decompose`]: symplectic pairs, radical
    /// basis and radical type.
    pub(crate) fn decompose_bits(&self) -> (Vec<(u64, u64)>, Vec<u64>, Option<bool>) {
        let rad = self.radical();
        let mut rad_basis: Vec<u64> = rad.basis_bits().to_vec();
        let anchor = rad_basis.iter().copied().find(|&r| self.q_bits(r));
        let rad_type = if rad_basis.is_empty() {
            None
        } else {
            Some(anchor.is_some())
        };
        if let Some(r0) = anchor {
            for r in rad_basis.iter_mut() {
                if !self.q_bits(*r) {
                    *r ^= r0;
                }
            }
        }
        let complement = rad.complement_basis();
        let mut pairs = self
            .symplectic_pairs(&complement)
            .expect("a linear complement of the radical is non-degenerate");
        if let (Some(r0), true) = (anchor, self.arf_of_pairs(&pairs)) {
            // Adding a radical vector with q = 1 flips q without changing B.
            let (a, b) = &mut pairs[0];
            if self.q_bits(*b) {
                *a ^= r0;
            } else if self.q_bits(*a) {
                *b ^= r0;
            } else {
                *a ^= r0;
                *b ^= r0;
            }
            debug_assert!(!self.arf_of_pairs(&pairs));
        }
        (pairs, rad_basis, rad_type)
    }

    pub fn iso_class(&self) -> IsoClass {
        let rad = self.radical();
        let rad_dim = rad.dim();
        let rad_type = if rad_dim == 0 {
            None
        } else {
            Some(rad.basis_bits().iter().any(|&r| self.q_bits(r)))
        };
        let arf = if rad_type == Some(true) {
            None
        } else {
            let pairs = self
                .symplectic_pairs(&rad.complement_basis())
                .expect("a linear complement of the radical is non-degenerate");
            Some(self.arf_of_pairs(&pairs))
        };
        IsoClass {
            dim: self.dim,
            rad_dim,
            rad_type,
            arf,
        }
    }

    pub fn is_isometric(&self, other: &QuadSpace) -> bool {
        self.iso_class() == other.iso_class()
    }

    /// Canonical representative `H ⊥ Rad` of a class.
    pub fn from_class(class: &IsoClass) -> Result<QuadSpace> {
        class.validate()?;
        let m = class.planes();
        let nondeg = if class.arf == Some(true) {
            QuadSpace::h1().orthogonal_sum(&QuadSpace::h0().power(m - 1))
        } else {
            QuadSpace::h0().power(m)
        };
        let line = QuadSpace::point(class.rad_type == Some(true));
        Ok(nondeg.orthogonal_sum(&line.power(class.rad_dim)))
    }
}
