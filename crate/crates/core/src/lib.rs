//! Exact computations with quadratic spaces over F₂.
//!
//! The crate covers the linear algebra over F₂ ([`f2`]), quadratic spaces and
//! their isometry classification ([`quadform`]), form-preserving injections
//! ([`qmorph`]), the span category of possibly degenerate spaces
//! ([`spancat`]), the cospan category of non-degenerate spaces together with
//! the functors `ε` and `σ` ([`cospancat`]), and finite evaluations of the
//! isotropic functors ([`isofunc`]). [`verify`] bundles the exhaustive checks
//! that the `fquad verify` command runs.

pub mod cli;
pub mod cospancat;
pub mod error;
pub mod f2;
pub mod isofunc;
pub mod qmorph;
pub mod quadform;
pub mod spancat;
pub mod text;
pub mod verify;

pub use error::{Error, Result};

/// Caps on the exhaustive enumerations.
///
/// Every enumeration checks its dimension against these before doing any
/// exponential work and fails with [`Error::BoundExceeded`] instead.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    /// Total ambient dimension for subspace, Hom-set and span enumeration.
    pub enum_dim: usize,
    /// Apex dimension for cospan enumeration and equivalence search.
    pub apex_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            enum_dim: 8,
            apex_dim: 10,
        }
    }
}

impl Limits {
    /// Enumeration bound `bound`, apex bound `bound + 2`, the same spacing
    /// as the defaults.
    pub fn with_bound(bound: usize) -> Self {
        Self {
            enum_dim: bound,
            apex_dim: bound + 2,
        }
    }

    pub(crate) fn check_enum(&self, what: &'static str, dim: usize) -> Result<()> {
        if dim > self.enum_dim {
            return Err(Error::BoundExceeded {
                what,
                dim,
                bound: self.enum_dim,
            });
        }
        Ok(())
    }

    pub(crate) fn check_apex(&self, what: &'static str, dim: usize) -> Result<()> {
        if dim > self.apex_dim {
            return Err(Error::BoundExceeded {
                what,
                dim,
                bound: self.apex_dim,
            });
        }
        Ok(())
    }
}
