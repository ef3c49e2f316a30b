//! Injective form-preserving linear maps, the morphisms of the categories of
//! non-degenerate and possibly degenerate quadratic spaces.

use std::fmt;

use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::f2::{parity, BitMatrix, BitVec, Subspace};
use crate::quadform::{combine, QuadSpace};
use crate::Limits;

/// An injective linear map `dom → cod` preserving the quadratic forms.
///
/// Stored by the images of the standard basis vectors of `dom`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct QuadMap {
    dom: QuadSpace,
    cod: QuadSpace,
    images: SmallVec<[u64; 8]>,
}

impl QuadMap {
    /// Validates a `cod.dim × dom.dim` matrix as a morphism.
    pub fn new(dom: QuadSpace, cod: QuadSpace, mat: &BitMatrix) -> Result<Self> {
        if !is_quad_morphism(&dom, &cod, mat)? {
            return Err(Error::InvalidMorphism(
                "matrix is not an injective form-preserving map".into(),
            ));
        }
        let images = mat.columns().into_iter().collect();
        Ok(Self { dom, cod, images })
    }

    /// Validates a map given by the images of the basis vectors of `dom`.
    pub fn from_images(dom: QuadSpace, cod: QuadSpace, images: &[u64]) -> Result<Self> {
        if images.len() != dom.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} images for a domain of dimension {}",
                images.len(),
                dom.dim()
            )));
        }
        let mat = BitMatrix::from_cols(cod.dim(), images);
        Self::new(dom, cod, &mat)
    }

    pub(crate) fn from_images_unchecked(dom: QuadSpace, cod: QuadSpace, images: &[u64]) -> Self {
        debug_assert!(preserves_form(&dom, &cod, images) && injective(images));
        Self {
            dom,
            cod,
            images: images.iter().copied().collect(),
        }
    }

    pub fn identity(space: &QuadSpace) -> Self {
        let images: Vec<u64> = (0..space.dim()).map(|i| 1u64 << i).collect();
        Self::from_images_unchecked(space.clone(), space.clone(), &images)
    }

    /// The zero space included in `space`.
    pub fn from_zero(space: &QuadSpace) -> Self {
        Self::from_images_unchecked(QuadSpace::zero(), space.clone(), &[])
    }

    pub fn dom(&self) -> &QuadSpace {
        &self.dom
    }

    pub fn cod(&self) -> &QuadSpace {
        &self.cod
    }

    /// Images of the standard basis of the domain, packed.
    pub fn images(&self) -> &[u64] {
        &self.images
    }

    pub fn matrix(&self) -> BitMatrix {
        BitMatrix::from_cols(self.cod.dim(), &self.images)
    }

    #[inline]
    pub fn apply_bits(&self, v: u64) -> u64 {
        combine(&self.images, v)
    }

    pub fn apply(&self, v: &BitVec) -> Result<BitVec> {
        if v.len() != self.dom.dim() {
            return Err(Error::DimensionMismatch(format!(
                "vector of length {} applied to a map from dimension {}",
                v.len(),
                self.dom.dim()
            )));
        }
        Ok(BitVec::from_bits(self.cod.dim(), self.apply_bits(v.bits())))
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &QuadMap) -> Result<QuadMap> {
        if inner.cod != self.dom {
            return Err(Error::ObjectMismatch(
                "codomain of the inner map differs from the domain of the outer map".into(),
            ));
        }
        let images: Vec<u64> = inner.images.iter().map(|&v| self.apply_bits(v)).collect();
        Ok(Self::from_images_unchecked(
            inner.dom.clone(),
            self.cod.clone(),
            &images,
        ))
    }

    pub fn image(&self) -> Subspace {
        Subspace::from_spanning(self.cod.dim(), self.images.iter().copied())
    }

    pub fn is_bijective(&self) -> bool {
        self.dom.dim() == self.cod.dim()
    }

    /// Inverse of a bijective morphism.
    pub fn inverse(&self) -> Option<QuadMap> {
        if !self.is_bijective() {
            return None;
        }
        let inv = self.matrix().inverse()?;
        Some(Self::from_images_unchecked(
            self.cod.clone(),
            self.dom.clone(),
            &inv.columns(),
        ))
    }

    /// `self ⊥ other : dom ⊥ dom' → cod ⊥ cod'`.
    pub fn orthogonal_sum(&self, other: &QuadMap) -> QuadMap {
        let shift = self.cod.dim();
        let images: Vec<u64> = self
            .images
            .iter()
            .copied()
            .chain(other.images.iter().map(|&v| v << shift))
            .collect();
        Self::from_images_unchecked(
            self.dom.orthogonal_sum(&other.dom),
            self.cod.orthogonal_sum(&other.cod),
            &images,
        )
    }
}

impl fmt::Debug for QuadMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "QuadMap({} -> {}; ",
            self.dom.iso_class(),
            self.cod.iso_class()
        )?;
        for (i, &v) in self.images.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{}", BitVec::from_bits(self.cod.dim(), v))?;
        }
        f.write_str(")")
    }
}

fn injective(images: &[u64]) -> bool {
    let mut span = Subspace::zero(64);
    images.iter().all(|&v| span.insert(v))
}

/// q on basis vectors and B on basis pairs; by polarization this is the full
/// condition.
fn preserves_form(dom: &QuadSpace, cod: &QuadSpace, images: &[u64]) -> bool {
    for (i, &u) in images.iter().enumerate() {
        if cod.q_bits(u) != dom.q_bits(1 << i) {
            return false;
        }
        let fu = cod.polar_functional(u);
        let row = dom.gram_row(i);
        for (j, &w) in images.iter().enumerate().skip(i + 1) {
            if parity(fu & w) != ((row >> j) & 1 == 1) {
                return false;
            }
        }
    }
    true
}

/// Whether `mat` (`cod.dim × dom.dim`) is injective and form-preserving.
pub fn is_quad_morphism(dom: &QuadSpace, cod: &QuadSpace, mat: &BitMatrix) -> Result<bool> {
    if mat.rows() != cod.dim() || mat.cols() != dom.dim() {
        return Err(Error::DimensionMismatch(format!(
            "matrix is {}x{}, expected {}x{}",
            mat.rows(),
            mat.cols(),
            cod.dim(),
            dom.dim()
        )));
    }
    let images = mat.columns();
    Ok(injective(&images) && preserves_form(dom, cod, &images))
}

/// Backtracking search for form-preserving injections `dom → cod` that
/// extend a prescribed partial map.
///
/// `fixed` lists pairs `(source, target)`; they may be linearly dependent as
/// long as they are consistent. The visitor receives the images of the
/// standard basis of `dom` and returns `false` to stop the search.
pub(crate) fn search_extensions(
    dom: &QuadSpace,
    cod: &QuadSpace,
    fixed: &[(u64, u64)],
    mut visit: impl FnMut(&[u64]) -> bool,
) {
    // Reduce the prescribed pairs to an independent set of sources.
    let mut sources: Vec<u64> = Vec::new();
    let mut targets: Vec<u64> = Vec::new();
    let mut echelon: Vec<(u64, u64)> = Vec::new();
    for &(s, t) in fixed {
        let (mut rs, mut rt) = (s, t);
        for &(es, et) in &echelon {
            if (rs >> es.trailing_zeros()) & 1 == 1 {
                rs ^= es;
                rt ^= et;
            }
        }
        if rs == 0 {
            if rt != 0 {
                return; // inconsistent prescription
            }
            continue;
        }
        echelon.push((rs, rt));
        sources.push(s);
        targets.push(t);
    }
    if !preserves_pairs(dom, cod, &sources, &targets) || !injective(&targets) {
        return;
    }

    let span = Subspace::from_spanning(dom.dim(), sources.iter().copied());
    let free = span.complement_basis();
    let mut basis = sources.clone();
    basis.extend(&free);
    // Column k of the inverse expresses e_k in `basis`.
    let to_basis = BitMatrix::from_cols(dom.dim(), &basis)
        .inverse()
        .expect("sources plus complement form a basis");
    let coords: Vec<u64> = (0..dom.dim()).map(|k| to_basis.col_bits(k)).collect();
    let standard = fixed.is_empty();

    let q_table: Option<Vec<bool>> =
        (cod.dim() <= 16).then(|| (0..1u64 << cod.dim()).map(|w| cod.q_bits(w)).collect());

    let mut search = Search {
        dom,
        cod,
        free: &free,
        basis: &basis,
        images: targets.clone(),
        spans: vec![Subspace::from_spanning(cod.dim(), targets.iter().copied())],
        q_table,
        coords: &coords,
        standard,
        stop: false,
    };
    search.step(0, &mut visit);
}

fn preserves_pairs(dom: &QuadSpace, cod: &QuadSpace, sources: &[u64], targets: &[u64]) -> bool {
    for i in 0..sources.len() {
        if dom.q_bits(sources[i]) != cod.q_bits(targets[i]) {
            return false;
        }
        for j in (i + 1)..sources.len() {
            if dom.b_bits(sources[i], sources[j]) != cod.b_bits(targets[i], targets[j]) {
                return false;
            }
        }
    }
    true
}

struct Search<'a> {
    dom: &'a QuadSpace,
    cod: &'a QuadSpace,
    free: &'a [u64],
    basis: &'a [u64],
    images: Vec<u64>,
    spans: Vec<Subspace>,
    q_table: Option<Vec<bool>>,
    coords: &'a [u64],
    standard: bool,
    stop: bool,
}

impl Search<'_> {
    fn step(&mut self, depth: usize, visit: &mut impl FnMut(&[u64]) -> bool) {
        if self.stop {
            return;
        }
        if depth == self.free.len() {
            let keep_going = if self.standard {
                visit(&self.images)
            } else {
                let cols: Vec<u64> = self
                    .coords
                    .iter()
                    .map(|&c| combine(&self.images, c))
                    .collect();
                visit(&cols)
            };
            self.stop = !keep_going;
            return;
        }
        let c = self.free[depth];
        let want_q = self.dom.q_bits(c);
        let fc = self.dom.polar_functional(c);
        // Required B-values against every image chosen so far.
        let constraints: SmallVec<[(u64, bool); 16]> = self
            .images
            .iter()
            .enumerate()
            .map(|(k, &img)| (self.cod.polar_functional(img), parity(fc & self.basis[k])))
            .collect();
        let top = 1u64 << self.cod.dim();
        for w in 1..top {
            let qw = match &self.q_table {
                Some(t) => t[w as usize],
                None => self.cod.q_bits(w),
            };
            if qw != want_q || constraints.iter().any(|&(f, b)| parity(f & w) != b) {
                continue;
            }
            let span = self.spans.last().expect("span stack is never empty");
            if span.contains_bits(w) {
                continue;
            }
            let mut next = span.clone();
            next.insert(w);
            self.spans.push(next);
            self.images.push(w);
            self.step(depth + 1, visit);
            self.images.pop();
            self.spans.pop();
            if self.stop {
                return;
            }
        }
    }
}

/// All morphisms `v → w`, ordered lexicographically by the images of the
/// basis vectors.
pub fn enumerate_homs(v: &QuadSpace, w: &QuadSpace, limits: &Limits) -> Result<Vec<QuadMap>> {
    limits.check_enum("Hom enumeration", w.dim())?;
    Ok(enumerate_homs_unbounded(v, w))
}

pub(crate) fn enumerate_homs_unbounded(v: &QuadSpace, w: &QuadSpace) -> Vec<QuadMap> {
    let mut out = Vec::new();
    if v.dim() > w.dim() {
        return out;
    }
    search_extensions(v, w, &[], |images| {
        out.push(QuadMap::from_images_unchecked(v.clone(), w.clone(), images));
        true
    });
    out
}

/// `|Hom(v, w)|` without materializing the maps.
pub fn count_homs(v: &QuadSpace, w: &QuadSpace, limits: &Limits) -> Result<usize> {
    limits.check_enum("Hom enumeration", w.dim())?;
    let mut n = 0usize;
    if v.dim() <= w.dim() {
        search_extensions(v, w, &[], |_| {
            n += 1;
            true
        });
    }
    Ok(n)
}

/// The orthogonal group `O(v)`.
pub fn orthogonal_group(v: &QuadSpace, limits: &Limits) -> Result<Vec<QuadMap>> {
    limits.check_enum("orthogonal group", v.dim())?;
    Ok(enumerate_homs_unbounded(v, v))
}

/// Orthogonal complement `V′` of the image of `f`, with its induced form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Complement {
    /// `V′` as a subspace of `f.cod()`.
    pub subspace: Subspace,
    /// `V′` with the induced form, in the echelon basis of `subspace`.
    pub space: QuadSpace,
}

fn require_nondegenerate_ends(f: &QuadMap) -> Result<()> {
    f.dom.require_nondegenerate("domain")?;
    f.cod.require_nondegenerate("codomain")
}

/// `V′ = {w | B(w, f(v)) = 0 for all v}`, so that `cod = f(dom) ⊥ V′`.
pub fn orthogonal_complement(f: &QuadMap) -> Result<Complement> {
    require_nondegenerate_ends(f)?;
    Ok(complement_unchecked(f))
}

pub(crate) fn complement_unchecked(f: &QuadMap) -> Complement {
    let all: Vec<u64> = (0..f.cod.dim()).map(|i| 1u64 << i).collect();
    let subspace = f.cod.orthogonal_within(&all, &f.images);
    let space = f.cod.restrict_to(&subspace);
    Complement { subspace, space }
}

/// Coordinates adapted to `cod = f(dom) ⊥ V′`: the inverse of the matrix
/// whose columns are `f(e_1), …, f(e_k)` followed by the complement basis.
pub(crate) fn adapted_inverse(f: &QuadMap, complement: &Complement) -> BitMatrix {
    let mut cols: Vec<u64> = f.images.to_vec();
    cols.extend(complement.subspace.basis_bits());
    BitMatrix::from_cols(f.cod.dim(), &cols)
        .inverse()
        .expect("image and orthogonal complement span the codomain")
}

/// The projection `cod → dom` that inverts `f` on its image and kills the
/// orthogonal complement, as a `dom.dim × cod.dim` matrix.
pub fn orthogonal_projection(f: &QuadMap) -> Result<BitMatrix> {
    require_nondegenerate_ends(f)?;
    let complement = complement_unchecked(f);
    let inv = adapted_inverse(f, &complement);
    let k = f.dom.dim();
    let rows: Vec<u64> = (0..k).map(|i| inv.row_bits(i)).collect();
    Ok(BitMatrix::from_rows(f.cod.dim(), &rows))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn h0() -> QuadSpace {
        QuadSpace::h0()
    }
    fn h1() -> QuadSpace {
        QuadSpace::h1()
    }
    fn x(v: bool) -> QuadSpace {
        QuadSpace::point(v)
    }
    fn lim() -> Limits {
        Limits::default()
    }

    #[test]
    fn identity_is_morphism() {
        assert!(is_quad_morphism(&h0(), &h0(), &BitMatrix::identity(2)).unwrap());
    }

    #[test]
    fn isotropic_line_does_not_map_into_h1() {
        let mat = BitMatrix::from_cols(2, &[0b01]);
        assert!(!is_quad_morphism(&x(false), &h1(), &mat).unwrap());
    }

    #[test]
    fn non_injective_map_rejected() {
        // (x,0) ⊥ (x,0) -> (x,0), both basis vectors to x: q preserved, not injective.
        let two = x(false).power(2);
        let mat = BitMatrix::from_cols(1, &[1, 1]);
        assert!(!is_quad_morphism(&two, &x(false), &mat).unwrap());
    }

    #[test]
    fn shape_mismatch_is_error() {
        assert!(is_quad_morphism(&h0(), &h0(), &BitMatrix::identity(3)).is_err());
    }

    #[test]
    fn hom_counts() {
        assert!(enumerate_homs(&x(false), &h1(), &lim()).unwrap().is_empty());
        let homs = enumerate_homs(&x(false), &h0(), &lim()).unwrap();
        assert_eq!(homs.len(), 2);
        assert_eq!(homs[0].images(), &[0b01]);
        assert_eq!(homs[1].images(), &[0b10]);
        let homs = enumerate_homs(&x(true), &h0(), &lim()).unwrap();
        assert_eq!(homs.len(), 1);
        assert_eq!(homs[0].images(), &[0b11]);
    }

    #[test]
    fn orthogonal_group_orders() {
        assert_eq!(orthogonal_group(&h0(), &lim()).unwrap().len(), 2);
        assert_eq!(orthogonal_group(&h1(), &lim()).unwrap().len(), 6);
        assert_eq!(orthogonal_group(&x(false), &lim()).unwrap().len(), 1);
        assert_eq!(orthogonal_group(&x(true), &lim()).unwrap().len(), 1);
    }

    #[test]
    fn bound_is_enforced() {
        let big = h0().power(5);
        assert!(matches!(
            enumerate_homs(&h0(), &big, &lim()),
            Err(Error::BoundExceeded { .. })
        ));
    }

    #[test]
    fn complement_of_block_inclusion() {
        let cod = h0().orthogonal_sum(&h1());
        let f = QuadMap::from_images(h0(), cod.clone(), &[0b0001, 0b0010]).unwrap();
        let c = orthogonal_complement(&f).unwrap();
        assert_eq!(c.subspace, Subspace::from_spanning(4, [0b0100, 0b1000]));
        assert_eq!(c.space, h1());
        let p = orthogonal_projection(&f).unwrap();
        assert_eq!(p, BitMatrix::from_rows(4, &[0b0001, 0b0010]));
    }

    #[test]
    fn complement_of_identity_is_zero() {
        let f = QuadMap::identity(&h1());
        assert!(orthogonal_complement(&f).unwrap().subspace.is_zero());
        assert_eq!(orthogonal_projection(&f).unwrap(), BitMatrix::identity(2));
    }

    #[test]
    fn complement_requires_nondegenerate_ends() {
        let f = QuadMap::from_images(x(false), h0(), &[0b01]).unwrap();
        assert!(matches!(
            orthogonal_complement(&f),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn projection_inverts_on_image_for_every_embedding() {
        let cod = h0().power(2).orthogonal_sum(&h1());
        for f in enumerate_homs(&h0(), &cod, &lim()).unwrap() {
            let c = orthogonal_complement(&f).unwrap();
            assert_eq!(c.subspace.dim(), 4);
            assert!(c.space.is_nondegenerate());
            let p = orthogonal_projection(&f).unwrap();
            for v in 0..4u64 {
                assert_eq!(p.apply(f.apply_bits(v)), v);
            }
            for &w in c.subspace.basis_bits() {
                assert_eq!(p.apply(w), 0);
            }
        }
    }

    #[test]
    fn group_axioms_hold() {
        for space in [h0(), h1(), h0().power(2)] {
            let group = orthogonal_group(&space, &lim()).unwrap();
            let id = QuadMap::identity(&space);
            assert!(group.contains(&id));
            for g in &group {
                assert!(group.contains(&g.inverse().unwrap()));
                for h in &group {
                    assert!(group.contains(&g.compose(h).unwrap()));
                }
            }
        }
    }

    #[test]
    fn constrained_search_respects_prescription() {
        let cod = h0().power(2);
        let mut found = Vec::new();
        search_extensions(&h0(), &cod, &[(0b01, 0b0001)], |imgs| {
            found.push(imgs.to_vec());
            true
        });
        assert!(!found.is_empty());
        for imgs in &found {
            assert_eq!(imgs[0], 0b0001);
        }
        // Inconsistent prescription: 0 -> nonzero.
        let mut any = false;
        search_extensions(&h0(), &cod, &[(0b01, 0b0001), (0b01, 0b0010)], |_| {
            any = true;
            true
        });
        assert!(!any);
    }
}
