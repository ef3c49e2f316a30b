//! Finite evaluations of the functors `Q_V`, `iso_V` and `K_V`, and the
//! algebra `F₂[End(V)]` of the span category.
//!
//! `Q_V(X)` has basis the span morphisms `V → X`. `K_V(X)` is spanned by the
//! spans whose middle object is smaller than `V`, and `iso_V = Q_V / K_V` has
//! basis the spans with bijective left leg, i.e. the graphs of morphisms
//! `V → X`.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{enumerate_subspaces, BitMatrix, Subspace};
use crate::quadform::QuadSpace;
use crate::spancat::{
    compose_unchecked, e_alpha, span_homs_unbounded, transpose_span, SpanMorphism,
};
use crate::Limits;

/// Which functor is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum FunctorKind {
    Q,
    Iso,
    K,
}

impl fmt::Display for FunctorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Q => "Q",
            Self::Iso => "iso",
            Self::K => "K",
        })
    }
}

/// `F_V(X)` for `F ∈ {Q, iso, K}`, with its basis of spans `V → X`.
#[derive(Debug, Clone)]
pub struct FunctorEval {
    kind: FunctorKind,
    param: QuadSpace,
    at: QuadSpace,
    basis: Vec<SpanMorphism>,
    index: HashMap<Subspace, usize>,
}

impl FunctorEval {
    pub fn kind(&self) -> FunctorKind {
        self.kind
    }

    pub fn param(&self) -> &QuadSpace {
        &self.param
    }

    pub fn at(&self) -> &QuadSpace {
        &self.at
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[SpanMorphism] {
        &self.basis
    }

    /// Coordinates of a sum of spans `V → X`, or an error when a term lies
    /// outside the space (a full span in `K`).
    fn coordinates(&self, terms: impl IntoIterator<Item = SpanMorphism>) -> Result<Vec<usize>> {
        let mut hits = BTreeSet::new();
        for t in terms {
            if self.kind == FunctorKind::Iso && !t.is_full() {
                continue; // zero in the quotient
            }
            let &i = self.index.get(t.relation()).ok_or_else(|| {
                Error::InvalidMorphism(format!("span {t:?} is outside {}", self.kind))
            })?;
            if !hits.insert(i) {
                hits.remove(&i);
            }
        }
        Ok(hits.into_iter().collect())
    }
}

/// Evaluates `F_V` at `X`.
pub fn eval_functor(
    kind: FunctorKind,
    v: &QuadSpace,
    x: &QuadSpace,
    limits: &Limits,
) -> Result<FunctorEval> {
    limits.check_enum("functor evaluation", v.dim() + x.dim())?;
    let basis: Vec<SpanMorphism> = span_homs_unbounded(v, x)
        .into_iter()
        .filter(|s| match kind {
            FunctorKind::Q => true,
            FunctorKind::Iso => s.is_full(),
            FunctorKind::K => !s.is_full(),
        })
        .collect();
    let index = basis
        .iter()
        .enumerate()
        .map(|(i, s)| (s.relation().clone(), i))
        .collect();
    Ok(FunctorEval {
        kind,
        param: v.clone(),
        at: x.clone(),
        basis,
        index,
    })
}

/// An element of `F₂[End(V)]`: a finite set of endomorphisms, each with
/// coefficient 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement {
    space: QuadSpace,
    support: BTreeSet<Subspace>,
}

impl AlgebraElement {
    pub fn zero(space: &QuadSpace) -> Self {
        Self {
            space: space.clone(),
            support: BTreeSet::new(),
        }
    }

    pub fn one(space: &QuadSpace) -> Self {
        Self::from_morphism(&SpanMorphism::identity(space)).expect("identity is an endomorphism")
    }

    pub fn from_morphism(s: &SpanMorphism) -> Result<Self> {
        if s.dom() != s.cod() {
            return Err(Error::ObjectMismatch(
                "algebra elements are endomorphisms".into(),
            ));
        }
        Ok(Self {
            space: s.dom().clone(),
            support: BTreeSet::from([s.relation().clone()]),
        })
    }

    pub fn space(&self) -> &QuadSpace {
        &self.space
    }

    pub fn is_zero(&self) -> bool {
        self.support.is_empty()
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// The endomorphisms with coefficient 1.
    pub fn support(&self) -> impl Iterator<Item = SpanMorphism> + '_ {
        self.support.iter().map(|r| {
            SpanMorphism::from_relation_unchecked(self.space.clone(), self.space.clone(), r.clone())
        })
    }

    fn toggle(&mut self, rel: Subspace) {
        if !self.support.remove(&rel) {
            self.support.insert(rel);
        }
    }

    pub fn add(&self, other: &AlgebraElement) -> Result<AlgebraElement> {
        self.check_space(other)?;
        let mut out = self.clone();
        for r in &other.support {
            out.toggle(r.clone());
        }
        Ok(out)
    }

    fn check_space(&self, other: &AlgebraElement) -> Result<()> {
        if self.space != other.space {
            return Err(Error::ObjectMismatch(
                "algebra elements over different spaces".into(),
            ));
        }
        Ok(())
    }
}

impl fmt::Debug for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.support.iter()).finish()
    }
}

/// `a · b = a ∘ b`: first `b`, then `a`.
pub fn algebra_mul(a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement> {
    a.check_space(b)?;
    let mut out = AlgebraElement::zero(&a.space);
    for sb in b.support() {
        for sa in a.support() {
            out.toggle(compose_unchecked(&sb, &sa).relation().clone());
        }
    }
    Ok(out)
}

fn one_plus_e(space: &QuadSpace, sub: &Subspace) -> AlgebraElement {
    let e = AlgebraElement::from_morphism(&e_alpha(space, sub).expect("subspace of the space"))
        .expect("e_A is an endomorphism");
    AlgebraElement::one(space).add(&e).expect("same space")
}

/// `E_V = ∏ (1 + e_A)` over the proper subspaces `A ⊊ V`.
pub fn big_e(v: &QuadSpace, limits: &Limits) -> Result<AlgebraElement> {
    limits.check_enum("idempotent product", v.dim())?;
    let mut acc = AlgebraElement::one(v);
    for a in enumerate_subspaces(v.dim(), v.dim())? {
        if !a.is_full() {
            acc = algebra_mul(&acc, &one_plus_e(v, &a))?;
        }
    }
    Ok(acc)
}

/// `E_A = e_A ∏ (1 + e_B)` over the subspaces `B ⊊ A`.
pub fn big_e_alpha(v: &QuadSpace, a: &Subspace, limits: &Limits) -> Result<AlgebraElement> {
    limits.check_enum("idempotent product", v.dim())?;
    let mut acc = AlgebraElement::from_morphism(&e_alpha(v, a)?)?;
    for b in enumerate_subspaces(v.dim(), v.dim())? {
        if b != *a && b.is_subspace_of(a) {
            acc = algebra_mul(&acc, &one_plus_e(v, &b))?;
        }
    }
    Ok(acc)
}

fn matrix_from_images(rows: usize, images: &[Vec<usize>]) -> BitMatrix {
    let mut m = BitMatrix::zeros(rows, images.len());
    for (j, hits) in images.iter().enumerate() {
        for &i in hits {
            m.set(i, j, true);
        }
    }
    m
}

/// The matrix of `F(a)` on `F(X)` for `a ∈ F₂[End(X)]`: each basis span
/// `t: V → X` goes to `a ∘ t`.
pub fn act(eval: &FunctorEval, a: &AlgebraElement) -> Result<BitMatrix> {
    if eval.at != a.space {
        return Err(Error::ObjectMismatch(
            "the algebra element does not act on this evaluation".into(),
        ));
    }
    let images = eval
        .basis
        .iter()
        .map(|t| eval.coordinates(a.support().map(|s| compose_unchecked(t, &s))))
        .collect::<Result<Vec<_>>>()?;
    Ok(matrix_from_images(eval.dim(), &images))
}

/// The matrix of precomposition by `a ∈ F₂[End(V)]` on `Q_V(X)`: each basis
/// span `t` goes to `t ∘ a`. This is the right module structure used to cut
/// out summands such as `Q_V · E_V`.
pub fn act_right(eval: &FunctorEval, a: &AlgebraElement) -> Result<BitMatrix> {
    if eval.kind != FunctorKind::Q || eval.param != a.space {
        return Err(Error::ObjectMismatch(
            "precomposition acts on Q_V by elements of End(V)".into(),
        ));
    }
    let images = eval
        .basis
        .iter()
        .map(|t| eval.coordinates(a.support().map(|s| compose_unchecked(&s, t))))
        .collect::<Result<Vec<_>>>()?;
    Ok(matrix_from_images(eval.dim(), &images))
}

/// The matrix of `F(u): F(X) → F(Y)` for a span `u: X → Y`.
pub fn act_morphism(src: &FunctorEval, dst: &FunctorEval, u: &SpanMorphism) -> Result<BitMatrix> {
    if src.kind != dst.kind || src.param != dst.param || u.dom() != &src.at || u.cod() != &dst.at {
        return Err(Error::ObjectMismatch(
            "morphism does not connect the evaluations".into(),
        ));
    }
    let images = src
        .basis
        .iter()
        .map(|t| dst.coordinates([compose_unchecked(t, u)]))
        .collect::<Result<Vec<_>>>()?;
    Ok(matrix_from_images(dst.dim(), &images))
}

/// `dim Hom(iso_V, iso_W)`, computed as the rank of `iso_W(E_V)` on
/// `iso_W(V)`.
pub fn hom_iso_dim(v: &QuadSpace, w: &QuadSpace, limits: &Limits) -> Result<usize> {
    let eval = eval_functor(FunctorKind::Iso, w, v, limits)?;
    let e = big_e(v, limits)?;
    Ok(act(&eval, &e)?.rank())
}

/// Data checked for one pair `(V, X)` of the decomposition `Q_V ≅ ⊕ iso_A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecompositionReport {
    pub dim_q: usize,
    /// `Σ_A dim iso_A(X)` over the subspaces `A ⊆ V`.
    pub sum_iso: usize,
    /// Per subspace: `(dim A, rank of · E_A on Q_V(X), dim iso_A(X))`.
    pub summands: Vec<(usize, usize, usize)>,
    /// `E_A E_B = δ_AB E_A` for all pairs.
    pub orthogonal: bool,
    /// `Σ_A E_A = 1`.
    pub complete: bool,
}

impl DecompositionReport {
    pub fn holds(&self) -> bool {
        self.dim_q == self.sum_iso
            && self.orthogonal
            && self.complete
            && self.summands.iter().all(|&(_, rank, dim)| rank == dim)
    }
}

pub fn decomposition_check(
    v: &QuadSpace,
    x: &QuadSpace,
    limits: &Limits,
) -> Result<DecompositionReport> {
    let q = eval_functor(FunctorKind::Q, v, x, limits)?;
    let subs = enumerate_subspaces(v.dim(), limits.enum_dim)?;
    let idems = subs
        .iter()
        .map(|a| big_e_alpha(v, a, limits))
        .collect::<Result<Vec<_>>>()?;
    let mut summands = Vec::with_capacity(subs.len());
    let mut sum_iso = 0;
    for (a, e) in subs.iter().zip(&idems) {
        let dim_iso = eval_functor(FunctorKind::Iso, &v.restrict_to(a), x, limits)?.dim();
        sum_iso += dim_iso;
        summands.push((a.dim(), act_right(&q, e)?.rank(), dim_iso));
    }
    let mut orthogonal = true;
    for (i, ei) in idems.iter().enumerate() {
        for (j, ej) in idems.iter().enumerate() {
            let prod = algebra_mul(ei, ej)?;
            orthogonal &= if i == j { prod == *ei } else { prod.is_zero() };
        }
    }
    let total = idems
        .iter()
        .try_fold(AlgebraElement::zero(v), |acc, e| acc.add(e))?;
    Ok(DecompositionReport {
        dim_q: q.dim(),
        sum_iso,
        summands,
        orthogonal,
        complete: total == AlgebraElement::one(v),
    })
}

/// The pairing `⟨s, t⟩ = [tr(t) ∘ s = Id_V]` on `Q_V(X)`.
pub fn a_v_matrix(v: &QuadSpace, x: &QuadSpace, limits: &Limits) -> Result<BitMatrix> {
    let q = eval_functor(FunctorKind::Q, v, x, limits)?;
    let id = SpanMorphism::identity(v);
    let transposed: Vec<SpanMorphism> = q.basis.iter().map(transpose_span).collect();
    let n = q.dim();
    let mut m = BitMatrix::zeros(n, n);
    for (i, s) in q.basis.iter().enumerate() {
        for (j, t) in transposed.iter().enumerate() {
            if compose_unchecked(s, t) == id {
                m.set(i, j, true);
            }
        }
    }
    Ok(m)
}

/// The pairing at `X = V` is symmetric and has rank `dim iso_V(V)`.
pub fn self_duality_check(v: &QuadSpace, limits: &Limits) -> Result<bool> {
    let m = a_v_matrix(v, v, limits)?;
    let iso = eval_functor(FunctorKind::Iso, v, v, limits)?.dim();
    Ok(m == m.transpose() && m.rank() == iso)
}

/// Dimensions of `Q_V(X)`, `iso_V(X)`, `K_V(X)` for a grid of objects, and the
/// matrix `dim Hom(iso_V, iso_W)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsoTable {
    pub objects: Vec<String>,
    /// Rows `(V, X, dim Q, dim iso, dim K)` indexed into `objects`.
    pub dims: Vec<(usize, usize, usize, usize, usize)>,
    /// `hom[i][j] = dim Hom(iso_{objects[i]}, iso_{objects[j]})`.
    pub hom: Vec<Vec<usize>>,
}

pub fn iso_table(objects: &[QuadSpace], limits: &Limits) -> Result<IsoTable> {
    let mut dims = Vec::new();
    let mut hom = vec![vec![0; objects.len()]; objects.len()];
    for (i, v) in objects.iter().enumerate() {
        for (j, x) in objects.iter().enumerate() {
            let q = eval_functor(FunctorKind::Q, v, x, limits)?.dim();
            let iso = eval_functor(FunctorKind::Iso, v, x, limits)?.dim();
            let k = eval_functor(FunctorKind::K, v, x, limits)?.dim();
            dims.push((i, j, q, iso, k));
            hom[i][j] = hom_iso_dim(v, x, limits)?;
        }
    }
    Ok(IsoTable {
        objects: objects.iter().map(|o| o.iso_class().to_string()).collect(),
        dims,
        hom,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::subspaces_of_dim;
    use crate::spancat::enumerate_span_homs;

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
    fn evaluation_dimensions() {
        let q = eval_functor(FunctorKind::Q, &x(false), &h0(), &lim()).unwrap();
        assert_eq!(q.dim(), 3);
        let iso = eval_functor(FunctorKind::Iso, &x(false), &h0(), &lim()).unwrap();
        assert_eq!(iso.dim(), 2);
        let iso = eval_functor(FunctorKind::Iso, &h0(), &x(false), &lim()).unwrap();
        assert_eq!(iso.dim(), 0);
        for xx in [h0(), h1(), x(true)] {
            let q = eval_functor(FunctorKind::Q, &QuadSpace::zero(), &xx, &lim()).unwrap();
            let iso = eval_functor(FunctorKind::Iso, &QuadSpace::zero(), &xx, &lim()).unwrap();
            assert_eq!((q.dim(), iso.dim()), (1, 1));
        }
    }

    #[test]
    fn isotropic_cone_counts() {
        // iso_(x,0)(V) has basis the nonzero isotropic vectors of V.
        for v in [h0(), h1(), h0().power(2), h1().orthogonal_sum(&h0())] {
            let cone = (1..1u64 << v.dim()).filter(|&w| !v.q_bits(w)).count();
            let iso = eval_functor(FunctorKind::Iso, &x(false), &v, &lim()).unwrap();
            assert_eq!(iso.dim(), cone);
        }
    }

    #[test]
    fn algebra_unit_and_idempotents() {
        let v = h0();
        let one = AlgebraElement::one(&v);
        let subs: Vec<Subspace> = (0..=2).flat_map(|k| subspaces_of_dim(2, k)).collect();
        for a in &subs {
            let u = one_plus_e(&v, a);
            assert_eq!(algebra_mul(&one, &u).unwrap(), u);
            assert_eq!(algebra_mul(&u, &u).unwrap(), u);
            for b in &subs {
                let w = one_plus_e(&v, b);
                assert_eq!(algebra_mul(&u, &w).unwrap(), algebra_mul(&w, &u).unwrap());
            }
        }
    }

    #[test]
    fn big_e_small_cases() {
        assert_eq!(
            big_e(&QuadSpace::zero(), &lim()).unwrap(),
            AlgebraElement::one(&QuadSpace::zero())
        );
        let e = big_e(&x(false), &lim()).unwrap();
        assert_eq!(e, one_plus_e(&x(false), &Subspace::zero(1)));
        for v in [x(false), x(true), h0(), h1(), x(false).power(2)] {
            let e = big_e(&v, &lim()).unwrap();
            assert_eq!(algebra_mul(&e, &e).unwrap(), e);
        }
    }

    #[test]
    fn action_is_multiplicative() {
        let v = h0();
        let q = eval_functor(FunctorKind::Q, &x(false), &v, &lim()).unwrap();
        let one = AlgebraElement::one(&v);
        assert_eq!(act(&q, &one).unwrap(), BitMatrix::identity(q.dim()));
        let ends = enumerate_span_homs(&v, &v, &lim()).unwrap();
        for a in ends.iter().step_by(3) {
            for b in ends.iter().step_by(5) {
                let ea = AlgebraElement::from_morphism(a).unwrap();
                let eb = AlgebraElement::from_morphism(b).unwrap();
                let ab = algebra_mul(&ea, &eb).unwrap();
                let lhs = act(&q, &ab).unwrap();
                let rhs = act(&q, &ea).unwrap().mul(&act(&q, &eb).unwrap()).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn proper_idempotents_kill_iso() {
        let iso = eval_functor(FunctorKind::Iso, &h0(), &h0(), &lim()).unwrap();
        for a in subspaces_of_dim(2, 1) {
            let e = AlgebraElement::from_morphism(&e_alpha(&h0(), &a).unwrap()).unwrap();
            assert!(act(&iso, &e).unwrap().is_zero());
        }
    }

    #[test]
    fn rank_identities() {
        for v in [x(false), x(true), h0(), h1()] {
            let e = big_e(&v, &lim()).unwrap();
            let one_plus = AlgebraElement::one(&v).add(&e).unwrap();
            for xx in [x(false), h0(), h1(), h0().orthogonal_sum(&x(true))] {
                let q = eval_functor(FunctorKind::Q, &v, &xx, &lim()).unwrap();
                let iso = eval_functor(FunctorKind::Iso, &v, &xx, &lim()).unwrap();
                let k = eval_functor(FunctorKind::K, &v, &xx, &lim()).unwrap();
                assert_eq!(act_right(&q, &e).unwrap().rank(), iso.dim());
                assert_eq!(act_right(&q, &one_plus).unwrap().rank(), k.dim());
            }
        }
    }

    #[test]
    fn hom_iso_dims() {
        assert_eq!(hom_iso_dim(&h0(), &h0(), &lim()).unwrap(), 2);
        assert_eq!(hom_iso_dim(&h1(), &h1(), &lim()).unwrap(), 6);
        assert_eq!(hom_iso_dim(&h0(), &h1(), &lim()).unwrap(), 0);
        assert_eq!(hom_iso_dim(&h0(), &x(false), &lim()).unwrap(), 0);
        assert_eq!(hom_iso_dim(&x(false), &h0(), &lim()).unwrap(), 0);
        assert_eq!(
            hom_iso_dim(&QuadSpace::zero(), &QuadSpace::zero(), &lim()).unwrap(),
            1
        );
    }

    #[test]
    fn decomposition_small_cases() {
        let r = decomposition_check(&x(false), &h0(), &lim()).unwrap();
        assert_eq!((r.dim_q, r.sum_iso), (3, 3));
        assert!(r.holds(), "{r:?}");
        let r = decomposition_check(&QuadSpace::zero(), &h1(), &lim()).unwrap();
        assert_eq!(r.dim_q, 1);
        assert!(r.holds());
        let r = decomposition_check(&h0(), &h0(), &lim()).unwrap();
        assert_eq!(r.summands.len(), 5);
        assert!(r.holds(), "{r:?}");
    }

    #[test]
    fn k_is_stable_and_action_functorial() {
        let objs = [x(false), x(true), h0()];
        for v in &objs {
            for a in &objs {
                for b in &objs {
                    for kind in [FunctorKind::Q, FunctorKind::Iso, FunctorKind::K] {
                        let fa = eval_functor(kind, v, a, &lim()).unwrap();
                        let fb = eval_functor(kind, v, b, &lim()).unwrap();
                        for u in enumerate_span_homs(a, b, &lim()).unwrap() {
                            act_morphism(&fa, &fb, &u).unwrap();
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn pairing() {
        for v in [x(false), x(true), h0(), h1()] {
            assert!(self_duality_check(&v, &lim()).unwrap());
        }
        let m = a_v_matrix(&h0(), &x(false), &lim()).unwrap();
        assert!(m.is_zero());
        let m = a_v_matrix(&h0(), &h0(), &lim()).unwrap();
        assert_eq!(m.rank(), 2);
    }
}
