//! The span category of possibly degenerate quadratic spaces.
//!
//! A span `[V ← D → W]` with injective form-preserving legs is determined, up
//! to isomorphism of `D`, by its relation `{(f(d), g(d))} ⊆ V ⊕ W`. That
//! relation in echelon form is the canonical representative used here. In
//! `V ⊕ W` the coordinates of `V` come first.

use std::fmt;

use crate::error::{Error, Result};
use crate::f2::{enumerate_subspaces, low_mask, BitMatrix, Subspace, MAX_DIM};
use crate::qmorph::{enumerate_homs_unbounded, QuadMap};
use crate::quadform::{combine, QuadSpace};
use crate::Limits;

/// A morphism `V → W` of the span category, in canonical form.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SpanMorphism {
    dom: QuadSpace,
    cod: QuadSpace,
    rel: Subspace,
}

impl SpanMorphism {
    /// Validates a relation subspace of `dom ⊕ cod`.
    pub fn from_relation(dom: QuadSpace, cod: QuadSpace, rel: Subspace) -> Result<Self> {
        let n = dom.dim();
        if rel.ambient_dim() != n + cod.dim() {
            return Err(Error::DimensionMismatch(format!(
                "relation lives in dimension {}, expected {}",
                rel.ambient_dim(),
                n + cod.dim()
            )));
        }
        let s = Self { dom, cod, rel };
        let (left, right) = s.leg_images();
        let k = s.rel.dim();
        if Subspace::from_spanning(n, left.iter().copied()).dim() != k
            || Subspace::from_spanning(s.cod.dim(), right.iter().copied()).dim() != k
        {
            return Err(Error::InvalidMorphism(
                "relation projections are not injective".into(),
            ));
        }
        if s.dom.restrict(&left) != s.cod.restrict(&right) {
            return Err(Error::InvalidMorphism(
                "relation does not match the two quadratic forms".into(),
            ));
        }
        Ok(s)
    }

    pub(crate) fn from_relation_unchecked(dom: QuadSpace, cod: QuadSpace, rel: Subspace) -> Self {
        Self { dom, cod, rel }
    }

    pub fn identity(space: &QuadSpace) -> Self {
        e_alpha(space, &Subspace::full(space.dim())).expect("full subspace of the space")
    }

    /// The span through the zero space.
    pub fn zero(dom: &QuadSpace, cod: &QuadSpace) -> Self {
        Self::from_relation_unchecked(
            dom.clone(),
            cod.clone(),
            Subspace::zero(dom.dim() + cod.dim()),
        )
    }

    /// The graph `[V ← V → W]` of a morphism.
    pub fn graph(f: &QuadMap) -> Self {
        canonicalize_span(&QuadMap::identity(f.dom()), f).expect("legs share the domain")
    }

    pub fn dom(&self) -> &QuadSpace {
        &self.dom
    }

    pub fn cod(&self) -> &QuadSpace {
        &self.cod
    }

    pub fn relation(&self) -> &Subspace {
        &self.rel
    }

    /// Dimension of the middle object.
    pub fn middle_dim(&self) -> usize {
        self.rel.dim()
    }

    /// Images of the relation basis in `dom` and in `cod`.
    fn leg_images(&self) -> (Vec<u64>, Vec<u64>) {
        let n = self.dom.dim();
        let mask = low_mask(n);
        self.rel
            .basis_bits()
            .iter()
            .map(|&r| (r & mask, r >> n))
            .unzip()
    }

    /// A representative `[V ← D → W]`, with `D` in the echelon basis of the
    /// relation and the form induced from `V`.
    pub fn legs(&self) -> (QuadMap, QuadMap) {
        let (left, right) = self.leg_images();
        let middle = self.dom.restrict(&left);
        (
            QuadMap::from_images_unchecked(middle.clone(), self.dom.clone(), &left),
            QuadMap::from_images_unchecked(middle, self.cod.clone(), &right),
        )
    }

    /// The middle object with its form.
    pub fn middle(&self) -> QuadSpace {
        self.dom.restrict(&self.leg_images().0)
    }

    /// Whether the left leg is bijective, i.e. `D ≅ V`.
    pub fn is_full(&self) -> bool {
        self.rel.dim() == self.dom.dim()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &SpanMorphism) -> Result<SpanMorphism> {
        compose_spans(self, other)
    }
}

impl fmt::Debug for SpanMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "Span({} -> {}; {:?})",
            self.dom.iso_class(),
            self.cod.iso_class(),
            self.rel
        )
    }
}

/// Canonical form of `[V ←f D →g W]`.
pub fn canonicalize_span(f: &QuadMap, g: &QuadMap) -> Result<SpanMorphism> {
    if f.dom() != g.dom() {
        return Err(Error::ObjectMismatch(
            "span legs have different domains".into(),
        ));
    }
    let n = f.cod().dim();
    if n + g.cod().dim() > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: n + g.cod().dim(),
            max: MAX_DIM,
        });
    }
    let rel = Subspace::from_spanning(
        n + g.cod().dim(),
        f.images()
            .iter()
            .zip(g.images())
            .map(|(&a, &b)| a | (b << n)),
    );
    Ok(SpanMorphism::from_relation_unchecked(
        f.cod().clone(),
        g.cod().clone(),
        rel,
    ))
}

/// `s2 ∘ s1` for `s1: V → W` and `s2: W → Y`, through the pullback over `W`.
pub fn compose_spans(s1: &SpanMorphism, s2: &SpanMorphism) -> Result<SpanMorphism> {
    if s1.cod != s2.dom {
        return Err(Error::ObjectMismatch(
            "codomain of the first span differs from the domain of the second".into(),
        ));
    }
    Ok(compose_unchecked(s1, s2))
}

pub(crate) fn compose_unchecked(s1: &SpanMorphism, s2: &SpanMorphism) -> SpanMorphism {
    let (v1, w1) = s1.leg_images();
    let (w2, y2) = s2.leg_images();
    let d1 = v1.len();
    let n = s1.dom.dim();
    // Pairs of coefficient vectors with matching images in W.
    let mut cols = w1.clone();
    cols.extend(&w2);
    let kernel = BitMatrix::from_cols(s1.cod.dim(), &cols).kernel();
    let rel = Subspace::from_spanning(
        n + s2.cod.dim(),
        kernel.basis_bits().iter().map(|&c| {
            let v = combine(&v1, c & low_mask(d1));
            let y = combine(&y2, c >> d1);
            v | (y << n)
        }),
    );
    SpanMorphism::from_relation_unchecked(s1.dom.clone(), s2.cod.clone(), rel)
}

/// `[W ← D → V]` from `[V ← D → W]`.
pub fn transpose_span(s: &SpanMorphism) -> SpanMorphism {
    let (left, right) = s.leg_images();
    let m = s.cod.dim();
    let rel = Subspace::from_spanning(
        m + s.dom.dim(),
        right.iter().zip(&left).map(|(&w, &v)| w | (v << m)),
    );
    SpanMorphism::from_relation_unchecked(s.cod.clone(), s.dom.clone(), rel)
}

/// `s1 ⊥ s2 : V₁ ⊥ V₂ → W₁ ⊥ W₂`.
pub fn span_orthogonal_sum(s1: &SpanMorphism, s2: &SpanMorphism) -> SpanMorphism {
    let (v1, w1) = s1.leg_images();
    let (v2, w2) = s2.leg_images();
    let (n1, n2, m1) = (s1.dom.dim(), s2.dom.dim(), s1.cod.dim());
    let n = n1 + n2;
    let first = v1.iter().zip(&w1).map(|(&v, &w)| v | (w << n));
    let second = v2
        .iter()
        .zip(&w2)
        .map(|(&v, &w)| (v << n1) | (w << (n + m1)));
    let rel = Subspace::from_spanning(n + m1 + s2.cod.dim(), first.chain(second));
    SpanMorphism::from_relation_unchecked(
        s1.dom.orthogonal_sum(&s2.dom),
        s1.cod.orthogonal_sum(&s2.cod),
        rel,
    )
}

/// The idempotent `e_A = [V ← A → V]` with both legs the inclusion of `A`.
pub fn e_alpha(space: &QuadSpace, sub: &Subspace) -> Result<SpanMorphism> {
    let n = space.dim();
    if sub.ambient_dim() != n {
        return Err(Error::DimensionMismatch(format!(
            "subspace of dimension {} space used in a space of dimension {n}",
            sub.ambient_dim()
        )));
    }
    let rel = Subspace::from_spanning(2 * n, sub.basis_bits().iter().map(|&a| a | (a << n)));
    Ok(SpanMorphism::from_relation_unchecked(
        space.clone(),
        space.clone(),
        rel,
    ))
}

/// Every morphism `V → W`, grouped by the image `A` of the left leg (in
/// subspace order) and then by the map `A → W` (in Hom order).
pub fn enumerate_span_homs(
    v: &QuadSpace,
    w: &QuadSpace,
    limits: &Limits,
) -> Result<Vec<SpanMorphism>> {
    limits.check_enum("span enumeration", v.dim() + w.dim())?;
    Ok(span_homs_unbounded(v, w))
}

pub(crate) fn span_homs_unbounded(v: &QuadSpace, w: &QuadSpace) -> Vec<SpanMorphism> {
    let n = v.dim();
    let mut out = Vec::new();
    let subspaces = enumerate_subspaces(n, n).expect("bound equals dimension");
    for a in subspaces {
        if a.dim() > w.dim() {
            continue;
        }
        let middle = v.restrict_to(&a);
        for h in enumerate_homs_unbounded(&middle, w) {
            let rel = Subspace::from_spanning(
                n + w.dim(),
                a.basis_bits()
                    .iter()
                    .zip(h.images())
                    .map(|(&x, &y)| x | (y << n)),
            );
            out.push(SpanMorphism::from_relation_unchecked(
                v.clone(),
                w.clone(),
                rel,
            ));
        }
    }
    out
}

/// The idempotents of `End(V)`, found by filtering all endomorphisms.
pub fn enumerate_idempotents(v: &QuadSpace, limits: &Limits) -> Result<Vec<SpanMorphism>> {
    Ok(enumerate_span_homs(v, v, limits)?
        .into_iter()
        .filter(|s| compose_unchecked(s, s) == *s)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::f2::subspaces_of_dim;
    use crate::qmorph::enumerate_homs;

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
    fn objects() -> Vec<QuadSpace> {
        vec![x(false), x(true), h0()]
    }

    #[test]
    fn identity_is_diagonal() {
        let id = SpanMorphism::identity(&h0());
        assert_eq!(id.relation(), &Subspace::from_spanning(4, [0b0101, 0b1010]));
        let f = QuadMap::identity(&h0());
        assert_eq!(canonicalize_span(&f, &f).unwrap(), id);
    }

    #[test]
    fn line_through_a0() {
        let f = QuadMap::from_images(x(false), h0(), &[0b01]).unwrap();
        let s = canonicalize_span(&f, &f).unwrap();
        assert_eq!(s.relation(), &Subspace::from_spanning(4, [0b0101]));
    }

    #[test]
    fn canonical_form_ignores_middle_automorphisms() {
        for d in [x(false), h0(), h1(), x(false).power(2)] {
            for v in [h0().orthogonal_sum(&x(false)), h0().power(2)] {
                let homs = enumerate_homs(&d, &v, &lim()).unwrap();
                let group = crate::qmorph::orthogonal_group(&d, &lim()).unwrap();
                for f in homs.iter().take(6) {
                    for g in homs.iter().take(6) {
                        let base = canonicalize_span(f, g).unwrap();
                        for a in &group {
                            let moved =
                                canonicalize_span(&f.compose(a).unwrap(), &g.compose(a).unwrap())
                                    .unwrap();
                            assert_eq!(moved, base);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn mismatched_legs_rejected() {
        let f = QuadMap::identity(&h0());
        let g = QuadMap::identity(&h1());
        assert!(canonicalize_span(&f, &g).is_err());
    }

    #[test]
    fn from_relation_validates() {
        // (a0, a1): q = 0 on the left but 1 on the right.
        let rel = Subspace::from_spanning(4, [0b0101]);
        assert!(SpanMorphism::from_relation(h0(), h1(), rel).is_err());
        // Not injective on the left.
        let rel = Subspace::from_spanning(2, [0b10]);
        assert!(SpanMorphism::from_relation(x(false), x(false), rel).is_err());
        let rel = Subspace::from_spanning(2, [0b11]);
        assert!(SpanMorphism::from_relation(x(false), x(false), rel).is_ok());
    }

    #[test]
    fn hom_counts() {
        assert_eq!(
            enumerate_span_homs(&x(false), &x(false), &lim())
                .unwrap()
                .len(),
            2
        );
        assert_eq!(
            enumerate_span_homs(&QuadSpace::zero(), &h0(), &lim())
                .unwrap()
                .len(),
            1
        );
        assert_eq!(
            enumerate_span_homs(&x(false), &h0(), &lim()).unwrap().len(),
            3
        );
    }

    #[test]
    fn enumeration_matches_subspace_filter() {
        // Oracle: every subspace of V ⊕ W that passes validation.
        for v in objects() {
            for w in objects() {
                let mut fast = enumerate_span_homs(&v, &w, &lim()).unwrap();
                let mut slow: Vec<SpanMorphism> = enumerate_subspaces(v.dim() + w.dim(), 8)
                    .unwrap()
                    .into_iter()
                    .filter_map(|r| SpanMorphism::from_relation(v.clone(), w.clone(), r).ok())
                    .collect();
                fast.sort();
                slow.sort();
                assert_eq!(fast, slow, "{v:?} -> {w:?}");
            }
        }
    }

    #[test]
    fn identity_is_neutral_and_zero_absorbs() {
        for v in objects() {
            for w in objects() {
                for s in enumerate_span_homs(&v, &w, &lim()).unwrap() {
                    assert_eq!(compose_spans(&SpanMorphism::identity(&v), &s).unwrap(), s);
                    assert_eq!(compose_spans(&s, &SpanMorphism::identity(&w)).unwrap(), s);
                    let z = SpanMorphism::zero(&w, &v);
                    assert!(compose_spans(&s, &z).unwrap().relation().is_zero());
                }
            }
        }
    }

    #[test]
    fn composition_is_associative() {
        let objs = objects();
        let homs = |a: &QuadSpace, b: &QuadSpace| enumerate_span_homs(a, b, &lim()).unwrap();
        for a in &objs {
            for b in &objs {
                for c in &objs {
                    for d in &objs {
                        for s in homs(a, b) {
                            for t in homs(b, c) {
                                let st = compose_spans(&s, &t).unwrap();
                                for u in homs(c, d) {
                                    let left = compose_spans(&st, &u).unwrap();
                                    let right =
                                        compose_spans(&s, &compose_spans(&t, &u).unwrap()).unwrap();
                                    assert_eq!(left, right);
                                }
                            }
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transposition_is_involutive_and_contravariant() {
        let objs = objects();
        for a in &objs {
            for b in &objs {
                for s in enumerate_span_homs(a, b, &lim()).unwrap() {
                    assert_eq!(transpose_span(&transpose_span(&s)), s);
                    for c in &objs {
                        for t in enumerate_span_homs(b, c, &lim()).unwrap() {
                            let lhs = transpose_span(&compose_spans(&s, &t).unwrap());
                            let rhs =
                                compose_spans(&transpose_span(&t), &transpose_span(&s)).unwrap();
                            assert_eq!(lhs, rhs);
                        }
                    }
                }
            }
        }
        let id = SpanMorphism::identity(&h0());
        assert_eq!(transpose_span(&id), id);
    }

    #[test]
    fn orthogonal_sum_laws() {
        let zero = QuadSpace::zero();
        let id0 = SpanMorphism::identity(&zero);
        let objs = [x(false), x(true)];
        for a in &objs {
            for b in &objs {
                for s in enumerate_span_homs(a, b, &lim()).unwrap() {
                    assert_eq!(span_orthogonal_sum(&s, &id0), s);
                    for t in enumerate_span_homs(b, a, &lim()).unwrap() {
                        for u in enumerate_span_homs(b, b, &lim()).unwrap() {
                            for v in enumerate_span_homs(b, a, &lim()).unwrap() {
                                let lhs = compose_spans(
                                    &span_orthogonal_sum(&s, &u),
                                    &span_orthogonal_sum(&t, &v),
                                )
                                .unwrap();
                                let rhs = span_orthogonal_sum(
                                    &compose_spans(&s, &t).unwrap(),
                                    &compose_spans(&u, &v).unwrap(),
                                );
                                assert_eq!(lhs, rhs);
                            }
                        }
                    }
                }
            }
        }
        let sum = span_orthogonal_sum(
            &SpanMorphism::identity(&h0()),
            &SpanMorphism::identity(&h1()),
        );
        assert_eq!(sum, SpanMorphism::identity(&h0().orthogonal_sum(&h1())));
    }

    #[test]
    fn idempotents_are_diagonals() {
        for v in [x(false), x(true), h0(), h1()] {
            let mut found = enumerate_idempotents(&v, &lim()).unwrap();
            let mut built: Vec<SpanMorphism> = enumerate_subspaces(v.dim(), 8)
                .unwrap()
                .iter()
                .map(|a| e_alpha(&v, a).unwrap())
                .collect();
            found.sort();
            built.sort();
            assert_eq!(found, built);
        }
        assert_eq!(enumerate_idempotents(&x(false), &lim()).unwrap().len(), 2);
        assert_eq!(enumerate_idempotents(&h0(), &lim()).unwrap().len(), 5);
    }

    #[test]
    fn idempotents_on_h0_commute() {
        let subs: Vec<Subspace> = (0..=2).flat_map(|k| subspaces_of_dim(2, k)).collect();
        for a in &subs {
            let ea = e_alpha(&h0(), a).unwrap();
            assert_eq!(compose_spans(&ea, &ea).unwrap(), ea);
            for b in &subs {
                let eb = e_alpha(&h0(), b).unwrap();
                assert_eq!(
                    compose_spans(&ea, &eb).unwrap(),
                    compose_spans(&eb, &ea).unwrap()
                );
            }
        }
    }

    #[test]
    fn graphs_compose_like_maps() {
        let v = h0().orthogonal_sum(&x(false));
        for f in enumerate_homs(&x(false), &h0(), &lim()).unwrap() {
            for g in enumerate_homs(&h0(), &v, &lim())
                .unwrap()
                .into_iter()
                .take(10)
            {
                let lhs =
                    compose_spans(&SpanMorphism::graph(&f), &SpanMorphism::graph(&g)).unwrap();
                assert_eq!(lhs, SpanMorphism::graph(&g.compose(&f).unwrap()));
            }
        }
    }
}
