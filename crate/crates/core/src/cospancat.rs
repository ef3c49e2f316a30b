//! The cospan category of non-degenerate quadratic spaces.
//!
//! Morphisms are represented by concrete cospans `[V → X ← W]`; composition
//! goes through the pseudo push-out. Two functors leave the category: `ε`,
//! which forgets forms and projects, and `σ`, which takes the pullback span.
//! Both are full and both lifts are constructive here.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::f2::{low_mask, subspaces_of_dim, BitMatrix, Subspace, MAX_DIM};
use crate::qmorph::{
    adapted_inverse, complement_unchecked, orthogonal_projection, search_extensions, QuadMap,
};
use crate::quadform::{combine, QuadSpace};
use crate::spancat::SpanMorphism;

/// A cospan `[V → X ← W]` of non-degenerate spaces.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Cospan {
    left: QuadMap,
    right: QuadMap,
}

impl Cospan {
    /// Checks that the legs share the apex and that all three spaces are
    /// non-degenerate.
    pub fn new(left: QuadMap, right: QuadMap) -> Result<Self> {
        if left.cod() != right.cod() {
            return Err(Error::ObjectMismatch(
                "cospan legs have different codomains".into(),
            ));
        }
        left.dom().require_nondegenerate("cospan source")?;
        right.dom().require_nondegenerate("cospan target")?;
        left.cod().require_nondegenerate("cospan apex")?;
        Ok(Self { left, right })
    }

    pub(crate) fn new_unchecked(left: QuadMap, right: QuadMap) -> Self {
        debug_assert_eq!(left.cod(), right.cod());
        Self { left, right }
    }

    /// `[V → V ← V]`.
    pub fn identity(space: &QuadSpace) -> Result<Self> {
        let id = QuadMap::identity(space);
        Self::new(id.clone(), id)
    }

    /// `[V →f W ← W]`, the image of a morphism of non-degenerate spaces.
    pub fn from_map(f: &QuadMap) -> Result<Self> {
        Self::new(f.clone(), QuadMap::identity(f.cod()))
    }

    pub fn dom(&self) -> &QuadSpace {
        self.left.dom()
    }

    pub fn cod(&self) -> &QuadSpace {
        self.right.dom()
    }

    pub fn apex(&self) -> &QuadSpace {
        self.left.cod()
    }

    pub fn left(&self) -> &QuadMap {
        &self.left
    }

    pub fn right(&self) -> &QuadMap {
        &self.right
    }
}

impl fmt::Debug for Cospan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Cospan")
            .field("left", &self.left)
            .field("right", &self.right)
            .finish()
    }
}

/// `W ⊥_V X = V ⊥ V′ ⊥ V″` with its two inclusions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PseudoPushout {
    pub total: QuadSpace,
    pub incl_w: QuadMap,
    pub incl_x: QuadMap,
}

/// Pseudo push-out of `f: V → W` and `g: V → X`.
///
/// `W` is identified with `V ⊥ V′` through the basis made of `f(e_i)`
/// followed by the echelon basis of `V′ = f(V)^⊥`, and likewise for `X`.
pub fn pseudo_pushout(f: &QuadMap, g: &QuadMap) -> Result<PseudoPushout> {
    if f.dom() != g.dom() {
        return Err(Error::ObjectMismatch(
            "pseudo push-out of maps with different sources".into(),
        ));
    }
    f.dom().require_nondegenerate("pseudo push-out base")?;
    f.cod()
        .require_nondegenerate("pseudo push-out first codomain")?;
    g.cod()
        .require_nondegenerate("pseudo push-out second codomain")?;
    Ok(pushout_unchecked(f, g))
}

pub(crate) fn pushout_unchecked(f: &QuadMap, g: &QuadMap) -> PseudoPushout {
    let k = f.dom().dim();
    let cw = complement_unchecked(f);
    let cx = complement_unchecked(g);
    let d1 = cw.space.dim();
    let total = f.dom().orthogonal_sum(&cw.space).orthogonal_sum(&cx.space);
    let inv_w = adapted_inverse(f, &cw);
    let inv_x = adapted_inverse(g, &cx);
    let incl_w: Vec<u64> = (0..f.cod().dim()).map(|j| inv_w.col_bits(j)).collect();
    let incl_x: Vec<u64> = (0..g.cod().dim())
        .map(|j| {
            let c = inv_x.col_bits(j);
            (c & low_mask(k)) | ((c >> k) << (k + d1))
        })
        .collect();
    PseudoPushout {
        incl_w: QuadMap::from_images_unchecked(f.cod().clone(), total.clone(), &incl_w),
        incl_x: QuadMap::from_images_unchecked(g.cod().clone(), total.clone(), &incl_x),
        total,
    }
}

/// `t2 ∘ t1` for `t1: V → W` and `t2: W → Y`.
pub fn compose_cospans(t1: &Cospan, t2: &Cospan) -> Result<Cospan> {
    if t1.cod() != t2.dom() {
        return Err(Error::ObjectMismatch(
            "target of the first cospan differs from the source of the second".into(),
        ));
    }
    let p = pushout_unchecked(&t1.right, &t2.left);
    Ok(Cospan::new_unchecked(
        p.incl_w.compose(&t1.left)?,
        p.incl_x.compose(&t2.right)?,
    ))
}

/// `[W → X ← V]` from `[V → X ← W]`.
pub fn transpose_cospan(t: &Cospan) -> Cospan {
    Cospan::new_unchecked(t.right.clone(), t.left.clone())
}

/// `t1 ⊥ t2` with apex `X₁ ⊥ X₂`.
pub fn cospan_orthogonal_sum(t1: &Cospan, t2: &Cospan) -> Cospan {
    Cospan::new_unchecked(
        t1.left.orthogonal_sum(&t2.left),
        t1.right.orthogonal_sum(&t2.right),
    )
}

/// `ε(t) = p_right ∘ left`, a `cod.dim × dom.dim` matrix.
pub fn epsilon(t: &Cospan) -> BitMatrix {
    let p = orthogonal_projection(&t.right).expect("cospan spaces are non-degenerate");
    let cols: Vec<u64> = t.left.images().iter().map(|&x| p.apply(x)).collect();
    BitMatrix::from_cols(t.cod().dim(), &cols)
}

/// A cospan `t` with `ε(t) = f` for an arbitrary linear map `f: V → W`.
///
/// The apex is `W ⊥ Y`, where `Y` grows by `H0^k ⊥ H0^k ⊥ H1 ⊥ H0` when
/// the `k+1`-st symplectic pair of `V` is treated. The right leg is the
/// inclusion of `W`.
pub fn epsilon_lift(f: &BitMatrix, v: &QuadSpace, w: &QuadSpace) -> Result<Cospan> {
    v.require_nondegenerate("lift source")?;
    w.require_nondegenerate("lift target")?;
    if f.rows() != w.dim() || f.cols() != v.dim() {
        return Err(Error::DimensionMismatch(format!(
            "map is {}x{}, expected {}x{}",
            f.rows(),
            f.cols(),
            w.dim(),
            v.dim()
        )));
    }
    let basis: Vec<u64> = (0..v.dim()).map(|i| 1u64 << i).collect();
    let pairs = v.symplectic_pairs(&basis)?;
    let m = w.dim();
    let apex_dim = m + 2 * pairs.len() * (pairs.len() + 1);
    if apex_dim > MAX_DIM {
        return Err(Error::DimensionTooLarge {
            dim: apex_dim,
            max: MAX_DIM,
        });
    }
    let fa: Vec<u64> = pairs.iter().map(|&(a, _)| f.apply(a)).collect();
    let fb: Vec<u64> = pairs.iter().map(|&(_, b)| f.apply(b)).collect();

    let mut apex = w.clone();
    // Images of a_1, b_1, a_2, b_2, ... in the apex.
    let mut images: Vec<u64> = Vec::with_capacity(v.dim());
    for (k, &(a, b)) in pairs.iter().enumerate() {
        let base = apex.dim();
        let lower = |i: usize| 1u64 << (base + 2 * i);
        let upper = |i: usize| 1u64 << (base + 2 * k + 2 * i);
        let big_a1 = 1u64 << (base + 4 * k);
        let c0 = 1u64 << (base + 4 * k + 2);
        let d0 = c0 << 1;
        apex = apex
            .orthogonal_sum(&QuadSpace::h0().power(2 * k))
            .orthogonal_sum(&QuadSpace::h1())
            .orthogonal_sum(&QuadSpace::h0());
        for i in 0..k {
            images[2 * i] |= lower(i);
            images[2 * i + 1] |= upper(i);
        }
        let correction = |x: u64, fx: u64| {
            if v.q_bits(x) != w.q_bits(fx) {
                big_a1
            } else {
                0
            }
        };
        let mut ga = fa[k] | correction(a, fa[k]) | c0;
        let mut gb = fb[k] | correction(b, fb[k]);
        if !w.b_bits(fa[k], fb[k]) {
            gb |= d0;
        }
        for i in 0..k {
            if w.b_bits(fa[i], fa[k]) {
                ga |= lower(i) << 1;
            }
            if w.b_bits(fb[i], fa[k]) {
                ga |= upper(i) << 1;
            }
            if w.b_bits(fa[i], fb[k]) {
                gb |= lower(i) << 1;
            }
            if w.b_bits(fb[i], fb[k]) {
                gb |= upper(i) << 1;
            }
        }
        images.push(ga);
        images.push(gb);
    }
    // Back to the standard basis of V.
    let sympl: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let to_sympl = BitMatrix::from_cols(v.dim(), &sympl)
        .inverse()
        .expect("a symplectic basis is a basis");
    let left: Vec<u64> = (0..v.dim())
        .map(|j| combine(&images, to_sympl.col_bits(j)))
        .collect();
    let incl: Vec<u64> = (0..m).map(|i| 1u64 << i).collect();
    let left = QuadMap::from_images(v.clone(), apex.clone(), &left)?;
    let right = QuadMap::from_images_unchecked(w.clone(), apex, &incl);
    Ok(Cospan::new_unchecked(left, right))
}

/// `σ(t) = [V ← V ×_X W → W]`: the relation `{(v, w) | left(v) = right(w)}`.
pub fn sigma(t: &Cospan) -> SpanMorphism {
    let mut cols = t.left.images().to_vec();
    cols.extend(t.right.images());
    let rel = BitMatrix::from_cols(t.apex().dim(), &cols).kernel();
    SpanMorphism::from_relation_unchecked(t.dom().clone(), t.cod().clone(), rel)
}

/// Output of [`complete_to_planes`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PlaneCompletion {
    /// `kᵢ` with `B(f(xᵢ), kᵢ) = 1`, one per basis vector of the domain.
    pub partners: Vec<u64>,
    /// `H′`, orthogonal to every plane `Vect(f(xᵢ), kᵢ)`.
    pub rest: Subspace,
}

/// For `f: D → H` with `D` carrying the zero polar form and `H`
/// non-degenerate, finds `k₁, …, k_r` with
/// `H = Vect(f(x₁), k₁) ⊥ … ⊥ Vect(f(x_r), k_r) ⊥ H′`.
pub fn complete_to_planes(f: &QuadMap) -> Result<PlaneCompletion> {
    if !f.dom().radical().is_full() {
        return Err(Error::InvalidMorphism(
            "plane completion needs a domain with zero polar form".into(),
        ));
    }
    f.cod().require_nondegenerate("plane completion target")?;
    let all: Vec<u64> = (0..f.cod().dim()).map(|i| 1u64 << i).collect();
    Ok(planes_within(f.cod(), &all, f.images()))
}

/// Plane completion inside the non-degenerate span of `within`, for
/// independent, pairwise orthogonal `images` lying in it.
fn planes_within(space: &QuadSpace, within: &[u64], images: &[u64]) -> PlaneCompletion {
    let mut partners: Vec<u64> = Vec::with_capacity(images.len());
    let mut rest = Subspace::from_spanning(space.dim(), within.iter().copied());
    for (n, &h) in images.iter().enumerate() {
        let alpha: Vec<bool> = partners.iter().map(|&k| space.b_bits(h, k)).collect();
        let h_rest = images[..n]
            .iter()
            .zip(&alpha)
            .filter(|(_, &a)| a)
            .fold(h, |acc, (&u, _)| acc ^ u);
        let k_new = rest
            .basis_bits()
            .iter()
            .copied()
            .find(|&c| space.b_bits(h_rest, c))
            .expect("the remaining space is non-degenerate and contains h");
        for (k, &a) in partners.iter_mut().zip(&alpha) {
            if a {
                *k ^= k_new;
            }
        }
        partners.push(k_new);
        rest = space.orthogonal_within(rest.basis_bits(), &[h_rest, k_new]);
    }
    PlaneCompletion { partners, rest }
}

/// A cospan `t` with `σ(t) = s`, for a span between non-degenerate spaces.
///
/// The middle object splits as `H ⊥ Rad`; each radical line together with
/// plane completions on both sides gives a span between planes, which is
/// moved to a fixed normal form by the first isometry (in Hom order) that
/// reaches it and then lifted by a fixed cospan.
pub fn sigma_lift(s: &SpanMorphism) -> Result<Cospan> {
    let v = s.dom();
    let w = s.cod();
    v.require_nondegenerate("span source")?;
    w.require_nondegenerate("span target")?;
    let (f, g) = s.legs();
    let d = f.dom();
    let (pairs, radical, _) = d.decompose_bits();
    let h_basis: Vec<u64> = pairs.iter().flat_map(|&(a, b)| [a, b]).collect();
    let h_space = d.restrict(&h_basis);
    let fh: Vec<u64> = h_basis.iter().map(|&x| f.apply_bits(x)).collect();
    let gh: Vec<u64> = h_basis.iter().map(|&x| g.apply_bits(x)).collect();
    let fx: Vec<u64> = radical.iter().map(|&x| f.apply_bits(x)).collect();
    let gx: Vec<u64> = radical.iter().map(|&x| g.apply_bits(x)).collect();

    let all_v: Vec<u64> = (0..v.dim()).map(|i| 1u64 << i).collect();
    let all_w: Vec<u64> = (0..w.dim()).map(|i| 1u64 << i).collect();
    let v1 = v.orthogonal_within(&all_v, &fh);
    let w1 = w.orthogonal_within(&all_w, &gh);
    let cv = planes_within(v, v1.basis_bits(), &fx);
    let cw = planes_within(w, w1.basis_bits(), &gx);

    struct Line {
        p: [u64; 2],
        q: [u64; 2],
        local: Cospan,
        phi_p: QuadMap,
        phi_q: QuadMap,
    }
    let mut lines: Vec<Line> = Vec::with_capacity(radical.len());
    for i in 0..radical.len() {
        let p = [fx[i], cv.partners[i]];
        let q = [gx[i], cw.partners[i]];
        let (local, phi_p, phi_q) = lift_line(&v.restrict(&p), &w.restrict(&q))?;
        lines.push(Line {
            p,
            q,
            local,
            phi_p,
            phi_q,
        });
    }
    lines.sort_by(|a, b| (a.local.dom(), a.local.cod()).cmp(&(b.local.dom(), b.local.cod())));

    let vp = v.restrict_to(&cv.rest);
    let wp = w.restrict_to(&cw.rest);
    let mut apex = h_space.orthogonal_sum(&vp).orthogonal_sum(&wp);
    let hd = h_space.dim();
    let mut src_v: Vec<u64> = fh.clone();
    let mut img_v: Vec<u64> = (0..hd).map(|j| 1u64 << j).collect();
    let mut src_w: Vec<u64> = gh.clone();
    let mut img_w: Vec<u64> = img_v.clone();
    for (j, &b) in cv.rest.basis_bits().iter().enumerate() {
        src_v.push(b);
        img_v.push(1u64 << (hd + j));
    }
    for (j, &b) in cw.rest.basis_bits().iter().enumerate() {
        src_w.push(b);
        img_w.push(1u64 << (hd + vp.dim() + j));
    }
    for line in &lines {
        let offset = apex.dim();
        apex = apex.orthogonal_sum(line.local.apex());
        for (e, &x) in line.p.iter().enumerate() {
            src_v.push(x);
            img_v.push(line.local.left.apply_bits(line.phi_p.apply_bits(1 << e)) << offset);
        }
        for (e, &y) in line.q.iter().enumerate() {
            src_w.push(y);
            img_w.push(line.local.right.apply_bits(line.phi_q.apply_bits(1 << e)) << offset);
        }
    }
    let left = in_standard_basis(v.dim(), &src_v, &img_v);
    let right = in_standard_basis(w.dim(), &src_w, &img_w);
    let left = QuadMap::from_images(v.clone(), apex.clone(), &left)?;
    let right = QuadMap::from_images(w.clone(), apex, &right)?;
    Ok(Cospan::new_unchecked(left, right))
}

/// Images of the standard basis for the linear map `src[i] ↦ img[i]`.
fn in_standard_basis(dim: usize, src: &[u64], img: &[u64]) -> Vec<u64> {
    let inv = BitMatrix::from_cols(dim, src)
        .inverse()
        .expect("adapted vectors form a basis");
    (0..dim).map(|j| combine(img, inv.col_bits(j))).collect()
}

/// Lifts `[P ← (x, ε) → Q]` where `P`, `Q` are planes given in a basis whose
/// first vector is the image of `x`. Returns the model cospan and the
/// isometries from `P` and `Q` to its ends.
fn lift_line(p: &QuadSpace, q: &QuadSpace) -> Result<(Cospan, QuadMap, QuadMap)> {
    let eps = p.q_bits(1);
    let p_arf = p.arf()?;
    let q_arf = q.arf()?;
    let h0 = QuadSpace::h0;
    let h1 = QuadSpace::h1;
    // Normal-form image of x: a0 in H0 when q(x) = 0, a0 + b0 in H0 and a1
    // in H1 when q(x) = 1.
    let target = |arf: bool| if !eps || arf { 0b01 } else { 0b11 };
    let map = |dom: QuadSpace, cod: QuadSpace, imgs: &[u64]| {
        QuadMap::from_images_unchecked(dom, cod, imgs)
    };
    let local = match (eps, p_arf, q_arf) {
        (false, false, false) => {
            let apex = h0().power(2);
            Cospan::new_unchecked(
                map(h0(), apex.clone(), &[0b0001, 0b0110]),
                map(h0(), apex, &[0b0001, 0b1010]),
            )
        }
        (true, false, false) => {
            let apex = h0().power(2);
            Cospan::new_unchecked(
                map(h0(), apex.clone(), &[0b0101, 0b0110]),
                map(h0(), apex, &[0b1001, 0b1010]),
            )
        }
        (true, true, true) => {
            let apex = h1().orthogonal_sum(&h0());
            Cospan::new_unchecked(
                map(h1(), apex.clone(), &[0b0001, 0b1010]),
                map(h1(), apex, &[0b0001, 0b0110]),
            )
        }
        (true, false, true) => mixed_line(),
        (true, true, false) => transpose_cospan(&mixed_line()),
        (false, _, _) => {
            return Err(Error::InvalidMorphism(
                "an isotropic line lies in an anisotropic plane".into(),
            ))
        }
    };
    let to_model = |plane: &QuadSpace, model: &QuadSpace, t: u64| -> Result<QuadMap> {
        let mut found = None;
        search_extensions(plane, model, &[(1, t)], |imgs| {
            found = Some(imgs.to_vec());
            false
        });
        let imgs = found.ok_or_else(|| {
            Error::InvalidMorphism("no isometry reaches the normal form of a line".into())
        })?;
        Ok(QuadMap::from_images_unchecked(
            plane.clone(),
            model.clone(),
            &imgs,
        ))
    };
    let phi_p = to_model(p, local.dom(), target(p_arf))?;
    let phi_q = to_model(q, local.cod(), target(q_arf))?;
    Ok((local, phi_p, phi_q))
}

/// `[H0 → H1 ⊥ H0 ← H1]` lifting the line through `a0 + b0` and `a1`.
fn mixed_line() -> Cospan {
    let apex = QuadSpace::h1().orthogonal_sum(&QuadSpace::h0());
    Cospan::new_unchecked(
        QuadMap::from_images_unchecked(QuadSpace::h0(), apex.clone(), &[0b1111, 0b1110]),
        QuadMap::from_images_unchecked(QuadSpace::h1(), apex, &[0b0001, 0b0010]),
    )
}

/// Answer of the bounded equivalence test.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equivalence {
    Equivalent,
    Distinct,
    Unknown,
}

impl fmt::Display for Equivalence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Equivalent => "equivalent",
            Self::Distinct => "distinct",
            Self::Unknown => "unknown",
        })
    }
}

/// Search limits for [`cospan_equiv`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivBudget {
    /// Apexes larger than `dom + cod + extra_apex` are not searched.
    pub extra_apex: usize,
    /// Maximal number of elementary moves in a connecting chain (1 to 3).
    pub layers: usize,
    /// Cap on the candidate sub-apexes tried per cospan.
    pub max_hulls: usize,
}

impl Default for EquivBudget {
    fn default() -> Self {
        Self {
            extra_apex: 4,
            layers: 3,
            max_hulls: 4096,
        }
    }
}

/// Sound, bounded test for the equivalence of two cospans.
///
/// An elementary move relates `[V → X₁ ← W]` and `[V → X₂ ← W]` when some
/// morphism `α: X₁ → X₂` carries the legs of the first onto those of the
/// second. Chains of up to three moves are tried, through the smallest
/// non-degenerate subspaces of the apexes that contain the legs. Differing
/// `σ` or `ε` images prove the cospans distinct.
pub fn cospan_equiv(t1: &Cospan, t2: &Cospan, budget: &EquivBudget) -> Result<Equivalence> {
    if t1.dom() != t2.dom() || t1.cod() != t2.cod() {
        return Err(Error::ObjectMismatch("cospans have different ends".into()));
    }
    if sigma(t1) != sigma(t2) || epsilon(t1) != epsilon(t2) {
        return Ok(Equivalence::Distinct);
    }
    let cap = t1.dom().dim() + t1.cod().dim() + budget.extra_apex;
    if t1.apex().dim() > cap || t2.apex().dim() > cap || budget.layers == 0 {
        return Ok(Equivalence::Unknown);
    }
    let linked = |a: &Cospan, b: &Cospan| elementary_move(a, b) || elementary_move(b, a);
    if linked(t1, t2) {
        return Ok(Equivalence::Equivalent);
    }
    if budget.layers >= 2 {
        let h1 = minimal_hulls(t1, budget.max_hulls);
        let h2 = minimal_hulls(t2, budget.max_hulls);
        if h1.iter().any(|m| linked(m, t2)) || h2.iter().any(|m| linked(t1, m)) {
            return Ok(Equivalence::Equivalent);
        }
        if budget.layers >= 3 && h1.iter().any(|a| h2.iter().any(|b| linked(a, b))) {
            return Ok(Equivalence::Equivalent);
        }
    }
    Ok(Equivalence::Unknown)
}

/// Whether some `α: apex(a) → apex(b)` carries the legs of `a` onto those of `b`.
pub(crate) fn elementary_move(a: &Cospan, b: &Cospan) -> bool {
    if a.apex().dim() > b.apex().dim() {
        return false;
    }
    let fixed: Vec<(u64, u64)> = a
        .left
        .images()
        .iter()
        .copied()
        .zip(b.left.images().iter().copied())
        .chain(
            a.right
                .images()
                .iter()
                .copied()
                .zip(b.right.images().iter().copied()),
        )
        .collect();
    let mut found = false;
    search_extensions(a.apex(), b.apex(), &fixed, |_| {
        found = true;
        false
    });
    found
}

/// The cospans obtained by shrinking the apex to a smallest non-degenerate
/// subspace containing both legs; empty when the apex is already minimal.
fn minimal_hulls(t: &Cospan, max: usize) -> Vec<Cospan> {
    let x = t.apex();
    let u = Subspace::from_spanning(
        x.dim(),
        t.left.images().iter().chain(t.right.images()).copied(),
    );
    let r = x.restrict_to(&u).radical().dim();
    if u.dim() + r >= x.dim() {
        return Vec::new();
    }
    let free = u.complement_basis();
    let mut out = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for s in subspaces_of_dim(free.len(), r).into_iter().take(max) {
        let mut n = u.clone();
        for &c in s.basis_bits() {
            n.insert(combine(&free, c));
        }
        let space = x.restrict_to(&n);
        if !space.is_nondegenerate() || !seen.insert(n.clone()) {
            continue;
        }
        let coords = |imgs: &[u64]| -> Vec<u64> {
            imgs.iter()
                .map(|&y| n.coordinates(y).expect("legs lie in the hull"))
                .collect()
        };
        let left = QuadMap::from_images_unchecked(
            t.dom().clone(),
            space.clone(),
            &coords(t.left.images()),
        );
        let right =
            QuadMap::from_images_unchecked(t.cod().clone(), space, &coords(t.right.images()));
        out.push(Cospan::new_unchecked(left, right));
    }
    out
}

#[cfg(test)]
#[allow(clippy::needless_range_loop)]
mod tests {
    use super::*;
    use crate::qmorph::{enumerate_homs, orthogonal_group};
    use crate::spancat::{canonicalize_span, compose_spans, enumerate_span_homs, transpose_span};
    use crate::Limits;

    fn h0() -> QuadSpace {
        QuadSpace::h0()
    }
    fn h1() -> QuadSpace {
        QuadSpace::h1()
    }
    fn lim() -> Limits {
        Limits::default()
    }

    fn all_cospans(v: &QuadSpace, w: &QuadSpace, apexes: &[QuadSpace]) -> Vec<Cospan> {
        let mut out = Vec::new();
        for x in apexes {
            let lefts = enumerate_homs(v, x, &lim()).unwrap();
            let rights = enumerate_homs(w, x, &lim()).unwrap();
            for l in &lefts {
                for r in &rights {
                    out.push(Cospan::new(l.clone(), r.clone()).unwrap());
                }
            }
        }
        out
    }

    #[test]
    fn pushout_unit_is_the_other_space() {
        let x = h0().orthogonal_sum(&h1());
        for g in enumerate_homs(&h0(), &x, &lim())
            .unwrap()
            .into_iter()
            .take(8)
        {
            let p = pseudo_pushout(&QuadMap::identity(&h0()), &g).unwrap();
            assert!(p.total.is_isometric(&x));
            assert_eq!(
                p.incl_w.compose(&QuadMap::identity(&h0())).unwrap(),
                p.incl_x.compose(&g).unwrap()
            );
        }
    }

    #[test]
    fn pushout_over_zero_is_orthogonal_sum() {
        let p = pseudo_pushout(&QuadMap::from_zero(&h0()), &QuadMap::from_zero(&h1())).unwrap();
        assert_eq!(p.total, h0().orthogonal_sum(&h1()));
    }

    #[test]
    fn pushout_square_commutes() {
        let w = h0().power(2);
        let x = h1().orthogonal_sum(&h0());
        for f in enumerate_homs(&h0(), &w, &lim())
            .unwrap()
            .into_iter()
            .step_by(5)
        {
            for g in enumerate_homs(&h0(), &x, &lim())
                .unwrap()
                .into_iter()
                .step_by(5)
            {
                let p = pseudo_pushout(&f, &g).unwrap();
                assert_eq!(p.total.dim(), w.dim() + x.dim() - 2);
                assert_eq!(p.incl_w.compose(&f).unwrap(), p.incl_x.compose(&g).unwrap());
                let q = pseudo_pushout(&g, &f).unwrap();
                assert!(p.total.is_isometric(&q.total));
            }
        }
    }

    #[test]
    fn degenerate_pushout_rejected() {
        let x = QuadSpace::point(false);
        let f = QuadMap::from_images(x.clone(), h0(), &[1]).unwrap();
        assert!(matches!(pseudo_pushout(&f, &f), Err(Error::Degenerate(_))));
    }

    #[test]
    fn epsilon_of_simple_cospans() {
        assert_eq!(
            epsilon(&Cospan::identity(&h0()).unwrap()),
            BitMatrix::identity(2)
        );
        let cod = h0().orthogonal_sum(&h1());
        for f in enumerate_homs(&h1(), &cod, &lim()).unwrap() {
            assert_eq!(epsilon(&Cospan::from_map(&f).unwrap()), f.matrix());
        }
    }

    #[test]
    fn epsilon_lift_of_every_map_on_planes() {
        for (v, w) in [(h0(), h0()), (h0(), h1()), (h1(), h0()), (h1(), h1())] {
            for bits in 0..16u64 {
                let f = BitMatrix::from_cols(2, &[bits & 3, bits >> 2]);
                let t = epsilon_lift(&f, &v, &w).unwrap();
                assert_eq!(epsilon(&t), f);
                assert_eq!(t.apex().dim(), 6);
            }
        }
    }

    #[test]
    fn epsilon_lift_of_zero_map() {
        let f = BitMatrix::zeros(2, 2);
        let t = epsilon_lift(&f, &h0(), &h0()).unwrap();
        // H0 has q = 0 on its basis, so no H1 component: a -> C0, b -> D0.
        assert_eq!(t.left().images(), &[0b010000, 0b100000]);
        assert!(epsilon(&t).is_zero());
    }

    #[test]
    fn epsilon_lift_in_dimension_four() {
        let v = h0().orthogonal_sum(&h1());
        let w = h1().orthogonal_sum(&h0());
        for seed in 0..64u64 {
            let cols: Vec<u64> = (0..4)
                .map(|i| (seed.wrapping_mul(0x9e37_79b9) >> (4 * i)) & 0xf)
                .collect();
            let f = BitMatrix::from_cols(4, &cols);
            let t = epsilon_lift(&f, &v, &w).unwrap();
            assert_eq!(epsilon(&t), f);
            assert_eq!(t.apex().dim(), 4 + 12);
        }
    }

    #[test]
    fn epsilon_lift_rejects_degenerate_ends() {
        let f = BitMatrix::zeros(1, 2);
        assert!(epsilon_lift(&f, &h0(), &QuadSpace::point(true)).is_err());
    }

    #[test]
    fn sigma_of_simple_cospans() {
        assert_eq!(
            sigma(&Cospan::identity(&h1()).unwrap()),
            SpanMorphism::identity(&h1())
        );
        let cod = h0().power(2);
        for f in enumerate_homs(&h0(), &cod, &lim())
            .unwrap()
            .into_iter()
            .take(10)
        {
            let expected = canonicalize_span(&QuadMap::identity(&h0()), &f).unwrap();
            assert_eq!(sigma(&Cospan::from_map(&f).unwrap()), expected);
        }
    }

    #[test]
    fn sigma_and_epsilon_are_functorial_on_planes() {
        let objs = [h0(), h1()];
        let apexes = [h0(), h1(), h0().power(2)];
        for a in &objs {
            for b in &objs {
                let first = all_cospans(a, b, &apexes);
                for c in &objs {
                    let second = all_cospans(b, c, &apexes);
                    for t1 in first.iter().step_by(7) {
                        for t2 in second.iter().step_by(11) {
                            let t = compose_cospans(t1, t2).unwrap();
                            assert_eq!(sigma(&t), compose_spans(&sigma(t1), &sigma(t2)).unwrap());
                            assert_eq!(epsilon(&t), epsilon(t2).mul(&epsilon(t1)).unwrap());
                            assert_eq!(t.apex().dim(), t1.apex().dim() + t2.apex().dim() - b.dim());
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn transposition_and_sum() {
        let apexes = [h0().power(2)];
        for t in all_cospans(&h0(), &h1(), &[h1().orthogonal_sum(&h0())])
            .iter()
            .take(20)
        {
            assert_eq!(transpose_cospan(&transpose_cospan(t)), *t);
            assert_eq!(sigma(&transpose_cospan(t)), transpose_span(&sigma(t)));
            let id0 = Cospan::identity(&QuadSpace::zero()).unwrap();
            assert_eq!(cospan_orthogonal_sum(t, &id0), *t);
        }
        for t in all_cospans(&h0(), &h0(), &apexes).iter().step_by(13) {
            for u in all_cospans(&h0(), &h0(), &apexes).iter().step_by(17) {
                let sum = cospan_orthogonal_sum(t, u);
                let expected = crate::spancat::span_orthogonal_sum(&sigma(t), &sigma(u));
                assert_eq!(sigma(&sum), expected);
            }
        }
    }

    #[test]
    fn plane_completion_examples() {
        let x0 = QuadSpace::point(false);
        let f = QuadMap::from_images(x0.clone(), h0(), &[0b01]).unwrap();
        let c = complete_to_planes(&f).unwrap();
        assert_eq!(c.partners, vec![0b10]);
        assert!(c.rest.is_zero());

        let f = QuadMap::from_images(QuadSpace::point(true), h1(), &[0b01]).unwrap();
        let c = complete_to_planes(&f).unwrap();
        assert_eq!(c.partners, vec![0b10]);

        let cod = h0().power(2);
        let f = QuadMap::from_images(x0.power(2), cod.clone(), &[0b0001, 0b0100]).unwrap();
        let c = complete_to_planes(&f).unwrap();
        assert!(c.rest.is_zero());
        let imgs = f.images();
        for i in 0..2 {
            assert!(cod.b_bits(imgs[i], c.partners[i]));
            for j in 0..2 {
                if i != j {
                    assert!(!cod.b_bits(imgs[i], c.partners[j]));
                    assert!(!cod.b_bits(c.partners[i], c.partners[j]));
                }
            }
        }
    }

    #[test]
    fn plane_completion_needs_the_correction_step() {
        // x1 -> a, x2 -> a + a' forces the first partner to be adjusted.
        let cod = h0().power(3);
        let x0 = QuadSpace::point(false).power(2);
        for f in enumerate_homs(&x0, &cod, &lim()).unwrap() {
            let c = complete_to_planes(&f).unwrap();
            let imgs = f.images();
            let mut planes = Vec::new();
            for i in 0..2 {
                assert!(cod.b_bits(imgs[i], c.partners[i]));
                planes.extend([imgs[i], c.partners[i]]);
            }
            for i in 0..4 {
                for j in 0..4 {
                    if i / 2 != j / 2 {
                        assert!(!cod.b_bits(planes[i], planes[j]));
                    }
                }
                for &r in c.rest.basis_bits() {
                    assert!(!cod.b_bits(planes[i], r));
                }
            }
            assert_eq!(c.rest.dim(), 2);
            assert!(cod.restrict_to(&c.rest).is_nondegenerate());
        }
    }

    #[test]
    fn sigma_lift_round_trips_on_planes() {
        for v in [h0(), h1()] {
            for w in [h0(), h1()] {
                for s in enumerate_span_homs(&v, &w, &lim()).unwrap() {
                    let t = sigma_lift(&s).unwrap();
                    assert_eq!(sigma(&t), s);
                }
            }
        }
    }

    #[test]
    fn sigma_lift_round_trips_in_dimension_four() {
        let objs = [h0().power(2), h0().orthogonal_sum(&h1()), h0()];
        for v in &objs {
            for w in &objs {
                for s in enumerate_span_homs(v, w, &lim())
                    .unwrap()
                    .into_iter()
                    .step_by(97)
                {
                    assert_eq!(sigma(&sigma_lift(&s).unwrap()), s);
                }
            }
        }
    }

    #[test]
    fn sigma_lift_of_isotropic_line_is_first_table_case() {
        let x0 = QuadSpace::point(false);
        let a0 = QuadMap::from_images(x0, h0(), &[0b01]).unwrap();
        let s = canonicalize_span(&a0, &a0).unwrap();
        let t = sigma_lift(&s).unwrap();
        assert_eq!(t.apex(), &h0().power(2));
        assert_eq!(t.left().images(), &[0b0001, 0b0110]);
        assert_eq!(t.right().images(), &[0b0001, 0b1010]);
    }

    #[test]
    fn equivalence_by_apex_automorphism() {
        let x = h0().orthogonal_sum(&h1());
        let group = orthogonal_group(&x, &lim()).unwrap();
        let t = all_cospans(&h0(), &h1(), std::slice::from_ref(&x)).remove(3);
        for a in group.iter().step_by(9) {
            let moved =
                Cospan::new(a.compose(t.left()).unwrap(), a.compose(t.right()).unwrap()).unwrap();
            assert_eq!(
                cospan_equiv(&t, &moved, &EquivBudget::default()).unwrap(),
                Equivalence::Equivalent
            );
        }
    }

    #[test]
    fn retraction_law() {
        let w = h0().orthogonal_sum(&h1());
        for f in enumerate_homs(&h1(), &w, &lim())
            .unwrap()
            .into_iter()
            .take(10)
        {
            let t = Cospan::from_map(&f).unwrap();
            let back = compose_cospans(&t, &transpose_cospan(&t)).unwrap();
            let id = Cospan::identity(&h1()).unwrap();
            assert_eq!(
                cospan_equiv(&back, &id, &EquivBudget::default()).unwrap(),
                Equivalence::Equivalent
            );
        }
    }

    #[test]
    fn distinct_sigma_images_are_distinct() {
        let id = Cospan::identity(&h0()).unwrap();
        let apart = Cospan::new(
            QuadMap::from_images(h0(), h0().power(2), &[0b0001, 0b0010]).unwrap(),
            QuadMap::from_images(h0(), h0().power(2), &[0b0100, 0b1000]).unwrap(),
        )
        .unwrap();
        assert_eq!(
            cospan_equiv(&id, &apart, &EquivBudget::default()).unwrap(),
            Equivalence::Distinct
        );
    }

    #[test]
    fn shrinking_the_apex_is_found() {
        // Id on H0 inside H0 ⊥ H0 ⊥ H1, against the bare identity.
        let big = h0().power(2).orthogonal_sum(&h1());
        let incl = QuadMap::from_images(h0(), big, &[0b000100, 0b001000]).unwrap();
        let t = Cospan::new(incl.clone(), incl).unwrap();
        let id = Cospan::identity(&h0()).unwrap();
        let budget = EquivBudget::default();
        assert_eq!(
            cospan_equiv(&t, &id, &budget).unwrap(),
            Equivalence::Equivalent
        );
        let tight = EquivBudget {
            extra_apex: 1,
            ..budget
        };
        assert_eq!(cospan_equiv(&t, &id, &tight).unwrap(), Equivalence::Unknown);
    }

    #[test]
    fn equivalence_through_two_hulls() {
        // Same legs in H0 ⊥ H0, completed once by H0 and once by H1 in a
        // four-dimensional apex: neither maps into the other directly.
        let a = h0().power(2).orthogonal_sum(&h0());
        let b = h0().power(2).orthogonal_sum(&h1());
        let legs_a = all_cospans(&h0(), &h0(), &[h0().power(2)]).remove(40);
        let lift = |t: &Cospan, apex: &QuadSpace| {
            let inc = |m: &QuadMap| {
                QuadMap::from_images(m.dom().clone(), apex.clone(), m.images()).unwrap()
            };
            Cospan::new(inc(t.left()), inc(t.right())).unwrap()
        };
        let ta = lift(&legs_a, &a);
        let tb = lift(&legs_a, &b);
        assert_eq!(
            cospan_equiv(&ta, &tb, &EquivBudget::default()).unwrap(),
            Equivalence::Equivalent
        );
    }
}
