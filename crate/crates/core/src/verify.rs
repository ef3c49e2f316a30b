//! The acceptance suites run by `fquad verify`.
//!
//! Each suite compares library results against an independent oracle:
//! brute force over matrices, filters over all subspaces, or closed-form
//! values. Suites are independent, so [`run_suites`] spreads them over a
//! worker pool and returns the outcomes in registry order.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cospancat::{
    compose_cospans, cospan_equiv, epsilon, epsilon_lift, pseudo_pushout, pushout_unchecked, sigma,
    sigma_lift, transpose_cospan, Cospan, EquivBudget, Equivalence,
};
use crate::error::{Error, Result};
use crate::f2::{enumerate_subspaces, BitMatrix, Subspace};
use crate::isofunc::{
    a_v_matrix, act_right, algebra_mul, big_e, decomposition_check, eval_functor, hom_iso_dim,
    AlgebraElement, FunctorKind,
};
use crate::qmorph::{enumerate_homs, orthogonal_group, search_extensions, QuadMap};
use crate::quadform::{IsoClass, QuadSpace};
use crate::spancat::{
    compose_unchecked, e_alpha, enumerate_idempotents, enumerate_span_homs, SpanMorphism,
};
use crate::Limits;

pub const DEFAULT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "pass",
            Status::Fail => "fail",
        })
    }
}

/// One checked case, as emitted in json-lines output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseRecord {
    pub suite: String,
    pub case: String,
    pub expected: String,
    pub actual: String,
    pub status: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub limits: Limits,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: DEFAULT_SEED,
            limits: Limits::default(),
        }
    }
}

/// A registered suite.
pub struct Suite {
    pub name: &'static str,
    /// The result the suite checks, quoted in failure messages.
    pub theorem: &'static str,
    pub summary: &'static str,
    run: fn(&mut Ctx) -> Result<()>,
}

impl fmt::Debug for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Suite").field("name", &self.name).finish()
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOutcome {
    pub name: &'static str,
    pub theorem: &'static str,
    pub records: Vec<CaseRecord>,
    /// Set when the suite could not run to completion.
    pub error: Option<Error>,
}

impl SuiteOutcome {
    pub fn failures(&self) -> usize {
        self.records
            .iter()
            .filter(|r| r.status == Status::Fail)
            .count()
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.failures() == 0
    }

    /// One-line summary; failures name the theorem.
    pub fn summary_line(&self) -> String {
        match &self.error {
            Some(e) => format!("ERROR {}: {e}", self.name),
            None if self.failures() == 0 => {
                format!("PASS  {} ({} cases)", self.name, self.records.len())
            }
            None => format!(
                "FAIL  {}: {} of {} cases violate the {}",
                self.name,
                self.failures(),
                self.records.len(),
                self.theorem
            ),
        }
    }
}

struct Ctx<'a> {
    suite: &'static str,
    limits: &'a Limits,
    rng: ChaCha8Rng,
    records: Vec<CaseRecord>,
}

impl Ctx<'_> {
    fn check<T: PartialEq + fmt::Display>(
        &mut self,
        case: impl Into<String>,
        expected: T,
        actual: T,
    ) {
        let status = if expected == actual {
            Status::Pass
        } else {
            Status::Fail
        };
        self.records.push(CaseRecord {
            suite: self.suite.to_string(),
            case: case.into(),
            expected: expected.to_string(),
            actual: actual.to_string(),
            status,
        });
    }
}

static SUITES: [Suite; 12] = [
    Suite {
        name: "classification-oracle",
        theorem: "classification of quadratic spaces by dimension, radical and Arf invariant",
        summary: "iso_class equality against brute-force isometry search on 200 random spaces",
        run: classification_oracle,
    },
    Suite {
        name: "arf-planes",
        theorem: "Arf invariant of orthogonal sums of planes",
        summary: "Arf values of H0^m and H1+H0^(m-1), H0+H0 against H1+H1, H0 against H1",
        run: arf_planes,
    },
    Suite {
        name: "degenerate-classes",
        theorem: "classification of degenerate quadratic spaces",
        summary: "H0 and H1 stay apart next to x0 lines and merge next to x1 lines",
        run: degenerate_classes,
    },
    Suite {
        name: "pseudo-pushout",
        theorem: "unit, symmetry and associativity of the pseudo push-out",
        summary: "50 seeded instances of each law, up to compatible isometry",
        run: pseudo_pushout_laws,
    },
    Suite {
        name: "retraction-law",
        theorem: "retraction law for cospans of morphisms",
        summary:
            "tr(f)∘f is equivalent to the identity for every morphism between planes and 4-spaces",
        run: retraction_law,
    },
    Suite {
        name: "epsilon-fullness",
        theorem: "fullness of the forgetful functor ε",
        summary:
            "ε(epsilon_lift(f)) = f on all maps out of H0 and on 200 random maps in dimension 4",
        run: epsilon_fullness,
    },
    Suite {
        name: "sigma-functor",
        theorem: "functoriality and fullness of σ",
        summary: "σ(t2∘t1) = σ(t2)∘σ(t1) over apexes of dimension at most 4, σ(sigma_lift(s)) = s",
        run: sigma_functor,
    },
    Suite {
        name: "span-idempotents",
        theorem: "description of the idempotents of End(V) in the span category",
        summary: "the idempotents of End(V) are exactly the e_A, and they commute",
        run: span_idempotents,
    },
    Suite {
        name: "idempotent-decomposition",
        theorem: "decomposition of standard projectives into isotropic functors",
        summary: "E_V idempotent, rank identities and the counting identity on the test grid",
        run: idempotent_decomposition,
    },
    Suite {
        name: "iso-hom-dims",
        theorem: "morphisms between isotropic functors",
        summary: "dim Hom(iso_V, iso_W) is diagonal with entries |O(V)|",
        run: iso_hom_dims,
    },
    Suite {
        name: "self-duality",
        theorem: "self-duality pairing of standard projectives",
        summary: "the pairing on Q_V(V) is symmetric of rank dim iso_V(V)",
        run: self_duality,
    },
    Suite {
        name: "exactness",
        theorem: "exactness of 0 → K_V → Q_V → iso_V → 0",
        summary: "dim K_V(X) + dim iso_V(X) = dim Q_V(X) on the test grid",
        run: exactness,
    },
];

/// Every suite, in the order of the acceptance criteria.
pub fn suites() -> &'static [Suite] {
    &SUITES
}

pub fn find_suite(name: &str) -> Option<&'static Suite> {
    SUITES.iter().find(|s| s.name == name)
}

pub fn run_suite(suite: &Suite, config: &VerifyConfig) -> SuiteOutcome {
    let index = SUITES
        .iter()
        .position(|s| s.name == suite.name)
        .unwrap_or(0) as u64;
    let mut ctx = Ctx {
        suite: suite.name,
        limits: &config.limits,
        rng: ChaCha8Rng::seed_from_u64(
            config.seed ^ (index + 1).wrapping_mul(0x9e37_79b9_7f4a_7c15),
        ),
        records: Vec::new(),
    };
    let error = (suite.run)(&mut ctx).err();
    SuiteOutcome {
        name: suite.name,
        theorem: suite.theorem,
        records: ctx.records,
        error,
    }
}

/// Runs the given suites on a worker pool; outcomes come back in input order.
pub fn run_suites(selected: &[&Suite], config: &VerifyConfig) -> Vec<SuiteOutcome> {
    let workers = std::thread::available_parallelism()
        .map(|n| n.get())
        .unwrap_or(1)
        .min(selected.len().max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<SuiteOutcome>>> = Mutex::new(vec![None; selected.len()]);
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::Relaxed);
                let Some(suite) = selected.get(i) else { break };
                let outcome = run_suite(suite, config);
                slots
                    .lock()
                    .expect("no worker panics while holding the lock")[i] = Some(outcome);
            });
        }
    });
    slots
        .into_inner()
        .expect("workers finished")
        .into_iter()
        .map(|o| o.expect("every suite ran"))
        .collect()
}

// ---------------------------------------------------------------------------
// Oracles. These read only the Gram matrix and diagonal of a space.

/// `q` on every vector of `s`, from the defining sum over coordinates.
fn q_table(s: &QuadSpace) -> Vec<bool> {
    let n = s.dim();
    let gram = s.gram();
    let diag = s.diag();
    (0..1u64 << n)
        .map(|v| {
            let mut acc = false;
            for i in (0..n).filter(|&i| (v >> i) & 1 == 1) {
                acc ^= diag.get(i);
                for j in (i + 1..n).filter(|&j| (v >> j) & 1 == 1) {
                    acc ^= gram.get(i, j);
                }
            }
            acc
        })
        .collect()
}

/// Whether the linear map with basis images `cols` is injective and carries
/// `qa` to `qb`, checked on every vector of the source.
fn preserves_all(cols: &[u64], qa: &[bool], qb: &[bool]) -> bool {
    let k = cols.len();
    assert!(k <= 6 && qb.len() <= 64, "brute force is for tiny spaces");
    let mut img = [0u64; 64];
    let mut seen = 1u64;
    for v in 1..1usize << k {
        img[v] = img[v & (v - 1)] ^ cols[v.trailing_zeros() as usize];
        let bit = 1u64 << img[v];
        if qb[img[v] as usize] != qa[v] || seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}

/// Calls `f` with every tuple of `k` vectors in `F₂^m`.
fn for_each_tuple(k: usize, m: usize, mut f: impl FnMut(&[u64]) -> bool) {
    let total = 1u64 << (k * m);
    let mask = (1u64 << m) - 1;
    let mut cols = vec![0u64; k];
    for code in 0..total {
        for (j, c) in cols.iter_mut().enumerate() {
            *c = (code >> (j * m)) & mask;
        }
        if !f(&cols) {
            return;
        }
    }
}

/// Exhaustive isometry test over all square matrices.
fn brute_isometric(a: &QuadSpace, b: &QuadSpace) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let (qa, qb) = (q_table(a), q_table(b));
    let mut found = false;
    for_each_tuple(a.dim(), a.dim(), |cols| {
        found = preserves_all(cols, &qa, &qb);
        !found
    });
    found
}

/// Number of injective form-preserving maps from the span of `basis` in `a`
/// to `x`, by brute force over all images of the basis.
fn brute_hom_count(a: &QuadSpace, basis: &[u64], x: &QuadSpace) -> usize {
    let qa_full = q_table(a);
    let k = basis.len();
    let qa: Vec<bool> = (0..1u64 << k)
        .map(|c| {
            let v = (0..k)
                .filter(|&i| (c >> i) & 1 == 1)
                .fold(0, |acc, i| acc ^ basis[i]);
            qa_full[v as usize]
        })
        .collect();
    let qx = q_table(x);
    let mut count = 0;
    for_each_tuple(k, x.dim(), |cols| {
        count += preserves_all(cols, &qa, &qx) as usize;
        true
    });
    count
}

fn standard_basis(n: usize) -> Vec<u64> {
    (0..n).map(|i| 1 << i).collect()
}

fn brute_group_order(v: &QuadSpace) -> usize {
    brute_hom_count(v, &standard_basis(v.dim()), v)
}

/// `|Hom_Sp(V, X)|`: relations in `V ⊕ X` on which both projections are
/// injective and `q` agrees.
fn brute_span_count(v: &QuadSpace, x: &QuadSpace) -> Result<usize> {
    let (n, m) = (v.dim(), x.dim());
    let (qv, qx) = (q_table(v), q_table(x));
    let mask = (1u64 << n) - 1;
    let mut count = 0;
    for r in enumerate_subspaces(n + m, n + m)? {
        let ok = r.elements().into_iter().skip(1).all(|e| {
            let (a, b) = (e & mask, e >> n);
            a != 0 && b != 0 && qv[a as usize] == qx[b as usize]
        });
        count += ok as usize;
    }
    Ok(count)
}

// ---------------------------------------------------------------------------
// Generators.

fn random_space(rng: &mut ChaCha8Rng, n: usize) -> QuadSpace {
    let mut rows = vec![0u64; n];
    for i in 0..n {
        for j in i + 1..n {
            if rng.random::<bool>() {
                rows[i] |= 1 << j;
                rows[j] |= 1 << i;
            }
        }
    }
    let diag = rng.random::<u64>() & ((1u64 << n) - 1);
    QuadSpace::from_bits(n, &rows, diag).expect("symmetric with zero diagonal")
}

fn random_invertible(rng: &mut ChaCha8Rng, n: usize) -> Vec<u64> {
    loop {
        let cols: Vec<u64> = (0..n)
            .map(|_| rng.random::<u64>() & ((1u64 << n) - 1))
            .collect();
        if BitMatrix::from_cols(n, &cols).rank() == n {
            return cols;
        }
    }
}

/// The form of `a` pulled back along the basis `cols`.
fn pull_back(a: &QuadSpace, cols: &[u64]) -> QuadSpace {
    let qa = q_table(a);
    let q = |v: u64| qa[v as usize];
    let n = cols.len();
    let mut rows = vec![0u64; n];
    let mut diag = 0u64;
    for i in 0..n {
        diag |= (q(cols[i]) as u64) << i;
        for j in 0..n {
            if i != j && q(cols[i] ^ cols[j]) ^ q(cols[i]) ^ q(cols[j]) {
                rows[i] |= 1 << j;
            }
        }
    }
    QuadSpace::from_bits(n, &rows, diag).expect("polar form is alternating")
}

fn class_reps(dims: impl IntoIterator<Item = usize>, nondegenerate: bool) -> Vec<QuadSpace> {
    dims.into_iter()
        .flat_map(IsoClass::all_of_dim)
        .filter(|c| !nondegenerate || c.rad_dim == 0)
        .map(|c| QuadSpace::from_class(&c).expect("valid class"))
        .collect()
}

fn name(s: &QuadSpace) -> String {
    s.iso_class().to_string()
}

fn random_hom(
    rng: &mut ChaCha8Rng,
    v: &QuadSpace,
    x: &QuadSpace,
    limits: &Limits,
) -> Result<Option<QuadMap>> {
    let homs = enumerate_homs(v, x, limits)?;
    Ok((!homs.is_empty()).then(|| homs[rng.random_range(0..homs.len())].clone()))
}

/// A random cospan `v → X ← w` with `X` drawn from `apexes`.
fn random_cospan(
    rng: &mut ChaCha8Rng,
    v: &QuadSpace,
    w: &QuadSpace,
    apexes: &[QuadSpace],
    limits: &Limits,
) -> Result<Cospan> {
    loop {
        let x = &apexes[rng.random_range(0..apexes.len())];
        if let (Some(l), Some(r)) = (
            random_hom(rng, v, x, limits)?,
            random_hom(rng, w, x, limits)?,
        ) {
            return Cospan::new(l, r);
        }
    }
}

/// Whether an isometry `a → b` carries each listed image in `a` to its partner in `b`.
fn compatible_isometry(a: &QuadSpace, b: &QuadSpace, pairs: &[(u64, u64)]) -> bool {
    if a.dim() != b.dim() {
        return false;
    }
    let mut found = false;
    search_extensions(a, b, pairs, |_| {
        found = true;
        false
    });
    found
}

fn leg_pairs(a: &Cospan, b: &Cospan) -> Vec<(u64, u64)> {
    let left = a.left().images().iter().zip(b.left().images());
    let right = a.right().images().iter().zip(b.right().images());
    left.chain(right).map(|(&x, &y)| (x, y)).collect()
}

// ---------------------------------------------------------------------------
// Suites.

fn classification_oracle(ctx: &mut Ctx) -> Result<()> {
    ctx.limits.check_enum("classification oracle", 4)?;
    for i in 0..200 {
        let n = ctx.rng.random_range(0..=4usize);
        let a = random_space(&mut ctx.rng, n);
        let b = if i % 2 == 0 {
            let p = random_invertible(&mut ctx.rng, n);
            pull_back(&a, &p)
        } else {
            random_space(&mut ctx.rng, n)
        };
        let expected = brute_isometric(&a, &b);
        let actual = a.iso_class() == b.iso_class();
        ctx.check(
            format!("pair {i}: {} vs {} (dim {n})", name(&a), name(&b)),
            expected,
            actual,
        );
    }
    Ok(())
}

fn arf_planes(ctx: &mut Ctx) -> Result<()> {
    let (h0, h1) = (QuadSpace::h0(), QuadSpace::h1());
    for m in 1..=3 {
        ctx.check(format!("Arf(H0^{m})"), false, h0.power(m).arf()?);
        let mixed = h1.orthogonal_sum(&h0.power(m - 1));
        ctx.check(format!("Arf(H1+H0^{})", m - 1), true, mixed.arf()?);
    }
    let (a, b) = (h0.power(2), h1.power(2));
    ctx.check(
        "H0+H0 vs H1+H1, by brute force",
        true,
        brute_isometric(&a, &b),
    );
    ctx.check(
        "H0+H0 vs H1+H1, by class",
        true,
        a.iso_class() == b.iso_class(),
    );
    ctx.check("H0 vs H1, by brute force", false, brute_isometric(&h0, &h1));
    ctx.check(
        "H0 vs H1, by class",
        false,
        h0.iso_class() == h1.iso_class(),
    );
    Ok(())
}

fn degenerate_classes(ctx: &mut Ctx) -> Result<()> {
    let (h0, h1) = (QuadSpace::h0(), QuadSpace::h1());
    for r in 1..=2 {
        for value in [false, true] {
            let line = QuadSpace::point(value).power(r);
            let (a, b) = (h0.orthogonal_sum(&line), h1.orthogonal_sum(&line));
            let tag = if value { "x1" } else { "x0" };
            ctx.check(
                format!("H0+{tag}^{r} vs H1+{tag}^{r}, by class"),
                value,
                a.iso_class() == b.iso_class(),
            );
            ctx.check(
                format!("H0+{tag}^{r} vs H1+{tag}^{r}, by brute force"),
                value,
                brute_isometric(&a, &b),
            );
        }
    }
    Ok(())
}

fn pseudo_pushout_laws(ctx: &mut Ctx) -> Result<()> {
    let objects = class_reps(0..=4, true);
    let limits = *ctx.limits;
    limits.check_apex("pseudo push-out", 4 + 2 + 2)?;
    let pick = |rng: &mut ChaCha8Rng| objects[rng.random_range(0..objects.len())].clone();

    // A random pair of morphisms out of a common source.
    let draw_pair = |rng: &mut ChaCha8Rng| -> Result<(QuadMap, QuadMap)> {
        loop {
            let (v, w, x) = (pick(rng), pick(rng), pick(rng));
            if let (Some(f), Some(g)) = (
                random_hom(rng, &v, &w, &limits)?,
                random_hom(rng, &v, &x, &limits)?,
            ) {
                return Ok((f, g));
            }
        }
    };

    for i in 0..50 {
        let (f, _) = draw_pair(&mut ctx.rng)?;
        let id = QuadMap::identity(f.dom());
        let p = pseudo_pushout(&f, &id)?;
        // W ⊥_V V is W itself, through a bijective inclusion.
        let square = p.incl_w.compose(&f)? == p.incl_x.compose(&id)?;
        let ok = p.incl_w.is_bijective() && square && p.total.iso_class() == f.cod().iso_class();
        ctx.check(
            format!("unit {i}: {} → {}", name(f.dom()), name(f.cod())),
            true,
            ok,
        );
    }

    for i in 0..50 {
        let (f, g) = draw_pair(&mut ctx.rng)?;
        let p = pseudo_pushout(&f, &g)?;
        let q = pseudo_pushout(&g, &f)?;
        let pairs: Vec<(u64, u64)> = (p.incl_w.images().iter().zip(q.incl_x.images()))
            .chain(p.incl_x.images().iter().zip(q.incl_w.images()))
            .map(|(&a, &b)| (a, b))
            .collect();
        let ok = compatible_isometry(&p.total, &q.total, &pairs);
        ctx.check(
            format!(
                "symmetry {i}: {} ← {} → {}",
                name(f.cod()),
                name(f.dom()),
                name(g.cod())
            ),
            true,
            ok,
        );
    }

    let ends = class_reps([2], true);
    let apexes = class_reps(2..=4, true);
    for i in 0..50 {
        let e: Vec<QuadSpace> = (0..4)
            .map(|_| ends[ctx.rng.random_range(0..ends.len())].clone())
            .collect();
        let t1 = random_cospan(&mut ctx.rng, &e[0], &e[1], &apexes, &limits)?;
        let t2 = random_cospan(&mut ctx.rng, &e[1], &e[2], &apexes, &limits)?;
        let t3 = random_cospan(&mut ctx.rng, &e[2], &e[3], &apexes, &limits)?;
        let a = compose_cospans(&compose_cospans(&t1, &t2)?, &t3)?;
        let b = compose_cospans(&t1, &compose_cospans(&t2, &t3)?)?;
        let ok = a.apex().iso_class() == b.apex().iso_class()
            && compatible_isometry(a.apex(), b.apex(), &leg_pairs(&a, &b));
        ctx.check(
            format!(
                "associativity {i}: apexes {}, {}, {}",
                name(t1.apex()),
                name(t2.apex()),
                name(t3.apex())
            ),
            true,
            ok,
        );
    }
    Ok(())
}

fn retraction_law(ctx: &mut Ctx) -> Result<()> {
    let objects = class_reps(0..=4, true);
    let budget = EquivBudget::default();
    for v in &objects {
        let id = Cospan::identity(v)?;
        for w in objects.iter().filter(|w| w.dim() >= v.dim()) {
            ctx.limits.check_apex("retraction law", w.dim())?;
            let mut tally = [0usize; 3];
            let homs = enumerate_homs(v, w, ctx.limits)?;
            for f in &homs {
                let t = Cospan::from_map(f)?;
                let back = compose_cospans(&t, &transpose_cospan(&t))?;
                tally[match cospan_equiv(&back, &id, &budget)? {
                    Equivalence::Equivalent => 0,
                    Equivalence::Distinct => 1,
                    Equivalence::Unknown => 2,
                }] += 1;
            }
            if homs.is_empty() {
                continue;
            }
            let actual = ["equivalent", "distinct", "unknown"]
                .iter()
                .zip(tally)
                .filter(|(_, n)| *n > 0)
                .map(|(k, n)| format!("{k} x{n}"))
                .collect::<Vec<_>>()
                .join(", ");
            ctx.check(
                format!("{} → {} ({} morphisms)", name(v), name(w), homs.len()),
                format!("equivalent x{}", homs.len()),
                actual,
            );
        }
    }
    Ok(())
}

fn epsilon_fullness(ctx: &mut Ctx) -> Result<()> {
    let h0 = QuadSpace::h0();
    for w in [QuadSpace::h0(), QuadSpace::h1()] {
        let mut bad = 0;
        for code in 0..16u64 {
            let f = BitMatrix::from_cols(2, &[code & 3, code >> 2]);
            let t = epsilon_lift(&f, &h0, &w)?;
            bad += (epsilon(&t) != f) as usize;
        }
        ctx.check(format!("all 16 maps H0 → {}", name(&w)), 0, bad);
    }
    let planes = [
        QuadSpace::h0().power(2),
        QuadSpace::h1().orthogonal_sum(&QuadSpace::h0()),
    ];
    for i in 0..200 {
        let v = &planes[ctx.rng.random_range(0..2)];
        let w = &planes[ctx.rng.random_range(0..2)];
        let cols: Vec<u64> = (0..4).map(|_| ctx.rng.random::<u64>() & 0xf).collect();
        let f = BitMatrix::from_cols(4, &cols);
        let t = epsilon_lift(&f, v, w)?;
        ctx.check(
            format!("random map {i}: {} → {}", name(v), name(w)),
            f.to_string(),
            epsilon(&t).to_string(),
        );
    }
    Ok(())
}

/// Index of every span `V → W` by relation.
struct SpanIndex {
    spans: Vec<SpanMorphism>,
    index: BTreeMap<Subspace, usize>,
}

impl SpanIndex {
    fn new(v: &QuadSpace, w: &QuadSpace, limits: &Limits) -> Result<Self> {
        let spans = enumerate_span_homs(v, w, limits)?;
        let index = spans
            .iter()
            .enumerate()
            .map(|(i, s)| (s.relation().clone(), i))
            .collect();
        Ok(Self { spans, index })
    }
}

fn pullback_relation(ambient_rows: usize, left: &[u64], right: &[u64]) -> Subspace {
    let mut cols: smallvec::SmallVec<[u64; 8]> = left.iter().copied().collect();
    cols.extend(right.iter().copied());
    BitMatrix::from_cols(ambient_rows, &cols).kernel()
}

fn sigma_functor(ctx: &mut Ctx) -> Result<()> {
    let ends = [QuadSpace::h0(), QuadSpace::h1()];
    let apexes = class_reps(2..=4, true);
    for x in &apexes {
        ctx.limits.check_apex("σ functoriality", 2 * x.dim())?;
    }
    // legs[e][x]: every morphism ends[e] → apexes[x].
    let legs: Vec<Vec<Vec<QuadMap>>> = ends
        .iter()
        .map(|e| {
            apexes
                .iter()
                .map(|x| enumerate_homs(e, x, ctx.limits))
                .collect()
        })
        .collect::<Result<_>>()?;
    let index: Vec<Vec<SpanIndex>> = ends
        .iter()
        .map(|v| {
            ends.iter()
                .map(|w| SpanIndex::new(v, w, ctx.limits))
                .collect()
        })
        .collect::<Result<_>>()?;
    // sig[v][w][x][l][r]: index of σ([l | r]) among the spans v → w.
    let mut sig = vec![vec![Vec::new(); 2]; 2];
    for v in 0..2 {
        for w in 0..2 {
            for (xi, x) in apexes.iter().enumerate() {
                let table: Vec<Vec<usize>> = legs[v][xi]
                    .iter()
                    .map(|l| {
                        legs[w][xi]
                            .iter()
                            .map(|r| {
                                index[v][w].index
                                    [&pullback_relation(x.dim(), l.images(), r.images())]
                            })
                            .collect()
                    })
                    .collect();
                sig[v][w].push(table);
            }
        }
    }
    for v in 0..2 {
        for w in 0..2 {
            for y in 0..2 {
                // comp[a][b]: relation of span b ∘ span a.
                let comp: Vec<Vec<Subspace>> = index[v][w]
                    .spans
                    .iter()
                    .map(|s1| {
                        index[w][y]
                            .spans
                            .iter()
                            .map(|s2| compose_unchecked(s1, s2).relation().clone())
                            .collect()
                    })
                    .collect();
                let (mut cases, mut bad) = (0usize, 0usize);
                for x1 in 0..apexes.len() {
                    for x2 in 0..apexes.len() {
                        for (ri, r1) in legs[w][x1].iter().enumerate() {
                            for (li, l2) in legs[w][x2].iter().enumerate() {
                                let p = pushout_unchecked(r1, l2);
                                let total = p.total.dim();
                                let rights: Vec<Vec<u64>> = legs[y][x2]
                                    .iter()
                                    .map(|r2| {
                                        r2.images()
                                            .iter()
                                            .map(|&c| p.incl_x.apply_bits(c))
                                            .collect()
                                    })
                                    .collect();
                                for (ai, l1) in legs[v][x1].iter().enumerate() {
                                    let left: Vec<u64> = l1
                                        .images()
                                        .iter()
                                        .map(|&c| p.incl_w.apply_bits(c))
                                        .collect();
                                    let s1 = sig[v][w][x1][ai][ri];
                                    for (bi, right) in rights.iter().enumerate() {
                                        let s2 = sig[w][y][x2][li][bi];
                                        cases += 1;
                                        bad += (pullback_relation(total, &left, right)
                                            != comp[s1][s2])
                                            as usize;
                                    }
                                }
                            }
                        }
                    }
                }
                ctx.check(
                    format!(
                        "σ(t2∘t1) = σ(t2)∘σ(t1), {} → {} → {} ({cases} pairs)",
                        name(&ends[v]),
                        name(&ends[w]),
                        name(&ends[y])
                    ),
                    0,
                    bad,
                );
            }
        }
    }
    for v in &ends {
        for w in &ends {
            let spans = enumerate_span_homs(v, w, ctx.limits)?;
            let mut bad = 0;
            for s in &spans {
                bad += (sigma(&sigma_lift(s)?) != *s) as usize;
            }
            ctx.check(
                format!(
                    "σ(sigma_lift(s)) = s, {} → {} ({} spans)",
                    name(v),
                    name(w),
                    spans.len()
                ),
                0,
                bad,
            );
        }
    }
    Ok(())
}

fn span_idempotents(ctx: &mut Ctx) -> Result<()> {
    let spaces = [
        QuadSpace::point(false),
        QuadSpace::point(true),
        QuadSpace::h0(),
        QuadSpace::h1(),
    ];
    for v in &spaces {
        let filtered: BTreeSet<SpanMorphism> =
            enumerate_idempotents(v, ctx.limits)?.into_iter().collect();
        let built = enumerate_subspaces(v.dim(), ctx.limits.enum_dim)?
            .iter()
            .map(|a| e_alpha(v, a))
            .collect::<Result<BTreeSet<_>>>()?;
        ctx.check(
            format!("idempotents of End({})", name(v)),
            true,
            filtered == built,
        );
        let commute = built.iter().all(|a| {
            built
                .iter()
                .all(|b| compose_unchecked(a, b) == compose_unchecked(b, a))
        });
        ctx.check(format!("e_A commute in End({})", name(v)), true, commute);
    }
    Ok(())
}

fn idempotent_decomposition(ctx: &mut Ctx) -> Result<()> {
    let sources = class_reps(0..=2, false);
    let targets = class_reps(0..=3, false);
    for v in &sources {
        let e = big_e(v, ctx.limits)?;
        ctx.check(
            format!("E_V·E_V = E_V for V = {}", name(v)),
            true,
            algebra_mul(&e, &e)? == e,
        );
        let one_plus = e.add(&AlgebraElement::one(v))?;
        let subs = enumerate_subspaces(v.dim(), ctx.limits.enum_dim)?;
        for x in &targets {
            let q = eval_functor(FunctorKind::Q, v, x, ctx.limits)?;
            let iso = eval_functor(FunctorKind::Iso, v, x, ctx.limits)?.dim();
            let k = eval_functor(FunctorKind::K, v, x, ctx.limits)?.dim();
            let pair = format!("V = {}, X = {}", name(v), name(x));
            ctx.check(
                format!("rank E_V = dim iso_V(X), {pair}"),
                iso,
                act_right(&q, &e)?.rank(),
            );
            ctx.check(
                format!("rank (1+E_V) = dim K_V(X), {pair}"),
                k,
                act_right(&q, &one_plus)?.rank(),
            );
            let sum: usize = subs
                .iter()
                .map(|a| brute_hom_count(v, a.basis_bits(), x))
                .sum();
            ctx.check(
                format!("dim Q_V(X) = Σ_A dim iso_A(X), {pair}"),
                sum,
                brute_span_count(v, x)?,
            );
            ctx.check(
                format!("dim Q_V(X) counted, {pair}"),
                brute_span_count(v, x)?,
                q.dim(),
            );
            let report = decomposition_check(v, x, ctx.limits)?;
            ctx.check(
                format!("orthogonal complete idempotents E_A, {pair}"),
                true,
                report.holds(),
            );
        }
    }
    Ok(())
}

fn iso_hom_dims(ctx: &mut Ctx) -> Result<()> {
    let objects = [
        QuadSpace::zero(),
        QuadSpace::point(false),
        QuadSpace::point(true),
        QuadSpace::h0(),
        QuadSpace::h1(),
    ];
    for v in &objects {
        let order = orthogonal_group(v, ctx.limits)?.len();
        ctx.check(
            format!("|O({})| against brute force", name(v)),
            brute_group_order(v),
            order,
        );
        for w in &objects {
            let expected = if v.iso_class() == w.iso_class() {
                order
            } else {
                0
            };
            ctx.check(
                format!("dim Hom(iso_{}, iso_{})", name(v), name(w)),
                expected,
                hom_iso_dim(v, w, ctx.limits)?,
            );
        }
    }
    Ok(())
}

fn self_duality(ctx: &mut Ctx) -> Result<()> {
    let spaces = [
        QuadSpace::point(false),
        QuadSpace::point(true),
        QuadSpace::h0(),
        QuadSpace::h1(),
    ];
    for v in &spaces {
        let m = a_v_matrix(v, v, ctx.limits)?;
        ctx.check(
            format!("pairing on Q_V(V) symmetric, V = {}", name(v)),
            true,
            m == m.transpose(),
        );
        let iso = brute_hom_count(v, &standard_basis(v.dim()), v);
        ctx.check(
            format!("pairing rank = dim iso_V(V), V = {}", name(v)),
            iso,
            m.rank(),
        );
    }
    Ok(())
}

fn exactness(ctx: &mut Ctx) -> Result<()> {
    for v in &class_reps(0..=2, false) {
        for x in &class_reps(0..=3, false) {
            let k = eval_functor(FunctorKind::K, v, x, ctx.limits)?.dim();
            let iso = brute_hom_count(v, &standard_basis(v.dim()), x);
            let q = brute_span_count(v, x)?;
            ctx.check(format!("V = {}, X = {}", name(v), name(x)), q, k + iso);
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registry_names_are_unique() {
        let names: BTreeSet<&str> = suites().iter().map(|s| s.name).collect();
        assert_eq!(names.len(), 12);
        assert!(find_suite("sigma-functor").is_some());
        assert!(find_suite("nope").is_none());
    }

    #[test]
    fn oracle_q_table_matches_library() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 0..=5 {
            let s = random_space(&mut rng, n);
            let t = q_table(&s);
            assert!((0..1u64 << n).all(|v| t[v as usize] == s.q_bits(v)));
        }
    }

    #[test]
    fn brute_force_oracles() {
        assert_eq!(brute_group_order(&QuadSpace::h0()), 2);
        assert_eq!(brute_group_order(&QuadSpace::h1()), 6);
        assert_eq!(brute_group_order(&QuadSpace::point(false)), 1);
        assert!(brute_isometric(
            &QuadSpace::h0().power(2),
            &QuadSpace::h1().power(2)
        ));
        assert!(!brute_isometric(&QuadSpace::h0(), &QuadSpace::h1()));
        // Q_(x,0)(H0): zero span plus the two isotropic lines.
        assert_eq!(
            brute_span_count(&QuadSpace::point(false), &QuadSpace::h0()).unwrap(),
            3
        );
    }

    #[test]
    fn pull_back_is_isometric() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for n in 1..=4 {
            let a = random_space(&mut rng, n);
            let p = random_invertible(&mut rng, n);
            assert_eq!(pull_back(&a, &p).iso_class(), a.iso_class());
        }
    }

    #[test]
    fn cheap_suites_pass() {
        let config = VerifyConfig::default();
        for name in [
            "arf-planes",
            "degenerate-classes",
            "span-idempotents",
            "iso-hom-dims",
            "self-duality",
        ] {
            let outcome = run_suite(find_suite(name).unwrap(), &config);
            assert!(outcome.passed(), "{}", outcome.summary_line());
        }
    }

    #[test]
    fn small_bound_is_reported() {
        let config = VerifyConfig {
            seed: 1,
            limits: Limits::with_bound(2),
        };
        let outcome = run_suite(find_suite("exactness").unwrap(), &config);
        assert!(matches!(outcome.error, Some(Error::BoundExceeded { .. })));
    }
}
