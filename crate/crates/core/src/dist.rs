//! Distributors between finite groupoids and their presentation as discrete
//! two-sided fibrations.
//!
//! Orientation conventions, fixed here once and deferred to by every other
//! module: a distributor `S` in `Dist(A, B)` is a Set-valued functor
//! `B^op × A → Set`, stored as fibers `S(b, a)` with a left action of `A`
//! (`α : a → a′` sends `S(b,a)` to `S(b,a′)`) and a right action of `B`
//! (`β : b′ → b` sends `S(b,a)` to `S(b′,a)`). Composition pairs
//! `S ∈ Dist(A,B)` with `T ∈ Dist(B,C)` to give `T⊗S ∈ Dist(A,C)`.
//! Fiber elements are integer-indexed per `(b, a)` pair, flattened globally
//! in `(b, a, local)` order.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::factor::{is_discrete_fibration, is_discrete_opfibration};
use crate::functor::{pair_into_product, GpdFunctor};
use crate::groupoid::{FinGroupoid, Gpd};
use crate::verdict::Check;

/// Unvalidated distributor tables. Actions are given as triples on global
/// element indices.
#[derive(Clone, Debug)]
pub struct RawDistributor {
    pub source: Gpd,
    pub target: Gpd,
    /// Fiber sizes by pair index `b·|A₀| + a`.
    pub fiber_sizes: Vec<usize>,
    /// Entries `(alpha, s, alpha·s)`.
    pub left: Vec<(usize, usize, usize)>,
    /// Entries `(s, beta, s·beta)`.
    pub right: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistributorError {
    #[error("fiber size table has wrong length")]
    BadShape,
    #[error("action entry refers to an out-of-range index")]
    EntryOutOfRange,
    #[error("duplicate action entry for ({0},{1})")]
    DuplicateEntry(usize, usize),
    #[error("action entry ({0},{1}) violates the boundary discipline")]
    EntryBoundary(usize, usize),
    #[error("missing action entry for ({0},{1})")]
    MissingEntry(usize, usize),
    #[error("left action not functorial on (alpha'={0}, alpha={1}, s={2})")]
    LeftActionNotFunctorial(usize, usize, usize),
    #[error("right action not functorial on (s={0}, beta={1}, beta'={2})")]
    RightActionNotFunctorial(usize, usize, usize),
    #[error("actions incompatible on (alpha={0}, s={1}, beta={2})")]
    ActionsIncompatible(usize, usize, usize),
}

/// A validated distributor in `Dist(A, B)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Distributor {
    source: Gpd,
    target: Gpd,
    fiber_sizes: Vec<usize>,
    offsets: Vec<usize>,
    /// Global element -> (b, a, local).
    elem_info: Vec<(usize, usize, usize)>,
    left: HashMap<(usize, usize), usize>,
    right: HashMap<(usize, usize), usize>,
}

impl Distributor {
    /// Checks shape and all three action-law families exhaustively.
    pub fn validate(raw: RawDistributor) -> Result<Self, DistributorError> {
        let a_gpd = &raw.source;
        let b_gpd = &raw.target;
        let n_pairs = b_gpd.n_objects() * a_gpd.n_objects();
        if raw.fiber_sizes.len() != n_pairs {
            return Err(DistributorError::BadShape);
        }
        let mut offsets = Vec::with_capacity(n_pairs);
        let mut elem_info = Vec::new();
        let mut total = 0usize;
        for b in 0..b_gpd.n_objects() {
            for a in 0..a_gpd.n_objects() {
                offsets.push(total);
                let size = raw.fiber_sizes[b * a_gpd.n_objects() + a];
                for local in 0..size {
                    elem_info.push((b, a, local));
                }
                total += size;
            }
        }
        let mut left = HashMap::new();
        for &(alpha, s, result) in &raw.left {
            if alpha >= a_gpd.n_arrows() || s >= total || result >= total {
                return Err(DistributorError::EntryOutOfRange);
            }
            let (b, a, _) = elem_info[s];
            let (rb, ra, _) = elem_info[result];
            if a_gpd.dom(alpha) != a || rb != b || ra != a_gpd.cod(alpha) {
                return Err(DistributorError::EntryBoundary(alpha, s));
            }
            if left.insert((alpha, s), result).is_some() {
                return Err(DistributorError::DuplicateEntry(alpha, s));
            }
        }
        let mut right = HashMap::new();
        for &(s, beta, result) in &raw.right {
            if beta >= b_gpd.n_arrows() || s >= total || result >= total {
                return Err(DistributorError::EntryOutOfRange);
            }
            let (b, a, _) = elem_info[s];
            let (rb, ra, _) = elem_info[result];
            if b_gpd.cod(beta) != b || ra != a || rb != b_gpd.dom(beta) {
                return Err(DistributorError::EntryBoundary(s, beta));
            }
            if right.insert((s, beta), result).is_some() {
                return Err(DistributorError::DuplicateEntry(s, beta));
            }
        }
        // Totality over exactly the composable pairs.
        for s in 0..total {
            let (b, a, _) = elem_info[s];
            for &alpha in a_gpd.arrows_from(a) {
                if !left.contains_key(&(alpha, s)) {
                    return Err(DistributorError::MissingEntry(alpha, s));
                }
            }
            for &beta in b_gpd.arrows_into(b) {
                if !right.contains_key(&(s, beta)) {
                    return Err(DistributorError::MissingEntry(s, beta));
                }
            }
        }
        let dist = Distributor {
            source: raw.source.clone(),
            target: raw.target.clone(),
            fiber_sizes: raw.fiber_sizes,
            offsets,
            elem_info,
            left,
            right,
        };
        // Left action laws.
        for s in 0..total {
            let (_, a, _) = dist.elem_info[s];
            let id = a_gpd.identity(a);
            if dist.left[&(id, s)] != s {
                return Err(DistributorError::LeftActionNotFunctorial(id, id, s));
            }
            for &alpha in a_gpd.arrows_from(a) {
                let mid = dist.left[&(alpha, s)];
                for &alpha2 in a_gpd.arrows_from(a_gpd.cod(alpha)) {
                    let two_step = dist.left[&(alpha2, mid)];
                    let composite = dist.left[&(a_gpd.comp(alpha2, alpha), s)];
                    if two_step != composite {
                        return Err(DistributorError::LeftActionNotFunctorial(alpha2, alpha, s));
                    }
                }
            }
        }
        // Right action laws.
        for s in 0..total {
            let (b, _, _) = dist.elem_info[s];
            let id = b_gpd.identity(b);
            if dist.right[&(s, id)] != s {
                return Err(DistributorError::RightActionNotFunctorial(s, id, id));
            }
            for &beta in b_gpd.arrows_into(b) {
                let mid = dist.right[&(s, beta)];
                for &beta2 in b_gpd.arrows_into(b_gpd.dom(beta)) {
                    let two_step = dist.right[&(mid, beta2)];
                    let composite = dist.right[&(s, b_gpd.comp(beta, beta2))];
                    if two_step != composite {
                        return Err(DistributorError::RightActionNotFunctorial(s, beta, beta2));
                    }
                }
            }
        }
        // Compatibility.
        for s in 0..total {
            let (b, a, _) = dist.elem_info[s];
            for &alpha in a_gpd.arrows_from(a) {
                for &beta in b_gpd.arrows_into(b) {
                    let left_first = dist.right[&(dist.left[&(alpha, s)], beta)];
                    let right_first = dist.left[&(alpha, dist.right[&(s, beta)])];
                    if left_first != right_first {
                        return Err(DistributorError::ActionsIncompatible(alpha, s, beta));
                    }
                }
            }
        }
        Ok(dist)
    }

    pub(crate) fn assemble(
        source: Gpd,
        target: Gpd,
        fiber_sizes: Vec<usize>,
        left: HashMap<(usize, usize), usize>,
        right: HashMap<(usize, usize), usize>,
    ) -> Self {
        let n_a = source.n_objects();
        let mut offsets = Vec::with_capacity(fiber_sizes.len());
        let mut elem_info = Vec::new();
        let mut total = 0usize;
        for b in 0..target.n_objects() {
            for a in 0..n_a {
                offsets.push(total);
                for local in 0..fiber_sizes[b * n_a + a] {
                    elem_info.push((b, a, local));
                }
                total += fiber_sizes[b * n_a + a];
            }
        }
        Distributor {
            source,
            target,
            fiber_sizes,
            offsets,
            elem_info,
            left,
            right,
        }
    }

    /// A distributor between discrete groupoids: a bare fiber matrix with
    /// the forced identity actions. `sizes[b][a]` indexes target-then-source.
    pub fn between_discrete(source: &Gpd, target: &Gpd, sizes: &[Vec<usize>]) -> Self {
        assert!(source.n_arrows() == source.n_objects());
        assert!(target.n_arrows() == target.n_objects());
        let mut fiber_sizes = Vec::new();
        for b in 0..target.n_objects() {
            for a in 0..source.n_objects() {
                fiber_sizes.push(sizes[b][a]);
            }
        }
        let mut dist = Distributor::assemble(
            source.clone(),
            target.clone(),
            fiber_sizes,
            HashMap::new(),
            HashMap::new(),
        );
        let mut left = HashMap::new();
        let mut right = HashMap::new();
        for s in 0..dist.n_elements() {
            let (b, a, _) = dist.elem_info[s];
            left.insert((dist.source.identity(a), s), s);
            right.insert((s, dist.target.identity(b)), s);
        }
        dist.left = left;
        dist.right = right;
        dist
    }

    pub fn source(&self) -> &Gpd {
        &self.source
    }

    pub fn target(&self) -> &Gpd {
        &self.target
    }

    pub fn n_elements(&self) -> usize {
        self.elem_info.len()
    }

    pub fn fiber_size(&self, b: usize, a: usize) -> usize {
        self.fiber_sizes[b * self.source.n_objects() + a]
    }

    /// Global index of the fiber element `(b, a, local)`.
    pub fn global(&self, b: usize, a: usize, local: usize) -> usize {
        self.offsets[b * self.source.n_objects() + a] + local
    }

    /// `(b, a, local)` of a global element.
    pub fn elem(&self, s: usize) -> (usize, usize, usize) {
        self.elem_info[s]
    }

    pub fn act_left(&self, alpha: usize, s: usize) -> Option<usize> {
        self.left.get(&(alpha, s)).copied()
    }

    pub fn act_right(&self, s: usize, beta: usize) -> Option<usize> {
        self.right.get(&(s, beta)).copied()
    }

    pub(crate) fn left_of(&self, alpha: usize, s: usize) -> usize {
        self.left[&(alpha, s)]
    }

    pub(crate) fn right_of(&self, s: usize, beta: usize) -> usize {
        self.right[&(s, beta)]
    }

    pub fn raw(&self) -> RawDistributor {
        let mut left: Vec<(usize, usize, usize)> = self
            .left
            .iter()
            .map(|(&(alpha, s), &r)| (alpha, s, r))
            .collect();
        left.sort_unstable();
        let mut right: Vec<(usize, usize, usize)> = self
            .right
            .iter()
            .map(|(&(s, beta), &r)| (s, beta, r))
            .collect();
        right.sort_unstable();
        RawDistributor {
            source: self.source.clone(),
            target: self.target.clone(),
            fiber_sizes: self.fiber_sizes.clone(),
            left,
            right,
        }
    }
}

/// The identity distributor on `A`: fibers are the hom-sets `A(b, a)` with
/// actions by post- and pre-composition.
pub fn hom_distributor(a_gpd: &Gpd) -> Distributor {
    let n = a_gpd.n_objects();
    let mut fiber_sizes = vec![0usize; n * n];
    // Fiber (b, a) lists hom(b, a) in ascending arrow order; the global id of
    // an arrow is its rank there plus the fiber offset.
    let mut local_of = vec![0usize; a_gpd.n_arrows()];
    for f in 0..a_gpd.n_arrows() {
        let idx = a_gpd.dom(f) * n + a_gpd.cod(f);
        local_of[f] = fiber_sizes[idx];
        fiber_sizes[idx] += 1;
    }
    let dist = Distributor::assemble(
        a_gpd.clone(),
        a_gpd.clone(),
        fiber_sizes,
        HashMap::new(),
        HashMap::new(),
    );
    let global_of = |f: usize| dist.global(a_gpd.dom(f), a_gpd.cod(f), local_of[f]);
    let mut left = HashMap::new();
    let mut right = HashMap::new();
    for f in 0..a_gpd.n_arrows() {
        let s = global_of(f);
        for &alpha in a_gpd.arrows_from(a_gpd.cod(f)) {
            left.insert((alpha, s), global_of(a_gpd.comp(alpha, f)));
        }
        for &beta in a_gpd.arrows_into(a_gpd.dom(f)) {
            right.insert((s, beta), global_of(a_gpd.comp(f, beta)));
        }
    }
    let mut dist = dist;
    dist.left = left;
    dist.right = right;
    dist
}

/// Cached classification flags of a span; `None` means unchecked.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpanFlags {
    pub two_sided: Option<bool>,
    pub dfib_into_product: Option<bool>,
    pub opfib_into_product: Option<bool>,
}

/// A span of groupoids `A ← E → B` with cached fibration flags.
#[derive(Clone, Debug)]
pub struct TwoSidedFibSpan {
    left: GpdFunctor,
    right: GpdFunctor,
    pub flags: SpanFlags,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SpanError {
    #[error("legs do not share an apex")]
    ApexMismatch,
    #[error("span is not a discrete two-sided fibration: {0:?}")]
    NotTwoSided(TwoSidedWitness),
    #[error("lift precondition violated")]
    PreconditionViolated,
    #[error("lift arguments out of range or with mismatched endpoints")]
    BoundaryMismatch,
}

impl TwoSidedFibSpan {
    pub fn new(left: GpdFunctor, right: GpdFunctor) -> Result<Self, SpanError> {
        if left.source() != right.source() {
            return Err(SpanError::ApexMismatch);
        }
        Ok(TwoSidedFibSpan {
            left,
            right,
            flags: SpanFlags::default(),
        })
    }

    pub fn apex(&self) -> &Gpd {
        self.left.source()
    }

    /// Leg `Q : E → A`.
    pub fn left(&self) -> &GpdFunctor {
        &self.left
    }

    /// Leg `P : E → B`.
    pub fn right(&self) -> &GpdFunctor {
        &self.right
    }

    /// Runs every checker and caches the outcomes.
    pub fn classified(mut self) -> Self {
        self.flags.two_sided = Some(check_two_sided(&self).holds());
        self.flags.dfib_into_product = Some(check_dfib_into_product(&self).holds());
        self.flags.opfib_into_product = Some(check_opfib_into_product(&self).holds());
        self
    }
}

/// Failure witness for the two-sided fibration conditions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TwoSidedWitness {
    /// An arrow of `B` without a unique left-leg-vertical lift at `at`.
    VerticalLiftLeft {
        beta: usize,
        at: usize,
        count: usize,
    },
    /// An arrow of `A` without a unique right-leg-vertical lift at `at`.
    VerticalLiftRight {
        alpha: usize,
        at: usize,
        count: usize,
    },
    /// An apex arrow that is not the composite of its two vertical lifts.
    Factorization { epsilon: usize },
}

fn left_vertical_lifts(span: &TwoSidedFibSpan, beta: usize, e_prime: usize) -> Vec<usize> {
    // Arrows into e′ over β whose left-leg image is an identity.
    let apex = span.apex();
    apex.arrows_into(e_prime)
        .iter()
        .copied()
        .filter(|&eps| {
            span.right.arr(eps) == beta
                && span.left.arr(eps) == span.left.target().identity(span.left.obj(e_prime))
        })
        .collect()
}

fn right_vertical_lifts(span: &TwoSidedFibSpan, alpha: usize, e: usize) -> Vec<usize> {
    let apex = span.apex();
    apex.arrows_from(e)
        .iter()
        .copied()
        .filter(|&eps| {
            span.left.arr(eps) == alpha
                && span.right.arr(eps) == span.right.target().identity(span.right.obj(e))
        })
        .collect()
}

/// Checks the three discrete two-sided fibration conditions by enumeration.
pub fn check_two_sided(span: &TwoSidedFibSpan) -> Check<TwoSidedWitness> {
    let apex = span.apex();
    let b_gpd = span.right.target();
    let a_gpd = span.left.target();
    for e_prime in 0..apex.n_objects() {
        for &beta in b_gpd.arrows_into(span.right.obj(e_prime)) {
            let count = left_vertical_lifts(span, beta, e_prime).len();
            if count != 1 {
                return Check::Fails(TwoSidedWitness::VerticalLiftLeft {
                    beta,
                    at: e_prime,
                    count,
                });
            }
        }
    }
    for e in 0..apex.n_objects() {
        for &alpha in a_gpd.arrows_from(span.left.obj(e)) {
            let count = right_vertical_lifts(span, alpha, e).len();
            if count != 1 {
                return Check::Fails(TwoSidedWitness::VerticalLiftRight {
                    alpha,
                    at: e,
                    count,
                });
            }
        }
    }
    for epsilon in 0..apex.n_arrows() {
        let e = apex.dom(epsilon);
        let e_prime = apex.cod(epsilon);
        let p = right_vertical_lifts(span, span.left.arr(epsilon), e)[0];
        let q = left_vertical_lifts(span, span.right.arr(epsilon), e_prime)[0];
        if apex.cod(p) != apex.dom(q) || apex.comp(q, p) != epsilon {
            return Check::Fails(TwoSidedWitness::Factorization { epsilon });
        }
    }
    Check::Holds
}

/// The paired functor `⟨Q,P⟩ : E → A×B` is a discrete fibration.
pub fn check_dfib_into_product(span: &TwoSidedFibSpan) -> Check<crate::factor::DfibWitness> {
    let (_, paired) = pair_into_product(&span.left, &span.right);
    is_discrete_fibration(&paired)
}

/// The paired functor `⟨Q,P⟩ : E → A×B` is a discrete opfibration.
pub fn check_opfib_into_product(span: &TwoSidedFibSpan) -> Check<crate::factor::DfibWitness> {
    let (_, paired) = pair_into_product(&span.left, &span.right);
    is_discrete_opfibration(&paired)
}

/// The apex groupoid of the elements span of `S`: objects are the fiber
/// elements, and there is one arrow into `s′` for every pair of arrows
/// `(α, β)` ending under `s′`; its domain is `α⁻¹·(s′·β)`.
pub fn elements_span(dist: &Distributor) -> TwoSidedFibSpan {
    let a_gpd = dist.source();
    let b_gpd = dist.target();
    let n_elem = dist.n_elements();
    // Arrow k = (alpha, beta, s'), enumerated by ascending (s', alpha, beta).
    let mut arrows: Vec<(usize, usize, usize)> = Vec::new();
    let mut lookup: HashMap<(usize, usize, usize), usize> = HashMap::new();
    for s_prime in 0..n_elem {
        let (b, a, _) = dist.elem(s_prime);
        for &alpha in a_gpd.arrows_into(a) {
            for &beta in b_gpd.arrows_into(b) {
                lookup.insert((alpha, beta, s_prime), arrows.len());
                arrows.push((alpha, beta, s_prime));
            }
        }
    }
    let dom_of = |alpha: usize, beta: usize, s_prime: usize| -> usize {
        dist.left_of(a_gpd.inverse(alpha), dist.right_of(s_prime, beta))
    };
    let mut dom = vec![0usize; arrows.len()];
    let mut cod = vec![0usize; arrows.len()];
    let mut inverse = vec![0usize; arrows.len()];
    for (k, &(alpha, beta, s_prime)) in arrows.iter().enumerate() {
        let s = dom_of(alpha, beta, s_prime);
        dom[k] = s;
        cod[k] = s_prime;
        inverse[k] = lookup[&(a_gpd.inverse(alpha), b_gpd.inverse(beta), s)];
    }
    let identity: Vec<usize> = (0..n_elem)
        .map(|s| {
            let (b, a, _) = dist.elem(s);
            lookup[&(a_gpd.identity(a), b_gpd.identity(b), s)]
        })
        .collect();
    let mut by_dom: Vec<Vec<usize>> = vec![Vec::new(); n_elem];
    for (k, _) in arrows.iter().enumerate() {
        by_dom[dom[k]].push(k);
    }
    let mut compose = HashMap::new();
    for (k1, &(alpha1, beta1, s1)) in arrows.iter().enumerate() {
        for &k2 in &by_dom[s1] {
            let (alpha2, beta2, s2) = arrows[k2];
            compose.insert(
                (k2, k1),
                lookup[&(a_gpd.comp(alpha2, alpha1), b_gpd.comp(beta2, beta1), s2)],
            );
        }
    }
    let apex: Gpd = Arc::new(FinGroupoid::assemble(
        n_elem, dom, cod, identity, inverse, compose,
    ));
    let left = GpdFunctor::assemble(
        apex.clone(),
        a_gpd.clone(),
        (0..n_elem).map(|s| dist.elem(s).1).collect(),
        arrows.iter().map(|&(alpha, _, _)| alpha).collect(),
    );
    let right = GpdFunctor::assemble(
        apex.clone(),
        b_gpd.clone(),
        (0..n_elem).map(|s| dist.elem(s).0).collect(),
        arrows.iter().map(|&(_, beta, _)| beta).collect(),
    );
    let mut span = TwoSidedFibSpan::new(left, right).expect("legs share the apex");
    span.flags.two_sided = Some(true);
    span
}

/// Arrow index of an elements-style span keyed by `(left label, right label,
/// codomain object)`; unique for discrete two-sided fibrations.
pub fn arrow_by_labels(span: &TwoSidedFibSpan) -> HashMap<(usize, usize, usize), usize> {
    let apex = span.apex();
    let mut map = HashMap::with_capacity(apex.n_arrows());
    for k in 0..apex.n_arrows() {
        map.insert((span.left().arr(k), span.right().arr(k), apex.cod(k)), k);
    }
    map
}

/// Reads a distributor off a discrete two-sided fibration: fibers are apex
/// objects over each `(a, b)`, actions the unique vertical lifts.
pub fn span_to_distributor(span: &TwoSidedFibSpan) -> Result<Distributor, SpanError> {
    if let Check::Fails(w) = check_two_sided(span) {
        return Err(SpanError::NotTwoSided(w));
    }
    let apex = span.apex();
    let a_gpd = span.left.target();
    let b_gpd = span.right.target();
    let n = a_gpd.n_objects();
    let mut fiber_sizes = vec![0usize; b_gpd.n_objects() * n];
    let mut local_of = vec![0usize; apex.n_objects()];
    for e in 0..apex.n_objects() {
        let idx = span.right.obj(e) * n + span.left.obj(e);
        local_of[e] = fiber_sizes[idx];
        fiber_sizes[idx] += 1;
    }
    let dist = Distributor::assemble(
        a_gpd.clone(),
        b_gpd.clone(),
        fiber_sizes,
        HashMap::new(),
        HashMap::new(),
    );
    let global_of = |e: usize| dist.global(span.right.obj(e), span.left.obj(e), local_of[e]);
    let mut left = HashMap::new();
    let mut right = HashMap::new();
    for e in 0..apex.n_objects() {
        let s = global_of(e);
        for &alpha in a_gpd.arrows_from(span.left.obj(e)) {
            let eps = right_vertical_lifts(span, alpha, e)[0];
            left.insert((alpha, s), global_of(apex.cod(eps)));
        }
        for &beta in b_gpd.arrows_into(span.right.obj(e)) {
            let eps = left_vertical_lifts(span, beta, e)[0];
            right.insert((s, beta), global_of(apex.dom(eps)));
        }
    }
    let mut dist = dist;
    dist.left = left;
    dist.right = right;
    Ok(dist)
}

/// The unique lift of `(α, β)` at the apex object `s′` over
/// `(cod α, cod β)`: returns the domain object and the lifted arrow.
/// Computed by the general two-sided recipe — lift `α⁻¹` vertically on the
/// right leg, invert, then lift `β` vertically on the left leg and compose.
pub fn two_sided_lift(
    span: &TwoSidedFibSpan,
    alpha: usize,
    beta: usize,
    s_prime: usize,
) -> Result<(usize, usize), SpanError> {
    let a_gpd = span.left.target();
    let b_gpd = span.right.target();
    let apex = span.apex();
    if s_prime >= apex.n_objects()
        || alpha >= a_gpd.n_arrows()
        || beta >= b_gpd.n_arrows()
        || span.left.obj(s_prime) != a_gpd.cod(alpha)
        || span.right.obj(s_prime) != b_gpd.cod(beta)
    {
        return Err(SpanError::BoundaryMismatch);
    }
    if let Check::Fails(_) = check_two_sided(span) {
        return Err(SpanError::PreconditionViolated);
    }
    let down = right_vertical_lifts(span, a_gpd.inverse(alpha), s_prime)[0];
    let alpha_hat = apex.inverse(down);
    let mid = apex.dom(alpha_hat);
    let beta_hat = left_vertical_lifts(span, beta, mid)[0];
    let lift = apex.comp(alpha_hat, beta_hat);
    Ok((apex.dom(lift), lift))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Group;

    fn z2() -> Gpd {
        Arc::new(FinGroupoid::from_group(&Group::cyclic(2)))
    }

    /// The regular Z2-biset: one fiber {e, g} with both actions by
    /// multiplication.
    pub(crate) fn regular_z2_biset() -> Distributor {
        let g = z2();
        let raw = RawDistributor {
            source: g.clone(),
            target: g,
            fiber_sizes: vec![2],
            left: vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            right: vec![(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)],
        };
        Distributor::validate(raw).unwrap()
    }

    #[test]
    fn discrete_fiber_matrix_validates() {
        let a = Arc::new(FinGroupoid::discrete(2));
        let b = Arc::new(FinGroupoid::discrete(2));
        let d = Distributor::between_discrete(&a, &b, &[vec![2, 0], vec![1, 3]]);
        assert!(Distributor::validate(d.raw()).is_ok());
        assert_eq!(d.n_elements(), 6);
        assert_eq!(d.fiber_size(1, 1), 3);
    }

    #[test]
    fn regular_biset_validates_and_acts() {
        let d = regular_z2_biset();
        assert_eq!(d.n_elements(), 2);
        assert_eq!(d.act_left(1, 0), Some(1));
        assert_eq!(d.act_right(1, 1), Some(0));
    }

    #[test]
    fn broken_right_action_is_rejected_with_a_triple() {
        let g = z2();
        let raw = RawDistributor {
            source: g.clone(),
            target: g,
            fiber_sizes: vec![2],
            left: vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            // Right action by g made constant at 0: breaks the unit-free
            // functoriality equation s·(g∘g) = (s·g)·g at s = 1.
            right: vec![(0, 0, 0), (1, 0, 1), (0, 1, 0), (1, 1, 0)],
        };
        assert_eq!(
            Distributor::validate(raw).unwrap_err(),
            DistributorError::RightActionNotFunctorial(1, 1, 1)
        );
    }

    #[test]
    fn incompatible_actions_are_rejected() {
        // One object on both sides, fiber {0,1,2}; left g swaps 0,1 and
        // right g swaps 0,2. Both are involutions (functorial) but do not
        // commute, so compatibility fails.
        let g = z2();
        let raw = RawDistributor {
            source: g.clone(),
            target: g,
            fiber_sizes: vec![3],
            left: vec![
                (0, 0, 0),
                (0, 1, 1),
                (0, 2, 2),
                (1, 0, 1),
                (1, 1, 0),
                (1, 2, 2),
            ],
            right: vec![
                (0, 0, 0),
                (1, 0, 1),
                (2, 0, 2),
                (0, 1, 2),
                (1, 1, 1),
                (2, 1, 0),
            ],
        };
        let err = Distributor::validate(raw).unwrap_err();
        assert_eq!(err, DistributorError::ActionsIncompatible(1, 0, 1));
    }

    #[test]
    fn hom_distributor_shapes() {
        let d3 = Arc::new(FinGroupoid::discrete(3));
        let h = hom_distributor(&d3);
        for b in 0..3 {
            for a in 0..3 {
                assert_eq!(h.fiber_size(b, a), usize::from(a == b));
            }
        }
        let h2 = hom_distributor(&z2());
        assert_eq!(h2, regular_z2_biset());

        let ind = Arc::new(FinGroupoid::indiscrete(2));
        let hi = hom_distributor(&ind);
        for b in 0..2 {
            for a in 0..2 {
                assert_eq!(hi.fiber_size(b, a), 1);
            }
        }
    }

    #[test]
    fn elements_span_of_hom_on_discrete_is_discrete() {
        let d3 = Arc::new(FinGroupoid::discrete(3));
        let span = elements_span(&hom_distributor(&d3));
        assert_eq!(span.apex().n_objects(), 3);
        assert_eq!(span.apex().n_arrows(), 3);
        assert!(check_two_sided(&span).holds());
    }

    #[test]
    fn elements_span_of_regular_biset() {
        let span = elements_span(&regular_z2_biset());
        assert_eq!(span.apex().n_objects(), 2);
        assert_eq!(span.apex().n_arrows(), 8);
        assert_eq!(span.apex().pi0().blocks.len(), 1);
        assert!(check_two_sided(&span).holds());
        assert!(check_dfib_into_product(&span).holds());
        assert!(check_opfib_into_product(&span).holds());
    }

    #[test]
    fn empty_distributor_has_empty_apex() {
        let one = Arc::new(FinGroupoid::discrete(1));
        let d = Distributor::between_discrete(&one, &one, &[vec![0]]);
        let span = elements_span(&d);
        assert_eq!(span.apex().n_objects(), 0);
        assert_eq!(span.apex().n_arrows(), 0);
    }

    #[test]
    fn roundtrip_is_the_identity_on_tables() {
        for d in [
            regular_z2_biset(),
            hom_distributor(&Arc::new(FinGroupoid::indiscrete(2))),
            Distributor::between_discrete(
                &Arc::new(FinGroupoid::discrete(2)),
                &Arc::new(FinGroupoid::discrete(1)),
                &[vec![2, 1]],
            ),
        ] {
            let back = span_to_distributor(&elements_span(&d)).unwrap();
            assert_eq!(back, d);
        }
    }

    #[test]
    fn action_groupoid_span_to_distributor() {
        let (e, proj) = crate::factor::tests::z2_action_groupoid();
        let one = Arc::new(FinGroupoid::discrete(1));
        let q = GpdFunctor::validate(e.clone(), one, vec![0, 0], vec![0; 4]).unwrap();
        let span = TwoSidedFibSpan::new(q, proj).unwrap();
        assert!(check_two_sided(&span).holds());
        let d = span_to_distributor(&span).unwrap();
        assert_eq!(d.n_elements(), 2);
        assert_eq!(d.fiber_size(0, 0), 2);
        // The right action of g swaps the two elements: a free action.
        assert_eq!(d.act_right(0, 1), Some(1));
        assert_eq!(d.act_right(1, 1), Some(0));
    }

    #[test]
    fn degenerate_spans_fail_two_sidedness() {
        // Discrete apex over one-object Z2 on both sides: g has no lift.
        let one = Arc::new(FinGroupoid::discrete(1));
        let g = z2();
        let to_g = GpdFunctor::validate(one.clone(), g.clone(), vec![0], vec![0]).unwrap();
        let span = TwoSidedFibSpan::new(to_g.clone(), to_g).unwrap();
        assert_eq!(
            check_two_sided(&span).witness(),
            Some(&TwoSidedWitness::VerticalLiftLeft {
                beta: 1,
                at: 0,
                count: 0
            })
        );
        assert!(!check_dfib_into_product(&span).holds());
        assert!(!check_opfib_into_product(&span).holds());

        // Identity span on Z2: the lift of g would have to be g itself, but
        // g is not vertical on the other leg.
        let id = GpdFunctor::identity(&g);
        let ident_span = TwoSidedFibSpan::new(id.clone(), id).unwrap();
        assert_eq!(
            check_two_sided(&ident_span).witness(),
            Some(&TwoSidedWitness::VerticalLiftLeft {
                beta: 1,
                at: 0,
                count: 0
            })
        );

        // Duplicated vertical arrows: indiscrete apex over terminal legs.
        let ind = Arc::new(FinGroupoid::indiscrete(2));
        let bang = GpdFunctor::validate(
            ind.clone(),
            one.clone(),
            vec![0, 0],
            vec![0; ind.n_arrows()],
        )
        .unwrap();
        let dup = TwoSidedFibSpan::new(bang.clone(), bang).unwrap();
        assert!(matches!(
            check_two_sided(&dup).witness(),
            Some(&TwoSidedWitness::VerticalLiftLeft { count: 2, .. })
        ));
    }

    #[test]
    fn classified_flags_agree_with_checkers() {
        let span = elements_span(&regular_z2_biset()).classified();
        assert_eq!(span.flags.two_sided, Some(true));
        assert_eq!(span.flags.dfib_into_product, Some(true));
        assert_eq!(span.flags.opfib_into_product, Some(true));
    }

    #[test]
    fn two_sided_lift_matches_the_action_formula() {
        let d = regular_z2_biset();
        let span = elements_span(&d);
        // Identity lift is trivial.
        let (s, eps) = two_sided_lift(&span, 0, 0, 0).unwrap();
        assert_eq!(s, 0);
        assert_eq!(eps, span.apex().identity(0));
        // alpha = g, beta = e at s' = e: s = g⁻¹·e·e = g.
        let (s, eps) = two_sided_lift(&span, 1, 0, 0).unwrap();
        assert_eq!(s, 1);
        assert_eq!(span.left().arr(eps), 1);
        assert_eq!(span.right().arr(eps), 0);
        assert_eq!(span.apex().cod(eps), 0);
        // The formula route agrees on every instance.
        for s_prime in 0..2 {
            for alpha in 0..2 {
                for beta in 0..2 {
                    let (got, _) = two_sided_lift(&span, alpha, beta, s_prime).unwrap();
                    let formula = d.left_of(d.source().inverse(alpha), d.right_of(s_prime, beta));
                    assert_eq!(got, formula);
                }
            }
        }
        // Composing two lifts equals the lift of the composites.
        let (mid, l1) = two_sided_lift(&span, 1, 1, 0).unwrap();
        let (bottom, l2) = two_sided_lift(&span, 1, 1, mid).unwrap();
        let (direct, l12) =
            two_sided_lift(&span, d.source().comp(1, 1), d.target().comp(1, 1), 0).unwrap();
        assert_eq!(bottom, direct);
        assert_eq!(span.apex().comp(l1, l2), l12);
    }
}
