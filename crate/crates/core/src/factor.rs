//! The comprehensive (final / discrete-fibration) factorization system on
//! finite groupoids: class-membership checkers, the factorization algorithm,
//! unique lifting, and orthogonality fillers.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::functor::{comma_partition, GpdFunctor};
use crate::groupoid::{FinGroupoid, Gpd};
use crate::verdict::Check;

/// Witness against unique lifting: the arrow `beta` has `lifts` liftings
/// (0 or ≥ 2) with codomain `at`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DfibWitness {
    pub beta: usize,
    pub at: usize,
    pub lifts: usize,
}

/// A functor is a discrete fibration when every arrow `β : b → F(a′)` of the
/// target has exactly one lifting with codomain `a′`.
pub fn is_discrete_fibration(f: &GpdFunctor) -> Check<DfibWitness> {
    for a_prime in 0..f.source().n_objects() {
        for &beta in f.target().arrows_into(f.obj(a_prime)) {
            let lifts = f
                .source()
                .arrows_into(a_prime)
                .iter()
                .filter(|&&alpha| f.arr(alpha) == beta)
                .count();
            if lifts != 1 {
                return Check::Fails(DfibWitness {
                    beta,
                    at: a_prime,
                    lifts,
                });
            }
        }
    }
    Check::Holds
}

/// Discrete opfibration: the opposite functor is a discrete fibration.
pub fn is_discrete_opfibration(f: &GpdFunctor) -> Check<DfibWitness> {
    is_discrete_fibration(&f.opposite())
}

/// Witness against finality: the comma groupoid over `b` has `components`
/// connected components (0 means empty).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinalityWitness {
    pub b: usize,
    pub components: usize,
}

/// A functor is final when every comma groupoid `(b/F)` is non-empty and
/// connected.
pub fn is_final(f: &GpdFunctor) -> Check<FinalityWitness> {
    for b in 0..f.target().n_objects() {
        let comma = comma_partition(b, f);
        let components = comma.partition.blocks.len();
        if components != 1 {
            return Check::Fails(FinalityWitness { b, components });
        }
    }
    Check::Holds
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LiftError {
    #[error("not a discrete fibration at (beta={beta}, at={at}): {lifts} lifts")]
    PreconditionViolated {
        beta: usize,
        at: usize,
        lifts: usize,
    },
    #[error("arrow {beta} does not end under object {at}")]
    BoundaryMismatch { beta: usize, at: usize },
}

/// The unique lift of `beta` along a discrete fibration, with codomain
/// `a_prime`. Uniqueness is checked at this instance; a violation reports
/// the failed precondition.
pub fn dfib_lift(f: &GpdFunctor, beta: usize, a_prime: usize) -> Result<usize, LiftError> {
    if f.target().cod(beta) != f.obj(a_prime) {
        return Err(LiftError::BoundaryMismatch { beta, at: a_prime });
    }
    let lifts: Vec<usize> = f
        .source()
        .arrows_into(a_prime)
        .iter()
        .copied()
        .filter(|&alpha| f.arr(alpha) == beta)
        .collect();
    if lifts.len() == 1 {
        Ok(lifts[0])
    } else {
        Err(LiftError::PreconditionViolated {
            beta,
            at: a_prime,
            lifts: lifts.len(),
        })
    }
}

/// One object of the factorization middle: a connected component of a comma
/// groupoid, named by its least member.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MiddleObject {
    /// Object of the target under this component.
    pub base: usize,
    /// The component's comma objects `(β, a)`, ascending.
    pub members: Vec<(usize, usize)>,
    /// Least member, used as the canonical name.
    pub representative: (usize, usize),
}

/// The comprehensive factorization `F = dfib_part ∘ final_part` through the
/// middle groupoid whose objects over `b` are the components of `(b/F)` and
/// whose arrows are the unique lifts of target arrows.
#[derive(Clone, Debug)]
pub struct FactorizationResult {
    pub final_part: GpdFunctor,
    pub middle: Gpd,
    pub dfib_part: GpdFunctor,
    pub provenance: Vec<MiddleObject>,
    fibers: Vec<Vec<usize>>,
    arrow_offset: Vec<usize>,
    fiber_rank: Vec<usize>,
    pair_to_middle: HashMap<(usize, usize), usize>,
}

impl FactorizationResult {
    /// Middle objects lying over the target object `b`.
    pub fn fiber(&self, b: usize) -> &[usize] {
        &self.fibers[b]
    }

    /// The middle arrow lifting `beta` with codomain `m`.
    pub fn middle_arrow(&self, beta: usize, m: usize) -> usize {
        self.arrow_offset[beta] + self.fiber_rank[m]
    }

    /// Transport of a fiber element along `beta : b′ → b` (precomposition on
    /// representatives).
    pub fn transport(&self, m: usize, beta: usize, target: &FinGroupoid) -> usize {
        let (beta_r, a) = self.provenance[m].representative;
        self.pair_to_middle[&(target.comp(beta_r, beta), a)]
    }

    /// The middle object containing the comma object `(β, a)`.
    pub fn class_of(&self, beta: usize, a: usize) -> usize {
        self.pair_to_middle[&(beta, a)]
    }
}

/// Factors `F : A → B` as a final functor followed by a discrete fibration.
pub fn comprehensive_factorization(f: &GpdFunctor) -> FactorizationResult {
    let a_gpd = f.source();
    let b_gpd = f.target();
    let mut provenance: Vec<MiddleObject> = Vec::new();
    let mut fibers: Vec<Vec<usize>> = Vec::with_capacity(b_gpd.n_objects());
    let mut pair_to_middle: HashMap<(usize, usize), usize> = HashMap::new();
    for b in 0..b_gpd.n_objects() {
        let comma = comma_partition(b, f);
        let mut fiber = Vec::with_capacity(comma.partition.blocks.len());
        for block in &comma.partition.blocks {
            let members: Vec<(usize, usize)> = block.iter().map(|&i| comma.objects[i]).collect();
            let id = provenance.len();
            for &pair in &members {
                pair_to_middle.insert(pair, id);
            }
            fiber.push(id);
            provenance.push(MiddleObject {
                base: b,
                members: members.clone(),
                representative: members[0],
            });
        }
        fibers.push(fiber);
    }
    let n_mid = provenance.len();
    let mut fiber_rank = vec![0usize; n_mid];
    for fiber in &fibers {
        for (r, &m) in fiber.iter().enumerate() {
            fiber_rank[m] = r;
        }
    }
    // Arrows of the middle: one lift (β, m) for each target arrow β and each
    // fiber element m over cod β, with domain the transport of m along β.
    let mut arrow_offset = vec![0usize; b_gpd.n_arrows()];
    let mut arrows: Vec<(usize, usize)> = Vec::new();
    for beta in 0..b_gpd.n_arrows() {
        arrow_offset[beta] = arrows.len();
        for &m in &fibers[b_gpd.cod(beta)] {
            arrows.push((beta, m));
        }
    }
    let transport = |m: usize, beta: usize| -> usize {
        let (beta_r, a) = provenance[m].representative;
        pair_to_middle[&(b_gpd.comp(beta_r, beta), a)]
    };
    let arrow_id = |beta: usize, m: usize| -> usize { arrow_offset[beta] + fiber_rank[m] };
    let mut dom = vec![0usize; arrows.len()];
    let mut cod = vec![0usize; arrows.len()];
    let mut inverse = vec![0usize; arrows.len()];
    for (k, &(beta, m)) in arrows.iter().enumerate() {
        let source = transport(m, beta);
        dom[k] = source;
        cod[k] = m;
        inverse[k] = arrow_id(b_gpd.inverse(beta), source);
    }
    let identity: Vec<usize> = (0..n_mid)
        .map(|m| arrow_id(b_gpd.identity(provenance[m].base), m))
        .collect();
    let mut compose = HashMap::new();
    for (k_f, &(beta_f, m_f)) in arrows.iter().enumerate() {
        // Arrows g with dom g = cod f: g = (β_g, m_g) where m_g is m_f
        // transported backwards along β_g.
        for &beta_g in b_gpd.arrows_from(b_gpd.cod(beta_f)) {
            let m_g = transport(m_f, b_gpd.inverse(beta_g));
            let k_g = arrow_id(beta_g, m_g);
            compose.insert((k_g, k_f), arrow_id(b_gpd.comp(beta_g, beta_f), m_g));
        }
    }
    let middle: Gpd = Arc::new(FinGroupoid::assemble(
        n_mid, dom, cod, identity, inverse, compose,
    ));
    let final_obj: Vec<usize> = (0..a_gpd.n_objects())
        .map(|a| pair_to_middle[&(b_gpd.identity(f.obj(a)), a)])
        .collect();
    let final_arr: Vec<usize> = (0..a_gpd.n_arrows())
        .map(|alpha| arrow_id(f.arr(alpha), final_obj[a_gpd.cod(alpha)]))
        .collect();
    let final_part = GpdFunctor::assemble(a_gpd.clone(), middle.clone(), final_obj, final_arr);
    let dfib_part = GpdFunctor::assemble(
        middle.clone(),
        b_gpd.clone(),
        provenance.iter().map(|mo| mo.base).collect(),
        arrows.iter().map(|&(beta, _)| beta).collect(),
    );
    FactorizationResult {
        final_part,
        middle,
        dfib_part,
        provenance,
        fibers,
        arrow_offset,
        fiber_rank,
        pair_to_middle,
    }
}

/// A commuting square with a candidate final functor on the left and a
/// candidate discrete fibration on the right.
#[derive(Clone, Debug)]
pub struct LiftingSquare {
    pub top: GpdFunctor,
    pub bottom: GpdFunctor,
    pub left: GpdFunctor,
    pub right: GpdFunctor,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FillerError {
    #[error("square boundaries mismatch or the square does not commute")]
    MalformedSquare,
    #[error("no filler exists: {0}")]
    NoFiller(String),
    #[error("multiple fillers exist (left leg not final, or right leg not a discrete fibration)")]
    MultipleFillers,
    #[error("filler search budget exhausted")]
    SearchBudgetExceeded,
}

impl LiftingSquare {
    pub fn new(
        top: GpdFunctor,
        bottom: GpdFunctor,
        left: GpdFunctor,
        right: GpdFunctor,
    ) -> Result<Self, FillerError> {
        let ok = top.source() == left.source()
            && top.target() == right.source()
            && bottom.source() == left.target()
            && bottom.target() == right.target()
            && right.compose(&top) == bottom.compose(&left);
        if ok {
            Ok(LiftingSquare {
                top,
                bottom,
                left,
                right,
            })
        } else {
            Err(FillerError::MalformedSquare)
        }
    }
}

const FILLER_BUDGET: usize = 1_000_000;

/// The diagonal functor `d` with `d ∘ left = top` and `right ∘ d = bottom`.
///
/// When the left leg is final and the right leg a discrete fibration the
/// filler exists uniquely and is computed by transporting finality witnesses
/// through unique lifts, with well-definedness checked over every comma
/// representative. Otherwise the outcome (no filler / several fillers) names
/// the violated precondition.
pub fn orthogonal_filler(square: &LiftingSquare) -> Result<GpdFunctor, FillerError> {
    let b_gpd = square.left.target();
    let x_gpd = square.right.source();
    // Forced object values: for every comma object (β, a) of (b/left), the
    // filler must send b to the domain of the unique right-lift of bottom(β)
    // with codomain top(a).
    let mut candidates: Vec<Option<Vec<usize>>> = Vec::with_capacity(b_gpd.n_objects());
    for b in 0..b_gpd.n_objects() {
        let comma = comma_partition(b, &square.left);
        if comma.objects.is_empty() {
            candidates.push(None);
            continue;
        }
        let mut forced: Option<Vec<usize>> = None;
        for &(beta, a) in &comma.objects {
            let image = square.bottom.arr(beta);
            let lifts: Vec<usize> = x_gpd
                .arrows_into(square.top.obj(a))
                .iter()
                .copied()
                .filter(|&delta| square.right.arr(delta) == image)
                .map(|delta| x_gpd.dom(delta))
                .collect();
            if lifts.is_empty() {
                return Err(FillerError::NoFiller(format!(
                    "right leg has no lift of the image of arrow {beta} at object {a} \
                     (not a discrete fibration)"
                )));
            }
            let mut lifts = lifts;
            lifts.sort_unstable();
            lifts.dedup();
            forced = Some(match forced {
                None => lifts,
                Some(prev) => {
                    let inter: Vec<usize> =
                        prev.into_iter().filter(|v| lifts.contains(v)).collect();
                    if inter.is_empty() {
                        return Err(FillerError::NoFiller(format!(
                            "comma representatives over object {b} force conflicting \
                             values (left leg not final or square degenerate)"
                        )));
                    }
                    inter
                }
            });
        }
        candidates.push(forced);
    }
    let unique = candidates
        .iter()
        .all(|c| matches!(c, Some(v) if v.len() == 1));
    if unique {
        let obj_map: Vec<usize> = candidates.iter().map(|c| c.as_ref().unwrap()[0]).collect();
        let mut fillers = fillers_for_objects(square, &obj_map, 2)?;
        return match fillers.len() {
            1 => Ok(fillers.pop().unwrap()),
            0 => Err(FillerError::NoFiller(
                "forced object values admit no compatible arrow assignment".into(),
            )),
            _ => Err(FillerError::MultipleFillers),
        };
    }
    // Underdetermined: enumerate completions and count distinct fillers.
    let full_fiber = |b: usize| -> Vec<usize> {
        (0..x_gpd.n_objects())
            .filter(|&x| square.right.obj(x) == square.bottom.obj(b))
            .collect()
    };
    let option_sets: Vec<Vec<usize>> = candidates
        .iter()
        .enumerate()
        .map(|(b, c)| c.clone().unwrap_or_else(|| full_fiber(b)))
        .collect();
    if option_sets.iter().any(|s| s.is_empty()) {
        return Err(FillerError::NoFiller(
            "some object has an empty candidate fiber".into(),
        ));
    }
    let mut combos: usize = 1;
    for s in &option_sets {
        combos = combos.saturating_mul(s.len());
        if combos > FILLER_BUDGET {
            return Err(FillerError::SearchBudgetExceeded);
        }
    }
    let mut found: Option<GpdFunctor> = None;
    let mut assignment = vec![0usize; option_sets.len()];
    loop {
        let obj_map: Vec<usize> = assignment
            .iter()
            .enumerate()
            .map(|(b, &i)| option_sets[b][i])
            .collect();
        for filler in fillers_for_objects(square, &obj_map, 2)? {
            match found {
                None => found = Some(filler),
                Some(_) => return Err(FillerError::MultipleFillers),
            }
        }
        // Advance the mixed-radix counter.
        let mut i = 0;
        loop {
            if i == assignment.len() {
                return match found {
                    Some(filler) => Ok(filler),
                    None => Err(FillerError::NoFiller(
                        "no object assignment extends to a filler".into(),
                    )),
                };
            }
            assignment[i] += 1;
            if assignment[i] < option_sets[i].len() {
                break;
            }
            assignment[i] = 0;
            i += 1;
        }
        if assignment.is_empty() {
            return match found {
                Some(filler) => Ok(filler),
                None => Err(FillerError::NoFiller(
                    "empty object assignment fails".into(),
                )),
            };
        }
    }
}

/// Extends an object assignment to fillers, up to `limit` of them. Arrows
/// with several compatible lifts (a right leg that is not a discrete
/// fibration) are enumerated within the budget.
fn fillers_for_objects(
    square: &LiftingSquare,
    obj_map: &[usize],
    limit: usize,
) -> Result<Vec<GpdFunctor>, FillerError> {
    let b_gpd = square.left.target();
    let x_gpd = square.right.source();
    let mut candidates: Vec<Vec<usize>> = Vec::with_capacity(b_gpd.n_arrows());
    let mut combos: usize = 1;
    for g in 0..b_gpd.n_arrows() {
        let image = square.bottom.arr(g);
        let lifts: Vec<usize> = x_gpd
            .arrows_into(obj_map[b_gpd.cod(g)])
            .iter()
            .copied()
            .filter(|&delta| {
                square.right.arr(delta) == image && x_gpd.dom(delta) == obj_map[b_gpd.dom(g)]
            })
            .collect();
        if lifts.is_empty() {
            return Ok(Vec::new());
        }
        combos = combos.saturating_mul(lifts.len());
        if combos > FILLER_BUDGET {
            return Err(FillerError::SearchBudgetExceeded);
        }
        candidates.push(lifts);
    }
    let mut fillers = Vec::new();
    let mut pick = vec![0usize; candidates.len()];
    loop {
        let arr_map: Vec<usize> = pick
            .iter()
            .enumerate()
            .map(|(g, &i)| candidates[g][i])
            .collect();
        if let Ok(filler) =
            GpdFunctor::validate(b_gpd.clone(), x_gpd.clone(), obj_map.to_vec(), arr_map)
        {
            if filler.compose(&square.left) == square.top
                && square.right.compose(&filler) == square.bottom
            {
                fillers.push(filler);
                if fillers.len() >= limit {
                    return Ok(fillers);
                }
            }
        }
        let mut i = 0;
        loop {
            if i == pick.len() {
                return Ok(fillers);
            }
            pick[i] += 1;
            if pick[i] < candidates[i].len() {
                break;
            }
            pick[i] = 0;
            i += 1;
        }
        if pick.is_empty() {
            return Ok(fillers);
        }
    }
}
