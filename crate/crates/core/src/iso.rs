//! Exhaustive search for isomorphisms between groupoids over a common base.
//!
//! Given `m1 : M1 → X` and `m2 : M2 → X`, looks for an isomorphism
//! `φ : M1 → M2` with `m2 ∘ φ = m1` on the nose. The search backtracks over
//! fiber-preserving object and arrow assignments with an explicit choice
//! stack, pruned by cardinality invariants, and is bounded by a node budget
//! so audits stay finite.

use thiserror::Error;

use crate::functor::GpdFunctor;

pub const DEFAULT_SEARCH_BUDGET: usize = 1_000_000;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum IsoSearchError {
    #[error("functors do not share a codomain")]
    CodomainMismatch,
    #[error(
        "search budget exhausted after {0} nodes (inputs too large, not a non-existence proof)"
    )]
    SearchBudgetExceeded(usize),
}

pub fn iso_over_base(
    m1: &GpdFunctor,
    m2: &GpdFunctor,
) -> Result<Option<GpdFunctor>, IsoSearchError> {
    iso_over_base_with_budget(m1, m2, DEFAULT_SEARCH_BUDGET)
}

pub fn iso_over_base_with_budget(
    m1: &GpdFunctor,
    m2: &GpdFunctor,
    budget: usize,
) -> Result<Option<GpdFunctor>, IsoSearchError> {
    if m1.target() != m2.target() {
        return Err(IsoSearchError::CodomainMismatch);
    }
    let g1 = m1.source();
    let g2 = m2.source();
    if g1.n_objects() != g2.n_objects() || g1.n_arrows() != g2.n_arrows() {
        return Ok(None);
    }
    let x = m1.target();
    // Fiber cardinality invariants rule out most mismatches without search.
    let mut obj_fiber2: Vec<Vec<usize>> = vec![Vec::new(); x.n_objects()];
    for b in 0..g2.n_objects() {
        obj_fiber2[m2.obj(b)].push(b);
    }
    {
        let mut counts1 = vec![0usize; x.n_objects()];
        for a in 0..g1.n_objects() {
            counts1[m1.obj(a)] += 1;
        }
        if (0..x.n_objects()).any(|p| counts1[p] != obj_fiber2[p].len()) {
            return Ok(None);
        }
        let mut arr1 = vec![0usize; x.n_arrows()];
        let mut arr2 = vec![0usize; x.n_arrows()];
        for f in 0..g1.n_arrows() {
            arr1[m1.arr(f)] += 1;
        }
        for f in 0..g2.n_arrows() {
            arr2[m2.arr(f)] += 1;
        }
        if arr1 != arr2 {
            return Ok(None);
        }
    }
    let mut search = Search {
        m1,
        m2,
        obj_map: vec![usize::MAX; g1.n_objects()],
        obj_used: vec![false; g2.n_objects()],
        arr_map: vec![usize::MAX; g1.n_arrows()],
        arr_used: vec![false; g2.n_arrows()],
        nodes: 0,
        budget,
        obj_fiber2,
    };
    if search.run()? {
        Ok(Some(GpdFunctor::assemble(
            g1.clone(),
            g2.clone(),
            search.obj_map,
            search.arr_map,
        )))
    } else {
        Ok(None)
    }
}

#[derive(Clone, Copy, Debug)]
enum Slot {
    /// Choose the image of a component root.
    Obj(usize),
    /// Choose the image of a spanning-tree arrow; its codomain object is
    /// forced to the codomain of the chosen image.
    TreeArrow(usize, usize),
    /// Choose the image of a non-tree arrow with both endpoints fixed.
    Arrow(usize),
}

struct Search<'a> {
    m1: &'a GpdFunctor,
    m2: &'a GpdFunctor,
    obj_map: Vec<usize>,
    obj_used: Vec<bool>,
    arr_map: Vec<usize>,
    arr_used: Vec<bool>,
    nodes: usize,
    budget: usize,
    obj_fiber2: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), IsoSearchError> {
        self.nodes += 1;
        if self.nodes > self.budget {
            return Err(IsoSearchError::SearchBudgetExceeded(self.budget));
        }
        Ok(())
    }

    /// Placement order: a spanning tree of each component, so that every
    /// object after the first in its component is forced by an incident
    /// arrow, then the remaining arrows. This turns fiber-permutation
    /// thrashing into transport propagation.
    fn slots(&self) -> Vec<Slot> {
        let g1 = self.m1.source();
        let mut slots = Vec::with_capacity(g1.n_objects() + g1.n_arrows());
        let mut obj_seen = vec![false; g1.n_objects()];
        let mut arr_seen = vec![false; g1.n_arrows()];
        for root in 0..g1.n_objects() {
            if obj_seen[root] {
                continue;
            }
            obj_seen[root] = true;
            slots.push(Slot::Obj(root));
            let mut frontier = vec![root];
            while let Some(x) = frontier.pop() {
                for &f in g1.arrows_from(x) {
                    let y = g1.cod(f);
                    if !obj_seen[y] {
                        obj_seen[y] = true;
                        arr_seen[f] = true;
                        slots.push(Slot::TreeArrow(f, y));
                        frontier.push(y);
                    }
                }
            }
        }
        for f in 0..g1.n_arrows() {
            if !arr_seen[f] {
                slots.push(Slot::Arrow(f));
            }
        }
        slots
    }

    /// Iterative backtracking over the slot order.
    fn run(&mut self) -> Result<bool, IsoSearchError> {
        let slots = self.slots();
        let total = slots.len();
        if total == 0 {
            return Ok(true);
        }
        let mut candidates: Vec<Vec<usize>> = vec![Vec::new(); total];
        let mut choice: Vec<usize> = vec![0; total];
        let mut pos = 0usize;
        let mut fresh = true;
        loop {
            if pos == total {
                return Ok(true);
            }
            if fresh {
                candidates[pos] = self.candidates_at(slots[pos]);
                choice[pos] = 0;
            }
            let mut advanced = false;
            while choice[pos] < candidates[pos].len() {
                let cand = candidates[pos][choice[pos]];
                self.tick()?;
                if self.place(slots[pos], cand) {
                    advanced = true;
                    break;
                }
                choice[pos] += 1;
            }
            if advanced {
                pos += 1;
                fresh = true;
            } else {
                if pos == 0 {
                    return Ok(false);
                }
                pos -= 1;
                self.unplace(slots[pos], candidates[pos][choice[pos]]);
                choice[pos] += 1;
                fresh = false;
            }
        }
    }

    fn object_admissible(&self, a: usize, b: usize) -> bool {
        let g1 = self.m1.source();
        let g2 = self.m2.source();
        self.m2.obj(b) == self.m1.obj(a)
            && g1.arrows_from(a).len() == g2.arrows_from(b).len()
            && g1.arrows_into(a).len() == g2.arrows_into(b).len()
    }

    fn candidates_at(&self, slot: Slot) -> Vec<usize> {
        let g2 = self.m2.source();
        match slot {
            Slot::Obj(a) => {
                let mut list: Vec<usize> = self.obj_fiber2[self.m1.obj(a)]
                    .iter()
                    .copied()
                    .filter(|&b| self.object_admissible(a, b))
                    .collect();
                // Trying the same index first makes the search return the
                // identity when both inputs coincide.
                if let Some(i) = list.iter().position(|&b| b == a) {
                    list.swap(0, i);
                }
                list
            }
            Slot::TreeArrow(f, _) | Slot::Arrow(f) => {
                let g1 = self.m1.source();
                let want_dom = self.obj_map[g1.dom(f)];
                let mut list: Vec<usize> = g2
                    .arrows_from(want_dom)
                    .iter()
                    .copied()
                    .filter(|&g| self.m2.arr(g) == self.m1.arr(f))
                    .collect();
                if matches!(slot, Slot::Arrow(_)) {
                    let want_cod = self.obj_map[g1.cod(f)];
                    list.retain(|&g| g2.cod(g) == want_cod);
                }
                if let Some(i) = list.iter().position(|&g| g == f) {
                    list.swap(0, i);
                }
                list
            }
        }
    }

    fn place(&mut self, slot: Slot, cand: usize) -> bool {
        match slot {
            Slot::Obj(a) => {
                if self.obj_used[cand] {
                    return false;
                }
                self.obj_map[a] = cand;
                self.obj_used[cand] = true;
                true
            }
            Slot::TreeArrow(f, new_obj) => {
                let g2 = self.m2.source();
                let target = g2.cod(cand);
                if self.arr_used[cand]
                    || self.obj_used[target]
                    || !self.object_admissible(new_obj, target)
                {
                    return false;
                }
                self.arr_map[f] = cand;
                self.arr_used[cand] = true;
                self.obj_map[new_obj] = target;
                self.obj_used[target] = true;
                if self.consistent(f) {
                    true
                } else {
                    self.arr_map[f] = usize::MAX;
                    self.arr_used[cand] = false;
                    self.obj_map[new_obj] = usize::MAX;
                    self.obj_used[target] = false;
                    false
                }
            }
            Slot::Arrow(f) => {
                if self.arr_used[cand] {
                    return false;
                }
                self.arr_map[f] = cand;
                self.arr_used[cand] = true;
                if self.consistent(f) {
                    true
                } else {
                    self.arr_map[f] = usize::MAX;
                    self.arr_used[cand] = false;
                    false
                }
            }
        }
    }

    fn unplace(&mut self, slot: Slot, cand: usize) {
        match slot {
            Slot::Obj(a) => {
                self.obj_map[a] = usize::MAX;
                self.obj_used[cand] = false;
            }
            Slot::TreeArrow(f, new_obj) => {
                let target = self.m2.source().cod(cand);
                self.arr_map[f] = usize::MAX;
                self.arr_used[cand] = false;
                self.obj_map[new_obj] = usize::MAX;
                self.obj_used[target] = false;
            }
            Slot::Arrow(f) => {
                self.arr_map[f] = usize::MAX;
                self.arr_used[cand] = false;
            }
        }
    }

    /// Functoriality on every composable pair whose arrows and composite are
    /// all assigned and involve the newest arrow.
    fn consistent(&self, newest: usize) -> bool {
        let g1 = self.m1.source();
        let g2 = self.m2.source();
        // Identities are pinned down as soon as both sides are known.
        let d = g1.dom(newest);
        if newest == g1.identity(d) && self.arr_map[newest] != g2.identity(self.obj_map[d]) {
            return false;
        }
        let assigned = |k: usize| self.arr_map[k] != usize::MAX;
        for other in 0..g1.n_arrows() {
            if !assigned(other) {
                continue;
            }
            for (g, f) in [(newest, other), (other, newest), (newest, newest)] {
                if g1.cod(f) != g1.dom(g) {
                    continue;
                }
                let c = g1.comp(g, f);
                if !assigned(c) {
                    continue;
                }
                if g2.comp(self.arr_map[g], self.arr_map[f]) != self.arr_map[c] {
                    return false;
                }
            }
        }
        true
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::exact::Group;
    use crate::groupoid::FinGroupoid;

    #[test]
    fn identical_inputs_yield_the_identity() {
        let g = Arc::new(FinGroupoid::group_bundle(2, &Group::cyclic(2)));
        let one = Arc::new(FinGroupoid::discrete(1));
        let bang = GpdFunctor::validate(
            g.clone(),
            one,
            vec![0; g.n_objects()],
            vec![0; g.n_arrows()],
        )
        .unwrap();
        let phi = iso_over_base(&bang, &bang).unwrap().unwrap();
        assert_eq!(phi, GpdFunctor::identity(&g));
    }

    #[test]
    fn relabeled_copy_is_found() {
        let base = Arc::new(FinGroupoid::discrete(2));
        let g = Arc::new(FinGroupoid::disjoint_union(&[
            FinGroupoid::discrete(2),
            FinGroupoid::discrete(2),
        ]));
        // Two points over each base object.
        let m1 = GpdFunctor::validate(g.clone(), base.clone(), vec![0, 0, 1, 1], vec![0, 0, 1, 1])
            .unwrap();
        let obj_perm = vec![1, 0, 3, 2];
        let h = Arc::new(g.permuted(&obj_perm, &obj_perm));
        let m2 = GpdFunctor::validate(h, base, vec![0, 0, 1, 1], vec![0, 0, 1, 1]).unwrap();
        let phi = iso_over_base(&m1, &m2).unwrap().unwrap();
        assert!(phi.is_bijective());
        assert_eq!(m2.compose(&phi), m1);
    }

    #[test]
    fn unequal_fibers_detected_without_search() {
        let base = Arc::new(FinGroupoid::discrete(2));
        let g = Arc::new(FinGroupoid::discrete(3));
        let m1 =
            GpdFunctor::validate(g.clone(), base.clone(), vec![0, 0, 1], vec![0, 0, 1]).unwrap();
        let m2 = GpdFunctor::validate(g, base, vec![0, 1, 1], vec![0, 1, 1]).unwrap();
        // Budget zero: the cardinality prune must answer before any search.
        assert_eq!(iso_over_base_with_budget(&m1, &m2, 0), Ok(None));
    }

    #[test]
    fn nontrivial_iso_between_permuted_group_bundles() {
        let g = Arc::new(FinGroupoid::group_bundle(3, &Group::cyclic(2)));
        let one = Arc::new(FinGroupoid::discrete(1));
        let bang = GpdFunctor::validate(
            g.clone(),
            one.clone(),
            vec![0; g.n_objects()],
            vec![0; g.n_arrows()],
        )
        .unwrap();
        let obj_perm = vec![2, 0, 1];
        let arr_perm: Vec<usize> = {
            // Relabel arrows consistently with the object rotation.
            let arrow = |i: usize, j: usize, s: usize| (i * 3 + j) * 2 + s;
            let mut perm = vec![0; g.n_arrows()];
            for i in 0..3 {
                for j in 0..3 {
                    for s in 0..2 {
                        perm[arrow(i, j, s)] = arrow(obj_perm[i], obj_perm[j], s);
                    }
                }
            }
            perm
        };
        let h = Arc::new(g.permuted(&obj_perm, &arr_perm));
        let m2 =
            GpdFunctor::validate(h, one, vec![0; g.n_objects()], vec![0; g.n_arrows()]).unwrap();
        let phi = iso_over_base(&bang, &m2).unwrap().unwrap();
        assert!(phi.is_bijective());
    }
}
