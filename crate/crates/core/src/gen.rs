//! Seeded random instance generators.
//!
//! Instances are valid by construction: groupoids are disjoint unions of
//! group bundles over indiscrete groupoids, functors are assembled from
//! component images, group homomorphisms and basepoint transports, and
//! distributors arise by reflecting a random span (so validity follows from
//! the equivalence with discrete two-sided fibrations). The RNG is
//! SplitMix64, fixed here so that identical seeds reproduce identical
//! instances everywhere.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dist::{elements_span, span_to_distributor, Distributor, TwoSidedFibSpan};
use crate::exact::{BaseMorphism, BaseObject, Group, Instance};
use crate::factor::comprehensive_factorization;
use crate::functor::{pair_into_product, GpdFunctor};
use crate::groupoid::{FinGroupoid, Gpd};
use crate::internal::{
    IGpd, InternalDistributor, InternalFunctor, InternalGroupoid, RawInternalDistributor,
    RawInternalGroupoid,
};
use crate::tensor::ComposablePair;

/// SplitMix64: the 64-bit state advances by the golden-gamma increment and
/// the output is a finalized mix of the state.
#[derive(Clone, Debug)]
pub struct Rng {
    state: u64,
}

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform-ish draw from `0..n`; `n` must be positive.
    pub fn below(&mut self, n: usize) -> usize {
        (self.next_u64() % n as u64) as usize
    }

    pub fn chance(&mut self, num: u64, den: u64) -> bool {
        self.next_u64() % den < num
    }
}

/// Size bounds for generated groupoids.
#[derive(Clone, Copy, Debug)]
pub struct GpdBounds {
    pub max_objects: usize,
    /// Bound on hom-set sizes, i.e. on the vertex group order.
    pub max_group_order: usize,
    pub max_arrows: usize,
}

/// One connected component of a generated groupoid: a group bundle over an
/// indiscrete groupoid, with its placement in the disjoint union.
#[derive(Clone, Debug)]
pub struct Component {
    pub obj_offset: usize,
    pub arr_offset: usize,
    pub size: usize,
    pub group_idx: usize,
}

/// A generated groupoid with its component structure retained, so functors
/// can be generated component by component.
#[derive(Clone, Debug)]
pub struct GenGroupoid {
    pub gpd: Gpd,
    pub components: Vec<Component>,
}

/// Stateful generator: the RNG plus a cache of group homomorphism sets.
pub struct Generator {
    pub rng: Rng,
    pool: Vec<Arc<Group>>,
    hom_cache: HashMap<(usize, usize), Arc<Vec<Vec<usize>>>>,
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: Rng::new(seed),
            pool: vec![
                Arc::new(Group::trivial()),
                Arc::new(Group::cyclic(2)),
                Arc::new(Group::cyclic(3)),
                Arc::new(Group::klein_four()),
                Arc::new(Group::symmetric_3()),
            ],
            hom_cache: HashMap::new(),
        }
    }

    pub fn group(&self, idx: usize) -> &Arc<Group> {
        &self.pool[idx]
    }

    /// Every homomorphism between two pool groups, by exhaustive search.
    fn homs(&mut self, from: usize, to: usize) -> Arc<Vec<Vec<usize>>> {
        if let Some(cached) = self.hom_cache.get(&(from, to)) {
            return cached.clone();
        }
        let g = &self.pool[from];
        let h = &self.pool[to];
        let mut out = Vec::new();
        let n = g.order();
        let k = h.order();
        let mut map = vec![0usize; n];
        loop {
            let ok = (0..n).all(|a| (0..n).all(|b| map[g.mul(a, b)] == h.mul(map[a], map[b])));
            if ok {
                out.push(map.clone());
            }
            let mut i = 0;
            loop {
                if i == n {
                    let arc = Arc::new(out);
                    self.hom_cache.insert((from, to), arc.clone());
                    return arc;
                }
                map[i] += 1;
                if map[i] < k {
                    break;
                }
                map[i] = 0;
                i += 1;
            }
        }
    }

    /// A random disjoint union of group bundles within the bounds.
    pub fn groupoid(&mut self, bounds: &GpdBounds) -> GenGroupoid {
        let target_objects = 1 + self.rng.below(bounds.max_objects.max(1));
        let mut parts: Vec<FinGroupoid> = Vec::new();
        let mut components: Vec<Component> = Vec::new();
        let mut obj_used = 0;
        let mut arrows_used = 0;
        while obj_used < target_objects {
            let remaining = target_objects - obj_used;
            let size = 1 + self.rng.below(remaining);
            let fitting: Vec<usize> = (0..self.pool.len())
                .filter(|&i| {
                    self.pool[i].order() <= bounds.max_group_order.max(1)
                        && arrows_used + size * size * self.pool[i].order() <= bounds.max_arrows
                })
                .collect();
            if fitting.is_empty() {
                // Fall back to a single extra point if the budget allows it.
                if arrows_used < bounds.max_arrows {
                    components.push(Component {
                        obj_offset: obj_used,
                        arr_offset: arrows_used,
                        size: 1,
                        group_idx: 0,
                    });
                    parts.push(FinGroupoid::discrete(1));
                    obj_used += 1;
                    arrows_used += 1;
                    continue;
                }
                break;
            }
            let group_idx = fitting[self.rng.below(fitting.len())];
            components.push(Component {
                obj_offset: obj_used,
                arr_offset: arrows_used,
                size,
                group_idx,
            });
            parts.push(FinGroupoid::group_bundle(size, &self.pool[group_idx]));
            obj_used += size;
            arrows_used += size * size * self.pool[group_idx].order();
        }
        if parts.is_empty() {
            components.push(Component {
                obj_offset: 0,
                arr_offset: 0,
                size: 1,
                group_idx: 0,
            });
            parts.push(FinGroupoid::discrete(1));
        }
        GenGroupoid {
            gpd: Arc::new(FinGroupoid::disjoint_union(&parts)),
            components,
        }
    }

    /// A random functor: each source component maps into a target component
    /// through an object map, a vertex-group homomorphism and basepoint
    /// transports.
    pub fn functor(&mut self, a: &GenGroupoid, b: &GenGroupoid) -> GpdFunctor {
        let mut obj_map = vec![0usize; a.gpd.n_objects()];
        let mut arr_map = vec![0usize; a.gpd.n_arrows()];
        for comp in &a.components {
            let t = b.components[self.rng.below(b.components.len())].clone();
            let homs = self.homs(comp.group_idx, t.group_idx);
            let hom = homs[self.rng.below(homs.len())].clone();
            let h_group = self.pool[t.group_idx].clone();
            let sigma: Vec<usize> = (0..comp.size).map(|_| self.rng.below(t.size)).collect();
            let transport: Vec<usize> = (0..comp.size)
                .map(|_| self.rng.below(h_group.order()))
                .collect();
            let g_order = self.pool[comp.group_idx].order();
            for i in 0..comp.size {
                obj_map[comp.obj_offset + i] = t.obj_offset + sigma[i];
            }
            for i in 0..comp.size {
                for j in 0..comp.size {
                    for g in 0..g_order {
                        let src = comp.arr_offset + (i * comp.size + j) * g_order + g;
                        // u_j · φ(g) · u_i⁻¹ keeps functoriality.
                        let label = h_group.mul(
                            transport[j],
                            h_group.mul(hom[g], h_group.inverse(transport[i])),
                        );
                        let dst =
                            t.arr_offset + (sigma[i] * t.size + sigma[j]) * h_group.order() + label;
                        arr_map[src] = dst;
                    }
                }
            }
        }
        GpdFunctor::validate(a.gpd.clone(), b.gpd.clone(), obj_map, arr_map)
            .expect("generated functor is valid")
    }

    /// A random span `A ← X → B` (usually not two-sided).
    pub fn raw_span(
        &mut self,
        a: &GenGroupoid,
        b: &GenGroupoid,
        max_apex: usize,
    ) -> TwoSidedFibSpan {
        let apex = self.groupoid(&GpdBounds {
            max_objects: max_apex.max(1),
            max_group_order: 4,
            max_arrows: 16,
        });
        let q = self.functor(&apex, a);
        let p = self.functor(&apex, b);
        TwoSidedFibSpan::new(q, p).expect("legs share the generated apex")
    }

    /// A random discrete two-sided fibration: the middle span of the
    /// comprehensive factorization of a random `⟨Q,P⟩`. Its indexing comes
    /// from comma components, not from fiber tables.
    pub fn two_sided_span(
        &mut self,
        a: &GenGroupoid,
        b: &GenGroupoid,
        max_fiber: usize,
    ) -> TwoSidedFibSpan {
        let span = self.raw_span(a, b, max_fiber.max(1));
        let (prod, qp) = pair_into_product(span.left(), span.right());
        let fact = comprehensive_factorization(&qp);
        let middle = &fact.middle;
        let left_leg = GpdFunctor::assemble(
            middle.clone(),
            a.gpd.clone(),
            (0..middle.n_objects())
                .map(|m| prod.obj_parts(fact.dfib_part.obj(m)).0)
                .collect(),
            (0..middle.n_arrows())
                .map(|k| prod.arr_parts(fact.dfib_part.arr(k)).0)
                .collect(),
        );
        let right_leg = GpdFunctor::assemble(
            middle.clone(),
            b.gpd.clone(),
            (0..middle.n_objects())
                .map(|m| prod.obj_parts(fact.dfib_part.obj(m)).1)
                .collect(),
            (0..middle.n_arrows())
                .map(|k| prod.arr_parts(fact.dfib_part.arr(k)).1)
                .collect(),
        );
        TwoSidedFibSpan::new(left_leg, right_leg).expect("shared middle")
    }

    /// A random distributor: a reflected two-sided span read back as fiber
    /// tables. Validity follows from the equivalence with discrete two-sided
    /// fibrations.
    pub fn distributor(
        &mut self,
        a: &GenGroupoid,
        b: &GenGroupoid,
        max_fiber: usize,
    ) -> Distributor {
        let two_sided = self.two_sided_span(a, b, max_fiber);
        span_to_distributor(&two_sided).expect("reflected spans are two-sided")
    }

    /// A span that is two-sided about half the time: either a raw span or
    /// the elements span of a generated distributor.
    pub fn mixed_span(
        &mut self,
        a: &GenGroupoid,
        b: &GenGroupoid,
        max_fiber: usize,
    ) -> TwoSidedFibSpan {
        if self.rng.chance(1, 2) {
            self.raw_span(a, b, max_fiber)
        } else {
            let d = self.distributor(a, b, max_fiber);
            elements_span(&d)
        }
    }

    /// A composable pair of distributors over shared endpoints.
    pub fn composable_pair(
        &mut self,
        bounds: &GpdBounds,
        max_fiber: usize,
    ) -> (GenGroupoid, GenGroupoid, GenGroupoid, ComposablePair) {
        let a = self.groupoid(bounds);
        let b = self.groupoid(bounds);
        let c = self.groupoid(bounds);
        let s = self.distributor(&a, &b, max_fiber);
        let t = self.distributor(&b, &c, max_fiber);
        let pair = ComposablePair::new(s, t).expect("shared middle groupoid");
        (a, b, c, pair)
    }

    /// A random orbit: trivial, regular, or the cosets of a random cyclic
    /// subgroup.
    pub fn orbit(&mut self, group: &Arc<Group>) -> BaseObject {
        match self.rng.below(3) {
            0 => BaseObject::gset_trivial(group.clone(), 1),
            1 => BaseObject::gset_regular(group.clone()),
            _ => {
                let g = self.rng.below(group.order());
                BaseObject::gset_cosets(group.clone(), g)
            }
        }
    }

    /// A random base object: a disjoint union of orbits in the G-set case.
    pub fn base_object(&mut self, instance: &Instance, max_size: usize) -> BaseObject {
        match instance {
            Instance::FinSet => BaseObject::finset(1 + self.rng.below(max_size.max(1))),
            Instance::GSet(group) => {
                let mut parts: Vec<BaseObject> = Vec::new();
                let mut used = 0;
                for _ in 0..3 {
                    let orbit = self.orbit(group);
                    if used + orbit.size() > max_size {
                        continue;
                    }
                    used += orbit.size();
                    parts.push(orbit);
                }
                if parts.is_empty() {
                    parts.push(BaseObject::gset_trivial(group.clone(), 1));
                }
                gset_sum(group, &parts)
            }
        }
    }

    /// A random equivariant endomap, built orbit by orbit: each orbit
    /// representative goes to a point fixed by its stabilizer.
    pub fn equivariant_endo(&mut self, x: &BaseObject) -> BaseMorphism {
        match x.instance().clone() {
            Instance::FinSet => {
                let map = (0..x.size())
                    .map(|_| self.rng.below(x.size().max(1)))
                    .collect();
                BaseMorphism::new(x.clone(), x.clone(), map).expect("maps of plain sets")
            }
            Instance::GSet(group) => {
                let (orbits, _) = orbit_decomposition(x, &group);
                let mut map = vec![usize::MAX; x.size()];
                for orbit in &orbits {
                    let rep = orbit[0];
                    let stab: Vec<usize> = (0..group.order())
                        .filter(|&g| x.act(g, rep) == rep)
                        .collect();
                    let candidates: Vec<usize> = (0..x.size())
                        .filter(|&y| stab.iter().all(|&h| x.act(h, y) == y))
                        .collect();
                    let target = candidates[self.rng.below(candidates.len())];
                    for g in 0..group.order() {
                        map[x.act(g, rep)] = x.act(g, target);
                    }
                }
                BaseMorphism::new(x.clone(), x.clone(), map).expect("orbit-wise map is equivariant")
            }
        }
    }

    /// A random equivariant morphism `y → z`, orbit by orbit. When an orbit
    /// of `y` admits no target in `z` the caller's shapes were incompatible;
    /// the draw falls back to an endomap of `y` in that case.
    pub fn equivariant_into(&mut self, y: &BaseObject, z: &BaseObject) -> BaseMorphism {
        match y.instance().clone() {
            Instance::FinSet => {
                let map = (0..y.size())
                    .map(|_| self.rng.below(z.size().max(1)))
                    .collect();
                BaseMorphism::new(y.clone(), z.clone(), map).expect("maps of plain sets")
            }
            Instance::GSet(group) => {
                let (orbits, _) = orbit_decomposition(y, &group);
                let mut map = vec![usize::MAX; y.size()];
                for orbit in &orbits {
                    let rep = orbit[0];
                    let stab: Vec<usize> = (0..group.order())
                        .filter(|&g| y.act(g, rep) == rep)
                        .collect();
                    let candidates: Vec<usize> = (0..z.size())
                        .filter(|&p| stab.iter().all(|&h| z.act(h, p) == p))
                        .collect();
                    if candidates.is_empty() {
                        return self.equivariant_endo(y);
                    }
                    let target = candidates[self.rng.below(candidates.len())];
                    for g in 0..group.order() {
                        map[y.act(g, rep)] = z.act(g, target);
                    }
                }
                BaseMorphism::new(y.clone(), z.clone(), map).expect("orbit-wise map is equivariant")
            }
        }
    }

    /// A random regular epi (a quotient map) together with an arbitrary
    /// morphism into the same codomain.
    pub fn regular_epi_and_any(
        &mut self,
        instance: &Instance,
        max_size: usize,
    ) -> (BaseMorphism, BaseMorphism) {
        let x = self.base_object(instance, max_size);
        let endo = self.equivariant_endo(&x);
        let quot =
            crate::exact::coequalizer(&endo, &BaseMorphism::identity(&x)).expect("parallel pair");
        let f = quot.q;
        let y = self.base_object(instance, max_size);
        let g = self.equivariant_into(&y, f.cod());
        let g = if g.cod() == f.cod() {
            g
        } else {
            // The fallback produced an endomap of y; land in the quotient by
            // composing with the collapse of everything to one class when it
            // exists, else reuse f itself.
            f.clone()
        };
        (f, g)
    }

    /// An internal groupoid for the instance: a generated external groupoid
    /// times a random orbit (trivially induced over finite sets).
    pub fn internal_groupoid(&mut self, instance: &Instance, bounds: &GpdBounds) -> IGpd {
        let external = self.groupoid(bounds);
        match instance {
            Instance::FinSet => crate::translate::internalize_groupoid(&external.gpd),
            Instance::GSet(group) => {
                let group = group.clone();
                let orbit = self.orbit(&group);
                induce_groupoid(&external.gpd, &group, &orbit)
            }
        }
    }

    /// An internal functor for the instance: a generated external functor
    /// times the identity on a shared orbit, or collapsed onto the trivial
    /// orbit on the target side.
    pub fn internal_functor(&mut self, instance: &Instance, bounds: &GpdBounds) -> InternalFunctor {
        let a = self.groupoid(bounds);
        let b = self.groupoid(bounds);
        let f = self.functor(&a, &b);
        match instance {
            Instance::FinSet => {
                let src = crate::translate::internalize_groupoid(&a.gpd);
                let tgt = crate::translate::internalize_groupoid(&b.gpd);
                crate::translate::internalize_functor(&f, src, tgt)
            }
            Instance::GSet(group) => {
                let group = group.clone();
                let orbit = self.orbit(&group);
                let collapse = self.rng.chance(1, 3);
                let src = induce_groupoid(&a.gpd, &group, &orbit);
                let tgt_orbit = if collapse {
                    BaseObject::gset_trivial(group.clone(), 1)
                } else {
                    orbit.clone()
                };
                let tgt = induce_groupoid(&b.gpd, &group, &tgt_orbit);
                induce_functor(&f, &src, &tgt, orbit.size(), tgt_orbit.size())
            }
        }
    }

    /// A composable pair of internal distributors over a shared middle: a
    /// generated external pair induced along one orbit, with the carrier
    /// sizes bounded.
    pub fn internal_distributor_pair(
        &mut self,
        instance: &Instance,
        max_carrier: usize,
    ) -> (InternalDistributor, InternalDistributor) {
        let bounds = GpdBounds {
            max_objects: 2,
            max_group_order: 3,
            max_arrows: 12,
        };
        let mut best = None;
        for _ in 0..20 {
            let a = self.groupoid(&bounds);
            let b = self.groupoid(&bounds);
            let c = self.groupoid(&bounds);
            let s = self.distributor(&a, &b, 2);
            let t = self.distributor(&b, &c, 2);
            if s.n_elements().max(t.n_elements()) <= max_carrier {
                best = Some((a, b, c, s, t));
                break;
            }
        }
        let (a, b, c, s, t) = best.unwrap_or_else(|| {
            // Point-shaped fallback always fits.
            let tiny = GpdBounds {
                max_objects: 1,
                max_group_order: 1,
                max_arrows: 1,
            };
            let a = self.groupoid(&tiny);
            let b = self.groupoid(&tiny);
            let c = self.groupoid(&tiny);
            let s = self.distributor(&a, &b, 1);
            let t = self.distributor(&b, &c, 1);
            (a, b, c, s, t)
        });
        match instance {
            Instance::FinSet => {
                let ai = crate::translate::internalize_groupoid(&a.gpd);
                let bi = crate::translate::internalize_groupoid(&b.gpd);
                let ci = crate::translate::internalize_groupoid(&c.gpd);
                (
                    crate::translate::internalize_distributor(&s, ai, bi.clone()),
                    crate::translate::internalize_distributor(&t, bi, ci),
                )
            }
            Instance::GSet(group) => {
                let group = group.clone();
                let max_elems = s.n_elements().max(t.n_elements()).max(1);
                let mut orbit = self.orbit(&group);
                let mut tries = 0;
                while orbit.size() * max_elems > max_carrier && tries < 8 {
                    orbit = self.orbit(&group);
                    tries += 1;
                }
                if orbit.size() * max_elems > max_carrier {
                    orbit = BaseObject::gset_trivial(group.clone(), 1);
                }
                let ai = induce_groupoid(&a.gpd, &group, &orbit);
                let bi = induce_groupoid(&b.gpd, &group, &orbit);
                let ci = induce_groupoid(&c.gpd, &group, &orbit);
                (
                    induce_distributor(&s, &ai, &bi, &orbit),
                    induce_distributor(&t, &bi, &ci, &orbit),
                )
            }
        }
    }
}

/// Disjoint union of G-sets with blockwise action.
pub fn gset_sum(group: &Arc<Group>, parts: &[BaseObject]) -> BaseObject {
    let total: usize = parts.iter().map(BaseObject::size).sum();
    let mut action = vec![vec![0usize; total]; group.order()];
    let mut offset = 0;
    for part in parts {
        for g in 0..group.order() {
            for x in 0..part.size() {
                action[g][offset + x] = offset + part.act(g, x);
            }
        }
        offset += part.size();
    }
    BaseObject::gset(group.clone(), total, action).expect("blockwise action")
}

/// Orbits of a G-set, ordered by least member, with the orbit index of each
/// point.
pub fn orbit_decomposition(x: &BaseObject, group: &Arc<Group>) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut orbit_of = vec![usize::MAX; x.size()];
    let mut orbits = Vec::new();
    for p in 0..x.size() {
        if orbit_of[p] != usize::MAX {
            continue;
        }
        let id = orbits.len();
        let mut members: Vec<usize> = (0..group.order()).map(|g| x.act(g, p)).collect();
        members.sort_unstable();
        members.dedup();
        for &m in &members {
            orbit_of[m] = id;
        }
        orbits.push(members);
    }
    (orbits, orbit_of)
}

/// The product of an external groupoid with an orbit: carriers are pairs
/// `(point, orbit point)` with the action on the orbit coordinate.
pub fn induce_groupoid(g: &Gpd, group: &Arc<Group>, orbit: &BaseObject) -> IGpd {
    let k = orbit.size();
    let obj = |o: usize, w: usize| o * k + w;
    let arr = |f: usize, w: usize| f * k + w;
    let c0 = product_with_orbit(group, g.n_objects(), orbit);
    let c1 = product_with_orbit(group, g.n_arrows(), orbit);
    let mut m = Vec::new();
    for f in 0..g.n_arrows() {
        for h in 0..g.n_arrows() {
            if g.cod(f) != g.dom(h) {
                continue;
            }
            let hf = g.compose(h, f).unwrap();
            for w in 0..k {
                m.push((arr(h, w), arr(f, w), arr(hf, w)));
            }
        }
    }
    let raw = RawInternalGroupoid {
        c0,
        c1,
        d: (0..g.n_arrows() * k)
            .map(|i| obj(g.dom(i / k), i % k))
            .collect(),
        c: (0..g.n_arrows() * k)
            .map(|i| obj(g.cod(i / k), i % k))
            .collect(),
        e: (0..g.n_objects() * k)
            .map(|i| arr(g.identity(i / k), i % k))
            .collect(),
        m,
        tau: (0..g.n_arrows() * k)
            .map(|i| arr(g.inverse(i / k), i % k))
            .collect(),
    };
    Arc::new(InternalGroupoid::validate(raw).expect("induced groupoid is valid"))
}

fn product_with_orbit(group: &Arc<Group>, n: usize, orbit: &BaseObject) -> BaseObject {
    let k = orbit.size();
    let action = (0..group.order())
        .map(|g| {
            (0..n * k)
                .map(|i| (i / k) * k + orbit.act(g, i % k))
                .collect()
        })
        .collect();
    BaseObject::gset(group.clone(), n * k, action).expect("coordinatewise action")
}

/// A generated external functor times the orbit map (identity or collapse).
fn induce_functor(
    f: &GpdFunctor,
    src: &IGpd,
    tgt: &IGpd,
    k_src: usize,
    k_tgt: usize,
) -> InternalFunctor {
    let orbit_map = |w: usize| if k_tgt == 1 { 0 } else { w };
    let f0 = (0..src.c0().size())
        .map(|i| f.obj(i / k_src) * k_tgt + orbit_map(i % k_src))
        .collect();
    let f1 = (0..src.c1().size())
        .map(|i| f.arr(i / k_src) * k_tgt + orbit_map(i % k_src))
        .collect();
    InternalFunctor::validate(src.clone(), tgt.clone(), f0, f1).expect("induced functor is valid")
}

/// A generated external distributor times an orbit.
pub fn induce_distributor(
    d: &Distributor,
    src: &IGpd,
    tgt: &IGpd,
    orbit: &BaseObject,
) -> InternalDistributor {
    let k = orbit.size();
    let n = d.n_elements();
    let group = match src.instance() {
        Instance::GSet(g) => g.clone(),
        Instance::FinSet => unreachable!("induction requires a group action"),
    };
    let s0 = product_with_orbit(&group, n, orbit);
    let left_foot = (0..n * k).map(|i| d.elem(i / k).1 * k + i % k).collect();
    let right_foot = (0..n * k).map(|i| d.elem(i / k).0 * k + i % k).collect();
    let mut lambda = Vec::new();
    let mut rho = Vec::new();
    for s in 0..n {
        let (b, a, _) = d.elem(s);
        for &alpha in d.source().arrows_from(a) {
            let result = d.act_left(alpha, s).unwrap();
            for w in 0..k {
                lambda.push((alpha * k + w, s * k + w, result * k + w));
            }
        }
        for &beta in d.target().arrows_into(b) {
            let result = d.act_right(s, beta).unwrap();
            for w in 0..k {
                rho.push((s * k + w, beta * k + w, result * k + w));
            }
        }
    }
    InternalDistributor::validate(
        src.clone(),
        tgt.clone(),
        RawInternalDistributor {
            s0,
            left_foot,
            right_foot,
            lambda,
            rho,
        },
    )
    .expect("induced distributor is valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bounds() -> GpdBounds {
        GpdBounds {
            max_objects: 4,
            max_group_order: 6,
            max_arrows: 24,
        }
    }

    #[test]
    fn deterministic_for_a_fixed_seed() {
        let mut g1 = Generator::new(42);
        let mut g2 = Generator::new(42);
        let a1 = g1.groupoid(&bounds());
        let a2 = g2.groupoid(&bounds());
        assert_eq!(a1.gpd.as_ref(), a2.gpd.as_ref());
        let b1 = g1.groupoid(&bounds());
        let b2 = g2.groupoid(&bounds());
        let f1 = g1.functor(&a1, &b1);
        let f2 = g2.functor(&a2, &b2);
        assert_eq!(f1.obj_map(), f2.obj_map());
        assert_eq!(f1.arr_map(), f2.arr_map());
    }

    #[test]
    fn generated_groupoids_validate_and_cover_sizes() {
        let mut gen = Generator::new(7);
        let mut seen = [false; 4];
        for _ in 0..1000 {
            let g = gen.groupoid(&GpdBounds {
                max_objects: 3,
                max_group_order: 6,
                max_arrows: 24,
            });
            assert!(FinGroupoid::validate(g.gpd.to_raw()).is_ok());
            assert!(g.gpd.n_objects() <= 3);
            assert!(g.gpd.n_arrows() <= 24);
            seen[g.gpd.n_objects()] = true;
        }
        // Every object count 1..3 occurs across the campaign.
        assert!(seen[1] && seen[2] && seen[3]);
    }

    #[test]
    fn generated_distributors_validate() {
        let mut gen = Generator::new(11);
        for _ in 0..20 {
            let a = gen.groupoid(&bounds());
            let b = gen.groupoid(&bounds());
            let d = gen.distributor(&a, &b, 3);
            assert!(Distributor::validate(d.raw()).is_ok());
        }
    }

    #[test]
    fn generated_internal_instances_validate() {
        let s3 = Instance::GSet(Arc::new(Group::symmetric_3()));
        let small = GpdBounds {
            max_objects: 2,
            max_group_order: 2,
            max_arrows: 8,
        };
        let mut gen = Generator::new(3);
        for _ in 0..5 {
            let g = gen.internal_groupoid(&s3, &small);
            assert!(InternalGroupoid::validate(g.to_raw()).is_ok());
            let _f = gen.internal_functor(&s3, &small);
            let (s, t) = gen.internal_distributor_pair(&s3, 12);
            assert!(s.s0().size() <= 12 && t.s0().size() <= 12);
        }
    }
}
