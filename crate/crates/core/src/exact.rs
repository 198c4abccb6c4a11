//! A finite Barr-exact base category, in two concrete instances: finite sets
//! and finite G-sets for a finite group G.
//!
//! Objects carry explicit finite carriers (indices `0..size`) and, in the
//! G-set case, an action table. The module supplies the finite limits and
//! colimits the internal constructions need — pullbacks, products,
//! equalizers, reflexive coequalizers, terminal object — together with
//! (regular epi, mono) image factorizations, kernel pairs, and the
//! relation-composition template on finite sets.
//!
//! All constructions are canonical: "the" pullback of two fixed morphisms is
//! a function of its inputs, with pair carriers ordered lexicographically and
//! quotient carriers ordered by least representative. Equalities between
//! composites of canonical constructions therefore hold at index level.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::util::UnionFind;

/// A finite group as a validated multiplication table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Group {
    order: usize,
    mul: Vec<Vec<usize>>,
    identity: usize,
    inverse: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupError {
    #[error("multiplication table is not {0}x{0}")]
    BadTableShape(usize),
    #[error("table entry out of range at ({0},{1})")]
    EntryOutOfRange(usize, usize),
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("element {0} has no inverse")]
    NoInverse(usize),
    #[error("associativity fails at ({0},{1},{2})")]
    NotAssociative(usize, usize, usize),
}

impl Group {
    /// Validates a multiplication table. `mul[a][b]` is the product `a*b`.
    pub fn from_table(mul: Vec<Vec<usize>>) -> Result<Self, GroupError> {
        let n = mul.len();
        if mul.iter().any(|row| row.len() != n) {
            return Err(GroupError::BadTableShape(n));
        }
        for (a, row) in mul.iter().enumerate() {
            for (b, &p) in row.iter().enumerate() {
                if p >= n {
                    return Err(GroupError::EntryOutOfRange(a, b));
                }
            }
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| mul[e][a] == a && mul[a][e] == a))
            .ok_or(GroupError::NoIdentity)?;
        let mut inverse = vec![usize::MAX; n];
        for a in 0..n {
            inverse[a] = (0..n)
                .find(|&b| mul[a][b] == identity && mul[b][a] == identity)
                .ok_or(GroupError::NoInverse(a))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if mul[mul[a][b]][c] != mul[a][mul[b][c]] {
                        return Err(GroupError::NotAssociative(a, b, c));
                    }
                }
            }
        }
        Ok(Group {
            order: n,
            mul,
            identity,
            inverse,
        })
    }

    pub fn trivial() -> Self {
        Group::from_table(vec![vec![0]]).unwrap()
    }

    /// The cyclic group of order `n`, elements `0..n` under addition mod n.
    pub fn cyclic(n: usize) -> Self {
        assert!(n >= 1);
        let mul = (0..n)
            .map(|a| (0..n).map(|b| (a + b) % n).collect())
            .collect();
        Group::from_table(mul).unwrap()
    }

    /// The Klein four-group, elements as bit pairs under xor.
    pub fn klein_four() -> Self {
        let mul = (0..4).map(|a| (0..4).map(|b| a ^ b).collect()).collect();
        Group::from_table(mul).unwrap()
    }

    /// The symmetric group on three letters. Elements are the permutations
    /// of `{0,1,2}` in lexicographic one-line order; `mul[a][b]` applies `b`
    /// first, then `a`.
    pub fn symmetric_3() -> Self {
        let perms: [[usize; 3]; 6] = [
            [0, 1, 2],
            [0, 2, 1],
            [1, 0, 2],
            [1, 2, 0],
            [2, 0, 1],
            [2, 1, 0],
        ];
        let index = |p: [usize; 3]| perms.iter().position(|q| *q == p).unwrap();
        let mul = (0..6)
            .map(|a| {
                (0..6)
                    .map(|b| {
                        let comp = [
                            perms[a][perms[b][0]],
                            perms[a][perms[b][1]],
                            perms[a][perms[b][2]],
                        ];
                        index(comp)
                    })
                    .collect()
            })
            .collect();
        Group::from_table(mul).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mul[a][b]
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &Vec<Vec<usize>> {
        &self.mul
    }

    /// The cyclic subgroup generated by `g`, sorted.
    pub fn cyclic_subgroup(&self, g: usize) -> Vec<usize> {
        let mut elems = vec![self.identity];
        let mut cur = g;
        while cur != self.identity {
            elems.push(cur);
            cur = self.mul(cur, g);
        }
        elems.sort_unstable();
        elems
    }
}

/// Which base category an object or morphism lives in.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Instance {
    FinSet,
    GSet(Arc<Group>),
}

impl Instance {
    pub fn group(&self) -> Option<&Group> {
        match self {
            Instance::FinSet => None,
            Instance::GSet(g) => Some(g),
        }
    }
}

/// An object of the base: a finite carrier, with an action table in the
/// G-set instance (`action[g][x]` is `g·x`).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseObject {
    instance: Instance,
    size: usize,
    action: Vec<Vec<usize>>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BaseError {
    #[error("objects or morphisms from different base instances")]
    InstanceMismatch,
    #[error("action table has wrong shape")]
    BadActionShape,
    #[error("action entry out of range")]
    ActionOutOfRange,
    #[error("identity group element does not act trivially on point {0}")]
    ActionIdentity(usize),
    #[error("action not multiplicative at (g={0}, h={1}, x={2})")]
    ActionComposition(usize, usize, usize),
    #[error("morphism table has wrong length")]
    BadMapLength,
    #[error("morphism value out of range at {0}")]
    MapOutOfRange(usize),
    #[error("morphism not equivariant at (g={0}, x={1})")]
    NotEquivariant(usize, usize),
    #[error("domain/codomain mismatch in composition or cone")]
    BoundaryMismatch,
    #[error("cone does not commute at element {0}")]
    ConeMismatch(usize),
    #[error("cocone does not coequalize the pair")]
    CoconeMismatch,
    #[error("quotient action is not well defined on block {0}")]
    QuotientActionIllDefined(usize),
    #[error("relation composition requires the finite-set instance")]
    NotFinSet,
}

impl BaseObject {
    pub fn finset(size: usize) -> Self {
        BaseObject {
            instance: Instance::FinSet,
            size,
            action: Vec::new(),
        }
    }

    /// A G-set from an explicit action table.
    pub fn gset(
        group: Arc<Group>,
        size: usize,
        action: Vec<Vec<usize>>,
    ) -> Result<Self, BaseError> {
        if action.len() != group.order() || action.iter().any(|row| row.len() != size) {
            return Err(BaseError::BadActionShape);
        }
        for row in &action {
            for &y in row {
                if y >= size {
                    return Err(BaseError::ActionOutOfRange);
                }
            }
        }
        for x in 0..size {
            if action[group.identity()][x] != x {
                return Err(BaseError::ActionIdentity(x));
            }
        }
        for g in 0..group.order() {
            for h in 0..group.order() {
                for x in 0..size {
                    if action[group.mul(g, h)][x] != action[g][action[h][x]] {
                        return Err(BaseError::ActionComposition(g, h, x));
                    }
                }
            }
        }
        Ok(BaseObject {
            instance: Instance::GSet(group),
            size,
            action,
        })
    }

    /// The G-set with trivial action on `size` points.
    pub fn gset_trivial(group: Arc<Group>, size: usize) -> Self {
        let action = vec![(0..size).collect::<Vec<_>>(); group.order()];
        BaseObject::gset(group, size, action).unwrap()
    }

    /// G acting on itself by left multiplication.
    pub fn gset_regular(group: Arc<Group>) -> Self {
        let n = group.order();
        let action = (0..n)
            .map(|g| (0..n).map(|x| group.mul(g, x)).collect())
            .collect();
        BaseObject::gset(group, n, action).unwrap()
    }

    /// G acting on the left cosets of the cyclic subgroup generated by `gen`.
    /// Cosets are numbered by least member.
    pub fn gset_cosets(group: Arc<Group>, gen: usize) -> Self {
        let sub = group.cyclic_subgroup(gen);
        let n = group.order();
        let mut coset_of = vec![usize::MAX; n];
        let mut reps = Vec::new();
        for x in 0..n {
            if coset_of[x] == usize::MAX {
                let id = reps.len();
                for &h in &sub {
                    coset_of[group.mul(x, h)] = id;
                }
                reps.push(x);
            }
        }
        let size = reps.len();
        let action = (0..n)
            .map(|g| (0..size).map(|c| coset_of[group.mul(g, reps[c])]).collect())
            .collect();
        BaseObject::gset(group, size, action).unwrap()
    }

    pub fn instance(&self) -> &Instance {
        &self.instance
    }

    pub fn size(&self) -> usize {
        self.size
    }

    /// `g·x`; only meaningful in the G-set instance.
    pub fn act(&self, g: usize, x: usize) -> usize {
        match self.instance {
            Instance::FinSet => x,
            Instance::GSet(_) => self.action[g][x],
        }
    }

    fn group_order(&self) -> usize {
        self.instance.group().map_or(0, Group::order)
    }

    /// Underlying finite set (forgets the action).
    pub fn underlying(&self) -> BaseObject {
        BaseObject::finset(self.size)
    }
}

/// A morphism of the base: a point map, equivariant in the G-set instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BaseMorphism {
    dom: BaseObject,
    cod: BaseObject,
    map: Vec<usize>,
}

impl BaseMorphism {
    pub fn new(dom: BaseObject, cod: BaseObject, map: Vec<usize>) -> Result<Self, BaseError> {
        if dom.instance != cod.instance {
            return Err(BaseError::InstanceMismatch);
        }
        if map.len() != dom.size {
            return Err(BaseError::BadMapLength);
        }
        for (x, &y) in map.iter().enumerate() {
            if y >= cod.size {
                return Err(BaseError::MapOutOfRange(x));
            }
        }
        for g in 0..dom.group_order() {
            for x in 0..dom.size {
                if map[dom.act(g, x)] != cod.act(g, map[x]) {
                    return Err(BaseError::NotEquivariant(g, x));
                }
            }
        }
        Ok(BaseMorphism { dom, cod, map })
    }

    pub fn identity(obj: &BaseObject) -> Self {
        BaseMorphism {
            dom: obj.clone(),
            cod: obj.clone(),
            map: (0..obj.size).collect(),
        }
    }

    pub fn dom(&self) -> &BaseObject {
        &self.dom
    }

    pub fn cod(&self) -> &BaseObject {
        &self.cod
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    /// `self ∘ other`, other first.
    pub fn compose(&self, other: &BaseMorphism) -> Result<BaseMorphism, BaseError> {
        if other.cod != self.dom {
            return Err(BaseError::BoundaryMismatch);
        }
        Ok(BaseMorphism {
            dom: other.dom.clone(),
            cod: self.cod.clone(),
            map: other.map.iter().map(|&x| self.map[x]).collect(),
        })
    }

    pub fn is_mono(&self) -> bool {
        let mut seen = vec![false; self.cod.size];
        self.map
            .iter()
            .all(|&y| !std::mem::replace(&mut seen[y], true))
    }

    pub fn is_iso(&self) -> bool {
        self.dom.size == self.cod.size && self.is_mono()
    }

    pub fn inverse(&self) -> Option<BaseMorphism> {
        if !self.is_iso() {
            return None;
        }
        let mut inv = vec![0; self.cod.size];
        for (x, &y) in self.map.iter().enumerate() {
            inv[y] = x;
        }
        Some(BaseMorphism {
            dom: self.cod.clone(),
            cod: self.dom.clone(),
            map: inv,
        })
    }
}

/// Regular epimorphisms coincide with surjections in both instances.
pub fn is_regular_epi(f: &BaseMorphism) -> bool {
    let mut hit = vec![false; f.cod().size()];
    for &y in f.map() {
        hit[y] = true;
    }
    hit.into_iter().all(|b| b)
}

/// A canonical pullback: carrier is the lexicographically ordered list of
/// pairs `(x, y)` with `f(x) = g(y)`.
#[derive(Clone, Debug)]
pub struct Pullback {
    pub obj: BaseObject,
    pub p1: BaseMorphism,
    pub p2: BaseMorphism,
    pub pairs: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
}

impl Pullback {
    pub fn pair_index(&self, x: usize, y: usize) -> Option<usize> {
        self.index.get(&(x, y)).copied()
    }

    /// Mediating morphism for a cone `u : W → X`, `v : W → Y`.
    pub fn mediate(&self, u: &BaseMorphism, v: &BaseMorphism) -> Result<BaseMorphism, BaseError> {
        if u.dom() != v.dom() {
            return Err(BaseError::BoundaryMismatch);
        }
        let mut map = Vec::with_capacity(u.dom().size());
        for w in 0..u.dom().size() {
            let idx = self
                .pair_index(u.apply(w), v.apply(w))
                .ok_or(BaseError::ConeMismatch(w))?;
            map.push(idx);
        }
        BaseMorphism::new(u.dom().clone(), self.obj.clone(), map)
    }
}

/// Pullback of `f : X → Z` against `g : Y → Z`.
pub fn pullback(f: &BaseMorphism, g: &BaseMorphism) -> Result<Pullback, BaseError> {
    if f.cod() != g.cod() {
        return Err(BaseError::BoundaryMismatch);
    }
    if f.dom().instance != g.dom().instance {
        return Err(BaseError::InstanceMismatch);
    }
    let mut pairs = Vec::new();
    for x in 0..f.dom().size() {
        for y in 0..g.dom().size() {
            if f.apply(x) == g.apply(y) {
                pairs.push((x, y));
            }
        }
    }
    let index: HashMap<(usize, usize), usize> =
        pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let obj = match &f.dom().instance {
        Instance::FinSet => BaseObject::finset(pairs.len()),
        Instance::GSet(group) => {
            let action = (0..group.order())
                .map(|h| {
                    pairs
                        .iter()
                        .map(|&(x, y)| index[&(f.dom().act(h, x), g.dom().act(h, y))])
                        .collect()
                })
                .collect();
            BaseObject::gset(group.clone(), pairs.len(), action)
                .expect("diagonal action on pullback pairs")
        }
    };
    let p1 = BaseMorphism::new(
        obj.clone(),
        f.dom().clone(),
        pairs.iter().map(|&(x, _)| x).collect(),
    )?;
    let p2 = BaseMorphism::new(
        obj.clone(),
        g.dom().clone(),
        pairs.iter().map(|&(_, y)| y).collect(),
    )?;
    Ok(Pullback {
        obj,
        p1,
        p2,
        pairs,
        index,
    })
}

/// Kernel pair of `f`, i.e. the pullback of `f` against itself.
pub fn kernel_pair(f: &BaseMorphism) -> Pullback {
    pullback(f, f).expect("a morphism always pulls back against itself")
}

/// Binary product, as the pullback over the terminal object.
pub fn product(x: &BaseObject, y: &BaseObject) -> Result<Pullback, BaseError> {
    if x.instance != y.instance {
        return Err(BaseError::InstanceMismatch);
    }
    let t = terminal(&x.instance);
    let tx = BaseMorphism::new(x.clone(), t.clone(), vec![0; x.size()])?;
    let ty = BaseMorphism::new(y.clone(), t, vec![0; y.size()])?;
    pullback(&tx, &ty)
}

pub fn terminal(instance: &Instance) -> BaseObject {
    match instance {
        Instance::FinSet => BaseObject::finset(1),
        Instance::GSet(group) => BaseObject::gset_trivial(group.clone(), 1),
    }
}

/// Equalizer of a parallel pair, as a subobject inclusion.
pub fn equalizer(
    f: &BaseMorphism,
    g: &BaseMorphism,
) -> Result<(BaseObject, BaseMorphism), BaseError> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(BaseError::BoundaryMismatch);
    }
    let carrier: Vec<usize> = (0..f.dom().size())
        .filter(|&x| f.apply(x) == g.apply(x))
        .collect();
    let pos: HashMap<usize, usize> = carrier.iter().enumerate().map(|(i, &x)| (x, i)).collect();
    let obj = match &f.dom().instance {
        Instance::FinSet => BaseObject::finset(carrier.len()),
        Instance::GSet(group) => {
            let action = (0..group.order())
                .map(|h| carrier.iter().map(|&x| pos[&f.dom().act(h, x)]).collect())
                .collect();
            BaseObject::gset(group.clone(), carrier.len(), action)
                .expect("equalizer carrier is closed under the action")
        }
    };
    let incl = BaseMorphism::new(obj.clone(), f.dom().clone(), carrier)?;
    Ok((obj, incl))
}

/// A canonical coequalizer: the quotient of the codomain by the equivalence
/// generated by `f(x) ~ g(x)`, blocks numbered by least member.
#[derive(Clone, Debug)]
pub struct Coequalizer {
    pub obj: BaseObject,
    pub q: BaseMorphism,
    pub block_of: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl Coequalizer {
    /// Mediating morphism for a cocone `h : Y → W` with `h∘f = h∘g`.
    pub fn mediate(&self, h: &BaseMorphism) -> Result<BaseMorphism, BaseError> {
        if h.dom() != self.q.dom() {
            return Err(BaseError::BoundaryMismatch);
        }
        let mut map = vec![usize::MAX; self.obj.size()];
        for y in 0..h.dom().size() {
            let b = self.block_of[y];
            if map[b] == usize::MAX {
                map[b] = h.apply(y);
            } else if map[b] != h.apply(y) {
                return Err(BaseError::CoconeMismatch);
            }
        }
        BaseMorphism::new(self.obj.clone(), h.cod().clone(), map)
    }
}

pub fn coequalizer(f: &BaseMorphism, g: &BaseMorphism) -> Result<Coequalizer, BaseError> {
    if f.dom() != g.dom() || f.cod() != g.cod() {
        return Err(BaseError::BoundaryMismatch);
    }
    let y = f.cod();
    let mut uf = UnionFind::new(y.size());
    for x in 0..f.dom().size() {
        uf.union(f.apply(x), g.apply(x));
    }
    let (block_of, blocks) = uf.blocks();
    let obj = match &y.instance {
        Instance::FinSet => BaseObject::finset(blocks.len()),
        Instance::GSet(group) => {
            // The generated relation is equivariant, so the action descends;
            // checked per block rather than assumed.
            let mut action = vec![vec![usize::MAX; blocks.len()]; group.order()];
            for h in 0..group.order() {
                for (b, members) in blocks.iter().enumerate() {
                    let target = block_of[y.act(h, members[0])];
                    for &m in members {
                        if block_of[y.act(h, m)] != target {
                            return Err(BaseError::QuotientActionIllDefined(b));
                        }
                    }
                    action[h][b] = target;
                }
            }
            BaseObject::gset(group.clone(), blocks.len(), action)?
        }
    };
    let q = BaseMorphism::new(y.clone(), obj.clone(), block_of.clone())?;
    Ok(Coequalizer {
        obj,
        q,
        block_of,
        blocks,
    })
}

/// The (regular epi, mono) factorization of `f`: `f = m ∘ e` with `e`
/// surjective onto the image and `m` the inclusion of the image.
pub fn image_factorization(f: &BaseMorphism) -> (BaseMorphism, BaseMorphism) {
    let mut values: Vec<usize> = f.map().to_vec();
    values.sort_unstable();
    values.dedup();
    let pos: HashMap<usize, usize> = values.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let image = match &f.dom().instance {
        Instance::FinSet => BaseObject::finset(values.len()),
        Instance::GSet(group) => {
            let action = (0..group.order())
                .map(|h| values.iter().map(|&v| pos[&f.cod().act(h, v)]).collect())
                .collect();
            BaseObject::gset(group.clone(), values.len(), action)
                .expect("image carrier is closed under the action")
        }
    };
    let e = BaseMorphism::new(
        f.dom().clone(),
        image.clone(),
        f.map().iter().map(|&v| pos[&v]).collect(),
    )
    .expect("surjection onto image");
    let m = BaseMorphism::new(image, f.cod().clone(), values).expect("image inclusion");
    (e, m)
}

/// Enumerates every morphism `dom → cod` (equivariant in the G-set case).
/// Exponential in the carrier size; intended for desk-scale universal
/// property checks.
pub fn enumerate_morphisms(dom: &BaseObject, cod: &BaseObject) -> Vec<BaseMorphism> {
    let n = dom.size();
    let m = cod.size();
    let mut out = Vec::new();
    if n == 0 {
        out.push(BaseMorphism::new(dom.clone(), cod.clone(), Vec::new()).unwrap());
        return out;
    }
    let mut map = vec![0usize; n];
    loop {
        if let Ok(f) = BaseMorphism::new(dom.clone(), cod.clone(), map.clone()) {
            out.push(f);
        }
        let mut i = 0;
        loop {
            if i == n {
                return out;
            }
            map[i] += 1;
            if map[i] < m {
                break;
            }
            map[i] = 0;
            i += 1;
        }
    }
}

/// A relation between finite sets: a subset of `left × right`, stored as a
/// sorted list of pairs. Stands for the evident mono into the product.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Relation {
    pub left: usize,
    pub right: usize,
    pub pairs: Vec<(usize, usize)>,
}

impl Relation {
    pub fn new(left: usize, right: usize, mut pairs: Vec<(usize, usize)>) -> Self {
        pairs.sort_unstable();
        pairs.dedup();
        assert!(pairs.iter().all(|&(a, b)| a < left && b < right));
        Relation { left, right, pairs }
    }

    /// The identity relation: the diagonal on a set.
    pub fn diagonal(n: usize) -> Self {
        Relation::new(n, n, (0..n).map(|i| (i, i)).collect())
    }

    /// The relation as a mono into the canonical product object.
    pub fn to_mono(&self) -> (BaseMorphism, Pullback) {
        let prod = product(
            &BaseObject::finset(self.left),
            &BaseObject::finset(self.right),
        )
        .expect("finite set product");
        let carrier = BaseObject::finset(self.pairs.len());
        let map = self
            .pairs
            .iter()
            .map(|&(a, b)| prod.pair_index(a, b).unwrap())
            .collect();
        let m = BaseMorphism::new(carrier, prod.obj.clone(), map).unwrap();
        (m, prod)
    }
}

/// Composition of relations relative to the (surjection, injection)
/// factorization: the span composite by pullback, then the image of the
/// induced map into the product.
pub fn relative_relation_compose(r1: &Relation, r2: &Relation) -> Result<Relation, BaseError> {
    if r1.right != r2.left {
        return Err(BaseError::BoundaryMismatch);
    }
    let a = BaseObject::finset(r1.left);
    let b = BaseObject::finset(r1.right);
    let c = BaseObject::finset(r2.right);
    let o1 = BaseObject::finset(r1.pairs.len());
    let o2 = BaseObject::finset(r2.pairs.len());
    let e1_left = BaseMorphism::new(
        o1.clone(),
        a.clone(),
        r1.pairs.iter().map(|p| p.0).collect(),
    )?;
    let e1_right = BaseMorphism::new(o1, b.clone(), r1.pairs.iter().map(|p| p.1).collect())?;
    let e2_left = BaseMorphism::new(o2.clone(), b, r2.pairs.iter().map(|p| p.0).collect())?;
    let e2_right = BaseMorphism::new(o2, c.clone(), r2.pairs.iter().map(|p| p.1).collect())?;
    let pb = pullback(&e1_right, &e2_left)?;
    let to_a = e1_left.compose(&pb.p1)?;
    let to_c = e2_right.compose(&pb.p2)?;
    let prod_ac = product(&a, &c)?;
    let induced = prod_ac.mediate(&to_a, &to_c)?;
    let (_, m) = image_factorization(&induced);
    let pairs = m
        .map()
        .iter()
        .map(|&i| prod_ac.pairs[i])
        .collect::<Vec<_>>();
    Ok(Relation::new(r1.left, r2.right, pairs))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn z2() -> Arc<Group> {
        Arc::new(Group::cyclic(2))
    }

    #[test]
    fn builtin_groups_validate() {
        assert_eq!(Group::trivial().order(), 1);
        assert_eq!(Group::cyclic(3).order(), 3);
        assert_eq!(Group::klein_four().order(), 4);
        let s3 = Group::symmetric_3();
        assert_eq!(s3.order(), 6);
        // S3 is nonabelian: some pair fails to commute.
        assert!((0..6).any(|a| (0..6).any(|b| s3.mul(a, b) != s3.mul(b, a))));
    }

    #[test]
    fn bad_group_table_rejected() {
        // 0 is idempotent but not an identity in this table.
        let err = Group::from_table(vec![vec![0, 0], vec![0, 0]]).unwrap_err();
        assert_eq!(err, GroupError::NoIdentity);
    }

    #[test]
    fn pullback_along_identity_is_iso() {
        let x = BaseObject::finset(3);
        let z = BaseObject::finset(2);
        let f = BaseMorphism::new(x.clone(), z.clone(), vec![0, 1, 0]).unwrap();
        let g = BaseMorphism::identity(&z);
        let pb = pullback(&f, &g).unwrap();
        assert!(pb.p1.is_iso());
        assert_eq!(pb.obj.size(), 3);
    }

    #[test]
    fn pullback_of_constants_is_product() {
        let x = BaseObject::finset(2);
        let y = BaseObject::finset(3);
        let z = BaseObject::finset(1);
        let f = BaseMorphism::new(x, z.clone(), vec![0, 0]).unwrap();
        let g = BaseMorphism::new(y, z, vec![0, 0, 0]).unwrap();
        assert_eq!(pullback(&f, &g).unwrap().obj.size(), 6);
    }

    #[test]
    fn gset_pullback_of_regular_over_point() {
        let g = z2();
        let reg = BaseObject::gset_regular(g.clone());
        let pt = terminal(&Instance::GSet(g));
        let f = BaseMorphism::new(reg.clone(), pt.clone(), vec![0, 0]).unwrap();
        let pb = pullback(&f, &f).unwrap();
        assert_eq!(pb.obj.size(), 4);
        // Diagonal action on Z2 x Z2 has two orbits.
        let d = BaseMorphism::identity(&pb.obj);
        let orbits = coequalizer(
            &BaseMorphism::new(pb.obj.clone(), pb.obj.clone(), {
                (0..pb.obj.size()).map(|x| pb.obj.act(1, x)).collect()
            })
            .unwrap(),
            &d,
        )
        .unwrap();
        assert_eq!(orbits.obj.size(), 2);
    }

    #[test]
    fn coequalizer_identifies_generated_classes() {
        let x = BaseObject::finset(1);
        let y = BaseObject::finset(3);
        let f = BaseMorphism::new(x.clone(), y.clone(), vec![0]).unwrap();
        let g = BaseMorphism::new(x, y, vec![1]).unwrap();
        let c = coequalizer(&f, &g).unwrap();
        assert_eq!(c.obj.size(), 2);
        assert_eq!(c.q.map(), &[0, 0, 1]);
    }

    #[test]
    fn coequalizer_of_equal_pair_is_iso() {
        let y = BaseObject::finset(4);
        let f = BaseMorphism::identity(&y);
        let c = coequalizer(&f, &f).unwrap();
        assert!(c.q.is_iso());
    }

    #[test]
    fn gset_coequalizer_folds_regular_orbit() {
        let g = z2();
        let reg = BaseObject::gset_regular(g.clone());
        let pt = BaseObject::gset_trivial(g, 1);
        let swap = BaseMorphism::new(reg.clone(), reg.clone(), vec![1, 0]).unwrap();
        let c = coequalizer(&swap, &BaseMorphism::identity(&reg)).unwrap();
        assert_eq!(c.obj, pt);
    }

    #[test]
    fn image_factorization_cases() {
        let x = BaseObject::finset(5);
        let y = BaseObject::finset(3);
        let constant = BaseMorphism::new(x.clone(), y.clone(), vec![2; 5]).unwrap();
        let (e, m) = image_factorization(&constant);
        assert_eq!(e.cod().size(), 1);
        assert!(m.is_mono());
        assert_eq!(m.compose(&e).unwrap(), constant);

        let inj = BaseMorphism::new(BaseObject::finset(2), y, vec![1, 0]).unwrap();
        let (e2, _) = image_factorization(&inj);
        assert!(e2.is_iso());
    }

    #[test]
    fn gset_equivariant_fold_image() {
        let g = z2();
        let reg = BaseObject::gset_regular(g.clone());
        // Z2 ⊔ Z2 with the regular action on both summands.
        let action = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]];
        let double = BaseObject::gset(g, 4, action).unwrap();
        let fold = BaseMorphism::new(double, reg.clone(), vec![0, 1, 0, 1]).unwrap();
        let (_, m) = image_factorization(&fold);
        assert_eq!(m.dom(), &reg);
    }

    #[test]
    fn regular_epi_is_surjectivity() {
        let x = BaseObject::finset(2);
        let y = BaseObject::finset(1);
        let fold = BaseMorphism::new(x.clone(), y, vec![0, 0]).unwrap();
        assert!(is_regular_epi(&fold));
        assert_eq!(kernel_pair(&fold).obj.size(), 4);
        let incl = BaseMorphism::new(y_obj(), x, vec![1]).unwrap();
        assert!(!is_regular_epi(&incl));
        assert!(is_regular_epi(&BaseMorphism::identity(&y_obj())));
    }

    fn y_obj() -> BaseObject {
        BaseObject::finset(1)
    }

    #[test]
    fn mediating_morphism_is_unique_among_all_candidates() {
        let x = BaseObject::finset(3);
        let z = BaseObject::finset(2);
        let f = BaseMorphism::new(x.clone(), z.clone(), vec![0, 1, 1]).unwrap();
        let g = BaseMorphism::new(x.clone(), z, vec![1, 0, 1]).unwrap();
        let pb = pullback(&f, &g).unwrap();
        let w = BaseObject::finset(2);
        let u = BaseMorphism::new(w.clone(), x.clone(), vec![1, 2]).unwrap();
        let v = BaseMorphism::new(w.clone(), x.clone(), vec![0, 2]).unwrap();
        // Cone check: f∘u = g∘v.
        assert_eq!(f.compose(&u).unwrap().map(), g.compose(&v).unwrap().map());
        let med = pb.mediate(&u, &v).unwrap();
        let candidates: Vec<BaseMorphism> = enumerate_morphisms(&w, &pb.obj)
            .into_iter()
            .filter(|h| pb.p1.compose(h).unwrap() == u && pb.p2.compose(h).unwrap() == v)
            .collect();
        assert_eq!(candidates, vec![med]);
    }

    #[test]
    fn equalizer_and_terminal() {
        let x = BaseObject::finset(4);
        let f = BaseMorphism::new(x.clone(), BaseObject::finset(2), vec![0, 1, 0, 1]).unwrap();
        let g = BaseMorphism::new(x.clone(), BaseObject::finset(2), vec![0, 0, 0, 1]).unwrap();
        let (obj, incl) = equalizer(&f, &g).unwrap();
        assert_eq!(obj.size(), 3);
        assert_eq!(f.compose(&incl).unwrap(), g.compose(&incl).unwrap());
        assert_eq!(terminal(&Instance::FinSet).size(), 1);
    }

    #[test]
    fn coequalizer_mediating_is_unique_among_all_candidates() {
        let x = BaseObject::finset(2);
        let y = BaseObject::finset(3);
        let f = BaseMorphism::new(x.clone(), y.clone(), vec![0, 1]).unwrap();
        let g = BaseMorphism::new(x, y.clone(), vec![1, 1]).unwrap();
        let coeq = coequalizer(&f, &g).unwrap();
        let w = BaseObject::finset(2);
        // A cocone: constant on the identified block.
        let h = BaseMorphism::new(y, w.clone(), vec![1, 1, 0]).unwrap();
        let med = coeq.mediate(&h).unwrap();
        let candidates: Vec<BaseMorphism> = enumerate_morphisms(&coeq.obj, &w)
            .into_iter()
            .filter(|m| m.compose(&coeq.q).unwrap() == h)
            .collect();
        assert_eq!(candidates, vec![med]);
    }

    #[test]
    fn relation_composition_is_associative() {
        // Relations compose associatively on the nose in this canonical
        // subset representation.
        let r1 = Relation::new(2, 3, vec![(0, 0), (0, 2), (1, 1)]);
        let r2 = Relation::new(3, 2, vec![(0, 1), (2, 0), (1, 0), (1, 1)]);
        let r3 = Relation::new(2, 2, vec![(0, 0), (1, 0)]);
        let left =
            relative_relation_compose(&relative_relation_compose(&r1, &r2).unwrap(), &r3).unwrap();
        let right =
            relative_relation_compose(&r1, &relative_relation_compose(&r2, &r3).unwrap()).unwrap();
        assert_eq!(left, right);
    }

    #[test]
    fn forgetful_passage_preserves_the_constructions() {
        let g = z2();
        let reg = BaseObject::gset_regular(g.clone());
        let double = {
            let action = vec![vec![0, 1, 2, 3], vec![1, 0, 3, 2]];
            BaseObject::gset(g, 4, action).unwrap()
        };
        let fold = BaseMorphism::new(double.clone(), reg.clone(), vec![0, 1, 0, 1]).unwrap();
        let swap = BaseMorphism::new(reg.clone(), reg.clone(), vec![1, 0]).unwrap();
        // Underlying plain-set morphisms.
        let u_fold =
            BaseMorphism::new(double.underlying(), reg.underlying(), fold.map().to_vec()).unwrap();
        let u_swap =
            BaseMorphism::new(reg.underlying(), reg.underlying(), swap.map().to_vec()).unwrap();
        // Pullback carrier and projections coincide.
        let pb = pullback(&fold, &swap).unwrap();
        let u_pb = pullback(&u_fold, &u_swap).unwrap();
        assert_eq!(pb.pairs, u_pb.pairs);
        assert_eq!(pb.p1.map(), u_pb.p1.map());
        // Coequalizer blocks coincide.
        let c = coequalizer(
            &fold,
            &fold.compose(&BaseMorphism::identity(&double)).unwrap(),
        )
        .unwrap();
        let u_c = coequalizer(&u_fold, &u_fold).unwrap();
        assert_eq!(c.block_of, u_c.block_of);
        // Images and regular-epi status coincide.
        let (e, m) = image_factorization(&fold);
        let (u_e, u_m) = image_factorization(&u_fold);
        assert_eq!(m.map(), u_m.map());
        assert_eq!(e.map(), u_e.map());
        assert_eq!(is_regular_epi(&fold), is_regular_epi(&u_fold));
    }

    #[test]
    fn relation_composition_examples() {
        // r2 = diagonal acts as identity.
        let r1 = Relation::new(2, 3, vec![(0, 1), (1, 2)]);
        let composed = relative_relation_compose(&r1, &Relation::diagonal(3)).unwrap();
        assert_eq!(composed, Relation::new(2, 3, vec![(0, 1), (1, 2)]));

        // Two pullback points collapse to one image point.
        let r = Relation::new(1, 2, vec![(0, 0), (0, 1)]);
        let s = Relation::new(2, 1, vec![(0, 0), (1, 0)]);
        let rs = relative_relation_compose(&r, &s).unwrap();
        assert_eq!(rs, Relation::new(1, 1, vec![(0, 0)]));

        // Empty relation composes to empty.
        let empty = Relation::new(1, 2, vec![]);
        let es = relative_relation_compose(&empty, &s).unwrap();
        assert_eq!(es.pairs, vec![]);
    }

    #[test]
    fn coset_actions() {
        let s3 = Arc::new(Group::symmetric_3());
        // Cosets of a transposition subgroup: 3 points.
        assert_eq!(BaseObject::gset_cosets(s3.clone(), 1).size(), 3);
        // Cosets of the 3-cycle subgroup: 2 points.
        assert_eq!(BaseObject::gset_cosets(s3.clone(), 3).size(), 2);
        // Cosets of the trivial subgroup: regular action.
        assert_eq!(BaseObject::gset_cosets(s3, 0).size(), 6);
    }
}
