//! Finite groupoids as validated composition tables.
//!
//! Objects and arrows are dense integer indices; all equality is index
//! equality. Composition is stored as a sparse table over exactly the
//! composable pairs, with `compose(g, f)` meaning "`f` first, then `g`".

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::exact::Group;
use crate::util::UnionFind;

/// Shared handle to a validated groupoid.
pub type Gpd = Arc<FinGroupoid>;

/// Unvalidated groupoid tables, as read from input files or built by hand.
#[derive(Clone, Debug)]
pub struct RawGroupoid {
    pub n_objects: usize,
    pub dom: Vec<usize>,
    pub cod: Vec<usize>,
    /// Entries `(g, f, g∘f)`.
    pub compose: Vec<(usize, usize, usize)>,
    pub identities: Vec<usize>,
    pub inverses: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum GroupoidError {
    #[error("object index {0} out of range")]
    BadObjectIndex(usize),
    #[error("arrow index {0} out of range")]
    BadArrowIndex(usize),
    #[error("identity or inverse table has wrong length")]
    BadTableLength,
    #[error("duplicate composition entry for ({0},{1})")]
    DuplicateComposite(usize, usize),
    #[error("composition entry ({0},{1}) given although cod({1}) != dom({0})")]
    CompositionDomainMismatch(usize, usize),
    #[error("no composition entry for composable pair ({0},{1})")]
    MissingComposite(usize, usize),
    #[error("composite of ({0},{1}) has wrong endpoints")]
    CompositeBoundary(usize, usize),
    #[error("identity at object {0} is missing or not a two-sided unit")]
    MissingIdentity(usize),
    #[error("arrow {0} has no two-sided inverse")]
    NotInvertible(usize),
    #[error("associativity fails on (f={0}, g={1}, h={2})")]
    NotAssociative(usize, usize, usize),
}

/// A validated finite groupoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinGroupoid {
    n_objects: usize,
    dom: Vec<usize>,
    cod: Vec<usize>,
    identity: Vec<usize>,
    inverse: Vec<usize>,
    compose: HashMap<(usize, usize), usize>,
    out_arrows: Vec<Vec<usize>>,
    in_arrows: Vec<Vec<usize>>,
}

/// A partition of the object set into connected components.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Partition {
    pub block_of: Vec<usize>,
    pub blocks: Vec<Vec<usize>>,
}

impl FinGroupoid {
    /// Checks every groupoid axiom on raw tables, reporting the first
    /// violation with its witnessing arrows.
    pub fn validate(raw: RawGroupoid) -> Result<Self, GroupoidError> {
        let n_obj = raw.n_objects;
        let n_arr = raw.dom.len();
        if raw.cod.len() != n_arr || raw.inverses.len() != n_arr || raw.identities.len() != n_obj {
            return Err(GroupoidError::BadTableLength);
        }
        for &x in raw.dom.iter().chain(raw.cod.iter()) {
            if x >= n_obj {
                return Err(GroupoidError::BadObjectIndex(x));
            }
        }
        for &f in raw.identities.iter().chain(raw.inverses.iter()) {
            if f >= n_arr {
                return Err(GroupoidError::BadArrowIndex(f));
            }
        }
        let mut compose = HashMap::with_capacity(raw.compose.len());
        for &(g, f, gf) in &raw.compose {
            if g >= n_arr || f >= n_arr || gf >= n_arr {
                return Err(GroupoidError::BadArrowIndex(g.max(f).max(gf)));
            }
            if raw.cod[f] != raw.dom[g] {
                return Err(GroupoidError::CompositionDomainMismatch(g, f));
            }
            if compose.insert((g, f), gf).is_some() {
                return Err(GroupoidError::DuplicateComposite(g, f));
            }
            if raw.dom[gf] != raw.dom[f] || raw.cod[gf] != raw.cod[g] {
                return Err(GroupoidError::CompositeBoundary(g, f));
            }
        }
        for g in 0..n_arr {
            for f in 0..n_arr {
                if raw.cod[f] == raw.dom[g] && !compose.contains_key(&(g, f)) {
                    return Err(GroupoidError::MissingComposite(g, f));
                }
            }
        }
        for x in 0..n_obj {
            let e = raw.identities[x];
            if raw.dom[e] != x || raw.cod[e] != x {
                return Err(GroupoidError::MissingIdentity(x));
            }
        }
        for f in 0..n_arr {
            let unit_left = compose[&(raw.identities[raw.cod[f]], f)];
            let unit_right = compose[&(f, raw.identities[raw.dom[f]])];
            if unit_left != f {
                return Err(GroupoidError::MissingIdentity(raw.cod[f]));
            }
            if unit_right != f {
                return Err(GroupoidError::MissingIdentity(raw.dom[f]));
            }
        }
        for f in 0..n_arr {
            let inv = raw.inverses[f];
            if raw.dom[inv] != raw.cod[f]
                || raw.cod[inv] != raw.dom[f]
                || compose[&(inv, f)] != raw.identities[raw.dom[f]]
                || compose[&(f, inv)] != raw.identities[raw.cod[f]]
            {
                return Err(GroupoidError::NotInvertible(f));
            }
        }
        for f in 0..n_arr {
            for g in 0..n_arr {
                if raw.cod[f] != raw.dom[g] {
                    continue;
                }
                let gf = compose[&(g, f)];
                for h in 0..n_arr {
                    if raw.cod[g] != raw.dom[h] {
                        continue;
                    }
                    if compose[&(h, gf)] != compose[&(compose[&(h, g)], f)] {
                        return Err(GroupoidError::NotAssociative(f, g, h));
                    }
                }
            }
        }
        Ok(FinGroupoid::assemble(
            n_obj,
            raw.dom,
            raw.cod,
            raw.identities,
            raw.inverses,
            compose,
        ))
    }

    /// Wraps tables that are valid by construction.
    pub(crate) fn assemble(
        n_objects: usize,
        dom: Vec<usize>,
        cod: Vec<usize>,
        identity: Vec<usize>,
        inverse: Vec<usize>,
        compose: HashMap<(usize, usize), usize>,
    ) -> Self {
        let mut out_arrows = vec![Vec::new(); n_objects];
        let mut in_arrows = vec![Vec::new(); n_objects];
        for f in 0..dom.len() {
            out_arrows[dom[f]].push(f);
            in_arrows[cod[f]].push(f);
        }
        FinGroupoid {
            n_objects,
            dom,
            cod,
            identity,
            inverse,
            compose,
            out_arrows,
            in_arrows,
        }
    }

    pub fn n_objects(&self) -> usize {
        self.n_objects
    }

    pub fn n_arrows(&self) -> usize {
        self.dom.len()
    }

    pub fn dom(&self, f: usize) -> usize {
        self.dom[f]
    }

    pub fn cod(&self, f: usize) -> usize {
        self.cod[f]
    }

    pub fn identity(&self, x: usize) -> usize {
        self.identity[x]
    }

    pub fn inverse(&self, f: usize) -> usize {
        self.inverse[f]
    }

    /// `g∘f` when `cod(f) = dom(g)`.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose.get(&(g, f)).copied()
    }

    pub(crate) fn comp(&self, g: usize, f: usize) -> usize {
        self.compose[&(g, f)]
    }

    pub fn arrows_from(&self, x: usize) -> &[usize] {
        &self.out_arrows[x]
    }

    pub fn arrows_into(&self, x: usize) -> &[usize] {
        &self.in_arrows[x]
    }

    pub fn hom(&self, x: usize, y: usize) -> Vec<usize> {
        self.out_arrows[x]
            .iter()
            .copied()
            .filter(|&f| self.cod[f] == y)
            .collect()
    }

    /// The discrete groupoid: identities only.
    pub fn discrete(n: usize) -> Self {
        let compose = (0..n).map(|x| ((x, x), x)).collect();
        FinGroupoid::assemble(
            n,
            (0..n).collect(),
            (0..n).collect(),
            (0..n).collect(),
            (0..n).collect(),
            compose,
        )
    }

    /// The indiscrete groupoid: exactly one arrow between each ordered pair.
    pub fn indiscrete(n: usize) -> Self {
        FinGroupoid::group_bundle(n, &Group::trivial())
    }

    /// A group as a one-object groupoid.
    pub fn from_group(group: &Group) -> Self {
        FinGroupoid::group_bundle(1, group)
    }

    /// The groupoid with objects `0..n`, arrows `(i → j, g)` for `g` in the
    /// group, and componentwise composition; this is indiscrete(n) × G.
    /// Arrow `(i, j, g)` has index `(i·n + j)·|G| + g`.
    pub fn group_bundle(n: usize, group: &Group) -> Self {
        let k = group.order();
        let n_arr = n * n * k;
        let arrow = |i: usize, j: usize, g: usize| (i * n + j) * k + g;
        let mut dom = vec![0; n_arr];
        let mut cod = vec![0; n_arr];
        let mut inverse = vec![0; n_arr];
        for i in 0..n {
            for j in 0..n {
                for g in 0..k {
                    let a = arrow(i, j, g);
                    dom[a] = i;
                    cod[a] = j;
                    inverse[a] = arrow(j, i, group.inverse(g));
                }
            }
        }
        let identity = (0..n).map(|i| arrow(i, i, group.identity())).collect();
        let mut compose = HashMap::new();
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    for g in 0..k {
                        for h in 0..k {
                            compose.insert(
                                (arrow(j, l, h), arrow(i, j, g)),
                                arrow(i, l, group.mul(h, g)),
                            );
                        }
                    }
                }
            }
        }
        FinGroupoid::assemble(n, dom, cod, identity, inverse, compose)
    }

    /// Disjoint union; objects and arrows of each part are shifted in order.
    pub fn disjoint_union(parts: &[FinGroupoid]) -> Self {
        let mut dom = Vec::new();
        let mut cod = Vec::new();
        let mut identity = Vec::new();
        let mut inverse = Vec::new();
        let mut compose = HashMap::new();
        let mut obj_off = 0;
        let mut arr_off = 0;
        for p in parts {
            dom.extend(p.dom.iter().map(|&x| x + obj_off));
            cod.extend(p.cod.iter().map(|&x| x + obj_off));
            identity.extend(p.identity.iter().map(|&f| f + arr_off));
            inverse.extend(p.inverse.iter().map(|&f| f + arr_off));
            for (&(g, f), &gf) in &p.compose {
                compose.insert((g + arr_off, f + arr_off), gf + arr_off);
            }
            obj_off += p.n_objects;
            arr_off += p.n_arrows();
        }
        FinGroupoid::assemble(obj_off, dom, cod, identity, inverse, compose)
    }

    /// Swaps domain and codomain and reverses composition.
    pub fn opposite(&self) -> Self {
        let compose = self
            .compose
            .iter()
            .map(|(&(g, f), &gf)| ((f, g), gf))
            .collect();
        FinGroupoid::assemble(
            self.n_objects,
            self.cod.clone(),
            self.dom.clone(),
            self.identity.clone(),
            self.inverse.clone(),
            compose,
        )
    }

    /// Connected components: two objects share a block iff some arrow joins
    /// them. Blocks are numbered by least object.
    pub fn pi0(&self) -> Partition {
        let mut uf = UnionFind::new(self.n_objects);
        for f in 0..self.n_arrows() {
            uf.union(self.dom[f], self.cod[f]);
        }
        let (block_of, blocks) = uf.blocks();
        Partition { block_of, blocks }
    }

    /// The tables back in raw form, with composition entries sorted.
    pub fn to_raw(&self) -> RawGroupoid {
        let mut compose: Vec<(usize, usize, usize)> = self
            .compose
            .iter()
            .map(|(&(g, f), &gf)| (g, f, gf))
            .collect();
        compose.sort_unstable();
        RawGroupoid {
            n_objects: self.n_objects,
            dom: self.dom.clone(),
            cod: self.cod.clone(),
            compose,
            identities: self.identity.clone(),
            inverses: self.inverse.clone(),
        }
    }

    /// Relabels objects and arrows: object `x` becomes `obj_perm[x]`, arrow
    /// `f` becomes `arr_perm[f]`.
    pub fn permuted(&self, obj_perm: &[usize], arr_perm: &[usize]) -> Self {
        let n_arr = self.n_arrows();
        let mut dom = vec![0; n_arr];
        let mut cod = vec![0; n_arr];
        let mut inverse = vec![0; n_arr];
        let mut identity = vec![0; self.n_objects];
        for f in 0..n_arr {
            dom[arr_perm[f]] = obj_perm[self.dom[f]];
            cod[arr_perm[f]] = obj_perm[self.cod[f]];
            inverse[arr_perm[f]] = arr_perm[self.inverse[f]];
        }
        for x in 0..self.n_objects {
            identity[obj_perm[x]] = arr_perm[self.identity[x]];
        }
        let compose = self
            .compose
            .iter()
            .map(|(&(g, f), &gf)| ((arr_perm[g], arr_perm[f]), arr_perm[gf]))
            .collect();
        FinGroupoid::assemble(self.n_objects, dom, cod, identity, inverse, compose)
    }
}

/// The binary product groupoid with its index bookkeeping.
#[derive(Clone, Debug)]
pub struct GpdProduct {
    pub groupoid: Gpd,
    pub left: Gpd,
    pub right: Gpd,
}

impl GpdProduct {
    pub fn obj_index(&self, x: usize, y: usize) -> usize {
        x * self.right.n_objects() + y
    }

    pub fn obj_parts(&self, p: usize) -> (usize, usize) {
        (p / self.right.n_objects(), p % self.right.n_objects())
    }

    pub fn arr_index(&self, f: usize, g: usize) -> usize {
        f * self.right.n_arrows() + g
    }

    pub fn arr_parts(&self, k: usize) -> (usize, usize) {
        (k / self.right.n_arrows(), k % self.right.n_arrows())
    }
}

/// Componentwise product of groupoids. Object `(x, y)` has index
/// `x·|H₀| + y`, arrow `(f, g)` index `f·|H₁| + g`.
pub fn product(left: &Gpd, right: &Gpd) -> GpdProduct {
    let (no_l, no_r) = (left.n_objects(), right.n_objects());
    let (na_l, na_r) = (left.n_arrows(), right.n_arrows());
    let n_obj = no_l * no_r;
    let n_arr = na_l * na_r;
    let obj = |x: usize, y: usize| x * no_r + y;
    let arr = |f: usize, g: usize| f * na_r + g;
    let mut dom = vec![0; n_arr];
    let mut cod = vec![0; n_arr];
    let mut inverse = vec![0; n_arr];
    for f in 0..na_l {
        for g in 0..na_r {
            dom[arr(f, g)] = obj(left.dom(f), right.dom(g));
            cod[arr(f, g)] = obj(left.cod(f), right.cod(g));
            inverse[arr(f, g)] = arr(left.inverse(f), right.inverse(g));
        }
    }
    let mut identity = vec![0; n_obj];
    for x in 0..no_l {
        for y in 0..no_r {
            identity[obj(x, y)] = arr(left.identity(x), right.identity(y));
        }
    }
    let mut compose = HashMap::new();
    for g1 in 0..na_l {
        for f1 in left.arrows_into(left.dom(g1)) {
            let h1 = left.comp(g1, *f1);
            for g2 in 0..na_r {
                for f2 in right.arrows_into(right.dom(g2)) {
                    let h2 = right.comp(g2, *f2);
                    compose.insert((arr(g1, g2), arr(*f1, *f2)), arr(h1, h2));
                }
            }
        }
    }
    let groupoid = Arc::new(FinGroupoid::assemble(
        n_obj, dom, cod, identity, inverse, compose,
    ));
    GpdProduct {
        groupoid,
        left: left.clone(),
        right: right.clone(),
    }
}
