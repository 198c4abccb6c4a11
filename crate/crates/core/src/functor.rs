//! Functors between finite groupoids: validation, comma categories,
//! fullness and essential surjectivity.

use std::collections::HashMap;
use std::sync::Arc;

use thiserror::Error;

use crate::groupoid::{product, FinGroupoid, Gpd, GpdProduct, Partition};
use crate::util::UnionFind;
use crate::verdict::Check;

/// A validated functor between finite groupoids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GpdFunctor {
    source: Gpd,
    target: Gpd,
    obj_map: Vec<usize>,
    arr_map: Vec<usize>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum FunctorError {
    #[error("object or arrow map has wrong length")]
    BadMapLength,
    #[error("map value out of range at index {0}")]
    MapOutOfRange(usize),
    #[error("arrow {0} is not sent to an arrow with matching endpoints")]
    BoundaryMismatch(usize),
    #[error("identity at object {0} is not preserved")]
    IdentityNotPreserved(usize),
    #[error("composition of ({0},{1}) is not preserved")]
    NotFunctorial(usize, usize),
}

impl GpdFunctor {
    /// Checks all preservation laws on raw maps.
    pub fn validate(
        source: Gpd,
        target: Gpd,
        obj_map: Vec<usize>,
        arr_map: Vec<usize>,
    ) -> Result<Self, FunctorError> {
        if obj_map.len() != source.n_objects() || arr_map.len() != source.n_arrows() {
            return Err(FunctorError::BadMapLength);
        }
        for (x, &y) in obj_map.iter().enumerate() {
            if y >= target.n_objects() {
                return Err(FunctorError::MapOutOfRange(x));
            }
        }
        for (f, &g) in arr_map.iter().enumerate() {
            if g >= target.n_arrows() {
                return Err(FunctorError::MapOutOfRange(f));
            }
        }
        for f in 0..source.n_arrows() {
            let g = arr_map[f];
            if target.dom(g) != obj_map[source.dom(f)] || target.cod(g) != obj_map[source.cod(f)] {
                return Err(FunctorError::BoundaryMismatch(f));
            }
        }
        for x in 0..source.n_objects() {
            if arr_map[source.identity(x)] != target.identity(obj_map[x]) {
                return Err(FunctorError::IdentityNotPreserved(x));
            }
        }
        for g in 0..source.n_arrows() {
            for &f in source.arrows_into(source.dom(g)) {
                let gf = source.comp(g, f);
                if arr_map[gf] != target.comp(arr_map[g], arr_map[f]) {
                    return Err(FunctorError::NotFunctorial(g, f));
                }
            }
        }
        Ok(GpdFunctor {
            source,
            target,
            obj_map,
            arr_map,
        })
    }

    /// Wraps maps that are functorial by construction.
    pub(crate) fn assemble(
        source: Gpd,
        target: Gpd,
        obj_map: Vec<usize>,
        arr_map: Vec<usize>,
    ) -> Self {
        GpdFunctor {
            source,
            target,
            obj_map,
            arr_map,
        }
    }

    pub fn identity(g: &Gpd) -> Self {
        GpdFunctor {
            source: g.clone(),
            target: g.clone(),
            obj_map: (0..g.n_objects()).collect(),
            arr_map: (0..g.n_arrows()).collect(),
        }
    }

    pub fn source(&self) -> &Gpd {
        &self.source
    }

    pub fn target(&self) -> &Gpd {
        &self.target
    }

    pub fn obj(&self, x: usize) -> usize {
        self.obj_map[x]
    }

    pub fn arr(&self, f: usize) -> usize {
        self.arr_map[f]
    }

    pub fn obj_map(&self) -> &[usize] {
        &self.obj_map
    }

    pub fn arr_map(&self) -> &[usize] {
        &self.arr_map
    }

    /// `self ∘ other`, other first.
    pub fn compose(&self, other: &GpdFunctor) -> GpdFunctor {
        assert_eq!(other.target, self.source, "functor composition boundary");
        GpdFunctor {
            source: other.source.clone(),
            target: self.target.clone(),
            obj_map: other.obj_map.iter().map(|&x| self.obj_map[x]).collect(),
            arr_map: other.arr_map.iter().map(|&f| self.arr_map[f]).collect(),
        }
    }

    /// The same maps, viewed as a functor between the opposites.
    pub fn opposite(&self) -> GpdFunctor {
        GpdFunctor {
            source: Arc::new(self.source.opposite()),
            target: Arc::new(self.target.opposite()),
            obj_map: self.obj_map.clone(),
            arr_map: self.arr_map.clone(),
        }
    }

    /// True when both maps are bijections (an isomorphism of groupoids).
    pub fn is_bijective(&self) -> bool {
        let mut obj_seen = vec![false; self.target.n_objects()];
        let mut arr_seen = vec![false; self.target.n_arrows()];
        self.obj_map.len() == self.target.n_objects()
            && self.arr_map.len() == self.target.n_arrows()
            && self
                .obj_map
                .iter()
                .all(|&y| !std::mem::replace(&mut obj_seen[y], true))
            && self
                .arr_map
                .iter()
                .all(|&g| !std::mem::replace(&mut arr_seen[g], true))
    }
}

/// Pairs two functors with a common source into one functor into the product.
pub fn pair_into_product(left: &GpdFunctor, right: &GpdFunctor) -> (GpdProduct, GpdFunctor) {
    assert_eq!(
        left.source(),
        right.source(),
        "paired functors share a source"
    );
    let prod = product(left.target(), right.target());
    let obj_map = (0..left.source().n_objects())
        .map(|e| prod.obj_index(left.obj(e), right.obj(e)))
        .collect();
    let arr_map = (0..left.source().n_arrows())
        .map(|k| prod.arr_index(left.arr(k), right.arr(k)))
        .collect();
    let f = GpdFunctor::assemble(
        left.source().clone(),
        prod.groupoid.clone(),
        obj_map,
        arr_map,
    );
    (prod, f)
}

/// Witness that some hom-set map fails to be surjective.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FullnessWitness {
    pub a: usize,
    pub a_prime: usize,
    pub beta: usize,
}

/// Every hom-set map `A(a,a′) → B(Fa,Fa′)` is surjective.
pub fn is_full(f: &GpdFunctor) -> Check<FullnessWitness> {
    let (a_gpd, b_gpd) = (f.source(), f.target());
    for a in 0..a_gpd.n_objects() {
        for a_prime in 0..a_gpd.n_objects() {
            let image: Vec<usize> = a_gpd
                .hom(a, a_prime)
                .into_iter()
                .map(|alpha| f.arr(alpha))
                .collect();
            for beta in b_gpd.hom(f.obj(a), f.obj(a_prime)) {
                if !image.contains(&beta) {
                    return Check::Fails(FullnessWitness { a, a_prime, beta });
                }
            }
        }
    }
    Check::Holds
}

/// Witness: an object of the target isomorphic to nothing in the image.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EsoWitness {
    pub b: usize,
}

/// Every object of the target is isomorphic to the image of some object.
/// In a groupoid, isomorphic means joined by an arrow, so this reduces to a
/// component count.
pub fn is_eso(f: &GpdFunctor) -> Check<EsoWitness> {
    let components = f.target().pi0();
    let mut hit = vec![false; components.blocks.len()];
    for &b in f.obj_map() {
        hit[components.block_of[b]] = true;
    }
    for (blk, members) in components.blocks.iter().enumerate() {
        if !hit[blk] {
            return Check::Fails(EsoWitness { b: members[0] });
        }
    }
    Check::Holds
}

/// The comma groupoid `(b/F)` for `F : A → B` and an object `b` of `B`.
///
/// Objects are pairs `(β, a)` with `β : b → F(a)`, in lexicographic order;
/// an arrow `(β, a) → (β′, a′)` is an arrow `α : a → a′` of `A` with
/// `F(α)∘β = β′`, so arrows are indexed by pairs (comma object, α).
#[derive(Clone, Debug)]
pub struct CommaGroupoid {
    pub groupoid: Gpd,
    pub base_object: usize,
    pub objects: Vec<(usize, usize)>,
    /// Per comma arrow: (source comma object, underlying arrow of `A`).
    pub arrows: Vec<(usize, usize)>,
}

impl CommaGroupoid {
    /// Projection `(b/F) → A`.
    pub fn projection(&self, f: &GpdFunctor) -> GpdFunctor {
        GpdFunctor::assemble(
            self.groupoid.clone(),
            f.source().clone(),
            self.objects.iter().map(|&(_, a)| a).collect(),
            self.arrows.iter().map(|&(_, alpha)| alpha).collect(),
        )
    }
}

fn comma_objects(
    b: usize,
    f: &GpdFunctor,
) -> (Vec<(usize, usize)>, HashMap<(usize, usize), usize>) {
    let mut objects = Vec::new();
    // Group the objects of A by their image so each β pairs with every
    // preimage object; β ascends because arrows_from is in arrow order.
    let mut preimages: Vec<Vec<usize>> = vec![Vec::new(); f.target().n_objects()];
    for a in 0..f.source().n_objects() {
        preimages[f.obj(a)].push(a);
    }
    for &beta in f.target().arrows_from(b) {
        for &a in &preimages[f.target().cod(beta)] {
            objects.push((beta, a));
        }
    }
    objects.sort_unstable();
    let index = objects.iter().enumerate().map(|(i, &o)| (o, i)).collect();
    (objects, index)
}

/// Builds the full comma groupoid, with composition inherited from `A`.
pub fn comma_category(b: usize, f: &GpdFunctor) -> CommaGroupoid {
    let (objects, obj_index) = comma_objects(b, f);
    let a_gpd = f.source();
    let b_gpd = f.target();
    // Arrow (i, α) goes from object i = (β, a) to (F(α)∘β, cod α).
    let mut arrows = Vec::new();
    let mut offset = vec![0usize; objects.len()];
    for (i, &(_, a)) in objects.iter().enumerate() {
        offset[i] = arrows.len();
        for &alpha in a_gpd.arrows_from(a) {
            arrows.push((i, alpha));
        }
    }
    let target_of = |i: usize, alpha: usize| -> usize {
        let (beta, _) = objects[i];
        let beta_prime = b_gpd.comp(f.arr(alpha), beta);
        obj_index[&(beta_prime, a_gpd.cod(alpha))]
    };
    // Rank of each A-arrow within arrows_from(dom): gives arrow ids below.
    let mut rank = vec![0usize; a_gpd.n_arrows()];
    for x in 0..a_gpd.n_objects() {
        for (r, &alpha) in a_gpd.arrows_from(x).iter().enumerate() {
            rank[alpha] = r;
        }
    }
    let arrow_id = |i: usize, alpha: usize| offset[i] + rank[alpha];
    let mut dom = vec![0; arrows.len()];
    let mut cod = vec![0; arrows.len()];
    let mut inverse = vec![0; arrows.len()];
    for (k, &(i, alpha)) in arrows.iter().enumerate() {
        let j = target_of(i, alpha);
        dom[k] = i;
        cod[k] = j;
        inverse[k] = arrow_id(j, a_gpd.inverse(alpha));
    }
    let identity = objects
        .iter()
        .enumerate()
        .map(|(i, &(_, a))| arrow_id(i, a_gpd.identity(a)))
        .collect();
    let mut compose = HashMap::new();
    for (k, &(i, alpha)) in arrows.iter().enumerate() {
        let mid = cod[k];
        let (_, a_mid) = objects[mid];
        for &alpha2 in a_gpd.arrows_from(a_mid) {
            let k2 = arrow_id(mid, alpha2);
            compose.insert((k2, k), arrow_id(i, a_gpd.comp(alpha2, alpha)));
        }
    }
    let groupoid = Arc::new(FinGroupoid::assemble(
        objects.len(),
        dom,
        cod,
        identity,
        inverse,
        compose,
    ));
    CommaGroupoid {
        groupoid,
        base_object: b,
        objects,
        arrows,
    }
}

/// The comma objects of `(b/F)` with their partition into connected
/// components, computed without materializing the comma groupoid.
pub(crate) struct CommaPartition {
    pub objects: Vec<(usize, usize)>,
    pub partition: Partition,
}

pub(crate) fn comma_partition(b: usize, f: &GpdFunctor) -> CommaPartition {
    let (objects, obj_index) = comma_objects(b, f);
    let a_gpd = f.source();
    let b_gpd = f.target();
    let mut uf = UnionFind::new(objects.len());
    for (i, &(beta, a)) in objects.iter().enumerate() {
        for &alpha in a_gpd.arrows_from(a) {
            let beta_prime = b_gpd.comp(f.arr(alpha), beta);
            uf.union(i, obj_index[&(beta_prime, a_gpd.cod(alpha))]);
        }
    }
    let (block_of, blocks) = uf.blocks();
    CommaPartition {
        objects,
        partition: Partition { block_of, blocks },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::Group;

    fn z2() -> Gpd {
        Arc::new(FinGroupoid::from_group(&Group::cyclic(2)))
    }

    fn z4() -> Gpd {
        Arc::new(FinGroupoid::from_group(&Group::cyclic(4)))
    }

    fn z3() -> Gpd {
        Arc::new(FinGroupoid::from_group(&Group::cyclic(3)))
    }

    #[test]
    fn identity_functor_validates() {
        let g = z2();
        let id = GpdFunctor::identity(&g);
        assert!(GpdFunctor::validate(
            g.clone(),
            g.clone(),
            id.obj_map().to_vec(),
            id.arr_map().to_vec()
        )
        .is_ok());
    }

    #[test]
    fn z4_to_z2_reduction_is_a_functor() {
        // Arrow k of Z4 is the group element k; reduce mod 2.
        let arr_map: Vec<usize> = (0..4).map(|k| k % 2).collect();
        let f = GpdFunctor::validate(z4(), z2(), vec![0], arr_map).unwrap();
        // All 16 composition pairs were checked by validate; spot-check one.
        assert_eq!(f.arr(3), 1);
    }

    #[test]
    fn z2_into_z3_sending_g_to_generator_fails() {
        let err = GpdFunctor::validate(z2(), z3(), vec![0], vec![0, 1]).unwrap_err();
        assert_eq!(err, FunctorError::NotFunctorial(1, 1));
    }

    #[test]
    fn comma_of_identity_on_z2() {
        let g = z2();
        let id = GpdFunctor::identity(&g);
        let comma = comma_category(0, &id);
        // Objects are the two arrows out of the unique object. Every object
        // of A contributes one arrow to every other, so the comma groupoid
        // is the indiscrete groupoid on 2 objects.
        assert_eq!(comma.objects, vec![(0, 0), (1, 0)]);
        assert_eq!(comma.groupoid.n_arrows(), 4);
        assert_eq!(comma.groupoid.pi0().blocks.len(), 1);
        // Correct by construction, and literally a valid groupoid.
        assert!(FinGroupoid::validate(comma.groupoid.to_raw()).is_ok());
    }

    #[test]
    fn comma_over_unreachable_object_is_empty() {
        let point = Arc::new(FinGroupoid::discrete(1));
        let two = Arc::new(FinGroupoid::discrete(2));
        let incl = GpdFunctor::validate(point, two, vec![0], vec![0]).unwrap();
        let comma = comma_category(1, &incl);
        assert!(comma.objects.is_empty());
        assert_eq!(comma.groupoid.n_arrows(), 0);
    }

    #[test]
    fn comma_over_terminal_recovers_the_source() {
        let a = Arc::new(FinGroupoid::group_bundle(2, &Group::cyclic(2)));
        let one = Arc::new(FinGroupoid::discrete(1));
        let bang = GpdFunctor::validate(
            a.clone(),
            one,
            vec![0; a.n_objects()],
            vec![0; a.n_arrows()],
        )
        .unwrap();
        let comma = comma_category(0, &bang);
        assert_eq!(comma.groupoid.n_objects(), a.n_objects());
        assert_eq!(comma.groupoid.n_arrows(), a.n_arrows());
        let proj = comma.projection(&bang);
        assert!(proj.is_bijective());
    }

    #[test]
    fn fullness_and_essential_surjectivity() {
        let g = z2();
        let id = GpdFunctor::identity(&g);
        assert!(is_full(&id).holds());
        assert!(is_eso(&id).holds());

        let quot =
            GpdFunctor::validate(z4(), z2(), vec![0], (0..4).map(|k| k % 2).collect()).unwrap();
        assert!(is_full(&quot).holds());
        assert!(is_eso(&quot).holds());

        let point = Arc::new(FinGroupoid::discrete(1));
        let two = Arc::new(FinGroupoid::discrete(2));
        let incl = GpdFunctor::validate(point, two, vec![0], vec![0]).unwrap();
        assert!(is_full(&incl).holds());
        assert_eq!(is_eso(&incl).witness(), Some(&EsoWitness { b: 1 }));
    }

    #[test]
    fn comma_partition_matches_comma_category() {
        let quot =
            GpdFunctor::validate(z4(), z2(), vec![0], (0..4).map(|k| k % 2).collect()).unwrap();
        let fast = comma_partition(0, &quot);
        let full = comma_category(0, &quot);
        assert_eq!(fast.objects, full.objects);
        assert_eq!(fast.partition, full.groupoid.pi0());
        assert_eq!(fast.partition.blocks.len(), 1);
    }
}
