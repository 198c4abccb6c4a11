//! Strict translation between external structures and their internal
//! counterparts over the finite-set base, plus the coherence oracles that
//! check every internal operation against its external twin through the
//! translation.

use std::collections::HashMap;
use std::sync::Arc;

use crate::dist::{elements_span, Distributor, TwoSidedFibSpan};
use crate::exact::BaseObject;
use crate::functor::GpdFunctor;
use crate::groupoid::{FinGroupoid, Gpd};
use crate::internal::{
    distributor_to_internal_groupoid, internal_pi0, internal_span_compose, internal_tensor,
    is_internal_dfib, is_internal_final, ElementsGroupoid, IGpd, InternalDistributor,
    InternalError, InternalFunctor, InternalGroupoid, InternalSpanComposite,
    RawInternalDistributor, RawInternalGroupoid,
};
use crate::tensor::{compose_spans, tensor_product, ComposablePair, SpanComposition};

/// A finite groupoid as an internal groupoid over finite sets. The carriers
/// are the index sets themselves, so the translation is strict.
pub fn internalize_groupoid(g: &Gpd) -> IGpd {
    let raw = RawInternalGroupoid {
        c0: BaseObject::finset(g.n_objects()),
        c1: BaseObject::finset(g.n_arrows()),
        d: (0..g.n_arrows()).map(|f| g.dom(f)).collect(),
        c: (0..g.n_arrows()).map(|f| g.cod(f)).collect(),
        e: (0..g.n_objects()).map(|x| g.identity(x)).collect(),
        m: g.to_raw().compose,
        tau: (0..g.n_arrows()).map(|f| g.inverse(f)).collect(),
    };
    Arc::new(InternalGroupoid::validate(raw).expect("translated groupoid is valid"))
}

/// Reads an internal groupoid over finite sets back as composition tables.
pub fn externalize_groupoid(ig: &InternalGroupoid) -> Result<Gpd, InternalError> {
    let raw = crate::groupoid::RawGroupoid {
        n_objects: ig.c0().size(),
        dom: ig.d().map().to_vec(),
        cod: ig.c().map().to_vec(),
        compose: ig.m_triples(),
        identities: ig.e().map().to_vec(),
        inverses: ig.tau().map().to_vec(),
    };
    FinGroupoid::validate(raw)
        .map(Arc::new)
        .map_err(|_| InternalError::BadShape)
}

pub fn internalize_functor(f: &GpdFunctor, source: IGpd, target: IGpd) -> InternalFunctor {
    InternalFunctor::validate(source, target, f.obj_map().to_vec(), f.arr_map().to_vec())
        .expect("translated functor is valid")
}

/// A distributor as an internal one: the carrier is the global element set,
/// feet pick out the fiber anchors, actions are the tables.
pub fn internalize_distributor(d: &Distributor, source: IGpd, target: IGpd) -> InternalDistributor {
    let n = d.n_elements();
    let mut lambda = Vec::new();
    let mut rho = Vec::new();
    for s in 0..n {
        let (b, a, _) = d.elem(s);
        for &alpha in d.source().arrows_from(a) {
            lambda.push((alpha, s, d.act_left(alpha, s).unwrap()));
        }
        for &beta in d.target().arrows_into(b) {
            rho.push((s, beta, d.act_right(s, beta).unwrap()));
        }
    }
    let raw = RawInternalDistributor {
        s0: BaseObject::finset(n),
        left_foot: (0..n).map(|s| d.elem(s).1).collect(),
        right_foot: (0..n).map(|s| d.elem(s).0).collect(),
        lambda,
        rho,
    };
    InternalDistributor::validate(source, target, raw).expect("translated distributor is valid")
}

/// Reads an internal distributor over finite sets back as fiber tables.
/// Elements keep carrier order within each fiber; returns the distributor
/// together with the carrier-to-global-element relabeling.
pub fn externalize_distributor(
    id: &InternalDistributor,
    source: &Gpd,
    target: &Gpd,
) -> (Distributor, Vec<usize>) {
    let n = id.s0().size();
    let n_a = source.n_objects();
    let mut fiber_sizes = vec![0usize; target.n_objects() * n_a];
    let mut local_of = vec![0usize; n];
    for s in 0..n {
        let idx = id.right_foot().apply(s) * n_a + id.left_foot().apply(s);
        local_of[s] = fiber_sizes[idx];
        fiber_sizes[idx] += 1;
    }
    let shell = Distributor::assemble(
        source.clone(),
        target.clone(),
        fiber_sizes.clone(),
        HashMap::new(),
        HashMap::new(),
    );
    let global_of: Vec<usize> = (0..n)
        .map(|s| {
            shell.global(
                id.right_foot().apply(s),
                id.left_foot().apply(s),
                local_of[s],
            )
        })
        .collect();
    let mut left = HashMap::new();
    let mut right = HashMap::new();
    for s in 0..n {
        let a = id.left_foot().apply(s);
        let b = id.right_foot().apply(s);
        for &alpha in source.arrows_from(a) {
            left.insert(
                (alpha, global_of[s]),
                global_of[id.act_left(alpha, s).expect("composable")],
            );
        }
        for &beta in target.arrows_into(b) {
            right.insert(
                (global_of[s], beta),
                global_of[id.act_right(s, beta).expect("composable")],
            );
        }
    }
    (
        Distributor::assemble(source.clone(), target.clone(), fiber_sizes, left, right),
        global_of,
    )
}

/// Strict round trip on groupoids: externalizing the internalization gives
/// back the identical tables.
pub fn groupoid_roundtrip_strict(g: &Gpd) -> bool {
    match externalize_groupoid(&internalize_groupoid(g)) {
        Ok(back) => back.as_ref() == g.as_ref(),
        Err(_) => false,
    }
}

/// Internal components agree with the external partition, block by block.
pub fn pi0_coherent(g: &Gpd) -> bool {
    let pi0 = internal_pi0(&internalize_groupoid(g));
    pi0.block_of == g.pi0().block_of
}

/// Internal discrete-fibration test agrees with the external one.
pub fn dfib_coherent(f: &GpdFunctor) -> bool {
    let src = internalize_groupoid(f.source());
    let tgt = internalize_groupoid(f.target());
    let internal = is_internal_dfib(&internalize_functor(f, src, tgt));
    internal == crate::factor::is_discrete_fibration(f).holds()
}

/// Internal finality (fullness comparison + components) agrees with the
/// external comma-category criterion. The two sides use unrelated recipes.
pub fn finality_coherent(f: &GpdFunctor) -> bool {
    let src = internalize_groupoid(f.source());
    let tgt = internalize_groupoid(f.target());
    let internal = is_internal_final(&internalize_functor(f, src, tgt)).holds();
    internal == crate::factor::is_final(f).holds()
}

/// The internal elements groupoid of a translated distributor is isomorphic
/// to the external elements span through the arrow-label bijection; checks
/// objects, boundaries, identities, inverses and composition.
pub fn elements_coherent(d: &Distributor) -> bool {
    let src = internalize_groupoid(d.source());
    let tgt = internalize_groupoid(d.target());
    let id = internalize_distributor(d, src, tgt);
    let internal = distributor_to_internal_groupoid(&id);
    let external = elements_span(d);
    elements_groupoids_match(&internal, &id, &external)
}

fn elements_groupoids_match(
    internal: &ElementsGroupoid,
    id: &InternalDistributor,
    external: &TwoSidedFibSpan,
) -> bool {
    let ig = internal.groupoid.as_ref();
    let eg = external.apex();
    if ig.c0().size() != eg.n_objects() || ig.c1().size() != eg.n_arrows() {
        return false;
    }
    let label_index = crate::dist::arrow_by_labels(external);
    let mut phi = vec![usize::MAX; ig.c1().size()];
    let mut used = vec![false; eg.n_arrows()];
    for k in 0..ig.c1().size() {
        let (alpha, s, s_prime, beta) = internal.decode(k, id);
        let Some(&ext) = label_index.get(&(alpha, beta, s_prime)) else {
            return false;
        };
        if eg.dom(ext) != s || std::mem::replace(&mut used[ext], true) {
            return false;
        }
        phi[k] = ext;
    }
    for k in 0..ig.c1().size() {
        if eg.dom(phi[k]) != ig.d().apply(k)
            || eg.cod(phi[k]) != ig.c().apply(k)
            || eg.inverse(phi[k]) != phi[ig.tau().apply(k)]
        {
            return false;
        }
    }
    for x in 0..ig.c0().size() {
        if eg.identity(x) != phi[ig.e().apply(x)] {
            return false;
        }
    }
    for (idx, &(g, f)) in ig.composable_pairs().pairs.iter().enumerate() {
        if eg.compose(phi[g], phi[f]) != Some(phi[ig.m().apply(idx)]) {
            return false;
        }
    }
    true
}

/// The internal coequalizer composite agrees with the external coend
/// quotient: the two partitions of the pair set coincide and the induced
/// actions match through the canonical identification.
pub fn tensor_coherent(pair: &ComposablePair) -> bool {
    let a = internalize_groupoid(pair.s().source());
    let b = internalize_groupoid(pair.s().target());
    let c = internalize_groupoid(pair.t().target());
    let s_int = internalize_distributor(pair.s(), a, b.clone());
    let t_int = internalize_distributor(pair.t(), b, c);
    let Ok(internal) = internal_tensor(&s_int, &t_int) else {
        return false;
    };
    let external = tensor_product(pair);
    let mut class_to_block: HashMap<usize, usize> = HashMap::new();
    let mut block_to_class: HashMap<usize, usize> = HashMap::new();
    for (p, &(s_pt, t_pt)) in internal.p0.pairs.iter().enumerate() {
        let Some(class) = external.class_of_pair(t_pt, s_pt) else {
            return false;
        };
        let block = internal.q0.block_of[p];
        if *class_to_block.entry(class).or_insert(block) != block {
            return false;
        }
        if *block_to_class.entry(block).or_insert(class) != class {
            return false;
        }
    }
    if internal.q0.obj.size() != external.distributor.n_elements() {
        return false;
    }
    let a_ext = pair.s().source();
    let c_ext = pair.t().target();
    for block in 0..internal.q0.obj.size() {
        let class = block_to_class[&block];
        let (c_obj, a_obj, _) = external.distributor.elem(class);
        for &alpha in a_ext.arrows_from(a_obj) {
            match (
                internal.distributor.act_left(alpha, block),
                external.distributor.act_left(alpha, class),
            ) {
                (Some(ib), Some(ec)) if block_to_class[&ib] == ec => {}
                _ => return false,
            }
        }
        for &gamma in c_ext.arrows_into(c_obj) {
            match (
                internal.distributor.act_right(block, gamma),
                external.distributor.act_right(class, gamma),
            ) {
                (Some(ib), Some(ec)) if block_to_class[&ib] == ec => {}
                _ => return false,
            }
        }
    }
    true
}

/// The levelwise-pullback span composite agrees with the external one:
/// object carriers coincide and arrows correspond by labels, preserving all
/// structure.
pub fn span_compose_coherent(pair: &ComposablePair) -> bool {
    let a = internalize_groupoid(pair.s().source());
    let b = internalize_groupoid(pair.s().target());
    let c = internalize_groupoid(pair.t().target());
    let s_int = internalize_distributor(pair.s(), a, b.clone());
    let t_int = internalize_distributor(pair.t(), b, c);
    let Ok(internal) = internal_span_compose(&s_int, &t_int) else {
        return false;
    };
    let es_s = elements_span(pair.s());
    let es_t = elements_span(pair.t());
    let Ok(external) = compose_spans(&es_s, &es_t) else {
        return false;
    };
    composites_match(&internal, &s_int, &t_int, &es_s, &es_t, &external)
}

fn composites_match(
    internal: &InternalSpanComposite,
    s_int: &InternalDistributor,
    t_int: &InternalDistributor,
    es_s: &TwoSidedFibSpan,
    es_t: &TwoSidedFibSpan,
    external: &SpanComposition,
) -> bool {
    let ig = internal.groupoid.as_ref();
    let eg = external.span.apex();
    if ig.c0().size() != eg.n_objects() || ig.c1().size() != eg.n_arrows() {
        return false;
    }
    let ext_obj_index: HashMap<(usize, usize), usize> = external
        .obj_pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let mut obj_phi = Vec::with_capacity(internal.objects.pairs.len());
    for &p in &internal.objects.pairs {
        let Some(&i) = ext_obj_index.get(&p) else {
            return false;
        };
        obj_phi.push(i);
    }
    let ext_arr_index: HashMap<(usize, usize), usize> = external
        .arr_pairs
        .iter()
        .enumerate()
        .map(|(i, &p)| (p, i))
        .collect();
    let s_label_index = crate::dist::arrow_by_labels(es_s);
    let t_label_index = crate::dist::arrow_by_labels(es_t);
    let mut arr_phi = vec![usize::MAX; ig.c1().size()];
    let mut used = vec![false; eg.n_arrows()];
    for k in 0..ig.c1().size() {
        let (sx, tx) = internal.arrows.pairs[k];
        let (alpha, _s_pt, s_prime, beta) = internal.s_span.decode(sx, s_int);
        let (beta2, _t_pt, t_prime, gamma) = internal.t_span.decode(tx, t_int);
        if beta != beta2 {
            return false;
        }
        let (Some(&se), Some(&te)) = (
            s_label_index.get(&(alpha, beta, s_prime)),
            t_label_index.get(&(beta, gamma, t_prime)),
        ) else {
            return false;
        };
        let Some(&ext) = ext_arr_index.get(&(se, te)) else {
            return false;
        };
        if std::mem::replace(&mut used[ext], true) {
            return false;
        }
        arr_phi[k] = ext;
    }
    for k in 0..ig.c1().size() {
        if eg.dom(arr_phi[k]) != obj_phi[ig.d().apply(k)]
            || eg.cod(arr_phi[k]) != obj_phi[ig.c().apply(k)]
        {
            return false;
        }
    }
    for (idx, &(g, f)) in ig.composable_pairs().pairs.iter().enumerate() {
        if eg.compose(arr_phi[g], arr_phi[f]) != Some(arr_phi[ig.m().apply(idx)]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::RawDistributor;
    use crate::exact::Group;

    fn z2() -> Gpd {
        Arc::new(FinGroupoid::from_group(&Group::cyclic(2)))
    }

    fn regular_z2_biset() -> Distributor {
        let g = z2();
        Distributor::validate(RawDistributor {
            source: g.clone(),
            target: g,
            fiber_sizes: vec![2],
            left: vec![(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)],
            right: vec![(0, 0, 0), (1, 0, 1), (0, 1, 1), (1, 1, 0)],
        })
        .unwrap()
    }

    #[test]
    fn groupoid_roundtrip_is_strict() {
        for g in [
            Arc::new(FinGroupoid::discrete(3)),
            z2(),
            Arc::new(FinGroupoid::group_bundle(2, &Group::symmetric_3())),
        ] {
            assert!(groupoid_roundtrip_strict(&g));
            assert!(pi0_coherent(&g));
        }
    }

    #[test]
    fn functor_checks_cohere() {
        let quot = GpdFunctor::validate(
            Arc::new(FinGroupoid::from_group(&Group::cyclic(4))),
            z2(),
            vec![0],
            (0..4).map(|k| k % 2).collect(),
        )
        .unwrap();
        assert!(dfib_coherent(&quot));
        assert!(finality_coherent(&quot));

        let point = Arc::new(FinGroupoid::discrete(1));
        let two = Arc::new(FinGroupoid::discrete(2));
        let incl = GpdFunctor::validate(point, two, vec![0], vec![0]).unwrap();
        assert!(dfib_coherent(&incl));
        assert!(finality_coherent(&incl));
    }

    #[test]
    fn elements_and_tensor_cohere_on_bisets() {
        let d = regular_z2_biset();
        assert!(elements_coherent(&d));
        let pair = ComposablePair::new(d.clone(), d).unwrap();
        assert!(tensor_coherent(&pair));
        assert!(span_compose_coherent(&pair));
    }

    #[test]
    fn internal_hom_matches_translated_hom() {
        let g = z2();
        let ig = internalize_groupoid(&g);
        let hom_int = InternalDistributor::hom(&ig);
        let hom_ext = crate::dist::hom_distributor(&g);
        let (ext_back, _) = externalize_distributor(&hom_int, &g, &g);
        assert_eq!(ext_back, hom_ext);
    }
}
