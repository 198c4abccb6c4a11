//! JSON document formats for groupoids, functors, distributors, spans and
//! internal structures, with strict validation on load.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dist::{Distributor, RawDistributor, TwoSidedFibSpan};
use crate::exact::{BaseObject, Group, Instance};
use crate::factor::FactorizationResult;
use crate::functor::GpdFunctor;
use crate::groupoid::{FinGroupoid, Gpd, RawGroupoid};
use crate::internal::{
    IGpd, InternalDistributor, InternalGroupoid, RawInternalDistributor, RawInternalGroupoid,
};

#[derive(Debug, Error)]
pub enum JsonError {
    #[error("malformed json: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("document structure: {0}")]
    Structure(String),
    #[error("groupoid: {0}")]
    Groupoid(#[from] crate::groupoid::GroupoidError),
    #[error("functor: {0}")]
    Functor(#[from] crate::functor::FunctorError),
    #[error("distributor: {0}")]
    Distributor(#[from] crate::dist::DistributorError),
    #[error("span: {0}")]
    Span(#[from] crate::dist::SpanError),
    #[error("group: {0}")]
    Group(#[from] crate::exact::GroupError),
    #[error("base: {0}")]
    Base(#[from] crate::exact::BaseError),
    #[error("internal: {0}")]
    Internal(#[from] crate::internal::InternalError),
}

fn structure(msg: impl Into<String>) -> JsonError {
    JsonError::Structure(msg.into())
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowDoc {
    pub id: usize,
    pub dom: usize,
    pub cod: usize,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupoidDoc {
    pub objects: usize,
    pub arrows: Vec<ArrowDoc>,
    pub compose: Vec<[usize; 3]>,
    pub identities: Vec<usize>,
    pub inverses: Vec<usize>,
}

impl GroupoidDoc {
    pub fn of(g: &FinGroupoid) -> Self {
        let raw = g.to_raw();
        GroupoidDoc {
            objects: raw.n_objects,
            arrows: (0..raw.dom.len())
                .map(|id| ArrowDoc {
                    id,
                    dom: raw.dom[id],
                    cod: raw.cod[id],
                })
                .collect(),
            compose: raw.compose.iter().map(|&(g, f, gf)| [g, f, gf]).collect(),
            identities: raw.identities,
            inverses: raw.inverses,
        }
    }

    /// Validates the document: arrow ids must be exactly `0..n` in order.
    pub fn to_groupoid(&self) -> Result<Gpd, JsonError> {
        for (k, arrow) in self.arrows.iter().enumerate() {
            if arrow.id != k {
                return Err(structure(format!(
                    "arrow ids must be sorted and dense; found {} at position {k}",
                    arrow.id
                )));
            }
        }
        let raw = RawGroupoid {
            n_objects: self.objects,
            dom: self.arrows.iter().map(|a| a.dom).collect(),
            cod: self.arrows.iter().map(|a| a.cod).collect(),
            compose: self.compose.iter().map(|&[g, f, gf]| (g, f, gf)).collect(),
            identities: self.identities.clone(),
            inverses: self.inverses.clone(),
        };
        Ok(Arc::new(FinGroupoid::validate(raw)?))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MapsDoc {
    pub obj_map: Vec<usize>,
    pub arr_map: Vec<usize>,
}

impl MapsDoc {
    pub fn of(f: &GpdFunctor) -> Self {
        MapsDoc {
            obj_map: f.obj_map().to_vec(),
            arr_map: f.arr_map().to_vec(),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct FunctorDoc {
    pub source: GroupoidDoc,
    pub target: GroupoidDoc,
    pub obj_map: Vec<usize>,
    pub arr_map: Vec<usize>,
}

impl FunctorDoc {
    pub fn of(f: &GpdFunctor) -> Self {
        FunctorDoc {
            source: GroupoidDoc::of(f.source()),
            target: GroupoidDoc::of(f.target()),
            obj_map: f.obj_map().to_vec(),
            arr_map: f.arr_map().to_vec(),
        }
    }

    pub fn to_functor(&self) -> Result<GpdFunctor, JsonError> {
        let source = self.source.to_groupoid()?;
        let target = self.target.to_groupoid()?;
        Ok(GpdFunctor::validate(
            source,
            target,
            self.obj_map.clone(),
            self.arr_map.clone(),
        )?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DistributorDoc {
    #[serde(rename = "A")]
    pub a: GroupoidDoc,
    #[serde(rename = "B")]
    pub b: GroupoidDoc,
    /// Fiber element names keyed by "b,a".
    pub fibers: BTreeMap<String, Vec<String>>,
    pub left: Vec<[usize; 3]>,
    pub right: Vec<[usize; 3]>,
}

impl DistributorDoc {
    pub fn of(d: &Distributor) -> Self {
        let raw = d.raw();
        let mut fibers = BTreeMap::new();
        for b in 0..d.target().n_objects() {
            for a in 0..d.source().n_objects() {
                let size = d.fiber_size(b, a);
                if size > 0 {
                    fibers.insert(
                        format!("{b},{a}"),
                        (0..size).map(|i| format!("s{i}")).collect(),
                    );
                }
            }
        }
        DistributorDoc {
            a: GroupoidDoc::of(d.source()),
            b: GroupoidDoc::of(d.target()),
            fibers,
            left: raw.left.iter().map(|&(x, y, z)| [x, y, z]).collect(),
            right: raw.right.iter().map(|&(x, y, z)| [x, y, z]).collect(),
        }
    }

    pub fn to_distributor(&self) -> Result<Distributor, JsonError> {
        let source = self.a.to_groupoid()?;
        let target = self.b.to_groupoid()?;
        let mut fiber_sizes = vec![0usize; target.n_objects() * source.n_objects()];
        for (key, names) in &self.fibers {
            let (b, a) = key
                .split_once(',')
                .ok_or_else(|| structure(format!("fiber key '{key}' is not 'b,a'")))?;
            let b: usize = b
                .trim()
                .parse()
                .map_err(|_| structure(format!("bad fiber key '{key}'")))?;
            let a: usize = a
                .trim()
                .parse()
                .map_err(|_| structure(format!("bad fiber key '{key}'")))?;
            if b >= target.n_objects() || a >= source.n_objects() {
                return Err(structure(format!("fiber key '{key}' out of range")));
            }
            fiber_sizes[b * source.n_objects() + a] = names.len();
        }
        let raw = RawDistributor {
            source,
            target,
            fiber_sizes,
            left: self.left.iter().map(|&[x, y, z]| (x, y, z)).collect(),
            right: self.right.iter().map(|&[x, y, z]| (x, y, z)).collect(),
        };
        Ok(Distributor::validate(raw)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct SpanDoc {
    pub apex: GroupoidDoc,
    #[serde(rename = "A")]
    pub a: GroupoidDoc,
    #[serde(rename = "B")]
    pub b: GroupoidDoc,
    pub left: MapsDoc,
    pub right: MapsDoc,
}

impl SpanDoc {
    pub fn of(span: &TwoSidedFibSpan) -> Self {
        SpanDoc {
            apex: GroupoidDoc::of(span.apex()),
            a: GroupoidDoc::of(span.left().target()),
            b: GroupoidDoc::of(span.right().target()),
            left: MapsDoc::of(span.left()),
            right: MapsDoc::of(span.right()),
        }
    }

    pub fn to_span(&self) -> Result<TwoSidedFibSpan, JsonError> {
        let apex = self.apex.to_groupoid()?;
        let a = self.a.to_groupoid()?;
        let b = self.b.to_groupoid()?;
        let left = GpdFunctor::validate(
            apex.clone(),
            a,
            self.left.obj_map.clone(),
            self.left.arr_map.clone(),
        )?;
        let right = GpdFunctor::validate(
            apex,
            b,
            self.right.obj_map.clone(),
            self.right.arr_map.clone(),
        )?;
        Ok(TwoSidedFibSpan::new(left, right)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct GroupDoc {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BaseDoc {
    pub base: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub group: Option<GroupDoc>,
}

impl BaseDoc {
    pub fn of(instance: &Instance) -> Self {
        match instance {
            Instance::FinSet => BaseDoc {
                base: "finset".into(),
                group: None,
            },
            Instance::GSet(g) => BaseDoc {
                base: "gset".into(),
                group: Some(GroupDoc {
                    order: g.order(),
                    table: g.table().clone(),
                }),
            },
        }
    }

    pub fn to_instance(&self) -> Result<Instance, JsonError> {
        match self.base.as_str() {
            "finset" => Ok(Instance::FinSet),
            "gset" => {
                let doc = self
                    .group
                    .as_ref()
                    .ok_or_else(|| structure("gset base requires a group"))?;
                if doc.table.len() != doc.order {
                    return Err(structure("group table does not match the stated order"));
                }
                Ok(Instance::GSet(Arc::new(Group::from_table(
                    doc.table.clone(),
                )?)))
            }
            other => Err(structure(format!("unknown base '{other}'"))),
        }
    }

    /// Parses a base selector such as `finset`, `gset:z2`, `gset:z3`,
    /// `gset:s3`.
    pub fn from_selector(selector: &str) -> Result<Instance, JsonError> {
        match selector {
            "finset" => Ok(Instance::FinSet),
            "gset:z2" => Ok(Instance::GSet(Arc::new(Group::cyclic(2)))),
            "gset:z3" => Ok(Instance::GSet(Arc::new(Group::cyclic(3)))),
            "gset:v4" => Ok(Instance::GSet(Arc::new(Group::klein_four()))),
            "gset:s3" => Ok(Instance::GSet(Arc::new(Group::symmetric_3()))),
            other => Err(structure(format!("unknown base selector '{other}'"))),
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct BaseObjectDoc {
    pub size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub action: Option<Vec<Vec<usize>>>,
}

impl BaseObjectDoc {
    pub fn of(obj: &BaseObject) -> Self {
        match obj.instance() {
            Instance::FinSet => BaseObjectDoc {
                size: obj.size(),
                action: None,
            },
            Instance::GSet(g) => BaseObjectDoc {
                size: obj.size(),
                action: Some(
                    (0..g.order())
                        .map(|h| (0..obj.size()).map(|x| obj.act(h, x)).collect())
                        .collect(),
                ),
            },
        }
    }

    pub fn to_object(&self, instance: &Instance) -> Result<BaseObject, JsonError> {
        match instance {
            Instance::FinSet => Ok(BaseObject::finset(self.size)),
            Instance::GSet(g) => {
                let action = self
                    .action
                    .clone()
                    .ok_or_else(|| structure("gset object requires an action table"))?;
                Ok(BaseObject::gset(g.clone(), self.size, action)?)
            }
        }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InternalGroupoidDoc {
    pub base: BaseDoc,
    pub c0: BaseObjectDoc,
    pub c1: BaseObjectDoc,
    pub d: Vec<usize>,
    pub c: Vec<usize>,
    pub e: Vec<usize>,
    pub m: Vec<[usize; 3]>,
    pub tau: Vec<usize>,
}

impl InternalGroupoidDoc {
    pub fn of(g: &InternalGroupoid) -> Self {
        InternalGroupoidDoc {
            base: BaseDoc::of(g.instance()),
            c0: BaseObjectDoc::of(g.c0()),
            c1: BaseObjectDoc::of(g.c1()),
            d: g.d().map().to_vec(),
            c: g.c().map().to_vec(),
            e: g.e().map().to_vec(),
            m: g.m_triples().iter().map(|&(x, y, z)| [x, y, z]).collect(),
            tau: g.tau().map().to_vec(),
        }
    }

    pub fn to_groupoid(&self) -> Result<IGpd, JsonError> {
        let instance = self.base.to_instance()?;
        let raw = RawInternalGroupoid {
            c0: self.c0.to_object(&instance)?,
            c1: self.c1.to_object(&instance)?,
            d: self.d.clone(),
            c: self.c.clone(),
            e: self.e.clone(),
            m: self.m.iter().map(|&[x, y, z]| (x, y, z)).collect(),
            tau: self.tau.clone(),
        };
        Ok(Arc::new(InternalGroupoid::validate(raw)?))
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct InternalDistributorDoc {
    pub base: BaseDoc,
    pub source: InternalGroupoidDoc,
    pub target: InternalGroupoidDoc,
    pub s0: BaseObjectDoc,
    pub left_foot: Vec<usize>,
    pub right_foot: Vec<usize>,
    pub lambda: Vec<[usize; 3]>,
    pub rho: Vec<[usize; 3]>,
}

impl InternalDistributorDoc {
    pub fn of(d: &InternalDistributor) -> Self {
        let raw = d.raw();
        InternalDistributorDoc {
            base: BaseDoc::of(d.source().instance()),
            source: InternalGroupoidDoc::of(d.source()),
            target: InternalGroupoidDoc::of(d.target()),
            s0: BaseObjectDoc::of(d.s0()),
            left_foot: raw.left_foot,
            right_foot: raw.right_foot,
            lambda: raw.lambda.iter().map(|&(x, y, z)| [x, y, z]).collect(),
            rho: raw.rho.iter().map(|&(x, y, z)| [x, y, z]).collect(),
        }
    }

    pub fn to_distributor(&self) -> Result<InternalDistributor, JsonError> {
        let instance = self.base.to_instance()?;
        let source = self.source.to_groupoid()?;
        let target = self.target.to_groupoid()?;
        let raw = RawInternalDistributor {
            s0: self.s0.to_object(&instance)?,
            left_foot: self.left_foot.clone(),
            right_foot: self.right_foot.clone(),
            lambda: self.lambda.iter().map(|&[x, y, z]| (x, y, z)).collect(),
            rho: self.rho.iter().map(|&[x, y, z]| (x, y, z)).collect(),
        };
        Ok(InternalDistributor::validate(source, target, raw)?)
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProvenanceDoc {
    pub base: usize,
    pub representative: [usize; 2],
    pub members: Vec<[usize; 2]>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FactorizationDoc {
    pub final_part: MapsDoc,
    pub middle: GroupoidDoc,
    pub dfib_part: MapsDoc,
    pub provenance: Vec<ProvenanceDoc>,
}

impl FactorizationDoc {
    pub fn of(fact: &FactorizationResult) -> Self {
        FactorizationDoc {
            final_part: MapsDoc::of(&fact.final_part),
            middle: GroupoidDoc::of(&fact.middle),
            dfib_part: MapsDoc::of(&fact.dfib_part),
            provenance: fact
                .provenance
                .iter()
                .map(|mo| ProvenanceDoc {
                    base: mo.base,
                    representative: [mo.representative.0, mo.representative.1],
                    members: mo.members.iter().map(|&(x, y)| [x, y]).collect(),
                })
                .collect(),
        }
    }
}

/// A parsed input document of any supported kind, detected by its fields.
pub enum Document {
    Groupoid(Gpd),
    Functor(GpdFunctor),
    Distributor(Distributor),
    Span(TwoSidedFibSpan),
    InternalGroupoid(IGpd),
    InternalDistributor(InternalDistributor),
}

impl Document {
    pub fn kind(&self) -> &'static str {
        match self {
            Document::Groupoid(_) => "groupoid",
            Document::Functor(_) => "functor",
            Document::Distributor(_) => "distributor",
            Document::Span(_) => "span",
            Document::InternalGroupoid(_) => "internal-groupoid",
            Document::InternalDistributor(_) => "internal-distributor",
        }
    }
}

/// Detects the document kind from its distinguishing fields and validates.
pub fn parse_document(text: &str) -> Result<Document, JsonError> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let obj = value
        .as_object()
        .ok_or_else(|| structure("expected a json object"))?;
    if obj.contains_key("s0") && obj.contains_key("lambda") {
        let doc: InternalDistributorDoc = serde_json::from_value(value)?;
        return Ok(Document::InternalDistributor(doc.to_distributor()?));
    }
    if obj.contains_key("c0") && obj.contains_key("c1") {
        let doc: InternalGroupoidDoc = serde_json::from_value(value)?;
        return Ok(Document::InternalGroupoid(doc.to_groupoid()?));
    }
    if obj.contains_key("apex") {
        let doc: SpanDoc = serde_json::from_value(value)?;
        return Ok(Document::Span(doc.to_span()?));
    }
    if obj.contains_key("fibers") {
        let doc: DistributorDoc = serde_json::from_value(value)?;
        return Ok(Document::Distributor(doc.to_distributor()?));
    }
    if obj.contains_key("obj_map") {
        let doc: FunctorDoc = serde_json::from_value(value)?;
        return Ok(Document::Functor(doc.to_functor()?));
    }
    if obj.contains_key("objects") && obj.contains_key("arrows") {
        let doc: GroupoidDoc = serde_json::from_value(value)?;
        return Ok(Document::Groupoid(doc.to_groupoid()?));
    }
    Err(structure(
        "unrecognized document; expected a groupoid, functor, distributor, span, \
         internal-groupoid or internal-distributor",
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::hom_distributor;

    #[test]
    fn groupoid_roundtrips_through_json() {
        let g = FinGroupoid::group_bundle(2, &Group::cyclic(2));
        let doc = GroupoidDoc::of(&g);
        let text = serde_json::to_string(&doc).unwrap();
        match parse_document(&text).unwrap() {
            Document::Groupoid(back) => assert_eq!(back.as_ref(), &g),
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn unsorted_arrow_ids_rejected() {
        let g = FinGroupoid::discrete(2);
        let mut doc = GroupoidDoc::of(&g);
        doc.arrows.swap(0, 1);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(parse_document(&text).is_err());
    }

    #[test]
    fn duplicate_compose_entries_rejected() {
        let g = FinGroupoid::discrete(1);
        let mut doc = GroupoidDoc::of(&g);
        doc.compose.push(doc.compose[0]);
        let text = serde_json::to_string(&doc).unwrap();
        assert!(parse_document(&text).is_err());
    }

    #[test]
    fn distributor_roundtrips_through_json() {
        let g = Arc::new(FinGroupoid::from_group(&Group::cyclic(2)));
        let d = hom_distributor(&g);
        let doc = DistributorDoc::of(&d);
        let text = serde_json::to_string(&doc).unwrap();
        match parse_document(&text).unwrap() {
            Document::Distributor(back) => assert_eq!(back, d),
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn internal_groupoid_roundtrips_through_json() {
        let g = Arc::new(FinGroupoid::from_group(&Group::cyclic(2)));
        let orbit = BaseObject::gset_regular(Arc::new(Group::cyclic(2)));
        let ig = crate::gen::induce_groupoid(&g, &Arc::new(Group::cyclic(2)), &orbit);
        let doc = InternalGroupoidDoc::of(&ig);
        let text = serde_json::to_string(&doc).unwrap();
        match parse_document(&text).unwrap() {
            Document::InternalGroupoid(back) => {
                assert_eq!(back.c1().size(), ig.c1().size());
            }
            other => panic!("wrong kind {}", other.kind()),
        }
    }

    #[test]
    fn base_selectors() {
        assert_eq!(BaseDoc::from_selector("finset").unwrap(), Instance::FinSet);
        assert!(matches!(
            BaseDoc::from_selector("gset:s3").unwrap(),
            Instance::GSet(_)
        ));
        assert!(BaseDoc::from_selector("gset:z9").is_err());
    }
}
