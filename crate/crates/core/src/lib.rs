//! Finite groupoids, distributors (profunctors) and the comprehensive
//! (final / discrete-fibration) factorization system.
//!
//! The crate provides:
//!
//! * validated finite groupoids and functors given by explicit composition
//!   tables ([`groupoid`], [`functor`]);
//! * the comprehensive factorization of a functor between groupoids, with
//!   class-membership checkers for final functors and discrete (op)fibrations
//!   ([`factor`]);
//! * distributors between groupoids as fiber/action tables, their equivalence
//!   with discrete two-sided fibrations, and the explicit lifting formulas
//!   ([`dist`]);
//! * both composition routes — the coend quotient and the reflection of the
//!   span composite — together with the canonical comparison between them and
//!   the bicategory-law audits ([`tensor`]);
//! * a finite Barr-exact base abstraction (finite sets and finite G-sets)
//!   with pullbacks, reflexive coequalizers and image factorizations
//!   ([`exact`]);
//! * groupoids, functors and distributors internal to such a base, including
//!   the connected-components functor, internal finality and the coequalizer
//!   composition of internal distributors ([`internal`], [`translate`]);
//! * JSON formats, seeded instance generators and a property-audit runner
//!   ([`json`], [`gen`], [`audit`]).

pub mod audit;
pub mod dist;
pub mod exact;
pub mod factor;
pub mod functor;
pub mod gen;
pub mod groupoid;
pub mod internal;
pub mod iso;
pub mod json;
pub mod tensor;
pub mod translate;
mod util;
pub mod verdict;

pub use dist::{Distributor, TwoSidedFibSpan};
pub use exact::{BaseMorphism, BaseObject, Group, Instance};
pub use factor::FactorizationResult;
pub use functor::GpdFunctor;
pub use groupoid::{FinGroupoid, Gpd};
pub use internal::{InternalDistributor, InternalFunctor, InternalGroupoid};
