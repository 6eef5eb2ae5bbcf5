//! Finite relation algebras presented by atom tables.

#![allow(clippy::needless_range_loop)]

pub mod algebra;
pub mod axioms;
pub mod constructions;
pub mod element;
pub mod eqlogic;
mod error;
pub mod format;
pub mod ideal;
pub mod points;
pub mod proper;
pub mod relation;
pub mod search;
pub mod structure;
pub mod subalgebra;

pub use algebra::{find_isomorphism, make_algebra, FiniteRelationAlgebra};
pub use axioms::{check_ra_axioms, derived_laws, AxiomReport, CheckOptions};
pub use element::{Element, Mask};
pub use error::{Error, Result};
pub use relation::ConcreteRelation;
pub use structure::AtomStructure;
