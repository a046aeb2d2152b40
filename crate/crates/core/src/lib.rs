//! Finite 2-groups with large automorphism groups: field and matrix
//! arithmetic, group constructions, automorphism computations, modular
//! representations and reproducible verification scenarios.

pub mod error;
pub mod gf2n;
pub mod groups;
pub mod linalg;
pub mod permgrp;
pub mod constructions;
pub mod automorphisms;
pub mod repmod;
pub mod catalog;
pub mod verify;

pub use error::{Error, Result};
pub use gf2n::{FieldContext, FieldElement};
pub use groups::{ElemId, Family, FiniteGroup, Subgroup};
pub use linalg::{Matrix, Subspace};
pub use permgrp::{Permutation, StabChain};
pub use automorphisms::{Automorphism, FusionPartition};
pub use repmod::{GModule, IsoVerdict};
pub use catalog::CatalogEntry;
pub use verify::{Report, Scenario, Verdict};
