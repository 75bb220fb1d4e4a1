//! Exact-arithmetic computation of the generation degree (beta) and
//! full-rank degree (gamma) of fields of rational invariants of finite
//! abelian groups.
//!
//! A representation of an abelian group given by characters determines an
//! integer lattice: the exponent vectors of invariant Laurent monomials,
//! i.e. the solutions of a system of linear congruences. The minimum
//! dilation of the standard simplex whose lattice points generate that
//! lattice (resp. a full-rank sublattice) is beta (resp. gamma). Everything
//! here is exact integer arithmetic; no floating point anywhere.
//!
//! Module map:
//! - [`linalg`]: Hermite/Smith normal forms, determinants, congruence kernels
//! - [`groups`]: abelian groups, characters, class canonicalization
//! - [`lattice`]: the representation lattice and membership tests
//! - [`degrees`]: simplex point enumeration and the beta/gamma engine
//! - [`bounds`]: closed-form bounds and equality certificates
//! - [`hilbert`]: Hilbert-series numerator for two-character representations
//! - [`survey`]: batch runs over equivalence classes, persistence, checkers

pub mod bounds;
pub mod degrees;
mod error;
pub mod groups;
pub mod hilbert;
pub mod lattice;
pub mod linalg;
pub mod survey;

pub use error::{Error, Result};

pub use degrees::{DegreeOutcome, DegreeResult, DegreeTraceRow};
pub use groups::{AbelianGroup, Character, CharacterSet};
pub use lattice::ReprLattice;
pub use linalg::{CongruenceSystem, HnfBasis, IntMatrix};
pub use survey::{CellResult, SurveyRecord};
