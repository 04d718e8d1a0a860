//! Parametrised case families of five-dimensional nilpotent pre-Lie
//! algebras, their constraint systems, and exhaustive or sampled sweeps.

pub mod cases;
pub mod fingerprint;
pub mod poly;
pub mod relations;
pub mod solve;
pub mod sweep;
pub mod transcribed;
pub mod word;

pub use cases::{all_cases, case, case_ids, expand, CaseSpec, Domain, Param};
pub use fingerprint::{fingerprint, Fingerprint};
pub use relations::{derived_relations, Relation};
pub use solve::Tower;
pub use sweep::{
    build_candidate, enumerate, enumerate_case, CandidateAlgebra, Census, RecordPolicy, SweepMode, SweepOptions,
    Validation,
};
pub use transcribed::{cross_check, CrossCheck, Discrepancy};
