//! Nilpotent pre-Lie algebras over prime fields, the braces they induce
//! through the group of flows, and verification of the resulting set-theoretic
//! Yang-Baxter solutions.

pub mod brace;
pub mod classify;
pub mod error;
pub mod field;
pub mod filtration;
pub mod fixtures;
pub mod flows;
pub mod io;
pub mod linalg;
pub mod prelie;
pub mod ybe;

pub use error::{Error, Result};
pub use field::{fp_inverse, FpScalar, PrimeField};
pub use linalg::{contains, rref, subspace_sum, FpMatrix, FpVector, Subspace, MAX_DIM};
pub use prelie::{AxiomViolation, PreLieAlgebra};
