//! Weighted level-set functionals of Laplace eigenfunctions and solid
//! spherical harmonics.
//!
//! * [`fields`]: closed-form scalar fields (polynomials, torus and box
//!   eigenfunctions, Gaussian-weighted fields).
//! * [`harmonics`]: exact construction of solid spherical harmonics.
//! * [`levelset`]: level-set extraction, weighted area, thin-shell Monte
//!   Carlo and radial profiles.
//! * [`analysis`]: value-distribution densities, identity checks and
//!   monotonicity reports.

// Negated comparisons reject NaN; index loops mirror the formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod analysis;
pub mod error;
pub mod fields;
pub mod harmonics;
pub mod levelset;
mod linalg;
pub mod mc;
pub mod poly;
pub mod presets;

pub use error::{Error, Result};
pub use fields::{Field, FieldSample, ScalarField};
pub use harmonics::SolidHarmonic;
pub use levelset::{Domain, LevelSetMesh, MCEstimate};
pub use poly::SparsePolynomial;
