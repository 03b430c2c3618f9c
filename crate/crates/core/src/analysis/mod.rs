//! Computations built on [`crate::levelset`]: densities of the
//! value distribution, unimodality and monotonicity reports, and checks of
//! the level-set identities.
//!
//! Statistical verdicts use three combined standard errors throughout.

mod crosscheck;
mod curvature;
mod density;
mod identities;
mod monotonicity;
mod options;
mod report;
pub mod sphere;

pub use crosscheck::quadrature_cross_check;
pub use curvature::{curvature_identity_check, level_geometry, LevelGeometry, MAX_TRIALS, REGULAR};
pub use density::{
    unimodality_check, value_distribution_density, DensityEstimate, Measure, UnimodalityReport, MIN_BINS,
    MIN_DENSITY_SAMPLES,
};
pub use identities::{
    divergence_identity_check, levelset_derivative_check, radial_derivative_identity, robin_identity_check, Rho,
};
pub use monotonicity::{
    corollary_unimodality, explore_general_monotonicity, monotonicity_check, spherical_monotonicity, CorollaryReport,
    ExplorationReport, ExponentRow,
};
pub use options::CheckOptions;
pub use report::{Direction, IdentityReport, MonotonicityReport, Table, SIGMA};
