//! Level sets `{f = t}`: extraction and weighted integrals.
//!
//! Two independent quadratures are provided. Mesh quadrature (n = 2, 3)
//! marches the Kuhn triangulation of a uniform grid and integrates over the
//! resulting piecewise-linear facets. The thin-shell estimator (any n)
//! uses the coarea formula, `∫_{Z_t} g ≈ (2δ)⁻¹ ∫_{|f−t|<δ} g·|∇f|`, with
//! uniform Monte Carlo samples.

mod clip;
mod domain;
mod export;
mod integrand;
mod mesh;
mod quadrature;

pub use domain::{unit_ball_volume, unit_sphere_area, Domain};
pub use export::{format_float, mesh_to_csv, mesh_to_off};
pub use integrand::{FieldValue, GradientNorm, Integrand, Unit, WeightedGradientNorm};
pub use mesh::{extract, extract_weighted, Facet, LevelSetMesh, NEAR_CRITICAL, REFINE_STEPS};
pub use quadrature::{
    default_delta, radial_profile, radial_profiles, thin_shell, thin_shell_detailed, weighted_area,
    weighted_area_estimate, AreaEstimate, ProfileMethod, RadialOptions, RadialProfile, ShellEstimate, MIN_SAMPLES,
};

pub use crate::mc::MCEstimate;
