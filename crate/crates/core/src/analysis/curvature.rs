use crate::analysis::report::IdentityReport;
use crate::error::{Error, Result};
use crate::fields::{norm, ScalarField};
use crate::levelset::Domain;
use crate::mc::chunk_rng;

/// Trials allowed to find regular points before giving up.
pub const MAX_TRIALS: usize = 100_000;

/// Relative gradient threshold for regular points.
pub const REGULAR: f64 = 1e-6;

/// Geometry of the level set through a regular point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LevelGeometry {
    /// Mean curvature `H = −div N` with `N = ∇f/|∇f|`.
    pub mean_curvature: f64,
    /// `H_ρ = ρH − ⟨∇ρ, N⟩` for `ρ = |∇f|`.
    pub weighted_mean_curvature: f64,
    pub laplacian: f64,
    pub gradient_norm: f64,
}

/// Curvatures of `{f = f(x)}` at `x`; `None` where `∇f = 0`.
pub fn level_geometry<F: ScalarField + ?Sized>(field: &F, x: &[f64]) -> Option<LevelGeometry> {
    let n = field.dim();
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    let (_, lap) = field.second_order(x, &mut grad, &mut hess);
    let g = norm(&grad);
    if g == 0.0 {
        return None;
    }
    let unit: Vec<f64> = grad.iter().map(|v| v / g).collect();
    // ∇ρ = ∇²f·N for ρ = |∇f|.
    let grad_rho: Vec<f64> = (0..n)
        .map(|i| (0..n).map(|j| hess[i * n + j] * unit[j]).sum())
        .collect();
    let rho_n: f64 = grad_rho.iter().zip(&unit).map(|(a, b)| a * b).sum();
    let hnn: f64 = (0..n)
        .map(|i| unit[i] * (0..n).map(|j| hess[i * n + j] * unit[j]).sum::<f64>())
        .sum();
    let mean_curvature = -(lap - hnn) / g;
    Some(LevelGeometry {
        mean_curvature,
        weighted_mean_curvature: g * mean_curvature - rho_n,
        laplacian: lap,
        gradient_norm: g,
    })
}

/// Checks `H_ρ = −Δf` with `ρ = |∇f|` at `samples` random regular points
/// of `domain` (points with `|∇f| ≥ 10⁻⁶·scale`, the scale being the
/// largest gradient over a pilot sample).
pub fn curvature_identity_check<F: ScalarField + ?Sized>(
    field: &F,
    domain: &Domain,
    samples: usize,
    seed: u64,
) -> Result<IdentityReport> {
    domain.validate()?;
    if field.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: field.dim(),
        });
    }
    let n = domain.dim();
    let mut rng = chunk_rng(seed, 0);
    let mut x = vec![0.0; n];
    let mut scale: f64 = 0.0;
    for _ in 0..1000 {
        domain.sample(&mut rng, &mut x);
        scale = scale.max(field.gradient_norm(&x));
    }
    let mut found = 0;
    let mut trials = 0;
    let mut worst = (0.0, 0.0, -1.0);
    let limit = MAX_TRIALS.max(100 * samples);
    while found < samples && trials < limit {
        if trials == MAX_TRIALS && found == 0 {
            break;
        }
        trials += 1;
        domain.sample(&mut rng, &mut x);
        let Some(geo) = level_geometry(field, &x) else { continue };
        if geo.gradient_norm < REGULAR * scale {
            continue;
        }
        found += 1;
        let residual = (geo.weighted_mean_curvature + geo.laplacian).abs();
        if residual > worst.2 {
            worst = (geo.weighted_mean_curvature, -geo.laplacian, residual);
        }
    }
    if found == 0 {
        return Err(Error::NoRegularPoints(trials));
    }
    let mut report = IdentityReport::new("curvature-identity", (worst.0, 0.0), (worst.1, 0.0), 1e-9)
        .param("points", found as f64)
        .param("trials", trials as f64)
        .param("gradient_scale", scale)
        .param("seed", seed as f64);
    if found < samples {
        report = report.note(format!("only {found} regular points in {trials} trials"));
    }
    Ok(report.note("discrepancy is max |H_rho + laplacian| over the sampled points"))
}
