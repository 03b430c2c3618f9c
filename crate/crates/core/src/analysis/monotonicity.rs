use serde::Serialize;

use crate::analysis::options::{level_integral, CheckOptions};
use crate::analysis::report::{Direction, MonotonicityReport, SIGMA};
use crate::analysis::sphere::{sphere_family, SphereMethod};
use crate::error::{Error, Result};
use crate::fields::{PolynomialField, ScalarField};
use crate::harmonics::{is_harmonic, SolidHarmonic};
use crate::levelset::{radial_profile, Domain, GradientNorm, ProfileMethod, RadialOptions};

/// `F(r) = r^{−(n+k−2)} ∫_{{P=t} ∩ B(0,r)} |∇P|` on a radius grid, tested
/// for non-decrease with tolerance three times the largest scaled
/// quadrature error.
pub fn monotonicity_check(p: &SolidHarmonic, t: f64, radii: &[f64], opts: &CheckOptions) -> Result<MonotonicityReport> {
    let e = p.monotonicity_exponent();
    let prof = radial_profile(p.field(), t, &GradientNorm, radii, &opts.radial())?;
    let values: Vec<f64> = prof.values.iter().zip(radii).map(|(v, r)| v / r.powf(e)).collect();
    let errors: Vec<f64> = prof.errors.iter().zip(radii).map(|(v, r)| v / r.powf(e)).collect();
    let mut report = MonotonicityReport::with_error_tolerance(
        "monotonicity",
        Direction::NonDecreasing,
        radii.to_vec(),
        values,
        errors,
    )
    .param("t", t)
    .param("degree", p.degree() as f64)
    .param("dim", p.dim() as f64)
    .param("exponent", e)
    .param("h", prof.h)
    .param("near_critical_facets", prof.near_critical as f64);
    if prof.method == ProfileMethod::ThinShell {
        report = report
            .param("samples", opts.samples as f64)
            .param("seed", opts.seed as f64);
    }
    Ok(report)
}

/// `ψ(t) = ∫_{Z_t ∩ B(0,1)} |∇P|` on a level grid, with monotonicity
/// reports for both half-lines and raw second differences.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CorollaryReport {
    pub levels: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_error: Vec<f64>,
    /// Non-decrease on `t ≤ 0`.
    pub negative: MonotonicityReport,
    /// Non-increase on `t ≥ 0`.
    pub positive: MonotonicityReport,
    /// `ψ(t_{j−1}) − 2ψ(t_j) + ψ(t_{j+1})` at interior levels (a
    /// concavity diagnostic; not tested).
    pub second_differences: Vec<f64>,
    pub pass: bool,
}

pub fn corollary_unimodality(p: &SolidHarmonic, levels: &[f64], opts: &CheckOptions) -> Result<CorollaryReport> {
    if levels.is_empty() || levels.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter("level grid must be strictly increasing".into()));
    }
    let ball = Domain::centered_ball(p.dim(), 1.0)?;
    let mut psi = Vec::with_capacity(levels.len());
    let mut psi_error = Vec::with_capacity(levels.len());
    for &t in levels {
        let a = level_integral(p.field(), t, &ball, &GradientNorm, opts)?;
        psi.push(a.value);
        psi_error.push(a.error);
    }
    let half = |keep: &dyn Fn(f64) -> bool, direction, name| {
        let idx: Vec<usize> = (0..levels.len()).filter(|&j| keep(levels[j])).collect();
        MonotonicityReport::with_error_tolerance(
            name,
            direction,
            idx.iter().map(|&j| levels[j]).collect(),
            idx.iter().map(|&j| psi[j]).collect(),
            idx.iter().map(|&j| psi_error[j]).collect(),
        )
        .param("h", opts.h)
    };
    let negative = half(&|t| t <= 0.0, Direction::NonDecreasing, "corollary-negative");
    let positive = half(&|t| t >= 0.0, Direction::NonIncreasing, "corollary-positive");
    let second_differences = psi.windows(3).map(|w| w[0] - 2.0 * w[1] + w[2]).collect();
    let pass = negative.pass && positive.pass;
    Ok(CorollaryReport {
        levels: levels.to_vec(),
        psi,
        psi_error,
        negative,
        positive,
        second_differences,
        pass,
    })
}

/// `Φ(ε) = ε^{(n+k−2)/k} ∫_{{p ≥ ε}} (|∇_S p|² + k²p²) / p^{(n+2k−2)/k}`
/// over the unit sphere, with `p = P|_{S^{n−1}}`, tested for
/// non-increase.
///
/// The numerator equals `|∇P|²` on the sphere. All `ε` share the same
/// nodes, and the tolerance is three times the largest standard error of
/// consecutive differences.
pub fn spherical_monotonicity(p: &SolidHarmonic, eps: &[f64], nodes: usize, seed: u64) -> Result<MonotonicityReport> {
    if eps.is_empty() || eps[0] <= 0.0 || eps.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidParameter(
            "ε grid must be positive and strictly increasing".into(),
        ));
    }
    let n = p.dim() as f64;
    let k = p.degree() as f64;
    let outer = (n + k - 2.0) / k;
    let inner = (n + 2.0 * k - 2.0) / k;
    let f = p.field();
    let dim = p.dim();
    let fam = sphere_family(dim, nodes, seed, eps.len(), |u, out| {
        let mut grad = vec![0.0; dim];
        let value = f.value_gradient(u, &mut grad);
        let g2: f64 = grad.iter().map(|g| g * g).sum();
        for (o, &e) in out.iter_mut().zip(eps) {
            *o = if value >= e {
                e.powf(outer) * g2 / value.powf(inner)
            } else {
                0.0
            };
        }
    })?;
    let tolerance = SIGMA * fam.step_errors.iter().cloned().fold(0.0, f64::max);
    let mut report = MonotonicityReport::new(
        "spherical-monotonicity",
        Direction::NonIncreasing,
        eps.to_vec(),
        fam.values,
        fam.errors,
        tolerance,
    )
    .param("degree", k)
    .param("dim", n)
    .param("nodes", nodes as f64)
    .param("seed", seed as f64);
    if fam.method == SphereMethod::CircleMidpoint {
        report = report.note("circle midpoint rule; errors compare against half the nodes");
    }
    Ok(report)
}

/// Per-exponent row of [`ExplorationReport`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExponentRow {
    pub exponent: f64,
    pub values: Vec<f64>,
    pub max_violation: f64,
    pub violations: usize,
    pub tolerance: f64,
}

/// Exploratory table of `r ↦ r^{−e} ∫_{Z_0 ∩ B(x₀,r)} |∇f|` for several
/// exponents. No verdict is attached.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ExplorationReport {
    pub center: Vec<f64>,
    pub radii: Vec<f64>,
    pub profile: Vec<f64>,
    pub profile_error: Vec<f64>,
    /// `d log I / d log r` between consecutive radii (NaN where `I = 0`).
    pub log_slopes: Vec<f64>,
    pub rows: Vec<ExponentRow>,
    pub top_degree: u32,
}

/// Sweeps normalizations of the nodal-set measure of a (not necessarily
/// homogeneous) harmonic polynomial around a zero `x₀`. The candidates
/// always include `n − 1` and `n + k − 2` for the top degree `k`.
pub fn explore_general_monotonicity(
    f: &PolynomialField,
    center: &[f64],
    radii: &[f64],
    exponents: &[f64],
    opts: &CheckOptions,
) -> Result<ExplorationReport> {
    let poly = f.polynomial();
    if !is_harmonic(poly) {
        return Err(Error::InvalidParameter("the polynomial is not harmonic".into()));
    }
    if center.len() != f.dim() {
        return Err(Error::DimensionMismatch {
            expected: f.dim(),
            got: center.len(),
        });
    }
    let v0 = f.value(center);
    if v0.abs() > 1e-10 {
        return Err(Error::InvalidParameter(format!("f(x0) = {v0} is not zero")));
    }
    let n = f.dim() as f64;
    let k = poly.total_degree().unwrap_or(0);
    let mut candidates = vec![n - 1.0, n + k as f64 - 2.0];
    candidates.extend_from_slice(exponents);
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();
    let ropts = RadialOptions {
        center: Some(center.to_vec()),
        ..opts.radial()
    };
    let prof = radial_profile(f, 0.0, &GradientNorm, radii, &ropts)?;
    let log_slopes = prof
        .values
        .windows(2)
        .zip(radii.windows(2))
        .map(|(v, r)| {
            if v[0] > 0.0 && v[1] > 0.0 {
                (v[1] / v[0]).ln() / (r[1] / r[0]).ln()
            } else {
                f64::NAN
            }
        })
        .collect();
    let rows = candidates
        .iter()
        .map(|&e| {
            let values: Vec<f64> = prof.values.iter().zip(radii).map(|(v, r)| v / r.powf(e)).collect();
            let errors: Vec<f64> = prof.errors.iter().zip(radii).map(|(v, r)| v / r.powf(e)).collect();
            let m = MonotonicityReport::with_error_tolerance(
                "explore",
                Direction::NonDecreasing,
                radii.to_vec(),
                values,
                errors,
            );
            ExponentRow {
                exponent: e,
                values: m.values,
                max_violation: m.max_violation,
                violations: m.violations,
                tolerance: m.tolerance,
            }
        })
        .collect();
    Ok(ExplorationReport {
        center: center.to_vec(),
        radii: radii.to_vec(),
        profile: prof.values,
        profile_error: prof.errors,
        log_slopes,
        rows,
        top_degree: k,
    })
}
