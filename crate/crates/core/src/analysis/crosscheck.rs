use crate::analysis::report::IdentityReport;
use crate::analysis::CheckOptions;
use crate::error::Result;
use crate::fields::ScalarField;
use crate::levelset::{default_delta, thin_shell_detailed, weighted_area_estimate, Domain, GradientNorm};

/// Compares `ψ(t) = ∫_{Z_t} |∇f|` from mesh quadrature (left) with the
/// thin-shell Monte Carlo estimate (right). Only dimensions 2 and 3.
pub fn quadrature_cross_check<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    domain: &Domain,
    opts: &CheckOptions,
) -> Result<IdentityReport> {
    let mesh = weighted_area_estimate(field, t, domain, opts.h, &GradientNorm)?;
    let delta = opts.delta.unwrap_or_else(|| default_delta(domain));
    let shell = thin_shell_detailed(field, t, &GradientNorm, domain, delta, opts.samples, opts.seed)?;
    let mut report = IdentityReport::new(
        "mesh-vs-thin-shell",
        (mesh.value, mesh.error),
        (shell.estimate.value, shell.estimate.std_error),
        0.0,
    )
    .param("t", t)
    .param("h", opts.h)
    .param("delta", delta)
    .param("samples", opts.samples as f64)
    .param("seed", opts.seed as f64)
    .param("facets", mesh.facets as f64);
    if shell.near_critical() || mesh.near_critical > 0 {
        report = report.note("level is near-critical");
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PolynomialField, TorusMode, TrigEigenfunction};

    #[test]
    fn circle_agrees() {
        let f = PolynomialField::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], 1)]).unwrap();
        let d = Domain::centered_ball(2, 1.0).unwrap();
        let r = quadrature_cross_check(&f, 0.25, &d, &CheckOptions::default()).unwrap();
        // ψ = 2π·0.5·1 for the circle of radius 1/2 with |∇f| = 1.
        assert!((r.left - std::f64::consts::PI).abs() < 1e-3);
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn torus_agrees() {
        let f = TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 1], 1.0)]).unwrap();
        let r = quadrature_cross_check(&f, 0.3, &Domain::torus(2), &CheckOptions::default()).unwrap();
        assert!(r.pass, "{r:?}");
    }
}
