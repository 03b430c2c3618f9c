use crate::analysis::curvature::level_geometry;
use crate::analysis::options::{level_integral, CheckOptions};
use crate::analysis::report::{IdentityReport, Table};
use crate::analysis::sphere::sphere_integral;
use crate::error::{Error, Result};
use crate::fields::{norm, BoxFlavor, Field, ScalarField, TrigKind};
use crate::harmonics::SolidHarmonic;
use crate::levelset::{radial_profiles, Domain, FieldValue, GradientNorm, Integrand, WeightedGradientNorm};
use crate::mc::{map_chunks, Moments};

/// Weight `ρ` of a level-set functional `s ↦ ∫_{Z_s} ρ`.
#[derive(Clone, Copy)]
pub enum Rho<'a> {
    /// `ρ = |∇f|`.
    GradientNorm,
    /// A smooth weight field.
    Field(&'a dyn ScalarField),
}

/// Compares the central difference of `A(s) = ∫_{Z_s} ρ` at `t` with
/// `−∫_{Z_t} H_ρ/|∇f|`, where `H_ρ = ρH − ⟨∇ρ, N⟩`. Skipped when any of
/// the three levels is flagged near-critical.
pub fn levelset_derivative_check<F: ScalarField + ?Sized>(
    field: &F,
    rho: Rho<'_>,
    t: f64,
    dt: f64,
    domain: &Domain,
    opts: &CheckOptions,
) -> Result<IdentityReport> {
    if !(dt > 0.0) {
        return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
    }
    let n = field.dim();
    let value_weight: &dyn Integrand = match rho {
        Rho::GradientNorm => &GradientNorm,
        Rho::Field(r) => &FieldValue(r),
    };
    let flux = |x: &[f64], _grad: &[f64]| -> Result<f64> {
        let Some(geo) = level_geometry(field, x) else {
            return Ok(0.0);
        };
        let h_rho = match rho {
            Rho::GradientNorm => geo.weighted_mean_curvature,
            Rho::Field(r) => {
                let mut grad = vec![0.0; n];
                let mut grad_r = vec![0.0; n];
                field.value_gradient(x, &mut grad);
                let value = r.value_gradient(x, &mut grad_r);
                let g = norm(&grad);
                let rho_n: f64 = grad_r.iter().zip(&grad).map(|(a, b)| a * b / g).sum();
                value * geo.mean_curvature - rho_n
            }
        };
        Ok(-h_rho / geo.gradient_norm)
    };
    let lo = level_integral(field, t - dt, domain, value_weight, opts)?;
    let hi = level_integral(field, t + dt, domain, value_weight, opts)?;
    let mid = level_integral(field, t, domain, &flux, opts)?;
    let lhs = (hi.value - lo.value) / (2.0 * dt);
    let lhs_err = (hi.error + lo.error) / (2.0 * dt);
    let report = IdentityReport::new(
        "levelset-derivative",
        (lhs, lhs_err),
        (mid.value, mid.error),
        opts.rel_tol * mid.value.abs(),
    )
    .param("t", t)
    .param("dt", dt)
    .param("h", opts.h)
    .param("rel_tol", opts.rel_tol);
    if lo.near_critical || hi.near_critical || mid.near_critical {
        return Ok(report.skip("near-critical level"));
    }
    Ok(report)
}

fn is_dirichlet(field: &Field) -> bool {
    let base = match field {
        Field::Weighted(w) => w.base(),
        f => f,
    };
    matches!(base, Field::Trig(t) if t.kind() == TrigKind::Box(BoxFlavor::Dirichlet))
}

/// Compares `∫_{Z_{t₂}} |∇f|ρ − ∫_{Z_{t₁}} |∇f|ρ` (mesh or thin shell) with
/// the Monte Carlo volume integral `∫_{t₁<f<t₂} Lf ρ`, where `ρ = 1` and
/// `L = Δ` for unweighted fields. The slab must not meet a boundary
/// carrying flux; for Dirichlet boxes `t₁` and `t₂` must share a sign.
pub fn divergence_identity_check(
    field: &Field,
    t1: f64,
    t2: f64,
    domain: &Domain,
    opts: &CheckOptions,
) -> Result<IdentityReport> {
    if !(t1 < t2) {
        return Err(Error::InvalidParameter(format!("need t1 < t2, got {t1} and {t2}")));
    }
    if is_dirichlet(field) && !(t1 * t2 > 0.0) {
        return Err(Error::InvalidParameter(
            "Dirichlet slabs need levels of the same sign".into(),
        ));
    }
    domain.validate()?;
    let n = domain.dim();
    let weight = field.as_weighted().map(|w| w.weight());
    let level_weight: &dyn Integrand = match weight {
        Some(w) => &WeightedGradientNorm(w),
        None => &GradientNorm,
    };
    let a1 = level_integral(field, t1, domain, level_weight, opts)?;
    let a2 = level_integral(field, t2, domain, level_weight, opts)?;
    let parts = map_chunks(opts.samples, opts.seed, |rng, len| -> Result<(Moments, usize)> {
        let mut m = Moments::default();
        let mut inside = 0;
        let mut x = vec![0.0; n];
        let mut grad = vec![0.0; n];
        let mut hess = vec![0.0; n * n];
        let mut grad_w = vec![0.0; n];
        for _ in 0..len {
            domain.sample(rng, &mut x);
            let v = field.value(&x);
            if !(v > t1 && v < t2) {
                m.push(0.0);
                continue;
            }
            inside += 1;
            let (_, lap) = field.second_order(&x, &mut grad, &mut hess);
            let y = match weight {
                None => lap,
                Some(w) => {
                    let rho = w.value_gradient(&x, &mut grad_w);
                    if !(rho > 0.0) {
                        return Err(Error::NonPositiveWeight {
                            value: rho,
                            point: x.clone(),
                        });
                    }
                    let cross: f64 = grad.iter().zip(&grad_w).map(|(a, b)| a * b).sum();
                    lap * rho + cross
                }
            };
            m.push(y);
        }
        Ok((m, inside))
    });
    let mut total = Moments::default();
    let mut inside = 0;
    for p in parts {
        let (m, c) = p?;
        total.merge(&m);
        inside += c;
    }
    if inside == 0 {
        return Err(Error::EmptySlab);
    }
    let vol = domain.volume();
    let rhs = vol * total.mean();
    let rhs_err = vol * total.std_error();
    let name = if weight.is_some() {
        "weighted-divergence-identity"
    } else {
        "divergence-identity"
    };
    let mut report = IdentityReport::new(
        name,
        (a2.value - a1.value, a1.error.hypot(a2.error)),
        (rhs, rhs_err),
        0.0,
    )
    .param("t1", t1)
    .param("t2", t2)
    .param("h", opts.h)
    .param("samples", opts.samples as f64)
    .param("seed", opts.seed as f64)
    .param("slab_samples", inside as f64);
    if a1.near_critical || a2.near_critical {
        report = report.note("a level is near-critical; mesh error model is heuristic there");
    }
    Ok(report)
}

/// Compares `ψ(t₂) − ψ(t₁)` on the unit ball, `ψ(t) = ∫_{Z_t ∩ B(0,1)} |∇P|`,
/// with `−k ∫ P` over the band `{t₁ < P < t₂}` of the unit sphere. Also
/// requires the sign of the difference: negative for positive levels,
/// positive for negative levels.
pub fn robin_identity_check(p: &SolidHarmonic, t1: f64, t2: f64, opts: &CheckOptions) -> Result<IdentityReport> {
    if t1 * t2 < 0.0 {
        return Err(Error::InvalidParameter("levels must share a sign".into()));
    }
    let (lo, hi) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
    let n = p.dim();
    let k = p.degree() as f64;
    let ball = Domain::centered_ball(n, 1.0)?;
    let f = p.field();
    let (lhs, lhs_err) = if lo == hi {
        (0.0, 0.0)
    } else {
        let a = level_integral(f, lo, &ball, &GradientNorm, opts)?;
        let b = level_integral(f, hi, &ball, &GradientNorm, opts)?;
        (b.value - a.value, a.error.hypot(b.error))
    };
    let (band, band_err) = sphere_integral(n, opts.samples, opts.seed, |u| {
        let v = f.value(u);
        if v > lo && v < hi {
            v
        } else {
            0.0
        }
    })?;
    let rhs = -k * band;
    let mut report = IdentityReport::new(
        "robin-identity",
        (lhs, lhs_err),
        (rhs, k * band_err),
        opts.rel_tol * rhs.abs(),
    )
    .param("t1", lo)
    .param("t2", hi)
    .param("h", opts.h)
    .param("samples", opts.samples as f64)
    .param("seed", opts.seed as f64);
    let sign_ok = if lo == hi {
        true
    } else if lo >= 0.0 {
        lhs < 0.0
    } else {
        lhs > 0.0
    };
    report = report.param("sign_ok", if sign_ok { 1.0 } else { 0.0 });
    if !sign_ok {
        report.pass = false;
        report = report.note("difference has the wrong sign");
    }
    Ok(report)
}

/// Checks `(n+k−2)/r · I(r) = d/dr [I(r) − k²t₀² J(r)]` on a radius grid,
/// with `I(r) = ∫_{M_r} |∇P|`, `J(r) = ∫_{M_r} 1/(|x|²|∇P|)` and
/// `M_r = {P = t₀} ∩ B(0, r)`. The derivative is a central difference with
/// step `dr`; the discrepancy is the largest relative error over the grid.
pub fn radial_derivative_identity(
    p: &SolidHarmonic,
    t0: f64,
    radii: &[f64],
    dr: f64,
    opts: &CheckOptions,
) -> Result<IdentityReport> {
    if t0 == 0.0 {
        return Err(Error::InvalidParameter(
            "the level must be nonzero; at t = 0 the ratio is constant".into(),
        ));
    }
    if !(dr > 0.0) || radii.iter().any(|&r| !(r - dr > 0.0)) {
        return Err(Error::InvalidParameter("need dr > 0 and r − dr > 0 on the grid".into()));
    }
    let n = p.dim();
    let k = p.degree() as f64;
    let e = p.monotonicity_exponent();
    let mut grid: Vec<f64> = radii.iter().flat_map(|&r| [r - dr, r, r + dr]).collect();
    grid.sort_by(f64::total_cmp);
    grid.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let at = |r: f64| grid.iter().position(|&g| (g - r).abs() < 1e-12).expect("grid point");

    // Gradient floor for the 1/|∇P| integrand, relative to the mean
    // gradient on the outer sphere.
    let r_max = grid[grid.len() - 1];
    let (scale, _) = sphere_integral(n, 4096, opts.seed, |u| {
        let x: Vec<f64> = u.iter().map(|c| c * r_max).collect();
        p.field().gradient_norm(&x)
    })?;
    let floor = 1e-6 * scale / crate::levelset::unit_sphere_area(n);
    let inverse = move |x: &[f64], grad: &[f64]| -> Result<f64> {
        let r2: f64 = x.iter().map(|c| c * c).sum();
        Ok(1.0 / (r2 * norm(grad).max(floor)))
    };
    let profiles = radial_profiles(p.field(), t0, &[&GradientNorm, &inverse], &grid, &opts.radial())?;
    let (i_prof, j_prof) = (&profiles[0], &profiles[1]);
    let g = |idx: usize| i_prof.values[idx] - k * k * t0 * t0 * j_prof.values[idx];
    let mut table = Table::new(&["r", "I", "J", "dG_dr", "rhs", "rel_error"]);
    let mut worst = (0.0, 0.0, 0.0, -1.0);
    for &r in radii {
        let (jm, j0, jp) = (at(r - dr), at(r), at(r + dr));
        let lhs = (g(jp) - g(jm)) / (2.0 * dr);
        let rhs = e * i_prof.values[j0] / r;
        let rel = if rhs != 0.0 {
            (lhs - rhs).abs() / rhs.abs()
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        table.push(vec![r, i_prof.values[j0], j_prof.values[j0], lhs, rhs, rel]);
        if rel > worst.3 {
            worst = (r, lhs, rhs, rel);
        }
    }
    let mut report = IdentityReport::new(
        "radial-derivative-identity",
        (worst.1, 0.0),
        (worst.2, 0.0),
        opts.rel_tol,
    )
    .with_discrepancy(worst.3, worst.3)
    .param("t0", t0)
    .param("dr", dr)
    .param("h", opts.h)
    .param("worst_r", worst.0)
    .param("near_critical_facets", i_prof.near_critical as f64)
    .note("discrepancy is the largest relative error over the radius grid");
    report.table = table;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{BoxMode, ConstantField, TorusMode, TrigEigenfunction};
    use std::f64::consts::PI;

    fn torus_sin() -> Field {
        TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 1.0)])
            .unwrap()
            .into()
    }

    fn x3() -> SolidHarmonic {
        SolidHarmonic::from_int_terms(3, &[(&[0, 0, 1], 1)]).unwrap()
    }

    #[test]
    fn derivative_of_torus_psi() {
        let opts = CheckOptions {
            h: 0.005,
            ..Default::default()
        };
        let r =
            levelset_derivative_check(&torus_sin(), Rho::GradientNorm, 0.5, 0.01, &Domain::torus(2), &opts).unwrap();
        let exact = -4.0 * PI * 0.5 / 0.75f64.sqrt();
        assert!((r.left - exact).abs() < 0.02 * exact.abs(), "{r:?}");
        assert!((r.right - exact).abs() < 0.02 * exact.abs(), "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn derivative_of_flat_disks_and_zero_weight() {
        let ball = Domain::centered_ball(3, 1.0).unwrap();
        let opts = CheckOptions {
            h: 0.04,
            ..Default::default()
        };
        let one = ConstantField::new(3, 1.0);
        let r = levelset_derivative_check(x3().field(), Rho::Field(&one), 0.0, 0.02, &ball, &opts).unwrap();
        assert!(r.left.abs() < 1e-9 && r.right.abs() < 1e-12 && r.pass, "{r:?}");
        let zero = ConstantField::new(3, 0.0);
        let r = levelset_derivative_check(x3().field(), Rho::Field(&zero), 0.3, 0.02, &ball, &opts).unwrap();
        assert_eq!((r.left, r.right), (0.0, 0.0));
        assert!(r.pass);
    }

    #[test]
    fn divergence_on_torus() {
        let r = divergence_identity_check(&torus_sin(), 0.0, 0.5, &Domain::torus(2), &CheckOptions::default()).unwrap();
        let exact = 4.0 * PI * (0.75f64.sqrt() - 1.0);
        assert!((r.left - exact).abs() < 1e-6, "{r:?}");
        assert!((r.right - exact).abs() < 3.0 * r.right_error, "{r:?}");
        assert!(r.pass);
    }

    #[test]
    fn divergence_on_neumann_box() {
        let f: Field = TrigEigenfunction::box_sum(
            vec![BoxMode {
                k: vec![1, 0],
                amplitude: 1.0,
            }],
            BoxFlavor::Neumann,
        )
        .unwrap()
        .into();
        let r = divergence_identity_check(&f, 0.2, 0.6, &Domain::unit_cube(2), &CheckOptions::default()).unwrap();
        let exact = PI * (0.8 - 0.96f64.sqrt());
        assert!((r.left - exact).abs() < 1e-3, "{r:?}");
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn divergence_of_linear_field_on_box() {
        // f = x₁ is harmonic; its level sets carry equal flux.
        let f: Field = crate::fields::PolynomialField::from_int_terms(2, &[(&[1, 0], 1)])
            .unwrap()
            .into();
        let r = divergence_identity_check(&f, 0.2, 0.7, &Domain::unit_cube(2), &CheckOptions::default()).unwrap();
        assert!(r.left.abs() < 1e-9 && r.right == 0.0 && r.pass, "{r:?}");
    }

    #[test]
    fn divergence_rejects_bad_levels() {
        let d: Field = TrigEigenfunction::box_product(vec![1, 1], BoxFlavor::Dirichlet)
            .unwrap()
            .into();
        let cube = Domain::unit_cube(2);
        assert!(divergence_identity_check(&d, -0.2, 0.3, &cube, &CheckOptions::default()).is_err());
        assert!(divergence_identity_check(&d, 0.3, 0.2, &cube, &CheckOptions::default()).is_err());
        let opts = CheckOptions {
            samples: 10_000,
            ..Default::default()
        };
        assert_eq!(
            divergence_identity_check(&torus_sin(), 1.5, 2.0, &Domain::torus(2), &opts).unwrap_err(),
            Error::EmptySlab
        );
    }

    #[test]
    fn robin_for_plane() {
        let opts = CheckOptions {
            h: 0.02,
            ..Default::default()
        };
        let r = robin_identity_check(&x3(), 0.2, 0.4, &opts).unwrap();
        let exact = -0.12 * PI;
        assert!((r.left - exact).abs() < 0.01 * exact.abs(), "{r:?}");
        assert!((r.right - exact).abs() < 0.01 * exact.abs(), "{r:?}");
        assert!(r.pass);
        let same = robin_identity_check(&x3(), 0.3, 0.3, &opts).unwrap();
        assert_eq!((same.left, same.right), (0.0, 0.0));
        assert!(robin_identity_check(&x3(), -0.2, 0.4, &opts).is_err());
    }

    #[test]
    fn robin_for_saddle_on_circle() {
        let p = SolidHarmonic::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]).unwrap();
        let opts = CheckOptions {
            h: 0.005,
            ..Default::default()
        };
        let r = robin_identity_check(&p, 0.1, 0.5, &opts).unwrap();
        // Circle oracle: P(θ) = cos 2θ, and ∫ cos 2θ dθ over the band
        // 0.1 < cos 2θ < 0.5 is 2(sin(acos 0.1) − sin(acos 0.5)).
        let band = 2.0 * ((0.1f64).acos().sin() - (0.5f64).acos().sin());
        assert!((r.right + 2.0 * band).abs() < 1e-5, "{r:?}");
        assert!(r.pass, "{r:?}");
    }

    #[test]
    fn radial_identity_for_plane() {
        let opts = CheckOptions {
            h: 0.02,
            rel_tol: 0.03,
            ..Default::default()
        };
        let r = radial_derivative_identity(&x3(), 0.5, &[0.8, 1.0, 1.2], 0.02, &opts).unwrap();
        assert!(r.pass, "{r:?}");
        let row = &r.table.rows[1];
        assert!((row[1] - 0.75 * PI).abs() < 0.01 * 0.75 * PI);
        assert!((row[2] - PI * 4f64.ln()).abs() < 0.01 * PI * 4f64.ln());
        assert!(radial_derivative_identity(&x3(), 0.0, &[1.0], 0.01, &opts).is_err());
    }
}
