//! Cross-module invariants over the shipped presets.

use eigenlevel::analysis::{
    curvature_identity_check, quadrature_cross_check, unimodality_check, value_distribution_density, CheckOptions,
    Measure,
};
use eigenlevel::levelset::{thin_shell, weighted_area_estimate, GradientNorm};
use eigenlevel::presets::{all_presets, preset};
use eigenlevel::Domain;

const EIGENFUNCTIONS: [&str; 8] = [
    "torus-sin",
    "torus-mix",
    "p=x3",
    "x2-y2",
    "box-dirichlet",
    "box-dirichlet-21",
    "box-neumann",
    "box-neumann-21",
];

#[test]
fn curvature_residual_is_algebraic_for_every_preset() {
    for p in all_presets() {
        let r = curvature_identity_check(&p.field, &p.domain, 1000, 5).unwrap();
        assert!(r.discrepancy <= 1e-9, "{}: {}", p.name, r.discrepancy);
    }
}

#[test]
fn mu_density_is_unimodal_for_every_eigenfunction() {
    for name in EIGENFUNCTIONS {
        let p = preset(name).unwrap();
        let d = value_distribution_density(&p.field, Measure::Mu, &p.domain, 32, 2_000_000, 11, None).unwrap();
        let u = unimodality_check(&d);
        assert!(u.pass, "{name}: violation {} threshold {}", u.violation, u.threshold);
    }
}

#[test]
fn sigma_density_of_torus_sin_is_not_unimodal() {
    let p = preset("torus-sin").unwrap();
    let d = value_distribution_density(&p.field, Measure::Sigma, &p.domain, 32, 2_000_000, 11, None).unwrap();
    assert!(!unimodality_check(&d).pass);
}

/// The un-normalized μ-histogram is the bin average of `ψ(t) = ∫_{Z_t} |∇f|`;
/// compare it with Simpson's rule over mesh values of `ψ`.
#[test]
fn histogram_matches_level_set_quadrature() {
    let p = preset("torus-mix").unwrap();
    let d = value_distribution_density(&p.field, Measure::Mu, &p.domain, 24, 4_000_000, 3, None).unwrap();
    for b in [3usize, 8, 12, 15, 20] {
        let (lo, hi) = (d.edges[b], d.edges[b + 1]);
        let psi = |t: f64| weighted_area_estimate(&p.field, t, &p.domain, 0.004, &GradientNorm).unwrap();
        let (a, m, c) = (psi(lo), psi(0.5 * (lo + hi)), psi(hi));
        let simpson = (a.value + 4.0 * m.value + c.value) / 6.0;
        let mesh_err = (a.error + 4.0 * m.error + c.error) / 6.0;
        let combined = d.psi_error[b].hypot(mesh_err);
        assert!(
            (d.psi[b] - simpson).abs() <= 3.0 * combined,
            "bin {b}: histogram {} ± {}, quadrature {simpson} ± {mesh_err}",
            d.psi[b],
            d.psi_error[b]
        );
    }
}

#[test]
fn mesh_and_thin_shell_agree() {
    let opts = CheckOptions {
        h: 0.005,
        samples: 2_000_000,
        seed: 8,
        ..CheckOptions::default()
    };
    for (name, t) in [
        ("torus-sin", 0.5),
        ("box-neumann-21", 0.3),
        ("x2-y2", -0.2),
        ("p=x3", 0.1),
    ] {
        let p = preset(name).unwrap();
        let h = if p.domain.dim() == 3 { 0.02 } else { opts.h };
        let r = quadrature_cross_check(&p.field, t, &p.domain, &CheckOptions { h, ..opts.clone() }).unwrap();
        assert!(r.pass, "{name}: {} vs {} tolerance {}", r.left, r.right, r.tolerance);
    }
}

#[test]
fn estimates_do_not_depend_on_worker_count() {
    let p = preset("torus-mix").unwrap();
    let run = || {
        let s = thin_shell(&p.field, 0.2, &GradientNorm, &p.domain, 1e-3, 200_000, 4).unwrap();
        let d = value_distribution_density(&p.field, Measure::Mu, &p.domain, 16, 200_000, 4, None).unwrap();
        let m = weighted_area_estimate(&p.field, 0.2, &p.domain, 0.01, &GradientNorm).unwrap();
        (
            s.value.to_bits(),
            d.density.iter().map(|v| v.to_bits()).collect::<Vec<_>>(),
            m.value.to_bits(),
        )
    };
    let one = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .unwrap()
        .install(run);
    let three = rayon::ThreadPoolBuilder::new()
        .num_threads(3)
        .build()
        .unwrap()
        .install(run);
    assert_eq!(one, three);
}

#[test]
fn ball_domain_bounds_the_level_set() {
    // ψ(0) for x₁² − x₂² on the unit disk: two diagonals of length 2 with
    // |∇P| = 2|x|, so ∫ |∇P| = 4 · ∫_0^1 2r dr = 4.
    let p = preset("x2-y2").unwrap();
    let a = weighted_area_estimate(&p.field, 0.0, &p.domain, 0.005, &GradientNorm).unwrap();
    assert!((a.value - 4.0).abs() < 1e-3, "{}", a.value);
    let wider = Domain::centered_ball(2, 2.0).unwrap();
    let b = weighted_area_estimate(&p.field, 0.0, &wider, 0.005, &GradientNorm).unwrap();
    assert!((b.value - 16.0).abs() < 4e-3, "{}", b.value);
}
