use eigenlevel::fields::{BoxFlavor, BoxMode, PolynomialField, TorusMode, TrigEigenfunction};
use eigenlevel::harmonics::{harmonic_project, is_harmonic, random_solid_harmonic};
use eigenlevel::levelset::{extract, radial_profile, Domain, GradientNorm, RadialOptions};
use eigenlevel::poly::{monomials_of_degree, rational_from_f64, SparsePolynomial};
use eigenlevel::ScalarField;
use num_rational::BigRational;
use proptest::prelude::*;

fn rational(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// Homogeneous polynomial of degree `k` in `dim` variables with small
/// integer coefficients.
fn homogeneous(dim: usize, k: u32, coeffs: &[i64]) -> SparsePolynomial {
    let terms = monomials_of_degree(dim, k)
        .into_iter()
        .zip(coeffs.iter().cycle())
        .map(|(e, &c)| (e, rational(c)))
        .collect::<Vec<_>>();
    SparsePolynomial::from_terms(dim, terms).unwrap()
}

fn point(dim: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, dim)
}

/// Central-difference check of gradient and Hessian.
fn check_derivatives<F: ScalarField>(f: &F, x: &[f64]) -> Result<(), TestCaseError> {
    let n = f.dim();
    let h = 1e-5;
    let mut grad = vec![0.0; n];
    let mut hess = vec![0.0; n * n];
    let (_, lap) = f.second_order(x, &mut grad, &mut hess);
    let scale = 1.0 + grad.iter().chain(&hess).map(|v| v.abs()).fold(0.0, f64::max);
    let mut trace = 0.0;
    for i in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[i] += h;
        xm[i] -= h;
        let fd = (f.value(&xp) - f.value(&xm)) / (2.0 * h);
        prop_assert!((fd - grad[i]).abs() <= 1e-6 * scale, "d/dx{i}: {fd} vs {}", grad[i]);
        let mut gp = vec![0.0; n];
        let mut gm = vec![0.0; n];
        f.value_gradient(&xp, &mut gp);
        f.value_gradient(&xm, &mut gm);
        for j in 0..n {
            let fd = (gp[j] - gm[j]) / (2.0 * h);
            prop_assert!((fd - hess[j * n + i]).abs() <= 1e-5 * scale, "H[{j}][{i}]");
        }
        trace += hess[i * n + i];
    }
    prop_assert!((trace - lap).abs() <= 1e-9 * scale);
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn polynomial_derivatives_match_differences(
        k in 1u32..5,
        coeffs in prop::collection::vec(-3i64..4, 1..12),
        x in point(3),
    ) {
        let f = PolynomialField::new(homogeneous(3, k, &coeffs));
        check_derivatives(&f, &x)?;
    }

    #[test]
    fn torus_derivatives_and_eigen_relation(a in 0i64..4, b in 1i64..4, amp in -2.0f64..2.0, x in point(2)) {
        let f = TrigEigenfunction::torus(vec![
            TorusMode::sin(vec![a, b], amp),
            TorusMode::cos(vec![b, -a], 0.5),
        ])
        .unwrap();
        check_derivatives(&f, &x)?;
        let mut g = [0.0; 2];
        let mut h = [0.0; 4];
        let (v, lap) = f.second_order(&x, &mut g, &mut h);
        let lambda = f.eigenvalue();
        prop_assert!((lap + lambda * v).abs() <= 1e-9 * lambda * (1.0 + v.abs()));
    }

    #[test]
    fn box_eigen_relation(k1 in 1u32..4, k2 in 1u32..4, x in prop::collection::vec(0.0f64..1.0, 2), neumann: bool) {
        let flavor = if neumann { BoxFlavor::Neumann } else { BoxFlavor::Dirichlet };
        let f = TrigEigenfunction::box_sum(
            vec![
                BoxMode { k: vec![k1, k2], amplitude: 1.0 },
                BoxMode { k: vec![k2, k1], amplitude: -0.75 },
            ],
            flavor,
        )
        .unwrap();
        check_derivatives(&f, &x)?;
        let mut g = [0.0; 2];
        let mut h = [0.0; 4];
        let (v, lap) = f.second_order(&x, &mut g, &mut h);
        prop_assert!((lap + f.eigenvalue() * v).abs() <= 1e-9 * f.eigenvalue());
    }

    #[test]
    fn projection_is_linear_idempotent_and_harmonic(
        k in 0u32..5,
        c1 in prop::collection::vec(-3i64..4, 1..10),
        c2 in prop::collection::vec(-3i64..4, 1..10),
        a in -3i64..4,
    ) {
        let q1 = homogeneous(3, k, &c1);
        let q2 = homogeneous(3, k, &c2);
        let h1 = harmonic_project(&q1).unwrap();
        let h2 = harmonic_project(&q2).unwrap();
        prop_assert!(is_harmonic(&h1));
        prop_assert_eq!(harmonic_project(&h1).unwrap(), h1.clone());
        let combo = &q1.scale(&rational(a)) + &q2;
        let expected = &h1.scale(&rational(a)) + &h2;
        prop_assert_eq!(harmonic_project(&combo).unwrap(), expected);
        // The remainder q − h is orthogonal to every harmonic polynomial.
        let rest = &q1 - &h1;
        prop_assert_eq!(rest.apolar_inner(&h2), rational(0));
    }

    #[test]
    fn solid_harmonics_are_homogeneous(
        n in 2usize..5,
        k in 1u32..5,
        seed in 0u64..1000,
        lambda in 0.1f64..3.0,
        x in point(4),
    ) {
        let p = random_solid_harmonic(n, k, seed).unwrap();
        prop_assert!(is_harmonic(p.polynomial()));
        let x = &x[..n];
        let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
        let f = p.field();
        let expected = lambda.powi(k as i32) * f.value(x);
        prop_assert!((f.value(&y) - expected).abs() <= 1e-10 * (1.0 + expected.abs()));
        // Evaluation is pure: repeated calls are bit-identical.
        prop_assert_eq!(f.value(x).to_bits(), f.value(x).to_bits());
        let s = f.eval(x).unwrap();
        prop_assert_eq!(s.value.to_bits(), f.value(x).to_bits());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn circle_length_converges(r in 0.2f64..0.9, cx in -0.05f64..0.05, cy in -0.05f64..0.05) {
        // |x − c|² = r² has length 2πr.
        let (cx, cy) = (rational_from_f64(cx).unwrap(), rational_from_f64(cy).unwrap());
        let two = rational(2);
        let p = SparsePolynomial::from_terms(
            2,
            vec![
                (vec![2, 0], rational(1)),
                (vec![0, 2], rational(1)),
                (vec![1, 0], -(&two * &cx)),
                (vec![0, 1], -(&two * &cy)),
                (vec![0, 0], &cx * &cx + &cy * &cy),
            ],
        )
        .unwrap();
        let f = PolynomialField::new(p);
        let d = Domain::new_box(vec![-1.0, -1.0], vec![1.0, 1.0]).unwrap();
        let exact = 2.0 * std::f64::consts::PI * r;
        let mut errors = Vec::new();
        for h in [0.04, 0.02, 0.01] {
            let mesh = extract(&f, r * r, &d, h).unwrap();
            errors.push((mesh.total_area() - exact).abs() / exact);
        }
        prop_assert!(errors[2] < 1e-3, "{errors:?}");
        prop_assert!(errors[2] <= errors[0], "{errors:?}");
    }

    #[test]
    fn radial_profiles_are_non_decreasing(n in 2usize..4, k in 1u32..4, seed in 0u64..100, frac in -0.5f64..0.5) {
        let p = random_solid_harmonic(n, k, seed).unwrap();
        let radii: Vec<f64> = (1..=8).map(|j| 0.15 * j as f64).collect();
        let opts = RadialOptions { h: 0.05, ..RadialOptions::default() };
        let prof = radial_profile(p.field(), frac * 0.3, &GradientNorm, &radii, &opts).unwrap();
        for w in prof.values.windows(2) {
            prop_assert!(w[1] >= w[0], "{:?}", prof.values);
        }
    }
}
