//! Solid spherical harmonics: `k`-homogeneous polynomials with `ΔP = 0`.
//!
//! Harmonic components come from the Fischer decomposition `q = h + |x|^2 g`,
//! solved exactly over the rationals. The decomposition is orthogonal for
//! the apolar inner product ([`SparsePolynomial::apolar_inner`]), in which
//! multiplication by `|x|^2` is adjoint to `Δ`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{norm, PolynomialField, ScalarField};
use crate::linalg;
use crate::poly::{monomials_of_degree, rational_from_f64, Exponents, SparsePolynomial};

/// Harmonic component `h` of a homogeneous polynomial `q`.
///
/// `q - h` is divisible by `|x|^2` and `Δh = 0` holds coefficient by
/// coefficient.
pub fn harmonic_project(q: &SparsePolynomial) -> Result<SparsePolynomial> {
    if q.is_zero() {
        return Ok(q.clone());
    }
    let k = q.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
    if k < 2 {
        return Ok(q.clone());
    }
    let n = q.dim();
    let r2 = SparsePolynomial::radius_squared(n);
    let lower = monomials_of_degree(n, k - 2);
    // Δ(|x|^2 ·) is invertible on (k-2)-homogeneous polynomials.
    let images: Vec<SparsePolynomial> = lower
        .iter()
        .map(|b| (&r2 * &SparsePolynomial::monomial(b.clone(), BigRational::from_integer(1.into()))).laplacian())
        .collect();
    let matrix: Vec<Vec<BigRational>> = lower
        .iter()
        .map(|row| images.iter().map(|img| img.coefficient(row)).collect())
        .collect();
    let lap_q = q.laplacian();
    let rhs: Vec<BigRational> = lower.iter().map(|row| lap_q.coefficient(row)).collect();
    let coeffs =
        linalg::solve(&matrix, &rhs).ok_or_else(|| Error::InvalidParameter("singular Fischer system".into()))?;
    let g = SparsePolynomial::from_terms(n, lower.into_iter().zip(coeffs))?;
    let h = q - &(&r2 * &g);
    debug_assert!(h.laplacian().is_zero());
    Ok(h)
}

/// `dim H_k(R^n) = C(n+k-1, k) - C(n+k-3, k-2)`.
pub fn harmonic_dimension(n: usize, k: u32) -> usize {
    fn binom(a: i64, b: i64) -> i64 {
        if b < 0 || a < b {
            return 0;
        }
        let mut r: i64 = 1;
        for i in 0..b {
            r = r * (a - i) / (i + 1);
        }
        r
    }
    let (n, k) = (n as i64, k as i64);
    (binom(n + k - 1, k) - binom(n + k - 3, k - 2)) as usize
}

/// Basis of the `k`-homogeneous harmonic polynomials in `n` variables.
#[derive(Clone, Debug)]
pub struct HarmonicBasis {
    pub dim: usize,
    pub degree: u32,
    pub basis: Vec<SparsePolynomial>,
}

impl HarmonicBasis {
    pub fn len(&self) -> usize {
        self.basis.len()
    }

    pub fn is_empty(&self) -> bool {
        self.basis.is_empty()
    }
}

fn coefficient_vector(p: &SparsePolynomial, monomials: &[Exponents]) -> Vec<BigRational> {
    monomials.iter().map(|e| p.coefficient(e)).collect()
}

/// Projects every degree-`k` monomial and keeps a maximal independent
/// subset, decided by exact rank.
pub fn make_basis(n: usize, k: u32) -> Result<HarmonicBasis> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("dimension {n} < 2")));
    }
    let monomials = monomials_of_degree(n, k);
    let mut basis: Vec<SparsePolynomial> = Vec::new();
    let mut rows: Vec<Vec<BigRational>> = Vec::new();
    for e in &monomials {
        let h = harmonic_project(&SparsePolynomial::monomial(
            e.clone(),
            BigRational::from_integer(BigInt::from(1)),
        ))?;
        if h.is_zero() {
            continue;
        }
        rows.push(coefficient_vector(&h, &monomials));
        if linalg::rank(&rows) == rows.len() {
            basis.push(h);
        } else {
            rows.pop();
        }
    }
    Ok(HarmonicBasis {
        dim: n,
        degree: k,
        basis,
    })
}

/// A `k`-homogeneous polynomial with coefficient-exact `ΔP = 0`.
#[derive(Clone, Debug)]
pub struct SolidHarmonic {
    field: PolynomialField,
    degree: u32,
}

impl SolidHarmonic {
    pub fn new(poly: SparsePolynomial) -> Result<Self> {
        let degree = poly.homogeneous_degree().ok_or(Error::NotHomogeneous)?;
        if degree == 0 {
            return Err(Error::InvalidParameter("degree must be at least 1".into()));
        }
        if !poly.laplacian().is_zero() {
            return Err(Error::InvalidParameter("polynomial is not harmonic".into()));
        }
        Ok(Self {
            field: PolynomialField::new(poly),
            degree,
        })
    }

    pub fn from_int_terms(dim: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Self::new(SparsePolynomial::from_int_terms(dim, terms)?)
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn dim(&self) -> usize {
        self.field.dim()
    }

    pub fn field(&self) -> &PolynomialField {
        &self.field
    }

    pub fn polynomial(&self) -> &SparsePolynomial {
        self.field.polynomial()
    }

    /// Exponent `n + k - 2` of the monotonicity formula.
    pub fn monotonicity_exponent(&self) -> f64 {
        (self.dim() + self.degree as usize) as f64 - 2.0
    }
}

impl TryFrom<&PolynomialField> for SolidHarmonic {
    type Error = Error;
    fn try_from(p: &PolynomialField) -> Result<Self> {
        Self::new(p.polynomial().clone())
    }
}

/// Random solid harmonic of degree `k`, deterministic per seed.
///
/// Standard normal weights on [`make_basis`], rescaled so the coefficient
/// vector has unit Euclidean norm. Every step is exact, so `ΔP = 0`.
pub fn random_solid_harmonic(n: usize, k: u32, seed: u64) -> Result<SolidHarmonic> {
    if k == 0 {
        return Err(Error::InvalidParameter("degree must be at least 1".into()));
    }
    let basis = make_basis(n, k)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = SparsePolynomial::zero(n);
    for b in &basis.basis {
        let w: f64 = StandardNormal.sample(&mut rng);
        p = &p + &b.scale(&rational_from_f64(w)?);
    }
    if p.is_zero() {
        return Err(Error::InvalidParameter("degenerate random combination".into()));
    }
    let scale = rational_from_f64(1.0 / p.coefficient_norm())?;
    SolidHarmonic::new(p.scale(&scale))
}

/// Restriction data on the unit sphere.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SphereSample {
    /// `p(u) = P(u)`.
    pub value: f64,
    /// `|∇_S p|(u)`.
    pub spherical_gradient: f64,
}

/// Splits `|∇P(u)|^2 = |∇_S p|^2 + k^2 p^2` at a unit vector `u`.
pub fn sphere_decompose(p: &SolidHarmonic, u: &[f64]) -> Result<SphereSample> {
    if u.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: u.len(),
        });
    }
    if (norm(u) - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!(
            "|u| = {} is not a unit vector",
            norm(u)
        )));
    }
    let mut grad = vec![0.0; u.len()];
    let value = p.field.value_gradient(u, &mut grad);
    let k = p.degree as f64;
    let g2: f64 = grad.iter().map(|g| g * g).sum();
    let s2 = g2 - k * k * value * value;
    let s2 = if s2 < 0.0 && s2 > -1e-12 * g2.max(1.0) {
        0.0
    } else {
        s2.max(0.0)
    };
    Ok(SphereSample {
        value,
        spherical_gradient: s2.sqrt(),
    })
}

/// Largest `|P|` over `samples` seeded random points of the unit sphere.
pub fn sphere_max_abs(p: &SolidHarmonic, samples: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut u = vec![0.0; p.dim()];
    let mut best: f64 = 0.0;
    for _ in 0..samples {
        for c in u.iter_mut() {
            *c = StandardNormal.sample(&mut rng);
        }
        let r = norm(&u);
        if r == 0.0 {
            continue;
        }
        u.iter_mut().for_each(|c| *c /= r);
        best = best.max(p.field.value(&u).abs());
    }
    best
}

/// True when every coefficient of `Δp` vanishes.
pub fn is_harmonic(p: &SparsePolynomial) -> bool {
    p.laplacian().terms().all(|(_, c)| c.is_zero())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    /// Closed-form harmonic part: `Σ_j c_j |x|^{2j} Δ^j q` with
    /// `c_j = (-1)^j / Π_{i=1..j} [2i (n + 2m - 2 - 2i)]`.
    fn closed_form_projection(p: &SparsePolynomial, m: u32) -> SparsePolynomial {
        let n = p.dim() as i64;
        let r2 = SparsePolynomial::radius_squared(p.dim());
        let mut out = SparsePolynomial::zero(p.dim());
        let mut lap_j = p.clone();
        let mut r2j = SparsePolynomial::one(p.dim());
        let mut c = q(1, 1);
        for j in 0..=(m / 2) as i64 {
            if j > 0 {
                lap_j = lap_j.laplacian();
                r2j = &r2j * &r2;
                c = -c / q(2 * j * (n + 2 * m as i64 - 2 - 2 * j), 1);
            }
            out = &out + &(&r2j * &lap_j).scale(&c);
        }
        out
    }

    #[test]
    fn sphere_max_of_linear_is_one() {
        let p = SolidHarmonic::from_int_terms(3, &[(&[0, 0, 1], 1)]).unwrap();
        let m = sphere_max_abs(&p, 100_000, 1);
        assert!(m <= 1.0 && m > 0.999);
    }

    #[test]
    fn projection_examples() {
        let x2 = SparsePolynomial::from_int_terms(2, &[(&[2, 0], 1)]).unwrap();
        let h = harmonic_project(&x2).unwrap();
        let expect = SparsePolynomial::from_terms(2, vec![(vec![2, 0], q(1, 2)), (vec![0, 2], q(-1, 2))]).unwrap();
        assert_eq!(h, expect);

        let xy = SparsePolynomial::from_int_terms(2, &[(&[1, 1], 1)]).unwrap();
        assert_eq!(harmonic_project(&xy).unwrap(), xy);

        let r2 = SparsePolynomial::radius_squared(2);
        assert!(harmonic_project(&r2).unwrap().is_zero());

        let mixed = SparsePolynomial::from_int_terms(2, &[(&[2, 0], 1), (&[1, 0], 1)]).unwrap();
        assert_eq!(harmonic_project(&mixed).unwrap_err(), Error::NotHomogeneous);
    }

    #[test]
    fn projection_matches_closed_form() {
        for n in 2..=4usize {
            for m in 0..=5u32 {
                for e in monomials_of_degree(n, m) {
                    let p = SparsePolynomial::monomial(e, q(1, 1));
                    assert_eq!(harmonic_project(&p).unwrap(), closed_form_projection(&p, m));
                }
            }
        }
    }

    #[test]
    fn projection_is_apolar_orthogonal() {
        let p = SparsePolynomial::from_int_terms(3, &[(&[4, 0, 0], 2), (&[1, 2, 1], -3), (&[0, 0, 4], 1)]).unwrap();
        let h = harmonic_project(&p).unwrap();
        let rest = &p - &h;
        assert!(rest.apolar_inner(&h).is_zero());
    }

    /// Kernel dimension of `Δ: P_k -> P_{k-2}` by rank-nullity.
    fn kernel_dimension(n: usize, k: u32) -> usize {
        let domain = monomials_of_degree(n, k);
        if k < 2 {
            return domain.len();
        }
        let target = monomials_of_degree(n, k - 2);
        let cols: Vec<SparsePolynomial> = domain
            .iter()
            .map(|e| SparsePolynomial::monomial(e.clone(), q(1, 1)).laplacian())
            .collect();
        let rows: Vec<Vec<BigRational>> = target
            .iter()
            .map(|t| cols.iter().map(|c| c.coefficient(t)).collect())
            .collect();
        domain.len() - linalg::rank(&rows)
    }

    #[test]
    fn basis_sizes() {
        assert_eq!(kernel_dimension(2, 3), 2);
        assert_eq!(kernel_dimension(3, 2), 5);
        assert_eq!(make_basis(2, 3).unwrap().len(), 2);
        assert_eq!(make_basis(3, 2).unwrap().len(), 5);
        let b0 = make_basis(2, 0).unwrap();
        assert_eq!(b0.len(), 1);
        assert_eq!(b0.basis[0], SparsePolynomial::one(2));
        for n in 2..=4 {
            for k in 0..=5 {
                let b = make_basis(n, k).unwrap();
                assert_eq!(b.len(), kernel_dimension(n, k), "n={n} k={k}");
                assert_eq!(b.len(), harmonic_dimension(n, k));
                assert!(b
                    .basis
                    .iter()
                    .all(|p| p.laplacian().is_zero() && p.is_homogeneous_of(k)));
            }
        }
        assert_eq!(harmonic_dimension(3, 4), 9);
        assert!(make_basis(1, 2).is_err());
    }

    #[test]
    fn random_harmonics() {
        let p = random_solid_harmonic(3, 1, 11).unwrap();
        assert_eq!(p.degree(), 1);
        let a = random_solid_harmonic(2, 5, 7).unwrap();
        let b = random_solid_harmonic(2, 5, 7).unwrap();
        assert_eq!(a.polynomial(), b.polynomial());
        assert!(a.polynomial().laplacian().is_zero());
        assert!((a.polynomial().coefficient_norm() - 1.0).abs() < 1e-12);
        assert!(random_solid_harmonic(3, 0, 1).is_err());
        assert_ne!(random_solid_harmonic(2, 5, 8).unwrap().polynomial(), a.polynomial());
    }

    #[test]
    fn sphere_decomposition_examples() {
        let x3 = SolidHarmonic::from_int_terms(3, &[(&[0, 0, 1], 1)]).unwrap();
        let s = sphere_decompose(&x3, &[0.0, 0.0, 1.0]).unwrap();
        assert_eq!((s.value, s.spherical_gradient), (1.0, 0.0));
        let s = sphere_decompose(&x3, &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!((s.value, s.spherical_gradient), (0.0, 1.0));
        let saddle = SolidHarmonic::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]).unwrap();
        let s = sphere_decompose(&saddle, &[1.0, 0.0]).unwrap();
        assert_eq!((s.value, s.spherical_gradient), (1.0, 0.0));
        assert!(sphere_decompose(&saddle, &[1.0, 1.0]).is_err());
    }

    #[test]
    fn solid_harmonic_validation() {
        assert!(SolidHarmonic::from_int_terms(2, &[(&[2, 0], 1)]).is_err());
        assert!(SolidHarmonic::from_int_terms(2, &[(&[0, 0], 1)]).is_err());
        assert!(SolidHarmonic::from_int_terms(2, &[(&[1, 0], 1), (&[2, 0], 1)]).is_err());
    }
}
