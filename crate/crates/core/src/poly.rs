//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! Arithmetic and differentiation stay in `BigRational`; conversion to
//! `f64` happens once, when a polynomial is compiled for evaluation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Exponent multi-index of a monomial, one entry per variable.
pub type Exponents = Vec<u32>;

/// Exact multivariate polynomial in `dim` variables.
///
/// Terms are kept in a `BTreeMap` so iteration order (and therefore every
/// export) is deterministic. Zero coefficients are never stored.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparsePolynomial {
    dim: usize,
    terms: BTreeMap<Exponents, BigRational>,
}

impl SparsePolynomial {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(dim: usize, c: BigRational) -> Self {
        let mut p = Self::zero(dim);
        p.add_term(vec![0; dim], c);
        p
    }

    pub fn one(dim: usize) -> Self {
        Self::constant(dim, BigRational::one())
    }

    /// The coordinate function `x_i`.
    pub fn variable(dim: usize, i: usize) -> Self {
        let mut e = vec![0; dim];
        e[i] = 1;
        Self::monomial(e, BigRational::one())
    }

    pub fn monomial(exponents: Exponents, coeff: BigRational) -> Self {
        let mut p = Self::zero(exponents.len());
        p.add_term(exponents, coeff);
        p
    }

    /// Collects terms, summing repeated exponents and dropping zeros.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Exponents, BigRational)>,
    {
        let mut p = Self::zero(dim);
        for (e, c) in terms {
            if e.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: e.len(),
                });
            }
            p.add_term(e, c);
        }
        Ok(p)
    }

    /// Convenience constructor from integer coefficients.
    pub fn from_int_terms(dim: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Self::from_terms(
            dim,
            terms
                .iter()
                .map(|(e, c)| (e.to_vec(), BigRational::from_integer(BigInt::from(*c)))),
        )
    }

    /// `|x|^2 = x_1^2 + ... + x_n^2`.
    pub fn radius_squared(dim: usize) -> Self {
        let mut p = Self::zero(dim);
        for i in 0..dim {
            let mut e = vec![0; dim];
            e[i] = 2;
            p.add_term(e, BigRational::one());
        }
        p
    }

    fn add_term(&mut self, e: Exponents, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            Entry::Vacant(v) => {
                v.insert(c);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &BigRational)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, e: &[u32]) -> BigRational {
        self.terms.get(e).cloned().unwrap_or_else(BigRational::zero)
    }

    /// Largest total degree of a stored term; `None` for the zero polynomial.
    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// Common total degree when every term has the same degree.
    ///
    /// The zero polynomial is homogeneous of every degree and reports `None`;
    /// callers that need a degree must supply it.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, k: u32) -> bool {
        self.terms.keys().all(|e| e.iter().sum::<u32>() == k)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Self {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Exact partial derivative `d/dx_i`.
    pub fn derivative(&self, i: usize) -> Self {
        let mut out = Self::zero(self.dim);
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut de = e.clone();
            de[i] -= 1;
            out.add_term(de, c * BigRational::from_integer(BigInt::from(e[i])));
        }
        out
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.dim).map(|i| self.derivative(i)).collect()
    }

    pub fn laplacian(&self) -> Self {
        let mut out = Self::zero(self.dim);
        for i in 0..self.dim {
            out = &out + &self.derivative(i).derivative(i);
        }
        out
    }

    /// Exact evaluation at rational coordinates.
    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut t = c.clone();
            for (xi, &p) in x.iter().zip(e) {
                for _ in 0..p {
                    t *= xi;
                }
            }
            acc += t;
        }
        acc
    }

    /// Apolar (Fischer) inner product: `<x^a, x^b> = a!` when `a = b`, else 0.
    ///
    /// Multiplication by `|x|^2` is adjoint to the Laplacian in this product.
    pub fn apolar_inner(&self, other: &Self) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            if let Some(d) = other.terms.get(e) {
                let fact: BigInt = e
                    .iter()
                    .map(|&p| (1..=p as u64).fold(BigInt::one(), |a, b| a * b))
                    .product();
                acc += c * d * BigRational::from_integer(fact);
            }
        }
        acc
    }

    /// Euclidean norm of the coefficient vector, in `f64`.
    pub fn coefficient_norm(&self) -> f64 {
        self.terms
            .values()
            .map(|c| c.to_f64().unwrap_or(f64::NAN).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    pub fn compile(&self) -> CompiledPolynomial {
        CompiledPolynomial::new(self)
    }
}

/// All exponent vectors of total degree `k` in `dim` variables, in
/// descending lexicographic order (`x_1^k` first).
pub fn monomials_of_degree(dim: usize, k: u32) -> Vec<Exponents> {
    fn rec(dim: usize, left: u32, prefix: &mut Vec<u32>, out: &mut Vec<Exponents>) {
        if prefix.len() + 1 == dim {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for p in (0..=left).rev() {
            prefix.push(p);
            rec(dim, left - p, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if dim == 0 {
        return out;
    }
    rec(dim, k, &mut Vec::with_capacity(dim), &mut out);
    out
}

impl Add for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn add(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

impl Sub for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn sub(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        self + &(-rhs)
    }
}

impl Neg for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn neg(self) -> SparsePolynomial {
        SparsePolynomial {
            dim: self.dim,
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }
}

impl Mul for &SparsePolynomial {
    type Output = SparsePolynomial;
    fn mul(self, rhs: &SparsePolynomial) -> SparsePolynomial {
        assert_eq!(self.dim, rhs.dim, "polynomial dimension mismatch");
        let mut out = SparsePolynomial::zero(self.dim);
        for (ea, ca) in &self.terms {
            for (eb, cb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                out.add_term(e, ca * cb);
            }
        }
        out
    }
}

impl fmt::Display for SparsePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if idx == 0 {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            let mag = c.abs();
            let is_const = e.iter().all(|&p| p == 0);
            if !mag.is_one() || is_const {
                write!(f, "{}", format_rational(&mag))?;
            }
            for (i, &p) in e.iter().enumerate() {
                match p {
                    0 => {}
                    1 => write!(f, "x{}", i + 1)?,
                    _ => write!(f, "x{}^{}", i + 1, p)?,
                }
            }
        }
        Ok(())
    }
}

/// Parses `"3"`, `"-2.5"`, `"1.25e-3"` or `"7/12"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let err = || Error::Parse(s.to_string());
    let s = s.trim();
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num.trim().parse().map_err(|_| err())?;
        let d: BigInt = den.trim().parse().map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(BigRational::new(n, d));
    }
    let (mantissa, exp) = match s.find(['e', 'E']) {
        Some(pos) => {
            let e: i32 = s[pos + 1..].parse().map_err(|_| err())?;
            (&s[..pos], e)
        }
        None => (s, 0),
    };
    let (neg, mantissa) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(err());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(err());
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = digits.parse().map_err(|_| err())?;
    let scale = exp - frac_part.len() as i32;
    let ten = BigInt::from(10);
    let mut r = if scale >= 0 {
        BigRational::from_integer(n * num_traits::pow(ten, scale as usize))
    } else {
        BigRational::new(n, num_traits::pow(ten, (-scale) as usize))
    };
    if neg {
        r = -r;
    }
    Ok(r)
}

/// Integer string when the denominator is one, `p/q` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Exact conversion of a finite `f64` (a dyadic rational).
pub fn rational_from_f64(x: f64) -> Result<BigRational> {
    BigRational::from_float(x).ok_or_else(|| Error::Parse(x.to_string()))
}

/// A polynomial lowered to `f64` coefficients for fast evaluation.
#[derive(Clone, Debug)]
pub struct CompiledPolynomial {
    dim: usize,
    exps: Vec<u32>,
    coeffs: Vec<f64>,
    max_exp: usize,
}

/// Size of the stack power table used by [`CompiledPolynomial::eval`].
const POWER_TABLE: usize = 64;

impl CompiledPolynomial {
    pub fn new(p: &SparsePolynomial) -> Self {
        let mut exps = Vec::with_capacity(p.num_terms() * p.dim);
        let mut coeffs = Vec::with_capacity(p.num_terms());
        for (e, c) in p.terms() {
            exps.extend_from_slice(e);
            coeffs.push(c.to_f64().unwrap_or(f64::NAN));
        }
        let max_exp = exps.iter().copied().max().unwrap_or(0) as usize;
        Self {
            dim: p.dim,
            exps,
            coeffs,
            max_exp,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        let stride = self.max_exp + 1;
        if self.dim * stride > POWER_TABLE {
            return self.eval_powi(x);
        }
        let mut pow = [1.0; POWER_TABLE];
        for (i, &xi) in x.iter().enumerate().take(self.dim) {
            let row = &mut pow[i * stride..(i + 1) * stride];
            for p in 1..stride {
                row[p] = row[p - 1] * xi;
            }
        }
        let mut acc = 0.0;
        for (c, e) in self.coeffs.iter().zip(self.exps.chunks_exact(self.dim)) {
            let mut t = *c;
            for (i, &p) in e.iter().enumerate() {
                t *= pow[i * stride + p as usize];
            }
            acc += t;
        }
        acc
    }

    fn eval_powi(&self, x: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (c, e) in self.coeffs.iter().zip(self.exps.chunks_exact(self.dim)) {
            let mut t = *c;
            for (xi, &p) in x.iter().zip(e) {
                if p != 0 {
                    t *= xi.powi(p as i32);
                }
            }
            acc += t;
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_table_matches_powi() {
        let p = SparsePolynomial::from_terms(
            3,
            vec![
                (vec![5, 0, 0], q(3, 2)),
                (vec![1, 2, 2], q(-7, 1)),
                (vec![0, 0, 0], q(1, 3)),
            ],
        )
        .unwrap();
        let c = p.compile();
        // Degree 40 in 3 variables overflows the stack table.
        let big = SparsePolynomial::from_terms(3, vec![(vec![40, 0, 0], q(1, 1))])
            .unwrap()
            .compile();
        for x in [[0.3, -1.1, 2.0], [1.0, 0.0, -0.5]] {
            assert!((c.eval(&x) - c.eval_powi(&x)).abs() <= 1e-14 * c.eval_powi(&x).abs().max(1.0));
            assert_eq!(big.eval(&x), big.eval_powi(&x));
        }
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn parse_forms() {
        assert_eq!(parse_rational("3").unwrap(), q(3, 1));
        assert_eq!(parse_rational("-2.5").unwrap(), q(-5, 2));
        assert_eq!(parse_rational("1.25e-1").unwrap(), q(1, 8));
        assert_eq!(parse_rational("7/12").unwrap(), q(7, 12));
        assert_eq!(parse_rational("2e2").unwrap(), q(200, 1));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("").is_err());
    }

    #[test]
    fn cancellation_drops_terms() {
        let x = SparsePolynomial::variable(2, 0);
        let z = &x - &x;
        assert!(z.is_zero());
        assert_eq!(z.total_degree(), None);
    }

    #[test]
    fn derivatives_of_saddle() {
        // x^2 - y^2
        let p = SparsePolynomial::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]).unwrap();
        assert!(p.laplacian().is_zero());
        assert_eq!(
            p.derivative(0),
            SparsePolynomial::from_int_terms(2, &[(&[1, 0], 2)]).unwrap()
        );
        let c = p.compile();
        assert_eq!(c.eval(&[1.0, 2.0]), -3.0);
        assert_eq!(p.homogeneous_degree(), Some(2));
    }

    #[test]
    fn monomial_counts() {
        assert_eq!(monomials_of_degree(3, 2).len(), 6);
        assert_eq!(monomials_of_degree(2, 5).len(), 6);
        assert_eq!(monomials_of_degree(3, 0), vec![vec![0, 0, 0]]);
        assert_eq!(monomials_of_degree(2, 2)[0], vec![2, 0]);
    }

    #[test]
    fn apolar_adjointness() {
        // <|x|^2 g, h> = <g, Laplacian h> for g of degree 1, h of degree 3.
        let g = SparsePolynomial::from_int_terms(3, &[(&[1, 0, 0], 2), (&[0, 0, 1], -1)]).unwrap();
        let h = SparsePolynomial::from_int_terms(
            3,
            &[(&[3, 0, 0], 1), (&[1, 2, 0], 5), (&[0, 1, 2], -3), (&[0, 0, 3], 2)],
        )
        .unwrap();
        let lhs = (&SparsePolynomial::radius_squared(3) * &g).apolar_inner(&h);
        let rhs = g.apolar_inner(&h.laplacian());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn display_is_readable() {
        let p = SparsePolynomial::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]).unwrap();
        assert_eq!(p.to_string(), "x1^2 - x2^2");
    }
}
