use crate::error::Result;
use crate::fields::ScalarField;
use crate::poly::{CompiledPolynomial, SparsePolynomial};

/// A polynomial together with its compiled first and second derivatives.
///
/// The Laplacian is compiled from the exact symbolic Laplacian, so a
/// harmonic polynomial reports exactly `0.0`.
#[derive(Clone, Debug)]
pub struct PolynomialField {
    poly: SparsePolynomial,
    value: CompiledPolynomial,
    gradient: Vec<CompiledPolynomial>,
    /// Upper triangle, row-major: (0,0), (0,1), ..., (1,1), ...
    hessian: Vec<CompiledPolynomial>,
    laplacian: CompiledPolynomial,
}

impl PolynomialField {
    pub fn new(poly: SparsePolynomial) -> Self {
        let n = poly.dim();
        let grad = poly.gradient();
        let mut hessian = Vec::with_capacity(n * (n + 1) / 2);
        for i in 0..n {
            for j in i..n {
                hessian.push(grad[i].derivative(j).compile());
            }
        }
        Self {
            value: poly.compile(),
            gradient: grad.iter().map(SparsePolynomial::compile).collect(),
            hessian,
            laplacian: poly.laplacian().compile(),
            poly,
        }
    }

    /// Parses terms like `[(&[2, 0], 1), (&[0, 2], -1)]`.
    pub fn from_int_terms(dim: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        Ok(Self::new(SparsePolynomial::from_int_terms(dim, terms)?))
    }

    pub fn polynomial(&self) -> &SparsePolynomial {
        &self.poly
    }

    pub fn is_harmonic(&self) -> bool {
        self.laplacian.is_zero()
    }
}

impl ScalarField for PolynomialField {
    fn dim(&self) -> usize {
        self.poly.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.value.eval(x)
    }

    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        for (g, p) in grad.iter_mut().zip(&self.gradient) {
            *g = p.eval(x);
        }
        self.value.eval(x)
    }

    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        let n = self.dim();
        let v = self.value_gradient(x, grad);
        let mut idx = 0;
        for i in 0..n {
            for j in i..n {
                let h = self.hessian[idx].eval(x);
                hess[i * n + j] = h;
                hess[j * n + i] = h;
                idx += 1;
            }
        }
        (v, self.laplacian.eval(x))
    }
}
