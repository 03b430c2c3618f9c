//! Scalar fields with closed-form derivatives.
//!
//! Every field evaluates its value, gradient, Hessian and Laplacian
//! analytically. The hot-path methods on [`ScalarField`] skip validation;
//! [`ScalarField::eval`] checks dimension and domain membership.

mod polynomial;
mod spec;
mod trig;
mod weight;

pub use polynomial::PolynomialField;
pub use spec::{BoxModeSpec, FieldSpec, TermSpec, TorusModeSpec};
pub use trig::{BoxFlavor, BoxMode, TorusMode, TrigEigenfunction, TrigKind};
pub use weight::{weighted_laplacian, ConstantField, GaussianWeight, WeightedField};

use serde::Serialize;

use crate::error::{Error, Result};

/// A full second-order sample of a field at one point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FieldSample {
    pub point: Vec<f64>,
    pub value: f64,
    pub gradient: Vec<f64>,
    /// Row-major `n x n`, symmetric.
    pub hessian: Vec<f64>,
    pub laplacian: f64,
}

impl FieldSample {
    pub fn dim(&self) -> usize {
        self.point.len()
    }

    pub fn hess(&self, i: usize, j: usize) -> f64 {
        self.hessian[i * self.dim() + j]
    }

    pub fn gradient_norm(&self) -> f64 {
        norm(&self.gradient)
    }

    /// `∇²f(v, v)` for a vector `v`.
    pub fn hessian_form(&self, v: &[f64]) -> f64 {
        let n = self.dim();
        let mut acc = 0.0;
        for i in 0..n {
            for j in 0..n {
                acc += v[i] * self.hessian[i * n + j] * v[j];
            }
        }
        acc
    }
}

/// Differentiable scalar field on a subset of `R^n`.
///
/// Implementations are immutable after construction and safe to share
/// across worker threads.
pub trait ScalarField: Send + Sync {
    fn dim(&self) -> usize;

    /// Membership in the declared domain of the field.
    fn in_domain(&self, _x: &[f64]) -> bool {
        true
    }

    fn value(&self, x: &[f64]) -> f64;

    /// Writes the gradient into `grad` and returns the value.
    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64;

    /// Writes gradient and row-major Hessian, returns `(value, laplacian)`.
    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64);

    /// Validated full evaluation.
    fn eval(&self, x: &[f64]) -> Result<FieldSample> {
        let n = self.dim();
        if x.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: x.len(),
            });
        }
        if !self.in_domain(x) {
            return Err(Error::OutsideDomain { point: x.to_vec() });
        }
        let mut gradient = vec![0.0; n];
        let mut hessian = vec![0.0; n * n];
        let (value, laplacian) = self.second_order(x, &mut gradient, &mut hessian);
        Ok(FieldSample {
            point: x.to_vec(),
            value,
            gradient,
            hessian,
            laplacian,
        })
    }

    fn gradient_norm(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; self.dim()];
        self.value_gradient(x, &mut g);
        norm(&g)
    }
}

pub(crate) fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

/// Closed set of concrete field kinds, the unit of JSON (de)serialization.
#[derive(Clone, Debug)]
pub enum Field {
    Polynomial(PolynomialField),
    Trig(TrigEigenfunction),
    Gaussian(GaussianWeight),
    Constant(ConstantField),
    Weighted(WeightedField),
}

macro_rules! dispatch {
    ($self:ident, $f:ident => $body:expr) => {
        match $self {
            Field::Polynomial($f) => $body,
            Field::Trig($f) => $body,
            Field::Gaussian($f) => $body,
            Field::Constant($f) => $body,
            Field::Weighted($f) => $body,
        }
    };
}

impl ScalarField for Field {
    fn dim(&self) -> usize {
        dispatch!(self, f => f.dim())
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        dispatch!(self, f => f.in_domain(x))
    }
    fn value(&self, x: &[f64]) -> f64 {
        dispatch!(self, f => f.value(x))
    }
    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        dispatch!(self, f => f.value_gradient(x, grad))
    }
    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        dispatch!(self, f => f.second_order(x, grad, hess))
    }
}

impl Field {
    pub fn as_polynomial(&self) -> Option<&PolynomialField> {
        match self {
            Field::Polynomial(p) => Some(p),
            Field::Weighted(w) => w.base().as_polynomial(),
            _ => None,
        }
    }

    pub fn as_weighted(&self) -> Option<&WeightedField> {
        match self {
            Field::Weighted(w) => Some(w),
            _ => None,
        }
    }

    /// Eigenvalue `λ` with `Δf = -λ f`, when the field is a trig eigenfunction.
    pub fn eigenvalue(&self) -> Option<f64> {
        match self {
            Field::Trig(t) => Some(t.eigenvalue()),
            Field::Weighted(w) => w.base().eigenvalue(),
            _ => None,
        }
    }

    pub fn to_spec(&self) -> FieldSpec {
        FieldSpec::from_field(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let spec: FieldSpec = serde_json::from_str(text).map_err(|e| Error::Spec(e.to_string()))?;
        spec.build()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_spec()).expect("field spec serializes")
    }
}

impl From<PolynomialField> for Field {
    fn from(p: PolynomialField) -> Self {
        Field::Polynomial(p)
    }
}

impl From<TrigEigenfunction> for Field {
    fn from(t: TrigEigenfunction) -> Self {
        Field::Trig(t)
    }
}

impl From<WeightedField> for Field {
    fn from(w: WeightedField) -> Self {
        Field::Weighted(w)
    }
}

impl From<GaussianWeight> for Field {
    fn from(g: GaussianWeight) -> Self {
        Field::Gaussian(g)
    }
}

impl From<ConstantField> for Field {
    fn from(c: ConstantField) -> Self {
        Field::Constant(c)
    }
}

/// Evaluates any field, the free-function form used by reports.
pub fn eval<F: ScalarField + ?Sized>(field: &F, point: &[f64]) -> Result<FieldSample> {
    field.eval(point)
}
