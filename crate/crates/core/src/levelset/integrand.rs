use crate::error::Result;
use crate::fields::{norm, ScalarField};

/// A function sampled on a level set, given the point and `∇f` there.
pub trait Integrand: Sync {
    fn eval(&self, x: &[f64], grad: &[f64]) -> Result<f64>;
}

impl<F> Integrand for F
where
    F: Fn(&[f64], &[f64]) -> Result<f64> + Sync,
{
    fn eval(&self, x: &[f64], grad: &[f64]) -> Result<f64> {
        self(x, grad)
    }
}

/// `|∇f|`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GradientNorm;

impl Integrand for GradientNorm {
    fn eval(&self, _x: &[f64], grad: &[f64]) -> Result<f64> {
        Ok(norm(grad))
    }
}

/// The constant 1, giving plain (n−1)-dimensional measure.
#[derive(Clone, Copy, Debug, Default)]
pub struct Unit;

impl Integrand for Unit {
    fn eval(&self, _x: &[f64], _grad: &[f64]) -> Result<f64> {
        Ok(1.0)
    }
}

/// The value of another field, typically a weight `ρ`.
pub struct FieldValue<'a, F: ?Sized>(pub &'a F);

impl<F: ScalarField + ?Sized> Integrand for FieldValue<'_, F> {
    fn eval(&self, x: &[f64], _grad: &[f64]) -> Result<f64> {
        Ok(self.0.value(x))
    }
}

/// `ρ·|∇f|` for a weight field `ρ`.
pub struct WeightedGradientNorm<'a, F: ?Sized>(pub &'a F);

impl<F: ScalarField + ?Sized> Integrand for WeightedGradientNorm<'_, F> {
    fn eval(&self, x: &[f64], grad: &[f64]) -> Result<f64> {
        Ok(self.0.value(x) * norm(grad))
    }
}
