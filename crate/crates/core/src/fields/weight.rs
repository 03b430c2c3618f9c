use crate::error::{Error, Result};
use crate::fields::{Field, ScalarField};

/// `ρ(x) = exp(-|x|^2 / 2)`, the Gaussian weight of the Hermite test bed.
#[derive(Clone, Debug, PartialEq)]
pub struct GaussianWeight {
    dim: usize,
}

impl GaussianWeight {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }
}

impl ScalarField for GaussianWeight {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (-0.5 * x.iter().map(|v| v * v).sum::<f64>()).exp()
    }

    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        let rho = self.value(x);
        for (g, xi) in grad.iter_mut().zip(x) {
            *g = -xi * rho;
        }
        rho
    }

    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        let n = self.dim;
        let rho = self.value_gradient(x, grad);
        let r2: f64 = x.iter().map(|v| v * v).sum();
        for i in 0..n {
            for j in 0..n {
                let delta = if i == j { 1.0 } else { 0.0 };
                hess[i * n + j] = (x[i] * x[j] - delta) * rho;
            }
        }
        (rho, (r2 - n as f64) * rho)
    }
}

/// A constant field; `ρ ≡ 1` recovers the unweighted identities.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantField {
    dim: usize,
    value: f64,
}

impl ConstantField {
    pub fn new(dim: usize, value: f64) -> Self {
        Self { dim, value }
    }

    pub fn constant(&self) -> f64 {
        self.value
    }
}

impl ScalarField for ConstantField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, _x: &[f64]) -> f64 {
        self.value
    }

    fn value_gradient(&self, _x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        self.value
    }

    fn second_order(&self, _x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        grad.iter_mut().for_each(|g| *g = 0.0);
        hess.iter_mut().for_each(|h| *h = 0.0);
        (self.value, 0.0)
    }
}

/// A base field paired with a strictly positive weight `ρ`.
///
/// As a [`ScalarField`] it behaves like its base; the weight enters through
/// [`WeightedField::weight_at`] and [`weighted_laplacian`].
#[derive(Clone, Debug)]
pub struct WeightedField {
    base: Box<Field>,
    weight: Box<Field>,
}

impl WeightedField {
    pub fn new(base: Field, weight: Field) -> Result<Self> {
        if base.dim() != weight.dim() {
            return Err(Error::DimensionMismatch {
                expected: base.dim(),
                got: weight.dim(),
            });
        }
        if matches!(weight, Field::Weighted(_)) {
            return Err(Error::InvalidParameter("nested weighted fields".into()));
        }
        Ok(Self {
            base: Box::new(base),
            weight: Box::new(weight),
        })
    }

    pub fn base(&self) -> &Field {
        &self.base
    }

    pub fn weight(&self) -> &Field {
        &self.weight
    }

    /// `ρ(x)`, rejecting non-positive values.
    pub fn weight_at(&self, x: &[f64]) -> Result<f64> {
        let rho = self.weight.value(x);
        if rho > 0.0 {
            Ok(rho)
        } else {
            Err(Error::NonPositiveWeight {
                value: rho,
                point: x.to_vec(),
            })
        }
    }
}

impl ScalarField for WeightedField {
    fn dim(&self) -> usize {
        self.base.dim()
    }
    fn in_domain(&self, x: &[f64]) -> bool {
        self.base.in_domain(x)
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.base.value(x)
    }
    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        self.base.value_gradient(x, grad)
    }
    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        self.base.second_order(x, grad, hess)
    }
}

/// `L f = Δf + <∇ρ, ∇f> / ρ`, the drift Laplacian of the weighted field.
pub fn weighted_laplacian(wf: &WeightedField, x: &[f64]) -> Result<f64> {
    let f = wf.base.eval(x)?;
    let rho = wf.weight_at(x)?;
    let mut grad_rho = vec![0.0; x.len()];
    wf.weight.value_gradient(x, &mut grad_rho);
    let drift: f64 = grad_rho.iter().zip(&f.gradient).map(|(a, b)| a * b).sum();
    Ok(f.laplacian + drift / rho)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::PolynomialField;

    fn hermite(terms: &[(&[u32], i64)]) -> WeightedField {
        WeightedField::new(
            PolynomialField::from_int_terms(2, terms).unwrap().into(),
            GaussianWeight::new(2).into(),
        )
        .unwrap()
    }

    /// `L` straight from its definition with central differences of `log ρ`.
    fn fd_weighted_laplacian(wf: &WeightedField, x: &[f64]) -> f64 {
        let h = 1e-5;
        let n = x.len();
        let mut lap = 0.0;
        let mut drift = 0.0;
        for i in 0..n {
            let mut p = x.to_vec();
            let mut m = x.to_vec();
            p[i] += h;
            m[i] -= h;
            let f0 = wf.base().value(x);
            lap += (wf.base().value(&p) - 2.0 * f0 + wf.base().value(&m)) / (h * h);
            let dlogrho = (wf.weight().value(&p).ln() - wf.weight().value(&m).ln()) / (2.0 * h);
            let df = (wf.base().value(&p) - wf.base().value(&m)) / (2.0 * h);
            drift += dlogrho * df;
        }
        lap + drift
    }

    #[test]
    fn constant_weight_is_plain_laplacian() {
        let wf = WeightedField::new(
            PolynomialField::from_int_terms(2, &[(&[2, 0], 3), (&[1, 1], 1)])
                .unwrap()
                .into(),
            ConstantField::new(2, 1.0).into(),
        )
        .unwrap();
        assert_eq!(weighted_laplacian(&wf, &[0.3, -0.7]).unwrap(), 6.0);
    }

    #[test]
    fn hermite_degree_one() {
        let wf = hermite(&[(&[1, 0], 1)]);
        for x in [[0.3, 0.1], [-1.2, 2.0], [2.0, 0.0]] {
            let l = weighted_laplacian(&wf, &x).unwrap();
            let fd = fd_weighted_laplacian(&wf, &x);
            assert!((l - fd).abs() < 1e-5, "{l} vs {fd}");
            assert!((l + x[0]).abs() < 1e-12);
        }
    }

    #[test]
    fn hermite_degree_two() {
        let wf = hermite(&[(&[2, 0], 1), (&[0, 0], -1)]);
        let l = weighted_laplacian(&wf, &[2.0, 0.0]).unwrap();
        let fd = fd_weighted_laplacian(&wf, &[2.0, 0.0]);
        assert!((fd + 6.0).abs() < 1e-4, "{fd}");
        assert!((l + 6.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_non_positive_weight() {
        let wf = WeightedField::new(
            PolynomialField::from_int_terms(2, &[(&[1, 0], 1)]).unwrap().into(),
            PolynomialField::from_int_terms(2, &[(&[0, 1], 1)]).unwrap().into(),
        )
        .unwrap();
        assert!(matches!(
            weighted_laplacian(&wf, &[0.5, -0.5]),
            Err(Error::NonPositiveWeight { .. })
        ));
        assert!(weighted_laplacian(&wf, &[0.5, 0.5]).is_ok());
    }
}
