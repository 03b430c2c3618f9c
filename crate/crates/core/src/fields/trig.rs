use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::ScalarField;

/// Boundary condition of a box eigenfunction on `[0,1]^n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BoxFlavor {
    Dirichlet,
    Neumann,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TrigKind {
    Torus,
    Box(BoxFlavor),
}

/// `a cos(2π m·x) + b sin(2π m·x)` on the flat torus `R^n / Z^n`.
#[derive(Clone, Debug, PartialEq)]
pub struct TorusMode {
    pub m: Vec<i64>,
    pub cos: f64,
    pub sin: f64,
}

impl TorusMode {
    pub fn sin(m: Vec<i64>, b: f64) -> Self {
        Self { m, cos: 0.0, sin: b }
    }

    pub fn cos(m: Vec<i64>, a: f64) -> Self {
        Self { m, cos: a, sin: 0.0 }
    }

    fn norm_sq(&self) -> i64 {
        self.m.iter().map(|v| v * v).sum()
    }
}

/// `A ∏ sin(π k_i x_i)` (Dirichlet) or `A ∏ cos(π k_i x_i)` (Neumann).
#[derive(Clone, Debug, PartialEq)]
pub struct BoxMode {
    pub k: Vec<u32>,
    pub amplitude: f64,
}

impl BoxMode {
    fn norm_sq(&self) -> u64 {
        self.k.iter().map(|&v| (v as u64) * (v as u64)).sum()
    }
}

/// Largest supported box dimension.
pub const MAX_BOX_DIM: usize = 8;

#[derive(Clone, Debug, PartialEq)]
enum Modes {
    Torus(Vec<TorusMode>),
    Box(BoxFlavor, Vec<BoxMode>),
}

/// A Laplace eigenfunction built from trigonometric modes sharing one
/// eigenvalue, so `Δf = -λ f` holds identically.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigEigenfunction {
    dim: usize,
    modes: Modes,
    eigenvalue: f64,
}

impl TrigEigenfunction {
    /// Torus eigenfunction; all lattice vectors must share `|m|^2 > 0`.
    pub fn torus(modes: Vec<TorusMode>) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mode list".into()))?;
        let dim = first.m.len();
        if dim == 0 {
            return Err(Error::InvalidParameter("zero-dimensional mode".into()));
        }
        let norm = first.norm_sq();
        for m in &modes {
            if m.m.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.m.len(),
                });
            }
            if m.norm_sq() != norm {
                return Err(Error::MixedEigenvalues(format!("|m|^2 = {} vs {}", norm, m.norm_sq())));
            }
        }
        if norm == 0 {
            return Err(Error::InvalidParameter(
                "the zero lattice vector gives a constant".into(),
            ));
        }
        if modes.iter().all(|m| m.cos == 0.0 && m.sin == 0.0) {
            return Err(Error::InvalidParameter("all amplitudes are zero".into()));
        }
        Ok(Self {
            dim,
            eigenvalue: 4.0 * PI * PI * norm as f64,
            modes: Modes::Torus(modes),
        })
    }

    /// Single product mode on `[0,1]^n` with unit amplitude.
    pub fn box_product(k: Vec<u32>, flavor: BoxFlavor) -> Result<Self> {
        Self::box_sum(vec![BoxMode { k, amplitude: 1.0 }], flavor)
    }

    /// Sum of product modes on `[0,1]^n` sharing `Σ k_i^2`.
    pub fn box_sum(modes: Vec<BoxMode>, flavor: BoxFlavor) -> Result<Self> {
        let first = modes
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty mode list".into()))?;
        let dim = first.k.len();
        if dim == 0 || dim > MAX_BOX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        let norm = first.norm_sq();
        for m in &modes {
            if m.k.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: m.k.len(),
                });
            }
            if m.norm_sq() != norm {
                return Err(Error::MixedEigenvalues(format!("Σk^2 = {} vs {}", norm, m.norm_sq())));
            }
            match flavor {
                BoxFlavor::Dirichlet if m.k.contains(&0) => {
                    return Err(Error::InvalidParameter(
                        "Dirichlet modes need positive wave numbers".into(),
                    ))
                }
                BoxFlavor::Neumann if m.k.iter().all(|&v| v == 0) => {
                    return Err(Error::InvalidParameter("the zero Neumann mode is constant".into()))
                }
                _ => {}
            }
        }
        if modes.iter().all(|m| m.amplitude == 0.0) {
            return Err(Error::InvalidParameter("all amplitudes are zero".into()));
        }
        Ok(Self {
            dim,
            eigenvalue: PI * PI * norm as f64,
            modes: Modes::Box(flavor, modes),
        })
    }

    /// `λ` in `Δf = -λ f`.
    pub fn eigenvalue(&self) -> f64 {
        self.eigenvalue
    }

    pub fn kind(&self) -> TrigKind {
        match &self.modes {
            Modes::Torus(_) => TrigKind::Torus,
            Modes::Box(fl, _) => TrigKind::Box(*fl),
        }
    }

    pub fn torus_modes(&self) -> &[TorusMode] {
        match &self.modes {
            Modes::Torus(m) => m,
            Modes::Box(..) => &[],
        }
    }

    pub fn box_modes(&self) -> &[BoxMode] {
        match &self.modes {
            Modes::Box(_, m) => m,
            Modes::Torus(_) => &[],
        }
    }

    /// Upper bound on `sup |f|` from the triangle inequality.
    pub fn amplitude_bound(&self) -> f64 {
        match &self.modes {
            Modes::Torus(m) => m.iter().map(|m| m.cos.hypot(m.sin)).sum(),
            Modes::Box(_, m) => m.iter().map(|m| m.amplitude.abs()).sum(),
        }
    }

    fn box_mode_eval(flavor: BoxFlavor, mode: &BoxMode, x: &[f64], grad: &mut [f64], hess: Option<&mut [f64]>) -> f64 {
        let n = x.len();
        // per-axis factor and its first two derivatives
        let mut phi = [0.0f64; MAX_BOX_DIM];
        let mut d1 = [0.0f64; MAX_BOX_DIM];
        let mut d2 = [0.0f64; MAX_BOX_DIM];
        for i in 0..n {
            let w = PI * mode.k[i] as f64;
            let (s, c) = (w * x[i]).sin_cos();
            match flavor {
                BoxFlavor::Dirichlet => {
                    phi[i] = s;
                    d1[i] = w * c;
                    d2[i] = -w * w * s;
                }
                BoxFlavor::Neumann => {
                    phi[i] = c;
                    d1[i] = -w * s;
                    d2[i] = -w * w * c;
                }
            }
        }
        let a = mode.amplitude;
        let prod_except = |skip_a: usize, skip_b: usize| -> f64 {
            let mut p = 1.0;
            for (i, v) in phi[..n].iter().enumerate() {
                if i != skip_a && i != skip_b {
                    p *= v;
                }
            }
            p
        };
        for j in 0..n {
            grad[j] += a * d1[j] * prod_except(j, usize::MAX);
        }
        if let Some(hess) = hess {
            for j in 0..n {
                hess[j * n + j] += a * d2[j] * prod_except(j, usize::MAX);
                for l in j + 1..n {
                    let h = a * d1[j] * d1[l] * prod_except(j, l);
                    hess[j * n + l] += h;
                    hess[l * n + j] += h;
                }
            }
        }
        a * prod_except(usize::MAX, usize::MAX)
    }
}

impl ScalarField for TrigEigenfunction {
    fn dim(&self) -> usize {
        self.dim
    }

    fn in_domain(&self, x: &[f64]) -> bool {
        match self.modes {
            Modes::Torus(_) => x.iter().all(|v| v.is_finite()),
            Modes::Box(..) => x.iter().all(|&v| (-1e-12..=1.0 + 1e-12).contains(&v)),
        }
    }

    fn value(&self, x: &[f64]) -> f64 {
        match &self.modes {
            Modes::Torus(modes) => modes
                .iter()
                .map(|m| {
                    let dot: f64 = m.m.iter().zip(x).map(|(&mi, xi)| mi as f64 * xi).sum();
                    let (s, c) = (2.0 * PI * dot).sin_cos();
                    m.cos * c + m.sin * s
                })
                .sum(),
            Modes::Box(flavor, modes) => modes
                .iter()
                .map(|m| {
                    let mut p = m.amplitude;
                    for (ki, xi) in m.k.iter().zip(x) {
                        let arg = PI * *ki as f64 * xi;
                        p *= match flavor {
                            BoxFlavor::Dirichlet => arg.sin(),
                            BoxFlavor::Neumann => arg.cos(),
                        };
                    }
                    p
                })
                .sum(),
        }
    }

    fn value_gradient(&self, x: &[f64], grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        match &self.modes {
            Modes::Torus(modes) => {
                let mut v = 0.0;
                for m in modes {
                    let dot: f64 = m.m.iter().zip(x).map(|(&mi, xi)| mi as f64 * xi).sum();
                    let (s, c) = (2.0 * PI * dot).sin_cos();
                    v += m.cos * c + m.sin * s;
                    let d = 2.0 * PI * (m.sin * c - m.cos * s);
                    for (g, &mi) in grad.iter_mut().zip(&m.m) {
                        *g += d * mi as f64;
                    }
                }
                v
            }
            Modes::Box(flavor, modes) => modes
                .iter()
                .map(|m| Self::box_mode_eval(*flavor, m, x, grad, None))
                .sum(),
        }
    }

    fn second_order(&self, x: &[f64], grad: &mut [f64], hess: &mut [f64]) -> (f64, f64) {
        let n = self.dim;
        grad.iter_mut().for_each(|g| *g = 0.0);
        hess.iter_mut().for_each(|h| *h = 0.0);
        let v = match &self.modes {
            Modes::Torus(modes) => {
                let mut v = 0.0;
                for m in modes {
                    let dot: f64 = m.m.iter().zip(x).map(|(&mi, xi)| mi as f64 * xi).sum();
                    let (s, c) = (2.0 * PI * dot).sin_cos();
                    let val = m.cos * c + m.sin * s;
                    v += val;
                    let d = 2.0 * PI * (m.sin * c - m.cos * s);
                    let dd = -4.0 * PI * PI * val;
                    for i in 0..n {
                        let mi = m.m[i] as f64;
                        grad[i] += d * mi;
                        for j in 0..n {
                            hess[i * n + j] += dd * mi * m.m[j] as f64;
                        }
                    }
                }
                v
            }
            Modes::Box(flavor, modes) => modes
                .iter()
                .map(|m| Self::box_mode_eval(*flavor, m, x, grad, Some(&mut *hess)))
                .sum(),
        };
        let lap = (0..n).map(|i| hess[i * n + i]).sum();
        (v, lap)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sin_on_torus_at_quarter() {
        let f = TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 1.0)]).unwrap();
        let s = f.eval(&[0.25, 0.3]).unwrap();
        assert_eq!(s.value, 1.0);
        assert!(s.gradient.iter().all(|g| g.abs() < 1e-12));
        assert!((s.laplacian + 4.0 * PI * PI).abs() < 1e-12);
        assert!((f.eigenvalue() - 4.0 * PI * PI).abs() < 1e-15);
    }

    #[test]
    fn torus_shared_norm() {
        let f =
            TrigEigenfunction::torus(vec![TorusMode::cos(vec![3, 4], 1.0), TorusMode::sin(vec![5, 0], 2.0)]).unwrap();
        assert!((f.eigenvalue() - 100.0 * PI * PI).abs() < 1e-9);
        let err = TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 1.0), TorusMode::sin(vec![1, 1], 1.0)]);
        assert!(matches!(err, Err(Error::MixedEigenvalues(_))));
        assert!(TrigEigenfunction::torus(vec![]).is_err());
        assert!(TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 0.0)]).is_err());
    }

    #[test]
    fn box_boundary_conditions() {
        let d = TrigEigenfunction::box_product(vec![1], BoxFlavor::Dirichlet).unwrap();
        assert!(d.value(&[0.0]).abs() < 1e-15);
        assert!(d.value(&[1.0]).abs() < 1e-15);

        let nm = TrigEigenfunction::box_product(vec![2, 1], BoxFlavor::Neumann).unwrap();
        let mut g = [0.0; 2];
        for &x1 in &[0.0, 1.0] {
            for i in 0..=10 {
                let y = i as f64 / 10.0;
                nm.value_gradient(&[x1, y], &mut g);
                assert!(g[0].abs() < 1e-12, "{g:?}");
                nm.value_gradient(&[y, x1], &mut g);
                assert!(g[1].abs() < 1e-12, "{g:?}");
            }
        }

        let c = TrigEigenfunction::box_product(vec![1, 1], BoxFlavor::Dirichlet).unwrap();
        assert!((c.value(&[0.5, 0.5]) - 1.0).abs() < 1e-15);
        assert!(c.eval(&[1.5, 0.5]).is_err());
    }

    #[test]
    fn box_rejects_bad_wave_numbers() {
        assert!(TrigEigenfunction::box_product(vec![0, 0], BoxFlavor::Dirichlet).is_err());
        assert!(TrigEigenfunction::box_product(vec![1, 0], BoxFlavor::Dirichlet).is_err());
        assert!(TrigEigenfunction::box_product(vec![0, 0], BoxFlavor::Neumann).is_err());
        assert!(TrigEigenfunction::box_product(vec![1, 0], BoxFlavor::Neumann).is_ok());
    }
}
