//! JSON field descriptions.
//!
//! ```json
//! {"kind": "polynomial", "dim": 2, "degree": 2,
//!  "terms": [{"exponents": [2, 0], "coefficient": "1"},
//!            {"exponents": [0, 2], "coefficient": "-1"}]}
//! {"kind": "torus", "dim": 2, "modes": [{"m": [1, 0], "cos": "0", "sin": "1"}]}
//! {"kind": "box", "dim": 2, "flavor": "neumann", "modes": [{"k": [2, 1], "amplitude": "1"}]}
//! {"kind": "gaussian", "dim": 2}
//! {"kind": "constant", "dim": 2, "value": "1"}
//! {"kind": "weighted", "base": {...}, "weight": {...}}
//! ```
//!
//! Polynomial coefficients are exact: integer, decimal (`"-2.5"`, `"1e-3"`)
//! or rational (`"7/12"`) strings. Trigonometric amplitudes are decimal
//! strings converted to `f64`. `degree` is optional; when present every
//! term must have that total degree.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fields::{
    BoxFlavor, BoxMode, ConstantField, Field, GaussianWeight, PolynomialField, ScalarField, TorusMode,
    TrigEigenfunction, TrigKind, WeightedField,
};
use crate::poly::{format_rational, parse_rational, SparsePolynomial};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermSpec {
    pub exponents: Vec<u32>,
    pub coefficient: String,
}

fn zero_string() -> String {
    "0".to_string()
}

fn one_string() -> String {
    "1".to_string()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TorusModeSpec {
    pub m: Vec<i64>,
    #[serde(default = "zero_string")]
    pub cos: String,
    #[serde(default = "zero_string")]
    pub sin: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoxModeSpec {
    pub k: Vec<u32>,
    #[serde(default = "one_string")]
    pub amplitude: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum FieldSpec {
    Polynomial {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<u32>,
        terms: Vec<TermSpec>,
    },
    Torus {
        dim: usize,
        modes: Vec<TorusModeSpec>,
    },
    Box {
        dim: usize,
        flavor: BoxFlavor,
        modes: Vec<BoxModeSpec>,
    },
    Gaussian {
        dim: usize,
    },
    Constant {
        dim: usize,
        value: String,
    },
    Weighted {
        base: Box<FieldSpec>,
        weight: Box<FieldSpec>,
    },
}

fn parse_f64(s: &str) -> Result<f64> {
    let v = parse_rational(s)?.to_f64().ok_or_else(|| Error::Parse(s.to_string()))?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::Parse(s.to_string()))
    }
}

fn check_dim(declared: usize, got: usize) -> Result<()> {
    if declared == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: declared,
            got,
        })
    }
}

impl FieldSpec {
    pub fn build(&self) -> Result<Field> {
        match self {
            FieldSpec::Polynomial { dim, degree, terms } => {
                if *dim == 0 {
                    return Err(Error::Spec("dimension must be positive".into()));
                }
                let parsed = terms
                    .iter()
                    .map(|t| Ok((t.exponents.clone(), parse_rational(&t.coefficient)?)))
                    .collect::<Result<Vec<_>>>()?;
                let poly = SparsePolynomial::from_terms(*dim, parsed)?;
                if let Some(k) = degree {
                    if !poly.is_homogeneous_of(*k) {
                        return Err(Error::NotHomogeneous);
                    }
                }
                Ok(PolynomialField::new(poly).into())
            }
            FieldSpec::Torus { dim, modes } => {
                let modes = modes
                    .iter()
                    .map(|m| {
                        check_dim(*dim, m.m.len())?;
                        Ok(TorusMode {
                            m: m.m.clone(),
                            cos: parse_f64(&m.cos)?,
                            sin: parse_f64(&m.sin)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TrigEigenfunction::torus(modes)?.into())
            }
            FieldSpec::Box { dim, flavor, modes } => {
                let modes = modes
                    .iter()
                    .map(|m| {
                        check_dim(*dim, m.k.len())?;
                        Ok(BoxMode {
                            k: m.k.clone(),
                            amplitude: parse_f64(&m.amplitude)?,
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                Ok(TrigEigenfunction::box_sum(modes, *flavor)?.into())
            }
            FieldSpec::Gaussian { dim } => Ok(GaussianWeight::new(*dim).into()),
            FieldSpec::Constant { dim, value } => Ok(ConstantField::new(*dim, parse_f64(value)?).into()),
            FieldSpec::Weighted { base, weight } => Ok(WeightedField::new(base.build()?, weight.build()?)?.into()),
        }
    }

    pub fn from_field(field: &Field) -> Self {
        match field {
            Field::Polynomial(p) => {
                let poly = p.polynomial();
                FieldSpec::Polynomial {
                    dim: poly.dim(),
                    degree: poly.homogeneous_degree(),
                    terms: poly
                        .terms()
                        .map(|(e, c)| TermSpec {
                            exponents: e.clone(),
                            coefficient: format_rational(c),
                        })
                        .collect(),
                }
            }
            Field::Trig(t) => match t.kind() {
                TrigKind::Torus => FieldSpec::Torus {
                    dim: t.dim(),
                    modes: t
                        .torus_modes()
                        .iter()
                        .map(|m| TorusModeSpec {
                            m: m.m.clone(),
                            cos: m.cos.to_string(),
                            sin: m.sin.to_string(),
                        })
                        .collect(),
                },
                TrigKind::Box(flavor) => FieldSpec::Box {
                    dim: t.dim(),
                    flavor,
                    modes: t
                        .box_modes()
                        .iter()
                        .map(|m| BoxModeSpec {
                            k: m.k.clone(),
                            amplitude: m.amplitude.to_string(),
                        })
                        .collect(),
                },
            },
            Field::Gaussian(g) => FieldSpec::Gaussian { dim: g.dim() },
            Field::Constant(c) => FieldSpec::Constant {
                dim: c.dim(),
                value: c.constant().to_string(),
            },
            Field::Weighted(w) => FieldSpec::Weighted {
                base: Box::new(Self::from_field(w.base())),
                weight: Box::new(Self::from_field(w.weight())),
            },
        }
    }
}
