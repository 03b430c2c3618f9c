//! Named fields with their natural domains.

use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::fields::{
    BoxFlavor, BoxMode, Field, GaussianWeight, PolynomialField, TorusMode, TrigEigenfunction, WeightedField,
};
use crate::harmonics::SolidHarmonic;
use crate::levelset::Domain;
use crate::poly::SparsePolynomial;

#[derive(Clone, Debug)]
pub struct Preset {
    pub name: &'static str,
    pub description: &'static str,
    pub field: Field,
    pub domain: Domain,
}

impl Preset {
    /// The field as a solid harmonic, when it is one.
    pub fn solid_harmonic(&self) -> Option<SolidHarmonic> {
        self.field.as_polynomial().and_then(|p| SolidHarmonic::try_from(p).ok())
    }
}

pub const PRESET_NAMES: &[&str] = &[
    "torus-sin",
    "torus-mix",
    "p=x3",
    "x2-y2",
    "box-dirichlet",
    "box-dirichlet-21",
    "box-neumann",
    "box-neumann-21",
    "hermite-gaussian",
    "radial",
    "saddle-mix",
];

fn poly(dim: usize, terms: &[(&[u32], i64)]) -> Field {
    PolynomialField::from_int_terms(dim, terms)
        .expect("valid preset")
        .into()
}

fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn trig_box(modes: &[(&[u32], f64)], flavor: BoxFlavor) -> Field {
    let modes = modes
        .iter()
        .map(|(k, a)| BoxMode {
            k: k.to_vec(),
            amplitude: *a,
        })
        .collect();
    TrigEigenfunction::box_sum(modes, flavor).expect("valid preset").into()
}

pub fn preset(name: &str) -> Result<Preset> {
    let unit_ball = |n| Domain::centered_ball(n, 1.0).expect("valid ball");
    let p = match name {
        "torus-sin" => Preset {
            name: "torus-sin",
            description: "sin(2 pi x1) on the flat torus T^2",
            field: TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 1.0)])
                .expect("valid")
                .into(),
            domain: Domain::torus(2),
        },
        "torus-mix" => Preset {
            name: "torus-mix",
            description: "sin(2 pi (3 x1 + 4 x2)) + 0.5 cos(2 pi 5 x1) on T^2",
            field: TrigEigenfunction::torus(vec![TorusMode::sin(vec![3, 4], 1.0), TorusMode::cos(vec![5, 0], 0.5)])
                .expect("valid")
                .into(),
            domain: Domain::torus(2),
        },
        "p=x3" => Preset {
            name: "p=x3",
            description: "P = x3 in R^3 on the unit ball",
            field: poly(3, &[(&[0, 0, 1], 1)]),
            domain: unit_ball(3),
        },
        "x2-y2" => Preset {
            name: "x2-y2",
            description: "P = x1^2 - x2^2 in R^2 on the unit disk",
            field: poly(2, &[(&[2, 0], 1), (&[0, 2], -1)]),
            domain: unit_ball(2),
        },
        "box-dirichlet" => Preset {
            name: "box-dirichlet",
            description: "sin(pi x1) sin(pi x2), Dirichlet on [0,1]^2",
            field: trig_box(&[(&[1, 1], 1.0)], BoxFlavor::Dirichlet),
            domain: Domain::unit_cube(2),
        },
        "box-dirichlet-21" => Preset {
            name: "box-dirichlet-21",
            description: "sin(2 pi x1) sin(pi x2), Dirichlet on [0,1]^2",
            field: trig_box(&[(&[2, 1], 1.0)], BoxFlavor::Dirichlet),
            domain: Domain::unit_cube(2),
        },
        "box-neumann" => Preset {
            name: "box-neumann",
            description: "cos(pi x1), Neumann on [0,1]^2",
            field: trig_box(&[(&[1, 0], 1.0)], BoxFlavor::Neumann),
            domain: Domain::unit_cube(2),
        },
        "box-neumann-21" => Preset {
            name: "box-neumann-21",
            description: "cos(2 pi x1) cos(pi x2), Neumann on [0,1]^2",
            field: trig_box(&[(&[2, 1], 1.0)], BoxFlavor::Neumann),
            domain: Domain::unit_cube(2),
        },
        "hermite-gaussian" => Preset {
            name: "hermite-gaussian",
            description: "x1^2 - 1 with Gaussian weight exp(-|x|^2/2) on [-4,4]^2",
            field: WeightedField::new(poly(2, &[(&[2, 0], 1), (&[0, 0], -1)]), GaussianWeight::new(2).into())
                .expect("valid")
                .into(),
            domain: Domain::new_box(vec![-4.0; 2], vec![4.0; 2]).expect("valid box"),
        },
        "radial" => {
            let half = SparsePolynomial::radius_squared(3).scale(&ratio(1, 2));
            Preset {
                name: "radial",
                description: "|x|^2 / 2 in R^3 on the unit ball (not an eigenfunction)",
                field: PolynomialField::new(half).into(),
                domain: unit_ball(3),
            }
        }
        "saddle-mix" => Preset {
            name: "saddle-mix",
            description: "x1^2 - x2^2 + x1/2 on the unit disk (harmonic, not homogeneous)",
            field: PolynomialField::new(
                SparsePolynomial::from_terms(
                    2,
                    vec![
                        (vec![2, 0], ratio(1, 1)),
                        (vec![0, 2], ratio(-1, 1)),
                        (vec![1, 0], ratio(1, 2)),
                    ],
                )
                .expect("valid preset"),
            )
            .into(),
            domain: unit_ball(2),
        },
        _ => {
            return Err(Error::InvalidParameter(format!(
                "unknown preset {name:?}; expected one of {}",
                PRESET_NAMES.join(", ")
            )))
        }
    };
    Ok(p)
}

pub fn all_presets() -> Vec<Preset> {
    PRESET_NAMES.iter().map(|n| preset(n).expect("listed preset")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ScalarField;

    #[test]
    fn every_listed_preset_builds() {
        for p in all_presets() {
            assert_eq!(p.field.dim(), p.domain.dim(), "{}", p.name);
        }
        assert!(preset("nope").is_err());
        assert!(preset("p=x3").unwrap().solid_harmonic().is_some());
        assert!(preset("radial").unwrap().solid_harmonic().is_none());
    }

    #[test]
    fn hermite_is_a_weighted_eigenfunction() {
        // L(x1² − 1) = 2 − 2x1² = −2 (x1² − 1) for the Gaussian weight.
        let p = preset("hermite-gaussian").unwrap();
        let w = p.field.as_weighted().unwrap();
        for x in [[0.3, -1.2], [2.0, 0.0], [-1.5, 3.0]] {
            let lf = crate::fields::weighted_laplacian(w, &x).unwrap();
            assert!((lf + 2.0 * p.field.value(&x)).abs() < 1e-12);
        }
    }
}
