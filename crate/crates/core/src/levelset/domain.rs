use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Integration domain: an axis-aligned box, a Euclidean ball, or the unit
/// cell `[0,1)^n` of the flat torus.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Domain {
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Ball { center: Vec<f64>, radius: f64 },
    Torus { dim: usize },
}

impl Domain {
    pub fn new_box(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() || lo.iter().zip(&hi).any(|(a, b)| !(b > a)) {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain::Box { lo, hi })
    }

    pub fn unit_cube(dim: usize) -> Self {
        Domain::Box {
            lo: vec![0.0; dim],
            hi: vec![1.0; dim],
        }
    }

    pub fn ball(center: Vec<f64>, radius: f64) -> Result<Self> {
        if center.is_empty() || !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::EmptyDomain);
        }
        Ok(Domain::Ball { center, radius })
    }

    /// Ball of radius `radius` about the origin.
    pub fn centered_ball(dim: usize, radius: f64) -> Result<Self> {
        Self::ball(vec![0.0; dim], radius)
    }

    pub fn torus(dim: usize) -> Self {
        Domain::Torus { dim }
    }

    /// Re-checks the invariants (deserialized domains bypass constructors).
    pub fn validate(&self) -> Result<()> {
        match self {
            Domain::Box { lo, hi } => Self::new_box(lo.clone(), hi.clone()).map(|_| ()),
            Domain::Ball { center, radius } => Self::ball(center.clone(), *radius).map(|_| ()),
            Domain::Torus { dim } if *dim == 0 => Err(Error::EmptyDomain),
            Domain::Torus { .. } => Ok(()),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Box { lo, .. } => lo.len(),
            Domain::Ball { center, .. } => center.len(),
            Domain::Torus { dim } => *dim,
        }
    }

    pub fn is_periodic(&self) -> bool {
        matches!(self, Domain::Torus { .. })
    }

    /// Axis-aligned bounding box.
    pub fn bounds(&self) -> (Vec<f64>, Vec<f64>) {
        match self {
            Domain::Box { lo, hi } => (lo.clone(), hi.clone()),
            Domain::Ball { center, radius } => (
                center.iter().map(|c| c - radius).collect(),
                center.iter().map(|c| c + radius).collect(),
            ),
            Domain::Torus { dim } => (vec![0.0; *dim], vec![1.0; *dim]),
        }
    }

    pub fn volume(&self) -> f64 {
        match self {
            Domain::Box { lo, hi } => lo.iter().zip(hi).map(|(a, b)| b - a).product(),
            Domain::Ball { center, radius } => unit_ball_volume(center.len()) * radius.powi(center.len() as i32),
            Domain::Torus { .. } => 1.0,
        }
    }

    pub fn diameter(&self) -> f64 {
        match self {
            Domain::Ball { radius, .. } => 2.0 * radius,
            _ => {
                let (lo, hi) = self.bounds();
                lo.iter().zip(&hi).map(|(a, b)| (b - a).powi(2)).sum::<f64>().sqrt()
            }
        }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        match self {
            Domain::Box { lo, hi } => x.iter().zip(lo.iter().zip(hi)).all(|(v, (a, b))| v >= a && v <= b),
            Domain::Ball { center, radius } => {
                x.iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>() < radius * radius
            }
            Domain::Torus { .. } => true,
        }
    }

    /// Draws a uniform point into `out`.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Domain::Box { lo, hi } => {
                for ((o, a), b) in out.iter_mut().zip(lo).zip(hi) {
                    *o = a + (b - a) * rng.random::<f64>();
                }
            }
            Domain::Torus { .. } => {
                for o in out.iter_mut() {
                    *o = rng.random::<f64>();
                }
            }
            Domain::Ball { center, radius } => {
                let n = center.len();
                if n <= 3 {
                    loop {
                        let mut r2 = 0.0;
                        for o in out.iter_mut() {
                            *o = 2.0 * rng.random::<f64>() - 1.0;
                            r2 += *o * *o;
                        }
                        if r2 < 1.0 {
                            break;
                        }
                    }
                } else {
                    let mut r2 = 0.0;
                    for o in out.iter_mut() {
                        *o = StandardNormal.sample(rng);
                        r2 += *o * *o;
                    }
                    let s = rng.random::<f64>().powf(1.0 / n as f64) / r2.sqrt();
                    out.iter_mut().for_each(|o| *o *= s);
                }
                for (o, c) in out.iter_mut().zip(center) {
                    *o = c + radius * *o;
                }
            }
        }
    }
}

/// Volume of the unit ball in `R^n`.
pub fn unit_ball_volume(n: usize) -> f64 {
    use std::f64::consts::PI;
    match n {
        0 => 1.0,
        1 => 2.0,
        _ => unit_ball_volume(n - 2) * 2.0 * PI / n as f64,
    }
}

/// Surface area of the unit sphere `S^{n-1}`.
pub fn unit_sphere_area(n: usize) -> f64 {
    n as f64 * unit_ball_volume(n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    #[test]
    fn volumes() {
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-15);
        assert!((unit_sphere_area(3) - 4.0 * PI).abs() < 1e-14);
        assert_eq!(Domain::torus(3).volume(), 1.0);
        assert_eq!(Domain::new_box(vec![0.0, -1.0], vec![2.0, 1.0]).unwrap().volume(), 4.0);
    }

    #[test]
    fn rejects_empty() {
        assert_eq!(Domain::new_box(vec![0.0], vec![0.0]).unwrap_err(), Error::EmptyDomain);
        assert_eq!(Domain::ball(vec![0.0], -1.0).unwrap_err(), Error::EmptyDomain);
    }

    #[test]
    fn samples_stay_inside() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for d in [
            Domain::centered_ball(3, 0.5).unwrap(),
            Domain::centered_ball(5, 2.0).unwrap(),
            Domain::new_box(vec![-1.0, 2.0], vec![0.0, 3.0]).unwrap(),
        ] {
            let mut x = vec![0.0; d.dim()];
            for _ in 0..1000 {
                d.sample(&mut rng, &mut x);
                assert!(d.contains(&x));
            }
        }
    }
}
