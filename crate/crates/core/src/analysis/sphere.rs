//! Quadrature on the unit sphere `S^{n−1}`.
//!
//! For n = 2 the circle is integrated by the midpoint rule on equally
//! spaced nodes, with error estimated against the rule on half as many
//! nodes. For n ≥ 3 points are drawn uniformly (normalized Gaussians) and
//! the error is one standard error.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::norm;
use crate::levelset::unit_sphere_area;
use crate::mc::{map_chunks, Moments};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum SphereMethod {
    CircleMidpoint,
    MonteCarlo,
}

/// Estimates of a family of sphere integrals computed from shared nodes.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SphereFamily {
    pub values: Vec<f64>,
    pub errors: Vec<f64>,
    /// Errors of the consecutive differences `values[j+1] − values[j]`.
    pub step_errors: Vec<f64>,
    pub nodes: usize,
    pub method: SphereMethod,
    pub seed: u64,
}

/// `∫_{S^{n−1}} g_j` for `j < m`, where `g(u, out)` writes all `m`
/// integrands at the unit vector `u`.
pub fn sphere_family<G>(n: usize, nodes: usize, seed: u64, m: usize, g: G) -> Result<SphereFamily>
where
    G: Fn(&[f64], &mut [f64]) + Sync,
{
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    if nodes < 2 {
        return Err(Error::InvalidParameter("at least two sphere nodes required".into()));
    }
    if n == 2 {
        let rule = |count: usize| {
            let mut sums = vec![0.0; m];
            let mut out = vec![0.0; m];
            for i in 0..count {
                let th = std::f64::consts::TAU * (i as f64 + 0.5) / count as f64;
                g(&[th.cos(), th.sin()], &mut out);
                for (s, o) in sums.iter_mut().zip(&out) {
                    *s += o;
                }
            }
            sums.iter()
                .map(|s| s * std::f64::consts::TAU / count as f64)
                .collect::<Vec<_>>()
        };
        let fine = rule(nodes);
        let coarse = rule(nodes / 2);
        let errors: Vec<f64> = fine.iter().zip(&coarse).map(|(a, b)| (a - b).abs()).collect();
        let step_errors = (0..m.saturating_sub(1))
            .map(|j| ((fine[j + 1] - fine[j]) - (coarse[j + 1] - coarse[j])).abs())
            .collect();
        return Ok(SphereFamily {
            values: fine,
            errors,
            step_errors,
            nodes,
            method: SphereMethod::CircleMidpoint,
            seed,
        });
    }
    let parts = map_chunks(nodes, seed, |rng, len| {
        let mut single = vec![Moments::default(); m];
        let mut steps = vec![Moments::default(); m.saturating_sub(1)];
        let mut u = vec![0.0; n];
        let mut out = vec![0.0; m];
        for _ in 0..len {
            loop {
                for x in u.iter_mut() {
                    *x = StandardNormal.sample(rng);
                }
                let r = norm(&u);
                if r > 1e-12 {
                    u.iter_mut().for_each(|x| *x /= r);
                    break;
                }
            }
            g(&u, &mut out);
            for (s, o) in single.iter_mut().zip(&out) {
                s.push(*o);
            }
            for (j, s) in steps.iter_mut().enumerate() {
                s.push(out[j + 1] - out[j]);
            }
        }
        (single, steps)
    });
    let mut single = vec![Moments::default(); m];
    let mut steps = vec![Moments::default(); m.saturating_sub(1)];
    for (a, b) in parts {
        for (s, x) in single.iter_mut().zip(&a) {
            s.merge(x);
        }
        for (s, x) in steps.iter_mut().zip(&b) {
            s.merge(x);
        }
    }
    let area = unit_sphere_area(n);
    Ok(SphereFamily {
        values: single.iter().map(|s| area * s.mean()).collect(),
        errors: single.iter().map(|s| area * s.std_error()).collect(),
        step_errors: steps.iter().map(|s| area * s.std_error()).collect(),
        nodes,
        method: SphereMethod::MonteCarlo,
        seed,
    })
}

/// `∫_{S^{n−1}} g` with its error estimate.
pub fn sphere_integral<G>(n: usize, nodes: usize, seed: u64, g: G) -> Result<(f64, f64)>
where
    G: Fn(&[f64]) -> f64 + Sync,
{
    let fam = sphere_family(n, nodes, seed, 1, |u, out| out[0] = g(u))?;
    Ok((fam.values[0], fam.errors[0]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn areas_and_moments() {
        let (v, e) = sphere_integral(2, 1000, 0, |_| 1.0).unwrap();
        assert!((v - 2.0 * PI).abs() < 1e-12 && e < 1e-12);
        let (v, e) = sphere_integral(2, 1000, 0, |u| u[0] * u[0]).unwrap();
        assert!((v - PI).abs() < 1e-12, "{v} {e}");
        let (v, e) = sphere_integral(3, 200_000, 4, |u| u[2] * u[2]).unwrap();
        assert!((v - 4.0 * PI / 3.0).abs() < 3.0 * e, "{v} ± {e}");
    }

    #[test]
    fn family_steps_have_paired_errors() {
        let f = sphere_family(3, 100_000, 1, 2, |u, out| {
            out[0] = u[2].abs();
            out[1] = u[2].abs() + 1e-3;
        })
        .unwrap();
        // Common nodes: the step is deterministic.
        assert!(f.step_errors[0] < 1e-6 * f.errors[0]);
        assert!(f.errors[0] > 1e-4);
    }
}
