use serde::Serialize;

use crate::error::{Error, Result};
use crate::fields::{norm, ScalarField};
use crate::levelset::clip::radial_masses;
use crate::levelset::domain::Domain;
use crate::levelset::integrand::Integrand;
use crate::levelset::mesh::{extract_raw, extract_weighted, LevelSetMesh, NEAR_CRITICAL};
use crate::mc::{map_chunks, MCEstimate, Moments};

/// Minimum Monte Carlo sample count accepted by the estimators.
pub const MIN_SAMPLES: usize = 1000;

/// `Σ area·weight(centroid)` over the facets of `mesh`.
pub fn weighted_area(mesh: &LevelSetMesh, weight: &dyn Integrand) -> Result<f64> {
    let n = mesh.dim;
    let mut total = 0.0;
    for f in &mesh.facets {
        total += f.area * weight.eval(&f.centroid[..n], &f.gradient[..n])?;
    }
    Ok(total)
}

/// Mesh quadrature of `∫_{Z_t ∩ domain} weight` with an a posteriori error.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AreaEstimate {
    pub value: f64,
    /// `|A_h − A_{2h}|`, the first-order error model at resolution `h`.
    pub error: f64,
    pub coarse: f64,
    pub h: f64,
    pub facets: usize,
    pub near_critical: usize,
}

pub fn weighted_area_estimate<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    domain: &Domain,
    h: f64,
    weight: &dyn Integrand,
) -> Result<AreaEstimate> {
    let fine = extract_weighted(field, t, domain, h, weight)?;
    let coarse = extract_weighted(field, t, domain, 2.0 * h, weight)?;
    let value = fine.weighted_total();
    let coarse_value = coarse.weighted_total();
    Ok(AreaEstimate {
        value,
        error: (value - coarse_value).abs() + f64::EPSILON * value.abs(),
        coarse: coarse_value,
        h,
        facets: fine.len(),
        near_critical: fine.near_critical_facets(),
    })
}

/// Default shell half-width: half of `10⁻³·diameter(domain)`.
pub fn default_delta(domain: &Domain) -> f64 {
    0.5 * domain.diameter() * 1e-3
}

/// Thin-shell estimate together with gradient diagnostics of the shell.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShellEstimate {
    pub estimate: MCEstimate,
    pub delta: f64,
    pub shell_samples: usize,
    /// Fraction of shell samples with `|∇f|` below `10⁻³·median`.
    pub low_gradient_fraction: f64,
}

impl ShellEstimate {
    /// Heuristic near-critical flag: more than 1% of shell samples have a
    /// gradient below `10⁻³` of the shell median.
    pub fn near_critical(&self) -> bool {
        self.low_gradient_fraction > 0.01
    }
}

fn check_mc(delta: f64, samples: usize) -> Result<()> {
    if !(delta > 0.0) || !delta.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "shell width must be positive, got {delta}"
        )));
    }
    if samples < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_SAMPLES} samples required, got {samples}"
        )));
    }
    Ok(())
}

fn check_dims<F: ScalarField + ?Sized>(field: &F, domain: &Domain) -> Result<()> {
    domain.validate()?;
    if field.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: field.dim(),
        });
    }
    Ok(())
}

/// Coarea thin-shell estimator of `∫_{Z_t} g`:
/// `vol(domain)·mean(1_{|f−t|<δ}·g·|∇f|)/(2δ)` over uniform samples.
///
/// The bias is `O(δ²)` at regular values. A shell wide enough to reach
/// critical points is not detected here; see
/// [`ShellEstimate::low_gradient_fraction`].
pub fn thin_shell<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    g: &dyn Integrand,
    domain: &Domain,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<MCEstimate> {
    Ok(thin_shell_detailed(field, t, g, domain, delta, samples, seed)?.estimate)
}

pub fn thin_shell_detailed<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    g: &dyn Integrand,
    domain: &Domain,
    delta: f64,
    samples: usize,
    seed: u64,
) -> Result<ShellEstimate> {
    check_dims(field, domain)?;
    check_mc(delta, samples)?;
    let n = domain.dim();
    let parts = map_chunks(samples, seed, |rng, len| -> Result<(Moments, Vec<f64>)> {
        let mut m = Moments::default();
        let mut grads = Vec::new();
        let mut x = vec![0.0; n];
        let mut grad = vec![0.0; n];
        for _ in 0..len {
            domain.sample(rng, &mut x);
            let v = field.value(&x);
            if (v - t).abs() < delta {
                field.value_gradient(&x, &mut grad);
                let gn = norm(&grad);
                grads.push(gn);
                m.push(g.eval(&x, &grad)? * gn);
            } else {
                m.push(0.0);
            }
        }
        Ok((m, grads))
    });
    let mut total = Moments::default();
    let mut grads = Vec::new();
    for p in parts {
        let (m, g) = p?;
        total.merge(&m);
        grads.extend(g);
    }
    let factor = domain.volume() / (2.0 * delta);
    Ok(ShellEstimate {
        estimate: MCEstimate::from_moments(&total, factor, seed),
        delta,
        shell_samples: grads.len(),
        low_gradient_fraction: low_gradient_fraction(&mut grads),
    })
}

fn low_gradient_fraction(grads: &mut [f64]) -> f64 {
    if grads.is_empty() {
        return 0.0;
    }
    grads.sort_by(f64::total_cmp);
    let median = grads[grads.len() / 2];
    let cut = 1e-3 * median;
    grads.iter().filter(|&&g| g < cut).count() as f64 / grads.len() as f64
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileMethod {
    Mesh,
    ThinShell,
}

/// Knobs for [`radial_profile`].
#[derive(Clone, Debug, PartialEq)]
pub struct RadialOptions {
    /// Mesh resolution; facets crossing a sphere are split to `h/4`.
    pub h: f64,
    /// Ball center; the origin when `None`.
    pub center: Option<Vec<f64>>,
    /// Thin-shell half-width for dimensions without a mesher.
    pub delta: Option<f64>,
    pub samples: usize,
    pub seed: u64,
}

impl Default for RadialOptions {
    fn default() -> Self {
        Self {
            h: 0.02,
            center: None,
            delta: None,
            samples: 1_000_000,
            seed: 0,
        }
    }
}

/// `I(r_j) = ∫_{{f=t} ∩ B(c, r_j)} weight` for an increasing radius grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// Mesh mode: `|I_h − I_{2h}|`. Thin-shell mode: one standard error.
    pub errors: Vec<f64>,
    pub method: ProfileMethod,
    pub h: f64,
    pub near_critical: usize,
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.is_empty() {
        return Err(Error::InvalidParameter("empty radius grid".into()));
    }
    if !(radii[0] > 0.0) || radii.windows(2).any(|w| !(w[1] > w[0])) || !radii[radii.len() - 1].is_finite() {
        return Err(Error::InvalidParameter(
            "radius grid must be positive and strictly increasing".into(),
        ));
    }
    Ok(())
}

/// Cumulative radial profile of a level set. Dimensions 2 and 3 use the
/// mesh; other dimensions fall back to the thin-shell estimator. With a
/// non-negative weight the mesh profile is non-decreasing exactly.
pub fn radial_profile<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    weight: &dyn Integrand,
    radii: &[f64],
    opts: &RadialOptions,
) -> Result<RadialProfile> {
    Ok(radial_profiles(field, t, &[weight], radii, opts)?.remove(0))
}

/// [`radial_profile`] for several weights sharing one extraction.
pub fn radial_profiles<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    weights: &[&dyn Integrand],
    radii: &[f64],
    opts: &RadialOptions,
) -> Result<Vec<RadialProfile>> {
    check_radii(radii)?;
    if weights.is_empty() {
        return Ok(Vec::new());
    }
    let n = field.dim();
    let center = opts.center.clone().unwrap_or_else(|| vec![0.0; n]);
    if center.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: center.len(),
        });
    }
    let r_max = radii[radii.len() - 1];
    if n == 2 || n == 3 {
        if !(opts.h > 0.0) || !opts.h.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "resolution h must be positive, got {}",
                opts.h
            )));
        }
        let run = |h: f64| -> Result<(Vec<Vec<f64>>, Vec<f64>)> {
            let lo: Vec<f64> = center.iter().map(|c| c - r_max - h).collect();
            let hi: Vec<f64> = center.iter().map(|c| c + r_max + h).collect();
            let raw = extract_raw(field, t, &lo, &hi, h)?;
            radial_masses(field, weights, &raw, n, &center, radii, h / 4.0)
        };
        let (fine, grads) = run(opts.h)?;
        let (coarse, _) = run(2.0 * opts.h)?;
        let scale = grads.iter().cloned().fold(0.0, f64::max);
        let near_critical = grads.iter().filter(|&&g| g < NEAR_CRITICAL * scale).count();
        return Ok(fine
            .into_iter()
            .zip(coarse)
            .map(|(values, coarse)| {
                let errors = values
                    .iter()
                    .zip(&coarse)
                    .map(|(a, b)| (a - b).abs() + f64::EPSILON * a.abs())
                    .collect();
                RadialProfile {
                    radii: radii.to_vec(),
                    values,
                    errors,
                    method: ProfileMethod::Mesh,
                    h: opts.h,
                    near_critical,
                }
            })
            .collect());
    }
    if n < 2 {
        return Err(Error::UnsupportedDimension(n));
    }
    let domain = Domain::ball(center.clone(), r_max)?;
    let delta = opts.delta.unwrap_or_else(|| default_delta(&domain));
    check_mc(delta, opts.samples)?;
    let m = radii.len();
    let nw = weights.len();
    let parts = map_chunks(opts.samples, opts.seed, |rng, len| -> Result<Vec<Moments>> {
        let mut buckets = vec![Moments::default(); nw * m];
        let mut x = vec![0.0; n];
        let mut grad = vec![0.0; n];
        for _ in 0..len {
            domain.sample(rng, &mut x);
            if (field.value(&x) - t).abs() >= delta {
                continue;
            }
            let r = x.iter().zip(&center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
            let j = radii.partition_point(|&q| q <= r);
            if j < m {
                field.value_gradient(&x, &mut grad);
                let gn = norm(&grad);
                for (w, weight) in weights.iter().enumerate() {
                    buckets[w * m + j].push(weight.eval(&x, &grad)? * gn);
                }
            }
        }
        Ok(buckets)
    });
    let mut buckets = vec![Moments::default(); nw * m];
    for p in parts {
        for (b, q) in buckets.iter_mut().zip(p?) {
            b.merge(&q);
        }
    }
    // A sample lands in at most one bucket, so cumulative sums of the sums
    // and of the squares are the moments of the cumulative indicator.
    let factor = domain.volume() / (2.0 * delta);
    Ok((0..nw)
        .map(|w| {
            let mut acc = Moments::default();
            let mut values = Vec::with_capacity(m);
            let mut errors = Vec::with_capacity(m);
            for b in &buckets[w * m..(w + 1) * m] {
                acc.sum += b.sum;
                acc.sum_sq += b.sum_sq;
                let total = Moments {
                    count: opts.samples,
                    ..acc
                };
                let est = MCEstimate::from_moments(&total, factor, opts.seed);
                values.push(est.value);
                errors.push(est.std_error);
            }
            RadialProfile {
                radii: radii.to_vec(),
                values,
                errors,
                method: ProfileMethod::ThinShell,
                h: 0.0,
                near_critical: 0,
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{PolynomialField, TorusMode, TrigEigenfunction};
    use crate::levelset::integrand::{GradientNorm, Unit};
    use std::f64::consts::PI;

    fn x3() -> PolynomialField {
        PolynomialField::from_int_terms(3, &[(&[0, 0, 1], 1)]).unwrap()
    }

    fn saddle() -> PolynomialField {
        PolynomialField::from_int_terms(2, &[(&[2, 0], 1), (&[0, 2], -1)]).unwrap()
    }

    #[test]
    fn weighted_area_examples() {
        let ball3 = Domain::centered_ball(3, 1.0).unwrap();
        let m = extract_weighted(&x3(), 0.5, &ball3, 0.02, &GradientNorm).unwrap();
        let a = weighted_area(&m, &GradientNorm).unwrap();
        assert!((a - 0.75 * PI).abs() < 0.01 * 0.75 * PI, "{a}");

        let ball2 = Domain::centered_ball(2, 1.0).unwrap();
        let m = extract_weighted(&saddle(), 0.0, &ball2, 0.01, &GradientNorm).unwrap();
        let a = weighted_area(&m, &GradientNorm).unwrap();
        assert!((a - 4.0).abs() < 0.04, "{a}");

        let empty = extract_weighted(&x3(), 2.0, &ball3, 0.05, &Unit).unwrap();
        assert_eq!(weighted_area(&empty, &GradientNorm).unwrap(), 0.0);
    }

    #[test]
    fn thin_shell_examples() {
        let ball = Domain::centered_ball(3, 1.0).unwrap();
        let e = thin_shell(&x3(), 0.0, &GradientNorm, &ball, 0.01, 1_000_000, 1).unwrap();
        assert!((e.value - PI).abs() <= 3.0 * e.std_error, "{e:?}");

        let f = TrigEigenfunction::torus(vec![TorusMode::sin(vec![1, 0], 1.0)]).unwrap();
        let e = thin_shell(&f, 0.0, &GradientNorm, &Domain::torus(2), 0.005, 1_000_000, 2).unwrap();
        assert!((e.value - 4.0 * PI).abs() <= 3.0 * e.std_error, "{e:?}");

        let zero = |_: &[f64], _: &[f64]| Ok(0.0);
        let e = thin_shell(&x3(), 0.0, &zero, &ball, 0.01, 10_000, 3).unwrap();
        assert_eq!((e.value, e.std_error), (0.0, 0.0));
    }

    #[test]
    fn thin_shell_is_deterministic() {
        let ball = Domain::centered_ball(3, 1.0).unwrap();
        let a = thin_shell(&x3(), 0.1, &GradientNorm, &ball, 0.02, 50_000, 5).unwrap();
        let b = thin_shell(&x3(), 0.1, &GradientNorm, &ball, 0.02, 50_000, 5).unwrap();
        assert_eq!(a, b);
        assert!(thin_shell(&x3(), 0.1, &GradientNorm, &ball, 0.0, 50_000, 5).is_err());
        assert!(thin_shell(&x3(), 0.1, &GradientNorm, &ball, 0.01, 999, 5).is_err());
    }

    #[test]
    fn radial_profile_of_plane() {
        let radii = [0.6, 0.8, 1.0];
        let p = radial_profile(&x3(), 0.5, &GradientNorm, &radii, &RadialOptions::default()).unwrap();
        for (r, v) in radii.iter().zip(&p.values) {
            let exact = PI * (r * r - 0.25);
            assert!((v - exact).abs() < 0.01 * exact, "r={r}: {v} vs {exact}");
        }
        let below = radial_profile(&x3(), 0.5, &GradientNorm, &[0.2, 0.4, 0.49], &RadialOptions::default()).unwrap();
        assert!(below.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn radial_profile_of_saddle_scales() {
        let radii: Vec<f64> = (1..=8).map(|i| 0.2 * i as f64).collect();
        let opts = RadialOptions {
            h: 0.01,
            ..Default::default()
        };
        let p = radial_profile(&saddle(), 0.0, &GradientNorm, &radii, &opts).unwrap();
        for (r, v) in radii.iter().zip(&p.values) {
            assert!((v / (r * r) - 4.0).abs() < 0.04, "r={r}: {}", v / (r * r));
        }
        assert!(p.values.windows(2).all(|w| w[1] >= w[0]));
    }

    #[test]
    fn radial_profile_thin_shell_fallback() {
        // The hyperplane x4 = 0 in R^4 meets B(0, r) in a 3-ball.
        let f = PolynomialField::from_int_terms(4, &[(&[0, 0, 0, 1], 1)]).unwrap();
        let opts = RadialOptions {
            delta: Some(0.01),
            samples: 400_000,
            seed: 11,
            ..Default::default()
        };
        let p = radial_profile(&f, 0.0, &GradientNorm, &[0.5, 1.0], &opts).unwrap();
        assert_eq!(p.method, ProfileMethod::ThinShell);
        for (r, (v, e)) in [0.5f64, 1.0].iter().zip(p.values.iter().zip(&p.errors)) {
            let exact = 4.0 / 3.0 * PI * r.powi(3);
            assert!(
                (v - exact).abs() <= 3.0 * e + 1e-3 * exact,
                "r={r}: {v} ± {e} vs {exact}"
            );
        }
    }

    #[test]
    fn area_estimate_error_model() {
        let f = PolynomialField::from_int_terms(3, &[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]).unwrap();
        let cube = Domain::new_box(vec![-1.0; 3], vec![1.0; 3]).unwrap();
        let est = weighted_area_estimate(&f, 0.25, &cube, 0.05, &Unit).unwrap();
        let exact = PI; // sphere of radius 1/2
        assert!((est.value - exact).abs() <= est.error, "{est:?}");
    }
}
