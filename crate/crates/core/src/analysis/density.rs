use serde::{Deserialize, Serialize};

use crate::analysis::report::SIGMA;
use crate::error::{Error, Result};
use crate::fields::{norm, Field, ScalarField};
use crate::levelset::Domain;
use crate::mc::map_chunks;

/// Minimum bin count and sample count for density estimates.
pub const MIN_BINS: usize = 10;
pub const MIN_DENSITY_SAMPLES: usize = 10_000;

/// Reference measure pushed forward by `f`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    /// Volume (Riemannian) measure `σ`.
    Sigma,
    /// `μ = |∇f|²σ`.
    Mu,
    /// `|∇f|²ρσ` for a weighted field.
    Weighted,
}

impl Measure {
    pub fn as_str(&self) -> &'static str {
        match self {
            Measure::Sigma => "sigma",
            Measure::Mu => "mu",
            Measure::Weighted => "weighted",
        }
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "sigma" => Ok(Measure::Sigma),
            "mu" => Ok(Measure::Mu),
            "weighted" => Ok(Measure::Weighted),
            _ => Err(Error::InvalidParameter(format!("unknown measure {s:?}"))),
        }
    }
}

/// Binned value-distribution density of `f` under a measure.
///
/// `density[b]` is the normalized density (it integrates to one over the
/// bins); `psi[b]` is the un-normalized density, which for `μ` is the bin
/// average of `ψ(t) = ∫_{Z_t} |∇f|` by the coarea formula.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub measure: Measure,
    pub edges: Vec<f64>,
    pub centers: Vec<f64>,
    pub density: Vec<f64>,
    pub std_error: Vec<f64>,
    pub psi: Vec<f64>,
    pub psi_error: Vec<f64>,
    /// Total mass `μ(M)` of the measure on the domain.
    pub total_mass: f64,
    pub total_mass_error: f64,
    /// Bins where more than 1% of samples have `|∇f| < 10⁻⁶·max|∇f|`.
    pub flagged_bins: Vec<usize>,
    pub samples: usize,
    pub seed: u64,
}

impl DensityEstimate {
    pub fn bins(&self) -> usize {
        self.centers.len()
    }

    pub fn bin_width(&self, b: usize) -> f64 {
        self.edges[b + 1] - self.edges[b]
    }

    /// `Σ density·width`; one up to rounding when every sample was binned.
    pub fn normalization(&self) -> f64 {
        (0..self.bins()).map(|b| self.density[b] * self.bin_width(b)).sum()
    }

    /// A density with known values and errors, e.g. for detector tests.
    pub fn from_values(measure: Measure, edges: Vec<f64>, density: Vec<f64>, std_error: Vec<f64>) -> Self {
        let centers = edges.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
        Self {
            measure,
            centers,
            psi: density.clone(),
            psi_error: std_error.clone(),
            density,
            std_error,
            edges,
            total_mass: 1.0,
            total_mass_error: 0.0,
            flagged_bins: Vec::new(),
            samples: 0,
            seed: 0,
        }
    }
}

#[derive(Clone, Default)]
struct BinSums {
    sum_w: Vec<f64>,
    sum_w2: Vec<f64>,
    low: Vec<usize>,
    count: Vec<usize>,
    max_grad: f64,
}

impl BinSums {
    fn new(bins: usize) -> Self {
        Self {
            sum_w: vec![0.0; bins],
            sum_w2: vec![0.0; bins],
            low: vec![0; bins],
            count: vec![0; bins],
            max_grad: 0.0,
        }
    }
}

fn range_of(field: &Field, domain: &Domain, samples: usize, seed: u64) -> (f64, f64) {
    if let Field::Trig(t) = field {
        let b = t.amplitude_bound();
        return (-b, b);
    }
    let n = domain.dim();
    let parts = map_chunks(samples, seed, |rng, len| {
        let mut x = vec![0.0; n];
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for _ in 0..len {
            domain.sample(rng, &mut x);
            let v = field.value(&x);
            lo = lo.min(v);
            hi = hi.max(v);
        }
        (lo, hi)
    });
    parts
        .into_iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), (lo, hi)| {
            (a.min(lo), b.max(hi))
        })
}

/// Monte Carlo push-forward histogram of `f` under `measure`.
///
/// Draws `samples` uniform points of `domain`, weights each by 1, `|∇f|²`
/// or `|∇f|²ρ`, and bins `f(x)` into `bins` equal bins over `range`. When
/// `range` is `None` it is `±` the amplitude bound for trigonometric
/// fields and the sampled `[min f, max f]` otherwise, so every sample is
/// binned. Standard errors of the normalized density use the delta method
/// for a ratio estimator.
pub fn value_distribution_density(
    field: &Field,
    measure: Measure,
    domain: &Domain,
    bins: usize,
    samples: usize,
    seed: u64,
    range: Option<(f64, f64)>,
) -> Result<DensityEstimate> {
    domain.validate()?;
    if field.dim() != domain.dim() {
        return Err(Error::DimensionMismatch {
            expected: domain.dim(),
            got: field.dim(),
        });
    }
    if bins < MIN_BINS {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_BINS} bins required, got {bins}"
        )));
    }
    if samples < MIN_DENSITY_SAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_DENSITY_SAMPLES} samples required, got {samples}"
        )));
    }
    let weighted = field.as_weighted();
    if measure == Measure::Weighted && weighted.is_none() {
        return Err(Error::InvalidParameter(
            "the weighted measure needs a weighted field".into(),
        ));
    }
    let (lo, hi) = range.unwrap_or_else(|| range_of(field, domain, samples, seed));
    if !(hi > lo) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::DegenerateRange { lo, hi });
    }
    let n = domain.dim();
    let width = (hi - lo) / bins as f64;
    let parts = map_chunks(samples, seed, |rng, len| -> Result<BinSums> {
        let mut s = BinSums::new(bins);
        let mut x = vec![0.0; n];
        let mut grad = vec![0.0; n];
        let mut grads = Vec::with_capacity(len);
        let mut slots = Vec::with_capacity(len);
        for _ in 0..len {
            domain.sample(rng, &mut x);
            let v = field.value_gradient(&x, &mut grad);
            if !(v >= lo && v <= hi) {
                continue;
            }
            let b = (((v - lo) / width) as usize).min(bins - 1);
            let g = norm(&grad);
            let w = match measure {
                Measure::Sigma => 1.0,
                Measure::Mu => g * g,
                Measure::Weighted => g * g * weighted.expect("checked above").weight_at(&x)?,
            };
            s.sum_w[b] += w;
            s.sum_w2[b] += w * w;
            s.count[b] += 1;
            s.max_grad = s.max_grad.max(g);
            grads.push(g);
            slots.push(b);
        }
        // Low-gradient counts use the chunk's gradient scale.
        let cut = 1e-6 * s.max_grad;
        for (g, b) in grads.iter().zip(&slots) {
            if *g < cut {
                s.low[*b] += 1;
            }
        }
        Ok(s)
    });
    let mut total = BinSums::new(bins);
    for p in parts {
        let p = p?;
        for b in 0..bins {
            total.sum_w[b] += p.sum_w[b];
            total.sum_w2[b] += p.sum_w2[b];
            total.low[b] += p.low[b];
            total.count[b] += p.count[b];
        }
        total.max_grad = total.max_grad.max(p.max_grad);
    }
    let nf = samples as f64;
    let vol = domain.volume();
    let s: f64 = total.sum_w.iter().sum();
    let s2: f64 = total.sum_w2.iter().sum();
    let mean_w = s / nf;
    let var_w = (s2 / nf - mean_w * mean_w).max(0.0) * nf / (nf - 1.0);
    let edges: Vec<f64> = (0..=bins).map(|b| lo + b as f64 * width).collect();
    let centers: Vec<f64> = (0..bins).map(|b| lo + (b as f64 + 0.5) * width).collect();
    let mut density = vec![0.0; bins];
    let mut std_error = vec![0.0; bins];
    let mut psi = vec![0.0; bins];
    let mut psi_error = vec![0.0; bins];
    for b in 0..bins {
        let ey = total.sum_w[b] / nf;
        let ey2 = total.sum_w2[b] / nf;
        let var_y = (ey2 - ey * ey).max(0.0) * nf / (nf - 1.0);
        psi[b] = vol * ey / width;
        psi_error[b] = vol * (var_y / nf).sqrt() / width;
        if s > 0.0 {
            let r = total.sum_w[b] / s;
            // Var(Y − rX) with X = w and Y = w·1_b, so E[XY] = E[Y²].
            let var_lin = (ey2 * (1.0 - 2.0 * r) + r * r * (s2 / nf)).max(0.0);
            density[b] = r / width;
            std_error[b] = (var_lin / nf).sqrt() / mean_w / width;
        }
    }
    let flagged_bins = (0..bins)
        .filter(|&b| total.count[b] > 0 && total.low[b] as f64 > 0.01 * total.count[b] as f64)
        .collect();
    Ok(DensityEstimate {
        measure,
        edges,
        centers,
        density,
        std_error,
        psi,
        psi_error,
        total_mass: vol * mean_w,
        total_mass_error: vol * (var_w / nf).sqrt(),
        flagged_bins,
        samples,
        seed,
    })
}

/// Unimodality of a density about the fixed mode `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct UnimodalityReport {
    pub mode: f64,
    /// Largest increase-violation on `t ≤ 0`.
    pub left_violation: f64,
    /// Largest decrease-violation on `t ≥ 0`.
    pub right_violation: f64,
    pub violation: f64,
    pub threshold: f64,
    pub pass: bool,
}

/// Tests that the density is non-decreasing on bins with center `≤ 0` and
/// non-increasing on bins with center `≥ 0`.
///
/// The violation is the largest `(ψ̂(t_a) − ψ̂(t_b))₊` over left pairs
/// `t_a < t_b ≤ 0` together with the mirrored statistic over right pairs.
/// The threshold is three times the largest combined standard error
/// `sqrt(se_a² + se_b²)` over the same pairs.
pub fn unimodality_check(d: &DensityEstimate) -> UnimodalityReport {
    let left: Vec<usize> = (0..d.bins()).filter(|&b| d.centers[b] <= 0.0).collect();
    let right: Vec<usize> = (0..d.bins()).filter(|&b| d.centers[b] >= 0.0).collect();
    let mut max_se: f64 = 0.0;
    let mut scan = |idx: &[usize], increasing: bool| -> f64 {
        let mut v: f64 = 0.0;
        for (i, &a) in idx.iter().enumerate() {
            for &b in &idx[i + 1..] {
                let diff = if increasing {
                    d.density[a] - d.density[b]
                } else {
                    d.density[b] - d.density[a]
                };
                v = v.max(diff);
                max_se = max_se.max(d.std_error[a].hypot(d.std_error[b]));
            }
        }
        v
    };
    let left_violation = scan(&left, true);
    let right_violation = scan(&right, false);
    let violation = left_violation.max(right_violation);
    let threshold = SIGMA * max_se;
    UnimodalityReport {
        mode: 0.0,
        left_violation,
        right_violation,
        violation,
        threshold,
        pass: violation <= threshold,
    }
}
