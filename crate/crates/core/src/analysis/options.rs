use serde::Serialize;

use crate::error::Result;
use crate::fields::ScalarField;
use crate::levelset::{default_delta, thin_shell_detailed, weighted_area_estimate, Domain, Integrand, RadialOptions};

/// Numerical knobs shared by the checks.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckOptions {
    /// Mesh resolution for level-set quadrature.
    pub h: f64,
    /// Monte Carlo samples (volume, thin-shell or sphere).
    pub samples: usize,
    pub seed: u64,
    /// Thin-shell half-width where no mesher exists; defaults per domain.
    pub delta: Option<f64>,
    /// Analytic relative tolerance for checks with a stated accuracy.
    pub rel_tol: f64,
}

impl Default for CheckOptions {
    fn default() -> Self {
        Self {
            h: 0.01,
            samples: 1_000_000,
            seed: 0,
            delta: None,
            rel_tol: 0.02,
        }
    }
}

impl CheckOptions {
    pub fn radial(&self) -> RadialOptions {
        RadialOptions {
            h: self.h,
            center: None,
            delta: self.delta,
            samples: self.samples,
            seed: self.seed,
        }
    }
}

/// `∫_{Z_t ∩ domain} weight` by mesh (n = 2, 3) or thin shell.
#[derive(Clone, Copy, Debug, PartialEq)]
pub(crate) struct LevelIntegral {
    pub value: f64,
    pub error: f64,
    pub near_critical: bool,
}

pub(crate) fn level_integral<F: ScalarField + ?Sized>(
    field: &F,
    t: f64,
    domain: &Domain,
    weight: &dyn Integrand,
    opts: &CheckOptions,
) -> Result<LevelIntegral> {
    let n = domain.dim();
    if n == 2 || n == 3 {
        let a = weighted_area_estimate(field, t, domain, opts.h, weight)?;
        Ok(LevelIntegral {
            value: a.value,
            error: a.error,
            near_critical: a.near_critical > 0,
        })
    } else {
        let delta = opts.delta.unwrap_or_else(|| default_delta(domain));
        let s = thin_shell_detailed(field, t, weight, domain, delta, opts.samples, opts.seed)?;
        Ok(LevelIntegral {
            value: s.estimate.value,
            error: s.estimate.std_error,
            near_critical: s.near_critical(),
        })
    }
}
