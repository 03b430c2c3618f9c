use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Args;
use eigenlevel::analysis::Measure;
use eigenlevel::fields::FieldSpec;
use eigenlevel::presets::preset;
use eigenlevel::{Domain, Field, ScalarField};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// A configuration or I/O problem; the process exits with status 2.
#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(PathBuf, std::io::Error),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(p, e) => write!(f, "{}: {e}", p.display()),
        }
    }
}

impl std::error::Error for CliError {}

impl From<eigenlevel::Error> for CliError {
    fn from(e: eigenlevel::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// An inclusive grid `lo, lo + step, …, hi`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub step: f64,
}

const MAX_GRID_POINTS: usize = 100_000;

impl GridSpec {
    pub fn new(lo: f64, hi: f64, step: f64) -> Self {
        Self { lo, hi, step }
    }

    pub fn points(&self) -> Vec<f64> {
        let count = ((self.hi - self.lo) / self.step + 1e-9).floor() as usize + 1;
        (0..count).map(|i| self.lo + i as f64 * self.step).collect()
    }
}

impl FromStr for GridSpec {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parts: Vec<&str> = s.split(':').collect();
        let [lo, hi, step] = parts.as_slice() else {
            return Err(format!("expected lo:hi:step, got {s:?}"));
        };
        let num = |v: &str| v.trim().parse::<f64>().map_err(|_| format!("{v:?} is not a number"));
        let g = GridSpec::new(num(lo)?, num(hi)?, num(step)?);
        if !(g.lo.is_finite() && g.hi.is_finite() && g.step.is_finite()) {
            return Err("grid bounds must be finite".into());
        }
        if !(g.step > 0.0) || g.hi < g.lo {
            return Err(format!("grid {s:?} needs step > 0 and hi >= lo"));
        }
        if (g.hi - g.lo) / g.step > MAX_GRID_POINTS as f64 {
            return Err(format!("grid {s:?} has more than {MAX_GRID_POINTS} points"));
        }
        Ok(g)
    }
}

/// Parses sample counts written as integers or in exponent form (`1e7`).
pub fn parse_count(s: &str) -> Result<usize, String> {
    if let Ok(n) = s.parse::<usize>() {
        return if n == 0 {
            Err("count must be positive".into())
        } else {
            Ok(n)
        };
    }
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a count"))?;
    if !(v >= 1.0) || v.fract() != 0.0 || v > 1e12 {
        return Err(format!("{s:?} must be a whole number between 1 and 1e12"));
    }
    Ok(v as usize)
}

/// Command-line knobs. Unset values fall back to per-command defaults.
#[derive(Args, Clone, Debug, Default)]
pub struct Knobs {
    /// Built-in field and domain (see `nodal --help` for names)
    #[arg(long, global = true)]
    pub preset: Option<String>,
    /// JSON field description, optionally `{"field": …, "domain": …}`
    #[arg(long, global = true, value_name = "PATH")]
    pub field: Option<PathBuf>,
    /// Measure for densities: sigma, mu or weighted
    #[arg(long, global = true)]
    pub measure: Option<Measure>,
    /// Monte Carlo samples or sphere nodes
    #[arg(long = "N", global = true, value_parser = parse_count)]
    pub n: Option<usize>,
    #[arg(long, global = true)]
    pub bins: Option<usize>,
    /// Mesh resolution
    #[arg(long, global = true)]
    pub h: Option<f64>,
    /// Thin-shell half-width
    #[arg(long, global = true)]
    pub delta: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t1: Option<f64>,
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub t2: Option<f64>,
    /// Radius grid lo:hi:step
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub rgrid: Option<GridSpec>,
    /// Sphere ε grid, or the level grid of `corollary`, lo:hi:step
    #[arg(long, global = true, allow_hyphen_values = true)]
    pub egrid: Option<GridSpec>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, overrides_with = "no_plot")]
    pub plot: bool,
    #[arg(long = "no-plot", global = true)]
    pub no_plot: bool,
    /// Worker threads (default: machine parallelism)
    #[arg(long, global = true)]
    pub workers: Option<usize>,
}

impl Knobs {
    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn plot(&self) -> bool {
        !self.no_plot
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("nodal-out"))
    }
}

/// The field under study and its domain.
#[derive(Clone, Debug)]
pub struct Target {
    pub preset: Option<String>,
    pub field: Field,
    pub domain: Domain,
}

#[derive(Deserialize)]
struct FieldFile {
    field: FieldSpec,
    domain: Option<Domain>,
}

fn default_domain(spec: &FieldSpec) -> CliResult<Domain> {
    Ok(match spec {
        FieldSpec::Torus { dim, .. } => Domain::torus(*dim),
        FieldSpec::Box { dim, .. } => Domain::unit_cube(*dim),
        FieldSpec::Weighted { base, .. } => default_domain(base)?,
        FieldSpec::Polynomial { dim, .. } | FieldSpec::Gaussian { dim } | FieldSpec::Constant { dim, .. } => {
            Domain::centered_ball(*dim, 1.0)?
        }
    })
}

fn read_field_file(path: &Path) -> CliResult<Target> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(path.to_path_buf(), e))?;
    let bad = |e: serde_json::Error| CliError::Config(format!("{}: {e}", path.display()));
    let value: serde_json::Value = serde_json::from_str(&text).map_err(bad)?;
    let (spec, domain) = if value.get("field").is_some() {
        let f: FieldFile = serde_json::from_value(value).map_err(bad)?;
        (f.field, f.domain)
    } else {
        (serde_json::from_value(value).map_err(bad)?, None)
    };
    let field = spec.build()?;
    let domain = match domain {
        Some(d) => d,
        None => default_domain(&spec)?,
    };
    Ok(Target {
        preset: None,
        field,
        domain,
    })
}

impl Target {
    pub fn resolve(knobs: &Knobs, default_preset: &str) -> CliResult<Self> {
        let target = match (&knobs.preset, &knobs.field) {
            (Some(_), Some(_)) => return Err(CliError::Config("--preset and --field are exclusive".into())),
            (None, Some(path)) => read_field_file(path)?,
            (name, None) => {
                let p = preset(name.as_deref().unwrap_or(default_preset))?;
                Target {
                    preset: Some(p.name.to_string()),
                    field: p.field,
                    domain: p.domain,
                }
            }
        };
        target.domain.validate()?;
        if target.field.dim() != target.domain.dim() {
            return Err(CliError::Config(format!(
                "field dimension {} does not match domain dimension {}",
                target.field.dim(),
                target.domain.dim()
            )));
        }
        Ok(target)
    }
}

/// Everything that determines the numbers in a report. Worker count and
/// output directory are excluded since they do not affect results.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub preset: Option<String>,
    pub field: FieldSpec,
    pub domain: Domain,
    pub measure: Option<Measure>,
    #[serde(rename = "N")]
    pub samples: Option<usize>,
    pub bins: Option<usize>,
    pub h: Option<f64>,
    pub delta: Option<f64>,
    pub t: Option<f64>,
    pub t1: Option<f64>,
    pub t2: Option<f64>,
    pub rgrid: Option<GridSpec>,
    pub egrid: Option<GridSpec>,
    /// Finite-difference step (`dt` for `deriv`, `Δr` for `prop51`).
    pub step: Option<f64>,
    pub rel_tol: Option<f64>,
    pub seed: u64,
    pub plot: bool,
    pub version: &'static str,
}

impl RunConfig {
    pub fn new(command: &str, target: &Target, knobs: &Knobs) -> Self {
        Self {
            command: command.to_string(),
            preset: target.preset.clone(),
            field: target.field.to_spec(),
            domain: target.domain.clone(),
            measure: None,
            samples: None,
            bins: None,
            h: None,
            delta: None,
            t: None,
            t1: None,
            t2: None,
            rgrid: None,
            egrid: None,
            step: None,
            rel_tol: None,
            seed: knobs.seed(),
            plot: knobs.plot(),
            version: env!("CARGO_PKG_VERSION"),
        }
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn hash(&self) -> String {
        let bytes = serde_json::to_vec(self).expect("config serializes");
        hex::encode(Sha256::digest(&bytes))
    }
}
