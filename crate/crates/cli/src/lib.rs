//! Front end for the `nodal` binary.
//!
//! [`run`] parses arguments, runs one report (or the whole suite) and
//! returns the process exit status: 0 when every requested check passes,
//! 1 when a check fails or is skipped, 2 on configuration errors.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
mod output;
mod plot;
mod suite;

use std::ffi::OsString;

use clap::{Parser, Subcommand};

use crate::config::{CliError, CliResult, Knobs, Target};
use crate::output::ReportWriter;

const PRESETS_HELP: &str = "Presets: torus-sin, torus-mix, p=x3, x2-y2, box-dirichlet, box-dirichlet-21, \
box-neumann, box-neumann-21, hermite-gaussian, radial, saddle-mix";

#[derive(Parser, Debug)]
#[command(
    name = "nodal",
    version,
    about = "Level-set functionals of Laplace eigenfunctions and harmonic polynomials",
    after_help = PRESETS_HELP
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    knobs: Knobs,
}

#[derive(Subcommand, Clone, Copy, Debug, PartialEq, Eq)]
enum Command {
    /// Value-distribution density (default preset torus-sin)
    Density,
    /// Density plus the unimodality check about t = 0
    Unimodal,
    /// H_rho = -lap f at random regular points
    Curvature,
    /// Flux between two levels against the volume integral of lap f
    Divergence,
    /// d/dt of the level-set integral of |grad f|
    Deriv,
    /// Radial derivative identity for a solid harmonic (t = 0: constancy)
    Prop51,
    /// Monotonicity of r^-(n+k-2) times the level-set integral in B(0, r)
    Monotone,
    /// psi(t) on the unit ball, monotone on each side of 0
    Corollary,
    /// Spherical functional, non-increasing in epsilon
    Sphere,
    /// Robin boundary identity between two same-sign levels
    Robin,
    /// Normalization sweep for non-homogeneous harmonic polynomials
    Explore,
    /// The full battery
    Suite,
}

type Handler = fn(&str, &Target, &Knobs, &ReportWriter) -> CliResult<commands::Outcome>;

impl Command {
    fn handler(self) -> Option<(&'static str, &'static str, Handler)> {
        Some(match self {
            Command::Density => ("density", "torus-sin", commands::density),
            Command::Unimodal => ("unimodal", "torus-sin", commands::unimodal),
            Command::Curvature => ("curvature", "torus-sin", commands::curvature),
            Command::Divergence => ("divergence", "torus-sin", commands::divergence),
            Command::Deriv => ("deriv", "torus-sin", commands::deriv),
            Command::Prop51 => ("prop51", "p=x3", commands::prop51),
            Command::Monotone => ("monotone", "p=x3", commands::monotone),
            Command::Corollary => ("corollary", "p=x3", commands::corollary),
            Command::Sphere => ("sphere", "p=x3", commands::sphere),
            Command::Robin => ("robin", "p=x3", commands::robin),
            Command::Explore => ("explore", "saddle-mix", commands::explore),
            Command::Suite => return None,
        })
    }
}

fn execute(command: Command, knobs: &Knobs) -> CliResult<i32> {
    let writer = ReportWriter::new(&knobs.out_dir(), knobs.plot())?;
    let Some((name, default_preset, handler)) = command.handler() else {
        return suite::run(knobs, &writer);
    };
    let target = Target::resolve(knobs, default_preset)?;
    let outcome = handler(name, &target, knobs, &writer)?;
    println!("wrote {}", outcome.written.json.display());
    if outcome.pass == Some(false) {
        eprintln!("FAIL {name}: see {}", outcome.written.json.display());
        return Ok(1);
    }
    Ok(0)
}

pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let mut builder = rayon::ThreadPoolBuilder::new();
    match cli.knobs.workers {
        Some(0) => {
            eprintln!("nodal: {}", CliError::Config("--workers must be positive".into()));
            return 2;
        }
        Some(w) => builder = builder.num_threads(w),
        None => {}
    }
    let pool = match builder.build() {
        Ok(pool) => pool,
        Err(e) => {
            eprintln!("nodal: {e}");
            return 2;
        }
    };
    match pool.install(|| execute(cli.command, &cli.knobs)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("nodal: {e}");
            2
        }
    }
}
