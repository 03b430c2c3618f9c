//! The full battery over the shipped presets and seeded random harmonics.
//!
//! Parameters are fixed here; only `--seed`, `--out`, `--plot` and
//! `--workers` apply.

use eigenlevel::analysis::{quadrature_cross_check, CheckOptions, Measure};
use eigenlevel::harmonics::{random_solid_harmonic, sphere_max_abs};
use eigenlevel::presets::{preset, PRESET_NAMES};
use eigenlevel::{Domain, Field};
use serde::Serialize;

use crate::commands::{self, Outcome};
use crate::config::{CliResult, GridSpec, Knobs, RunConfig, Target};
use crate::output::ReportWriter;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
enum Expect {
    /// The check must pass.
    Pass,
    /// Detector sanity: the check must fail.
    Fail,
    /// Exploratory output without a verdict.
    None,
}

#[derive(Serialize)]
struct Entry {
    name: String,
    expect: Expect,
    pass: Option<bool>,
    ok: bool,
    report: String,
}

#[derive(Clone, Debug, Serialize)]
struct SuiteConfig {
    command: &'static str,
    seed: u64,
    plot: bool,
    version: &'static str,
}

#[derive(Serialize)]
struct Summary<'a> {
    config_hash: String,
    config: &'a SuiteConfig,
    pass: bool,
    entries: &'a [Entry],
}

/// Fractions of `max |P|` on the unit sphere used as levels for random
/// harmonics.
const LEVEL_FRACTIONS: [f64; 5] = [0.0, 0.3, -0.3, 0.7, -0.7];

type Command = fn(&str, &Target, &Knobs, &ReportWriter) -> CliResult<Outcome>;

struct Runner<'a> {
    base: &'a Knobs,
    writer: &'a ReportWriter,
    entries: Vec<Entry>,
}

fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' { c } else { '-' })
        .collect()
}

fn preset_target(name: &str) -> CliResult<Target> {
    let p = preset(name)?;
    Ok(Target {
        preset: Some(p.name.to_string()),
        field: p.field,
        domain: p.domain,
    })
}

fn random_target(n: usize, k: u32, seed: u64) -> CliResult<(Target, f64)> {
    let q = random_solid_harmonic(n, k, seed)?;
    let max = sphere_max_abs(&q, 100_000, seed);
    let target = Target {
        preset: None,
        field: Field::from(q.field().clone()),
        domain: Domain::centered_ball(n, 1.0)?,
    };
    Ok((target, max))
}

impl Runner<'_> {
    fn knobs(&self, f: impl FnOnce(&mut Knobs)) -> Knobs {
        let mut k = Knobs {
            seed: self.base.seed,
            no_plot: self.base.no_plot,
            ..Knobs::default()
        };
        f(&mut k);
        k
    }

    fn record(&mut self, outcome: Outcome, expect: Expect) {
        let ok = match expect {
            Expect::Pass => outcome.pass == Some(true),
            Expect::Fail => outcome.pass == Some(false),
            Expect::None => true,
        };
        let verdict = if ok { "ok  " } else { "FAIL" };
        println!("{verdict} {}", outcome.name);
        let report = outcome
            .written
            .json
            .file_name()
            .map(|f| f.to_string_lossy().into_owned())
            .unwrap_or_default();
        self.entries.push(Entry {
            name: outcome.name,
            expect,
            pass: outcome.pass,
            ok,
            report,
        });
    }

    fn check(&mut self, name: &str, cmd: Command, target: &Target, knobs: Knobs, expect: Expect) -> CliResult<()> {
        let stem = file_stem(name);
        let outcome = cmd(&stem, target, &knobs, self.writer)?;
        self.record(outcome, expect);
        Ok(())
    }

    fn cross_check(&mut self, name: &str, target: &Target, t: f64, seed: u64) -> CliResult<()> {
        let knobs = self.knobs(|k| k.seed = Some(seed));
        let mut config = RunConfig::new("crosscheck", target, &knobs);
        let opts = CheckOptions {
            h: 0.005,
            samples: 4_000_000,
            seed,
            ..CheckOptions::default()
        };
        config.h = Some(opts.h);
        config.samples = Some(opts.samples);
        config.t = Some(t);
        let r = quadrature_cross_check(&target.field, t, &target.domain, &opts)?;
        let stem = file_stem(name);
        let written = self.writer.write(&stem, &config, Some(r.pass), &r, None, None)?;
        self.record(
            Outcome {
                name: stem,
                pass: Some(r.pass),
                written,
            },
            Expect::Pass,
        );
        Ok(())
    }
}

pub fn run(base: &Knobs, writer: &ReportWriter) -> CliResult<i32> {
    let seed = base.seed();
    let mut r = Runner {
        base,
        writer,
        entries: Vec::new(),
    };
    let torus = preset_target("torus-sin")?;
    let x3 = preset_target("p=x3")?;
    let saddle = preset_target("x2-y2")?;

    for measure in [Measure::Mu, Measure::Sigma] {
        let knobs = r.knobs(|k| {
            k.measure = Some(measure);
            k.n = Some(10_000_000);
            k.bins = Some(64);
        });
        let m = measure.as_str();
        r.check(
            &format!("density-{m}-torus-sin"),
            commands::density,
            &torus,
            knobs.clone(),
            Expect::None,
        )?;
        let expect = if measure == Measure::Mu {
            Expect::Pass
        } else {
            Expect::Fail
        };
        r.check(
            &format!("unimodal-{m}-torus-sin"),
            commands::unimodal,
            &torus,
            knobs,
            expect,
        )?;
    }

    for name in PRESET_NAMES {
        let target = preset_target(name)?;
        let knobs = r.knobs(|k| k.n = Some(1000));
        r.check(
            &format!("curvature-{name}"),
            commands::curvature,
            &target,
            knobs,
            Expect::Pass,
        )?;
    }

    for (name, t1, t2) in [
        ("torus-sin", 0.0, 0.5),
        ("box-neumann", 0.2, 0.6),
        ("box-dirichlet", 0.2, 0.6),
    ] {
        let target = preset_target(name)?;
        let knobs = r.knobs(|k| {
            k.t1 = Some(t1);
            k.t2 = Some(t2);
        });
        r.check(
            &format!("divergence-{name}"),
            commands::divergence,
            &target,
            knobs,
            Expect::Pass,
        )?;
    }
    let knobs = r.knobs(|k| k.t = Some(0.5));
    r.check("deriv-torus-sin", commands::deriv, &torus, knobs, Expect::Pass)?;

    let knobs = r.knobs(|k| {
        k.t = Some(0.5);
        k.rgrid = Some(GridSpec::new(0.6, 1.6, 0.05));
    });
    r.check("monotone-p=x3", commands::monotone, &x3, knobs, Expect::Pass)?;
    let knobs = r.knobs(|k| {
        k.t = Some(0.0);
        k.rgrid = Some(GridSpec::new(0.2, 1.0, 0.1));
    });
    r.check("monotone-x2-y2-t0", commands::monotone, &saddle, knobs, Expect::Pass)?;
    for i in 0..20u64 {
        let n = 2 + (i % 2) as usize;
        let k = 1 + ((i / 2) % 5) as u32;
        let (target, max) = random_target(n, k, seed + i)?;
        for (j, frac) in LEVEL_FRACTIONS.iter().enumerate() {
            let knobs = r.knobs(|kn| {
                kn.t = Some(frac * max);
                kn.h = Some(0.02);
                kn.rgrid = Some(GridSpec::new(0.5, 1.5, 0.1));
            });
            let name = format!("monotone-random-{i:02}-n{n}-k{k}-level{j}");
            r.check(&name, commands::monotone, &target, knobs, Expect::Pass)?;
        }
    }

    let knobs = r.knobs(|k| {
        k.t = Some(0.5);
        k.rgrid = Some(GridSpec::new(0.7, 1.5, 0.01));
    });
    r.check("prop51-p=x3", commands::prop51, &x3, knobs, Expect::Pass)?;
    let knobs = r.knobs(|k| {
        k.t = Some(0.3);
        k.rgrid = Some(GridSpec::new(0.8, 1.5, 0.01));
    });
    r.check("prop51-x2-y2", commands::prop51, &saddle, knobs, Expect::Pass)?;

    for (name, target) in [("p=x3", &x3), ("x2-y2", &saddle)] {
        let knobs = r.knobs(|k| k.egrid = Some(GridSpec::new(-0.95, 0.95, 0.05)));
        r.check(
            &format!("corollary-{name}"),
            commands::corollary,
            target,
            knobs,
            Expect::Pass,
        )?;
    }

    let knobs = r.knobs(|k| {
        k.n = Some(1_000_000);
        k.egrid = Some(GridSpec::new(0.1, 0.9, 0.1));
    });
    r.check("sphere-p=x3", commands::sphere, &x3, knobs, Expect::Pass)?;
    for i in 0..10u64 {
        let k = 1 + (i % 4) as u32;
        let (target, max) = random_target(3, k, seed + 100 + i)?;
        let knobs = r.knobs(|kn| {
            kn.n = Some(1_000_000);
            kn.seed = Some(seed + i);
            kn.egrid = Some(GridSpec::new(0.05 * max, 0.95 * max, 0.05 * max));
        });
        r.check(
            &format!("sphere-random-{i:02}-k{k}"),
            commands::sphere,
            &target,
            knobs,
            Expect::Pass,
        )?;
    }

    for (name, target, t1, t2) in [("p=x3", &x3, 0.2, 0.4), ("x2-y2", &saddle, 0.1, 0.5)] {
        let knobs = r.knobs(|k| {
            k.t1 = Some(t1);
            k.t2 = Some(t2);
        });
        r.check(&format!("robin-{name}"), commands::robin, target, knobs, Expect::Pass)?;
    }

    for i in 0..10u64 {
        let (target, scale, label) = match i % 5 {
            0..=2 => {
                let n = 2 + (i % 2) as usize;
                let k = 1 + (i % 4) as u32;
                let (target, max) = random_target(n, k, seed + 200 + i)?;
                (target, max, format!("harmonic-n{n}-k{k}"))
            }
            3 => (preset_target("torus-mix")?, 1.5, "torus-mix".to_string()),
            _ => (preset_target("box-dirichlet-21")?, 1.0, "box-dirichlet-21".to_string()),
        };
        let t = scale * 0.6 * (2.0 * ((i * 7 + 3) % 10) as f64 / 9.0 - 1.0);
        r.cross_check(&format!("crosscheck-{i:02}-{label}"), &target, t, seed + i)?;
    }

    let target = preset_target("saddle-mix")?;
    let knobs = r.knobs(|_| {});
    r.check("explore-saddle-mix", commands::explore, &target, knobs, Expect::None)?;

    let config = SuiteConfig {
        command: "suite",
        seed,
        plot: base.plot(),
        version: env!("CARGO_PKG_VERSION"),
    };
    let pass = r.entries.iter().all(|e| e.ok);
    let hash = {
        use sha2::{Digest, Sha256};
        hex::encode(Sha256::digest(serde_json::to_vec(&config).expect("config serializes")))
    };
    let summary = Summary {
        config_hash: hash,
        config: &config,
        pass,
        entries: &r.entries,
    };
    let path = writer.path("suite.json");
    let mut text = serde_json::to_string_pretty(&summary).expect("summary serializes");
    text.push('\n');
    writer.write_text(&path, &text)?;
    let failed: Vec<&Entry> = r.entries.iter().filter(|e| !e.ok).collect();
    for e in &failed {
        eprintln!("FAIL {}: see {}", e.name, writer.path(&e.report).display());
    }
    println!(
        "suite: {} of {} checks as expected; summary {}",
        r.entries.len() - failed.len(),
        r.entries.len(),
        path.display()
    );
    Ok(if pass { 0 } else { 1 })
}
