use eigenlevel::analysis::{
    corollary_unimodality, curvature_identity_check, divergence_identity_check, explore_general_monotonicity,
    levelset_derivative_check, monotonicity_check, radial_derivative_identity, robin_identity_check,
    spherical_monotonicity, unimodality_check, value_distribution_density, CheckOptions, DensityEstimate,
    IdentityReport, Measure, MonotonicityReport, Rho, Table, UnimodalityReport,
};
use eigenlevel::{ScalarField, SolidHarmonic};
use serde::Serialize;

use crate::config::{CliError, CliResult, GridSpec, Knobs, RunConfig, Target};
use crate::output::{ReportWriter, Written};
use crate::plot::{Chart, Series};

/// Step of the central difference in `deriv`.
pub const DERIV_STEP: f64 = 0.01;

/// Result of one report: `pass` is `None` for reports without a verdict.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub name: String,
    pub pass: Option<bool>,
    pub written: Written,
}

fn solid_harmonic(target: &Target) -> CliResult<SolidHarmonic> {
    let poly = target
        .field
        .as_polynomial()
        .ok_or_else(|| CliError::Config("this command needs a polynomial field".into()))?;
    Ok(SolidHarmonic::try_from(poly)?)
}

fn options(config: &mut RunConfig, knobs: &Knobs, h: f64, samples: usize, rel_tol: f64) -> CheckOptions {
    let opts = CheckOptions {
        h: knobs.h.unwrap_or(h),
        samples: knobs.n.unwrap_or(samples),
        seed: knobs.seed(),
        delta: knobs.delta,
        rel_tol,
    };
    config.h = Some(opts.h);
    config.samples = Some(opts.samples);
    config.delta = opts.delta;
    config.rel_tol = Some(rel_tol);
    opts
}

fn identity_table(r: &IdentityReport) -> Table {
    if !r.table.is_empty() {
        return r.table.clone();
    }
    let mut t = Table::new(&[
        "left",
        "left_error",
        "right",
        "right_error",
        "discrepancy",
        "tolerance",
        "pass",
    ]);
    t.push(vec![
        r.left,
        r.left_error,
        r.right,
        r.right_error,
        r.discrepancy,
        r.tolerance,
        if r.pass { 1.0 } else { 0.0 },
    ]);
    t
}

fn monotone_chart(r: &MonotonicityReport, x_label: &str, y_label: &str) -> Chart {
    Chart {
        title: r.name.clone(),
        x_label: x_label.into(),
        y_label: y_label.into(),
        series: vec![Series::new(y_label, &r.grid, &r.values, Some(&r.errors))],
    }
}

fn finish<R: Serialize>(
    w: &ReportWriter,
    stem: &str,
    config: &RunConfig,
    pass: Option<bool>,
    report: &R,
    table: Option<&Table>,
    chart: Option<&Chart>,
) -> CliResult<Outcome> {
    let written = w.write(stem, config, pass, report, table, chart)?;
    Ok(Outcome {
        name: stem.to_string(),
        pass,
        written,
    })
}

fn density_table(d: &DensityEstimate) -> Table {
    let mut t = Table::new(&["t_lo", "t_hi", "t", "density", "std_error", "psi", "psi_error"]);
    for b in 0..d.bins() {
        t.push(vec![
            d.edges[b],
            d.edges[b + 1],
            d.centers[b],
            d.density[b],
            d.std_error[b],
            d.psi[b],
            d.psi_error[b],
        ]);
    }
    t
}

fn density_chart(d: &DensityEstimate, title: &str) -> Chart {
    Chart {
        title: format!("{title}: {} density", d.measure.as_str()),
        x_label: "t".into(),
        y_label: "normalized density".into(),
        series: vec![Series::new(
            d.measure.as_str(),
            &d.centers,
            &d.density,
            Some(&d.std_error),
        )],
    }
}

fn estimate_density(config: &mut RunConfig, target: &Target, knobs: &Knobs) -> CliResult<DensityEstimate> {
    let measure = knobs.measure.unwrap_or(Measure::Mu);
    let bins = knobs.bins.unwrap_or(64);
    let samples = knobs.n.unwrap_or(1_000_000);
    config.measure = Some(measure);
    config.bins = Some(bins);
    config.samples = Some(samples);
    Ok(value_distribution_density(
        &target.field,
        measure,
        &target.domain,
        bins,
        samples,
        knobs.seed(),
        None,
    )?)
}

fn label(target: &Target) -> String {
    target.preset.clone().unwrap_or_else(|| "field".into())
}

pub fn density(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let mut config = RunConfig::new("density", target, knobs);
    let d = estimate_density(&mut config, target, knobs)?;
    let chart = density_chart(&d, &label(target));
    finish(w, stem, &config, None, &d, Some(&density_table(&d)), Some(&chart))
}

#[derive(Serialize)]
struct UnimodalOutput<'a> {
    unimodality: &'a UnimodalityReport,
    density: &'a DensityEstimate,
}

pub fn unimodal(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let mut config = RunConfig::new("unimodal", target, knobs);
    let d = estimate_density(&mut config, target, knobs)?;
    let u = unimodality_check(&d);
    let chart = density_chart(&d, &label(target));
    let report = UnimodalOutput {
        unimodality: &u,
        density: &d,
    };
    finish(
        w,
        stem,
        &config,
        Some(u.pass),
        &report,
        Some(&density_table(&d)),
        Some(&chart),
    )
}

pub fn curvature(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let mut config = RunConfig::new("curvature", target, knobs);
    let samples = knobs.n.unwrap_or(1000);
    config.samples = Some(samples);
    let r = curvature_identity_check(&target.field, &target.domain, samples, knobs.seed())?;
    finish(w, stem, &config, Some(r.pass), &r, Some(&identity_table(&r)), None)
}

pub fn divergence(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let mut config = RunConfig::new("divergence", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, CheckOptions::default().rel_tol);
    let (t1, t2) = (knobs.t1.unwrap_or(0.0), knobs.t2.unwrap_or(0.5));
    config.t1 = Some(t1);
    config.t2 = Some(t2);
    let r = divergence_identity_check(&target.field, t1, t2, &target.domain, &opts)?;
    finish(w, stem, &config, Some(r.pass), &r, Some(&identity_table(&r)), None)
}

pub fn deriv(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let mut config = RunConfig::new("deriv", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, CheckOptions::default().rel_tol);
    let t = knobs.t.unwrap_or(0.5);
    config.t = Some(t);
    config.step = Some(DERIV_STEP);
    let r = levelset_derivative_check(&target.field, Rho::GradientNorm, t, DERIV_STEP, &target.domain, &opts)?;
    finish(w, stem, &config, Some(r.pass), &r, Some(&identity_table(&r)), None)
}

pub fn prop51(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let p = solid_harmonic(target)?;
    let mut config = RunConfig::new("prop51", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, 0.03);
    let t0 = knobs.t.unwrap_or(0.5);
    let grid = knobs.rgrid.unwrap_or(GridSpec::new(0.7, 1.5, 0.01));
    config.t = Some(t0);
    config.rgrid = Some(grid);
    config.step = Some(grid.step);
    let radii = grid.points();
    if t0 == 0.0 {
        // The weight 1/(|x|²|∇P|) is only defined for t₀ ≠ 0; at the nodal
        // level the identity reduces to constancy of the normalized profile.
        let r = monotonicity_check(&p, 0.0, &radii, &opts)?.note("t0 = 0: constancy check");
        let chart = monotone_chart(&r, "r", "F(r)");
        return finish(w, stem, &config, Some(r.pass), &r, Some(&r.table()), Some(&chart));
    }
    let r = radial_derivative_identity(&p, t0, &radii, grid.step, &opts)?;
    let col = |name: &str| r.table.columns.iter().position(|c| c == name);
    let chart = match (col("r"), col("dG_dr"), col("rhs")) {
        (Some(cr), Some(cg), Some(cs)) => {
            let x: Vec<f64> = r.table.rows.iter().map(|row| row[cr]).collect();
            let g: Vec<f64> = r.table.rows.iter().map(|row| row[cg]).collect();
            let s: Vec<f64> = r.table.rows.iter().map(|row| row[cs]).collect();
            Some(Chart {
                title: format!("radial derivative identity, t0 = {t0}"),
                x_label: "r".into(),
                y_label: "value".into(),
                series: vec![
                    Series::new("dG/dr", &x, &g, None),
                    Series::new("(n+k-2) I/r", &x, &s, None),
                ],
            })
        }
        _ => None,
    };
    finish(w, stem, &config, Some(r.pass), &r, Some(&r.table), chart.as_ref())
}

pub fn monotone(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let p = solid_harmonic(target)?;
    let mut config = RunConfig::new("monotone", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, CheckOptions::default().rel_tol);
    let t = knobs.t.unwrap_or(0.5);
    let grid = knobs.rgrid.unwrap_or(GridSpec::new(0.6, 1.6, 0.05));
    config.t = Some(t);
    config.rgrid = Some(grid);
    let r = monotonicity_check(&p, t, &grid.points(), &opts)?;
    let chart = monotone_chart(&r, "r", "F(r)");
    finish(w, stem, &config, Some(r.pass), &r, Some(&r.table()), Some(&chart))
}

pub fn corollary(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let p = solid_harmonic(target)?;
    let mut config = RunConfig::new("corollary", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, CheckOptions::default().rel_tol);
    let grid = knobs.egrid.unwrap_or(GridSpec::new(-0.95, 0.95, 0.05));
    config.egrid = Some(grid);
    let r = corollary_unimodality(&p, &grid.points(), &opts)?;
    let mut table = Table::new(&["t", "psi", "psi_error"]);
    for ((t, v), e) in r.levels.iter().zip(&r.psi).zip(&r.psi_error) {
        table.push(vec![*t, *v, *e]);
    }
    let chart = Chart {
        title: "psi(t) on the unit ball".into(),
        x_label: "t".into(),
        y_label: "psi".into(),
        series: vec![Series::new("psi", &r.levels, &r.psi, Some(&r.psi_error))],
    };
    finish(w, stem, &config, Some(r.pass), &r, Some(&table), Some(&chart))
}

pub fn sphere(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let p = solid_harmonic(target)?;
    let mut config = RunConfig::new("sphere", target, knobs);
    let nodes = knobs.n.unwrap_or(1_000_000);
    let grid = knobs.egrid.unwrap_or(GridSpec::new(0.1, 0.9, 0.1));
    config.samples = Some(nodes);
    config.egrid = Some(grid);
    let r = spherical_monotonicity(&p, &grid.points(), nodes, knobs.seed())?;
    let chart = monotone_chart(&r, "epsilon", "functional");
    finish(w, stem, &config, Some(r.pass), &r, Some(&r.table()), Some(&chart))
}

pub fn robin(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let p = solid_harmonic(target)?;
    let mut config = RunConfig::new("robin", target, knobs);
    let opts = options(&mut config, knobs, 0.01, 1_000_000, 0.01);
    let (t1, t2) = (knobs.t1.unwrap_or(0.2), knobs.t2.unwrap_or(0.4));
    config.t1 = Some(t1);
    config.t2 = Some(t2);
    let r = robin_identity_check(&p, t1, t2, &opts)?;
    finish(w, stem, &config, Some(r.pass), &r, Some(&identity_table(&r)), None)
}

/// Candidate exponents besides the two always included by the sweep.
const EXPLORE_EXPONENTS: [f64; 5] = [0.0, 1.0, 2.0, 3.0, 4.0];

pub fn explore(stem: &str, target: &Target, knobs: &Knobs, w: &ReportWriter) -> CliResult<Outcome> {
    let f = target
        .field
        .as_polynomial()
        .ok_or_else(|| CliError::Config("explore needs a polynomial field".into()))?;
    let mut config = RunConfig::new("explore", target, knobs);
    let opts = options(&mut config, knobs, 0.005, 1_000_000, CheckOptions::default().rel_tol);
    let grid = knobs.rgrid.unwrap_or(GridSpec::new(0.1, 1.0, 0.05));
    config.rgrid = Some(grid);
    let center = vec![0.0; f.dim()];
    let r = explore_general_monotonicity(f, &center, &grid.points(), &EXPLORE_EXPONENTS, &opts)?;
    let mut columns = vec!["r".to_string(), "I".to_string(), "I_error".to_string()];
    columns.extend(r.rows.iter().map(|row| format!("e={}", row.exponent)));
    let column_refs: Vec<&str> = columns.iter().map(String::as_str).collect();
    let mut table = Table::new(&column_refs);
    for (j, &radius) in r.radii.iter().enumerate() {
        let mut row = vec![radius, r.profile[j], r.profile_error[j]];
        row.extend(r.rows.iter().map(|e| e.values[j]));
        table.push(row);
    }
    let chart = Chart {
        title: "normalized nodal measure, r^-e I(r)".into(),
        x_label: "r".into(),
        y_label: "r^-e I(r)".into(),
        series: r
            .rows
            .iter()
            .map(|row| Series::new(&format!("e = {}", row.exponent), &r.radii, &row.values, None))
            .collect(),
    };
    finish(w, stem, &config, None, &r, Some(&table), Some(&chart))
}
