use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use eigenlevel::harmonics::random_solid_harmonic;
use eigenlevel::levelset::{extract, radial_profile, thin_shell, GradientNorm, RadialOptions};
use eigenlevel::presets::preset;

fn extraction(c: &mut Criterion) {
    let mut group = c.benchmark_group("extract");
    group.sample_size(10);
    for name in ["torus-mix", "p=x3"] {
        let p = preset(name).unwrap();
        let h = if p.domain.dim() == 3 { 0.04 } else { 0.005 };
        group.bench_with_input(BenchmarkId::from_parameter(name), &p, |b, p| {
            b.iter(|| extract(&p.field, black_box(0.3), &p.domain, h).unwrap().total_area())
        });
    }
    group.finish();
}

fn radial(c: &mut Criterion) {
    let q = random_solid_harmonic(3, 3, 7).unwrap();
    let radii: Vec<f64> = (1..=10).map(|j| 0.1 * j as f64).collect();
    let opts = RadialOptions {
        h: 0.05,
        ..RadialOptions::default()
    };
    let mut group = c.benchmark_group("radial_profile");
    group.sample_size(10);
    group.bench_function("n3-k3", |b| {
        b.iter(|| radial_profile(q.field(), black_box(0.0), &GradientNorm, &radii, &opts).unwrap())
    });
    group.finish();
}

fn shell(c: &mut Criterion) {
    let p = preset("torus-sin").unwrap();
    c.bench_function("thin_shell/torus-sin-1e5", |b| {
        b.iter(|| thin_shell(&p.field, black_box(0.5), &GradientNorm, &p.domain, 1e-3, 100_000, 1).unwrap())
    });
}

fn polynomial_eval(c: &mut Criterion) {
    let mut group = c.benchmark_group("polynomial_eval");
    for k in [2u32, 5, 8] {
        let compiled = random_solid_harmonic(3, k, 1).unwrap().polynomial().compile();
        let x = [0.3, -0.7, 0.5];
        group.bench_with_input(BenchmarkId::from_parameter(k), &compiled, |b, p| {
            b.iter(|| p.eval(black_box(&x)))
        });
    }
    group.finish();
}

criterion_group!(benches, extraction, radial, shell, polynomial_eval);
criterion_main!(benches);
