use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use twistlab_core::analysis::{fake_line_partner, AnalysisConfig};
use twistlab_core::classifier::classify_with;
use twistlab_core::conics::{family_sweep, SamplerConfig, SweepConfig, TouchConfig};
use twistlab_core::poly::has_two_double_roots;
use twistlab_core::surface::{find_valid_params, SearchConfig, ValidationConfig};
use twistlab_core::{HAtlas, Surface};

fn surface() -> Surface {
    let p = find_valid_params(&SearchConfig::default()).expect("default search succeeds");
    Surface::new(p, &ValidationConfig::default()).expect("search result validates")
}

fn admissibility(c: &mut Criterion) {
    let search = SearchConfig::default();
    c.bench_function("find_valid_params", |b| {
        b.iter(|| find_valid_params(black_box(&search)))
    });
    c.bench_function("has_two_double_roots", |b| {
        b.iter(|| {
            has_two_double_roots(
                black_box(-6.0),
                black_box(13.0),
                black_box(-12.0),
                black_box(4.0),
                1e-9,
            )
        })
    });
}

fn analysis(c: &mut Criterion) {
    let s = surface();
    let cfg = AnalysisConfig::default();
    c.bench_function("atlas_build", |b| {
        b.iter(|| HAtlas::build(black_box(&s), &cfg))
    });
    let atlas = HAtlas::build(&s, &cfg).expect("atlas builds");
    c.bench_function("classify", |b| {
        b.iter(|| classify_with(black_box(&s), &atlas, &cfg))
    });
    c.bench_function("fake_line_partner", |b| {
        b.iter(|| fake_line_partner(black_box(&s), -0.8, &cfg.scan))
    });
}

fn conics(c: &mut Criterion) {
    let s = surface();
    let sweep = SweepConfig {
        lambda_samples: 2,
        theta_samples: 4,
        ..SweepConfig::default()
    };
    let mut group = c.benchmark_group("conics");
    group.sample_size(10);
    group.bench_function("family_sweep_2x4", |b| {
        b.iter(|| {
            family_sweep(
                black_box(&s),
                &sweep,
                &TouchConfig::default(),
                &SamplerConfig::default(),
            )
        })
    });
    group.finish();
}

criterion_group!(benches, admissibility, analysis, conics);
criterion_main!(benches);
