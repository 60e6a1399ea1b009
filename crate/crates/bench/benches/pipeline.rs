use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use punctus_core::{
    extract_ipi, fit_mle, fluctuation_surface, singularity_spectrum, tokenize, white_noise,
    MfdfaConfig, PunctuationConfig, WeibullParams,
};

const NOVEL: &str = include_str!("../../core/tests/fixtures/alice.txt");

fn corpus(c: &mut Criterion) {
    let config = PunctuationConfig::default();
    c.bench_function("tokenize_novel", |b| {
        b.iter(|| tokenize(black_box(NOVEL), &config))
    });
    let stream = tokenize(NOVEL, &config);
    c.bench_function("extract_ipi_novel", |b| {
        b.iter(|| extract_ipi(black_box(&stream), &config))
    });
}

fn weibull(c: &mut Criterion) {
    let sample = WeibullParams::new(0.2, 0.8)
        .unwrap()
        .sample(50_000, 1)
        .unwrap();
    c.bench_function("fit_mle_50k", |b| {
        b.iter(|| fit_mle(black_box(&sample)).unwrap())
    });
}

fn mfdfa(c: &mut Criterion) {
    let mut group = c.benchmark_group("mfdfa");
    group.sample_size(10);
    let config = MfdfaConfig::default();
    for exp in [12u32, 14, 16] {
        let x = white_noise(1 << exp, 3).unwrap();
        group.bench_function(format!("surface_2^{exp}"), |b| {
            b.iter_batched(
                || x.clone(),
                |x| fluctuation_surface(&x, &config).unwrap(),
                BatchSize::LargeInput,
            )
        });
    }
    let surface = fluctuation_surface(&white_noise(1 << 12, 3).unwrap(), &config).unwrap();
    group.bench_function("spectrum", |b| {
        b.iter(|| singularity_spectrum(black_box(&surface)).unwrap())
    });
    group.finish();
}

criterion_group!(benches, corpus, weibull, mfdfa);
criterion_main!(benches);
