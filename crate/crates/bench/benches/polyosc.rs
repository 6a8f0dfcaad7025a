use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use polyosc::coherent::bg_norm_sq;
use polyosc::fock::{build_finite_rep, build_truncated_rep};
use polyosc::measures::{bg_bessel_measure, frame_diagonal, perelomov_finite_measure};
use polyosc::quon::verify_passage_formulas;
use polyosc::{AlgebraSpec, Family, FrameFamily, GrassmannElement};

fn representations(c: &mut Criterion) {
    let mut group = c.benchmark_group("representation");
    for d in [4usize, 12, 32] {
        let finite = AlgebraSpec::finite(d, &[0.5], 0.3).unwrap();
        let infinite = AlgebraSpec::new(vec![0.5, 0.25], 0.3).unwrap();
        group.bench_with_input(BenchmarkId::new("finite", d), &finite, |b, s| b.iter(|| build_finite_rep(black_box(s)).unwrap()));
        group.bench_with_input(BenchmarkId::new("truncated", d), &infinite, |b, s| {
            b.iter(|| build_truncated_rep(black_box(s), d).unwrap())
        });
    }
    group.finish();
}

fn passage(c: &mut Criterion) {
    let mut group = c.benchmark_group("passage");
    for k in [3usize, 8] {
        let spec = AlgebraSpec::finite(k, &[0.5, 1.0], 0.2).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(k), &spec, |b, s| {
            b.iter(|| verify_passage_formulas(black_box(s), 1e-10).unwrap())
        });
    }
    group.finish();
}

fn grassmann(c: &mut Criterion) {
    let mut group = c.benchmark_group("grassmann_multiply");
    for k in [2usize, 5, 8] {
        let dense = |shift: f64| {
            GrassmannElement::from_terms(
                k,
                (0..k).flat_map(|a| (0..k).map(move |b| (a, b, Complex64::new(1.0 + a as f64, shift - b as f64)))),
            )
        };
        let (x, y) = (dense(0.5), dense(-0.25));
        group.bench_function(BenchmarkId::from_parameter(k), |b| b.iter(|| black_box(&x) * black_box(&y)));
    }
    group.finish();
}

fn bg_series(c: &mut Criterion) {
    let spec = AlgebraSpec::from_ells(&[2, 3], 0.0).unwrap();
    c.bench_function("bg_norm_series", |b| b.iter(|| bg_norm_sq(&spec, black_box(Complex64::new(3.0, 1.0)), 500).unwrap()));
}

fn frames(c: &mut Criterion) {
    let mut group = c.benchmark_group("frame_diagonal");
    group.sample_size(20);
    let finite = FrameFamily::new(Family::Perelomov, AlgebraSpec::finite(6, &[], 0.0).unwrap()).unwrap();
    let finite_measure = perelomov_finite_measure(6).unwrap();
    group.bench_function("perelomov_finite_d6", |b| b.iter(|| frame_diagonal(&finite, &finite_measure, black_box(3), 1e-9).unwrap()));
    let bg = FrameFamily::new(Family::BarutGirardello, AlgebraSpec::from_ells(&[3], 0.0).unwrap()).unwrap();
    let bessel = bg_bessel_measure(3).unwrap();
    group.bench_function("bg_bessel_l3", |b| b.iter(|| frame_diagonal(&bg, &bessel, black_box(5), 1e-9).unwrap()));
    group.finish();
}

criterion_group!(benches, representations, passage, grassmann, bg_series, frames);
criterion_main!(benches);
