use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use lgfano_core::critical::{self, ProbeConfig};
use lgfano_core::hessian;
use lgfano_core::periods::{self, DEFAULT_TERM_CAP};
use lgfano_core::report::{self, RunConfig};
use lgfano_core::CiModel;

fn model(s: &str) -> CiModel {
    s.parse().unwrap()
}

fn bench_periods(c: &mut Criterion) {
    let mut g = c.benchmark_group("period_sequence");
    for (desc, order) in [("@3", 12), ("3@4", 12), ("2,3@5", 8)] {
        let m = model(desc);
        g.bench_with_input(BenchmarkId::new(desc, order), &order, |b, &order| {
            b.iter(|| periods::period_sequence(black_box(&m), order, DEFAULT_TERM_CAP).unwrap())
        });
    }
    g.finish();
}

fn bench_laurent_pow(c: &mut Criterion) {
    let f = model("2,2@5").build_givental();
    c.bench_function("laurent_pow/2,2@5^6", |b| b.iter(|| black_box(&f).pow(6)));
}

fn bench_probe(c: &mut Criterion) {
    let mut g = c.benchmark_group("probe_random");
    g.sample_size(10);
    for desc in ["2@3", "3@4"] {
        let m = model(desc);
        let cfg = ProbeConfig {
            trials: 20,
            ..ProbeConfig::default()
        };
        g.bench_function(desc, |b| b.iter(|| critical::probe_random(black_box(&m), &cfg)));
    }
    g.finish();
}

fn bench_chart(c: &mut Criterion) {
    let m = model("2,2@5");
    c.bench_function("chart_polynomial/2,2@5", |b| {
        b.iter(|| hessian::build_chart_polynomial(black_box(&m), 0).unwrap())
    });
}

fn bench_report(c: &mut Criterion) {
    let mut g = c.benchmark_group("run_report");
    g.sample_size(10);
    let cfg = RunConfig {
        probes: 20,
        period_order: 8,
        ..RunConfig::for_model("3@3")
    };
    g.bench_function("3@3", |b| b.iter(|| report::run_report(black_box(&cfg)).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_periods, bench_laurent_pow, bench_probe, bench_chart, bench_report);
criterion_main!(benches);
