use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use pwlmilp::biclique::{cover_bicliques, CoverStrategy, ExactOptions, Graph};
use pwlmilp::fitting::{fit, FitConfig, TargetFunction};
use pwlmilp::milp::{build_gib, lp_string};
use pwlmilp::pipeline::{analyze, run_pipeline, PipelineOptions};
use pwlmilp_bench::{hpf_grid, planar};

fn fitting(c: &mut Criterion) {
    let f = TargetFunction::by_name("f1").unwrap();
    let cfg = FitConfig { eps: 0.2, seed: 1, ..Default::default() };
    let mut g = c.benchmark_group("fit");
    g.sample_size(10);
    g.bench_function("f1_eps0.2", |b| b.iter(|| fit(black_box(&f), &cfg).unwrap()));
    g.finish();
}

fn conflicts(c: &mut Criterion) {
    let mut g = c.benchmark_group("conflicts");
    for n in [20, 80] {
        let p = planar(n);
        g.bench_with_input(BenchmarkId::from_parameter(n), &p, |b, p| {
            b.iter(|| analyze(p, u128::MAX).unwrap())
        });
    }
    g.finish();
}

fn cover(c: &mut Criterion) {
    let p = planar(10);
    let graph = Graph::from_conflicts(&analyze(&p, u128::MAX).unwrap());
    let opts = ExactOptions::default();
    c.bench_function("cover_exact_small", |b| {
        b.iter(|| cover_bicliques(black_box(&graph), CoverStrategy::Exact, 0, opts).unwrap())
    });
    let p = planar(30);
    let graph = Graph::from_conflicts(&analyze(&p, u128::MAX).unwrap());
    let mut g = c.benchmark_group("cover_geom");
    g.sample_size(10);
    g.bench_function("30", |b| {
        b.iter(|| {
            let s = CoverStrategy::GeomThenExact { mesh: &p, k: 3, n_lines: 200 };
            cover_bicliques(black_box(&graph), s, 0, opts).unwrap()
        })
    });
    g.finish();
}

fn formulation(c: &mut Criterion) {
    let out = run_pipeline(&hpf_grid(8), &PipelineOptions::default()).unwrap();
    let model = build_gib(&out.spec).unwrap();
    c.bench_function("gib_build", |b| b.iter(|| build_gib(black_box(&out.spec)).unwrap()));
    c.bench_function("lp_write", |b| b.iter(|| lp_string(black_box(&model))));
}

criterion_group!(benches, fitting, conflicts, cover, formulation);
criterion_main!(benches);
