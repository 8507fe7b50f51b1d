use std::hint::black_box;

use cfmimo::precode::Evaluator;
use cfmimo::scenario::draw_realization;
use cfmimo::search::search;
use cfmimo::{BeamAssignment, NetworkConfig, PrecoderKind, SearchSettings};
use cfmimo_bench::Fixture;
use criterion::{criterion_group, criterion_main, Criterion};

fn searches(c: &mut Criterion) {
    let mut g = c.benchmark_group("search_L3K2M8");
    let fx = Fixture::new(3, 2, 8);
    for s in [
        SearchSettings::disjoint(),
        SearchSettings::linear(2, 2),
        SearchSettings::semilinear(2, 2),
        SearchSettings::linear_iis(2, 2),
    ] {
        g.bench_function(s.label(), |b| b.iter(|| search(black_box(&fx.problem()), &s).unwrap()));
    }
    g.finish();

    let fx = Fixture::new(2, 2, 4);
    c.bench_function("exhaustive_L2K2M4", |b| {
        b.iter(|| search(black_box(&fx.problem()), &SearchSettings::exhaustive()).unwrap())
    });
}

fn evaluation(c: &mut Criterion) {
    let fx = Fixture::new(4, 4, 8);
    let eval = Evaluator::new(&fx.realization, &fx.codebook, fx.config.p_t_watts(), PrecoderKind::Zf, true, None).unwrap();
    let a = BeamAssignment::repeated(4, &[0, 2, 4, 6]);
    c.bench_function("design_ap_K4", |b| b.iter(|| eval.design(0, black_box(a.ap_beams(0)))));
    c.bench_function("report_L4K4", |b| b.iter(|| eval.report(black_box(&a))));
    let cfg = NetworkConfig::reference(4, 4, 8);
    c.bench_function("draw_realization_L4K4M8", |b| b.iter(|| draw_realization(black_box(&cfg), 7).unwrap()));
}

criterion_group!(benches, searches, evaluation);
criterion_main!(benches);
