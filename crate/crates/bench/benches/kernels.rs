use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use curvature_bench::random_plane_cloud;
use curvature_core::four_point::{scan_finite, scan_sampled, FunctionalKind};
use curvature_core::infinitesimal::{estimate_liminf, NormalizedFunctional, ScaleSchedule};
use curvature_core::metric::MetricOracle;
use curvature_core::rng::derive_rng;
use curvature_core::spaces::{estimate_doubling_constant, make_oracle, SpaceSpec};

fn bench_exhaustive_scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan_finite");
    for n in [30usize, 60] {
        let space = random_plane_cloud(n, 7);
        for functional in [FunctionalKind::Quadrilateral, FunctionalKind::Ptolemy] {
            group.bench_with_input(
                BenchmarkId::new(format!("{functional:?}"), n),
                &space,
                |b, space| b.iter(|| scan_finite(space, functional, 1e-9)),
            );
        }
    }
    group.finish();
}

fn bench_hyperbolic_sampled_scan(c: &mut Criterion) {
    let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
    c.bench_function("scan_sampled/hyperbolic_lp_m60", |b| {
        b.iter(|| {
            let mut rng = derive_rng(3, "bench.scan", 0);
            scan_sampled(&oracle, 2.0, 60, FunctionalKind::LebedevaPetrunin, 1e-9, 200_000, &mut rng)
                .unwrap()
        })
    });
}

fn bench_liminf(c: &mut Criterion) {
    let oracle = make_oracle(&SpaceSpec::Tripod { edges: [1.0, 1.0, 1.0] }).unwrap();
    let schedule = ScaleSchedule::geometric(0.5, 0.5, 6, 24).unwrap();
    c.bench_function("liminf/tripod_a2", |b| {
        b.iter(|| {
            estimate_liminf(NormalizedFunctional::A2, &oracle, &schedule, 5, 1e-6, 200_000)
        })
    });
}

fn bench_distance_kernels(c: &mut Criterion) {
    let oracle = make_oracle(&SpaceSpec::HyperbolicPlane).unwrap();
    let mut rng = derive_rng(11, "bench.dist", 0);
    let pts: Vec<_> = (0..256).map(|_| oracle.sample_at_scale(3.0, &mut rng)).collect();
    c.bench_function("distance/hyperbolic_pairwise_256", |b| {
        b.iter(|| {
            let mut acc = 0.0;
            for a in &pts {
                for q in &pts {
                    acc += oracle.distance(a, q);
                }
            }
            acc
        })
    });
}

fn bench_doubling(c: &mut Criterion) {
    let oracle = make_oracle(&SpaceSpec::Snowflake { alpha: 0.5 }).unwrap();
    c.bench_function("doubling/snowflake_budget_4096", |b| {
        b.iter(|| {
            let mut rng = derive_rng(13, "bench.dbl", 0);
            estimate_doubling_constant(&oracle, 1.0, 4096, &mut rng).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_exhaustive_scans,
    bench_hyperbolic_sampled_scan,
    bench_liminf,
    bench_distance_kernels,
    bench_doubling
);
criterion_main!(benches);
