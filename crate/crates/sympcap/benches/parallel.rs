//! Parallel against sequential execution for the three multistart drivers.
//!
//! Every driver takes an `Exec`, so the same workload runs on the rayon
//! pool and on the plain loop. With one hardware thread the two curves
//! should coincide up to dispatch overhead; with more threads the auto
//! backend should win on the wide workloads and tie on the narrow ones.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sympcap::bodies::{self, Body};
use sympcap::ehz::{self, ShootConfig};
use sympcap::jnorm::{self, NormJOptions};
use sympcap::lincap::{self, SearchConfig};
use sympcap::par::Exec;

const BACKENDS: [(&str, Exec); 2] = [("auto", Exec::Auto), ("sequential", Exec::Sequential)];

/// Product of a disc and a square: no closed form and no tractable polar
/// vertex list, so the norm falls through to the multistart ascent.
fn cylinder_like() -> Body {
    Body::product(
        bodies::ball(1),
        bodies::cube(1).scale(3.0).expect("positive scale"),
    )
    .expect("matching factors")
}

fn bench_norm_ascent(c: &mut Criterion) {
    let body = cylinder_like();
    let mut group = c.benchmark_group("norm_j_ascent_64_starts");
    for (name, exec) in BACKENDS {
        let opts = NormJOptions {
            starts: 64,
            exec,
            ..NormJOptions::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &opts, |b, opts| {
            b.iter(|| {
                jnorm::norm_j_with(std::hint::black_box(&body), opts)
                    .unwrap()
                    .value
            });
        });
    }
    group.finish();
}

fn bench_shooting(c: &mut Criterion) {
    let body = bodies::cube(2);
    let mut group = c.benchmark_group("ehz_shooting_8_starts");
    group.sample_size(10);
    for (name, exec) in BACKENDS {
        let cfg = ShootConfig {
            n_starts: 8,
            ode_tol: 1e-8,
            exec,
            ..ShootConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| {
                ehz::ehz_estimate(std::hint::black_box(&body), cfg)
                    .unwrap()
                    .value
            });
        });
    }
    group.finish();
}

fn bench_shadow_search(c: &mut Criterion) {
    let body = bodies::random_symmetric_vpolytope(2, 8, 42).expect("seeded body");
    let mut group = c.benchmark_group("minimize_shadow_8_restarts");
    group.sample_size(20);
    for (name, exec) in BACKENDS {
        let cfg = SearchConfig {
            restarts: 8,
            evals_per_restart: 400,
            exec,
            ..SearchConfig::default()
        };
        group.bench_with_input(BenchmarkId::from_parameter(name), &cfg, |b, cfg| {
            b.iter(|| {
                lincap::minimize_shadow(std::hint::black_box(&body), cfg)
                    .unwrap()
                    .value
            });
        });
    }
    group.finish();
}

criterion_group!(
    benches,
    bench_norm_ascent,
    bench_shooting,
    bench_shadow_search
);
criterion_main!(benches);
