use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use holv_bench::{dominant_tensor, m_system, qcp};
use holv_core::model::{find_equilibria, random_scenario, EquilibriumOptions, Scenario};
use holv_core::pcp::{brute_force_solve, EnumerationOptions};
use holv_core::poly::{solve_m_tensor, solve_s_tensor};
use holv_core::sim::{simulate, SimOptions};
use holv_core::SolveOptions;
use std::hint::black_box;

fn tvp(c: &mut Criterion) {
    let mut group = c.benchmark_group("tvp");
    for n in [4, 8, 16] {
        let t = dominant_tensor(3, n);
        let x = vec![0.5; n];
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| b.iter(|| t.tvp(black_box(&x)).unwrap()));
    }
    group.finish();
}

fn poly_solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("poly");
    for n in [2, 4, 8] {
        let system = m_system(n);
        let ones = vec![1.0; n];
        group.bench_with_input(BenchmarkId::new("s_tensor", n), &n, |b, _| {
            b.iter(|| solve_s_tensor(black_box(&system), Some(&ones), SolveOptions::default()).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("m_tensor", n), &n, |b, _| {
            b.iter(|| solve_m_tensor(black_box(&system), SolveOptions::default()).unwrap())
        });
    }
    group.finish();
}

fn enumeration(c: &mut Criterion) {
    let mut group = c.benchmark_group("qcp_enumeration");
    group.sample_size(10);
    for n in [2, 3, 4] {
        let problem = qcp(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, _| {
            b.iter(|| brute_force_solve(black_box(&problem), &EnumerationOptions::default()))
        });
    }
    group.finish();
}

fn model(c: &mut Criterion) {
    let mut group = c.benchmark_group("model");
    group.sample_size(10);
    let competitive = random_scenario(Scenario::Competitive, 3, 38).unwrap();
    let opts = SimOptions { conv_tol: 0.0, ..SimOptions::default() };
    group.bench_function("simulate_3", |b| {
        b.iter(|| simulate(&competitive, black_box(&[1.0, 2.0, 3.0]), 50.0, &opts).unwrap())
    });
    let cooperative = random_scenario(Scenario::Cooperative, 3, 5).unwrap();
    group.bench_function("find_equilibria_3", |b| {
        b.iter(|| find_equilibria(black_box(&cooperative), &EquilibriumOptions::default()))
    });
    group.finish();
}

criterion_group!(benches, tvp, poly_solvers, enumeration, model);
criterion_main!(benches);
