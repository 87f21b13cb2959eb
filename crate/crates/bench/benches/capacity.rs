use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use hdnet_bench::{random, worst_case};
use hdnet_core::capacity::{
    dual_capacity, fd_capacity, fd_capacity_fast, fixed_schedule_rate, hd_capacity, hd_capacity_with, Arithmetic,
    SolveOptions,
};
use hdnet_core::model::generate::gen_random_rational;
use hdnet_core::Schedule;
use std::hint::black_box;

fn hd_lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("hd_capacity");
    g.sample_size(20);
    for n in [4, 6, 8, 10] {
        let wc = worst_case(n);
        g.bench_with_input(BenchmarkId::new("worst_case", n), &wc, |b, net| b.iter(|| hd_capacity(black_box(net))));
        let rnd = random(n, 1);
        g.bench_with_input(BenchmarkId::new("random", n), &rnd, |b, net| b.iter(|| hd_capacity(black_box(net))));
    }
    g.finish();
}

fn dual_lp(c: &mut Criterion) {
    let mut g = c.benchmark_group("dual_capacity");
    g.sample_size(20);
    for n in [4, 8] {
        let net = random(n, 2);
        g.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| b.iter(|| dual_capacity(black_box(net))));
    }
    g.finish();
}

fn rational_lp(c: &mut Criterion) {
    let opts = SolveOptions {
        arithmetic: Arithmetic::Rational,
        ..SolveOptions::default()
    };
    let mut g = c.benchmark_group("hd_capacity_rational");
    g.sample_size(10);
    for n in [2, 3, 4] {
        let net = gen_random_rational(n, 3, 8, 3).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &net, |b, net| {
            b.iter(|| hd_capacity_with(black_box(net), opts))
        });
    }
    g.finish();
}

fn cut_enumeration(c: &mut Criterion) {
    let net = random(12, 4);
    let sched = Schedule::uniform(12).unwrap();
    c.bench_function("fd_capacity/12", |b| b.iter(|| fd_capacity(black_box(&net))));
    c.bench_function("fd_capacity_fast/12", |b| b.iter(|| fd_capacity_fast(black_box(&net))));
    c.bench_function("fixed_schedule_rate/12", |b| b.iter(|| fixed_schedule_rate(black_box(&net), &sched)));
}

criterion_group!(benches, hd_lp, dual_lp, rational_lp, cut_enumeration);
criterion_main!(benches);
