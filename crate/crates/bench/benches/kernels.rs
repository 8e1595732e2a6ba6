use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use weylbox::arc::prime_field_scan;
use weylbox::boxmean::{integrate_box, BoxSpec, QuadOptions, Scheme};
use weylbox::count::{count_j, CountOptions};
use weylbox::weyl::{weyl_sum, weyl_sum_fast};
use weylbox::TorusPoint;

fn weyl(c: &mut Criterion) {
    let x: [f64; 3] = [0.123456789, -0.000_012_345, 0.000_000_321];
    let pt = TorusPoint::new(x.iter().map(|v| v - v.floor()).collect()).unwrap();
    let mut g = c.benchmark_group("weyl_sum");
    for n in [1u64 << 12, 1 << 16] {
        g.bench_with_input(BenchmarkId::new("exact", n), &n, |b, &n| {
            b.iter(|| weyl_sum(black_box(&pt), None, n).unwrap())
        });
        g.bench_with_input(BenchmarkId::new("fast", n), &n, |b, &n| {
            b.iter(|| weyl_sum_fast(black_box(&x), n).unwrap())
        });
    }
    g.finish();
}

fn counting(c: &mut Criterion) {
    let opts = CountOptions::default();
    let mut g = c.benchmark_group("count_j");
    g.sample_size(10);
    for (s, d, n) in [(2u32, 2usize, 500u64), (3, 3, 32)] {
        g.bench_function(format!("s{s}_d{d}_N{n}"), |b| b.iter(|| count_j(s, d, n, &opts).unwrap()));
    }
    g.finish();
}

fn quadrature(c: &mut Criterion) {
    let mut g = c.benchmark_group("integrate_box");
    g.sample_size(10);
    let torus = BoxSpec::origin(2, 1.0).unwrap();
    g.bench_function("exact_torus_N12", |b| {
        b.iter(|| integrate_box(2.0, None, &torus, 12, &QuadOptions::with_mode(Scheme::ExactTorus, 1e-9)).unwrap())
    });
    let small = BoxSpec::new(TorusPoint::new(vec![0.1, 0.3]).unwrap(), 0.2).unwrap();
    g.bench_function("midpoint_N32", |b| {
        b.iter(|| integrate_box(2.0, None, &small, 32, &QuadOptions::default()).unwrap())
    });
    g.finish();
}

fn field(c: &mut Criterion) {
    let mut g = c.benchmark_group("prime_field_scan");
    g.sample_size(10);
    g.bench_function("d2_p499", |b| b.iter(|| prime_field_scan(2, 499, 1.0, None).unwrap()));
    g.finish();
}

criterion_group!(benches, weyl, counting, quadrature, field);
criterion_main!(benches);
