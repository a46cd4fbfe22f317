use chyp_bench::fixture;
use chyp_core::conngeo::holonomy_equals_phi_n;
use chyp_core::ktensor::{build_s, build_s_oracle, project};
use chyp_core::linalg::RANK_TOL;
use chyp_core::matlie::bracket_table;
use chyp_core::{cross_validate, Tolerances};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

const NS: [usize; 3] = [2, 4, 6];

fn brackets(c: &mut Criterion) {
    let mut g = c.benchmark_group("bracket_table");
    for n in NS {
        g.bench_with_input(BenchmarkId::from_parameter(n), &n, |b, &n| b.iter(|| bracket_table(black_box(n))));
    }
    g.finish();
}

fn curvature(c: &mut Criterion) {
    let mut g = c.benchmark_group("curvature");
    for n in NS {
        let conn = fixture(n, 11);
        g.bench_with_input(BenchmarkId::new("closed_form", n), &conn, |b, conn| b.iter(|| conn.curvature()));
        g.bench_with_input(BenchmarkId::new("oracle", n), &conn, |b, conn| b.iter(|| conn.curvature_oracle()));
        g.bench_with_input(BenchmarkId::new("holonomy_span", n), &conn, |b, conn| {
            b.iter(|| holonomy_equals_phi_n(conn, RANK_TOL))
        });
    }
    g.finish();
}

fn tensor(c: &mut Criterion) {
    let mut g = c.benchmark_group("tensor");
    for n in NS {
        let conn = fixture(n, 12);
        let s = build_s(&conn);
        g.bench_with_input(BenchmarkId::new("build_s", n), &conn, |b, conn| b.iter(|| build_s(conn)));
        g.bench_with_input(BenchmarkId::new("build_s_oracle", n), &conn, |b, conn| b.iter(|| build_s_oracle(conn)));
        g.bench_with_input(BenchmarkId::new("project", n), &s, |b, s| b.iter(|| project(s)));
    }
    g.finish();
}

fn classify(c: &mut Criterion) {
    let tol = Tolerances::default();
    let mut g = c.benchmark_group("cross_validate");
    g.sample_size(20);
    for n in NS {
        let conn = fixture(n, 13);
        g.bench_with_input(BenchmarkId::from_parameter(n), &conn, |b, conn| b.iter(|| cross_validate(conn, &tol)));
    }
    g.finish();
}

criterion_group!(benches, brackets, curvature, tensor, classify);
criterion_main!(benches);
