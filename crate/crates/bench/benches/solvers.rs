use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use realgap_bench::{bp_instance, compiled_net, lasso_instance};
use realgap_core::bss::{run, DEFAULT_MAX_STEPS};
use realgap_core::invprob::{
    build_bernstein_l1, solve_bp, solve_bpa_branch_bound, solve_lasso2_homotopy, BernsteinApprox,
};
use realgap_core::number::Rational;

fn homotopy(c: &mut Criterion) {
    let mut group = c.benchmark_group("lasso2_homotopy");
    for n in [4usize, 8, 16] {
        let inst = lasso_instance(n / 2, n, 3);
        let lambda = inst.param.value().clone();
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_lasso2_homotopy(&inst.a, &inst.y, black_box(&lambda)).unwrap())
        });
    }
    group.finish();
}

fn basis_pursuit(c: &mut Criterion) {
    let mut group = c.benchmark_group("bp_exact");
    for n in [4usize, 8, 16] {
        let inst = bp_instance(n / 2, n, 5);
        let eps = inst.param.value().clone();
        group.bench_with_input(BenchmarkId::from_parameter(n), &inst, |b, inst| {
            b.iter(|| solve_bp(&inst.a, &inst.y, black_box(&eps)).unwrap())
        });
    }
    group.finish();
}

fn bernstein(c: &mut Criterion) {
    let mut group = c.benchmark_group("bernstein");
    let t = Rational::frac(1, 3);
    for degree in [64u64, 1024, 16384] {
        let p = BernsteinApprox::with_degree(1, &Rational::one(), degree).unwrap();
        group.bench_with_input(BenchmarkId::new("enclosure", degree), &p, |b, p| {
            b.iter(|| p.coord_enclosure(black_box(&t)))
        });
    }
    let p = BernsteinApprox::with_degree(1, &Rational::one(), 256).unwrap();
    group.bench_function("exact_eval/256", |b| b.iter(|| p.eval_coord(black_box(&t))));
    group.finish();
}

fn branch_and_bound(c: &mut Criterion) {
    let a = realgap_core::invprob::Matrix::from_i64(&[&[1, 1]]);
    let y = [Rational::one()];
    let eps = Rational::frac(1, 8);
    let p = build_bernstein_l1(2, &Rational::one(), &Rational::frac(1, 16)).unwrap();
    let tol = Rational::frac(1, 32);
    let mut group = c.benchmark_group("bpa_branch_bound");
    group.sample_size(10);
    group.bench_function("n2", |b| b.iter(|| solve_bpa_branch_bound(&a, &y, &eps, &p, black_box(&tol)).unwrap()));
    group.finish();
}

fn bss_run(c: &mut Criterion) {
    let (prog, x) = compiled_net(4, &[8, 8], 9);
    c.bench_function("bss_run/relu_4x8x8x1", |b| b.iter(|| run(&prog, black_box(&x), DEFAULT_MAX_STEPS).unwrap()));
}

criterion_group!(benches, homotopy, basis_pursuit, bernstein, branch_and_bound, bss_run);
criterion_main!(benches);
