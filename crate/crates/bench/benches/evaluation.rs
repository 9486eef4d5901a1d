use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qseries::{
    c, catalog, eval_phi, eval_psi, evaluate_identity, poch_infinite, r, run_verification,
    sample_params, EvalConfig, Param, ProductConfig, QBase, SampleSpec, SeriesSpec,
};

fn products(cr: &mut Criterion) {
    let mut group = cr.benchmark_group("poch_infinite");
    let cfg = ProductConfig::default();
    for q in [0.1, 0.5, 0.9] {
        let base = QBase::real(q).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(q), &base, |b, &base| {
            b.iter(|| poch_infinite(black_box(c(0.7, 0.2)), base, &cfg).unwrap())
        });
    }
    group.finish();
}

fn series(cr: &mut Criterion) {
    let cfg = EvalConfig::default();
    let q = QBase::real(0.45).unwrap();
    let s = Param::Single;
    let phi = SeriesSpec::unilateral(vec![s(r(0.3)), s(c(1.2, 0.4))], vec![s(r(0.8))], q, r(0.6))
        .unwrap();
    cr.bench_function("eval_phi/2phi1", |b| b.iter(|| eval_phi(black_box(&phi), &cfg).unwrap()));

    let a = c(0.7, 0.1);
    let ps = [c(1.3, 0.2), c(-0.9, 1.1), c(1.6, -0.5), c(0.4, 1.8), c(-1.2, -0.7), c(2.1, 0.3)];
    let mut num = vec![Param::PairSq(a * 0.45 * 0.45)];
    let mut den = vec![Param::PairSq(a)];
    for &x in &ps {
        num.push(s(x));
        den.push(s(a * 0.45 / x));
    }
    let z = a * a * a * 0.45 * 0.45 / ps.iter().product::<qseries::ComplexScalar>();
    let psi = SeriesSpec::bilateral(num, den, q, z).unwrap();
    cr.bench_function("eval_psi/vwp_8psi8", |b| b.iter(|| eval_psi(black_box(&psi), &cfg).unwrap()));
}

fn identities(cr: &mut Criterion) {
    let cfg = EvalConfig::default();
    let mut group = cr.benchmark_group("evaluate_identity");
    for d in catalog() {
        let p = sample_params(&SampleSpec::new(d.id, 1, 42)).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(d.id), &p, |b, p| {
            b.iter(|| evaluate_identity(d.id, black_box(p), &cfg).unwrap())
        });
    }
    group.finish();
}

fn verification(cr: &mut Criterion) {
    let cfg = EvalConfig::default();
    let mut group = cr.benchmark_group("run_verification");
    group.sample_size(10);
    for id in ["ramanujan_1psi1", "thm3_8psi8_three_term"] {
        let spec = SampleSpec::new(id, 100, 42);
        group.bench_with_input(BenchmarkId::from_parameter(id), &spec, |b, spec| {
            b.iter(|| run_verification(spec, &cfg).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, products, series, identities, verification);
criterion_main!(benches);
