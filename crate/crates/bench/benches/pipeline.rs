use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use fundomain::cantor::{verify_translate_disjointness, DigitSequence};
use fundomain::conjugacy::{assemble_mu, ConjugacyDescriptor};
use fundomain::diophantine::{Alpha, ApproximationProfile};
use fundomain::numerics::{CirclePoint, Dyadic, PrecisionLadder, PrecisionReal};
use fundomain_bench::small;
use num_bigint::BigUint;

fn p_of_q(c: &mut Criterion) {
    let q = BigUint::from(1u8) << 243u32;
    // Fresh profile each time so the convergent table is not reused.
    c.bench_function("p(2^243)", |b| b.iter(|| ApproximationProfile::new(Alpha::golden()).p(black_box(&q)).unwrap()));
}

fn disjointness(c: &mut Criterion) {
    let alpha = Alpha::golden();
    let seq = DigitSequence::golden(6).unwrap();
    let ladder = PrecisionLadder::default();
    c.bench_function("translates |n| <= 8", |b| {
        b.iter(|| verify_translate_disjointness(&alpha, &seq, black_box(8), 5, &ladder).unwrap())
    });
}

fn cocycle(c: &mut Criterion) {
    let con = small();
    let x = CirclePoint::from_dyadic(Dyadic::from_f64(0.3141592653589793).unwrap());
    c.bench_function("phi_truncated", |b| b.iter(|| con.stack.phi_truncated(black_box(&x))));
    c.bench_function("birkhoff m=64", |b| b.iter(|| con.stack.birkhoff_truncated(black_box(&x), 64)));
}

fn conjugacy(c: &mut Criterion) {
    let con = small();
    let params = con.measure_params(4);
    c.bench_function("assemble_mu d=4 I=8", |b| b.iter(|| assemble_mu(&con.stack, &con.seq, black_box(&params)).unwrap()));
    let d: &ConjugacyDescriptor = &con.conjugacy;
    let x = PrecisionReal::exact(Dyadic::from_f64(0.271828).unwrap());
    c.bench_function("h(x)", |b| b.iter(|| d.h(black_box(&x)).unwrap()));
    c.bench_function("F lift", |b| b.iter(|| d.f_lift(black_box(&x)).unwrap()));
}

criterion_group!(benches, p_of_q, disjointness, cocycle, conjugacy);
criterion_main!(benches);
