use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use danielewski::Potential;
use danielewski_bench::{accepted_potentials, cubic, mul_operands, poly, quartic, shear_word};

fn ring(c: &mut Criterion) {
    let s = quartic();
    let (a, b) = mul_operands(&s);
    c.bench_function("mul/quartic", |bch| bch.iter(|| s.mul(black_box(&a), black_box(&b))));
}

fn fields(c: &mut Criterion) {
    let s = cubic();
    let u = s.shear_x(3);
    let v = s.hyperbolic(&danielewski::UniPoly::from_ints(&[0, 1, 1]));
    c.bench_function("bracket/sfx3_hf", |bch| bch.iter(|| s.bracket(black_box(&u), black_box(&v))));
    c.bench_function("lnd_check/sfy4", |bch| bch.iter(|| s.lnd_check(&s.shear_y(4), 64)));
}

fn membership(c: &mut Criterion) {
    let s = cubic();
    let pots = accepted_potentials(&s);
    c.bench_function("decide/three", |bch| {
        bch.iter(|| pots.iter().map(|f| s.decide(black_box(f)).accepted).count())
    });
    c.bench_function("avdp_decompose/three", |bch| {
        bch.iter(|| pots.iter().map(|f| s.avdp_decompose(f).expect("accepted")).count())
    });
    let target = Potential::new(poly(&s, "x^2*z + y^3"));
    let mut g = c.benchmark_group("certify_shears_only");
    g.sample_size(10);
    g.bench_function("x2z_y3", |bch| bch.iter(|| s.certify_shears_only(black_box(&target), 12).expect("certified")));
    g.finish();
}

fn automorphisms(c: &mut Criterion) {
    let s = cubic();
    let word = shear_word();
    c.bench_function("automorphism/shear_word", |bch| bch.iter(|| s.automorphism(black_box(&word)).expect("valid")));
}

fn z2(c: &mut Criterion) {
    let s = danielewski::parse::parse_surface("z^2 - 1").expect("simple roots");
    c.bench_function("z2_avdp_check/7", |bch| bch.iter(|| s.z2_avdp_check(7).expect("quadric")));
}

criterion_group!(benches, ring, fields, membership, automorphisms, z2);
criterion_main!(benches);
