use criterion::{criterion_group, criterion_main, Criterion};
use liepair_core::{Element, FrameSpec, Gen, Trunc};

fn element_product(c: &mut Criterion) {
    let frame = FrameSpec::new(3, 2, 0);
    let trunc = Trunc::AtMost(6);
    let mut a = Element::one(frame, trunc);
    let mut b = Element::one(frame, trunc);
    for k in 0..frame.r {
        let chi = Element::gen(frame, trunc, Gen::Sym(k));
        a = &a * &(&chi + &Element::one(frame, trunc));
        b = &b * &(&(&chi * &chi) + &Element::gen(frame, trunc, Gen::Odd(k as u16)));
    }
    c.bench_function("element_product_trunc6", |bench| {
        bench.iter(|| std::hint::black_box(&a) * std::hint::black_box(&b))
    });
}

criterion_group!(benches, element_product);
criterion_main!(benches);
