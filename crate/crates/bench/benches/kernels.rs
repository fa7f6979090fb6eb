use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use oppenheim_bench::{cusp, forms, h_elements, lattices, stream};
use oppenheim_core::experiments::hit_test;
use oppenheim_core::forms::{min_form_value_direct, NormChoice};
use oppenheim_core::lattice::{shortest_vector, LatticePoint};
use oppenheim_core::spin::spin_cover;

fn bench_shortest_vector(c: &mut Criterion) {
    let xs = lattices(256);
    let hs = h_elements(1000.0, 256);
    // Translated bases are long and skewed, as in the orbit searches.
    let skewed: Vec<_> = xs.iter().zip(&hs).map(|(x, h)| x.basis * h.image).collect();
    let mut group = c.benchmark_group("shortest_vector");
    for (name, bases) in [("haar", xs.iter().map(|x| x.basis).collect::<Vec<_>>()), ("translated_T1000", skewed)] {
        group.bench_function(name, |b| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % bases.len();
                let x = LatticePoint::from_trusted(black_box(bases[i]));
                black_box(shortest_vector(&x))
            })
        });
    }
    group.finish();
}

fn bench_min_form_value(c: &mut Criterion) {
    let qs = forms(16);
    let mut group = c.benchmark_group("min_form_value_direct");
    for radius in [25.0, 100.0, 400.0] {
        group.bench_with_input(BenchmarkId::from_parameter(radius), &radius, |b, &r| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % qs.len();
                black_box(min_form_value_direct(&qs[i], r, NormChoice::Euclidean).unwrap())
            })
        });
    }
    group.finish();
}

fn bench_spin_cover(c: &mut Criterion) {
    let hs = h_elements(1000.0, 1024);
    c.bench_function("spin_cover", |b| {
        let mut i = 0;
        b.iter(|| {
            i = (i + 1) % hs.len();
            black_box(spin_cover(black_box(&hs[i].matrix)))
        })
    });
}

fn bench_hit_test(c: &mut Criterion) {
    let xs = lattices(8);
    let family = cusp();
    let rng = stream();
    let mut group = c.benchmark_group("hit_test");
    group.sample_size(20);
    for budget in [1000usize, 10_000] {
        group.bench_with_input(BenchmarkId::new("budget", budget), &budget, |b, &budget| {
            let mut i = 0;
            b.iter(|| {
                i = (i + 1) % xs.len();
                // η large enough that most searches run to exhaustion.
                black_box(hit_test(&xs[i], 1000.0, 2.5, &family, budget, &rng).unwrap())
            })
        });
    }
    group.finish();
}

criterion_group!(benches, bench_shortest_vector, bench_min_form_value, bench_spin_cover, bench_hit_test);
criterion_main!(benches);
