use boxlab::bell::cglmp;
use boxlab::incompat::{incompatibility, ObservablePair};
use boxlab::isotropic::{depolarize, make_isotropic};
use boxlab::locality::is_local;
use boxlab::polytope::nonsignaling_vertices_2222;
use boxlab::rat;
use boxlab::shareability::{clone_feasibility, monogamy_tradeoff, polygamy_example};
use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

fn locality(c: &mut Criterion) {
    let mut group = c.benchmark_group("is_local");
    for (name, b) in [("iso 1/2", make_isotropic(rat(1, 2)).unwrap()), ("pr", make_isotropic(rat(1, 1)).unwrap())] {
        group.bench_with_input(BenchmarkId::from_parameter(name), &b, |bench, b| bench.iter(|| is_local(black_box(b)).unwrap()));
    }
    let ab = polygamy_example().marginal_of(&[0, 1]).unwrap();
    group.bench_function("polygamy AB (4 outputs)", |bench| bench.iter(|| is_local(black_box(&ab)).unwrap()));
    group.finish();
}

fn shareability(c: &mut Criterion) {
    let mut group = c.benchmark_group("shareability");
    group.sample_size(10);
    let b = make_isotropic(rat(1, 2)).unwrap();
    for m in [2, 3] {
        group.bench_with_input(BenchmarkId::new("clone_feasibility", m), &m, |bench, &m| {
            bench.iter(|| clone_feasibility(black_box(&b), m).unwrap())
        });
    }
    group.bench_function("monogamy_tradeoff 1/2", |bench| bench.iter(|| monogamy_tradeoff(black_box(&rat(1, 2))).unwrap()));
    group.finish();
}

fn transforms(c: &mut Criterion) {
    let vertices = nonsignaling_vertices_2222();
    c.bench_function("depolarize 24 vertices", |bench| {
        bench.iter(|| vertices.iter().map(|v| depolarize(black_box(v)).unwrap()).collect::<Vec<_>>())
    });
    let pr = make_isotropic(rat(3, 4)).unwrap();
    c.bench_function("incompatibility iso 3/4", |bench| {
        bench.iter(|| incompatibility(black_box(&pr), &ObservablePair::bob()).unwrap())
    });
    c.bench_function("cglmp(3) normalization", |bench| bench.iter(|| cglmp(black_box(3)).unwrap()));
}

criterion_group!(benches, locality, shareability, transforms);
criterion_main!(benches);
