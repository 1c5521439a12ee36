use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use landau_core::bounds::{binomial_b, constant_g, landau_k};
use landau_core::config::{normalize, Hyperplane};
use landau_core::curves::Family;
use landau_core::spectrum::{hermitian_eigenvalues, HermitianMatrix};
use landau_core::{default_manifest, run_manifest, Configuration, Manifest, C64};

fn generic_configuration(n: usize) -> Configuration {
    let mut hs: Vec<Hyperplane> = (0..=n).map(|k| Hyperplane::coordinate(n, k)).collect();
    for j in 0..n {
        let row: Vec<C64> = (0..=n).map(|k| C64::from_polar(1.0, 0.7 * ((j + 1) * (k + 1)) as f64)).collect();
        hs.push(normalize(&row).unwrap());
    }
    Configuration::new(n, hs).unwrap()
}

fn spectrum(c: &mut Criterion) {
    let mut group = c.benchmark_group("jacobi");
    for n in [1, 3, 6] {
        let config = generic_configuration(n);
        let rows: Vec<&[C64]> = config.hyperplanes()[n..].iter().map(|h| h.coeffs()).collect();
        let gram = HermitianMatrix::gram(&rows);
        group.bench_with_input(BenchmarkId::from_parameter(n + 1), &gram, |b, m| {
            b.iter(|| hermitian_eigenvalues(black_box(m)).unwrap())
        });
    }
    group.finish();
}

fn constants(c: &mut Criterion) {
    let mut group = c.benchmark_group("constant_g");
    for n in [1, 2, 4] {
        let config = generic_configuration(n);
        group.bench_with_input(BenchmarkId::from_parameter(n), &config, |b, config| {
            b.iter(|| constant_g(black_box(config)).unwrap())
        });
    }
    group.finish();

    let b3 = binomial_b(1);
    let mut group = c.benchmark_group("landau_k");
    for bits in [200, 400, 1000] {
        group.bench_with_input(BenchmarkId::from_parameter(bits), &bits, |b, &bits| {
            b.iter(|| landau_k(black_box(1.92), black_box(1.0), &b3, bits).unwrap())
        });
    }
    group.finish();
}

fn areas(c: &mut Criterion) {
    let mut group = c.benchmark_group("fs_area");
    group.sample_size(20);
    for m in [1, 5] {
        let f = Family::MoebiusPower { m }.curve(1.0).unwrap();
        group.bench_with_input(BenchmarkId::new("f_m at 0.9", m), &f, |b, f| b.iter(|| f.fs_area(black_box(0.9)).unwrap()));
        group.bench_with_input(BenchmarkId::new("f_m extrapolated", m), &f, |b, f| {
            b.iter(|| f.fs_area_extrapolated().unwrap())
        });
    }
    group.finish();
}

fn suite(c: &mut Criterion) {
    let small = Manifest {
        seed: None,
        checks: default_manifest().checks.into_iter().filter(|check| !check.name().starts_with("cartan")).take(12).collect(),
    };
    let mut group = c.benchmark_group("suite");
    group.sample_size(10);
    group.bench_function("default manifest head", |b| b.iter(|| run_manifest(black_box(&small), 42, 200).unwrap()));
    group.finish();
}

criterion_group!(benches, spectrum, constants, areas, suite);
criterion_main!(benches);
