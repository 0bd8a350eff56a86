use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use std::hint::black_box;

use ptboot_bench::{quartic_fixture, scan_fixtures};
use ptboot_core::models::swanson_moments;
use ptboot_core::oracle::{fd_diagonalize, FdModel};
use ptboot_core::{
    assemble_hankel, derive_x_moment_recursion, evaluate_recursion, is_psd, minimize_energy_feasible, scan,
    PolynomialPotential,
};

fn scans(c: &mut Criterion) {
    let mut group = c.benchmark_group("scan");
    group.sample_size(10);
    for f in scan_fixtures() {
        group.bench_function(f.name, |b| b.iter(|| scan(black_box(&f.model), black_box(&f.grid)).unwrap()));
    }
    let q = quartic_fixture();
    group.bench_function(q.name, |b| b.iter(|| scan(&q.model, &q.grid).unwrap()));
    group.finish();
}

fn kernels(c: &mut Criterion) {
    let seq = swanson_moments(1.41, 0.5, 30);
    c.bench_function("hankel_psd_k16", |b| {
        b.iter(|| is_psd(&assemble_hankel(black_box(&seq), 16, 1).unwrap(), 1e-9).unwrap())
    });
    let sextic = PolynomialPotential::from_real(&[0.0, 0.0, 1.0, 0.0, -0.5, 0.0, 1.0]).unwrap();
    c.bench_function("derive_sextic", |b| b.iter(|| derive_x_moment_recursion(black_box(&sextic))));
    let rel = derive_x_moment_recursion(&sextic);
    c.bench_function("evaluate_sextic_depth_40", |b| {
        b.iter(|| evaluate_recursion(&rel, black_box(1.2), &[0.0, 0.4, 0.0, 0.3], 40).unwrap())
    });
    c.bench_function("fd_poschl_teller_n1000", |b| {
        b.iter(|| fd_diagonalize(FdModel::PoschlTellerHermitian { lambda: 3 }, 1000, 12.0).unwrap())
    });
}

fn minimize(c: &mut Criterion) {
    let mut group = c.benchmark_group("minimize");
    group.sample_size(10);
    let f = scan_fixtures().into_iter().find(|f| f.name == "coupled_swanson_2d").unwrap();
    group.bench_function("coupled_swanson", |b| {
        b.iter_batched(|| f.grid.clone(), |g| minimize_energy_feasible(&f.model, &g).unwrap(), BatchSize::SmallInput)
    });
    group.finish();
}

criterion_group!(benches, scans, kernels, minimize);
criterion_main!(benches);
