use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use liouville_core::bifurcation::{continue_branch, BifurcationPoint, Controls, DiskGrid};
use liouville_core::mesh::RadialMesh;
use liouville_core::morse::morse_index_direct;
use liouville_core::spectral::nu1;
use liouville_core::{Branch, Nonlinearity, ProblemParams, RadialSolution};

fn bench_nu1(c: &mut Criterion) {
    let mut g = c.benchmark_group("nu1");
    for n in [1024, 4096] {
        let mesh = RadialMesh::eigen_default(n).unwrap();
        g.bench_with_input(BenchmarkId::from_parameter(n), &mesh, |b, mesh| {
            b.iter(|| nu1(black_box(1.0), &Nonlinearity::Exponential, mesh).unwrap())
        });
    }
    g.finish();
}

fn bench_morse(c: &mut Criterion) {
    let mesh = RadialMesh::eigen_default(4096).unwrap();
    c.bench_function("morse_direct_alpha4", |b| {
        b.iter(|| morse_index_direct(black_box(1.0), 4.0, &Nonlinearity::Exponential, &mesh, 8).unwrap())
    });
}

fn bench_disk(c: &mut Criterion) {
    let grid = DiskGrid::new(256, 8, 1, 2.0).unwrap();
    let p = ProblemParams::exponential_mu(6.0, 2.0).unwrap();
    let state = grid.embed_radial(&RadialSolution::exponential(&p, Branch::Blowup).unwrap());
    c.bench_function("disk_jacobian_factorize", |b| {
        b.iter(|| {
            let (jac, _) = grid.jacobian(black_box(&state), 6.0).unwrap();
            jac.factorize().unwrap()
        })
    });

    let start = BifurcationPoint::exponential(2.0, 1).unwrap();
    let ctl = Controls { max_steps: 5, ..Controls::default() };
    let mut g = c.benchmark_group("branch");
    g.sample_size(10);
    g.bench_function("five_steps", |b| b.iter(|| continue_branch(&start, -1.0, &ctl).unwrap()));
    g.finish();
}

criterion_group!(benches, bench_nu1, bench_morse, bench_disk);
criterion_main!(benches);
