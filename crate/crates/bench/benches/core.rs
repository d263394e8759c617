use std::hint::black_box;
use std::sync::Arc;

use criterion::{criterion_group, criterion_main, Criterion};

use msurf_bench::{annulus, sine_data};
use msurf_core::barrier::{barrier_constants, certificate_for, check_supersolution, BarrierInputs};
use msurf_core::msolver::{newton_solve, MaskedGrid, NewtonParams};
use msurf_core::Point;

fn constants(c: &mut Criterion) {
    let inputs = BarrierInputs { d1: 0.4, d2: 1.3, a_norm: 0.5, hinf: -0.5, r: 0.0, rho0: 0.45, n: 2 };
    c.bench_function("barrier_constants", |b| b.iter(|| barrier_constants(black_box(inputs)).unwrap()));
}

fn supersolution(c: &mut Criterion) {
    let d = annulus();
    let data = sine_data(&d, 0.02);
    let cert = certificate_for(&d, &data.norms()).unwrap();
    let mut g = c.benchmark_group("supersolution_check");
    g.sample_size(10);
    g.bench_function("annulus h=1/32", |b| b.iter(|| check_supersolution(&cert, &d, &data, 1.0 / 32.0).unwrap()));
    g.finish();
}

fn newton(c: &mut Criterion) {
    let d = annulus();
    let data = sine_data(&d, 0.02);
    let grid = Arc::new(MaskedGrid::new(&d, 1.0 / 32.0).unwrap());
    let trace = grid.trace_data(&d, &data).unwrap();
    let mut g = c.benchmark_group("newton_solve");
    g.sample_size(10);
    g.bench_function("annulus h=1/32", |b| b.iter(|| newton_solve(grid.clone(), trace.clone(), None, &NewtonParams::default()).unwrap()));
    g.finish();
}

fn foot(c: &mut Criterion) {
    let d = annulus();
    let z = Point::new(1.3, 0.4);
    c.bench_function("nearest_foot", |b| b.iter(|| d.nearest_foot(black_box(&z)).unwrap()));
}

criterion_group!(benches, constants, supersolution, newton, foot);
criterion_main!(benches);
