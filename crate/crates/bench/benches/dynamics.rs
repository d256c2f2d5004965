use std::f64::consts::PI;
use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use dqd_core::dynamics::{integrate_lindblad, propagate_schrodinger};
use dqd_core::hamiltonians::{h_reduced_two_qubit, InteractionHamiltonian};
use dqd_core::protocols::{
    decoherence_sweep, dispersive_validity, epr_generation, rate_axis, reference_params,
};
use dqd_core::{HilbertSpace, ModelParams, NoiseSpec, PureState, TimeGrid};

const MHZ: f64 = 2.0 * PI * 1e6;

fn epr(c: &mut Criterion) {
    let p = reference_params();
    let noise = NoiseSpec::uniform(2, 0.2 * MHZ, 0.5 * MHZ).unwrap();
    c.bench_function("epr_generation", |b| {
        b.iter(|| epr_generation(black_box(&p), &noise).unwrap())
    });
}

fn lindblad_steps(c: &mut Criterion) {
    let h = h_reduced_two_qubit(1.0).unwrap();
    let noise = NoiseSpec::uniform(2, 0.1, 0.3).unwrap();
    let rho0 = PureState::basis(HilbertSpace::qubits(2).unwrap(), &[1, 0]).unwrap().to_density_matrix();
    let mut group = c.benchmark_group("integrate_lindblad");
    for steps in [1_000, 10_000] {
        let grid = TimeGrid::span(10.0, steps).unwrap().recording_every(steps).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(steps), &grid, |b, grid| {
            b.iter(|| integrate_lindblad(&h, &rho0, &noise, grid).unwrap())
        });
    }
    group.finish();
}

fn schrodinger_cavity(c: &mut Criterion) {
    let mut group = c.benchmark_group("propagate_schrodinger_cavity");
    for cutoff in [2, 5, 10] {
        let h = InteractionHamiltonian::from_parts(&[1.0, 1.0], &[10.0, 10.0], cutoff).unwrap();
        let psi0 = PureState::basis(h.space().clone(), &[1, 0, 0]).unwrap();
        let grid = TimeGrid::span(8.0, 4_000).unwrap().recording_every(4_000).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(cutoff), &grid, |b, grid| {
            b.iter(|| propagate_schrodinger(&h, &psi0, grid).unwrap())
        });
    }
    group.finish();
}

fn dispersive(c: &mut Criterion) {
    let g = 100.0 * MHZ;
    let p = ModelParams::uniform(2, g, 10.0 * g)
        .and_then(|p| p.with_dispersive_threshold(1.0))
        .unwrap();
    let mut group = c.benchmark_group("dispersive_validity");
    group.sample_size(10);
    group.bench_function("tau_10g", |b| b.iter(|| dispersive_validity(black_box(&p)).unwrap()));
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let p = reference_params();
    let mut group = c.benchmark_group("decoherence_sweep");
    group.sample_size(10);
    for points in [6, 21] {
        let axis = rate_axis(1.0, points).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(points), &axis, |b, axis| {
            b.iter(|| decoherence_sweep(&p, axis, axis).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, epr, lindblad_steps, schrodinger_cavity, dispersive, sweep);
criterion_main!(benches);
