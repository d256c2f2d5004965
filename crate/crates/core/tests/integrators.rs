mod common;

use common::{evolve_superoperator, lindblad_superoperator, propagator_taylor, random_density};
use dqd_core::algebra::{C64, ZERO};
use dqd_core::dynamics::{
    integrate_lindblad, lindblad_rhs, propagate_schrodinger, NoiseSpec, TimeGrid,
    MAX_HERMITICITY_ERROR, MAX_TRACE_DRIFT, MIN_EIGENVALUE,
};
use dqd_core::hamiltonians::{h_reduced_two_qubit, InteractionHamiltonian};
use dqd_core::{ComplexMatrix, DensityMatrix, Error, HilbertSpace, PureState};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn two_qubits() -> HilbertSpace {
    HilbertSpace::qubits(2).unwrap()
}

fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Ratios `e(n)/e(2n)` where `e(n) = ‖x_n − x_{2n}‖` for `n = n0, 2n0, …`.
fn halving_ratios(n0: usize, levels: usize, run: impl Fn(usize) -> Vec<C64>) -> Vec<f64> {
    let finals: Vec<_> = (0..=levels).map(|k| run(n0 << k)).collect();
    let errors: Vec<f64> = finals.windows(2).map(|w| max_diff(&w[0], &w[1])).collect();
    errors.windows(2).map(|w| w[0] / w[1]).collect()
}

#[test]
fn schrodinger_is_fourth_order() {
    let h = InteractionHamiltonian::from_parts(&[1.0, 1.0], &[10.0, 10.0], 2).unwrap();
    let mut levels = vec![0; 3];
    levels[0] = 1;
    let psi0 = PureState::basis(h.space().clone(), &levels).unwrap();
    // dt spans a factor 16 (more than a decade) over five runs.
    let ratios = halving_ratios(200, 4, |n| {
        let grid = TimeGrid::span(3.0, n).unwrap();
        propagate_schrodinger(&h, &psi0, &grid)
            .unwrap()
            .final_state()
            .amplitudes()
            .to_vec()
    });
    for r in &ratios {
        assert!(*r >= 8.0, "ratios {ratios:?}");
    }
}

#[test]
fn lindblad_is_fourth_order() {
    let h = h_reduced_two_qubit(1.0).unwrap();
    let noise = NoiseSpec::new(vec![0.4, 0.3], vec![0.2, 0.5]).unwrap();
    let rho0 = PureState::basis(two_qubits(), &[1, 0]).unwrap().to_density_matrix();
    let ratios = halving_ratios(400, 4, |n| {
        let grid = TimeGrid::span(10.0, n).unwrap();
        let run = integrate_lindblad(&h, &rho0, &noise, &grid).unwrap();
        run.final_state().matrix().as_slice().to_vec()
    });
    for r in &ratios {
        assert!(*r >= 8.0, "ratios {ratios:?}");
    }
}

#[test]
fn constant_hamiltonian_matches_taylor_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let h = common::random_hermitian(&mut rng, 4, 1.0);
    let psi0 = PureState::basis(two_qubits(), &[0, 1]).unwrap();
    let t = 4.0;
    let exact = propagator_taylor(&h, t).apply(psi0.amplitudes());
    let run = propagate_schrodinger(&h, &psi0, &TimeGrid::span(t, 4000).unwrap()).unwrap();
    assert!(max_diff(run.final_state().amplitudes(), &exact) < 1e-8);
    assert!(run.max_norm_drift() < 1e-6);
}

#[test]
fn lindblad_matches_superoperator_exponential() {
    let mut rng = ChaCha8Rng::seed_from_u64(19);
    let h = common::random_hermitian(&mut rng, 4, 1.0);
    let gamma = [0.3, 0.8];
    let gamma_phi = [0.6, 0.1];
    let noise = NoiseSpec::new(gamma.to_vec(), gamma_phi.to_vec()).unwrap();
    let rho0 = random_density(&mut rng, 4);
    let t = 3.0;
    let l = lindblad_superoperator(&h, &gamma, &gamma_phi);
    let exact = evolve_superoperator(&l, &rho0, t);
    let start = DensityMatrix::new(two_qubits(), rho0).unwrap();
    let run = integrate_lindblad(&h, &start, &noise, &TimeGrid::span(t, 3000).unwrap()).unwrap();
    assert!(run.final_state().matrix().max_abs_diff(&exact) < 1e-8);
}

#[test]
fn dephasing_decays_two_flip_coherence_at_summed_rate() {
    let space = two_qubits();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 4];
    let i10 = space.basis_index(&[1, 0]).unwrap();
    let i01 = space.basis_index(&[0, 1]).unwrap();
    amps[i10] = C64::new(s, 0.0);
    amps[i01] = C64::new(s, 0.0);
    let rho0 = PureState::new(space, amps).unwrap().to_density_matrix();
    let (g1, g2) = (0.7, 0.4);
    let noise = NoiseSpec::new(vec![0.0, 0.0], vec![g1, g2]).unwrap();
    let h = ComplexMatrix::zeros(4, 4);
    let t = 2.0;
    let run = integrate_lindblad(&h, &rho0, &noise, &TimeGrid::span(t, 2000).unwrap()).unwrap();
    let coherence = run.final_state().matrix()[(i10, i01)].re;
    assert!((coherence - 0.5 * (-(g1 + g2) * t).exp()).abs() < 1e-10);
    let pop = run.final_state().matrix()[(i10, i10)].re;
    assert!((pop - 0.5).abs() < 1e-12);
}

#[test]
fn relaxation_decays_excited_population_at_quarter_rate() {
    let rho0 = PureState::basis(two_qubits(), &[1, 0]).unwrap().to_density_matrix();
    let gamma = 0.9;
    let noise = NoiseSpec::new(vec![gamma, 0.0], vec![0.0, 0.0]).unwrap();
    let h = ComplexMatrix::zeros(4, 4);
    let t = 3.0;
    let run = integrate_lindblad(&h, &rho0, &noise, &TimeGrid::span(t, 2000).unwrap()).unwrap();
    let i10 = two_qubits().basis_index(&[1, 0]).unwrap();
    let pop = run.final_state().matrix()[(i10, i10)].re;
    assert!((pop - (-gamma * t / 4.0).exp()).abs() < 1e-10);
}

#[test]
fn diagnostics_stay_in_band_on_accepted_runs() {
    let h = h_reduced_two_qubit(1.0).unwrap();
    let rho0 = PureState::basis(two_qubits(), &[1, 0]).unwrap().to_density_matrix();
    for (gamma, gamma_phi) in [(0.0, 0.0), (0.1, 0.3), (2.0, 5.0)] {
        let noise = NoiseSpec::uniform(2, gamma, gamma_phi).unwrap();
        let run = integrate_lindblad(&h, &rho0, &noise, &TimeGrid::span(5.0, 2000).unwrap()).unwrap();
        assert!(run.max_trace_drift() < MAX_TRACE_DRIFT);
        assert!(run.max_hermiticity_error() < MAX_HERMITICITY_ERROR);
        assert!(run.min_eigenvalue() > MIN_EIGENVALUE);
        assert_eq!(run.states.len(), 2001);
    }
}

#[test]
fn oversized_step_is_rejected_before_integrating() {
    let h = h_reduced_two_qubit(1.0).unwrap();
    let rho0 = PureState::basis(two_qubits(), &[1, 0]).unwrap().to_density_matrix();
    let noise = NoiseSpec::uniform(2, 0.1, 0.1).unwrap();
    let err = integrate_lindblad(&h, &rho0, &noise, &TimeGrid::span(10.0, 10).unwrap()).unwrap_err();
    assert!(matches!(err, Error::StepTooLarge { .. }));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn master_equation_rhs_is_traceless_hermitian_and_matches_oracle(
        seed in any::<u64>(),
        gamma in prop::array::uniform2(0.0..2.0f64),
        gamma_phi in prop::array::uniform2(0.0..2.0f64),
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = common::random_hermitian(&mut rng, 4, 1.0);
        let rho = random_density(&mut rng, 4);
        let noise = NoiseSpec::new(gamma.to_vec(), gamma_phi.to_vec()).unwrap();
        let state = DensityMatrix::new(two_qubits(), rho.clone()).unwrap();
        let rhs = lindblad_rhs(&state, &h, &noise).unwrap();
        prop_assert!(rhs.trace().norm() < 1e-12);
        prop_assert!(rhs.hermiticity_error() < 1e-12);
        let l = lindblad_superoperator(&h, &gamma, &gamma_phi);
        let oracle = l.apply(rho.as_slice());
        prop_assert!(max_diff(rhs.as_slice(), &oracle) < 1e-12);
    }
}
