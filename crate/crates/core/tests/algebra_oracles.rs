mod common;

use common::{max_abs_diff_vec, propagator_taylor, random_hermitian};
use dqd_core::algebra::{Spectral, C64};
use dqd_core::hamiltonians::{analytic_u, h_reduced_two_qubit};
use dqd_core::{expm_propagator, HilbertSpace, PureState};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn taylor_oracle_matches_closed_form_rotation() {
    // exp(-i σ_x t) = cos t I - i sin t σ_x
    let sx = dqd_core::algebra::sigma_x();
    let t = 0.7;
    let u = propagator_taylor(&sx, t);
    assert!((u[(0, 0)] - C64::new(t.cos(), 0.0)).norm() < 1e-15);
    assert!((u[(0, 1)] - C64::new(0.0, -t.sin())).norm() < 1e-15);
}

#[test]
fn expm_matches_taylor_on_random_hermitians() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for dim in [2, 3, 4, 8, 12] {
        for _ in 0..5 {
            let h = random_hermitian(&mut rng, dim, 1.0);
            let t = rng.gen_range(-5.0..5.0);
            let u = expm_propagator(&h, t).unwrap();
            let oracle = propagator_taylor(&h, t);
            assert!(u.max_abs_diff(&oracle) < 1e-11, "dim {dim}: {:e}", u.max_abs_diff(&oracle));
            assert!(u.unitarity_error() < 1e-12);
        }
    }
}

#[test]
fn spectral_evolution_matches_taylor() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let h = random_hermitian(&mut rng, 6, 2.0);
    let spectral = Spectral::new(&h).unwrap();
    let space = HilbertSpace::new(vec![6]).unwrap();
    let psi = PureState::normalized(
        space,
        (0..6).map(|k| C64::new(k as f64, 1.0)).collect(),
    )
    .unwrap();
    for t in [0.0, 0.3, 2.0] {
        let a = spectral.evolve(psi.amplitudes(), t);
        let b = propagator_taylor(&h, t).apply(psi.amplitudes());
        assert!(max_abs_diff_vec(&a, &b) < 1e-12);
    }
}

#[test]
fn analytic_exchange_propagator_matches_taylor_at_random_times() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let lambda = 2.0 * std::f64::consts::PI * 10e6;
    let h = h_reduced_two_qubit(lambda).unwrap();
    let h_scaled = h_reduced_two_qubit(1.0).unwrap();
    let space = HilbertSpace::qubits(2).unwrap();
    let i11 = space.basis_index(&[1, 1]).unwrap();
    for _ in 0..50 {
        let t = rng.gen_range(0.0..1e-7);
        let u = analytic_u(lambda, t).unwrap();
        // Evaluate the oracle in dimensionless time λt to keep its input O(1).
        let oracle = propagator_taylor(&h_scaled, lambda * t);
        assert!(u.max_abs_diff(&oracle) < 1e-10, "t = {t:e}");
        assert!(u.unitarity_error() < 1e-10);
        assert!((u[(i11, i11)].norm() - 1.0).abs() < 1e-12);
        assert!(expm_propagator(&h, t).unwrap().max_abs_diff(&u) < 1e-10);
    }
}
