//! Reference implementations used as oracles by the integration tests.
//! None of them share an algorithm with the library code under test.
#![allow(dead_code)]

use dqd_core::algebra::{sigma_minus, sigma_plus, sigma_z, C64};
use dqd_core::{embed, ComplexMatrix, HilbertSpace};
use rand::Rng;

/// `exp(A)` by scaling and squaring of a truncated Taylor series.
pub fn expm_taylor(a: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let norm1 = (0..n)
        .map(|c| (0..n).map(|r| a[(r, c)].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let squarings = if norm1 > 0.5 {
        (norm1 / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = a.scale_real(0.5f64.powi(squarings as i32));
    let mut result = ComplexMatrix::identity(n);
    let mut term = ComplexMatrix::identity(n);
    for k in 1..=30 {
        term = (&term * &scaled).scale_real(1.0 / k as f64);
        result = &result + &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `exp(-i H t)` through [`expm_taylor`].
pub fn propagator_taylor(h: &ComplexMatrix, t: f64) -> ComplexMatrix {
    expm_taylor(&h.scale(C64::new(0.0, -t)))
}

/// Random Hermitian matrix with entries of modulus up to `scale`.
pub fn random_hermitian(rng: &mut impl Rng, n: usize, scale: f64) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        m[(i, i)] = C64::new(scale * rng.gen_range(-1.0..1.0), 0.0);
        for j in i + 1..n {
            let z = C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale;
            m[(i, j)] = z;
            m[(j, i)] = z.conj();
        }
    }
    m
}

/// Random density matrix `G G† / tr(G G†)`.
pub fn random_density(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let g = ComplexMatrix::from_fn(n, n, |_, _| {
        C64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    });
    let rho = &g * &g.adjoint();
    let tr = rho.trace().re;
    rho.scale_real(1.0 / tr)
}

/// Row-major vectorization: `vec(A X B) = (A ⊗ Bᵀ) vec(X)`.
fn left_right(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let n = a.rows();
    let bt = b.transpose();
    ComplexMatrix::from_fn(n * n, n * n, |r, c| a[(r / n, c / n)] * bt[(r % n, c % n)])
}

/// Superoperator of the two-qubit master equation with dephasing term
/// `(γ_φ/2)(σ_z ρ σ_z − ρ)` and relaxation term
/// `(γ/4)(σ⁻ρσ⁺ − ½{σ⁺σ⁻, ρ})`, built in row-major vectorized form.
pub fn lindblad_superoperator(h: &ComplexMatrix, gamma: &[f64], gamma_phi: &[f64]) -> ComplexMatrix {
    let n = h.rows();
    let space = HilbertSpace::qubits(gamma.len()).unwrap();
    let id = ComplexMatrix::identity(n);
    let minus_i = C64::new(0.0, -1.0);
    let mut l = &left_right(h, &id).scale(minus_i) - &left_right(&id, h).scale(minus_i);
    for j in 0..gamma.len() {
        let z = embed(&sigma_z(), j, &space).unwrap();
        let deph = &left_right(&z, &z) - &left_right(&id, &id);
        l = &l + &deph.scale_real(gamma_phi[j] / 2.0);
        let sm = embed(&sigma_minus(), j, &space).unwrap();
        let sp = embed(&sigma_plus(), j, &space).unwrap();
        let e = &sp * &sm;
        let jump = &left_right(&sm, &sp)
            - &(&left_right(&e, &id) + &left_right(&id, &e)).scale_real(0.5);
        l = &l + &jump.scale_real(gamma[j] / 4.0);
    }
    l
}

/// `ρ(t) = exp(L t) ρ(0)` in row-major vectorized form.
pub fn evolve_superoperator(l: &ComplexMatrix, rho0: &ComplexMatrix, t: f64) -> ComplexMatrix {
    let n = rho0.rows();
    let v = expm_taylor(&l.scale_real(t)).apply(rho0.as_slice());
    ComplexMatrix::from_vec(n, n, v).unwrap()
}

pub fn max_abs_diff_vec(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}
