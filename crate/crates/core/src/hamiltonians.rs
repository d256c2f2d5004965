//! Hamiltonian builders (`ħ = 1`, angular-frequency units).
//!
//! Composite spaces are ordered `[qubit 1, …, qubit n, cavity]`. On two
//! qubits the Kronecker index order is {|00⟩, |01⟩, |10⟩, |11⟩}; the
//! reduced exchange Hamiltonian and its propagator are symmetric under
//! swapping the qubits, so their matrices coincide with the ones written in
//! the {|00⟩, |10⟩, |01⟩, |11⟩} order. States are always addressed by
//! levels through [`HilbertSpace::basis_index`], never by raw position.

use serde::{Deserialize, Serialize};

use crate::algebra::{
    annihilation, embed, number_operator, sigma_minus, sigma_plus, ComplexMatrix, HilbertSpace,
    C64, ONE, ZERO,
};
use crate::device::{DotParams, HBAR};
use crate::dynamics::TimeDependentHamiltonian;
use crate::error::{invalid, Error, Result};

/// Default photon-number truncation of the cavity.
pub const DEFAULT_PHOTON_CUTOFF: usize = 5;
/// Default minimum `|τ_j| / g_j` accepted as dispersive.
pub const DEFAULT_DISPERSIVE_THRESHOLD: f64 = 5.0;

/// Couplings and detunings of `n` qubits sharing one resonator mode.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// `g_j` in rad/s.
    pub couplings_g: Vec<f64>,
    /// `τ_j`, qubit minus mode frequency, in rad/s.
    pub detunings_tau: Vec<f64>,
    pub photon_cutoff: usize,
    pub dispersive_threshold: f64,
}

impl ModelParams {
    pub fn new(couplings_g: Vec<f64>, detunings_tau: Vec<f64>) -> Result<Self> {
        let params = Self {
            couplings_g,
            detunings_tau,
            photon_cutoff: DEFAULT_PHOTON_CUTOFF,
            dispersive_threshold: DEFAULT_DISPERSIVE_THRESHOLD,
        };
        params.validate()?;
        Ok(params)
    }

    /// `n` identical qubits with coupling `g` and detuning `tau`.
    pub fn uniform(n: usize, g: f64, tau: f64) -> Result<Self> {
        Self::new(vec![g; n], vec![tau; n])
    }

    pub fn with_cutoff(mut self, cutoff: usize) -> Result<Self> {
        self.photon_cutoff = cutoff;
        self.validate()?;
        Ok(self)
    }

    pub fn with_dispersive_threshold(mut self, threshold: f64) -> Result<Self> {
        self.dispersive_threshold = threshold;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if self.couplings_g.is_empty() {
            return Err(invalid("couplings_g", "at least one qubit is required"));
        }
        if self.couplings_g.len() != self.detunings_tau.len() {
            return Err(invalid(
                "detunings_tau",
                format!(
                    "{} detunings for {} couplings",
                    self.detunings_tau.len(),
                    self.couplings_g.len()
                ),
            ));
        }
        if let Some(g) = self.couplings_g.iter().find(|g| !(**g > 0.0 && g.is_finite())) {
            return Err(invalid("couplings_g", format!("must be finite and > 0, got {g}")));
        }
        if let Some(t) = self
            .detunings_tau
            .iter()
            .find(|t| !(t.abs() > 0.0 && t.is_finite()))
        {
            return Err(invalid("detunings_tau", format!("must be finite and nonzero, got {t}")));
        }
        if self.photon_cutoff < 1 {
            return Err(invalid("photon_cutoff", "must be at least 1"));
        }
        if !(self.dispersive_threshold > 0.0) {
            return Err(invalid("dispersive_threshold", "must be > 0"));
        }
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.couplings_g.len()
    }

    /// `min_j |τ_j| / g_j`.
    pub fn dispersive_ratio(&self) -> f64 {
        self.couplings_g
            .iter()
            .zip(&self.detunings_tau)
            .map(|(g, t)| t.abs() / g)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn is_dispersive(&self) -> bool {
        self.dispersive_ratio() >= self.dispersive_threshold
    }

    pub fn ensure_dispersive(&self) -> Result<()> {
        if self.is_dispersive() {
            Ok(())
        } else {
            Err(Error::NotDispersive {
                ratio: self.dispersive_ratio(),
                threshold: self.dispersive_threshold,
            })
        }
    }

    /// Effective exchange `λ = g²/τ`, defined only when every qubit shares
    /// the same `g` and `τ`.
    pub fn lambda(&self) -> Option<f64> {
        let g = self.couplings_g[0];
        let tau = self.detunings_tau[0];
        let identical = self.couplings_g.iter().all(|&x| x == g)
            && self.detunings_tau.iter().all(|&x| x == tau);
        identical.then(|| g * g / tau)
    }

    /// Qubits followed by the truncated cavity.
    pub fn space(&self) -> HilbertSpace {
        HilbertSpace::qubits_with_cavity(self.n_qubits(), self.photon_cutoff)
            .expect("validated parameters give a valid space")
    }
}

/// `ω a†a` on `cutoff + 1` Fock levels.
pub fn h_cavity(omega: f64, cutoff: usize) -> Result<ComplexMatrix> {
    if cutoff < 1 {
        return Err(invalid("photon_cutoff", "must be at least 1"));
    }
    Ok(number_operator(cutoff).scale_real(omega))
}

/// Three-level double-dot Hamiltonian in the ordered basis
/// {(1,1)T₀, (1,1)S, (0,2)S}, converted to rad/s.
pub fn h_double_dot(dot: &DotParams) -> ComplexMatrix {
    let mut h = ComplexMatrix::from_real_diagonal(&[
        dot.triplet_energy / HBAR,
        dot.singlet_energy / HBAR,
        -dot.bias_epsilon / HBAR,
    ]);
    let tc = C64::new(dot.tunneling / HBAR, 0.0);
    h[(1, 2)] = tc;
    h[(2, 1)] = tc;
    h
}

/// Interaction-picture exchange Hamiltonian of `n` qubits with the mode,
/// `Σ_j g_j (e^{-iτ_j t} a†σ_j⁻ + e^{iτ_j t} a σ_j⁺)`.
///
/// The per-qubit operators are built once; evaluating at a time `t` only
/// rescales them by phases.
#[derive(Clone, Debug)]
pub struct InteractionHamiltonian {
    space: HilbertSpace,
    detunings: Vec<f64>,
    /// `g_j a†σ_j⁻` for each qubit.
    lowering: Vec<ComplexMatrix>,
    /// `g_j a σ_j⁺` for each qubit.
    raising: Vec<ComplexMatrix>,
    /// Nonzero `(row, col, value)` entries of each lowering term; all real.
    entries: Vec<Vec<(usize, usize, f64)>>,
}

impl InteractionHamiltonian {
    /// Builds from raw lists; zero couplings are allowed here.
    pub fn from_parts(couplings: &[f64], detunings: &[f64], cutoff: usize) -> Result<Self> {
        if couplings.len() != detunings.len() || couplings.is_empty() {
            return Err(Error::DimensionMismatch(format!(
                "{} couplings and {} detunings",
                couplings.len(),
                detunings.len()
            )));
        }
        let n = couplings.len();
        let space = HilbertSpace::qubits_with_cavity(n, cutoff)?;
        let a = embed(&annihilation(cutoff), n, &space)?;
        let a_dag = a.adjoint();
        let mut lowering = Vec::with_capacity(n);
        let mut raising = Vec::with_capacity(n);
        for (j, &g) in couplings.iter().enumerate() {
            let sm = embed(&sigma_minus(), j, &space)?;
            let term = (&a_dag * &sm).scale_real(g);
            raising.push(term.adjoint());
            lowering.push(term);
        }
        let entries = lowering
            .iter()
            .map(|m| {
                let mut nz = Vec::new();
                for r in 0..m.rows() {
                    for c in 0..m.cols() {
                        if m[(r, c)] != ZERO {
                            nz.push((r, c, m[(r, c)].re));
                        }
                    }
                }
                nz
            })
            .collect();
        Ok(Self {
            space,
            detunings: detunings.to_vec(),
            lowering,
            raising,
            entries,
        })
    }

    pub fn new(params: &ModelParams) -> Result<Self> {
        params.validate()?;
        Self::from_parts(&params.couplings_g, &params.detunings_tau, params.photon_cutoff)
    }

    pub fn space(&self) -> &HilbertSpace {
        &self.space
    }

    /// `H(t)` as a matrix.
    pub fn at(&self, t: f64) -> ComplexMatrix {
        let d = self.space.dim();
        let mut h = ComplexMatrix::zeros(d, d);
        for ((tau, low), up) in self.detunings.iter().zip(&self.lowering).zip(&self.raising) {
            h.add_scaled(C64::from_polar(1.0, -tau * t), low);
            h.add_scaled(C64::from_polar(1.0, tau * t), up);
        }
        h
    }
}

impl TimeDependentHamiltonian for InteractionHamiltonian {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        out.fill(ZERO);
        for (tau, entries) in self.detunings.iter().zip(&self.entries) {
            let phase = C64::from_polar(1.0, -tau * t);
            let conj = phase.conj();
            for &(r, c, v) in entries {
                out[r] += phase * v * psi[c];
                out[c] += conj * v * psi[r];
            }
        }
    }

    fn norm_bound(&self) -> f64 {
        self.lowering
            .iter()
            .chain(&self.raising)
            .map(ComplexMatrix::norm_inf)
            .sum()
    }
}

/// Interaction-picture Hamiltonian evaluated at time `t`.
pub fn h_interaction(t: f64, params: &ModelParams) -> Result<ComplexMatrix> {
    Ok(InteractionHamiltonian::new(params)?.at(t))
}

/// Dispersive effective Hamiltonian
/// `λ Σ_{i,j} (σ_j⁺σ_i⁻ a a† − σ_j⁻σ_i⁺ a†a)`, double sum taken literally
/// including `i = j`.
pub fn h_effective(params: &ModelParams) -> Result<ComplexMatrix> {
    params.validate()?;
    params.ensure_dispersive()?;
    let lambda = params.lambda().ok_or_else(|| {
        invalid(
            "couplings_g",
            "effective Hamiltonian needs identical g and tau on every qubit",
        )
    })?;
    let n = params.n_qubits();
    let space = params.space();
    let a = embed(&annihilation(params.photon_cutoff), n, &space)?;
    let a_dag = a.adjoint();
    let a_a_dag = &a * &a_dag;
    let a_dag_a = &a_dag * &a;
    let plus: Vec<ComplexMatrix> = (0..n)
        .map(|j| embed(&sigma_plus(), j, &space))
        .collect::<Result<_>>()?;
    let minus: Vec<ComplexMatrix> = (0..n)
        .map(|j| embed(&sigma_minus(), j, &space))
        .collect::<Result<_>>()?;

    let d = space.dim();
    let mut qubit_exchange = ComplexMatrix::zeros(d, d);
    let mut reverse_exchange = ComplexMatrix::zeros(d, d);
    for i in 0..n {
        for j in 0..n {
            qubit_exchange += &(&plus[j] * &minus[i]);
            reverse_exchange += &(&minus[j] * &plus[i]);
        }
    }
    let h = &(&qubit_exchange * &a_a_dag) - &(&reverse_exchange * &a_dag_a);
    Ok(h.scale_real(lambda))
}

/// Total excitation number `Σ_j σ_j⁺σ_j⁻ + a†a`.
pub fn excitation_number(params: &ModelParams) -> Result<ComplexMatrix> {
    let n = params.n_qubits();
    let space = params.space();
    let mut total = embed(&number_operator(params.photon_cutoff), n, &space)?;
    let excited = &sigma_plus() * &sigma_minus();
    for j in 0..n {
        total += &embed(&excited, j, &space)?;
    }
    Ok(total)
}

/// Photon number `a†a` on the full qubits-plus-cavity space.
pub fn photon_number(params: &ModelParams) -> Result<ComplexMatrix> {
    embed(
        &number_operator(params.photon_cutoff),
        params.n_qubits(),
        &params.space(),
    )
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda >= 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(invalid("lambda", format!("must be finite and >= 0, got {lambda}")))
    }
}

/// Two-qubit vacuum-sector Hamiltonian
/// `λ [Σ_j |1⟩_j⟨1| + σ₁⁺σ₂⁻ + σ₁⁻σ₂⁺]`.
pub fn h_reduced_two_qubit(lambda: f64) -> Result<ComplexMatrix> {
    check_lambda(lambda)?;
    let space = HilbertSpace::qubits(2)?;
    let excited = &sigma_plus() * &sigma_minus();
    let mut h = embed(&excited, 0, &space)?;
    h += &embed(&excited, 1, &space)?;
    let sp = |j| embed(&sigma_plus(), j, &space);
    let sm = |j| embed(&sigma_minus(), j, &space);
    h += &(&sp(0)? * &sm(1)?);
    h += &(&sm(0)? * &sp(1)?);
    Ok(h.scale_real(lambda))
}

/// Closed-form `exp(-i t H₂₀)`: identity on |00⟩, entries
/// `(e^{-2iλt} ± 1)/2` on the {|10⟩, |01⟩} block and `e^{-2iλt}` on |11⟩.
pub fn analytic_u(lambda: f64, t: f64) -> Result<ComplexMatrix> {
    check_lambda(lambda)?;
    let space = HilbertSpace::qubits(2)?;
    let idx = |a, b| space.basis_index(&[a, b]).expect("two-qubit levels");
    let phase = C64::from_polar(1.0, -2.0 * lambda * t);
    let diag = (phase + ONE) * 0.5;
    let off = (phase - ONE) * 0.5;
    let mut u = ComplexMatrix::zeros(4, 4);
    u[(idx(0, 0), idx(0, 0))] = ONE;
    u[(idx(1, 0), idx(1, 0))] = diag;
    u[(idx(0, 1), idx(0, 1))] = diag;
    u[(idx(1, 0), idx(0, 1))] = off;
    u[(idx(0, 1), idx(1, 0))] = off;
    u[(idx(1, 1), idx(1, 1))] = phase;
    Ok(u)
}

/// Block of `op` between product states whose cavity level is `photons`,
/// indexed by the qubit configuration.
pub fn cavity_sector(op: &ComplexMatrix, params: &ModelParams, photons: usize) -> ComplexMatrix {
    let n = params.n_qubits();
    let levels = params.photon_cutoff + 1;
    let q = 1usize << n;
    ComplexMatrix::from_fn(q, q, |i, j| op[(i * levels + photons, j * levels + photons)])
}
