//! Fixed-step fourth-order Runge–Kutta integrators for the Schrödinger
//! equation and for the two-qubit master equation.
//!
//! Neither integrator renormalizes its state. Norm, trace, Hermiticity and
//! positivity are recorded as diagnostics at every snapshot and a run that
//! leaves the accepted band is returned as an error.

use crate::algebra::{
    embed, fidelity, sigma_minus, sigma_plus, sigma_z, ComplexMatrix, DensityMatrix,
    HilbertSpace, PureState, C64, I, ZERO,
};
use crate::error::{invalid, Error, Result};

/// Upper bound on `dt · ‖generator‖` accepted by both integrators.
pub const STABILITY_LIMIT: f64 = 0.1;
/// Steps per unit of `duration · ‖generator‖` used by [`default_steps`].
pub const STEPS_PER_RADIAN: f64 = 40.0;
/// Largest accepted `|‖ψ‖ - 1|` over a Schrödinger run.
pub const MAX_NORM_DRIFT: f64 = 1e-6;
/// Largest accepted `|tr ρ - 1|` over a master-equation run.
pub const MAX_TRACE_DRIFT: f64 = 1e-8;
/// Largest accepted `max |ρ - ρ†|` over a master-equation run.
pub const MAX_HERMITICITY_ERROR: f64 = 1e-10;
/// Smallest accepted eigenvalue of ρ over a master-equation run.
pub const MIN_EIGENVALUE: f64 = -1e-8;

/// Uniform time grid. Snapshots are kept every `record_every` steps and at
/// the final step.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TimeGrid {
    pub t_start: f64,
    pub t_end: f64,
    pub steps: usize,
    record_every: usize,
}

impl TimeGrid {
    pub fn new(t_start: f64, t_end: f64, steps: usize) -> Result<Self> {
        if !(t_end > t_start) || !t_start.is_finite() || !t_end.is_finite() {
            return Err(invalid("t_end", format!("must exceed t_start = {t_start}")));
        }
        if steps < 1 {
            return Err(invalid("steps", "must be at least 1"));
        }
        Ok(Self {
            t_start,
            t_end,
            steps,
            record_every: 1,
        })
    }

    /// Grid from zero to `duration`.
    pub fn span(duration: f64, steps: usize) -> Result<Self> {
        Self::new(0.0, duration, steps)
    }

    /// Keep a snapshot only every `every` steps (the final step is always kept).
    /// `usize::MAX` keeps only the initial and final states.
    pub fn recording_every(mut self, every: usize) -> Result<Self> {
        if every < 1 {
            return Err(invalid("record_every", "must be at least 1"));
        }
        self.record_every = every;
        Ok(self)
    }

    pub fn record_every(&self) -> usize {
        self.record_every
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }

    pub fn dt(&self) -> f64 {
        self.duration() / self.steps as f64
    }

    /// Time after `k` steps.
    pub fn time(&self, k: usize) -> f64 {
        if k == self.steps {
            self.t_end
        } else {
            self.t_start + k as f64 * self.dt()
        }
    }

    fn records(&self, k: usize) -> bool {
        k == self.steps || k % self.record_every == 0
    }
}

/// `ceil(40 · duration · max(‖H‖, Σ rates))`, at least one step.
pub fn default_steps(duration: f64, h_norm: f64, total_rate: f64) -> usize {
    ((STEPS_PER_RADIAN * duration * h_norm.max(total_rate)).ceil() as usize).max(1)
}

fn check_stability(grid: &TimeGrid, generator_norm: f64) -> Result<()> {
    let product = grid.dt() * generator_norm;
    if product < STABILITY_LIMIT {
        Ok(())
    } else {
        Err(Error::StepTooLarge {
            product,
            limit: STABILITY_LIMIT,
            required_steps: (grid.duration() * generator_norm / STABILITY_LIMIT).floor() as usize + 1,
        })
    }
}

/// Per-qubit relaxation and pure-dephasing rates, in rad/s.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseSpec {
    pub relaxation_gamma: Vec<f64>,
    pub dephasing_gamma_phi: Vec<f64>,
}

impl NoiseSpec {
    pub fn new(relaxation_gamma: Vec<f64>, dephasing_gamma_phi: Vec<f64>) -> Result<Self> {
        if relaxation_gamma.len() != dephasing_gamma_phi.len() {
            return Err(invalid(
                "dephasing_gamma_phi",
                format!(
                    "{} dephasing rates for {} relaxation rates",
                    dephasing_gamma_phi.len(),
                    relaxation_gamma.len()
                ),
            ));
        }
        for &rate in relaxation_gamma.iter().chain(&dephasing_gamma_phi) {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(invalid("rate", format!("must be finite and >= 0, got {rate}")));
            }
        }
        Ok(Self {
            relaxation_gamma,
            dephasing_gamma_phi,
        })
    }

    /// Same `γ` and `γ_φ` on each of `n` qubits.
    pub fn uniform(n: usize, gamma: f64, gamma_phi: f64) -> Result<Self> {
        Self::new(vec![gamma; n], vec![gamma_phi; n])
    }

    pub fn noiseless(n: usize) -> Self {
        Self {
            relaxation_gamma: vec![0.0; n],
            dephasing_gamma_phi: vec![0.0; n],
        }
    }

    pub fn n_qubits(&self) -> usize {
        self.relaxation_gamma.len()
    }

    /// `Σ_j (γ_j + γ_φj)`.
    pub fn total_rate(&self) -> f64 {
        self.relaxation_gamma.iter().sum::<f64>() + self.dephasing_gamma_phi.iter().sum::<f64>()
    }
}

/// Numerical health of one snapshot.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Diagnostics {
    /// `|‖ψ‖ - 1|` for pure states, `|tr ρ - 1|` for density matrices.
    pub norm_drift: f64,
    /// `|tr ρ - 1|`, or `|⟨ψ|ψ⟩ - 1|` for pure states.
    pub trace_drift: f64,
    /// `max |ρ - ρ†|`; zero for pure states.
    pub hermiticity_error: f64,
    /// Smallest eigenvalue of ρ; zero for pure states of dimension > 1.
    pub min_eigenvalue: f64,
}

/// Snapshots of one integration run.
#[derive(Clone, Debug)]
pub struct SimResult<S> {
    pub times: Vec<f64>,
    pub states: Vec<S>,
    pub diagnostics: Vec<Diagnostics>,
    pub steps: usize,
}

impl<S> SimResult<S> {
    pub fn final_state(&self) -> &S {
        self.states.last().expect("a run records at least its endpoints")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("a run records at least its endpoints")
    }

    pub fn max_norm_drift(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.norm_drift).fold(0.0, f64::max)
    }

    pub fn max_trace_drift(&self) -> f64 {
        self.diagnostics.iter().map(|d| d.trace_drift).fold(0.0, f64::max)
    }

    pub fn max_hermiticity_error(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.hermiticity_error)
            .fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.diagnostics
            .iter()
            .map(|d| d.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

/// A Hamiltonian `H(t)` that can act on state vectors.
pub trait TimeDependentHamiltonian {
    fn dim(&self) -> usize;

    /// `out = H(t) ψ`.
    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]);

    /// Upper bound on `‖H(t)‖` over all times.
    fn norm_bound(&self) -> f64;
}

impl TimeDependentHamiltonian for ComplexMatrix {
    fn dim(&self) -> usize {
        self.rows()
    }

    fn apply(&self, _t: f64, psi: &[C64], out: &mut [C64]) {
        self.apply_into(psi, out);
    }

    fn norm_bound(&self) -> f64 {
        self.norm_inf()
    }
}

/// Hamiltonian given as a closure returning the matrix at each time.
pub struct FnHamiltonian<F> {
    f: F,
    dim: usize,
    norm_bound: f64,
}

impl<F: Fn(f64) -> ComplexMatrix> FnHamiltonian<F> {
    /// `norm_bound` must bound `‖f(t)‖` for every `t` the integrator visits.
    pub fn new(dim: usize, norm_bound: f64, f: F) -> Self {
        Self { f, dim, norm_bound }
    }
}

impl<F: Fn(f64) -> ComplexMatrix> TimeDependentHamiltonian for FnHamiltonian<F> {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, t: f64, psi: &[C64], out: &mut [C64]) {
        (self.f)(t).apply_into(psi, out);
    }

    fn norm_bound(&self) -> f64 {
        self.norm_bound
    }
}

fn pure_diagnostics(psi: &[C64]) -> Diagnostics {
    let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    Diagnostics {
        norm_drift: (norm_sqr.sqrt() - 1.0).abs(),
        trace_drift: (norm_sqr - 1.0).abs(),
        hermiticity_error: 0.0,
        min_eigenvalue: if psi.len() > 1 { 0.0 } else { norm_sqr },
    }
}

/// RK4 on `dψ/dt = -i H(t) ψ`, calling `observer(step, t, ψ)` after every
/// step (and once for the initial state). Returns the final state.
pub fn propagate_schrodinger_observed<H, F>(
    h: &H,
    psi0: &PureState,
    grid: &TimeGrid,
    mut observer: F,
) -> Result<PureState>
where
    H: TimeDependentHamiltonian + ?Sized,
    F: FnMut(usize, f64, &[C64]),
{
    let d = h.dim();
    if psi0.space().dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "state of dimension {} under Hamiltonian of dimension {d}",
            psi0.space().dim()
        )));
    }
    let initial_drift = (psi0.norm() - 1.0).abs();
    if initial_drift > crate::algebra::NORM_TOL {
        return Err(Error::InvalidState(format!(
            "initial norm differs from 1 by {initial_drift:.3e}"
        )));
    }
    check_stability(grid, h.norm_bound())?;

    let dt = grid.dt();
    let mut psi = psi0.amplitudes().to_vec();
    let mut k1 = vec![ZERO; d];
    let mut k2 = vec![ZERO; d];
    let mut k3 = vec![ZERO; d];
    let mut k4 = vec![ZERO; d];
    let mut tmp = vec![ZERO; d];
    // f(t, ψ) = -i H(t) ψ
    let deriv = |t: f64, v: &[C64], out: &mut [C64]| {
        h.apply(t, v, out);
        out.iter_mut().for_each(|z| *z *= -I);
    };

    observer(0, grid.t_start, &psi);
    let mut max_drift = initial_drift;
    for step in 0..grid.steps {
        let t = grid.time(step);
        deriv(t, &psi, &mut k1);
        axpy_into(&psi, 0.5 * dt, &k1, &mut tmp);
        deriv(t + 0.5 * dt, &tmp, &mut k2);
        axpy_into(&psi, 0.5 * dt, &k2, &mut tmp);
        deriv(t + 0.5 * dt, &tmp, &mut k3);
        axpy_into(&psi, dt, &k3, &mut tmp);
        deriv(t + dt, &tmp, &mut k4);
        let w = dt / 6.0;
        for i in 0..d {
            psi[i] += w * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let t_next = grid.time(step + 1);
        let drift = pure_diagnostics(&psi).norm_drift;
        max_drift = max_drift.max(drift);
        if !(drift < MAX_NORM_DRIFT) {
            return Err(Error::Diagnostics {
                time: t_next,
                reason: format!("norm drift {drift:.3e} exceeds {MAX_NORM_DRIFT:e}"),
            });
        }
        observer(step + 1, t_next, &psi);
    }
    Ok(PureState::from_evolved(psi0.space().clone(), psi))
}

/// `out = x + a·y`.
fn axpy_into(x: &[C64], a: f64, y: &[C64], out: &mut [C64]) {
    for ((o, &xi), &yi) in out.iter_mut().zip(x).zip(y) {
        *o = xi + a * yi;
    }
}

/// RK4 Schrödinger propagation with snapshots on the grid.
pub fn propagate_schrodinger<H>(
    h: &H,
    psi0: &PureState,
    grid: &TimeGrid,
) -> Result<SimResult<PureState>>
where
    H: TimeDependentHamiltonian + ?Sized,
{
    let space = psi0.space().clone();
    let mut result = SimResult {
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
        steps: grid.steps,
    };
    propagate_schrodinger_observed(h, psi0, grid, |step, t, psi| {
        if grid.records(step) {
            result.times.push(t);
            result.states.push(PureState::from_evolved(space.clone(), psi.to_vec()));
            result.diagnostics.push(pure_diagnostics(psi));
        }
    })?;
    Ok(result)
}

/// Right-hand side of the two-qubit (in general `n`-qubit) master equation
///
/// `dρ/dt = -i[H, ρ] + Σ_j (γ_φj/2)(σ_zj ρ σ_zj - ρ)
///          + Σ_j (γ_j/4)(σ_j⁻ ρ σ_j⁺ - ½σ_j⁺σ_j⁻ρ - ½ρσ_j⁺σ_j⁻)`.
///
/// The relaxation prefactor is `γ/4` (not the common `γ/2`), so a population
/// in `|1⟩_j` decays at rate `γ_j/4`; dephasing contributes `γ_φj` to the
/// decay rate of any coherence that flips qubit `j`.
#[derive(Clone, Debug)]
pub struct LindbladGenerator {
    h: ComplexMatrix,
    dephasing: Vec<(f64, ComplexMatrix)>,
    relaxation: Vec<Relaxation>,
}

#[derive(Clone, Debug)]
struct Relaxation {
    rate: f64,
    lower: ComplexMatrix,
    raise: ComplexMatrix,
    excited: ComplexMatrix,
}

impl LindbladGenerator {
    pub fn new(h: &ComplexMatrix, noise: &NoiseSpec) -> Result<Self> {
        let n = noise.n_qubits();
        let space = HilbertSpace::qubits(n)?;
        if !h.is_square() || h.rows() != space.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} Hamiltonian for {n} noisy qubits",
                h.rows(),
                h.cols()
            )));
        }
        if !h.is_hermitian(crate::algebra::HERMITIAN_TOL) {
            return Err(Error::NotHermitian(h.hermiticity_error()));
        }
        let mut dephasing = Vec::new();
        let mut relaxation = Vec::new();
        for j in 0..n {
            let gamma_phi = noise.dephasing_gamma_phi[j];
            if gamma_phi > 0.0 {
                dephasing.push((0.5 * gamma_phi, embed(&sigma_z(), j, &space)?));
            }
            let gamma = noise.relaxation_gamma[j];
            if gamma > 0.0 {
                let lower = embed(&sigma_minus(), j, &space)?;
                let raise = embed(&sigma_plus(), j, &space)?;
                let excited = &raise * &lower;
                relaxation.push(Relaxation {
                    rate: 0.25 * gamma,
                    lower,
                    raise,
                    excited,
                });
            }
        }
        Ok(Self {
            h: h.clone(),
            dephasing,
            relaxation,
        })
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// Bound on the generator used by the stability guard:
    /// `‖H‖ + Σ_j (γ_j + γ_φj)`.
    pub fn norm_bound(&self, noise: &NoiseSpec) -> f64 {
        self.h.norm_inf() + noise.total_rate()
    }

    pub fn rhs(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let commutator = &(&self.h * rho) - &(rho * &self.h);
        let mut out = commutator.scale(-I);
        for (half_rate, z) in &self.dephasing {
            let flipped = &(z * rho) * z;
            out.add_scaled(C64::new(*half_rate, 0.0), &(&flipped - rho));
        }
        for r in &self.relaxation {
            let jump = &(&r.lower * rho) * &r.raise;
            let anti = &(&r.excited * rho) + &(rho * &r.excited);
            out.add_scaled(C64::new(r.rate, 0.0), &jump);
            out.add_scaled(C64::new(-0.5 * r.rate, 0.0), &anti);
        }
        out
    }
}

/// `dρ/dt` of the master equation at `ρ`.
pub fn lindblad_rhs(
    rho: &DensityMatrix,
    h_eff: &ComplexMatrix,
    noise: &NoiseSpec,
) -> Result<ComplexMatrix> {
    let generator = LindbladGenerator::new(h_eff, noise)?;
    if rho.space().dim() != generator.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix of dimension {} for generator of dimension {}",
            rho.space().dim(),
            generator.dim()
        )));
    }
    Ok(generator.rhs(rho.matrix()))
}

fn density_diagnostics(rho: &DensityMatrix) -> Result<Diagnostics> {
    let d = rho.diagnose()?;
    Ok(Diagnostics {
        norm_drift: d.trace_error,
        trace_drift: d.trace_error,
        hermiticity_error: d.hermiticity_error,
        min_eigenvalue: d.min_eigenvalue,
    })
}

fn check_density(time: f64, d: &Diagnostics) -> Result<()> {
    let reason = if !(d.trace_drift < MAX_TRACE_DRIFT) {
        format!("trace drift {:.3e} exceeds {MAX_TRACE_DRIFT:e}", d.trace_drift)
    } else if !(d.hermiticity_error < MAX_HERMITICITY_ERROR) {
        format!(
            "Hermiticity error {:.3e} exceeds {MAX_HERMITICITY_ERROR:e}",
            d.hermiticity_error
        )
    } else if !(d.min_eigenvalue > MIN_EIGENVALUE) {
        format!("eigenvalue {:.3e} below {MIN_EIGENVALUE:e}", d.min_eigenvalue)
    } else {
        return Ok(());
    };
    Err(Error::Diagnostics { time, reason })
}

/// RK4 integration of the master equation. Every snapshot is diagnosed; a
/// snapshot outside the accepted band fails the run.
pub fn integrate_lindblad(
    h_eff: &ComplexMatrix,
    rho0: &DensityMatrix,
    noise: &NoiseSpec,
    grid: &TimeGrid,
) -> Result<SimResult<DensityMatrix>> {
    let generator = LindbladGenerator::new(h_eff, noise)?;
    if rho0.space().dim() != generator.dim() {
        return Err(Error::DimensionMismatch(format!(
            "density matrix of dimension {} for generator of dimension {}",
            rho0.space().dim(),
            generator.dim()
        )));
    }
    check_stability(grid, generator.norm_bound(noise))?;

    let space = rho0.space().clone();
    let dt = grid.dt();
    let mut rho = rho0.matrix().clone();
    let mut result = SimResult {
        times: Vec::new(),
        states: Vec::new(),
        diagnostics: Vec::new(),
        steps: grid.steps,
    };
    let record = |t: f64, rho: &ComplexMatrix, result: &mut SimResult<DensityMatrix>| {
        let state = DensityMatrix::from_evolved(space.clone(), rho.clone());
        let diag = density_diagnostics(&state)?;
        check_density(t, &diag)?;
        result.times.push(t);
        result.states.push(state);
        result.diagnostics.push(diag);
        Ok::<(), Error>(())
    };
    record(grid.t_start, &rho, &mut result)?;

    let half = C64::new(0.5 * dt, 0.0);
    let full = C64::new(dt, 0.0);
    for step in 0..grid.steps {
        let k1 = generator.rhs(&rho);
        let mut probe = rho.clone();
        probe.add_scaled(half, &k1);
        let k2 = generator.rhs(&probe);
        probe = rho.clone();
        probe.add_scaled(half, &k2);
        let k3 = generator.rhs(&probe);
        probe = rho.clone();
        probe.add_scaled(full, &k3);
        let k4 = generator.rhs(&probe);
        let w = C64::new(dt / 6.0, 0.0);
        rho.add_scaled(w, &k1);
        rho.add_scaled(2.0 * w, &k2);
        rho.add_scaled(2.0 * w, &k3);
        rho.add_scaled(w, &k4);
        if grid.records(step + 1) {
            record(grid.time(step + 1), &rho, &mut result)?;
        }
    }
    Ok(result)
}

/// `D = 1 - ⟨target|ρ|target⟩`.
pub fn error_probability(rho_final: &DensityMatrix, target: &PureState) -> Result<f64> {
    Ok(1.0 - fidelity(rho_final, target)?)
}
