//! Experiments built from the lower layers: EPR-pair generation, spectator
//! decoupling, validity of the dispersive reduction and the decoherence
//! sweep of the EPR error probability.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::algebra::{
    concurrence, fidelity, partial_trace, DensityMatrix, HilbertSpace, PureState, Spectral, C64,
    I, ZERO,
};
use crate::dynamics::{
    default_steps, error_probability, integrate_lindblad, propagate_schrodinger_observed,
    NoiseSpec, SimResult, TimeDependentHamiltonian, TimeGrid,
};
use crate::error::{invalid, Error, Result};
use crate::hamiltonians::{
    h_effective, h_reduced_two_qubit, InteractionHamiltonian, ModelParams,
};

const TWO_PI_MHZ: f64 = 2.0 * PI * 1e6;

/// `t₀ = π / (4λ)`, the time at which `|10⟩` becomes an EPR pair.
pub fn gate_time_t0(lambda: f64) -> Result<f64> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(PI / (4.0 * lambda))
    } else {
        Err(invalid("lambda", format!("must be finite and > 0, got {lambda}")))
    }
}

/// Two-qubit operating point: `g/2π = 100 MHz`, `τ = 10 g`.
pub fn reference_params() -> ModelParams {
    let g = 100.0 * TWO_PI_MHZ;
    ModelParams::uniform(2, g, 10.0 * g).expect("reference parameters are valid")
}

/// `|10⟩` on two qubits.
pub fn initial_state() -> PureState {
    PureState::basis(two_qubits(), &[1, 0]).expect("two-qubit levels")
}

/// `(|10⟩ − i|01⟩)/√2`.
pub fn epr_target() -> PureState {
    let space = two_qubits();
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut amps = vec![ZERO; 4];
    amps[space.basis_index(&[1, 0]).expect("levels")] = C64::new(s, 0.0);
    amps[space.basis_index(&[0, 1]).expect("levels")] = -I * s;
    PureState::new(space, amps).expect("normalized")
}

fn two_qubits() -> HilbertSpace {
    HilbertSpace::qubits(2).expect("two qubits")
}

/// Outcome of one EPR-generation run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EprReport {
    pub t0: f64,
    pub fidelity: f64,
    pub error_d: f64,
    pub concurrence: f64,
    pub steps: usize,
    pub max_trace_drift: f64,
    pub max_hermiticity_error: f64,
    pub min_eigenvalue: f64,
}

fn epr_lambda(p: &ModelParams) -> Result<f64> {
    p.validate()?;
    if p.n_qubits() != 2 {
        return Err(invalid(
            "couplings_g",
            format!("EPR generation needs 2 qubits, got {}", p.n_qubits()),
        ));
    }
    p.ensure_dispersive()?;
    let lambda = p
        .lambda()
        .ok_or_else(|| invalid("couplings_g", "both qubits must share g and tau"))?;
    if lambda <= 0.0 {
        return Err(invalid("detunings_tau", "a positive exchange g^2/tau is required"));
    }
    Ok(lambda)
}

/// Full EPR run: `|10⟩` evolved under the vacuum-sector exchange Hamiltonian
/// with the given noise for `t₀`. `steps = None` uses [`default_steps`].
pub fn epr_generation_run(
    p: &ModelParams,
    noise: &NoiseSpec,
    steps: Option<usize>,
) -> Result<(EprReport, SimResult<DensityMatrix>)> {
    let lambda = epr_lambda(p)?;
    if noise.n_qubits() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "noise for {} qubits in a two-qubit run",
            noise.n_qubits()
        )));
    }
    let t0 = gate_time_t0(lambda)?;
    let h = h_reduced_two_qubit(lambda)?;
    let steps = steps.unwrap_or_else(|| default_steps(t0, h.norm_inf(), noise.total_rate()));
    let grid = TimeGrid::span(t0, steps)?;
    let run = integrate_lindblad(&h, &initial_state().to_density_matrix(), noise, &grid)?;
    let rho = run.final_state();
    let target = epr_target();
    let fid = fidelity(rho, &target)?;
    let report = EprReport {
        t0,
        fidelity: fid,
        error_d: error_probability(rho, &target)?,
        concurrence: concurrence(rho)?,
        steps,
        max_trace_drift: run.max_trace_drift(),
        max_hermiticity_error: run.max_hermiticity_error(),
        min_eigenvalue: run.min_eigenvalue(),
    };
    Ok((report, run))
}

pub fn epr_generation(p: &ModelParams, noise: &NoiseSpec) -> Result<EprReport> {
    epr_generation_run(p, noise, None).map(|(report, _)| report)
}

/// Steps for the cavity-resolved model: the fast phases `e^{±iτt}` must be
/// resolved as well as the coupling strength.
fn full_model_steps(h: &InteractionHamiltonian, detunings: &[f64], duration: f64) -> usize {
    let fastest = detunings.iter().map(|t| t.abs()).fold(0.0, f64::max);
    default_steps(duration, h.norm_bound().max(fastest), 0.0)
}

/// Level of `subsystem` for every basis index.
fn level_table(space: &HilbertSpace, subsystem: usize) -> Vec<usize> {
    (0..space.dim()).map(|i| space.levels(i)[subsystem]).collect()
}

/// Population outside level 0, given the subsystem's [`level_table`].
fn excited_population(levels: &[usize], psi: &[C64]) -> f64 {
    levels
        .iter()
        .zip(psi)
        .filter(|(&l, _)| l != 0)
        .map(|(_, z)| z.norm_sqr())
        .sum()
}

/// Spectator detuning relative to the active pair.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum SpectatorDetuning {
    /// `τ_spec = R · τ_active`.
    Ratio(f64),
    /// Spectators fully uncoupled (`g = 0`), the `R → ∞` limit.
    Decoupled,
}

/// How far spectators are disturbed while the active pair is entangled.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SelectiveReport {
    pub t0: f64,
    pub spectators: Vec<usize>,
    /// `max_t (1 − ⟨0|ρ_spec(t)|0⟩)` over `[0, t₀]`, per spectator.
    pub max_deviation: Vec<f64>,
    /// `1 − ⟨0|ρ_spec(t₀)|0⟩`, per spectator.
    pub final_deviation: Vec<f64>,
    /// Fidelity of the active pair's reduced state with the EPR target.
    pub active_fidelity: f64,
    pub steps: usize,
}

/// Entangles qubits `active = [a, b]` (`a < b`, `a` starts excited, all
/// other qubits and the cavity start in the ground state) in the full
/// cavity model, with every other qubit detuned as `spectator` prescribes.
/// The active pair keeps its couplings and detunings from `p`, which must
/// be equal.
pub fn selective_coupling_check(
    p: &ModelParams,
    active: [usize; 2],
    spectator: SpectatorDetuning,
) -> Result<SelectiveReport> {
    p.validate()?;
    let n = p.n_qubits();
    if n < 3 {
        return Err(invalid("couplings_g", format!("need at least 3 qubits, got {n}")));
    }
    let [a, b] = active;
    if !(a < b && b < n) {
        return Err(Error::InvalidSubsystem(format!(
            "active pair {active:?} must be increasing and below {n}"
        )));
    }
    let (g, tau) = (p.couplings_g[a], p.detunings_tau[a]);
    if p.couplings_g[b] != g || p.detunings_tau[b] != tau {
        return Err(invalid("couplings_g", "active qubits must share g and tau"));
    }
    let spectators: Vec<usize> = (0..n).filter(|&j| j != a && j != b).collect();
    let mut couplings = p.couplings_g.clone();
    let mut detunings = p.detunings_tau.clone();
    for &j in &spectators {
        match spectator {
            SpectatorDetuning::Ratio(r) => {
                if !(r >= 1.0 && r.is_finite()) {
                    return Err(invalid("spectator_ratio", format!("must be >= 1, got {r}")));
                }
                detunings[j] = r * tau;
            }
            SpectatorDetuning::Decoupled => couplings[j] = 0.0,
        }
    }
    let h = InteractionHamiltonian::from_parts(&couplings, &detunings, p.photon_cutoff)?;
    let space = h.space().clone();
    let t0 = gate_time_t0(g * g / tau)?;
    let steps = full_model_steps(&h, &detunings, t0);
    let grid = TimeGrid::span(t0, steps)?;

    let mut levels = vec![0; n + 1];
    levels[a] = 1;
    let psi0 = PureState::basis(space.clone(), &levels)?;
    let tables: Vec<_> = spectators.iter().map(|&j| level_table(&space, j)).collect();
    let mut max_deviation = vec![0.0_f64; spectators.len()];
    let psi = propagate_schrodinger_observed(&h, &psi0, &grid, |_, _, psi| {
        for (m, levels) in max_deviation.iter_mut().zip(&tables) {
            *m = m.max(excited_population(levels, psi));
        }
    })?;
    let final_deviation = tables
        .iter()
        .map(|levels| excited_population(levels, psi.amplitudes()))
        .collect();
    let pair = partial_trace(&psi.to_density_matrix(), &[a, b])?;
    Ok(SelectiveReport {
        t0,
        spectators,
        max_deviation,
        final_deviation,
        active_fidelity: fidelity(&pair, &epr_target())?,
        steps,
    })
}

/// Comparison of the cavity-resolved model with the dispersive reduction.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DispersiveReport {
    /// `min |τ|/g`.
    pub ratio: f64,
    pub t0: f64,
    /// Fidelity at `t₀` between the full model's reduced qubit state and the
    /// effective model's qubit state.
    pub final_fidelity: f64,
    /// Largest infidelity over the last fast period `[t₀ − 2π/|τ|, t₀]`.
    /// Unlike the value at the single instant `t₀`, this is insensitive to
    /// where `t₀` lands on the fast photon oscillation.
    pub window_infidelity: f64,
    /// `max_t ⟨a†a⟩` over `[0, t₀]`.
    pub max_photon_number: f64,
    /// Max entry difference of the reduced final state between photon
    /// cutoffs `N` and `N + 1`.
    pub cutoff_convergence: f64,
    pub steps: usize,
    pub max_norm_drift: f64,
}

struct FullRun {
    reduced: DensityMatrix,
    window_infidelity: f64,
    max_photon_number: f64,
    max_norm_drift: f64,
    steps: usize,
}

fn run_full_model(p: &ModelParams, lambda: f64, t0: f64) -> Result<FullRun> {
    let h = InteractionHamiltonian::new(p)?;
    let space = h.space().clone();
    let photons_at = level_table(&space, p.n_qubits());
    let steps = full_model_steps(&h, &p.detunings_tau, t0);
    let grid = TimeGrid::span(t0, steps)?;
    let window_start = t0 - 2.0 * PI / p.detunings_tau.iter().map(|t| t.abs()).fold(0.0, f64::max);

    let effective = Spectral::new(&h_reduced_two_qubit(lambda)?)?;
    let qubit_space = two_qubits();
    let start = initial_state();
    let mut psi0 = vec![ZERO; space.dim()];
    psi0[space.basis_index(&[1, 0, 0])?] = C64::new(1.0, 0.0);
    let psi0 = PureState::new(space.clone(), psi0)?;

    let mut window_infidelity: f64 = 0.0;
    let mut max_photon_number: f64 = 0.0;
    let mut max_norm_drift: f64 = 0.0;
    let mut failure = None;
    let psi = propagate_schrodinger_observed(&h, &psi0, &grid, |_, t, psi| {
        let photons: f64 = photons_at
            .iter()
            .zip(psi)
            .map(|(&n, z)| n as f64 * z.norm_sqr())
            .sum();
        max_photon_number = max_photon_number.max(photons);
        let norm_sqr: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        max_norm_drift = max_norm_drift.max((norm_sqr.sqrt() - 1.0).abs());
        if t >= window_start && failure.is_none() {
            let target = PureState::from_evolved(
                qubit_space.clone(),
                effective.evolve(start.amplitudes(), t),
            );
            let state = PureState::from_evolved(space.clone(), psi.to_vec());
            match state
                .reduced(&[0, 1])
                .and_then(|rho| fidelity(&rho, &target))
            {
                Ok(f) => window_infidelity = window_infidelity.max(1.0 - f),
                Err(e) => failure = Some(e),
            }
        }
    })?;
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(FullRun {
        reduced: psi.reduced(&[0, 1])?,
        window_infidelity,
        max_photon_number,
        max_norm_drift,
        steps,
    })
}

/// Propagates `|10⟩ ⊗ |0⟩_cav` for `t₀` under the full interaction-picture
/// Hamiltonian and under the dispersive effective Hamiltonian, and compares
/// the qubit states.
pub fn dispersive_validity(p: &ModelParams) -> Result<DispersiveReport> {
    let lambda = epr_lambda(p)?;
    let t0 = gate_time_t0(lambda)?;

    let space = p.space();
    let mut psi0 = vec![ZERO; space.dim()];
    psi0[space.basis_index(&[1, 0, 0])?] = C64::new(1.0, 0.0);
    let psi0 = PureState::new(space.clone(), psi0)?;
    let effective = Spectral::new(&h_effective(p)?)?;
    let psi_eff = PureState::from_evolved(space, effective.evolve(psi0.amplitudes(), t0));
    let target_rho = psi_eff.reduced(&[0, 1])?;
    let target = dominant_state(&target_rho)?;

    let full = run_full_model(p, lambda, t0)?;
    let refined = run_full_model(&p.clone().with_cutoff(p.photon_cutoff + 1)?, lambda, t0)?;

    Ok(DispersiveReport {
        ratio: p.dispersive_ratio(),
        t0,
        final_fidelity: fidelity(&full.reduced, &target)?,
        window_infidelity: full.window_infidelity,
        max_photon_number: full.max_photon_number,
        cutoff_convergence: full.reduced.matrix().max_abs_diff(refined.reduced.matrix()),
        steps: full.steps,
        max_norm_drift: full.max_norm_drift,
    })
}

/// Pure state carried by a (numerically) rank-one density matrix.
fn dominant_state(rho: &DensityMatrix) -> Result<PureState> {
    let (values, vectors) = rho.matrix().hermitian_eigen()?;
    let k = values.len() - 1;
    let amps = (0..vectors.rows()).map(|i| vectors[(i, k)]).collect();
    PureState::normalized(rho.space().clone(), amps)
}

/// Error probability over a grid of relaxation and dephasing rates.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepResult {
    /// `γ` values in rad/s (row axis).
    pub gamma_axis: Vec<f64>,
    /// `γ_φ` values in rad/s (column axis).
    pub gamma_phi_axis: Vec<f64>,
    /// `d_grid[i][j]` = D at `(gamma_axis[i], gamma_phi_axis[j])`.
    pub d_grid: Vec<Vec<f64>>,
    pub params: ModelParams,
}

pub const SWEEP_CSV_HEADER: &str = "gamma_over_2pi_MHz,gamma_phi_over_2pi_MHz,error_D";

impl SweepResult {
    /// CSV with rates in MHz (`rate/2π`), `γ` outer and `γ_φ` inner.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(64 * (1 + self.gamma_axis.len() * self.gamma_phi_axis.len()));
        out.push_str(SWEEP_CSV_HEADER);
        out.push('\n');
        for (gamma, row) in self.gamma_axis.iter().zip(&self.d_grid) {
            for (gamma_phi, d) in self.gamma_phi_axis.iter().zip(row) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    format_sci(gamma / TWO_PI_MHZ),
                    format_sci(gamma_phi / TWO_PI_MHZ),
                    format_sci(*d)
                ));
            }
        }
        out
    }

    /// D at the grid point nearest to `(gamma, gamma_phi)`.
    pub fn nearest(&self, gamma: f64, gamma_phi: f64) -> f64 {
        let closest = |axis: &[f64], x: f64| {
            (0..axis.len())
                .min_by(|&i, &j| (axis[i] - x).abs().total_cmp(&(axis[j] - x).abs()))
                .expect("axes are nonempty")
        };
        self.d_grid[closest(&self.gamma_axis, gamma)][closest(&self.gamma_phi_axis, gamma_phi)]
    }
}

/// `%.10e` formatting: ten mantissa decimals, signed exponent of at least
/// two digits.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.10e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mantissa}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

/// `points` evenly spaced angular rates from 0 to `2π · max_mhz` MHz.
pub fn rate_axis(max_mhz: f64, points: usize) -> Result<Vec<f64>> {
    if points < 1 {
        return Err(invalid("points", "must be at least 1"));
    }
    if !(max_mhz >= 0.0 && max_mhz.is_finite()) {
        return Err(invalid("max_mhz", format!("must be finite and >= 0, got {max_mhz}")));
    }
    if points == 1 {
        return Ok(vec![0.0]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|k| TWO_PI_MHZ * max_mhz * k as f64 / last)
        .collect())
}

/// 21 points spanning 0 to 1 MHz (as `rate/2π`).
pub fn default_rate_axis() -> Vec<f64> {
    rate_axis(1.0, 21).expect("valid axis")
}

/// EPR error probability on every `(γ, γ_φ)` pair. Points run in parallel
/// on the current rayon pool; the result does not depend on scheduling.
pub fn decoherence_sweep(
    p: &ModelParams,
    gamma_axis: &[f64],
    gamma_phi_axis: &[f64],
) -> Result<SweepResult> {
    if gamma_axis.is_empty() || gamma_phi_axis.is_empty() {
        return Err(invalid("axis", "sweep axes must be nonempty"));
    }
    epr_lambda(p)?;
    let cols = gamma_phi_axis.len();
    let flat: Vec<f64> = (0..gamma_axis.len() * cols)
        .into_par_iter()
        .map(|k| {
            let noise = NoiseSpec::uniform(2, gamma_axis[k / cols], gamma_phi_axis[k % cols])?;
            epr_generation(p, &noise).map(|r| r.error_d)
        })
        .collect::<Result<_>>()?;
    Ok(SweepResult {
        gamma_axis: gamma_axis.to_vec(),
        gamma_phi_axis: gamma_phi_axis.to_vec(),
        d_grid: flat.chunks(cols).map(<[f64]>::to_vec).collect(),
        params: p.clone(),
    })
}
