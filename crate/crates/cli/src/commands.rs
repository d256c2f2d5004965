//! Subcommand implementations. Each returns the text report printed on
//! stdout; files are written only where an output path is configured.

use std::f64::consts::TAU;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use dqd_core::algebra::Spectral;
use dqd_core::device::{
    bare_frequency, coupling_g, decay_kappa, mixing_angle, phase_shift, renormalized_frequency,
    singlet_splitting, HBAR,
};
use dqd_core::hamiltonians::{analytic_u, h_reduced_two_qubit};
use dqd_core::protocols::{
    decoherence_sweep, dispersive_validity, epr_generation_run, epr_target, format_sci,
    gate_time_t0, rate_axis,
};
use dqd_core::{fidelity, Error as CoreError, ModelParams, NoiseSpec};
use thiserror::Error;

use crate::config::{parse_config, ConfigError, RunConfig};

/// Upper bound accepted for the EPR error probability at the noise point.
pub const D_BOUND: f64 = 0.05;
/// Reference claim for the EPR error probability at the noise point.
pub const D_CLAIM: f64 = 0.01;
/// Minimum fidelity between the cavity-resolved and dispersive models.
pub const MIN_MODEL_FIDELITY: f64 = 0.95;
/// Maximum accepted photon-cutoff sensitivity.
pub const MAX_CUTOFF_SENSITIVITY: f64 = 1e-6;
/// Maximum accepted deviation between closed-form and numerical propagators.
pub const MAX_PROPAGATOR_DEVIATION: f64 = 1e-10;
/// Detuning ratios `τ/g` compared by `validate`.
pub const RATIO_LADDER: [f64; 5] = [5.0, 10.0, 20.0, 50.0, 100.0];

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(#[from] ConfigError),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("I/O error on {path}: {reason}")]
    Io { path: PathBuf, reason: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::Io { .. } => 4,
        }
    }
}

impl From<CoreError> for CliError {
    fn from(e: CoreError) -> Self {
        match e {
            CoreError::Diagnostics { .. } | CoreError::StepTooLarge { .. } | CoreError::Eigen(_) => {
                CliError::Numerical(e.to_string())
            }
            other => CliError::Config(ConfigError {
                path: "model".into(),
                reason: other.to_string(),
            }),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Device,
    Epr,
    Sweep,
    Validate,
}

/// Parsed command line.
#[derive(Clone, Debug)]
pub struct Invocation {
    pub command: Command,
    pub config: PathBuf,
    pub out: Option<PathBuf>,
    /// `None` uses every available core.
    pub threads: Option<usize>,
}

/// Report text plus the error that ends the run, if any. The report is
/// printed even when a check fails.
#[derive(Debug)]
pub struct Outcome {
    pub report: String,
    pub error: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, CliError::exit_code)
    }
}

fn failed(error: CliError) -> Outcome {
    Outcome {
        report: String::new(),
        error: Some(error),
    }
}

pub fn run(inv: &Invocation) -> Outcome {
    let mut cfg = match parse_config(&inv.config) {
        Ok(cfg) => cfg,
        Err(e) => return failed(e.into()),
    };
    if let Some(out) = &inv.out {
        cfg.output.path = Some(out.clone());
    }
    let pool = match rayon::ThreadPoolBuilder::new()
        .num_threads(inv.threads.unwrap_or(0))
        .build()
    {
        Ok(pool) => pool,
        Err(e) => return failed(CliError::Numerical(format!("thread pool: {e}"))),
    };
    pool.install(|| match inv.command {
        Command::Device => simple(cmd_device(&cfg)),
        Command::Epr => simple(cmd_epr(&cfg)),
        Command::Sweep => simple(cmd_sweep(&cfg)),
        Command::Validate => cmd_validate(&cfg),
    })
}

fn simple(result: Result<String, CliError>) -> Outcome {
    match result {
        Ok(report) => Outcome {
            report,
            error: None,
        },
        Err(e) => failed(e),
    }
}

/// `sweep.csv` → `sweep.resolved.json`.
pub fn resolved_path(out: &Path) -> PathBuf {
    out.with_extension("resolved.json")
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        reason: e.to_string(),
    })
}

/// Writes `contents` to the output path (if any) and the normalized config
/// beside it.
fn emit(cfg: &RunConfig, contents: &str) -> Result<Option<PathBuf>, CliError> {
    match &cfg.output.path {
        Some(out) => {
            write_file(out, contents)?;
            write_file(&resolved_path(out), &cfg.dump())?;
            Ok(Some(out.clone()))
        }
        None => Ok(None),
    }
}

fn two_qubit_params(cfg: &RunConfig) -> Result<ModelParams, CliError> {
    if cfg.model.n_qubits != 2 {
        return Err(ConfigError {
            path: "model.n_qubits".into(),
            reason: format!("this command needs 2 qubits, got {}", cfg.model.n_qubits),
        }
        .into());
    }
    Ok(cfg.model_params()?)
}

fn noise(cfg: &RunConfig) -> Result<NoiseSpec, CliError> {
    Ok(NoiseSpec::uniform(
        2,
        TAU * cfg.noise.gamma_over_2pi,
        TAU * cfg.noise.gamma_phi_over_2pi,
    )?)
}

/// `f` in the largest unit that keeps it at or above one.
fn human_frequency(f_hz: f64) -> String {
    let a = f_hz.abs();
    let (scale, unit) = if a >= 1e9 {
        (1e9, "GHz")
    } else if a >= 1e6 {
        (1e6, "MHz")
    } else if a >= 1e3 {
        (1e3, "kHz")
    } else {
        (1.0, "Hz")
    };
    format!("{:.6} {unit}", f_hz / scale)
}

fn angular_line(out: &mut String, label: &str, omega: f64) {
    let _ = writeln!(
        out,
        "{label:<18} = {} rad/s  ({label}/2pi = {})",
        format_sci(omega),
        human_frequency(omega / TAU)
    );
}

fn value_line(out: &mut String, label: &str, value: String) {
    let _ = writeln!(out, "{label:<18} = {value}");
}

pub fn cmd_device(cfg: &RunConfig) -> Result<String, CliError> {
    let d = &cfg.device;
    let mut out = String::new();
    angular_line(&mut out, "omega0", bare_frequency(&d.tlr));
    angular_line(&mut out, "omega", renormalized_frequency(&d.tlr)?);
    value_line(&mut out, "epsilon0", format_sci(d.tlr.epsilon0()));
    value_line(&mut out, "delta", format!("{} rad", format_sci(phase_shift(&d.tlr))));
    angular_line(&mut out, "kappa", decay_kappa(&d.tlr)?);
    angular_line(&mut out, "qubit_splitting", singlet_splitting(&d.dot)? / HBAR);
    value_line(&mut out, "theta", format!("{} rad", format_sci(mixing_angle(&d.dot)?)));
    value_line(&mut out, "coupler_x", format!("{} m", format_sci(d.coupler.position)));
    angular_line(&mut out, "g_device", coupling_g(&d.tlr, &d.dot, &d.coupler)?);
    let p = cfg.model_params()?;
    let g = p.couplings_g[0];
    let tau = p.detunings_tau[0];
    angular_line(&mut out, "g", g);
    angular_line(&mut out, "tau", tau);
    let lambda = g * g / tau;
    angular_line(&mut out, "lambda", lambda);
    let t0 = gate_time_t0(lambda)?;
    value_line(
        &mut out,
        "t0",
        format!("{} s  ({:.6} ns)", format_sci(t0), t0 * 1e9),
    );
    if let Some(path) = emit(cfg, &out)? {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(out)
}

fn claim_line(out: &mut String, d: f64) {
    let verdict = |ok: bool| if ok { "met" } else { "not met" };
    let _ = writeln!(
        out,
        "comparison         : D = {:.3} % against the reference claim D < {:.0} % ({}); acceptance bound D < {D_BOUND} ({})",
        100.0 * d,
        100.0 * D_CLAIM,
        verdict(d < D_CLAIM),
        verdict(d < D_BOUND)
    );
}

pub fn cmd_epr(cfg: &RunConfig) -> Result<String, CliError> {
    let p = two_qubit_params(cfg)?;
    let noise = noise(cfg)?;
    let (report, run) = epr_generation_run(&p, &noise, cfg.output.epr_steps)?;
    let mut out = String::new();
    angular_line(&mut out, "gamma", noise.relaxation_gamma[0]);
    angular_line(&mut out, "gamma_phi", noise.dephasing_gamma_phi[0]);
    value_line(&mut out, "t0", format!("{} s", format_sci(report.t0)));
    value_line(&mut out, "steps", report.steps.to_string());
    value_line(&mut out, "fidelity", format_sci(report.fidelity));
    value_line(&mut out, "error_D", format_sci(report.error_d));
    value_line(&mut out, "concurrence", format_sci(report.concurrence));
    value_line(&mut out, "max_trace_drift", format_sci(report.max_trace_drift));
    value_line(&mut out, "max_hermiticity", format_sci(report.max_hermiticity_error));
    value_line(&mut out, "min_eigenvalue", format_sci(report.min_eigenvalue));
    claim_line(&mut out, report.error_d);

    let contents = if cfg.output.epr_timeseries {
        let target = epr_target();
        let mut csv = String::from("t,fidelity,trace,min_eig\n");
        for ((t, rho), diag) in run.times.iter().zip(&run.states).zip(&run.diagnostics) {
            let _ = writeln!(
                csv,
                "{},{},{},{}",
                format_sci(*t),
                format_sci(fidelity(rho, &target)?),
                format_sci(rho.trace().re),
                format_sci(diag.min_eigenvalue)
            );
        }
        csv
    } else {
        out.clone()
    };
    if let Some(path) = emit(cfg, &contents)? {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(out)
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<String, CliError> {
    if cfg.output.path.is_none() {
        return Err(ConfigError {
            path: "output.path".into(),
            reason: "sweep writes a CSV file; pass --out or set output.path".into(),
        }
        .into());
    }
    let p = two_qubit_params(cfg)?;
    let s = &cfg.sweep;
    let gamma_axis = rate_axis(s.gamma_over_2pi_max / 1e6, s.gamma_points)?;
    let gamma_phi_axis = rate_axis(s.gamma_phi_over_2pi_max / 1e6, s.gamma_phi_points)?;
    let sweep = decoherence_sweep(&p, &gamma_axis, &gamma_phi_axis)?;
    let mut out = String::new();
    value_line(
        &mut out,
        "grid",
        format!("{} x {} (gamma x gamma_phi)", s.gamma_points, s.gamma_phi_points),
    );
    value_line(&mut out, "D(0, 0)", format_sci(sweep.d_grid[0][0]));
    let (gamma, gamma_phi) = (TAU * cfg.noise.gamma_over_2pi, TAU * cfg.noise.gamma_phi_over_2pi);
    let d = sweep.nearest(gamma, gamma_phi);
    value_line(
        &mut out,
        "D(noise point)",
        format!(
            "{} at nearest grid point to gamma/2pi = {}, gamma_phi/2pi = {}",
            format_sci(d),
            human_frequency(cfg.noise.gamma_over_2pi),
            human_frequency(cfg.noise.gamma_phi_over_2pi)
        ),
    );
    claim_line(&mut out, d);
    if let Some(path) = emit(cfg, &sweep.to_csv())? {
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(out)
}

struct Check {
    name: &'static str,
    passed: bool,
    detail: String,
}

/// Largest deviation between the closed-form exchange propagator and the
/// eigendecomposition of its Hamiltonian over `[0, 2 t₀]`, together with
/// the largest unitarity error of the closed form.
pub fn propagator_deviation(lambda: f64) -> Result<(f64, f64), CoreError> {
    let spectral = Spectral::new(&h_reduced_two_qubit(lambda)?)?;
    let t0 = gate_time_t0(lambda)?;
    let mut deviation: f64 = 0.0;
    let mut unitarity: f64 = 0.0;
    for k in 0..50 {
        let t = 2.0 * t0 * k as f64 / 49.0;
        let u = analytic_u(lambda, t)?;
        deviation = deviation.max(u.max_abs_diff(&spectral.propagator(t)));
        unitarity = unitarity.max(u.unitarity_error());
    }
    Ok((deviation, unitarity))
}

fn validate_checks(cfg: &RunConfig, out: &mut String) -> Result<Vec<Check>, CliError> {
    let p = two_qubit_params(cfg)?;
    let g = p.couplings_g[0];
    let tau = p.detunings_tau[0];
    let report = dispersive_validity(&p)?;
    value_line(out, "tau/g", format!("{}", tau / g));
    value_line(out, "t0", format!("{} s", format_sci(report.t0)));
    value_line(out, "steps", report.steps.to_string());
    value_line(out, "fidelity_at_t0", format_sci(report.final_fidelity));
    value_line(out, "worst_window_fid", format_sci(1.0 - report.window_infidelity));
    value_line(out, "max_photon_number", format_sci(report.max_photon_number));
    value_line(out, "cutoff_change", format_sci(report.cutoff_convergence));

    let mut checks = Vec::new();
    let worst = 1.0 - report.window_infidelity;
    checks.push(Check {
        name: "model_fidelity",
        passed: worst >= MIN_MODEL_FIDELITY,
        detail: format!("{} >= {MIN_MODEL_FIDELITY}", format_sci(worst)),
    });
    let photon_bound = 4.0 * (g / tau).powi(2);
    checks.push(Check {
        name: "photon_number",
        passed: report.max_photon_number < photon_bound,
        detail: format!(
            "{} < 4 (g/tau)^2 = {}",
            format_sci(report.max_photon_number),
            format_sci(photon_bound)
        ),
    });
    checks.push(Check {
        name: "photon_cutoff",
        passed: report.cutoff_convergence < MAX_CUTOFF_SENSITIVITY,
        detail: format!(
            "{} < {MAX_CUTOFF_SENSITIVITY:e}",
            format_sci(report.cutoff_convergence)
        ),
    });

    let mut ladder = Vec::new();
    for ratio in RATIO_LADDER {
        let q = ModelParams::uniform(2, g, ratio * g)
            .and_then(|q| q.with_cutoff(p.photon_cutoff))
            .and_then(|q| q.with_dispersive_threshold(1.0))?;
        ladder.push(dispersive_validity(&q)?.window_infidelity);
    }
    let ladder_text: Vec<String> = RATIO_LADDER
        .iter()
        .zip(&ladder)
        .map(|(r, inf)| format!("{r}:{}", format_sci(*inf)))
        .collect();
    checks.push(Check {
        name: "ratio_ordering",
        passed: ladder.windows(2).all(|w| w[1] < w[0]),
        detail: format!("infidelity decreasing over tau/g [{}]", ladder_text.join(", ")),
    });

    let (deviation, unitarity) = propagator_deviation(p.lambda().expect("uniform params"))?;
    checks.push(Check {
        name: "closed_form_propagator",
        passed: deviation < MAX_PROPAGATOR_DEVIATION && unitarity < MAX_PROPAGATOR_DEVIATION,
        detail: format!(
            "max deviation {} and unitarity error {} < {MAX_PROPAGATOR_DEVIATION:e}",
            format_sci(deviation),
            format_sci(unitarity)
        ),
    });
    Ok(checks)
}

pub fn cmd_validate(cfg: &RunConfig) -> Outcome {
    let mut out = String::new();
    let checks = match validate_checks(cfg, &mut out) {
        Ok(checks) => checks,
        Err(e) => {
            return Outcome {
                report: out,
                error: Some(e),
            }
        }
    };
    for c in &checks {
        let _ = writeln!(
            out,
            "check {:<24} {}  {}",
            c.name,
            if c.passed { "PASS" } else { "FAIL" },
            c.detail
        );
    }
    let failing: Vec<_> = checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
    let mut error = (!failing.is_empty())
        .then(|| CliError::Numerical(format!("failed checks: {}", failing.join(", "))));
    match emit(cfg, &out) {
        Ok(Some(path)) => {
            let _ = writeln!(out, "wrote {}", path.display());
        }
        Ok(None) => {}
        Err(e) => error = error.or(Some(e)),
    }
    Outcome { report: out, error }
}
