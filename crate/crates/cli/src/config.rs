//! JSON run configuration.
//!
//! Physical values are either plain numbers in SI (frequencies as ordinary
//! frequencies in Hz) or strings carrying a unit suffix such as `"10 mm"`,
//! `"0.5 fF"`, `"20 ueV"` or `"0.2 MHz"`. Every key is optional; missing
//! keys take the defaults listed in the README. Unknown keys are rejected.

use std::f64::consts::TAU;
use std::fmt;
use std::path::{Path, PathBuf};

use dqd_core::device::{
    antinode_position, coupling_g, node_position, renormalized_frequency, CouplerParams, DotParams, TlrParams,
};
use dqd_core::hamiltonians::{DEFAULT_DISPERSIVE_THRESHOLD, DEFAULT_PHOTON_CUTOFF};
use dqd_core::{Error as CoreError, ModelParams};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Invalid configuration, located by its dotted key path.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("{path}: {reason}")]
pub struct ConfigError {
    pub path: String,
    pub reason: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, reason: impl Into<String>) -> Self {
        Self {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

/// A number in SI units or a string with a unit suffix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Quantity {
    Number(f64),
    Text(String),
}

#[derive(Clone, Copy, Debug)]
enum Dimension {
    Length,
    InductancePerLength,
    CapacitancePerLength,
    Capacitance,
    Energy,
    Frequency,
    Dimensionless,
}

impl Dimension {
    fn units(self) -> &'static [(&'static str, f64)] {
        const EV: f64 = dqd_core::device::ELEMENTARY_CHARGE;
        match self {
            Dimension::Length => &[
                ("m", 1.0),
                ("cm", 1e-2),
                ("mm", 1e-3),
                ("um", 1e-6),
                ("µm", 1e-6),
                ("μm", 1e-6),
                ("nm", 1e-9),
            ],
            Dimension::InductancePerLength => &[
                ("H/m", 1.0),
                ("mH/m", 1e-3),
                ("uH/m", 1e-6),
                ("µH/m", 1e-6),
                ("μH/m", 1e-6),
                ("nH/m", 1e-9),
                ("pH/m", 1e-12),
            ],
            Dimension::CapacitancePerLength => &[
                ("F/m", 1.0),
                ("uF/m", 1e-6),
                ("nF/m", 1e-9),
                ("pF/m", 1e-12),
                ("fF/m", 1e-15),
            ],
            Dimension::Capacitance => &[
                ("F", 1.0),
                ("uF", 1e-6),
                ("µF", 1e-6),
                ("μF", 1e-6),
                ("nF", 1e-9),
                ("pF", 1e-12),
                ("fF", 1e-15),
                ("aF", 1e-18),
            ],
            Dimension::Energy => &[
                ("J", 1.0),
                ("eV", EV),
                ("meV", 1e-3 * EV),
                ("ueV", 1e-6 * EV),
                ("µeV", 1e-6 * EV),
                ("μeV", 1e-6 * EV),
                ("neV", 1e-9 * EV),
            ],
            Dimension::Frequency => &[
                ("Hz", 1.0),
                ("kHz", 1e3),
                ("MHz", 1e6),
                ("GHz", 1e9),
            ],
            Dimension::Dimensionless => &[],
        }
    }
}

fn parse_quantity(q: &Quantity, dim: Dimension, path: &str) -> Result<f64, ConfigError> {
    let value = match q {
        Quantity::Number(x) => *x,
        Quantity::Text(s) => {
            let s = s.trim();
            let split = s
                .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
                .unwrap_or(s.len());
            // A trailing exponent marker belongs to the unit ("1 eV" vs "1e3").
            let (mut number, mut unit) = s.split_at(split);
            if number.ends_with(['e', 'E']) && !unit.trim().is_empty() {
                number = &s[..split - 1];
                unit = &s[split - 1..];
            }
            let x: f64 = number
                .trim()
                .parse()
                .map_err(|_| ConfigError::new(path, format!("cannot read a number from {s:?}")))?;
            let unit = unit.trim();
            if unit.is_empty() {
                x
            } else {
                let scale = dim
                    .units()
                    .iter()
                    .find(|(name, _)| *name == unit)
                    .map(|(_, scale)| *scale)
                    .ok_or_else(|| {
                        let known: Vec<_> = dim.units().iter().map(|(n, _)| *n).collect();
                        ConfigError::new(
                            path,
                            format!("unknown unit {unit:?}; expected one of {known:?}"),
                        )
                    })?;
                x * scale
            }
        }
    };
    if value.is_finite() {
        Ok(value)
    } else {
        Err(ConfigError::new(path, "must be finite"))
    }
}

fn quantity_or(
    q: &Option<Quantity>,
    dim: Dimension,
    path: &str,
    default: f64,
) -> Result<f64, ConfigError> {
    q.as_ref().map_or(Ok(default), |q| parse_quantity(q, dim, path))
}

fn require(ok: bool, path: &str, reason: &str) -> Result<(), ConfigError> {
    if ok {
        Ok(())
    } else {
        Err(ConfigError::new(path, reason))
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub device: Option<RawDevice>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<RawModel>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<RawNoise>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<RawSweep>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<RawOutput>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDevice {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tlr: Option<RawTlr>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dot: Option<RawDot>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coupler: Option<RawCoupler>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawTlr {
    #[serde(rename = "length_L", default)]
    pub length: Option<Quantity>,
    #[serde(rename = "inductance_per_length_F", default)]
    pub inductance_per_length: Option<Quantity>,
    #[serde(rename = "capacitance_per_length_C", default)]
    pub capacitance_per_length: Option<Quantity>,
    #[serde(rename = "wiring_cap_C0", default)]
    pub wiring_capacitance: Option<Quantity>,
    #[serde(rename = "quality_Q", default)]
    pub quality_factor: Option<Quantity>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawDot {
    #[serde(default)]
    pub bias_epsilon: Option<Quantity>,
    #[serde(rename = "tunneling_Tc", default)]
    pub tunneling: Option<Quantity>,
    #[serde(rename = "total_cap_Ctot", default)]
    pub total_capacitance: Option<Quantity>,
    #[serde(rename = "triplet_energy_ET", default)]
    pub triplet_energy: Option<Quantity>,
    #[serde(rename = "singlet_energy_ES", default)]
    pub singlet_energy: Option<Quantity>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawCoupler {
    #[serde(rename = "coupling_cap_Cc", default)]
    pub coupling_capacitance: Option<Quantity>,
    /// A length, `"antinode"` or `"node"`.
    #[serde(rename = "position_x", default)]
    pub position: Option<Quantity>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawModel {
    #[serde(default)]
    pub n_qubits: Option<usize>,
    /// `g/2π` as a frequency, or `"from-device"`.
    #[serde(default)]
    pub g_over_2pi: Option<Quantity>,
    #[serde(default)]
    pub tau_over_g: Option<f64>,
    #[serde(default)]
    pub photon_cutoff: Option<usize>,
    #[serde(default)]
    pub dispersive_threshold: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawNoise {
    #[serde(default)]
    pub gamma_over_2pi: Option<Quantity>,
    #[serde(default)]
    pub gamma_phi_over_2pi: Option<Quantity>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawSweep {
    #[serde(default)]
    pub gamma_over_2pi_max: Option<Quantity>,
    #[serde(default)]
    pub gamma_points: Option<usize>,
    #[serde(default)]
    pub gamma_phi_over_2pi_max: Option<Quantity>,
    #[serde(default)]
    pub gamma_phi_points: Option<usize>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawOutput {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    #[serde(default)]
    pub epr_timeseries: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epr_steps: Option<usize>,
}

/// Source of the qubit-resonator coupling used by the model.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CouplingSource {
    /// `g` computed from the device section.
    FromDevice,
    /// `g/2π` in Hz.
    Fixed(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DeviceConfig {
    pub tlr: TlrParams,
    pub dot: DotParams,
    pub coupler: CouplerParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ModelConfig {
    pub n_qubits: usize,
    pub coupling: CouplingSource,
    pub tau_over_g: f64,
    pub photon_cutoff: usize,
    pub dispersive_threshold: f64,
}

/// Rates as ordinary frequencies (`rate/2π`) in Hz.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseConfig {
    pub gamma_over_2pi: f64,
    pub gamma_phi_over_2pi: f64,
}

/// Axes from zero to the given `rate/2π` maxima (Hz).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepConfig {
    pub gamma_over_2pi_max: f64,
    pub gamma_points: usize,
    pub gamma_phi_over_2pi_max: f64,
    pub gamma_phi_points: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub path: Option<PathBuf>,
    pub epr_timeseries: bool,
    pub epr_steps: Option<usize>,
}

/// Fully validated configuration in SI units.
#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub device: DeviceConfig,
    pub model: ModelConfig,
    pub noise: NoiseConfig,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
}

/// Maps a core validation failure onto the config key it came from.
fn core_error(prefix: &str, keys: &[(&str, &str)], err: CoreError) -> ConfigError {
    match err {
        CoreError::InvalidParameter { name, reason } => {
            let key = keys
                .iter()
                .find(|(field, _)| *field == name)
                .map_or(name, |(_, key)| *key);
            ConfigError::new(format!("{prefix}.{key}"), reason)
        }
        CoreError::WiringOutOfRange(eps0) => ConfigError::new(
            format!("{prefix}.wiring_cap_C0"),
            format!("wiring ratio C0/(L*C) = {eps0:.4} must be below 0.1"),
        ),
        other => ConfigError::new(prefix, other.to_string()),
    }
}

const TLR_KEYS: &[(&str, &str)] = &[
    ("length", "length_L"),
    ("inductance_per_length", "inductance_per_length_F"),
    ("capacitance_per_length", "capacitance_per_length_C"),
    ("wiring_capacitance", "wiring_cap_C0"),
    ("quality_factor", "quality_Q"),
];
const DOT_KEYS: &[(&str, &str)] = &[
    ("bias_epsilon", "bias_epsilon"),
    ("tunneling", "tunneling_Tc"),
    ("total_capacitance", "total_cap_Ctot"),
    ("triplet_energy", "triplet_energy_ET"),
    ("singlet_energy", "singlet_energy_ES"),
];
const COUPLER_KEYS: &[(&str, &str)] = &[
    ("coupling_capacitance", "coupling_cap_Cc"),
    ("position", "position_x"),
];

impl RawConfig {
    pub fn resolve(&self) -> Result<RunConfig, ConfigError> {
        let device = self.device.clone().unwrap_or_default();

        let tlr_raw = device.tlr.unwrap_or_default();
        let p = "device.tlr";
        let tlr = TlrParams {
            length: quantity_or(&tlr_raw.length, Dimension::Length, &format!("{p}.length_L"), 0.01)?,
            inductance_per_length: quantity_or(
                &tlr_raw.inductance_per_length,
                Dimension::InductancePerLength,
                &format!("{p}.inductance_per_length_F"),
                4e-7,
            )?,
            capacitance_per_length: quantity_or(
                &tlr_raw.capacitance_per_length,
                Dimension::CapacitancePerLength,
                &format!("{p}.capacitance_per_length_C"),
                2.5e-10,
            )?,
            wiring_capacitance: quantity_or(
                &tlr_raw.wiring_capacitance,
                Dimension::Capacitance,
                &format!("{p}.wiring_cap_C0"),
                0.0,
            )?,
            quality_factor: quantity_or(
                &tlr_raw.quality_factor,
                Dimension::Dimensionless,
                &format!("{p}.quality_Q"),
                1e5,
            )?,
        };
        tlr.validate().map_err(|e| core_error(p, TLR_KEYS, e))?;

        let dot_raw = device.dot.unwrap_or_default();
        let p = "device.dot";
        let energy = |q: &Option<Quantity>, key: &str, default| {
            quantity_or(q, Dimension::Energy, &format!("{p}.{key}"), default)
        };
        let dot = DotParams {
            bias_epsilon: energy(&dot_raw.bias_epsilon, "bias_epsilon", 0.0)?,
            tunneling: energy(
                &dot_raw.tunneling,
                "tunneling_Tc",
                dqd_core::device::micro_ev(20.0),
            )?,
            total_capacitance: quantity_or(
                &dot_raw.total_capacitance,
                Dimension::Capacitance,
                &format!("{p}.total_cap_Ctot"),
                2e-15,
            )?,
            triplet_energy: energy(&dot_raw.triplet_energy, "triplet_energy_ET", 0.0)?,
            singlet_energy: energy(&dot_raw.singlet_energy, "singlet_energy_ES", 0.0)?,
        };
        dot.validate().map_err(|e| core_error(p, DOT_KEYS, e))?;

        let coupler_raw = device.coupler.unwrap_or_default();
        let p = "device.coupler";
        let position = match &coupler_raw.position {
            None => antinode_position(&tlr),
            Some(Quantity::Text(s)) if s.trim() == "antinode" => antinode_position(&tlr),
            Some(Quantity::Text(s)) if s.trim() == "node" => node_position(&tlr),
            Some(q) => parse_quantity(q, Dimension::Length, &format!("{p}.position_x"))?,
        };
        let coupler = CouplerParams {
            coupling_capacitance: quantity_or(
                &coupler_raw.coupling_capacitance,
                Dimension::Capacitance,
                &format!("{p}.coupling_cap_Cc"),
                0.5e-15,
            )?,
            position,
        };
        coupler
            .validate(&tlr)
            .map_err(|e| core_error(p, COUPLER_KEYS, e))?;

        let model_raw = self.model.clone().unwrap_or_default();
        let coupling = match &model_raw.g_over_2pi {
            None => CouplingSource::Fixed(100e6),
            Some(Quantity::Text(s)) if s.trim() == "from-device" => CouplingSource::FromDevice,
            Some(q) => {
                let f = parse_quantity(q, Dimension::Frequency, "model.g_over_2pi")?;
                require(f > 0.0, "model.g_over_2pi", "must be > 0")?;
                CouplingSource::Fixed(f)
            }
        };
        let model = ModelConfig {
            n_qubits: model_raw.n_qubits.unwrap_or(2),
            coupling,
            tau_over_g: model_raw.tau_over_g.unwrap_or(10.0),
            photon_cutoff: model_raw.photon_cutoff.unwrap_or(DEFAULT_PHOTON_CUTOFF),
            dispersive_threshold: model_raw
                .dispersive_threshold
                .unwrap_or(DEFAULT_DISPERSIVE_THRESHOLD),
        };
        require(model.n_qubits >= 2, "model.n_qubits", "must be at least 2")?;
        require(
            model.tau_over_g > 0.0 && model.tau_over_g.is_finite(),
            "model.tau_over_g",
            "must be finite and > 0",
        )?;
        require(model.photon_cutoff >= 1, "model.photon_cutoff", "must be at least 1")?;
        require(
            model.dispersive_threshold > 0.0,
            "model.dispersive_threshold",
            "must be > 0",
        )?;
        require(
            model.tau_over_g >= model.dispersive_threshold,
            "model.tau_over_g",
            &format!(
                "{} is below the dispersive threshold {}",
                model.tau_over_g, model.dispersive_threshold
            ),
        )?;

        let noise_raw = self.noise.clone().unwrap_or_default();
        let rate = |q: &Option<Quantity>, path: &str, default| -> Result<f64, ConfigError> {
            let x = quantity_or(q, Dimension::Frequency, path, default)?;
            require(x >= 0.0, path, "must be >= 0")?;
            Ok(x)
        };
        let noise = NoiseConfig {
            gamma_over_2pi: rate(&noise_raw.gamma_over_2pi, "noise.gamma_over_2pi", 0.2e6)?,
            gamma_phi_over_2pi: rate(
                &noise_raw.gamma_phi_over_2pi,
                "noise.gamma_phi_over_2pi",
                0.5e6,
            )?,
        };

        let sweep_raw = self.sweep.clone().unwrap_or_default();
        let sweep = SweepConfig {
            gamma_over_2pi_max: rate(
                &sweep_raw.gamma_over_2pi_max,
                "sweep.gamma_over_2pi_max",
                1e6,
            )?,
            gamma_points: sweep_raw.gamma_points.unwrap_or(21),
            gamma_phi_over_2pi_max: rate(
                &sweep_raw.gamma_phi_over_2pi_max,
                "sweep.gamma_phi_over_2pi_max",
                1e6,
            )?,
            gamma_phi_points: sweep_raw.gamma_phi_points.unwrap_or(21),
        };
        require(sweep.gamma_points >= 1, "sweep.gamma_points", "must be at least 1")?;
        require(
            sweep.gamma_phi_points >= 1,
            "sweep.gamma_phi_points",
            "must be at least 1",
        )?;

        let output_raw = self.output.clone().unwrap_or_default();
        let output = OutputConfig {
            path: output_raw.path,
            epr_timeseries: output_raw.epr_timeseries.unwrap_or(true),
            epr_steps: output_raw.epr_steps,
        };
        if let Some(steps) = output.epr_steps {
            require(steps >= 1, "output.epr_steps", "must be at least 1")?;
        }

        let config = RunConfig {
            device: DeviceConfig { tlr, dot, coupler },
            model,
            noise,
            sweep,
            output,
        };
        config.model_params()?;
        Ok(config)
    }
}

impl RunConfig {
    /// `g` in rad/s.
    pub fn coupling_g(&self) -> Result<f64, ConfigError> {
        match self.model.coupling {
            CouplingSource::Fixed(f) => Ok(TAU * f),
            CouplingSource::FromDevice => {
                let d = &self.device;
                let g = coupling_g(&d.tlr, &d.dot, &d.coupler)
                    .map_err(|e| ConfigError::new("device", e.to_string()))?;
                let omega = renormalized_frequency(&d.tlr)
                    .map_err(|e| ConfigError::new("device.tlr", e.to_string()))?;
                require(
                    g.abs() > 1e-12 * omega,
                    "model.g_over_2pi",
                    "coupling computed from the device vanishes (coupler at a node)",
                )?;
                Ok(g.abs())
            }
        }
    }

    /// Identical qubits with `τ = (τ/g)·g`.
    pub fn model_params(&self) -> Result<ModelParams, ConfigError> {
        let g = self.coupling_g()?;
        let m = &self.model;
        ModelParams::uniform(m.n_qubits, g, m.tau_over_g * g)
            .and_then(|p| p.with_cutoff(m.photon_cutoff))
            .and_then(|p| p.with_dispersive_threshold(m.dispersive_threshold))
            .map_err(|e| ConfigError::new("model", e.to_string()))
    }

    /// Normalized form: every value explicit, in SI, frequencies in Hz.
    pub fn to_raw(&self) -> RawConfig {
        let n = Quantity::Number;
        let d = &self.device;
        RawConfig {
            device: Some(RawDevice {
                tlr: Some(RawTlr {
                    length: Some(n(d.tlr.length)),
                    inductance_per_length: Some(n(d.tlr.inductance_per_length)),
                    capacitance_per_length: Some(n(d.tlr.capacitance_per_length)),
                    wiring_capacitance: Some(n(d.tlr.wiring_capacitance)),
                    quality_factor: Some(n(d.tlr.quality_factor)),
                }),
                dot: Some(RawDot {
                    bias_epsilon: Some(n(d.dot.bias_epsilon)),
                    tunneling: Some(n(d.dot.tunneling)),
                    total_capacitance: Some(n(d.dot.total_capacitance)),
                    triplet_energy: Some(n(d.dot.triplet_energy)),
                    singlet_energy: Some(n(d.dot.singlet_energy)),
                }),
                coupler: Some(RawCoupler {
                    coupling_capacitance: Some(n(d.coupler.coupling_capacitance)),
                    position: Some(n(d.coupler.position)),
                }),
            }),
            model: Some(RawModel {
                n_qubits: Some(self.model.n_qubits),
                g_over_2pi: Some(match self.model.coupling {
                    CouplingSource::FromDevice => Quantity::Text("from-device".into()),
                    CouplingSource::Fixed(f) => n(f),
                }),
                tau_over_g: Some(self.model.tau_over_g),
                photon_cutoff: Some(self.model.photon_cutoff),
                dispersive_threshold: Some(self.model.dispersive_threshold),
            }),
            noise: Some(RawNoise {
                gamma_over_2pi: Some(n(self.noise.gamma_over_2pi)),
                gamma_phi_over_2pi: Some(n(self.noise.gamma_phi_over_2pi)),
            }),
            sweep: Some(RawSweep {
                gamma_over_2pi_max: Some(n(self.sweep.gamma_over_2pi_max)),
                gamma_points: Some(self.sweep.gamma_points),
                gamma_phi_over_2pi_max: Some(n(self.sweep.gamma_phi_over_2pi_max)),
                gamma_phi_points: Some(self.sweep.gamma_phi_points),
            }),
            output: Some(RawOutput {
                path: self.output.path.clone(),
                epr_timeseries: Some(self.output.epr_timeseries),
                epr_steps: self.output.epr_steps,
            }),
        }
    }

    pub fn dump(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.to_raw()).expect("config serializes");
        s.push('\n');
        s
    }
}

/// Parses and validates a configuration from JSON text.
pub fn parse_config_str(text: &str) -> Result<RunConfig, ConfigError> {
    let mut de = serde_json::Deserializer::from_str(text);
    let raw: RawConfig = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let path = if path == "." { "<root>".to_string() } else { path };
        ConfigError::new(path, e.into_inner().to_string())
    })?;
    de.end()
        .map_err(|e| ConfigError::new("<root>", e.to_string()))?;
    raw.resolve()
}

pub fn parse_config(path: &Path) -> Result<RunConfig, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| ConfigError::new("<file>", format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

impl fmt::Display for CouplingSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CouplingSource::FromDevice => f.write_str("from-device"),
            CouplingSource::Fixed(hz) => write!(f, "{hz} Hz"),
        }
    }
}
