//! Circuit-level quantities of the resonator, the double-dot qubits and their
//! coupling capacitors.
//!
//! Inputs are SI. Returned frequencies are angular (rad/s), so dividing an
//! energy by [`HBAR`] is the only conversion into the `ħ = 1` core.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::algebra::{sigma_x, ComplexMatrix};
use crate::error::{invalid, Error, Result};

/// Elementary charge in coulombs (exact, SI 2019).
pub const ELEMENTARY_CHARGE: f64 = 1.602176634e-19;
/// Reduced Planck constant in J·s (CODATA 2018).
pub const HBAR: f64 = 1.054571817e-34;
/// Largest wiring ratio `ε₀ = C₀/(L·C)` for which the first-order frequency
/// renormalization is accepted.
pub const MAX_WIRING_RATIO: f64 = 0.1;

/// Joules per micro-electronvolt.
pub fn micro_ev(value: f64) -> f64 {
    value * 1e-6 * ELEMENTARY_CHARGE
}

/// Angular frequency of an ordinary frequency in hertz.
pub fn angular(f_hz: f64) -> f64 {
    TAU * f_hz
}

/// Ordinary frequency in hertz of an angular frequency.
pub fn hertz(omega: f64) -> f64 {
    omega / TAU
}

/// Transmission-line resonator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TlrParams {
    /// Resonator length `L` in meters.
    pub length: f64,
    /// Inductance per unit length `F` in H/m.
    pub inductance_per_length: f64,
    /// Capacitance per unit length `C` in F/m.
    pub capacitance_per_length: f64,
    /// Wiring capacitor `C₀` to the external input/output, in farads.
    pub wiring_capacitance: f64,
    /// Quality factor `Q`.
    pub quality_factor: f64,
}

impl TlrParams {
    pub fn validate(&self) -> Result<()> {
        positive("length", self.length)?;
        positive("inductance_per_length", self.inductance_per_length)?;
        positive("capacitance_per_length", self.capacitance_per_length)?;
        positive("quality_factor", self.quality_factor)?;
        if !(self.wiring_capacitance >= 0.0 && self.wiring_capacitance.is_finite()) {
            return Err(invalid("wiring_capacitance", "must be finite and >= 0"));
        }
        check_wiring(self.epsilon0())
    }

    /// Total line capacitance `L·C` in farads.
    pub fn total_capacitance(&self) -> f64 {
        self.length * self.capacitance_per_length
    }

    /// Wiring ratio `ε₀ = C₀/(L·C)`.
    pub fn epsilon0(&self) -> f64 {
        self.wiring_capacitance / self.total_capacitance()
    }

    /// Full-wave wavenumber `k = 2π/L`.
    pub fn wavenumber(&self) -> f64 {
        TAU / self.length
    }
}

fn positive(name: &'static str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(invalid(name, format!("must be finite and > 0, got {value}")))
    }
}

fn check_wiring(epsilon0: f64) -> Result<()> {
    if epsilon0 < MAX_WIRING_RATIO {
        Ok(())
    } else {
        Err(Error::WiringOutOfRange(epsilon0))
    }
}

/// Double-dot molecule near the (1,1)-(0,2) charge transition. Energies in
/// joules.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DotParams {
    /// Bias detuning `ε`.
    pub bias_epsilon: f64,
    /// Interdot tunneling `T_C`.
    pub tunneling: f64,
    /// Total capacitance of the molecule in farads.
    pub total_capacitance: f64,
    /// `E_T` of the (1,1) triplet.
    #[serde(default)]
    pub triplet_energy: f64,
    /// `E_S` of the (1,1) singlet.
    #[serde(default)]
    pub singlet_energy: f64,
}

impl DotParams {
    /// Dot with `E_T = E_S = 0`.
    pub fn new(bias_epsilon: f64, tunneling: f64, total_capacitance: f64) -> Self {
        Self {
            bias_epsilon,
            tunneling,
            total_capacitance,
            triplet_energy: 0.0,
            singlet_energy: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        positive("tunneling", self.tunneling)?;
        positive("total_capacitance", self.total_capacitance)?;
        for (name, value) in [
            ("bias_epsilon", self.bias_epsilon),
            ("triplet_energy", self.triplet_energy),
            ("singlet_energy", self.singlet_energy),
        ] {
            if !value.is_finite() {
                return Err(invalid(name, "must be finite"));
            }
        }
        Ok(())
    }
}

/// Coupling capacitor between one double dot and the resonator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CouplerParams {
    /// `C_c` in farads.
    pub coupling_capacitance: f64,
    /// Position `x` along the resonator, measured from its left end, in meters.
    pub position: f64,
}

impl CouplerParams {
    pub fn validate(&self, tlr: &TlrParams) -> Result<()> {
        positive("coupling_capacitance", self.coupling_capacitance)?;
        if !(0.0..=tlr.length).contains(&self.position) {
            return Err(invalid(
                "position",
                format!("must lie in [0, {}] m, got {}", tlr.length, self.position),
            ));
        }
        Ok(())
    }
}

/// Bare full-wave frequency `ω₀ = 2π / (L √(F C))`.
pub fn bare_frequency(tlr: &TlrParams) -> f64 {
    TAU / (tlr.length * (tlr.inductance_per_length * tlr.capacitance_per_length).sqrt())
}

/// Mode frequency pulled by the wiring capacitor, `ω₀ (1 - 2ε₀)`.
pub fn renormalized_frequency(tlr: &TlrParams) -> Result<f64> {
    let eps0 = tlr.epsilon0();
    check_wiring(eps0)?;
    Ok(bare_frequency(tlr) * (1.0 - 2.0 * eps0))
}

/// Phase shift `δ` of the voltage standing wave, `tan δ = 2π ε₀`.
pub fn phase_shift(tlr: &TlrParams) -> f64 {
    (TAU * tlr.epsilon0()).atan()
}

/// Photon decay rate `κ = ω / Q`.
pub fn decay_kappa(tlr: &TlrParams) -> Result<f64> {
    Ok(renormalized_frequency(tlr)? / tlr.quality_factor)
}

/// Coupler position in `[0, L)` where `cos(kx + δ) = 1`.
pub fn antinode_position(tlr: &TlrParams) -> f64 {
    ((TAU - phase_shift(tlr)) / tlr.wavenumber()) % tlr.length
}

/// First coupler position where `cos(kx + δ) = 0`.
pub fn node_position(tlr: &TlrParams) -> f64 {
    (PI / 2.0 - phase_shift(tlr)) / tlr.wavenumber()
}

/// Rotation angle `θ` that diagonalizes the singlet block
/// `[[E_S, T_C], [T_C, -ε]]` in the basis {(1,1)S, (0,2)S}, with
/// `|S̃⟩ = cos θ |(1,1)S⟩ + sin θ |(0,2)S⟩`. Branch chosen so `cos θ ≥ 0`
/// and `θ = π/4` at zero bias.
pub fn mixing_angle(dot: &DotParams) -> Result<f64> {
    positive("tunneling", dot.tunneling)?;
    Ok(0.5 * (2.0 * dot.tunneling).atan2(dot.bias_epsilon + dot.singlet_energy))
}

/// Energy gap between `|S̃⟩` and `|G̃⟩`, in joules.
pub fn singlet_splitting(dot: &DotParams) -> Result<f64> {
    positive("tunneling", dot.tunneling)?;
    Ok((dot.bias_epsilon + dot.singlet_energy).hypot(2.0 * dot.tunneling))
}

/// Left-dot voltage operator `e (I + σ_x) / 2C_tot` on the qubit basis
/// {|0⟩, |1⟩}, in volts.
pub fn dot_voltage(dot: &DotParams) -> ComplexMatrix {
    (&ComplexMatrix::identity(2) + &sigma_x())
        .scale_real(ELEMENTARY_CHARGE / (2.0 * dot.total_capacitance))
}

/// Qubit-resonator coupling
/// `g(x) = (e C_c / C_tot) √(ħω / LC) cos(kx + δ) / ħ` in rad/s, with the
/// renormalized mode frequency and `k = 2π/L`.
pub fn coupling_g(tlr: &TlrParams, dot: &DotParams, coupler: &CouplerParams) -> Result<f64> {
    tlr.validate()?;
    dot.validate()?;
    coupler.validate(tlr)?;
    let omega = renormalized_frequency(tlr)?;
    let vacuum_voltage = (HBAR * omega / tlr.total_capacitance()).sqrt();
    let profile = (tlr.wavenumber() * coupler.position + phase_shift(tlr)).cos();
    let energy = ELEMENTARY_CHARGE * coupler.coupling_capacitance / dot.total_capacitance
        * vacuum_voltage
        * profile;
    Ok(energy / HBAR)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    pub(crate) fn reference_tlr() -> TlrParams {
        TlrParams {
            length: 0.01,
            inductance_per_length: 4e-7,
            capacitance_per_length: 2.5e-10,
            wiring_capacitance: 0.0,
            quality_factor: 1e5,
        }
    }

    #[test]
    fn bare_frequency_examples() {
        let tlr = reference_tlr();
        assert_relative_eq!(hertz(bare_frequency(&tlr)), 10e9, max_relative = 1e-12);

        let long = TlrParams {
            length: 0.02,
            ..tlr
        };
        assert_relative_eq!(
            bare_frequency(&long),
            bare_frequency(&tlr) / 2.0,
            max_relative = 1e-14
        );

        let heavy = TlrParams {
            inductance_per_length: 4.0 * tlr.inductance_per_length,
            ..tlr
        };
        assert_relative_eq!(
            bare_frequency(&heavy),
            bare_frequency(&tlr) / 2.0,
            max_relative = 1e-14
        );
    }

    #[test]
    fn renormalized_frequency_examples() {
        let tlr = reference_tlr();
        assert_eq!(renormalized_frequency(&tlr).unwrap(), bare_frequency(&tlr));

        let wired = TlrParams {
            wiring_capacitance: 1e-15,
            ..tlr
        };
        assert_relative_eq!(wired.epsilon0(), 4e-4, max_relative = 1e-12);
        assert_relative_eq!(
            renormalized_frequency(&wired).unwrap(),
            bare_frequency(&tlr) * (1.0 - 8e-4),
            max_relative = 1e-14
        );
        assert!(renormalized_frequency(&wired).unwrap() < bare_frequency(&wired));

        let strong = TlrParams {
            wiring_capacitance: 0.2 * tlr.total_capacitance(),
            ..tlr
        };
        assert!(matches!(
            renormalized_frequency(&strong),
            Err(Error::WiringOutOfRange(_))
        ));
        assert!(strong.validate().is_err());
    }

    #[test]
    fn phase_shift_examples() {
        let tlr = reference_tlr();
        assert_eq!(phase_shift(&tlr), 0.0);

        let wired = TlrParams {
            wiring_capacitance: 4e-4 * tlr.total_capacitance(),
            ..tlr
        };
        // atan(2π · 4e-4) = 2.513274e-3 - (2.513274e-3)^3 / 3 + ...
        assert_relative_eq!(phase_shift(&wired), 2.513269e-3, max_relative = 1e-6);

        let unit = TlrParams {
            wiring_capacitance: tlr.total_capacitance() / TAU,
            ..tlr
        };
        assert_relative_eq!(phase_shift(&unit), PI / 4.0, max_relative = 1e-14);
    }

    #[test]
    fn kappa_examples() {
        let tlr = reference_tlr();
        assert_relative_eq!(hertz(decay_kappa(&tlr).unwrap()), 1e5, max_relative = 1e-12);
        let lossy = TlrParams {
            quality_factor: 1e4,
            ..tlr
        };
        assert_relative_eq!(hertz(decay_kappa(&lossy).unwrap()), 1e6, max_relative = 1e-12);
        let ideal = TlrParams {
            quality_factor: 1e300,
            ..tlr
        };
        assert!(decay_kappa(&ideal).unwrap() < 1e-280);
    }

    #[test]
    fn mixing_angle_examples() {
        let tc = micro_ev(10.0);
        let dot = DotParams::new(0.0, tc, 2e-15);
        assert_relative_eq!(mixing_angle(&dot).unwrap(), PI / 4.0, max_relative = 1e-15);

        let detuned = DotParams::new(1e6 * tc, tc, 2e-15);
        assert!(mixing_angle(&detuned).unwrap() < 1e-5);

        let zero_tc = DotParams::new(0.0, 0.0, 2e-15);
        assert!(mixing_angle(&zero_tc).is_err());
    }

    /// `⟨S̃|H|G̃⟩` for the singlet block rotated by `θ`.
    fn rotated_off_diagonal(dot: &DotParams, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let h = [
            [dot.singlet_energy, dot.tunneling],
            [dot.tunneling, -dot.bias_epsilon],
        ];
        let s_vec = [c, s];
        let g_vec = [-s, c];
        let mut acc = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                acc += s_vec[i] * h[i][j] * g_vec[j];
            }
        }
        acc
    }

    #[test]
    fn mixing_angle_matches_eigen_solver_at_twice_tunneling() {
        let tc = micro_ev(5.0);
        let dot = DotParams::new(2.0 * tc, tc, 2e-15);
        let theta = mixing_angle(&dot).unwrap();
        assert!(rotated_off_diagonal(&dot, theta).abs() < 1e-12 * tc);

        // Eigenvector of the upper level from an independent eigensolver.
        let h = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, -2.0]).unwrap();
        let (values, vectors) = h.hermitian_eigen().unwrap();
        assert!(values[1] > values[0]);
        let (v0, v1) = (vectors[(0, 1)], vectors[(1, 1)]);
        let phase = v0 / v0.norm();
        let (c, s) = ((v0 / phase).re, (v1 / phase).re);
        assert_relative_eq!(theta.cos(), c, epsilon = 1e-12);
        assert_relative_eq!(theta.sin(), s, epsilon = 1e-12);
    }

    #[test]
    fn mixing_angle_diagonalizes_random_blocks() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let tc = micro_ev(rng.gen_range(0.01..100.0));
            let eps = micro_ev(rng.gen_range(-500.0..500.0));
            let dot = DotParams::new(eps, tc, 2e-15);
            let theta = mixing_angle(&dot).unwrap();
            assert!(theta.cos() >= 0.0);
            assert!(
                rotated_off_diagonal(&dot, theta).abs() < 1e-12 * tc,
                "eps = {eps:e}, tc = {tc:e}"
            );
        }
    }

    #[test]
    fn singlet_splitting_examples() {
        let unit = micro_ev(1.0);
        let resonant = DotParams::new(0.0, 2.0 * unit, 2e-15);
        assert_relative_eq!(singlet_splitting(&resonant).unwrap(), 4.0 * unit, max_relative = 1e-15);

        let dot = DotParams::new(3.0 * unit, 2.0 * unit, 2e-15);
        assert_relative_eq!(singlet_splitting(&dot).unwrap(), 5.0 * unit, max_relative = 1e-15);
    }

    #[test]
    fn splitting_is_stationary_at_zero_bias() {
        let tc = micro_ev(10.0);
        let gap = |eps: f64| singlet_splitting(&DotParams::new(eps, tc, 2e-15)).unwrap();
        let h = 1e-3 * tc;
        let first = (gap(h) - gap(-h)) / (2.0 * h);
        assert!(first.abs() < 1e-8 * tc, "first derivative {first:e}");
        let second = (gap(h) - 2.0 * gap(0.0) + gap(-h)) / (h * h);
        assert!(second > 0.0);
        // d²gap/dε² at ε = 0 is 1 / (2 T_C)
        assert_relative_eq!(second, 1.0 / (2.0 * tc), max_relative = 1e-4);
    }

    fn reference_coupler(tlr: &TlrParams) -> CouplerParams {
        CouplerParams {
            coupling_capacitance: 0.5e-15,
            position: antinode_position(tlr),
        }
    }

    #[test]
    fn coupling_at_antinode_matches_hand_arithmetic() {
        let tlr = reference_tlr();
        let dot = DotParams::new(0.0, micro_ev(10.0), 2e-15);
        let g = coupling_g(&tlr, &dot, &reference_coupler(&tlr)).unwrap();
        // ħω = h · 10 GHz = 6.62607015e-24 J; √(ħω / 2.5e-12 F) = 1.628014e-6 V;
        // 0.25 e · 1.628014e-6 V / h = 98.41 MHz.
        assert_relative_eq!(hertz(g), 98.41e6, max_relative = 1e-4);
    }

    #[test]
    fn coupling_vanishes_at_node_and_scales_linearly() {
        let tlr = TlrParams {
            wiring_capacitance: 1e-15,
            ..reference_tlr()
        };
        let dot = DotParams::new(0.0, micro_ev(10.0), 2e-15);
        let node = CouplerParams {
            coupling_capacitance: 0.5e-15,
            position: node_position(&tlr),
        };
        let g_max = coupling_g(&tlr, &dot, &reference_coupler(&tlr)).unwrap();
        assert!(coupling_g(&tlr, &dot, &node).unwrap().abs() < 1e-12 * g_max);

        let coupler = reference_coupler(&tlr);
        let doubled = CouplerParams {
            coupling_capacitance: 2.0 * coupler.coupling_capacitance,
            ..coupler
        };
        assert_relative_eq!(
            coupling_g(&tlr, &dot, &doubled).unwrap(),
            2.0 * g_max,
            max_relative = 1e-14
        );
        let big_dot = DotParams {
            total_capacitance: 2.0 * dot.total_capacitance,
            ..dot
        };
        assert_relative_eq!(
            coupling_g(&tlr, &big_dot, &coupler).unwrap(),
            0.5 * g_max,
            max_relative = 1e-14
        );
    }

    #[test]
    fn coupling_scales_as_root_frequency_at_fixed_line_capacitance() {
        let tlr = reference_tlr();
        let light = TlrParams {
            inductance_per_length: tlr.inductance_per_length / 4.0,
            ..tlr
        };
        let dot = DotParams::new(0.0, micro_ev(10.0), 2e-15);
        let coupler = reference_coupler(&tlr);
        let ratio = coupling_g(&light, &dot, &coupler).unwrap() / coupling_g(&tlr, &dot, &coupler).unwrap();
        assert_relative_eq!(ratio, 2f64.sqrt(), max_relative = 1e-14);
    }

    #[test]
    fn dot_voltage_is_half_charge_plus_sigma_x() {
        let dot = DotParams::new(0.0, micro_ev(10.0), 2e-15);
        let v = dot_voltage(&dot);
        let half = ELEMENTARY_CHARGE / 4e-15;
        for (i, j) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
            assert_relative_eq!(v[(i, j)].re, half, max_relative = 1e-15);
        }
    }

    #[test]
    fn coupler_validation() {
        let tlr = reference_tlr();
        let outside = CouplerParams {
            coupling_capacitance: 1e-15,
            position: 2.0 * tlr.length,
        };
        assert!(outside.validate(&tlr).is_err());
        let zero = CouplerParams {
            coupling_capacitance: 0.0,
            position: 0.0,
        };
        assert!(zero.validate(&tlr).is_err());
    }
}
