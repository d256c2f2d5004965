//! Simulation core for double-quantum-dot qubits coupled through a
//! superconducting transmission-line resonator operated in the dispersive
//! regime.
//!
//! Units: the [`device`] module works in SI. Everything downstream of it uses
//! `ħ = 1`, with energies expressed as angular frequencies (rad/s) and times
//! in seconds.

pub mod algebra;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod hamiltonians;
pub mod protocols;

pub use algebra::{
    concurrence, embed, expm_propagator, fidelity, kron, partial_trace, ComplexMatrix,
    DensityMatrix, HilbertSpace, PureState, C64,
};
pub use device::{CouplerParams, DotParams, TlrParams};
pub use dynamics::{NoiseSpec, SimResult, TimeGrid};
pub use error::{Error, Result};
pub use hamiltonians::ModelParams;
pub use protocols::{EprReport, SweepResult};
