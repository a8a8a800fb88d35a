//! Modulation-engineered superradiant phase transitions of the quantum Rabi
//! model.
//!
//! * [`model`] derives the effective anisotropic Rabi model produced by a
//!   sinusoidal qubit-frequency modulation.
//! * [`phase`] evaluates the analytic five-phase theory in the limit of an
//!   infinite effective frequency ratio.
//! * [`fock`] is an independent truncated-Fock-space backend: Hamiltonians,
//!   time evolution, fidelity and exact diagonalization.
//! * [`sweep`] turns all of the above into reproducible data tables.

pub mod bessel;
pub mod fock;
pub mod model;
pub mod phase;
pub mod sweep;
mod value;

pub use bessel::{bessel_j, BesselError};
pub use model::{
    a2_amplitude, derive_model, effective_model, g_c_dissipative, rwa_validity, select_sidebands, sideband_detunings,
    EffectiveModel, ModelError, ModulationParams, RwaReport, SelectionMode, SidebandChoice, SystemParams,
};
pub use phase::{PhaseError, PhaseLabel, PhasePointResult, ReducedCouplings};
pub use value::Value;
