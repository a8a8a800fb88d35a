//! Truncated qubit ⊗ Fock space backend: the lab-frame, rotating-frame,
//! two-sideband and effective Hamiltonians, time evolution, the two-sideband
//! fidelity benchmark and exact diagonalization at finite frequency ratio.

mod ed;
mod evolve;
mod fidelity;
mod hamiltonian;
mod operator;
mod space;

use thiserror::Error;

use crate::bessel::BesselError;
use crate::model::ModelError;

pub use ed::{
    cutoff_convergence, ed_summary, ground_state_ed, heuristic_cutoff, EdResult, EdSummary, CONVERGENCE_STEP,
    CONVERGENCE_TOL, DENSE_LIMIT, OCCUPATION_LIMIT, RESIDUAL_LIMIT,
};
pub use evolve::{
    default_step, evolve, EvolveControl, Integrator, LEAKAGE_LIMIT, MAX_ADAPTIVE_RTOL, NORM_DRIFT_LIMIT,
    STEPS_PER_PERIOD,
};
pub use fidelity::{checked_fidelity_trace, default_initial_state, fidelity_trace, FidelityRun, HALVING_LIMIT};
pub use hamiltonian::{build_hamiltonian, effective_static, Coefficient, Hamiltonian, HamiltonianKind};
pub use operator::SparseOp;
pub use space::{ed_observables, FockSpace, Observables, QuantumState, Qubit, COHERENT_TAIL_LIMIT};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FockError {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),
    #[error("Fock cutoff {n_max} is too small: weight {weight:.3e} at the truncation edge")]
    CutoffTooSmall { n_max: usize, weight: f64 },
    #[error("state norm drifted by {drift:.3e} at t = {time}")]
    NormDrift { time: f64, drift: f64 },
    #[error("adaptive step collapsed to {step:.3e} at t = {time}")]
    StepSizeFailure { time: f64, step: f64 },
    #[error("halving the time step changes the fidelity by {deviation:.3e}")]
    StepRefinement { deviation: f64 },
    #[error("dense diagonalization of dimension {dim} refused (limit {limit}); drop the bias to use the parity-sector solver or lower the cutoff")]
    TooLarge { dim: usize, limit: usize },
    #[error("eigenpair residual {0:.3e} exceeds tolerance")]
    Residual(f64),
    #[error("cutoff sequence exhausted at n_max = {last} without convergence")]
    NotConverged { last: usize },
    #[error("expected dimension {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("time grid must be non-empty, finite and non-decreasing")]
    InvalidTimeGrid,
    #[error("invalid integrator control: {0}")]
    InvalidControl(&'static str),
    #[error("state has zero norm")]
    ZeroState,
    #[error("rotating-frame Hamiltonians need a model derived from a modulation")]
    MissingSelection,
    #[error(transparent)]
    Model(#[from] ModelError),
}

impl From<BesselError> for FockError {
    fn from(e: BesselError) -> Self {
        FockError::Model(ModelError::Bessel(e))
    }
}
