use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::evolve::{default_step, evolve, EvolveControl, Integrator};
use super::hamiltonian::{build_hamiltonian, HamiltonianKind};
use super::space::{FockSpace, QuantumState};
use super::FockError;
use crate::model::{EffectiveModel, ModulationParams, SystemParams};

/// Largest fidelity change tolerated when the fixed step is halved.
pub const HALVING_LIMIT: f64 = 1e-4;

/// `(|g> + |e>) |alpha> / sqrt2`.
pub fn default_initial_state(space: FockSpace, alpha: Complex64) -> Result<QuantumState, FockError> {
    let one = Complex64::new(1.0, 0.0);
    QuantumState::coherent(space, one, one, alpha)
}

/// `F(t) = |<phi(t)|psi(t)>|²` between the full sideband evolution `psi` and
/// the two-sideband evolution `phi`, both started from `init`.
pub fn fidelity_trace(
    params: &SystemParams,
    modulation: &ModulationParams,
    model: &EffectiveModel,
    init: &QuantumState,
    times: &[f64],
    control: &EvolveControl,
) -> Result<Vec<f64>, FockError> {
    let space = init.space();
    let full = build_hamiltonian(HamiltonianKind::FirstRotating, params, modulation, model, space)?;
    let rwa = build_hamiltonian(HamiltonianKind::RwaTwoSideband, params, modulation, model, space)?;
    let psi = evolve(&full, init, times, control)?;
    let phi = evolve(&rwa, init, times, control)?;
    Ok(psi
        .iter()
        .zip(&phi)
        .map(|(a, b)| if a == b { 1.0 } else { a.fidelity(b).clamp(0.0, 1.0) })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRun {
    pub times: Vec<f64>,
    pub fidelity: Vec<f64>,
    /// Step used for the reported trace.
    pub step: f64,
    /// Largest `|F_dt - F_dt/2|` over the grid.
    pub halving_deviation: f64,
}

/// [`fidelity_trace`] with fixed-step RK4, repeated at half the step; fails
/// if the two traces differ by [`HALVING_LIMIT`] or more anywhere.
pub fn checked_fidelity_trace(
    params: &SystemParams,
    modulation: &ModulationParams,
    model: &EffectiveModel,
    init: &QuantumState,
    times: &[f64],
    max_step: Option<f64>,
) -> Result<FidelityRun, FockError> {
    let space = init.space();
    let full = build_hamiltonian(HamiltonianKind::FirstRotating, params, modulation, model, space)?;
    let rwa = build_hamiltonian(HamiltonianKind::RwaTwoSideband, params, modulation, model, space)?;
    let step = max_step
        .unwrap_or(f64::INFINITY)
        .min(default_step(&full))
        .min(default_step(&rwa));
    let run = |dt: f64| {
        let control = EvolveControl {
            integrator: Integrator::Rk4 { max_step: Some(dt) },
            check_leakage: true,
        };
        fidelity_trace(params, modulation, model, init, times, &control)
    };
    let (coarse, fine) = rayon::join(|| run(step), || run(step / 2.0));
    let (coarse, fine) = (coarse?, fine?);
    let halving_deviation = coarse.iter().zip(&fine).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if halving_deviation >= HALVING_LIMIT {
        return Err(FockError::StepRefinement {
            deviation: halving_deviation,
        });
    }
    Ok(FidelityRun {
        times: times.to_vec(),
        fidelity: coarse,
        step,
        halving_deviation,
    })
}
