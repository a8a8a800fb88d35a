use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hamiltonian::Hamiltonian;
use super::space::QuantumState;
use super::FockError;

/// Largest tolerated `| ||psi|| - 1 |` at any sample.
pub const NORM_DRIFT_LIMIT: f64 = 1e-6;
/// Largest tolerated population of the two highest Fock levels.
pub const LEAKAGE_LIMIT: f64 = 1e-8;
/// Fixed steps are at most `2 pi / (STEPS_PER_PERIOD * w_max)`. Fifty steps
/// per period is enough for stability; the extra factor keeps the RK4
/// amplitude damping of fast components well below the norm-drift bar over
/// thousands of periods.
pub const STEPS_PER_PERIOD: f64 = 200.0;
/// Loosest relative tolerance accepted by the adaptive integrator.
pub const MAX_ADAPTIVE_RTOL: f64 = 1e-9;

const MAX_ADAPTIVE_STEPS: usize = 50_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Integrator {
    /// Classical fourth-order Runge-Kutta. The step is the smaller of
    /// `max_step` and `2 pi / (200 w_max)`, shrunk to divide every sampling
    /// interval evenly.
    Rk4 { max_step: Option<f64> },
    /// Dormand-Prince 5(4) with per-component error control.
    DormandPrince { rtol: f64, atol: f64 },
}

impl Default for Integrator {
    fn default() -> Self {
        Integrator::Rk4 { max_step: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EvolveControl {
    pub integrator: Integrator,
    /// Fail with `CutoffTooSmall` when the top two Fock levels fill up.
    pub check_leakage: bool,
}

impl Default for EvolveControl {
    fn default() -> Self {
        Self {
            integrator: Integrator::default(),
            check_leakage: true,
        }
    }
}

/// Default fixed step for `h`.
pub fn default_step(h: &Hamiltonian) -> f64 {
    let w = h.max_frequency();
    if w > 0.0 {
        2.0 * std::f64::consts::PI / (STEPS_PER_PERIOD * w)
    } else {
        f64::INFINITY
    }
}

/// Solves `i d/dt psi = H(t) psi` from `times[0]` (where the state is `init`)
/// and returns the state at every entry of `times`.
pub fn evolve(
    h: &Hamiltonian,
    init: &QuantumState,
    times: &[f64],
    control: &EvolveControl,
) -> Result<Vec<QuantumState>, FockError> {
    if init.space() != h.space() {
        return Err(FockError::DimensionMismatch {
            expected: h.space().dim(),
            found: init.space().dim(),
        });
    }
    if times.is_empty() || times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] < w[0]) {
        return Err(FockError::InvalidTimeGrid);
    }
    let drift = (init.norm() - 1.0).abs();
    if drift > NORM_DRIFT_LIMIT {
        return Err(FockError::NormDrift { time: times[0], drift });
    }
    let mut stepper: Box<dyn Stepper> = match control.integrator {
        Integrator::Rk4 { max_step } => {
            let dt = max_step.unwrap_or(f64::INFINITY).min(default_step(h));
            if !(dt > 0.0) {
                return Err(FockError::InvalidControl("step must be positive"));
            }
            Box::new(Rk4::new(h, dt))
        }
        Integrator::DormandPrince { rtol, atol } => {
            if !(rtol > 0.0 && rtol <= MAX_ADAPTIVE_RTOL && atol > 0.0) {
                return Err(FockError::InvalidControl(
                    "adaptive tolerances must satisfy 0 < rtol <= 1e-9, atol > 0",
                ));
            }
            Box::new(DormandPrince::new(h, rtol, atol, default_step(h)))
        }
    };

    let space = init.space();
    let mut y = init.amplitudes().to_vec();
    let mut out = Vec::with_capacity(times.len());
    out.push(init.clone());
    for w in times.windows(2) {
        stepper.advance(&mut y, w[0], w[1])?;
        let state = QuantumState::from_amplitudes(space, y.clone())?;
        let drift = (state.norm() - 1.0).abs();
        if drift > NORM_DRIFT_LIMIT {
            return Err(FockError::NormDrift { time: w[1], drift });
        }
        if control.check_leakage {
            let weight = state.top_occupation();
            if weight > LEAKAGE_LIMIT {
                return Err(FockError::CutoffTooSmall {
                    n_max: space.n_max(),
                    weight,
                });
            }
        }
        out.push(state);
    }
    Ok(out)
}

trait Stepper {
    fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<(), FockError>;
}

/// `out = -i H(t) y`.
fn derivative(h: &Hamiltonian, t: f64, y: &[Complex64], out: &mut [Complex64]) {
    h.apply(t, y, out);
    let minus_i = Complex64::new(0.0, -1.0);
    out.iter_mut().for_each(|v| *v *= minus_i);
}

struct Rk4<'a> {
    h: &'a Hamiltonian,
    dt: f64,
    k: [Vec<Complex64>; 4],
    tmp: Vec<Complex64>,
}

impl<'a> Rk4<'a> {
    fn new(h: &'a Hamiltonian, dt: f64) -> Self {
        let dim = h.space().dim();
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            h,
            dt,
            k: [zero.clone(), zero.clone(), zero.clone(), zero.clone()],
            tmp: zero,
        }
    }

    fn step(&mut self, y: &mut [Complex64], t: f64, dt: f64) {
        let [k1, k2, k3, k4] = &mut self.k;
        let tmp = &mut self.tmp;
        derivative(self.h, t, y, k1);
        for i in 0..y.len() {
            tmp[i] = y[i] + k1[i] * (0.5 * dt);
        }
        derivative(self.h, t + 0.5 * dt, tmp, k2);
        for i in 0..y.len() {
            tmp[i] = y[i] + k2[i] * (0.5 * dt);
        }
        derivative(self.h, t + 0.5 * dt, tmp, k3);
        for i in 0..y.len() {
            tmp[i] = y[i] + k3[i] * dt;
        }
        derivative(self.h, t + dt, tmp, k4);
        for i in 0..y.len() {
            y[i] += (k1[i] + k2[i] * 2.0 + k3[i] * 2.0 + k4[i]) * (dt / 6.0);
        }
    }
}

impl Stepper for Rk4<'_> {
    fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<(), FockError> {
        let span = t1 - t0;
        if span == 0.0 {
            return Ok(());
        }
        let steps = (span / self.dt).ceil().max(1.0) as usize;
        let dt = span / steps as f64;
        for s in 0..steps {
            self.step(y, t0 + s as f64 * dt, dt);
        }
        Ok(())
    }
}

const DP_C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus the embedded fourth-order weights.
const DP_E: [f64; 7] = [
    35.0 / 384.0 - 5179.0 / 57600.0,
    0.0,
    500.0 / 1113.0 - 7571.0 / 16695.0,
    125.0 / 192.0 - 393.0 / 640.0,
    -2187.0 / 6784.0 + 92097.0 / 339200.0,
    11.0 / 84.0 - 187.0 / 2100.0,
    -1.0 / 40.0,
];

struct DormandPrince<'a> {
    h: &'a Hamiltonian,
    rtol: f64,
    atol: f64,
    step: f64,
    k: Vec<Vec<Complex64>>,
    stage: Vec<Complex64>,
    next: Vec<Complex64>,
}

impl<'a> DormandPrince<'a> {
    fn new(h: &'a Hamiltonian, rtol: f64, atol: f64, first_step: f64) -> Self {
        let dim = h.space().dim();
        let zero = vec![Complex64::new(0.0, 0.0); dim];
        Self {
            h,
            rtol,
            atol,
            step: if first_step.is_finite() { first_step } else { 1.0 },
            k: vec![zero.clone(); 7],
            stage: zero.clone(),
            next: zero,
        }
    }

    /// Attempts one step; returns the scaled error norm and leaves the
    /// candidate in `self.next`.
    fn attempt(&mut self, y: &[Complex64], t: f64, dt: f64) -> f64 {
        derivative(self.h, t, y, &mut self.k[0]);
        for s in 1..7 {
            for i in 0..y.len() {
                let mut acc = y[i];
                for (j, a) in DP_A[s].iter().enumerate().take(s) {
                    if *a != 0.0 {
                        acc += self.k[j][i] * (a * dt);
                    }
                }
                self.stage[i] = acc;
            }
            derivative(self.h, t + DP_C[s] * dt, &self.stage, &mut self.k[s]);
        }
        // stage 7 is evaluated at the fifth-order solution
        self.next.copy_from_slice(&self.stage);
        let mut err: f64 = 0.0;
        for i in 0..y.len() {
            let mut e = Complex64::new(0.0, 0.0);
            for (j, w) in DP_E.iter().enumerate() {
                e += self.k[j][i] * (w * dt);
            }
            let scale = self.atol + self.rtol * y[i].norm().max(self.next[i].norm());
            err = err.max(e.norm() / scale);
        }
        err
    }
}

impl Stepper for DormandPrince<'_> {
    fn advance(&mut self, y: &mut [Complex64], t0: f64, t1: f64) -> Result<(), FockError> {
        let mut t = t0;
        let mut taken = 0usize;
        while t < t1 {
            let dt = self.step.min(t1 - t);
            if dt < 1e-13 * t.abs().max(1.0) || taken > MAX_ADAPTIVE_STEPS {
                return Err(FockError::StepSizeFailure { time: t, step: dt });
            }
            let err = self.attempt(y, t, dt);
            let factor = if err == 0.0 {
                5.0
            } else {
                (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
            };
            if err <= 1.0 {
                y.copy_from_slice(&self.next);
                t = if dt == t1 - t { t1 } else { t + dt };
                // keep the unclipped step when the last one was shortened to hit t1
                if dt == self.step {
                    self.step = dt * factor;
                }
            } else {
                self.step = dt * factor;
            }
            taken += 1;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::hamiltonian::{build_hamiltonian, effective_static, Coefficient, HamiltonianKind};
    use crate::fock::operator::SparseOp;
    use crate::fock::space::{FockSpace, Qubit};

    /// Resonant Jaynes-Cummings block `|e,0> <-> |g,1>` with coupling `g`.
    fn jc(space: FockSpace, g: f64) -> Hamiltonian {
        let mut h = Hamiltonian::new(space);
        let op = SparseOp::sigma_plus(&space).mul(&SparseOp::annihilation(&space));
        h.add_with_adjoint(Coefficient::constant(g), op);
        h
    }

    #[test]
    fn jaynes_cummings_oscillation() {
        let s = FockSpace::new(4).unwrap();
        let g = 0.05;
        let h = jc(s, g);
        let init = QuantumState::basis(s, Qubit::Excited, 0);
        let times: Vec<f64> = (0..=40).map(|k| k as f64 * 2.0).collect();
        for control in [
            EvolveControl::default(),
            EvolveControl {
                integrator: Integrator::DormandPrince {
                    rtol: 1e-10,
                    atol: 1e-12,
                },
                check_leakage: true,
            },
        ] {
            let traj = evolve(&h, &init, &times, &control).unwrap();
            for (t, st) in times.iter().zip(&traj) {
                let pe = st.amplitudes()[s.index(Qubit::Excited, 0)].norm_sqr();
                assert!((pe - (g * t).cos().powi(2)).abs() < 1e-6, "t={t}");
            }
        }
    }

    #[test]
    fn decoupled_populations_are_constant() {
        let s = FockSpace::new(6).unwrap();
        let init = QuantumState::coherent(
            s,
            Complex64::new(1.0, 0.0),
            Complex64::new(0.5, 0.0),
            Complex64::new(0.2, 0.1),
        )
        .unwrap();
        let times = [0.0, 10.0, 50.0];
        let check = |h: &Hamiltonian, tol: f64| {
            let traj = evolve(h, &init, &times, &EvolveControl::default()).unwrap();
            for st in &traj {
                for (a, b) in st.amplitudes().iter().zip(init.amplitudes()) {
                    assert!((a.norm_sqr() - b.norm_sqr()).abs() < tol);
                }
            }
        };
        // in the rotating frame an uncoupled system does not evolve at all
        let p = crate::model::SystemParams::from_eta(100.0, 0.0, 0.0).unwrap();
        let m = crate::model::ModulationParams::new(1.5, 0.68).unwrap();
        let model = crate::model::derive_model(&p, &m, crate::model::SelectionMode::MinDetuning).unwrap();
        for kind in [
            HamiltonianKind::FirstRotating,
            HamiltonianKind::RwaTwoSideband,
            HamiltonianKind::LabFrame,
        ] {
            let h = build_hamiltonian(kind, &p, &m, &model, s).unwrap();
            check(&h, if kind == HamiltonianKind::LabFrame { 1e-7 } else { 1e-10 });
        }
        check(&effective_static(s, 1.0, 0.1, 0.0, 0.0), 1e-7);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let s = FockSpace::new(6).unwrap();
        let h = effective_static(s, 0.4, 0.05, 0.03, 0.02);
        assert!(default_step(&h) > 0.04);
        let init = QuantumState::basis(s, Qubit::Ground, 0);
        let times = [0.0, 20.0];
        let reference = evolve(
            &h,
            &init,
            &times,
            &EvolveControl {
                integrator: Integrator::Rk4 { max_step: Some(1e-3) },
                check_leakage: false,
            },
        )
        .unwrap();
        let err = |dt: f64| {
            let control = EvolveControl {
                integrator: Integrator::Rk4 { max_step: Some(dt) },
                check_leakage: false,
            };
            let traj = evolve(&h, &init, &times, &control).unwrap();
            traj[1]
                .amplitudes()
                .iter()
                .zip(reference[1].amplitudes())
                .map(|(a, b)| (a - b).norm())
                .fold(0.0, f64::max)
        };
        let ratio = err(0.04) / err(0.02);
        assert!((ratio - 16.0).abs() < 2.0, "ratio {ratio}");
    }

    #[test]
    fn leakage_is_reported() {
        let s = FockSpace::new(3).unwrap();
        let h = effective_static(s, 1.0, 1.0, 0.5, 0.5);
        let init = QuantumState::basis(s, Qubit::Ground, 0);
        let err = evolve(&h, &init, &[0.0, 5.0], &EvolveControl::default()).unwrap_err();
        assert!(matches!(err, FockError::CutoffTooSmall { .. }));
    }

    #[test]
    fn rejects_loose_adaptive_tolerance_and_bad_grids() {
        let s = FockSpace::new(3).unwrap();
        let h = jc(s, 0.1);
        let init = QuantumState::basis(s, Qubit::Ground, 0);
        let loose = EvolveControl {
            integrator: Integrator::DormandPrince {
                rtol: 1e-6,
                atol: 1e-12,
            },
            check_leakage: true,
        };
        assert!(matches!(
            evolve(&h, &init, &[0.0, 1.0], &loose),
            Err(FockError::InvalidControl(_))
        ));
        assert!(matches!(
            evolve(&h, &init, &[1.0, 0.0], &EvolveControl::default()),
            Err(FockError::InvalidTimeGrid)
        ));
    }
}
