use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::operator::SparseOp;
use super::space::FockSpace;
use super::FockError;
use crate::bessel::{bessel_j, MAX_ORDER};
use crate::model::{a2_amplitude, sideband_detunings, sideband_window, EffectiveModel, ModulationParams, SystemParams};

/// `Σ_j a_j exp(i w_j t)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Coefficient {
    parts: Vec<(Complex64, f64)>,
}

impl Coefficient {
    pub fn constant(c: f64) -> Self {
        Self {
            parts: vec![(Complex64::new(c, 0.0), 0.0)],
        }
    }

    pub fn push(&mut self, amplitude: f64, frequency: f64) {
        if amplitude != 0.0 {
            self.parts.push((Complex64::new(amplitude, 0.0), frequency));
        }
    }

    pub fn oscillating(amplitude: f64, frequency: f64) -> Self {
        let mut c = Self::default();
        c.push(amplitude, frequency);
        c
    }

    pub fn eval(&self, t: f64) -> Complex64 {
        self.parts
            .iter()
            .map(|&(a, w)| {
                if w == 0.0 {
                    a
                } else {
                    a * Complex64::from_polar(1.0, w * t)
                }
            })
            .sum()
    }

    pub fn conj(&self) -> Self {
        Self {
            parts: self.parts.iter().map(|&(a, w)| (a.conj(), -w)).collect(),
        }
    }

    pub fn is_static(&self) -> bool {
        self.parts.iter().all(|&(_, w)| w == 0.0)
    }

    pub fn max_frequency(&self) -> f64 {
        self.parts.iter().map(|&(_, w)| w.abs()).fold(0.0, f64::max)
    }

    /// `Σ |a_j|`, a bound on `|c(t)|`.
    pub fn bound(&self) -> f64 {
        self.parts.iter().map(|(a, _)| a.norm()).sum()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HamiltonianKind {
    /// Driven Rabi model with the A² term and the qubit-frequency modulation.
    LabFrame,
    /// Interaction picture of the bare qubit, cavity and modulation: the
    /// full sideband sum with the A² squeezing terms.
    FirstRotating,
    /// Only the two selected sidebands, still time dependent.
    RwaTwoSideband,
    /// The time-independent anisotropic Rabi model.
    EffectiveStatic,
}

/// `H(t) = Σ_k c_k(t) O_k`; every non-Hermitian term carries its adjoint as a
/// separate term.
#[derive(Debug, Clone)]
pub struct Hamiltonian {
    space: FockSpace,
    terms: Vec<(Coefficient, SparseOp)>,
}

impl Hamiltonian {
    pub fn new(space: FockSpace) -> Self {
        Self {
            space,
            terms: Vec::new(),
        }
    }

    pub fn add_term(&mut self, coefficient: Coefficient, op: SparseOp) {
        if !coefficient.parts.is_empty() && op.nnz() > 0 {
            self.terms.push((coefficient, op));
        }
    }

    /// Adds `c(t) op + conj(c(t)) op^dag`.
    pub fn add_with_adjoint(&mut self, coefficient: Coefficient, op: SparseOp) {
        let adjoint = op.adjoint();
        self.add_term(coefficient.conj(), adjoint);
        self.add_term(coefficient, op);
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn is_static(&self) -> bool {
        self.terms.iter().all(|(c, _)| c.is_static())
    }

    /// Matrix at time `t`.
    pub fn at(&self, t: f64) -> SparseOp {
        self.terms
            .iter()
            .fold(SparseOp::zero(self.space.dim()), |acc, (c, op)| {
                acc.add(&op.scale(c.eval(t)))
            })
    }

    /// `y = H(t) x`.
    pub fn apply(&self, t: f64, x: &[Complex64], y: &mut [Complex64]) {
        y.iter_mut().for_each(|v| *v = Complex64::new(0.0, 0.0));
        for (c, op) in &self.terms {
            op.apply_add(c.eval(t), x, y);
        }
    }

    /// Largest frequency the solution can contain: the largest explicit
    /// time dependence or a bound on the spectral radius, whichever is larger.
    pub fn max_frequency(&self) -> f64 {
        let explicit = self.terms.iter().map(|(c, _)| c.max_frequency()).fold(0.0, f64::max);
        let norm: f64 = self.terms.iter().map(|(c, op)| c.bound() * op.row_sum_norm()).sum();
        explicit.max(norm)
    }

    pub fn expectation(&self, t: f64, x: &[Complex64]) -> Complex64 {
        let mut y = vec![Complex64::new(0.0, 0.0); x.len()];
        self.apply(t, x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }
}

/// `w0/2 sz + wc a^dag a + g_r (a s+ + a^dag s-) + g_cr (a^dag s+ + a s-)`.
pub fn effective_static(space: FockSpace, omega0: f64, omega_c: f64, g_r: f64, g_cr: f64) -> Hamiltonian {
    let a = SparseOp::annihilation(&space);
    let sp = SparseOp::sigma_plus(&space);
    let mut h = Hamiltonian::new(space);
    h.add_term(Coefficient::constant(omega0 / 2.0), SparseOp::sigma_z(&space));
    h.add_term(Coefficient::constant(omega_c), SparseOp::number(&space));
    h.add_with_adjoint(Coefficient::constant(g_r), sp.mul(&a));
    h.add_with_adjoint(Coefficient::constant(g_cr), sp.mul(&a.adjoint()));
    h
}

pub fn build_hamiltonian(
    kind: HamiltonianKind,
    params: &SystemParams,
    modulation: &ModulationParams,
    model: &EffectiveModel,
    space: FockSpace,
) -> Result<Hamiltonian, FockError> {
    params.validate()?;
    modulation.validate()?;
    let a = SparseOp::annihilation(&space);
    let ad = a.adjoint();
    let sp = SparseOp::sigma_plus(&space);
    let (g_a2, omega_c_prime) = a2_amplitude(params);
    let h = match kind {
        HamiltonianKind::EffectiveStatic => {
            effective_static(space, model.omega0_eff, model.omega_c_eff, model.g_r, model.g_cr)
        }
        HamiltonianKind::LabFrame => {
            let mut h = Hamiltonian::new(space);
            let x = a.add(&ad);
            let sz = SparseOp::sigma_z(&space);
            h.add_term(Coefficient::constant(params.omega_c), SparseOp::number(&space));
            h.add_term(Coefficient::constant(params.omega0 / 2.0), sz.clone());
            h.add_term(Coefficient::constant(params.g), sp.add(&sp.adjoint()).mul(&x));
            // g_A2 (a + a^dag)² = g_A2 (a² + a^dag² + 2 a^dag a + 1)
            let squared = a
                .mul(&a)
                .add(&ad.mul(&ad))
                .add(&SparseOp::number(&space).scale(Complex64::new(2.0, 0.0)))
                .add(&SparseOp::identity(&space));
            h.add_term(Coefficient::constant(g_a2), squared);
            // (xi nu / 2) cos(nu t) sz
            let drive = modulation.xi * modulation.nu / 4.0;
            let mut cos = Coefficient::oscillating(drive, modulation.nu);
            cos.push(drive, -modulation.nu);
            h.add_term(cos, sz);
            h
        }
        HamiltonianKind::FirstRotating => {
            let choice = model.selection.ok_or(FockError::MissingSelection)?;
            let mut rotating = Coefficient::default();
            let mut counter = Coefficient::default();
            let half = sideband_window(modulation.xi, choice.n0);
            for n in (choice.n0 - half)..=(choice.n0 + half) {
                if n.abs() <= MAX_ORDER {
                    let (delta, _) = sideband_detunings(params, modulation, n);
                    rotating.push(params.g * bessel_j(n, modulation.xi)?, delta);
                }
            }
            let half = sideband_window(modulation.xi, choice.m0);
            for m in (choice.m0 - half)..=(choice.m0 + half) {
                if m.abs() <= MAX_ORDER {
                    let (_, big_delta) = sideband_detunings(params, modulation, m);
                    counter.push(params.g * bessel_j(m, modulation.xi)?, big_delta);
                }
            }
            let mut h = Hamiltonian::new(space);
            h.add_with_adjoint(rotating, sp.mul(&a));
            h.add_with_adjoint(counter, sp.mul(&ad));
            h.add_with_adjoint(Coefficient::oscillating(g_a2, -2.0 * omega_c_prime), a.mul(&a));
            h
        }
        HamiltonianKind::RwaTwoSideband => {
            let choice = model.selection.ok_or(FockError::MissingSelection)?;
            let (delta, _) = sideband_detunings(params, modulation, choice.n0);
            let (_, big_delta) = sideband_detunings(params, modulation, choice.m0);
            let mut h = Hamiltonian::new(space);
            h.add_with_adjoint(Coefficient::oscillating(model.g_r, delta), sp.mul(&a));
            h.add_with_adjoint(Coefficient::oscillating(model.g_cr, big_delta), sp.mul(&ad));
            h
        }
    };
    Ok(h)
}
