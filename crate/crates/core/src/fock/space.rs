use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::FockError;

/// Largest coherent-state mass allowed outside the truncated space.
pub const COHERENT_TAIL_LIMIT: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Qubit {
    Ground,
    Excited,
}

impl Qubit {
    fn offset(self) -> usize {
        match self {
            Qubit::Ground => 0,
            Qubit::Excited => 1,
        }
    }

    /// Eigenvalue of `sigma_z`.
    pub fn sigma_z(self) -> f64 {
        match self {
            Qubit::Ground => -1.0,
            Qubit::Excited => 1.0,
        }
    }
}

/// Qubit ⊗ Fock space truncated at `n_max` photons.
///
/// Basis index of `|q, n>` is `q (n_max + 1) + n` with `q = 0` for the
/// ground state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FockSpace {
    n_max: usize,
}

impl FockSpace {
    pub fn new(n_max: usize) -> Result<Self, FockError> {
        if n_max < 1 {
            return Err(FockError::InvalidCutoff(n_max));
        }
        Ok(Self { n_max })
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn levels(&self) -> usize {
        self.n_max + 1
    }

    pub fn dim(&self) -> usize {
        2 * self.levels()
    }

    pub fn index(&self, qubit: Qubit, n: usize) -> usize {
        debug_assert!(n <= self.n_max);
        qubit.offset() * self.levels() + n
    }

    /// `(qubit, n)` of a basis index.
    pub fn label(&self, index: usize) -> (Qubit, usize) {
        let q = if index < self.levels() {
            Qubit::Ground
        } else {
            Qubit::Excited
        };
        (q, index % self.levels())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuantumState {
    space: FockSpace,
    amplitudes: Vec<Complex64>,
}

impl QuantumState {
    pub fn from_amplitudes(space: FockSpace, amplitudes: Vec<Complex64>) -> Result<Self, FockError> {
        if amplitudes.len() != space.dim() {
            return Err(FockError::DimensionMismatch {
                expected: space.dim(),
                found: amplitudes.len(),
            });
        }
        Ok(Self { space, amplitudes })
    }

    pub fn basis(space: FockSpace, qubit: Qubit, n: usize) -> Self {
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim()];
        amplitudes[space.index(qubit, n)] = Complex64::new(1.0, 0.0);
        Self { space, amplitudes }
    }

    /// `(c_g |g> + c_e |e>) ⊗ |alpha>`, normalised.
    pub fn coherent(space: FockSpace, c_g: Complex64, c_e: Complex64, alpha: Complex64) -> Result<Self, FockError> {
        let levels = space.levels();
        let mut fock = Vec::with_capacity(levels);
        let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
        fock.push(c);
        for n in 1..levels {
            c = c * alpha / (n as f64).sqrt();
            fock.push(c);
        }
        let kept: f64 = fock.iter().map(|c| c.norm_sqr()).sum();
        let tail = 1.0 - kept;
        if tail > COHERENT_TAIL_LIMIT {
            return Err(FockError::CutoffTooSmall {
                n_max: space.n_max(),
                weight: tail,
            });
        }
        let qubit_norm = (c_g.norm_sqr() + c_e.norm_sqr()).sqrt();
        if qubit_norm == 0.0 {
            return Err(FockError::ZeroState);
        }
        let scale = 1.0 / (qubit_norm * kept.sqrt());
        let mut amplitudes = Vec::with_capacity(space.dim());
        amplitudes.extend(fock.iter().map(|f| c_g * f * scale));
        amplitudes.extend(fock.iter().map(|f| c_e * f * scale));
        Ok(Self { space, amplitudes })
    }

    pub fn space(&self) -> FockSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn amplitudes_mut(&mut self) -> &mut [Complex64] {
        &mut self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self | other>`.
    pub fn inner(&self, other: &QuantumState) -> Complex64 {
        self.amplitudes
            .iter()
            .zip(&other.amplitudes)
            .map(|(a, b)| a.conj() * b)
            .sum()
    }

    /// `|<self | other>|²`.
    pub fn fidelity(&self, other: &QuantumState) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Probability in the two highest retained Fock levels.
    pub fn top_occupation(&self) -> f64 {
        let n = self.space.n_max();
        let mut p = 0.0;
        for q in [Qubit::Ground, Qubit::Excited] {
            for k in [n - 1, n] {
                p += self.amplitudes[self.space.index(q, k)].norm_sqr();
            }
        }
        p
    }

    pub fn observables(&self) -> Observables {
        let levels = self.space.levels();
        let mut a = Complex64::new(0.0, 0.0);
        let mut a2 = Complex64::new(0.0, 0.0);
        let mut n_mean = 0.0;
        let mut parity = 0.0;
        let mut norm = 0.0;
        for (qi, q) in [Qubit::Ground, Qubit::Excited].into_iter().enumerate() {
            let block = &self.amplitudes[qi * levels..(qi + 1) * levels];
            for n in 0..levels {
                let p = block[n].norm_sqr();
                norm += p;
                n_mean += n as f64 * p;
                let photon_sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                parity += q.sigma_z() * photon_sign * p;
                if n >= 1 {
                    a += block[n - 1].conj() * block[n] * (n as f64).sqrt();
                }
                if n >= 2 {
                    a2 += block[n - 2].conj() * block[n] * ((n * (n - 1)) as f64).sqrt();
                }
            }
        }
        let x_mean = std::f64::consts::SQRT_2 * a.re;
        let p_mean = std::f64::consts::SQRT_2 * a.im;
        let x2 = (2.0 * a2.re + 2.0 * n_mean + norm) / 2.0;
        let p2 = (2.0 * n_mean + norm - 2.0 * a2.re) / 2.0;
        Observables {
            x_mean,
            p_mean,
            n_mean,
            var_x: x2 - x_mean * x_mean,
            var_p: p2 - p_mean * p_mean,
            parity,
        }
    }
}

/// Expectation values of a state. Parity is `<sigma_z (-1)^(a^dag a)>`, so
/// `|g, 0>` has parity `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Observables {
    pub x_mean: f64,
    pub p_mean: f64,
    pub n_mean: f64,
    pub var_x: f64,
    pub var_p: f64,
    pub parity: f64,
}

pub fn ed_observables(state: &QuantumState) -> Observables {
    state.observables()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn indexing_round_trips() {
        let s = FockSpace::new(4).unwrap();
        assert_eq!(s.dim(), 10);
        assert_eq!(s.index(Qubit::Ground, 0), 0);
        assert_eq!(s.index(Qubit::Excited, 0), 5);
        for i in 0..s.dim() {
            let (q, n) = s.label(i);
            assert_eq!(s.index(q, n), i);
        }
        assert!(FockSpace::new(0).is_err());
    }

    #[test]
    fn vacuum_observables() {
        let s = FockSpace::new(5).unwrap();
        let o = QuantumState::basis(s, Qubit::Ground, 0).observables();
        assert_eq!(
            o,
            Observables {
                x_mean: 0.0,
                p_mean: 0.0,
                n_mean: 0.0,
                var_x: 0.5,
                var_p: 0.5,
                parity: -1.0
            }
        );
        let o = QuantumState::basis(s, Qubit::Excited, 1).observables();
        assert_eq!(o.parity, -1.0);
        assert_eq!(o.n_mean, 1.0);
    }

    #[test]
    fn coherent_state_displacement() {
        let s = FockSpace::new(20).unwrap();
        let st = QuantumState::coherent(s, c(1.0), c(0.0), c(0.1)).unwrap();
        assert_abs_diff_eq!(st.norm(), 1.0, epsilon = 1e-14);
        let o = st.observables();
        assert_abs_diff_eq!(o.x_mean, 2f64.sqrt() * 0.1, epsilon = 1e-12);
        assert_abs_diff_eq!(o.p_mean, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(o.n_mean, 0.01, epsilon = 1e-12);
        assert_abs_diff_eq!(o.var_x, 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(o.var_p, 0.5, epsilon = 1e-12);

        let imag = QuantumState::coherent(s, c(1.0), c(1.0), Complex64::new(0.0, 0.5)).unwrap();
        assert_abs_diff_eq!(imag.observables().p_mean, 2f64.sqrt() * 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(imag.norm(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn coherent_state_needs_support() {
        let s = FockSpace::new(5).unwrap();
        let err = QuantumState::coherent(s, c(1.0), c(0.0), c(3.0)).unwrap_err();
        assert!(matches!(err, FockError::CutoffTooSmall { .. }));
    }

    #[test]
    fn fidelity_of_orthogonal_and_equal() {
        let s = FockSpace::new(3).unwrap();
        let a = QuantumState::basis(s, Qubit::Ground, 1);
        let b = QuantumState::basis(s, Qubit::Excited, 1);
        assert_eq!(a.fidelity(&b), 0.0);
        assert_eq!(a.fidelity(&a), 1.0);
    }
}
