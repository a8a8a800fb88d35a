//! Exact diagonalization of the effective static model.
//!
//! Without a bias field the Hamiltonian commutes with the parity
//! `sigma_z (-1)^(a^dag a)`, and each parity sector is a real symmetric
//! tridiagonal chain `|e,0>, |g,1>, |e,2>, ...` or `|g,0>, |e,1>, |g,2>, ...`.
//! Those chains are solved by Sturm-sequence bisection and inverse iteration,
//! which keeps cutoffs of several thousand photons cheap. With a bias the
//! symmetry is gone and a dense solver is used up to [`DENSE_LIMIT`].

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::space::{FockSpace, QuantumState, Qubit};
use super::FockError;
use crate::model::EffectiveModel;
use crate::phase::{displacement_and_qubit_freq, ReducedCouplings};

/// Largest dimension handed to the dense eigensolver.
pub const DENSE_LIMIT: usize = 2000;
/// Largest tolerated ground-state population of the two highest Fock levels.
pub const OCCUPATION_LIMIT: f64 = 1e-8;
/// Eigenpairs must satisfy `||H v - E v|| < RESIDUAL_LIMIT ||H||`.
pub const RESIDUAL_LIMIT: f64 = 1e-10;
/// Cutoff increment used by [`cutoff_convergence`].
pub const CONVERGENCE_STEP: usize = 25;
/// Relative change in `E0` and gap accepted by [`cutoff_convergence`].
pub const CONVERGENCE_TOL: f64 = 1e-8;

#[derive(Debug, Clone)]
pub struct EdResult {
    /// Ascending.
    pub energies: Vec<f64>,
    pub states: Vec<QuantumState>,
    /// Largest `||H v - E v|| / ||H||` over the returned pairs.
    pub residual: f64,
}

impl EdResult {
    pub fn ground_energy(&self) -> f64 {
        self.energies[0]
    }

    pub fn gap(&self) -> Option<f64> {
        self.energies.get(1).map(|e1| e1 - self.energies[0])
    }

    pub fn ground_state(&self) -> &QuantumState {
        &self.states[0]
    }
}

/// Scalar summary of an ED run, the shape the sweep tables use.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EdSummary {
    pub e0: f64,
    pub gap: f64,
    pub n_mean: f64,
    pub x_mean: f64,
    pub parity: f64,
    pub n_max: usize,
}

/// Lowest `count` eigenpairs of
/// `|w0|/2 sz + |wc| a^dag a + g_r (a s+ + h.c.) + g_cr (a^dag s+ + h.c.) + bias x`.
///
/// Frequencies enter through their magnitudes, as in the analytic theory.
/// A negative `bias` favours the `<x> > 0` branch.
pub fn ground_state_ed(
    model: &EffectiveModel,
    space: FockSpace,
    bias: f64,
    count: usize,
) -> Result<EdResult, FockError> {
    let count = count.max(1).min(space.dim());
    let w0 = model.omega0_eff.abs();
    let wc = model.omega_c_eff.abs();
    let result = if bias == 0.0 {
        parity_sectors(space, w0, wc, model.g_r, model.g_cr, count)?
    } else {
        dense(space, w0, wc, model.g_r, model.g_cr, bias, count)?
    };
    if result.residual > RESIDUAL_LIMIT {
        return Err(FockError::Residual(result.residual));
    }
    let weight = result.states[0].top_occupation();
    if weight > OCCUPATION_LIMIT {
        return Err(FockError::CutoffTooSmall {
            n_max: space.n_max(),
            weight,
        });
    }
    Ok(result)
}

pub fn ed_summary(model: &EffectiveModel, space: FockSpace, bias: f64) -> Result<EdSummary, FockError> {
    let r = ground_state_ed(model, space, bias, 2)?;
    let o = r.ground_state().observables();
    Ok(EdSummary {
        e0: r.ground_energy(),
        gap: r.gap().unwrap_or(f64::NAN),
        n_mean: o.n_mean,
        x_mean: o.x_mean,
        parity: o.parity,
        n_max: space.n_max(),
    })
}

/// Real symmetric tridiagonal matrix.
struct Tridiagonal {
    diag: Vec<f64>,
    off: Vec<f64>,
}

impl Tridiagonal {
    fn len(&self) -> usize {
        self.diag.len()
    }

    fn norm_bound(&self) -> f64 {
        (0..self.len())
            .map(|i| {
                let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
                let right = self.off.get(i).map_or(0.0, |e| e.abs());
                self.diag[i].abs() + left + right
            })
            .fold(0.0, f64::max)
    }

    fn gershgorin(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..self.len() {
            let left = if i > 0 { self.off[i - 1].abs() } else { 0.0 };
            let right = self.off.get(i).map_or(0.0, |e| e.abs());
            lo = lo.min(self.diag[i] - left - right);
            hi = hi.max(self.diag[i] + left + right);
        }
        (lo, hi)
    }

    /// Number of eigenvalues below `x`.
    fn count_below(&self, x: f64, pivmin: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
        for i in 1..self.len() {
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q.abs() < pivmin {
                q = -pivmin;
            }
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// `index`-th smallest eigenvalue (zero based).
    fn eigenvalue(&self, index: usize) -> f64 {
        let (mut lo, mut hi) = self.gershgorin();
        let scale = lo.abs().max(hi.abs()).max(f64::MIN_POSITIVE);
        let pivmin = f64::MIN_POSITIVE.max(scale * scale * f64::EPSILON * f64::EPSILON);
        lo -= 2.0 * f64::EPSILON * scale;
        hi += 2.0 * f64::EPSILON * scale;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi || hi - lo <= 2.0 * f64::EPSILON * scale * 0.25 {
                break;
            }
            if self.count_below(mid, pivmin) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    fn apply(&self, v: &[f64], out: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut acc = self.diag[i] * v[i];
            if i > 0 {
                acc += self.off[i - 1] * v[i - 1];
            }
            if i + 1 < n {
                acc += self.off[i] * v[i + 1];
            }
            out[i] = acc;
        }
    }

    fn residual(&self, value: f64, v: &[f64]) -> f64 {
        let mut hv = vec![0.0; v.len()];
        self.apply(v, &mut hv);
        hv.iter()
            .zip(v)
            .map(|(a, b)| (a - value * b).powi(2))
            .sum::<f64>()
            .sqrt()
    }

    /// Solves `(T - shift) x = b` in place by Gaussian elimination with
    /// partial pivoting; exact zero pivots are nudged to `tiny`.
    fn shifted_solve(&self, shift: f64, b: &mut [f64], tiny: f64) {
        let n = self.len();
        if n == 1 {
            let d = self.diag[0] - shift;
            b[0] /= if d == 0.0 { tiny } else { d };
            return;
        }
        let mut d: Vec<f64> = self.diag.iter().map(|x| x - shift).collect();
        let mut dl = self.off.clone();
        let mut du = self.off.clone();
        let mut du2 = vec![0.0; n.saturating_sub(2)];
        let mut swapped = vec![false; n - 1];
        for i in 0..n - 1 {
            if d[i].abs() >= dl[i].abs() {
                if d[i] == 0.0 {
                    d[i] = tiny;
                }
                let fact = dl[i] / d[i];
                dl[i] = fact;
                d[i + 1] -= fact * du[i];
            } else {
                let fact = d[i] / dl[i];
                d[i] = dl[i];
                dl[i] = fact;
                let temp = du[i];
                du[i] = d[i + 1];
                d[i + 1] = temp - fact * d[i + 1];
                if i + 2 < n {
                    du2[i] = du[i + 1];
                    du[i + 1] = -fact * du[i + 1];
                }
                swapped[i] = true;
            }
        }
        if d[n - 1] == 0.0 {
            d[n - 1] = tiny;
        }
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i];
                b[i] = b[i + 1];
                b[i + 1] = temp - dl[i] * b[i];
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    }

    /// Lowest `count` eigenpairs.
    fn lowest(&self, count: usize) -> Vec<(f64, Vec<f64>)> {
        let n = self.len();
        let norm = self.norm_bound().max(f64::MIN_POSITIVE);
        let tiny = f64::EPSILON * norm;
        let mut pairs: Vec<(f64, Vec<f64>)> = Vec::with_capacity(count);
        for k in 0..count.min(n) {
            let value = self.eigenvalue(k);
            // deterministic start vector with no special symmetry
            let mut v: Vec<f64> = (0..n)
                .map(|i| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.7548776662).sin())
                .collect();
            for _ in 0..8 {
                for (_, u) in &pairs {
                    let overlap: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    v.iter_mut().zip(u).for_each(|(x, y)| *x -= overlap * y);
                }
                let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                v.iter_mut().for_each(|x| *x /= len);
                if self.residual(value, &v) < 1e-3 * RESIDUAL_LIMIT * norm {
                    break;
                }
                self.shifted_solve(value, &mut v, tiny);
            }
            for (_, u) in &pairs {
                let overlap: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                v.iter_mut().zip(u).for_each(|(x, y)| *x -= overlap * y);
            }
            let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            v.iter_mut().for_each(|x| *x /= len);
            pairs.push((value, v));
        }
        pairs
    }
}

/// The chain whose first element is `|first, 0>`; element `k` has `k` photons.
fn sector_chain(levels: usize, first: Qubit, w0: f64, wc: f64, g_r: f64, g_cr: f64) -> (Tridiagonal, Vec<Qubit>) {
    let other = |q: Qubit| {
        if q == Qubit::Ground {
            Qubit::Excited
        } else {
            Qubit::Ground
        }
    };
    let qubits: Vec<Qubit> = (0..levels)
        .map(|k| if k % 2 == 0 { first } else { other(first) })
        .collect();
    let diag = (0..levels)
        .map(|k| wc * k as f64 + qubits[k].sigma_z() * w0 / 2.0)
        .collect();
    let off = (0..levels.saturating_sub(1))
        .map(|k| {
            let root = ((k + 1) as f64).sqrt();
            // <e,k| g_r a s+ |g,k+1>   or   <g,k| g_cr a s- |e,k+1>
            if qubits[k] == Qubit::Excited {
                g_r * root
            } else {
                g_cr * root
            }
        })
        .collect();
    (Tridiagonal { diag, off }, qubits)
}

fn parity_sectors(
    space: FockSpace,
    w0: f64,
    wc: f64,
    g_r: f64,
    g_cr: f64,
    count: usize,
) -> Result<EdResult, FockError> {
    let levels = space.levels();
    let mut found: Vec<(f64, QuantumState, f64)> = Vec::new();
    let mut norm: f64 = 0.0;
    for first in [Qubit::Ground, Qubit::Excited] {
        let (chain, qubits) = sector_chain(levels, first, w0, wc, g_r, g_cr);
        let chain_norm = chain.norm_bound().max(f64::MIN_POSITIVE);
        norm = norm.max(chain_norm);
        for (value, v) in chain.lowest(count) {
            let residual = chain.residual(value, &v);
            let mut amplitudes = vec![Complex64::new(0.0, 0.0); space.dim()];
            for (k, c) in v.iter().enumerate() {
                amplitudes[space.index(qubits[k], k)] = Complex64::new(*c, 0.0);
            }
            found.push((value, QuantumState::from_amplitudes(space, amplitudes)?, residual));
        }
    }
    found.sort_by(|a, b| a.0.total_cmp(&b.0));
    found.truncate(count);
    let residual = found.iter().map(|f| f.2).fold(0.0, f64::max) / norm;
    let (energies, states) = found.into_iter().map(|(e, s, _)| (e, s)).unzip();
    Ok(EdResult {
        energies,
        states,
        residual,
    })
}

fn dense(
    space: FockSpace,
    w0: f64,
    wc: f64,
    g_r: f64,
    g_cr: f64,
    bias: f64,
    count: usize,
) -> Result<EdResult, FockError> {
    let dim = space.dim();
    if dim > DENSE_LIMIT {
        return Err(FockError::TooLarge {
            dim,
            limit: DENSE_LIMIT,
        });
    }
    let mut h = DMatrix::<f64>::zeros(dim, dim);
    let mut set = |i: usize, j: usize, v: f64| {
        h[(i, j)] += v;
        if i != j {
            h[(j, i)] += v;
        }
    };
    for n in 0..=space.n_max() {
        let g = space.index(Qubit::Ground, n);
        let e = space.index(Qubit::Excited, n);
        set(g, g, wc * n as f64 - w0 / 2.0);
        set(e, e, wc * n as f64 + w0 / 2.0);
        if n < space.n_max() {
            let root = ((n + 1) as f64).sqrt();
            // a s+ |g,n+1> = sqrt(n+1) |e,n>;   a^dag s+ |g,n> = sqrt(n+1) |e,n+1>
            set(e, space.index(Qubit::Ground, n + 1), g_r * root);
            set(space.index(Qubit::Excited, n + 1), g, g_cr * root);
            let x = bias * root * std::f64::consts::FRAC_1_SQRT_2;
            set(g, space.index(Qubit::Ground, n + 1), x);
            set(e, space.index(Qubit::Excited, n + 1), x);
        }
    }
    let norm = h
        .row_iter()
        .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0, f64::max)
        .max(f64::MIN_POSITIVE);
    let eig = SymmetricEigen::new(h.clone());
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let mut energies = Vec::with_capacity(count);
    let mut states = Vec::with_capacity(count);
    let mut residual: f64 = 0.0;
    for &k in order.iter().take(count) {
        let value = eig.eigenvalues[k];
        let v = eig.eigenvectors.column(k);
        let r = (&h * v - v * value).norm();
        residual = residual.max(r / norm);
        energies.push(value);
        states.push(QuantumState::from_amplitudes(
            space,
            v.iter().map(|c| Complex64::new(*c, 0.0)).collect(),
        )?);
    }
    Ok(EdResult {
        energies,
        states,
        residual,
    })
}

/// `ceil(4 (alpha² + 6 |alpha| + 10))` with `alpha` the analytic displacement
/// (zero outside the superradiant phases).
pub fn heuristic_cutoff(model: &EffectiveModel) -> usize {
    let alpha = ReducedCouplings::from_model(model)
        .ok()
        .and_then(|rc| displacement_and_qubit_freq(&rc, model).ok())
        .map_or(0.0, |f| f.alpha);
    (4.0 * (alpha * alpha + 6.0 * alpha + 10.0)).ceil() as usize
}

/// Smallest cutoff in the ascending `cutoffs` whose ground energy and gap
/// move by less than `1e-8 |w0|` when the cutoff grows by 25.
pub fn cutoff_convergence(model: &EffectiveModel, cutoffs: &[usize]) -> Result<usize, FockError> {
    if cutoffs.windows(2).any(|w| w[1] <= w[0]) {
        return Err(FockError::InvalidControl("cutoff sequence must be strictly ascending"));
    }
    let tol = CONVERGENCE_TOL * model.omega0_eff.abs();
    let probe = |n: usize| -> Option<(f64, f64)> {
        let r = ground_state_ed(model, FockSpace::new(n).ok()?, 0.0, 2).ok()?;
        Some((r.ground_energy(), r.gap()?))
    };
    let mut last = 0;
    for &n in cutoffs {
        last = n;
        let (Some(a), Some(b)) = (probe(n), probe(n + CONVERGENCE_STEP)) else {
            continue;
        };
        if (a.0 - b.0).abs() < tol && (a.1 - b.1).abs() < tol {
            return Ok(n);
        }
    }
    Err(FockError::NotConverged { last })
}
