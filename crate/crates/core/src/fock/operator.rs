use std::collections::BTreeMap;

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::space::{FockSpace, Qubit};

/// Complex sparse matrix in compressed-row form.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseOp {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

fn real(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

impl SparseOp {
    /// Duplicate entries are summed; exact zeros are dropped.
    pub fn from_triplets(dim: usize, triplets: impl IntoIterator<Item = (usize, usize, Complex64)>) -> Self {
        let mut rows: Vec<BTreeMap<usize, Complex64>> = vec![BTreeMap::new(); dim];
        for (i, j, v) in triplets {
            assert!(
                i < dim && j < dim,
                "entry ({i}, {j}) outside a {dim}-dimensional operator"
            );
            *rows[i].entry(j).or_insert(Complex64::new(0.0, 0.0)) += v;
        }
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for row in rows {
            for (j, v) in row {
                if v != Complex64::new(0.0, 0.0) {
                    cols.push(j);
                    vals.push(v);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_triplets(dim, [])
    }

    pub fn identity(space: &FockSpace) -> Self {
        Self::from_triplets(space.dim(), (0..space.dim()).map(|i| (i, i, real(1.0))))
    }

    /// Photon annihilation `a` (identity on the qubit).
    pub fn annihilation(space: &FockSpace) -> Self {
        let mut t = Vec::new();
        for q in [Qubit::Ground, Qubit::Excited] {
            for n in 1..=space.n_max() {
                t.push((space.index(q, n - 1), space.index(q, n), real((n as f64).sqrt())));
            }
        }
        Self::from_triplets(space.dim(), t)
    }

    pub fn creation(space: &FockSpace) -> Self {
        Self::annihilation(space).adjoint()
    }

    pub fn number(space: &FockSpace) -> Self {
        let t = (0..space.dim()).map(|i| (i, i, real(space.label(i).1 as f64)));
        Self::from_triplets(space.dim(), t)
    }

    pub fn sigma_z(space: &FockSpace) -> Self {
        let t = (0..space.dim()).map(|i| (i, i, real(space.label(i).0.sigma_z())));
        Self::from_triplets(space.dim(), t)
    }

    /// `|e><g|` (identity on the cavity).
    pub fn sigma_plus(space: &FockSpace) -> Self {
        let t = (0..=space.n_max()).map(|n| (space.index(Qubit::Excited, n), space.index(Qubit::Ground, n), real(1.0)));
        Self::from_triplets(space.dim(), t)
    }

    pub fn sigma_minus(space: &FockSpace) -> Self {
        Self::sigma_plus(space).adjoint()
    }

    /// `sigma_z (-1)^(a^dag a)`.
    pub fn parity(space: &FockSpace) -> Self {
        let t = (0..space.dim()).map(|i| {
            let (q, n) = space.label(i);
            let photon = if n % 2 == 0 { 1.0 } else { -1.0 };
            (i, i, real(q.sigma_z() * photon))
        });
        Self::from_triplets(space.dim(), t)
    }

    /// `(a + a^dag) / sqrt2`.
    pub fn position(space: &FockSpace) -> Self {
        Self::annihilation(space)
            .add(&Self::creation(space))
            .scale(real(std::f64::consts::FRAC_1_SQRT_2))
    }

    /// `i (a^dag - a) / sqrt2`.
    pub fn momentum(space: &FockSpace) -> Self {
        Self::creation(space)
            .add(&Self::annihilation(space).scale(real(-1.0)))
            .scale(Complex64::new(0.0, std::f64::consts::FRAC_1_SQRT_2))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    fn entries(&self) -> impl Iterator<Item = (usize, usize, Complex64)> + '_ {
        (0..self.dim)
            .flat_map(move |i| (self.row_ptr[i]..self.row_ptr[i + 1]).map(move |k| (i, self.cols[k], self.vals[k])))
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        let row = &self.cols[self.row_ptr[i]..self.row_ptr[i + 1]];
        match row.binary_search(&j) {
            Ok(k) => self.vals[self.row_ptr[i] + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn adjoint(&self) -> Self {
        Self::from_triplets(self.dim, self.entries().map(|(i, j, v)| (j, i, v.conj())))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        let mut out = self.clone();
        out.vals.iter_mut().for_each(|v| *v *= c);
        out
    }

    pub fn add(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        Self::from_triplets(self.dim, self.entries().chain(other.entries()))
    }

    /// Matrix product `self * other`.
    pub fn mul(&self, other: &SparseOp) -> Self {
        assert_eq!(self.dim, other.dim);
        let mut t = Vec::new();
        for (i, k, v) in self.entries() {
            for p in other.row_ptr[k]..other.row_ptr[k + 1] {
                t.push((i, other.cols[p], v * other.vals[p]));
            }
        }
        Self::from_triplets(self.dim, t)
    }

    /// `y += c * self * x`.
    pub fn apply_add(&self, c: Complex64, x: &[Complex64], y: &mut [Complex64]) {
        for (i, yi) in y.iter_mut().enumerate().take(self.dim) {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *yi += c * acc;
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn row_sum_norm(&self) -> f64 {
        (0..self.dim)
            .map(|i| {
                self.vals[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (i, j, v) in self.entries() {
            m[(i, j)] = v;
        }
        m
    }

    /// Largest `|A_ij - conj(A_ji)|` relative to the largest entry.
    pub fn hermiticity_defect(&self) -> f64 {
        let scale = self.vals.iter().map(|v| v.norm()).fold(0.0, f64::max);
        if scale == 0.0 {
            return 0.0;
        }
        self.entries()
            .map(|(i, j, v)| (v - self.get(j, i).conj()).norm())
            .fold(0.0, f64::max)
            / scale
    }

    /// `<x| self |x>`.
    pub fn expectation(&self, x: &[Complex64]) -> Complex64 {
        let mut y = vec![Complex64::new(0.0, 0.0); self.dim];
        self.apply_add(real(1.0), x, &mut y);
        x.iter().zip(&y).map(|(a, b)| a.conj() * b).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ladder_commutator_is_identity_below_cutoff() {
        let s = FockSpace::new(6).unwrap();
        let a = SparseOp::annihilation(&s);
        let ad = SparseOp::creation(&s);
        let comm = a.mul(&ad).add(&ad.mul(&a).scale(real(-1.0)));
        for i in 0..s.dim() {
            let (_, n) = s.label(i);
            let expected = if n == s.n_max() { -(n as f64) } else { 1.0 };
            assert!((comm.get(i, i) - real(expected)).norm() < 1e-14);
        }
        let n = SparseOp::number(&s);
        for i in 0..s.dim() {
            assert!((ad.mul(&a).get(i, i) - n.get(i, i)).norm() < 1e-14);
        }
    }

    #[test]
    fn pauli_algebra() {
        let s = FockSpace::new(2).unwrap();
        let sp = SparseOp::sigma_plus(&s);
        let sm = SparseOp::sigma_minus(&s);
        let sz = sp.mul(&sm).add(&sm.mul(&sp).scale(real(-1.0)));
        assert_eq!(sz, SparseOp::sigma_z(&s));
        assert_eq!(sp.mul(&sp).nnz(), 0);
    }

    #[test]
    fn quadratures_are_hermitian() {
        let s = FockSpace::new(5).unwrap();
        assert_eq!(SparseOp::position(&s).hermiticity_defect(), 0.0);
        assert_eq!(SparseOp::momentum(&s).hermiticity_defect(), 0.0);
        let sp = SparseOp::sigma_plus(&s);
        assert!(sp.hermiticity_defect() > 0.5);
    }

    #[test]
    fn dense_matches_sparse_application() {
        let s = FockSpace::new(3).unwrap();
        let op = SparseOp::momentum(&s).add(&SparseOp::sigma_plus(&s));
        let x: Vec<Complex64> = (0..s.dim()).map(|i| Complex64::new(i as f64, 1.0 - i as f64)).collect();
        let mut y = vec![Complex64::new(0.0, 0.0); s.dim()];
        op.apply_add(real(1.0), &x, &mut y);
        let dense = op.to_dense() * nalgebra::DVector::from_vec(x);
        for i in 0..s.dim() {
            assert!((dense[i] - y[i]).norm() < 1e-14);
        }
    }
}
