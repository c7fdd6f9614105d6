use std::fmt;
use std::ops::{Add, Index, IndexMut, Mul, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

pub const C0: Complex64 = Complex64::new(0.0, 0.0);
pub const C1: Complex64 = Complex64::new(1.0, 0.0);
pub const CI: Complex64 = Complex64::new(0.0, 1.0);

/// Largest operator dimension handled by the crate (two-qubit process space).
pub const MAX_DIM: usize = 16;

/// Tolerance used for Hermiticity, trace and positivity checks.
pub const TOL: f64 = 1e-12;

/// Dense square complex matrix stored row-major.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![C0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = C1;
        }
        m
    }

    pub fn from_vec(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || dim > MAX_DIM {
            return Err(Error::UnsupportedDimension(dim));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                actual: data.len(),
            });
        }
        Ok(Self { dim, data })
    }

    /// Builds a matrix from real entries, row-major.
    pub fn from_real(dim: usize, data: &[f64]) -> Result<Self> {
        Self::from_vec(dim, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let d: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&d)
    }

    /// `|v><v|` for a (not necessarily normalized) vector.
    pub fn outer(v: &[Complex64]) -> Self {
        let dim = v.len();
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m[(i, j)] = v[i] * v[j].conj();
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        let mut m = Self::zeros(self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                m[(j, i)] = self[(i, j)].conj();
            }
        }
        m
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self[(i, i)]).sum()
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn scale_real(&self, s: f64) -> Self {
        self.scale(Complex64::new(s, 0.0))
    }

    /// Applies `v -> M v`.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(v.len(), self.dim, "vector length mismatch");
        (0..self.dim)
            .map(|i| (0..self.dim).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    /// `M rho M^dagger`.
    pub fn conjugate(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        &(self * rho) * &self.adjoint()
    }

    /// Trace of the product `self * other` without forming it.
    pub fn trace_product(&self, other: &ComplexMatrix) -> Complex64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        let n = self.dim;
        let mut acc = C0;
        for i in 0..n {
            for k in 0..n {
                acc += self[(i, k)] * other[(k, i)];
            }
        }
        acc
    }

    pub fn max_abs_diff(&self, other: &ComplexMatrix) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &ComplexMatrix, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol
    }

    /// Largest deviation of `M^dagger M` from the identity.
    pub fn unitarity_defect(&self) -> f64 {
        (&self.adjoint() * self).max_abs_diff(&Self::identity(self.dim))
    }

    /// Operator (spectral) norm.
    pub fn operator_norm(&self) -> f64 {
        let gram = &self.adjoint() * self;
        gram.hermitian_eigenvalues()
            .last()
            .copied()
            .unwrap_or(0.0)
            .max(0.0)
            .sqrt()
    }

    /// Kronecker product; the first factor carries the most significant index.
    pub fn kron(&self, other: &ComplexMatrix) -> Result<ComplexMatrix> {
        let dim = self.dim * other.dim;
        if dim > MAX_DIM {
            return Err(Error::DimensionOverflow(dim));
        }
        let mut m = Self::zeros(dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self[(i, j)];
                for k in 0..other.dim {
                    for l in 0..other.dim {
                        m[(i * other.dim + k, j * other.dim + l)] = a * other[(k, l)];
                    }
                }
            }
        }
        Ok(m)
    }

    /// Eigenvalues of a Hermitian matrix in ascending order.
    ///
    /// Closed form for 2x2, dense Hermitian diagonalization otherwise. Only
    /// the Hermitian part of the input is used.
    pub fn hermitian_eigenvalues(&self) -> Vec<f64> {
        if self.dim == 2 {
            let a = self[(0, 0)].re;
            let d = self[(1, 1)].re;
            let b = 0.5 * (self[(0, 1)] + self[(1, 0)].conj());
            let mean = 0.5 * (a + d);
            let half = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
            return vec![mean - half, mean + half];
        }
        let mut values: Vec<f64> = self.to_nalgebra_hermitian().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }

    /// Eigen-decomposition of a Hermitian matrix: `(values, vectors)` with
    /// `vectors[i]` the eigenvector of `values[i]`, ascending.
    pub fn hermitian_eigen(&self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let eig = self.to_nalgebra_hermitian().symmetric_eigen();
        let mut pairs: Vec<(f64, Vec<Complex64>)> = (0..self.dim)
            .map(|i| {
                let v = eig.eigenvectors.column(i).iter().copied().collect();
                (eig.eigenvalues[i], v)
            })
            .collect();
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        pairs.into_iter().unzip()
    }

    fn to_nalgebra_hermitian(&self) -> DMatrix<Complex64> {
        let n = self.dim;
        DMatrix::from_fn(n, n, |i, j| 0.5 * (self[(i, j)] + self[(j, i)].conj()))
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut m = ComplexMatrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == C0 {
                    continue;
                }
                for j in 0..n {
                    m.data[i * n + j] += a * rhs[(k, j)];
                }
            }
        }
        m
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;
    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self[(i, j)];
                    format!("{:+.6}{:+.6}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Pauli matrices indexed 0..4 as I, X, Y, Z.
pub fn pauli(index: usize) -> ComplexMatrix {
    match index {
        0 => ComplexMatrix::identity(2),
        1 => ComplexMatrix::from_real(2, &[0.0, 1.0, 1.0, 0.0]).unwrap(),
        2 => ComplexMatrix::from_vec(2, vec![C0, -CI, CI, C0]).unwrap(),
        3 => ComplexMatrix::from_real_diag(&[1.0, -1.0]),
        _ => panic!("pauli index {index} out of range"),
    }
}

/// Partial trace of a two-qubit operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Keep {
    /// Keep the first (most significant, signal) qubit.
    First,
    /// Keep the second (meter) qubit.
    Second,
}

pub fn partial_trace(m: &ComplexMatrix, keep: Keep) -> Result<ComplexMatrix> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: m.dim(),
        });
    }
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            out[(i, j)] = match keep {
                Keep::First => (0..2).map(|k| m[(2 * i + k, 2 * j + k)]).sum(),
                Keep::Second => (0..2).map(|k| m[(2 * k + i, 2 * k + j)]).sum(),
            };
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kron_of_identities_is_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert!(i2.kron(&i2).unwrap().approx_eq(&ComplexMatrix::identity(4), 0.0));
    }

    #[test]
    fn kron_signal_is_most_significant() {
        let z = pauli(3);
        let zi = z.kron(&ComplexMatrix::identity(2)).unwrap();
        assert!(zi.approx_eq(&ComplexMatrix::from_real_diag(&[1.0, 1.0, -1.0, -1.0]), 0.0));
    }

    #[test]
    fn kron_overflow_is_rejected() {
        let m = ComplexMatrix::identity(16);
        assert_eq!(
            m.kron(&ComplexMatrix::identity(2)),
            Err(Error::DimensionOverflow(32))
        );
    }

    #[test]
    fn partial_trace_of_maximally_mixed() {
        let m = ComplexMatrix::identity(4).scale_real(0.25);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(partial_trace(&m, Keep::Second).unwrap().approx_eq(&half, 1e-15));
        assert!(partial_trace(&m, Keep::First).unwrap().approx_eq(&half, 1e-15));
    }

    #[test]
    fn partial_trace_of_bell_state() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let phi = [Complex64::new(s, 0.0), C0, C0, Complex64::new(s, 0.0)];
        let rho = ComplexMatrix::outer(&phi);
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(partial_trace(&rho, Keep::First).unwrap().approx_eq(&half, 1e-15));
    }

    #[test]
    fn partial_trace_picks_the_right_factor() {
        let a = ComplexMatrix::from_real(2, &[0.7, 0.1, 0.1, 0.3]).unwrap();
        let b = ComplexMatrix::from_vec(2, vec![
            Complex64::new(0.4, 0.0),
            Complex64::new(0.0, 0.2),
            Complex64::new(0.0, -0.2),
            Complex64::new(0.6, 0.0),
        ])
        .unwrap();
        let ab = a.kron(&b).unwrap();
        assert!(partial_trace(&ab, Keep::First).unwrap().approx_eq(&a, 1e-15));
        assert!(partial_trace(&ab, Keep::Second).unwrap().approx_eq(&b, 1e-15));
        assert!(partial_trace(&ComplexMatrix::identity(2), Keep::First).is_err());
    }

    #[test]
    fn eigenvalues_two_by_two_closed_form() {
        let x = pauli(1);
        let ev = x.hermitian_eigenvalues();
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn eigenvalues_four_by_four() {
        let m = ComplexMatrix::from_real_diag(&[0.1, -0.3, 0.7, 0.5]);
        let ev = m.hermitian_eigenvalues();
        let want = [-0.3, 0.1, 0.5, 0.7];
        for (a, b) in ev.iter().zip(want) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn from_vec_checks_length() {
        assert!(ComplexMatrix::from_vec(2, vec![C0; 3]).is_err());
        assert!(ComplexMatrix::from_vec(0, vec![]).is_err());
    }
}
