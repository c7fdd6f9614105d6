use num_complex::Complex64;

use super::matrix::{pauli, ComplexMatrix, C0, C1};
use crate::error::{Error, Result};

/// Dichotomic outcome label. Label 1 is the +1 eigenvalue, label 0 the -1
/// eigenvalue.
pub type Outcome = usize;

/// Eigenvalue assigned to an outcome label.
pub fn eigenvalue(outcome: Outcome) -> f64 {
    match outcome {
        0 => -1.0,
        1 => 1.0,
        _ => panic!("outcome label {outcome} is not a bit"),
    }
}

/// A dichotomic qubit observable `n . sigma` with eigenvalues +1 and -1.
#[derive(Debug, Clone, PartialEq)]
pub struct Observable {
    bloch: [f64; 3],
    label: String,
}

impl Observable {
    const NORM_TOL: f64 = 1e-12;

    pub fn new(label: impl Into<String>, bloch: [f64; 3]) -> Result<Self> {
        let norm = norm3(bloch);
        if !norm.is_finite() || (norm - 1.0).abs() > Self::NORM_TOL {
            return Err(Error::InvalidObservable { norm });
        }
        Ok(Self {
            bloch,
            label: label.into(),
        })
    }

    /// Normalizes an arbitrary non-zero direction.
    pub fn along(label: impl Into<String>, direction: [f64; 3]) -> Result<Self> {
        let norm = norm3(direction);
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidObservable { norm });
        }
        Self::new(label, direction.map(|c| c / norm))
    }

    /// Observable in the x-z plane at polar angle `theta` from +z.
    pub fn in_xz_plane(label: impl Into<String>, theta: f64) -> Self {
        Self {
            bloch: [theta.sin(), 0.0, theta.cos()],
            label: label.into(),
        }
    }

    pub fn x() -> Self {
        Self::new("X", [1.0, 0.0, 0.0]).unwrap()
    }

    pub fn z() -> Self {
        Self::new("Z", [0.0, 0.0, 1.0]).unwrap()
    }

    pub fn bloch(&self) -> [f64; 3] {
        self.bloch
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn negated(&self) -> Self {
        Self {
            bloch: self.bloch.map(|c| -c),
            label: format!("-{}", self.label),
        }
    }

    pub fn matrix(&self) -> ComplexMatrix {
        observable_matrix(self)
    }

    pub fn projector(&self, outcome: Outcome) -> ComplexMatrix {
        projector(self, outcome)
    }

    /// Normalized eigenvector for the given outcome label.
    pub fn eigenvector(&self, outcome: Outcome) -> [Complex64; 2] {
        let [x, y, z] = self.bloch;
        let theta = z.clamp(-1.0, 1.0).acos();
        let phase = Complex64::from_polar(1.0, y.atan2(x));
        let (c, s) = ((theta / 2.0).cos(), (theta / 2.0).sin());
        match outcome {
            1 => [Complex64::new(c, 0.0), phase * s],
            0 => [Complex64::new(s, 0.0), -phase * c],
            _ => panic!("outcome label {outcome} is not a bit"),
        }
    }

    /// Unitary `U` with `U (n . sigma) U^dagger = Z`: maps the +1 eigenvector
    /// to |0> and the -1 eigenvector to |1>.
    pub fn rotation_to_z(&self) -> ComplexMatrix {
        let plus = self.eigenvector(1);
        let minus = self.eigenvector(0);
        ComplexMatrix::from_vec(
            2,
            vec![
                plus[0].conj(),
                plus[1].conj(),
                minus[0].conj(),
                minus[1].conj(),
            ],
        )
        .unwrap()
    }

    /// Applies a qubit unitary to the observable: `U (n . sigma) U^dagger`.
    pub fn rotated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        let m = u.conjugate(&self.matrix());
        let comp = |i: usize| 0.5 * m.trace_product(&pauli(i)).re;
        Self::along(self.label.clone(), [comp(1), comp(2), comp(3)])
    }
}

/// `n_x X + n_y Y + n_z Z`.
pub fn observable_matrix(obs: &Observable) -> ComplexMatrix {
    let [x, y, z] = obs.bloch;
    ComplexMatrix::from_vec(
        2,
        vec![
            Complex64::new(z, 0.0),
            Complex64::new(x, -y),
            Complex64::new(x, y),
            Complex64::new(-z, 0.0),
        ],
    )
    .unwrap()
}

/// `(I + v(outcome) n . sigma) / 2`.
pub fn projector(obs: &Observable, outcome: Outcome) -> ComplexMatrix {
    let v = eigenvalue(outcome);
    let n = observable_matrix(obs);
    let mut p = ComplexMatrix::identity(2);
    for i in 0..2 {
        for j in 0..2 {
            p[(i, j)] = 0.5 * (if i == j { C1 } else { C0 } + n[(i, j)] * v);
        }
    }
    p
}

pub fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

pub fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}
