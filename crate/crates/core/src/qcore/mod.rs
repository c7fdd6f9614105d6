//! Small dense complex linear algebra and qubit state/observable primitives.
//!
//! Two-qubit operators use the signal qubit as the most significant tensor
//! index, so `|s m>` sits at row `2 * s + m`.

mod matrix;
mod observable;
mod state;

pub use matrix::{partial_trace, pauli, ComplexMatrix, Keep, C0, C1, CI, MAX_DIM, TOL};
pub use observable::{dot3, eigenvalue, norm3, observable_matrix, projector, Observable, Outcome};
pub use state::{
    haar_vector, purity, random_density, random_density_with, DensityMatrix, PolarizationState,
    PurityClass,
};

use crate::error::Result;

/// Kronecker product `a (x) b`.
pub fn tensor(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.kron(b)
}
