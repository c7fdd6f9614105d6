use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{pauli, ComplexMatrix, C0};

const CP_TOL: f64 = 1e-10;

/// The 16 two-qubit Pauli products, index `4 i + j` for `P_i (x) P_j` with
/// `P = (I, X, Y, Z)` and the signal qubit first.
pub fn pauli_basis() -> &'static [ComplexMatrix; 16] {
    static BASIS: OnceLock<[ComplexMatrix; 16]> = OnceLock::new();
    BASIS.get_or_init(|| std::array::from_fn(|m| pauli(m / 4).kron(&pauli(m % 4)).unwrap()))
}

/// Label such as `"ZI"` for a basis index.
pub fn pauli_label(m: usize) -> String {
    const NAMES: [char; 4] = ['I', 'X', 'Y', 'Z'];
    format!("{}{}", NAMES[m / 4], NAMES[m % 4])
}

/// Two-qubit process matrix in the Pauli product basis, trace 1.
#[derive(Debug, Clone, PartialEq)]
pub struct ProcessMatrix {
    chi: ComplexMatrix,
}

impl ProcessMatrix {
    /// Checks Hermiticity, unit trace and complete positivity.
    pub fn new(chi: ComplexMatrix) -> Result<Self> {
        if chi.dim() != 16 {
            return Err(Error::DimensionMismatch {
                expected: 16,
                actual: chi.dim(),
            });
        }
        if !chi.is_hermitian(1e-12) {
            return Err(Error::InvalidProcess("chi is not Hermitian".into()));
        }
        let tr = chi.trace();
        if (tr.re - 1.0).abs() > 1e-12 || tr.im.abs() > 1e-12 {
            return Err(Error::InvalidProcess(format!("trace {tr} is not 1")));
        }
        let min_ev = chi.hermitian_eigenvalues()[0];
        if min_ev < -CP_TOL {
            return Err(Error::NotCompletelyPositive(min_ev));
        }
        Ok(Self { chi })
    }

    /// Fully depolarizing process, `chi = I / 16`.
    pub fn white_noise() -> Self {
        Self {
            chi: ComplexMatrix::identity(16).scale_real(1.0 / 16.0),
        }
    }

    /// `(1 - lambda) chi + lambda I / 16`.
    pub fn depolarized(&self, lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "depolarization {lambda} is outside [0, 1]"
            )));
        }
        Self::new(&self.chi.scale_real(1.0 - lambda) + &Self::white_noise().chi.scale_real(lambda))
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.chi
    }

    /// `E(rho) = sum_mn chi_mn P_m rho P_n`, renormalized to unit trace when
    /// the process is not exactly trace preserving.
    pub fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        let basis = pauli_basis();
        let mut out = ComplexMatrix::zeros(4);
        for (m, pm) in basis.iter().enumerate() {
            let mut right = ComplexMatrix::zeros(4);
            for (n, pn) in basis.iter().enumerate() {
                let c = self.chi[(m, n)];
                if c != C0 {
                    right = &right + &pn.scale(c);
                }
            }
            if right.as_slice().iter().all(|z| *z == C0) {
                continue;
            }
            out = &out + &(&(pm * rho) * &right);
        }
        let tr_in = rho.trace().re;
        let tr_out = out.trace().re;
        if tr_out > 0.0 && (tr_out - tr_in).abs() > 1e-14 {
            out = out.scale_real(tr_in / tr_out);
        }
        out
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        self.chi.hermitian_eigenvalues()
    }
}

/// Pauli expansion coefficients `a_m = Tr(P_m u) / 4`.
pub fn pauli_coefficients(u: &ComplexMatrix) -> Vec<Complex64> {
    pauli_basis()
        .iter()
        .map(|p| p.trace_product(u) / 4.0)
        .collect()
}

/// Rank-1 process matrix of a unitary.
pub fn chi_from_unitary(u: &ComplexMatrix) -> Result<ProcessMatrix> {
    if u.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            actual: u.dim(),
        });
    }
    let defect = u.unitarity_defect();
    if defect > 1e-10 {
        return Err(Error::NotUnitary(defect));
    }
    let a = pauli_coefficients(u);
    let norm: f64 = a.iter().map(|z| z.norm_sqr()).sum();
    let mut chi = ComplexMatrix::zeros(16);
    for m in 0..16 {
        for n in 0..16 {
            chi[(m, n)] = a[m] * a[n].conj() / norm;
        }
    }
    ProcessMatrix::new(chi)
}

/// `Tr(chi^2)`.
pub fn process_purity(chi: &ProcessMatrix) -> f64 {
    chi.chi.trace_product(&chi.chi).re
}

/// `Tr(chi chi_ideal)` against a rank-1 (unitary) target.
pub fn process_fidelity(chi: &ProcessMatrix, chi_ideal: &ProcessMatrix) -> Result<f64> {
    let ev = chi_ideal.eigenvalues();
    let second = ev[ev.len() - 2];
    if second > CP_TOL {
        return Err(Error::GeneralizedFidelityNotSupported(second));
    }
    Ok(chi.chi.trace_product(&chi_ideal.chi).re)
}

/// Depolarization weight giving the stated fidelity with a rank-1 target:
/// `F = (1 - lambda) + lambda / 16`.
pub fn depolarization_for_fidelity(fidelity: f64) -> Result<f64> {
    if !(1.0 / 16.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidParameter(format!(
            "fidelity {fidelity} is outside [1/16, 1]"
        )));
    }
    Ok((1.0 - fidelity) / (1.0 - 1.0 / 16.0))
}
