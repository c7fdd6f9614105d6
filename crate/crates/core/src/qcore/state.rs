use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::matrix::{ComplexMatrix, C0, C1, TOL};
use crate::error::{Error, Result};

/// Hermitian, unit-trace, positive semidefinite operator on one or two qubits.
#[derive(Clone, PartialEq)]
pub struct DensityMatrix {
    matrix: ComplexMatrix,
}

impl std::fmt::Debug for DensityMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "DensityMatrix {:?}", self.matrix)
    }
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity at 1e-12.
    pub fn new(matrix: ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        if !matrix.as_slice().iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::InvalidDensity("non-finite entry".into()));
        }
        if !matrix.is_hermitian(TOL) {
            return Err(Error::InvalidDensity("not Hermitian".into()));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > TOL || tr.im.abs() > TOL {
            return Err(Error::InvalidDensity(format!("trace {tr} is not 1")));
        }
        let min_ev = matrix.hermitian_eigenvalues()[0];
        if min_ev < -TOL {
            return Err(Error::InvalidDensity(format!(
                "negative eigenvalue {min_ev:e}"
            )));
        }
        Ok(Self { matrix })
    }

    /// Projects a nearly valid operator onto the state space: takes the
    /// Hermitian part, zeroes eigenvalues whose magnitude is below 1e-12
    /// and renormalizes the trace. Eigenvalues more negative than that are
    /// still rejected.
    pub fn repaired(matrix: &ComplexMatrix) -> Result<Self> {
        let dim = matrix.dim();
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        let herm = (matrix + &matrix.adjoint()).scale_real(0.5);
        let (values, vectors) = herm.hermitian_eigen();
        let mut out = ComplexMatrix::zeros(dim);
        let mut total = 0.0;
        for (value, vector) in values.iter().zip(&vectors) {
            if *value < -TOL {
                return Err(Error::InvalidDensity(format!(
                    "negative eigenvalue {value:e}"
                )));
            }
            if value.abs() <= TOL {
                continue;
            }
            total += value;
            out = &out + &ComplexMatrix::outer(vector).scale_real(*value);
        }
        if total <= 0.0 {
            return Err(Error::InvalidDensity("zero trace".into()));
        }
        Self::new(out.scale_real(1.0 / total))
    }

    /// Pure state from a (not necessarily normalized) state vector.
    pub fn pure(psi: &[Complex64]) -> Result<Self> {
        let norm: f64 = psi.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::InvalidDensity("zero state vector".into()));
        }
        let normalized: Vec<Complex64> = psi.iter().map(|z| z / norm).collect();
        Self::new(ComplexMatrix::outer(&normalized))
    }

    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        if dim != 2 && dim != 4 {
            return Err(Error::UnsupportedDimension(dim));
        }
        Ok(Self {
            matrix: ComplexMatrix::identity(dim).scale_real(1.0 / dim as f64),
        })
    }

    /// `|0><0|`, the horizontal polarization.
    pub fn ket0() -> Self {
        Self::pure(&[C1, C0]).unwrap()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }

    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn purity(&self) -> f64 {
        purity(self)
    }

    /// Born probability `Tr(P rho)`.
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        op.trace_product(&self.matrix).re
    }

    /// `U rho U^dagger` for a unitary `U`.
    pub fn evolve(&self, u: &ComplexMatrix) -> Result<Self> {
        Self::repaired(&u.conjugate(&self.matrix))
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        Self::new(self.matrix.kron(&other.matrix)?)
    }

    /// Convex mixture `w * self + (1 - w) * other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&w) {
            return Err(Error::InvalidParameter(format!("mixing weight {w}")));
        }
        Self::new(&self.matrix.scale_real(w) + &other.matrix.scale_real(1.0 - w))
    }
}

/// `Tr(rho^2)`.
pub fn purity(rho: &DensityMatrix) -> f64 {
    rho.matrix.trace_product(&rho.matrix).re
}

/// Sampling family for [`random_density`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PurityClass {
    /// Haar-random pure state.
    Pure,
    /// Haar-random pure state blended with `I/dim`, weight uniform on [0, 1].
    Mixed,
    /// Full-rank mixture of `dim` Haar-random pure states with weights
    /// uniform on the simplex.
    MaximallyMixedBlend,
}

/// Haar-random normalized state vector.
pub fn haar_vector<R: Rng>(dim: usize, rng: &mut R) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..dim)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    for z in &mut v {
        *z /= norm;
    }
    v
}

/// Deterministic random state drawn with a generator seeded by `seed`.
pub fn random_density(dim: usize, class: PurityClass, seed: u64) -> Result<DensityMatrix> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_density_with(dim, class, &mut rng)
}

pub fn random_density_with<R: Rng>(
    dim: usize,
    class: PurityClass,
    rng: &mut R,
) -> Result<DensityMatrix> {
    if dim != 2 && dim != 4 {
        return Err(Error::UnsupportedDimension(dim));
    }
    let m = match class {
        PurityClass::Pure => ComplexMatrix::outer(&haar_vector(dim, rng)),
        PurityClass::Mixed => {
            let w: f64 = rng.random();
            let pure = ComplexMatrix::outer(&haar_vector(dim, rng));
            &pure.scale_real(w) + &ComplexMatrix::identity(dim).scale_real((1.0 - w) / dim as f64)
        }
        PurityClass::MaximallyMixedBlend => {
            // exponential spacings give a uniform point on the simplex
            let weights: Vec<f64> = (0..dim).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let total: f64 = weights.iter().sum();
            let mut acc = ComplexMatrix::zeros(dim);
            for w in weights {
                let pure = ComplexMatrix::outer(&haar_vector(dim, rng));
                acc = &acc + &pure.scale_real(w / total);
            }
            acc
        }
    };
    // float rounding can leave the trace off by a few ulps
    let tr = m.trace().re;
    DensityMatrix::repaired(&m.scale_real(1.0 / tr))
}

/// Named single-qubit polarization states used in the experiments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PolarizationState {
    H,
    V,
    D,
    A,
    L,
    R,
    /// `w |H><H| + (1 - w) |V><V|`.
    Mixed(f64),
    MaximallyMixed,
}

impl PolarizationState {
    /// The eight input states of the state-independence experiment.
    pub const STANDARD_SET: [PolarizationState; 8] = [
        PolarizationState::H,
        PolarizationState::V,
        PolarizationState::D,
        PolarizationState::A,
        PolarizationState::L,
        PolarizationState::R,
        PolarizationState::Mixed(0.84),
        PolarizationState::MaximallyMixed,
    ];

    pub fn density(&self) -> Result<DensityMatrix> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let re = |x: f64| Complex64::new(x, 0.0);
        let im = |x: f64| Complex64::new(0.0, x);
        match *self {
            PolarizationState::H => DensityMatrix::pure(&[C1, C0]),
            PolarizationState::V => DensityMatrix::pure(&[C0, C1]),
            PolarizationState::D => DensityMatrix::pure(&[re(s), re(s)]),
            PolarizationState::A => DensityMatrix::pure(&[re(s), re(-s)]),
            PolarizationState::L => DensityMatrix::pure(&[re(s), im(s)]),
            PolarizationState::R => DensityMatrix::pure(&[re(s), im(-s)]),
            PolarizationState::Mixed(w) => {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidParameter(format!("mixing weight {w}")));
                }
                DensityMatrix::new(ComplexMatrix::from_real_diag(&[w, 1.0 - w]))
            }
            PolarizationState::MaximallyMixed => DensityMatrix::maximally_mixed(2),
        }
    }

    pub fn name(&self) -> String {
        match self {
            PolarizationState::H => "H".into(),
            PolarizationState::V => "V".into(),
            PolarizationState::D => "D".into(),
            PolarizationState::A => "A".into(),
            PolarizationState::L => "L".into(),
            PolarizationState::R => "R".into(),
            PolarizationState::Mixed(w) => format!("mixed:{w}"),
            PolarizationState::MaximallyMixed => "maximally-mixed".into(),
        }
    }

    pub fn parse(name: &str) -> Option<Self> {
        let name = name.trim();
        Some(match name {
            "H" => PolarizationState::H,
            "V" => PolarizationState::V,
            "D" => PolarizationState::D,
            "A" => PolarizationState::A,
            "L" => PolarizationState::L,
            "R" => PolarizationState::R,
            "maximally-mixed" => PolarizationState::MaximallyMixed,
            _ => {
                let w: f64 = name.strip_prefix("mixed:")?.trim().parse().ok()?;
                if !(0.0..=1.0).contains(&w) {
                    return None;
                }
                PolarizationState::Mixed(w)
            }
        })
    }
}
