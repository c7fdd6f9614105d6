use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, DensityMatrix, C0, CI};

/// Polarization basis label; H is |0> and V is |1>.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Polarization {
    H,
    V,
}

impl Polarization {
    fn index(self) -> usize {
        match self {
            Polarization::H => 0,
            Polarization::V => 1,
        }
    }
}

/// Controlled-Z in the basis {HH, HV, VH, VV}, signal first.
pub fn cz_unitary() -> ComplexMatrix {
    ComplexMatrix::from_real_diag(&[1.0, 1.0, 1.0, -1.0])
}

/// Partially polarizing beamsplitter with two photons entering opposite
/// input ports and post-selection on one photon per output arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PpbsConfig {
    /// Intensity transmittivity of the polarization that interferes.
    pub eta_interfering: f64,
    /// Intensity transmittivity of the other polarization.
    pub eta_pass: f64,
    /// Balance the pass polarization with an amplitude filter of
    /// `sqrt(eta_interfering)` in each output arm.
    pub compensation: bool,
    pub interfering: Polarization,
}

impl PpbsConfig {
    /// `eta = 1/3` for V, full transmission for H, with balancing filters.
    pub fn canonical() -> Self {
        Self {
            eta_interfering: 1.0 / 3.0,
            eta_pass: 1.0,
            compensation: true,
            interfering: Polarization::V,
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, eta) in [("eta_interfering", self.eta_interfering), ("eta_pass", self.eta_pass)] {
            if !(0.0..=1.0).contains(&eta) {
                return Err(Error::InvalidParameter(format!("{name} = {eta} is outside [0, 1]")));
            }
        }
        Ok(())
    }

    fn eta(&self, p: usize) -> f64 {
        if p == self.interfering.index() {
            self.eta_interfering
        } else {
            self.eta_pass
        }
    }
}

impl Default for PpbsConfig {
    fn default() -> Self {
        Self::canonical()
    }
}

/// Non-unitary two-photon operator conditioned on a coincidence detection.
#[derive(Debug, Clone, PartialEq)]
pub struct PostselectedGate {
    pub operator: ComplexMatrix,
    /// Set when the interfering polarization transmits more than the pass
    /// polarization.
    pub unbalanced: bool,
}

impl PostselectedGate {
    /// Probability of the heralding coincidence, `Tr(K rho K^dagger)`.
    pub fn success_probability(&self, rho: &DensityMatrix) -> f64 {
        self.operator.conjugate(rho.matrix()).trace().re
    }
}

/// Coincidence operator of a PPBS.
///
/// Transmission amplitude is `sqrt(eta)`, reflection amplitude `i sqrt(1 - eta)`.
/// A coincidence happens when both photons are transmitted or both
/// reflected; the double reflection swaps the arms, so it maps
/// `|p1 p2>` to `|p2 p1>`.
pub fn ppbs_gate(config: &PpbsConfig) -> Result<PostselectedGate> {
    config.validate()?;
    let t = |p: usize| Complex64::new(config.eta(p).sqrt(), 0.0);
    let r = |p: usize| CI * (1.0 - config.eta(p)).sqrt();
    let attenuation = |q: usize| {
        if config.compensation && q != config.interfering.index() {
            config.eta_interfering.sqrt()
        } else {
            1.0
        }
    };

    let mut k = ComplexMatrix::zeros(4);
    for p1 in 0..2 {
        for p2 in 0..2 {
            let col = 2 * p1 + p2;
            k[(col, col)] += t(p1) * t(p2);
            k[(2 * p2 + p1, col)] += r(p1) * r(p2);
        }
    }
    for q1 in 0..2 {
        for q2 in 0..2 {
            let row = 2 * q1 + q2;
            let a = attenuation(q1) * attenuation(q2);
            for col in 0..4 {
                if k[(row, col)] != C0 {
                    k[(row, col)] *= a;
                }
            }
        }
    }
    Ok(PostselectedGate {
        operator: k,
        unbalanced: config.eta_interfering > config.eta_pass,
    })
}
