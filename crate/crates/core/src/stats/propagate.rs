use crate::error::{Error, Result};
use crate::inequalities::{HardyProbabilities, CHSH_CLASSICAL_BOUND};

/// A measured value with its standard error, compared against a bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimateWithError {
    pub value: f64,
    pub sigma: f64,
    pub bound: f64,
    /// `(value - bound) / sigma`; infinite when `sigma` is zero and the value
    /// differs from the bound, zero when both coincide.
    pub n_sigma: f64,
}

impl EstimateWithError {
    pub fn new(value: f64, sigma: f64, bound: f64) -> Self {
        let excess = value - bound;
        let n_sigma = if sigma > 0.0 {
            excess / sigma
        } else if excess == 0.0 {
            0.0
        } else {
            excess.signum() * f64::INFINITY
        };
        Self {
            value,
            sigma,
            bound,
            n_sigma,
        }
    }

    /// Same estimate compared against a different bound.
    pub fn against(&self, bound: f64) -> Self {
        Self::new(self.value, self.sigma, bound)
    }

    pub fn violates(&self) -> bool {
        self.value > self.bound
    }
}

/// Hardy value with independent first-order error propagation,
/// `sigma_H = sqrt(sum sigma_i^2)`.
pub fn propagate_hardy(
    probs: &HardyProbabilities,
    sigmas: &HardyProbabilities,
    bound: f64,
) -> Result<EstimateWithError> {
    let s = [sigmas.p1111, sigmas.p1100, sigmas.p1010, sigmas.p0101];
    if s.iter().any(|x| !(x.is_finite() && *x >= 0.0)) {
        return Err(Error::InvalidParameter(format!("negative sigma in {sigmas:?}")));
    }
    let sigma = s.iter().map(|x| x * x).sum::<f64>().sqrt();
    Ok(EstimateWithError::new(probs.hardy_value(), sigma, bound))
}

/// CHSH value against the classical bound 2.
pub fn propagate_chsh(value: f64, sigma: f64) -> Result<EstimateWithError> {
    if sigma.is_nan() || sigma <= 0.0 {
        return Err(Error::InvalidParameter(format!("sigma {sigma} must be positive")));
    }
    Ok(EstimateWithError::new(value, sigma, CHSH_CLASSICAL_BOUND))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn measured() -> (HardyProbabilities, HardyProbabilities) {
        (
            HardyProbabilities {
                p1111: 0.2372,
                p1100: 0.0181,
                p1010: 0.0190,
                p0101: 0.0070,
            },
            HardyProbabilities {
                p1111: 0.0040,
                p1100: 0.0008,
                p1010: 0.0013,
                p0101: 0.0005,
            },
        )
    }

    #[test]
    fn measured_hardy_significance() {
        let (p, s) = measured();
        let e = propagate_hardy(&p, &s, 0.0).unwrap();
        assert!((e.value - 0.1931).abs() < 1e-12);
        // sqrt(16 + 0.64 + 1.69 + 0.25) * 1e-3
        assert!((e.sigma - 18.58f64.sqrt() * 1e-3).abs() < 1e-15);
        assert!((e.n_sigma - 44.8).abs() < 0.1, "{}", e.n_sigma);
        let spatial = e.against(0.0902);
        assert!((spatial.n_sigma - 23.87).abs() < 0.05, "{}", spatial.n_sigma);
    }

    #[test]
    fn single_term_propagation() {
        let p = HardyProbabilities {
            p1111: 0.25,
            ..Default::default()
        };
        let s = HardyProbabilities {
            p1111: 0.01,
            ..Default::default()
        };
        let e = propagate_hardy(&p, &s, 0.0).unwrap();
        assert_eq!((e.value, e.sigma), (0.25, 0.01));
        assert!((e.n_sigma - 25.0).abs() < 1e-12);
    }

    #[test]
    fn chsh_significance() {
        assert!((propagate_chsh(2.58, 0.03).unwrap().n_sigma - 19.333).abs() < 1e-3);
        assert_eq!(propagate_chsh(2.0, 0.1).unwrap().n_sigma, 0.0);
        let ideal = propagate_chsh(2.0 * std::f64::consts::SQRT_2, 0.03).unwrap();
        assert!((ideal.n_sigma - 27.614).abs() < 1e-3);
        assert!(propagate_chsh(2.5, 0.0).is_err());
        assert!(propagate_chsh(2.5, -1.0).is_err());
    }

    #[test]
    fn zero_sigma_conventions() {
        assert_eq!(EstimateWithError::new(1.0, 0.0, 1.0).n_sigma, 0.0);
        assert_eq!(EstimateWithError::new(1.5, 0.0, 1.0).n_sigma, f64::INFINITY);
    }
}
