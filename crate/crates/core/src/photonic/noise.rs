use crate::error::{Error, Result};
use crate::seqmeas::CorrelationTable;

/// Imperfections of the measurement apparatus.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    /// Two-point correlation visibility.
    pub visibility: f64,
    /// White-noise weight mixed into the gate process.
    pub depolarization: f64,
}

impl NoiseModel {
    pub fn new(visibility: f64, depolarization: f64) -> Result<Self> {
        check_unit("visibility", visibility)?;
        check_unit("depolarization", depolarization)?;
        Ok(Self {
            visibility,
            depolarization,
        })
    }

    pub fn ideal() -> Self {
        Self {
            visibility: 1.0,
            depolarization: 0.0,
        }
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::ideal()
    }
}

fn check_unit(name: &str, x: f64) -> Result<()> {
    if (0.0..=1.0).contains(&x) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("{name} {x} is outside [0, 1]")))
    }
}

/// Scales every correlator by the visibility. At the distribution level this
/// is the white-noise mixture `v P + (1 - v) / 4`.
pub fn apply_visibility(c: &CorrelationTable, v: f64) -> Result<CorrelationTable> {
    check_unit("visibility", v)?;
    Ok(CorrelationTable {
        c: c.c.map(|row| row.map(|x| v * x)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::{chsh_evaluate, preset_chsh_scheme};
    use crate::qcore::DensityMatrix;

    fn ideal_table() -> CorrelationTable {
        chsh_evaluate(&DensityMatrix::ket0(), &preset_chsh_scheme()).correlations
    }

    #[test]
    fn visibility_scaling() {
        let t = ideal_table();
        let full = apply_visibility(&t, 1.0).unwrap();
        assert_eq!(full, t);
        let s = apply_visibility(&t, 0.91).unwrap().chsh_value();
        assert!((s - 0.91 * 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        assert!((s - 2.5739).abs() < 1e-4);
        let none = apply_visibility(&t, 0.0).unwrap();
        assert_eq!(none.chsh_value(), 0.0);
        assert!(apply_visibility(&t, 1.5).is_err());
    }

    #[test]
    fn noise_model_validation() {
        assert!(NoiseModel::new(0.91, 0.05).is_ok());
        assert!(NoiseModel::new(-0.1, 0.0).is_err());
        assert!(NoiseModel::new(1.0, 2.0).is_err());
    }
}
