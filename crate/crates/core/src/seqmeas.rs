//! Joint outcome statistics for two measurements, either one after the other
//! on a single qubit or on the two halves of a two-qubit state, and the
//! correlators built from them.

use crate::error::{Error, Result};
use crate::qcore::{dot3, eigenvalue, ComplexMatrix, DensityMatrix, Observable, Outcome};

/// Setting choice `(k, l)`: `k` selects the first (Alice) observable, `l` the
/// second (Bob) observable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SettingPair {
    pub k: usize,
    pub l: usize,
}

impl SettingPair {
    pub const ALL: [SettingPair; 4] = [
        SettingPair { k: 0, l: 0 },
        SettingPair { k: 0, l: 1 },
        SettingPair { k: 1, l: 0 },
        SettingPair { k: 1, l: 1 },
    ];

    pub fn new(k: usize, l: usize) -> Result<Self> {
        if k > 1 || l > 1 {
            return Err(Error::InvalidParameter(format!("setting pair ({k},{l})")));
        }
        Ok(Self { k, l })
    }
}

/// The four observables `A0, A1, B0, B1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasurementScheme {
    pub a0: Observable,
    pub a1: Observable,
    pub b0: Observable,
    pub b1: Observable,
}

impl MeasurementScheme {
    pub fn new(a0: Observable, a1: Observable, b0: Observable, b1: Observable) -> Self {
        Self { a0, a1, b0, b1 }
    }

    pub fn alice(&self, k: usize) -> &Observable {
        if k == 0 {
            &self.a0
        } else {
            &self.a1
        }
    }

    pub fn bob(&self, l: usize) -> &Observable {
        if l == 0 {
            &self.b0
        } else {
            &self.b1
        }
    }

    /// Applies the same qubit unitary to all four observables.
    pub fn rotated_by(&self, u: &ComplexMatrix) -> Result<Self> {
        Ok(Self {
            a0: self.a0.rotated_by(u)?,
            a1: self.a1.rotated_by(u)?,
            b0: self.b0.rotated_by(u)?,
            b1: self.b1.rotated_by(u)?,
        })
    }
}

/// `P(r, s | k, l)` for one setting pair, indexed `p[r][s]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JointDistribution {
    pub p: [[f64; 2]; 2],
    pub setting: SettingPair,
}

impl JointDistribution {
    pub fn new(p: [[f64; 2]; 2], setting: SettingPair) -> Result<Self> {
        let sum: f64 = p.iter().flatten().sum();
        let in_range = p.iter().flatten().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x));
        if !in_range || (sum - 1.0).abs() > 1e-12 {
            return Err(Error::InvalidParameter(format!(
                "joint distribution {p:?} is not normalized"
            )));
        }
        Ok(Self { p, setting })
    }

    pub fn prob(&self, r: Outcome, s: Outcome) -> f64 {
        self.p[r][s]
    }

    /// Marginal of the first measurement.
    pub fn first_marginal(&self, r: Outcome) -> f64 {
        self.p[r][0] + self.p[r][1]
    }

    pub fn second_marginal(&self, s: Outcome) -> f64 {
        self.p[0][s] + self.p[1][s]
    }

    /// White-noise mixing `v P + (1 - v) / 4`.
    pub fn with_visibility(&self, v: f64) -> Self {
        let mut p = self.p;
        for cell in p.iter_mut().flatten() {
            *cell = v * *cell + (1.0 - v) / 4.0;
        }
        Self {
            p,
            setting: self.setting,
        }
    }
}

/// `C[k][l]` for all four setting pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationTable {
    pub c: [[f64; 2]; 2],
}

impl CorrelationTable {
    pub fn get(&self, setting: SettingPair) -> f64 {
        self.c[setting.k][setting.l]
    }

    pub fn from_fn(mut f: impl FnMut(SettingPair) -> f64) -> Self {
        let mut c = [[0.0; 2]; 2];
        for sp in SettingPair::ALL {
            c[sp.k][sp.l] = f(sp);
        }
        Self { c }
    }

    /// `|C00 + C10 + C01 - C11|`.
    pub fn chsh_value(&self) -> f64 {
        let c = &self.c;
        (c[0][0] + c[1][0] + c[0][1] - c[1][1]).abs()
    }
}

fn clamp_prob(p: f64) -> f64 {
    if p.abs() <= 1e-15 {
        0.0
    } else {
        p
    }
}

/// Sequential projective measurements of `a` then `b` on one qubit with
/// Luders state update after the first:
/// `P(r, s) = Tr(Pi_s^b Pi_r^a rho Pi_r^a)`.
pub fn luders_joint(rho: &DensityMatrix, a: &Observable, b: &Observable) -> JointDistribution {
    assert_eq!(rho.dim(), 2, "luders_joint needs a single-qubit state");
    let mut p = [[0.0; 2]; 2];
    for (r, row) in p.iter_mut().enumerate() {
        let pa = a.projector(r);
        let updated = pa.conjugate(rho.matrix());
        for (s, cell) in row.iter_mut().enumerate() {
            *cell = clamp_prob(b.projector(s).trace_product(&updated).re);
        }
    }
    JointDistribution {
        p,
        setting: SettingPair { k: 0, l: 0 },
    }
}

/// Local projective measurements on the two halves of a two-qubit state:
/// `P(r, s) = Tr(rho (Pi_r^a (x) Pi_s^b))`.
pub fn spatial_joint(rho2: &DensityMatrix, a: &Observable, b: &Observable) -> JointDistribution {
    assert_eq!(rho2.dim(), 4, "spatial_joint needs a two-qubit state");
    let mut p = [[0.0; 2]; 2];
    for (r, row) in p.iter_mut().enumerate() {
        for (s, cell) in row.iter_mut().enumerate() {
            let joint = a.projector(r).kron(&b.projector(s)).expect("4x4 fits");
            *cell = clamp_prob(rho2.expectation(&joint));
        }
    }
    JointDistribution {
        p,
        setting: SettingPair { k: 0, l: 0 },
    }
}

/// `sum_{r,s} (-1)^(r+s) P(r, s)`.
pub fn correlator_from_distribution(j: &JointDistribution) -> f64 {
    let mut acc = 0.0;
    for r in 0..2 {
        for s in 0..2 {
            acc += eigenvalue(r) * eigenvalue(s) * j.p[r][s];
        }
    }
    acc
}

/// `Tr(rho {A, B} / 2)`.
pub fn correlator_anticommutator(rho: &DensityMatrix, a: &Observable, b: &Observable) -> f64 {
    let (ma, mb) = (a.matrix(), b.matrix());
    let anti = (&(&ma * &mb) + &(&mb * &ma)).scale_real(0.5);
    rho.expectation(&anti)
}

/// Dot product of the two Bloch directions.
pub fn bloch_correlator(a: &Observable, b: &Observable) -> f64 {
    dot3(a.bloch(), b.bloch())
}

/// Temporal joint distribution for one setting pair of a scheme.
pub fn temporal_joint_for(
    rho: &DensityMatrix,
    scheme: &MeasurementScheme,
    setting: SettingPair,
) -> JointDistribution {
    let mut j = luders_joint(rho, scheme.alice(setting.k), scheme.bob(setting.l));
    j.setting = setting;
    j
}

pub fn spatial_joint_for(
    rho2: &DensityMatrix,
    scheme: &MeasurementScheme,
    setting: SettingPair,
) -> JointDistribution {
    let mut j = spatial_joint(rho2, scheme.alice(setting.k), scheme.bob(setting.l));
    j.setting = setting;
    j
}
