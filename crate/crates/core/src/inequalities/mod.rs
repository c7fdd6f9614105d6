//! Hardy and CHSH evaluators for temporal and spatial scenarios.

mod spatial;

pub use spatial::{
    spatial_hardy_maximize, HardyConstraint, SpatialHardyMax, SpatialHardyOptions,
    SpatialHardyParams, PARADOX_SPATIAL_MAX, TSIRELSON_HARDY_MAX,
};

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::qcore::{random_density_with, DensityMatrix, Observable, PurityClass, C0};
use crate::seeding::rng_for;
use crate::seqmeas::{
    correlator_anticommutator, spatial_joint_for, temporal_joint_for, CorrelationTable,
    JointDistribution, MeasurementScheme, SettingPair,
};

/// Classical bound of the CHSH expression.
pub const CHSH_CLASSICAL_BOUND: f64 = 2.0;

/// The four probabilities entering the Hardy expression.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct HardyProbabilities {
    /// `P(1,1|1,1)`
    pub p1111: f64,
    /// `P(1,0|1,0)`
    pub p1010: f64,
    /// `P(0,1|0,1)`
    pub p0101: f64,
    /// `P(1,1|0,0)`
    pub p1100: f64,
}

impl HardyProbabilities {
    /// Picks the relevant cells out of the four setting distributions.
    pub fn from_joint(joint: impl Fn(SettingPair) -> JointDistribution) -> Self {
        Self {
            p1111: joint(SettingPair { k: 1, l: 1 }).p[1][1],
            p1010: joint(SettingPair { k: 1, l: 0 }).p[1][0],
            p0101: joint(SettingPair { k: 0, l: 1 }).p[0][1],
            p1100: joint(SettingPair { k: 0, l: 0 }).p[1][1],
        }
    }

    /// `P(1,1|1,1) - P(1,1|0,0) - P(1,0|1,0) - P(0,1|0,1)`.
    pub fn hardy_value(&self) -> f64 {
        self.p1111 - self.p1100 - self.p1010 - self.p0101
    }

    /// Sum of the three probabilities that must vanish in the paradox.
    pub fn zero_conditions(&self) -> f64 {
        self.p1010 + self.p0101 + self.p1100
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HardyResult {
    pub probabilities: HardyProbabilities,
    pub h: f64,
}

impl From<HardyProbabilities> for HardyResult {
    fn from(probabilities: HardyProbabilities) -> Self {
        Self {
            h: probabilities.hardy_value(),
            probabilities,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshResult {
    pub correlations: CorrelationTable,
    pub s: f64,
}

impl From<CorrelationTable> for ChshResult {
    fn from(correlations: CorrelationTable) -> Self {
        Self {
            s: correlations.chsh_value(),
            correlations,
        }
    }
}

/// `A0 = B1 = -Z`, `A1 = B0 = X`.
pub fn preset_hardy_scheme() -> MeasurementScheme {
    let minus_z = Observable::new("-Z", [0.0, 0.0, -1.0]).unwrap();
    MeasurementScheme {
        a0: minus_z.clone().with_label("A0"),
        a1: Observable::x().with_label("A1"),
        b0: Observable::x().with_label("B0"),
        b1: minus_z.with_label("B1"),
    }
}

/// `A0 = Z`, `A1 = X`, `B0 = (Z + X)/sqrt 2`, `B1 = (Z - X)/sqrt 2`.
pub fn preset_chsh_scheme() -> MeasurementScheme {
    MeasurementScheme {
        a0: Observable::z().with_label("A0"),
        a1: Observable::x().with_label("A1"),
        b0: Observable::new("B0", [FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap(),
        b1: Observable::new("B1", [-FRAC_1_SQRT_2, 0.0, FRAC_1_SQRT_2]).unwrap(),
    }
}

/// `(|00> + |11>)/sqrt 2`.
pub fn phi_plus() -> DensityMatrix {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    DensityMatrix::pure(&[s, C0, C0, s]).unwrap()
}

/// Temporal Hardy test: sequential measurements on a single qubit.
pub fn hardy_evaluate(rho: &DensityMatrix, scheme: &MeasurementScheme) -> HardyResult {
    HardyProbabilities::from_joint(|sp| temporal_joint_for(rho, scheme, sp)).into()
}

/// Spatial Hardy test: local measurements on a two-qubit state.
pub fn spatial_hardy_evaluate(rho2: &DensityMatrix, scheme: &MeasurementScheme) -> HardyResult {
    HardyProbabilities::from_joint(|sp| spatial_joint_for(rho2, scheme, sp)).into()
}

/// Temporal CHSH value from the anticommutator correlators.
pub fn chsh_evaluate(rho: &DensityMatrix, scheme: &MeasurementScheme) -> ChshResult {
    CorrelationTable::from_fn(|sp| {
        correlator_anticommutator(rho, scheme.alice(sp.k), scheme.bob(sp.l))
    })
    .into()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanReport {
    pub samples: usize,
    pub min_s: f64,
    pub max_s: f64,
    pub spread: f64,
}

/// Evaluates the CHSH preset on `n` random single-qubit states. Even-indexed
/// samples are pure, odd-indexed samples alternate between the two mixed
/// families. Sample `i` is seeded with `split_seed(seed, i)`.
pub fn state_independence_scan(n: usize, seed: u64) -> ScanReport {
    assert!(n >= 1, "scan needs at least one sample");
    let scheme = preset_chsh_scheme();
    let (min_s, max_s) = (0..n)
        .into_par_iter()
        .map(|i| {
            let class = match i % 4 {
                0 | 2 => PurityClass::Pure,
                1 => PurityClass::Mixed,
                _ => PurityClass::MaximallyMixedBlend,
            };
            let mut rng = rng_for(seed, i as u64);
            let rho = random_density_with(2, class, &mut rng).expect("dimension 2");
            let s = chsh_evaluate(&rho, &scheme).s;
            (s, s)
        })
        .reduce(
            || (f64::INFINITY, f64::NEG_INFINITY),
            |a, b| (a.0.min(b.0), a.1.max(b.1)),
        );
    ScanReport {
        samples: n,
        min_s,
        max_s,
        spread: max_s - min_s,
    }
}
