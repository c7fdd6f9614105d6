//! Maximization of the spatial Hardy expression over pure two-qubit states
//! and local dichotomic measurements.
//!
//! Every pure two-qubit state can be brought to Schmidt form
//! `cos(t)|00> + sin(t)|11>` by local unitaries, and for real Schmidt
//! coefficients the optimal measurements lie in the x-z plane of the Bloch
//! sphere. The search space is therefore the Schmidt angle plus four polar
//! angles `(a0, a1, b0, b1)`.
//!
//! Two objectives are supported:
//!
//! * [`HardyConstraint::Paradox`] keeps the three "zero" probabilities of the
//!   paradox at exactly zero and maximizes `P(1,1|1,1)`. Given the Schmidt
//!   angle and `a0`, the zero conditions fix `a1`, `b0` and `b1`
//!   (see [`SpatialHardyParams::paradox`]), so the ascent runs over two free
//!   parameters. The optimum is `(5 sqrt 5 - 11)/2`.
//! * [`HardyConstraint::Unconstrained`] maximizes the full expression over all
//!   five parameters. Without the zero conditions the expression is a CH-type
//!   inequality whose quantum maximum is `(sqrt 2 - 1)/2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;

use super::{spatial_hardy_evaluate, HardyResult};
use crate::qcore::{DensityMatrix, Observable, C0};
use crate::seeding::rng_for;
use crate::seqmeas::MeasurementScheme;

/// `(5 sqrt 5 - 11) / 2`, the largest `P(1,1|1,1)` compatible with the three
/// vanishing probabilities for two qubits.
pub const PARADOX_SPATIAL_MAX: f64 = 0.090_169_943_749_474_24;

/// `(sqrt 2 - 1) / 2`, the largest value of the Hardy expression for two
/// qubits when the zero conditions are not imposed.
pub const TSIRELSON_HARDY_MAX: f64 = 0.207_106_781_186_547_5;

const INITIAL_STEP: f64 = 0.1;
const MAX_SWEEPS: usize = 100_000;
/// Gains below this are treated as rounding noise.
const MIN_GAIN: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyConstraint {
    Paradox,
    Unconstrained,
}

/// Schmidt angle and the four x-z plane measurement angles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpatialHardyParams {
    pub schmidt: f64,
    pub a0: f64,
    pub a1: f64,
    pub b0: f64,
    pub b1: f64,
}

impl SpatialHardyParams {
    pub fn from_array(x: [f64; 5]) -> Self {
        Self {
            schmidt: x[0],
            a0: x[1],
            a1: x[2],
            b0: x[3],
            b1: x[4],
        }
    }

    pub fn to_array(self) -> [f64; 5] {
        [self.schmidt, self.a0, self.a1, self.b0, self.b1]
    }

    /// Completes `(schmidt, a0)` to a point satisfying the three zero
    /// conditions.
    ///
    /// With Schmidt coefficients `c = (cos t, sin t)` and Alice's outcome-r
    /// eigenvector `u` for setting k, Bob's conditional vector is
    /// `phi_kr = (c0 u0, c1 u1)`. `P(1,0|1,0) = 0` makes `phi_11` Bob's
    /// outcome-1 eigenvector of `B0`; `P(1,1|0,0) = 0` makes `phi_01` his
    /// outcome-0 eigenvector of `B0`, which requires `phi_01 . phi_11 = 0`
    /// and fixes `a1`; `P(0,1|0,1) = 0` makes `phi_00` his outcome-0
    /// eigenvector of `B1`.
    pub fn paradox(schmidt: f64, a0: f64) -> Self {
        let (c0, c1) = (schmidt.cos(), schmidt.sin());
        let plus = |angle: f64| [(angle / 2.0).cos(), (angle / 2.0).sin()];
        let minus = |angle: f64| [(angle / 2.0).sin(), -(angle / 2.0).cos()];
        // in-plane angle whose outcome-1 / outcome-0 eigenvector is parallel to v
        let angle_with_plus = |v: [f64; 2]| 2.0 * v[1].atan2(v[0]);
        let angle_with_minus = |v: [f64; 2]| 2.0 * v[0].atan2(-v[1]);

        let u01 = plus(a0);
        let w = [c0 * c0 * u01[0], c1 * c1 * u01[1]];
        let a1 = angle_with_plus([-w[1], w[0]]);

        let u11 = plus(a1);
        let b0 = angle_with_plus([c0 * u11[0], c1 * u11[1]]);
        let u00 = minus(a0);
        let b1 = angle_with_minus([c0 * u00[0], c1 * u00[1]]);
        Self {
            schmidt,
            a0,
            a1,
            b0,
            b1,
        }
    }

    pub fn state(&self) -> DensityMatrix {
        let (c, s) = (self.schmidt.cos(), self.schmidt.sin());
        DensityMatrix::pure(&[Complex64::new(c, 0.0), C0, C0, Complex64::new(s, 0.0)])
            .expect("Schmidt state is normalized")
    }

    pub fn scheme(&self) -> MeasurementScheme {
        MeasurementScheme {
            a0: Observable::in_xz_plane("A0", self.a0),
            a1: Observable::in_xz_plane("A1", self.a1),
            b0: Observable::in_xz_plane("B0", self.b0),
            b1: Observable::in_xz_plane("B1", self.b1),
        }
    }

    pub fn evaluate(&self) -> HardyResult {
        spatial_hardy_evaluate(&self.state(), &self.scheme())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialHardyOptions {
    pub restarts: usize,
    pub seed: u64,
    pub tolerance: f64,
    pub constraint: HardyConstraint,
    /// Pin the Schmidt angle to 0 (product states).
    pub product_only: bool,
    /// Start the first restart from this point instead of a random one.
    pub start: Option<SpatialHardyParams>,
}

impl Default for SpatialHardyOptions {
    fn default() -> Self {
        Self {
            restarts: 200,
            seed: 1,
            tolerance: 1e-8,
            constraint: HardyConstraint::Paradox,
            product_only: false,
            start: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpatialHardyMax {
    pub h_max: f64,
    pub params: SpatialHardyParams,
    pub result: HardyResult,
    /// False when the best restart ran out of sweeps before the step size
    /// dropped below the tolerance.
    pub converged: bool,
    pub restarts: usize,
}

impl SpatialHardyMax {
    pub fn state(&self) -> DensityMatrix {
        self.params.state()
    }

    pub fn scheme(&self) -> MeasurementScheme {
        self.params.scheme()
    }
}

struct Objective<'a> {
    opts: &'a SpatialHardyOptions,
}

impl Objective<'_> {
    fn free_dims(&self) -> usize {
        match self.opts.constraint {
            HardyConstraint::Paradox => 2,
            HardyConstraint::Unconstrained => 5,
        }
    }

    fn params(&self, x: &[f64]) -> SpatialHardyParams {
        let schmidt = if self.opts.product_only { 0.0 } else { x[0] };
        match self.opts.constraint {
            HardyConstraint::Paradox => SpatialHardyParams::paradox(schmidt, x[1]),
            HardyConstraint::Unconstrained => {
                SpatialHardyParams::from_array([schmidt, x[1], x[2], x[3], x[4]])
            }
        }
    }

    fn free_coords(&self, p: &SpatialHardyParams) -> Vec<f64> {
        let all = p.to_array();
        all[..self.free_dims()].to_vec()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let r = self.params(x).evaluate();
        r.h
    }
}

/// First-improvement coordinate ascent with step halving. Returns the final
/// point, its value and whether the step reached the tolerance.
fn coordinate_ascent(obj: &Objective<'_>, mut x: Vec<f64>, tolerance: f64) -> (Vec<f64>, f64, bool) {
    let mut best = obj.value(&x);
    let mut step = INITIAL_STEP;
    let first = usize::from(obj.opts.product_only);
    for _ in 0..MAX_SWEEPS {
        if step < tolerance {
            return (x, best, true);
        }
        let mut improved = false;
        for i in first..x.len() {
            for dir in [1.0, -1.0] {
                let mut trial = x.clone();
                trial[i] += dir * step;
                let v = obj.value(&trial);
                if v > best + MIN_GAIN {
                    best = v;
                    x = trial;
                    improved = true;
                    break;
                }
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    (x, best, step < tolerance)
}

/// Multi-start coordinate ascent of the spatial Hardy expression. Restart
/// `i` draws its starting point from `split_seed(seed, i)`; restarts run in
/// parallel and the best value wins (ties go to the lowest index).
pub fn spatial_hardy_maximize(opts: &SpatialHardyOptions) -> SpatialHardyMax {
    let restarts = opts.restarts.max(1);
    let obj = Objective { opts };
    let (_, x, _, converged) = (0..restarts)
        .into_par_iter()
        .map(|i| {
            let start = match (&opts.start, i) {
                (Some(p), 0) => obj.free_coords(p),
                _ => {
                    let mut rng = rng_for(opts.seed, i as u64);
                    let mut x: Vec<f64> = (0..obj.free_dims())
                        .map(|_| rng.random_range(-PI..PI))
                        .collect();
                    x[0] = rng.random_range(0.0..PI / 2.0);
                    x
                }
            };
            let (x, v, converged) = coordinate_ascent(&obj, start, opts.tolerance);
            (i, x, v, converged)
        })
        .reduce_with(|a, b| {
            if b.2 > a.2 || (b.2 == a.2 && b.0 < a.0) {
                b
            } else {
                a
            }
        })
        .expect("at least one restart");
    let params = obj.params(&x);
    let result = params.evaluate();
    SpatialHardyMax {
        h_max: result.h,
        params,
        result,
        converged,
        restarts,
    }
}
