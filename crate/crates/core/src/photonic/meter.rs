//! Nondestructive measurement of a signal qubit through an entangling gate
//! with a meter qubit prepared in |D>.
//!
//! The signal is first rotated so that the measured direction becomes z.
//! After the gate the meter is projected onto {|D>, |A>}: a meter left in
//! |D> ("not rotated") reports the +1 eigenvalue (outcome 1), a meter
//! flipped to |A> ("rotated") reports -1 (outcome 0). The signal rotation is
//! undone before the state is handed to the next measurement.

use num_complex::Complex64;
use rayon::prelude::*;

use super::gate::PostselectedGate;
use super::process::ProcessMatrix;
use crate::error::{Error, Result};
use crate::inequalities::{preset_hardy_scheme, HardyProbabilities, HardyResult};
use crate::qcore::{ComplexMatrix, DensityMatrix, Observable, Outcome, C0};
use crate::seqmeas::{
    correlator_from_distribution, CorrelationTable, JointDistribution, MeasurementScheme,
    SettingPair,
};

/// How the signal and meter interact.
#[derive(Debug, Clone, PartialEq)]
pub enum GateModel {
    Unitary(ComplexMatrix),
    Postselected(PostselectedGate),
    Channel(ProcessMatrix),
}

impl GateModel {
    pub fn ideal_cz() -> Self {
        GateModel::Unitary(super::cz_unitary())
    }

    /// Unnormalized two-qubit output state.
    fn apply(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            GateModel::Unitary(u) => u.conjugate(rho),
            GateModel::Postselected(g) => g.operator.conjugate(rho),
            GateModel::Channel(chi) => chi.apply(rho),
        }
    }
}

/// Result of one meter readout; arrays are indexed by outcome label.
#[derive(Debug, Clone, PartialEq)]
pub struct MeterReadout {
    pub probs: [f64; 2],
    pub post_states: [DensityMatrix; 2],
    /// Probability that the gate heralds success (1 for unitary and
    /// trace-preserving gates).
    pub success_probability: f64,
}

fn meter_state(outcome: Outcome) -> [Complex64; 2] {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    match outcome {
        1 => [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
        0 => [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        _ => panic!("outcome label {outcome} is not a bit"),
    }
}

/// `(I (x) <m|) sigma (I (x) |m>)`.
fn project_meter(sigma: &ComplexMatrix, m: &[Complex64; 2]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(2);
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = C0;
            for k in 0..2 {
                for l in 0..2 {
                    acc += m[k].conj() * sigma[(2 * i + k, 2 * j + l)] * m[l];
                }
            }
            out[(i, j)] = acc;
        }
    }
    out
}

/// Measures `setting` on the signal through the meter circuit.
///
/// A branch with zero probability reports the maximally mixed state.
pub fn meter_measure(
    rho_signal: &DensityMatrix,
    setting: &Observable,
    gate: &GateModel,
) -> Result<MeterReadout> {
    if rho_signal.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            actual: rho_signal.dim(),
        });
    }
    let u = setting.rotation_to_z();
    let rotated = u.conjugate(rho_signal.matrix());
    let meter = ComplexMatrix::outer(&meter_state(1));
    let input = rotated.kron(&meter)?;
    let output = gate.apply(&input);
    let success = output.trace().re;
    if success <= 1e-15 {
        return Err(Error::InvalidParameter(
            "gate never heralds success for this input".into(),
        ));
    }

    let u_dag = u.adjoint();
    let mut probs = [0.0; 2];
    let mut posts = Vec::with_capacity(2);
    for (r, prob) in probs.iter_mut().enumerate() {
        let branch = project_meter(&output, &meter_state(r));
        let weight = branch.trace().re;
        *prob = (weight / success).max(0.0);
        if *prob <= 1e-15 {
            *prob = 0.0;
            posts.push(DensityMatrix::maximally_mixed(2)?);
        } else {
            let unrotated = u_dag.conjugate(&branch).scale_real(1.0 / weight);
            posts.push(DensityMatrix::repaired(&unrotated)?);
        }
    }
    let [p0, p1]: [DensityMatrix; 2] = posts.try_into().expect("two branches");
    Ok(MeterReadout {
        probs,
        post_states: [p0, p1],
        success_probability: success,
    })
}

/// Joint distribution of a meter-circuit measurement of `a` followed by an
/// ideal projective measurement of `b`.
pub fn meter_then_projective(
    rho: &DensityMatrix,
    a: &Observable,
    b: &Observable,
    gate: &GateModel,
) -> Result<JointDistribution> {
    let readout = meter_measure(rho, a, gate)?;
    let p: [[f64; 2]; 2] = std::array::from_fn(|r| {
        std::array::from_fn(|s| readout.probs[r] * readout.post_states[r].expectation(&b.projector(s)))
    });
    Ok(JointDistribution {
        p,
        setting: SettingPair { k: 0, l: 0 },
    })
}

/// The four setting distributions of a scheme measured through the meter
/// circuit.
pub fn meter_joints(
    rho: &DensityMatrix,
    scheme: &MeasurementScheme,
    gate: &GateModel,
) -> Result<[JointDistribution; 4]> {
    let mut out = Vec::with_capacity(4);
    for sp in SettingPair::ALL {
        let mut j = meter_then_projective(rho, scheme.alice(sp.k), scheme.bob(sp.l), gate)?;
        j.setting = sp;
        out.push(j);
    }
    Ok(out.try_into().expect("four settings"))
}

fn joint_lookup(joints: &[JointDistribution; 4], sp: SettingPair) -> JointDistribution {
    *joints
        .iter()
        .find(|j| j.setting == sp)
        .expect("every setting pair present")
}

pub fn correlations_from_joints(joints: &[JointDistribution; 4]) -> CorrelationTable {
    CorrelationTable::from_fn(|sp| correlator_from_distribution(&joint_lookup(joints, sp)))
}

pub fn hardy_from_joints(joints: &[JointDistribution; 4]) -> HardyResult {
    HardyProbabilities::from_joint(|sp| joint_lookup(joints, sp)).into()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProcessPrediction {
    pub s_per_state: Vec<f64>,
    pub s_avg: f64,
    /// Hardy preset evaluated on |0>.
    pub hardy: HardyResult,
}

/// Predicts the CHSH value for each input state, and the Hardy value for the
/// Hardy preset on |0>, when the first measurement runs through the channel
/// described by `chi` and the second is ideal.
pub fn predict_from_process(
    chi: &ProcessMatrix,
    scheme: &MeasurementScheme,
    states: &[DensityMatrix],
) -> Result<ProcessPrediction> {
    if states.is_empty() {
        return Err(Error::InvalidParameter("no input states".into()));
    }
    let gate = GateModel::Channel(chi.clone());
    let s_per_state = states
        .par_iter()
        .map(|rho| {
            let joints = meter_joints(rho, scheme, &gate)?;
            Ok(correlations_from_joints(&joints).chsh_value())
        })
        .collect::<Result<Vec<f64>>>()?;
    let s_avg = s_per_state.iter().sum::<f64>() / s_per_state.len() as f64;
    let hardy_joints = meter_joints(&DensityMatrix::ket0(), &preset_hardy_scheme(), &gate)?;
    Ok(ProcessPrediction {
        s_per_state,
        s_avg,
        hardy: hardy_from_joints(&hardy_joints),
    })
}
