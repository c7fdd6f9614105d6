//! Meter-qubit measurement apparatus: the CZ interaction, the post-selected
//! beamsplitter gate, noise models and process-matrix tools.

mod gate;
mod meter;
mod noise;
mod process;

pub use gate::{cz_unitary, ppbs_gate, Polarization, PostselectedGate, PpbsConfig};
pub use meter::{
    correlations_from_joints, hardy_from_joints, meter_joints, meter_measure,
    meter_then_projective, predict_from_process, GateModel, MeterReadout, ProcessPrediction,
};
pub use noise::{apply_visibility, NoiseModel};
pub use process::{
    chi_from_unitary, depolarization_for_fidelity, pauli_basis, pauli_coefficients, pauli_label,
    process_fidelity, process_purity, ProcessMatrix,
};
