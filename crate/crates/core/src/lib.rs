//! Exact simulation of temporal quantum correlations.
//!
//! The crate evaluates Hardy and CHSH tests for two measurements performed
//! one after the other on a single qubit, contrasts them with the spatial
//! (two-qubit) versions, models the meter-qubit CZ measurement and its
//! post-selected linear-optics realization, and provides the count
//! statistics used to quote significances.
//!
//! Outcome labels follow one rule everywhere: label 1 is the +1 eigenvalue,
//! label 0 the -1 eigenvalue.

pub mod error;
pub mod inequalities;
pub mod photonic;
pub mod qcore;
pub mod seeding;
pub mod seqmeas;
pub mod stats;

pub use error::{Error, Result};
