//! Poissonian count simulation, probability estimation and error propagation.

mod counts;
mod montecarlo;
mod propagate;

pub use counts::{
    estimate_probabilities, sample_counts, sample_counts_with, CountRecord, ProbabilityEstimate,
};
pub use montecarlo::{
    first_order_hardy_sigma, monte_carlo_resample, MonteCarloSummary, Quantity, RunningStats,
};
pub use propagate::{propagate_chsh, propagate_hardy, EstimateWithError};
