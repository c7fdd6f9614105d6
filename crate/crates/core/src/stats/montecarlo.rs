use rayon::prelude::*;

use super::counts::{estimate_probabilities, sample_counts, ProbabilityEstimate};
use super::propagate::propagate_hardy;
use crate::error::{Error, Result};
use crate::inequalities::HardyProbabilities;
use crate::seeding::split_seed;
use crate::seqmeas::{correlator_from_distribution, CorrelationTable, JointDistribution, SettingPair};

/// Streaming mean and variance (Welford), mergeable across workers.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RunningStats {
    n: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    /// Chan et al. pairwise combination.
    pub fn merge(&self, other: &RunningStats) -> RunningStats {
        if self.n == 0 {
            return *other;
        }
        if other.n == 0 {
            return *self;
        }
        let n = self.n + other.n;
        let delta = other.mean - self.mean;
        let mean = self.mean + delta * other.n as f64 / n as f64;
        let m2 = self.m2 + other.m2 + delta * delta * (self.n as f64 * other.n as f64) / n as f64;
        RunningStats { n, mean, m2 }
    }

    pub fn count(&self) -> u64 {
        self.n
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Sample (n - 1) variance.
    pub fn variance(&self) -> f64 {
        if self.n < 2 {
            0.0
        } else {
            self.m2 / (self.n - 1) as f64
        }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance().sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Which inequality a resampling run evaluates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    Hardy,
    Chsh,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonteCarloSummary {
    pub quantity: Quantity,
    pub trials: usize,
    pub mean: f64,
    pub empirical_sigma: f64,
    /// Average over trials of the first-order propagated error.
    pub first_order_sigma: f64,
}

fn lookup(est: &std::collections::BTreeMap<SettingPair, ProbabilityEstimate>, sp: SettingPair) -> Result<&ProbabilityEstimate> {
    est.get(&sp)
        .ok_or_else(|| Error::InvalidParameter(format!("missing setting ({},{})", sp.k, sp.l)))
}

/// Value and first-order error of the quantity from one set of estimates.
fn evaluate(
    quantity: Quantity,
    est: &std::collections::BTreeMap<SettingPair, ProbabilityEstimate>,
) -> Result<(f64, f64)> {
    match quantity {
        Quantity::Hardy => {
            let cell = |sp: SettingPair, r: usize, s: usize, sigma: bool| -> Result<f64> {
                let e = lookup(est, sp)?;
                Ok(if sigma { e.sigma[r][s] } else { e.p[r][s] })
            };
            let pick = |sigma: bool| -> Result<HardyProbabilities> {
                Ok(HardyProbabilities {
                    p1111: cell(SettingPair { k: 1, l: 1 }, 1, 1, sigma)?,
                    p1010: cell(SettingPair { k: 1, l: 0 }, 1, 0, sigma)?,
                    p0101: cell(SettingPair { k: 0, l: 1 }, 0, 1, sigma)?,
                    p1100: cell(SettingPair { k: 0, l: 0 }, 1, 1, sigma)?,
                })
            };
            let e = propagate_hardy(&pick(false)?, &pick(true)?, 0.0)?;
            Ok((e.value, e.sigma))
        }
        Quantity::Chsh => {
            let mut var = 0.0;
            let mut c = [[0.0; 2]; 2];
            for sp in SettingPair::ALL {
                let e = lookup(est, sp)?;
                let corr = correlator_from_distribution(&e.as_distribution(sp));
                // multinomial variance of a +-1 average
                var += (1.0 - corr * corr) / e.total as f64;
                c[sp.k][sp.l] = corr;
            }
            Ok((CorrelationTable { c }.chsh_value(), var.sqrt()))
        }
    }
}

/// Repeats sampling, estimation and evaluation `trials` times. Trial `t`
/// samples with seed `split_seed(seed, t)`; trials run in parallel and are
/// reduced in index order, so the result depends only on the inputs.
pub fn monte_carlo_resample(
    dists: &[JointDistribution],
    quantity: Quantity,
    mean_total: f64,
    trials: usize,
    seed: u64,
) -> Result<MonteCarloSummary> {
    if trials < 2 {
        return Err(Error::InvalidParameter(format!(
            "monte carlo needs at least 2 trials, got {trials}"
        )));
    }
    let outcomes = (0..trials)
        .into_par_iter()
        .map(|t| {
            let rec = sample_counts(dists, mean_total, split_seed(seed, t as u64))?;
            let est = estimate_probabilities(&rec)?;
            evaluate(quantity, &est)
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    let values: RunningStats = outcomes.iter().map(|o| o.0).collect();
    let first_order = outcomes.iter().map(|o| o.1).sum::<f64>() / trials as f64;
    Ok(MonteCarloSummary {
        quantity,
        trials,
        mean: values.mean(),
        empirical_sigma: values.std_dev(),
        first_order_sigma: first_order,
    })
}

/// First-order error of the Hardy value computed from the exact
/// distributions at `mean_total` coincidences per setting.
pub fn first_order_hardy_sigma(dists: &[JointDistribution], mean_total: f64) -> Result<f64> {
    let sigma_of = |sp: SettingPair, r: usize, s: usize| -> Result<f64> {
        let d = dists
            .iter()
            .find(|d| d.setting == sp)
            .ok_or_else(|| Error::InvalidParameter(format!("missing setting ({},{})", sp.k, sp.l)))?;
        let p = d.p[r][s];
        Ok((p * (1.0 - p) / mean_total).sqrt())
    };
    let sigmas = HardyProbabilities {
        p1111: sigma_of(SettingPair { k: 1, l: 1 }, 1, 1)?,
        p1010: sigma_of(SettingPair { k: 1, l: 0 }, 1, 0)?,
        p0101: sigma_of(SettingPair { k: 0, l: 1 }, 0, 1)?,
        p1100: sigma_of(SettingPair { k: 0, l: 0 }, 1, 1)?,
    };
    Ok(propagate_hardy(&HardyProbabilities::default(), &sigmas, 0.0)?.sigma)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::inequalities::preset_hardy_scheme;
    use crate::qcore::DensityMatrix;
    use crate::seqmeas::temporal_joint_for;

    fn ideal_hardy() -> Vec<JointDistribution> {
        let scheme = preset_hardy_scheme();
        SettingPair::ALL
            .iter()
            .map(|&sp| temporal_joint_for(&DensityMatrix::ket0(), &scheme, sp))
            .collect()
    }

    #[test]
    fn running_stats_merge_matches_sequential() {
        let xs: Vec<f64> = (0..100).map(|i| ((i * 37) % 17) as f64 * 0.3 - 1.0).collect();
        let all: RunningStats = xs.iter().copied().collect();
        let left: RunningStats = xs[..40].iter().copied().collect();
        let right: RunningStats = xs[40..].iter().copied().collect();
        let merged = left.merge(&right);
        assert_eq!(merged.count(), 100);
        assert!((merged.mean() - all.mean()).abs() < 1e-12);
        assert!((merged.variance() - all.variance()).abs() < 1e-12);
        let naive_mean = xs.iter().sum::<f64>() / 100.0;
        let naive_var = xs.iter().map(|x| (x - naive_mean).powi(2)).sum::<f64>() / 99.0;
        assert!((all.variance() - naive_var).abs() < 1e-12);
    }

    #[test]
    fn ideal_hardy_resampling() {
        let mc = monte_carlo_resample(&ideal_hardy(), Quantity::Hardy, 1e6, 100, 17).unwrap();
        // binomial error of P(1,1|1,1) = 1/4 at 1e6 coincidences
        let expected = (0.25f64 * 0.75 / 1e6).sqrt();
        assert!((mc.empirical_sigma - expected).abs() < 0.2 * expected, "{mc:?}");
        assert!((mc.mean - 0.25).abs() < 3.0 * mc.empirical_sigma, "{mc:?}");
    }

    #[test]
    fn resampling_is_deterministic() {
        let a = monte_carlo_resample(&ideal_hardy(), Quantity::Chsh, 1e3, 2, 4).unwrap();
        let b = monte_carlo_resample(&ideal_hardy(), Quantity::Chsh, 1e3, 2, 4).unwrap();
        assert_eq!(a, b);
        assert!(monte_carlo_resample(&ideal_hardy(), Quantity::Hardy, 1e3, 1, 4).is_err());
    }

    #[test]
    fn first_order_sigma_of_ideal_hardy() {
        let s = first_order_hardy_sigma(&ideal_hardy(), 1e6).unwrap();
        assert!((s - (0.1875f64 / 1e6).sqrt()).abs() < 1e-15);
    }
}
