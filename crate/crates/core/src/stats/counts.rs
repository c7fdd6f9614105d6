use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};

use crate::error::{Error, Result};
use crate::seqmeas::{JointDistribution, SettingPair};

/// Coincidence counts per setting pair, indexed `[r][s]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CountRecord {
    pub counts: BTreeMap<SettingPair, [[u64; 2]; 2]>,
    /// Mean number of coincidences per setting pair.
    pub expected_total: f64,
}

impl CountRecord {
    pub fn new(counts: BTreeMap<SettingPair, [[u64; 2]; 2]>, expected_total: f64) -> Self {
        Self {
            counts,
            expected_total,
        }
    }

    pub fn count(&self, setting: SettingPair, r: usize, s: usize) -> u64 {
        self.counts.get(&setting).map_or(0, |c| c[r][s])
    }

    pub fn total(&self, setting: SettingPair) -> u64 {
        self.counts
            .get(&setting)
            .map_or(0, |c| c.iter().flatten().sum())
    }
}

/// Draws an independent Poisson count with mean `mean_total * P(r,s)` for
/// every outcome cell.
pub fn sample_counts(dists: &[JointDistribution], mean_total: f64, seed: u64) -> Result<CountRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_counts_with(dists, mean_total, &mut rng)
}

pub fn sample_counts_with<R: Rng>(
    dists: &[JointDistribution],
    mean_total: f64,
    rng: &mut R,
) -> Result<CountRecord> {
    if !(mean_total.is_finite() && mean_total >= 0.0) {
        return Err(Error::InvalidParameter(format!("mean_total {mean_total}")));
    }
    let mut counts = BTreeMap::new();
    for d in dists {
        let mut cell = [[0u64; 2]; 2];
        for (cell_row, p_row) in cell.iter_mut().zip(&d.p) {
            for (c, p) in cell_row.iter_mut().zip(p_row) {
                let lambda = mean_total * p.max(0.0);
                *c = if lambda > 0.0 {
                    let poisson = Poisson::new(lambda)
                        .map_err(|e| Error::InvalidParameter(format!("poisson mean {lambda}: {e}")))?;
                    poisson.sample(rng) as u64
                } else {
                    0
                };
            }
        }
        counts.insert(d.setting, cell);
    }
    Ok(CountRecord::new(counts, mean_total))
}

/// Relative frequencies with first-order Poisson errors for one setting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityEstimate {
    pub p: [[f64; 2]; 2],
    pub sigma: [[f64; 2]; 2],
    pub total: u64,
    /// Some cell sits at 0 or 1, where the first-order error vanishes.
    pub boundary: bool,
}

impl ProbabilityEstimate {
    pub fn as_distribution(&self, setting: SettingPair) -> JointDistribution {
        JointDistribution {
            p: self.p,
            setting,
        }
    }
}

/// `p = n / N` per setting. Propagating independent Poisson errors on `n`
/// and on the remaining counts `N - n` gives `sigma^2 = p (1 - p) / N`.
pub fn estimate_probabilities(rec: &CountRecord) -> Result<BTreeMap<SettingPair, ProbabilityEstimate>> {
    let mut out = BTreeMap::new();
    for (&sp, cell) in &rec.counts {
        let total: u64 = cell.iter().flatten().sum();
        if total == 0 {
            return Err(Error::UndefinedEstimate {
                k: sp.k as u8,
                l: sp.l as u8,
            });
        }
        let n = total as f64;
        let mut p = [[0.0; 2]; 2];
        let mut sigma = [[0.0; 2]; 2];
        let mut boundary = false;
        for r in 0..2 {
            for s in 0..2 {
                let x = cell[r][s] as f64 / n;
                p[r][s] = x;
                sigma[r][s] = (x * (1.0 - x) / n).sqrt();
                boundary |= cell[r][s] == 0 || cell[r][s] == total;
            }
        }
        out.insert(
            sp,
            ProbabilityEstimate {
                p,
                sigma,
                total,
                boundary,
            },
        );
    }
    Ok(out)
}
