use std::collections::BTreeMap;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use qtemporal::inequalities::{
    chsh_evaluate, hardy_evaluate, preset_hardy_scheme, spatial_hardy_maximize,
    state_independence_scan, SpatialHardyOptions, CHSH_CLASSICAL_BOUND, PARADOX_SPATIAL_MAX,
};
use qtemporal::photonic::{
    apply_visibility, chi_from_unitary, correlations_from_joints, cz_unitary,
    depolarization_for_fidelity, hardy_from_joints, meter_joints, ppbs_gate, process_fidelity,
    process_purity, GateModel, ProcessMatrix,
};
use qtemporal::qcore::{random_density, DensityMatrix, PolarizationState, PurityClass};
use qtemporal::seeding::split_seed;
use qtemporal::seqmeas::{temporal_joint_for, JointDistribution, SettingPair};
use qtemporal::stats::{monte_carlo_resample, Quantity};

use crate::config::{ConfigError, Experiment, ExperimentConfig, NamedScheme, NamedState, QuantityKind};
use crate::report::{Metadata, Report, Row};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Model(#[from] qtemporal::Error),
    #[error("{0}")]
    Invalid(String),
}

type Result<T> = std::result::Result<T, RunError>;

/// Everything a per-state computation needs, resolved once from the config.
struct Setup {
    experiment: Experiment,
    seed: u64,
    visibility: f64,
    gate: Option<GateModel>,
    mean_total: Option<f64>,
    trials: usize,
}

impl Setup {
    fn new(experiment: Experiment, config: &ExperimentConfig, seed: u64) -> Result<Self> {
        let noise = config.noise_model()?;
        let gate = if noise.depolarization > 0.0 {
            Some(depolarized_cz(noise.depolarization)?)
        } else {
            None
        };
        Ok(Self {
            experiment,
            seed,
            visibility: noise.visibility,
            gate,
            mean_total: config.mean_total()?,
            trials: config.sampling.trials,
        })
    }

    /// Setting distributions of the sequential measurement, including noise.
    fn joints(&self, rho: &DensityMatrix, scheme: &NamedScheme) -> Result<[JointDistribution; 4]> {
        let ideal = match &self.gate {
            None => SettingPair::ALL.map(|sp| temporal_joint_for(rho, &scheme.scheme, sp)),
            Some(g) => meter_joints(rho, &scheme.scheme, g)?,
        };
        Ok(ideal.map(|j| j.with_visibility(self.visibility)))
    }

    fn model_value(&self, rho: &DensityMatrix, scheme: &NamedScheme, q: QuantityKind) -> Result<f64> {
        Ok(match (q, &self.gate) {
            (QuantityKind::S, None) => {
                let c = chsh_evaluate(rho, &scheme.scheme).correlations;
                apply_visibility(&c, self.visibility)?.chsh_value()
            }
            (QuantityKind::S, Some(_)) => correlations_from_joints(&self.joints(rho, scheme)?).chsh_value(),
            (QuantityKind::H, _) => hardy_from_joints(&self.joints(rho, scheme)?).h,
        })
    }

    fn resample(
        &self,
        joints: &[JointDistribution; 4],
        q: QuantityKind,
        mean_total: f64,
        index: usize,
    ) -> Result<qtemporal::stats::MonteCarloSummary> {
        let quantity = match q {
            QuantityKind::S => Quantity::Chsh,
            QuantityKind::H => Quantity::Hardy,
        };
        Ok(monte_carlo_resample(
            joints,
            quantity,
            mean_total,
            self.trials,
            split_seed(self.seed, index as u64),
        )?)
    }
}

fn depolarized_cz(lambda: f64) -> Result<GateModel> {
    Ok(GateModel::Channel(chi_from_unitary(&cz_unitary())?.depolarized(lambda)?))
}

fn bound(q: QuantityKind) -> f64 {
    match q {
        QuantityKind::S => CHSH_CLASSICAL_BOUND,
        QuantityKind::H => 0.0,
    }
}

fn quantity_name(q: QuantityKind) -> &'static str {
    match q {
        QuantityKind::S => "S",
        QuantityKind::H => "H",
    }
}

fn require_qubits(states: &[NamedState]) -> Result<()> {
    match states.iter().find(|s| s.rho.dim() != 2) {
        Some(s) => Err(RunError::Invalid(format!(
            "state `{}` is not a single-qubit density matrix",
            s.name
        ))),
        None => Ok(()),
    }
}

/// Cartesian product in config order: states outer, schemes inner.
fn pairs<'a>(states: &'a [NamedState], schemes: &'a [NamedScheme]) -> Vec<(&'a NamedState, &'a NamedScheme)> {
    states
        .iter()
        .flat_map(|st| schemes.iter().map(move |sc| (st, sc)))
        .collect()
}

/// Runs one experiment. The seed override, when given, replaces
/// `sampling.seed`.
pub fn run(experiment: Experiment, config: &ExperimentConfig, seed: Option<u64>) -> Result<Report> {
    config.check_experiment(experiment)?;
    let started = Instant::now();
    let seed = seed.unwrap_or(config.sampling.seed);
    let setup = Setup::new(experiment, config, seed)?;
    let mut summary = BTreeMap::new();
    let rows = match experiment {
        Experiment::Hardy => per_state(&setup, config, &["H"], &["hardy"], Some(QuantityKind::H), &mut summary)?,
        Experiment::Chsh => per_state(
            &setup,
            config,
            &names(&PolarizationState::STANDARD_SET),
            &["chsh"],
            Some(QuantityKind::S),
            &mut summary,
        )?,
        Experiment::Montecarlo => {
            if setup.mean_total.is_none() {
                return Err(RunError::Invalid("montecarlo needs sampling.mean_total".into()));
            }
            per_state(&setup, config, &["H"], &["hardy"], None, &mut summary)?
        }
        Experiment::ProcessPredict => process_predict(&setup, config, &mut summary)?,
        Experiment::StateScan => state_scan(&setup, config, &mut summary)?,
        Experiment::HardySpatialMax => spatial_max(&setup, config, &mut summary)?,
        Experiment::PpbsCheck => ppbs_check(&setup, config, &mut summary)?,
    };
    let report = Report {
        experiment,
        config: config.clone(),
        rows,
        summary,
        metadata: Metadata {
            seed,
            version: env!("CARGO_PKG_VERSION"),
            wall_time_s: started.elapsed().as_secs_f64(),
        },
    };
    report.check_finite().map_err(RunError::Invalid)?;
    Ok(report)
}

fn names(states: &[PolarizationState]) -> Vec<String> {
    states.iter().map(|s| s.name()).collect()
}

fn resolve_states(config: &ExperimentConfig, defaults: &[impl AsRef<str>]) -> Result<Vec<NamedState>> {
    let parsed = defaults
        .iter()
        .map(|n| PolarizationState::parse(n.as_ref()).ok_or_else(|| ConfigError::UnknownState(n.as_ref().into())))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok(config.states(&parsed)?)
}

/// One row per (state, scheme). `forced` fixes the quantity; otherwise each
/// scheme's natural inequality is used. With sampling enabled the hardy and
/// chsh experiments report the model value with the simulated spread, while
/// montecarlo reports the mean over trials.
fn per_state(
    setup: &Setup,
    config: &ExperimentConfig,
    default_states: &[impl AsRef<str>],
    default_schemes: &[&str],
    forced: Option<QuantityKind>,
    summary: &mut BTreeMap<String, f64>,
) -> Result<Vec<Row>> {
    let states = resolve_states(config, default_states)?;
    let schemes = config.schemes(default_schemes)?;
    require_qubits(&states)?;
    let work = pairs(&states, &schemes);
    let rows = work
        .par_iter()
        .enumerate()
        .map(|(i, (st, sc))| {
            let q = forced.unwrap_or(sc.quantity);
            let value = setup.model_value(&st.rho, sc, q)?;
            let mut row = Row::new(setup.experiment, &st.name, &sc.name, quantity_name(q), value, setup.seed);
            if q == QuantityKind::H {
                let h = hardy_from_joints(&setup.joints(&st.rho, sc)?);
                row = row.with("zero_conditions", h.probabilities.zero_conditions());
            }
            let Some(n) = setup.mean_total else {
                return Ok(row.against(bound(q), None));
            };
            let mc = setup.resample(&setup.joints(&st.rho, sc)?, q, n, i)?;
            if setup.experiment == Experiment::Montecarlo {
                row.value = mc.mean;
                row = row.with("model_value", value).with("first_order_sigma", mc.first_order_sigma);
            }
            Ok(row.with("mean_total", n).against(bound(q), Some(mc.empirical_sigma)))
        })
        .collect::<Result<Vec<Row>>>()?;
    summary.insert("rows".into(), rows.len() as f64);
    summary.insert(
        "violations".into(),
        rows.iter().filter(|r| r.violation == Some(true)).count() as f64,
    );
    Ok(rows)
}

fn process_predict(setup: &Setup, config: &ExperimentConfig, summary: &mut BTreeMap<String, f64>) -> Result<Vec<Row>> {
    let lambda = match config.process.fidelity {
        Some(f) => depolarization_for_fidelity(f)?,
        None => config.noise.depolarization,
    };
    let ideal = chi_from_unitary(&cz_unitary())?;
    let chi: ProcessMatrix = ideal.depolarized(lambda)?;
    let channel = Setup {
        experiment: setup.experiment,
        seed: setup.seed,
        visibility: setup.visibility,
        gate: Some(GateModel::Channel(chi.clone())),
        mean_total: setup.mean_total,
        trials: setup.trials,
    };
    let mut rows = per_state(
        &channel,
        config,
        &names(&PolarizationState::STANDARD_SET),
        &["chsh"],
        None,
        summary,
    )?;
    let s_rows: Vec<f64> = rows.iter().filter(|r| r.quantity == "S").map(|r| r.value).collect();
    if !s_rows.is_empty() {
        summary.insert("s_avg".into(), s_rows.iter().sum::<f64>() / s_rows.len() as f64);
    }
    summary.insert("depolarization".into(), lambda);
    let purity = process_purity(&chi);
    let fidelity = process_fidelity(&chi, &ideal)?;
    rows.push(Row::new(setup.experiment, "-", "cz-channel", "process_purity", purity, setup.seed));
    rows.push(Row::new(setup.experiment, "-", "cz-channel", "process_fidelity", fidelity, setup.seed));
    Ok(rows)
}

fn state_scan(setup: &Setup, config: &ExperimentConfig, summary: &mut BTreeMap<String, f64>) -> Result<Vec<Row>> {
    let n = config.scan.samples;
    if n == 0 {
        return Err(RunError::Invalid("scan.samples must be at least 1".into()));
    }
    let scan = state_independence_scan(n, setup.seed);
    summary.insert("samples".into(), n as f64);
    summary.insert("spread".into(), scan.spread);
    let row = |state: &str, s: f64| {
        Row::new(setup.experiment, state, "chsh", "S", s, setup.seed).against(CHSH_CLASSICAL_BOUND, None)
    };
    Ok(vec![row("random-min", scan.min_s), row("random-max", scan.max_s)])
}

fn spatial_max(setup: &Setup, config: &ExperimentConfig, summary: &mut BTreeMap<String, f64>) -> Result<Vec<Row>> {
    let opts = SpatialHardyOptions {
        restarts: config.optimizer.restarts.max(1),
        seed: setup.seed,
        tolerance: config.optimizer.tolerance,
        constraint: config.constraint()?,
        ..Default::default()
    };
    let best = spatial_hardy_maximize(&opts);
    let temporal = hardy_evaluate(&DensityMatrix::ket0(), &preset_hardy_scheme()).h;
    let p = best.params;
    summary.insert("converged".into(), if best.converged { 1.0 } else { 0.0 });
    summary.insert("closed_form".into(), PARADOX_SPATIAL_MAX);
    summary.insert("temporal_excess".into(), temporal - best.h_max);
    let spatial = Row::new(setup.experiment, "optimized-two-qubit", "optimized-xz", "H", best.h_max, setup.seed)
        .with("schmidt_angle", p.schmidt)
        .with("a0", p.a0)
        .with("a1", p.a1)
        .with("b0", p.b0)
        .with("b1", p.b1)
        .with("zero_conditions", best.result.probabilities.zero_conditions())
        .against(0.0, None);
    let sequential = Row::new(setup.experiment, "H", "hardy", "H", temporal, setup.seed).against(best.h_max, None);
    Ok(vec![spatial, sequential])
}

fn ppbs_check(setup: &Setup, config: &ExperimentConfig, summary: &mut BTreeMap<String, f64>) -> Result<Vec<Row>> {
    let gate = ppbs_gate(&config.ppbs_config()?)?;
    let n = config.ppbs.samples;
    if n == 0 {
        return Err(RunError::Invalid("ppbs.samples must be at least 1".into()));
    }
    let classes = [PurityClass::Pure, PurityClass::Mixed, PurityClass::MaximallyMixedBlend];
    let probs = (0..n)
        .into_par_iter()
        .map(|i| {
            let rho = random_density(4, classes[i % 3], split_seed(setup.seed, i as u64))?;
            Ok(gate.success_probability(&rho))
        })
        .collect::<std::result::Result<Vec<f64>, qtemporal::Error>>()?;
    let min = probs.iter().copied().fold(f64::INFINITY, f64::min);
    let max = probs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let deviation = gate.operator.max_abs_diff(&cz_unitary().scale_real(1.0 / 3.0));
    summary.insert("unbalanced".into(), if gate.unbalanced { 1.0 } else { 0.0 });
    let state = format!("random-two-qubit[{n}]");
    Ok(vec![
        Row::new(setup.experiment, &state, "ppbs", "success_probability_min", min, setup.seed),
        Row::new(setup.experiment, &state, "ppbs", "success_probability_max", max, setup.seed),
        Row::new(setup.experiment, "-", "ppbs", "cz_third_deviation", deviation, setup.seed),
    ])
}
