use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use crate::config::{ExperimentConfig, Experiment};

pub const CSV_HEADER: &str = "experiment,state,scheme,quantity,value,sigma,n_sigma,seed";

/// One CSV line. Structured reports also carry the bound and extra numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub experiment: Experiment,
    pub state: String,
    pub scheme: String,
    pub quantity: String,
    pub value: f64,
    pub sigma: Option<f64>,
    pub n_sigma: Option<f64>,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub bound: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<bool>,
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub extra: BTreeMap<String, f64>,
}

impl Row {
    pub fn new(experiment: Experiment, state: &str, scheme: &str, quantity: &str, value: f64, seed: u64) -> Self {
        Self {
            experiment,
            state: state.into(),
            scheme: scheme.into(),
            quantity: quantity.into(),
            value,
            sigma: None,
            n_sigma: None,
            seed,
            bound: None,
            violation: None,
            extra: BTreeMap::new(),
        }
    }

    /// Compares the value with a bound; `n_sigma` is only set when a
    /// positive sigma is known.
    pub fn against(mut self, bound: f64, sigma: Option<f64>) -> Self {
        self.bound = Some(bound);
        self.violation = Some(self.value > bound);
        if let Some(s) = sigma.filter(|s| *s > 0.0) {
            self.sigma = Some(s);
            self.n_sigma = Some((self.value - bound) / s);
        }
        self
    }

    pub fn with(mut self, key: &str, value: f64) -> Self {
        self.extra.insert(key.into(), value);
        self
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Metadata {
    pub seed: u64,
    pub version: &'static str,
    pub wall_time_s: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub experiment: Experiment,
    pub config: ExperimentConfig,
    pub rows: Vec<Row>,
    pub summary: BTreeMap<String, f64>,
    pub metadata: Metadata,
}

impl Report {
    pub fn violations(&self) -> usize {
        self.rows.iter().filter(|r| r.violation == Some(true)).count()
    }

    /// Rejects NaN and infinities anywhere in the numeric output.
    pub fn check_finite(&self) -> Result<(), String> {
        let bad = |what: &str, x: f64| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(format!("non-finite {what}: {x}"))
            }
        };
        for r in &self.rows {
            let label = format!("{} for {}/{}", r.quantity, r.state, r.scheme);
            bad(&label, r.value)?;
            for x in r.sigma.iter().chain(&r.n_sigma).chain(&r.bound).chain(r.extra.values()) {
                bad(&label, *x)?;
            }
        }
        for (k, v) in &self.summary {
            bad(k, *v)?;
        }
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "{CSV_HEADER}")?;
        for r in &self.rows {
            let opt = |x: Option<f64>| x.map(format_sig).unwrap_or_default();
            writeln!(
                w,
                "{},{},{},{},{},{},{},{}",
                r.experiment,
                csv_field(&r.state),
                csv_field(&r.scheme),
                csv_field(&r.quantity),
                format_sig(r.value),
                opt(r.sigma),
                opt(r.n_sigma),
                r.seed
            )?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("utf-8 output")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Decimal rendering with 9 significant digits.
pub fn format_sig(x: f64) -> String {
    if x == 0.0 {
        return "0".into();
    }
    let magnitude = x.abs().log10().floor() as i32;
    let decimals = (8 - magnitude).clamp(0, 40) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).collect::<String>();
    let significant = digits.trim_start_matches('0').len();
    if significant > 9 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else if s.trim_start_matches('-').chars().all(|c| c == '0' || c == '.') {
        "0".into()
    } else {
        s
    }
}
