//! Run summaries and empirical-versus-analytic comparison verdicts.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analytic::{Regime, Spectrum2};
use crate::error::{Error, Result};
use crate::moments::MomentVector;
use crate::sim::EnsembleResult;
use crate::trajectory::{Sample, Trajectory};

/// Default comparator threshold in standard errors.
pub const DEFAULT_K: f64 = 4.0;
/// Default share of aligned points that must fall within `k` standard errors.
pub const DEFAULT_MIN_FRACTION: f64 = 0.99;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Quantity {
    SqMean,
    MeanSq,
    Variance,
}

impl Quantity {
    pub const ALL: [Quantity; 3] = [Quantity::SqMean, Quantity::MeanSq, Quantity::Variance];

    pub fn of(&self, s: &Sample) -> f64 {
        match self {
            Quantity::SqMean => s.sq_mean,
            Quantity::MeanSq => s.mean_sq,
            Quantity::Variance => s.variance,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Quantity::SqMean => "sq_mean",
            Quantity::MeanSq => "mean_sq",
            Quantity::Variance => "variance",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub points: usize,
    pub within: usize,
    pub fraction_within: f64,
    /// Largest `|empirical - analytic| / stderr` over points with a nonzero stderr.
    pub max_z: f64,
    /// Points with zero stderr whose values differ.
    pub exact_mismatches: usize,
    pub k: f64,
    pub min_fraction: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    pub k: f64,
    pub min_fraction: f64,
    /// Ignore samples with fewer agents than this.
    pub min_n: usize,
}

impl Default for CompareOptions {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            min_fraction: DEFAULT_MIN_FRACTION,
            min_n: 0,
        }
    }
}

/// Aligns an ensemble with an analytic trajectory sample by sample and
/// scores each quantity. Samples must agree on `n` (and on `t` when the
/// analytic trajectory is event-indexed, i.e. the sample counts match).
pub fn compare(ens: &EnsembleResult, analytic: &Trajectory, opts: CompareOptions) -> Result<Vec<Verdict>> {
    let emp = &ens.mean_trajectory.samples;
    let se = &ens.stderr_trajectory.samples;
    if emp.len() != analytic.samples.len() {
        return Err(Error::Misaligned(format!(
            "empirical series has {} samples, analytic has {}",
            emp.len(),
            analytic.samples.len()
        )));
    }
    for (k, (e, a)) in emp.iter().zip(&analytic.samples).enumerate() {
        if e.n != a.n {
            return Err(Error::Misaligned(format!(
                "sample {k}: empirical n = {}, analytic n = {}",
                e.n, a.n
            )));
        }
    }
    Ok(Quantity::ALL
        .iter()
        .map(|q| score(*q, emp, se, &analytic.samples, opts))
        .collect())
}

fn score(q: Quantity, emp: &[Sample], se: &[Sample], an: &[Sample], opts: CompareOptions) -> Verdict {
    let mut points = 0;
    let mut within = 0;
    let mut max_z: f64 = 0.0;
    let mut exact_mismatches = 0;
    for ((e, s), a) in emp.iter().zip(se).zip(an) {
        if e.n < opts.min_n {
            continue;
        }
        points += 1;
        let diff = (q.of(e) - q.of(a)).abs();
        let err = q.of(s);
        if err > 0.0 {
            let z = diff / err;
            max_z = max_z.max(z);
            if z <= opts.k {
                within += 1;
            }
        } else if diff <= 1e-12 * q.of(a).abs().max(1.0) {
            within += 1;
        } else {
            exact_mismatches += 1;
        }
    }
    let fraction_within = if points == 0 { 0.0 } else { within as f64 / points as f64 };
    Verdict {
        name: q.name().to_string(),
        pass: points > 0 && fraction_within >= opts.min_fraction,
        points,
        within,
        fraction_within,
        max_z,
        exact_mismatches,
        k: opts.k,
        min_fraction: opts.min_fraction,
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct AnalyticSummary {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_point: Option<MomentVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub equilibrium_variance: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectrum: Option<Spectrum2>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<Regime>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_sample: Option<Sample>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub limits: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalSummary {
    pub replicates: usize,
    pub final_mean: Sample,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub final_stderr: Option<Sample>,
}

impl EmpiricalSummary {
    pub fn from_ensemble(ens: &EnsembleResult) -> Option<Self> {
        Some(Self {
            replicates: ens.replicates,
            final_mean: *ens.mean_trajectory.last()?,
            final_stderr: ens.stderr_trajectory.last().copied(),
        })
    }

    pub fn from_single(traj: &Trajectory) -> Option<Self> {
        Some(Self {
            replicates: 1,
            final_mean: *traj.last()?,
            final_stderr: None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub command: String,
    pub config: serde_json::Value,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub analytic: Option<AnalyticSummary>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub empirical: Option<EmpiricalSummary>,
    #[serde(default)]
    pub verdicts: Vec<Verdict>,
}

impl RunReport {
    pub fn new(command: impl Into<String>, config: serde_json::Value) -> Self {
        Self {
            command: command.into(),
            config,
            analytic: None,
            empirical: None,
            verdicts: Vec::new(),
        }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Every number in the report must be finite for it to serialize
    /// faithfully.
    pub fn check_finite(&self) -> Result<()> {
        let v = serde_json::to_value(self).map_err(|e| Error::Io(e.to_string()))?;
        if has_null_number(&v) {
            return Err(Error::InvalidConfig("report contains a non-finite number".into()));
        }
        Ok(())
    }

    pub fn to_json(&self) -> Result<String> {
        self.check_finite()?;
        serde_json::to_string_pretty(self).map_err(|e| Error::Io(e.to_string()))
    }

    pub fn from_json(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Io(e.to_string()))
    }
}

// serde_json writes NaN and ±inf as null. Optional fields are skipped when
// None, so a null anywhere means a non-finite float slipped in.
fn has_null_number(v: &serde_json::Value) -> bool {
    match v {
        serde_json::Value::Null => true,
        serde_json::Value::Array(a) => a.iter().any(has_null_number),
        serde_json::Value::Object(o) => o.values().any(has_null_number),
        _ => false,
    }
}
