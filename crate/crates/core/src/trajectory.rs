use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrajectoryKind {
    EmpiricalSingle,
    EmpiricalEnsembleMean,
    /// Per-sample standard error of an ensemble mean.
    EmpiricalEnsembleStderr,
    Analytic,
}

/// One time-indexed record.
///
/// `t` is the event counter. For ensemble means in growing mode it is the
/// average arrival time, hence a float. `mean` is absent for analytic
/// samples since the first moment is not propagated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub t: f64,
    pub n: usize,
    pub sq_mean: f64,
    pub mean_sq: f64,
    pub variance: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mean: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MarkKind {
    Replacement,
    Arrival,
    Departure,
}

/// Population-changing event, kept so that replacement and arrival instants
/// can be plotted alongside the moments.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EventMark {
    pub t: u64,
    pub kind: MarkKind,
    pub departed: Option<f64>,
    pub arrived: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub kind: TrajectoryKind,
    pub samples: Vec<Sample>,
    pub marks: Vec<EventMark>,
    /// Agent values after each event, when requested.
    pub values: Vec<Vec<f64>>,
}

impl Trajectory {
    pub fn new(kind: TrajectoryKind) -> Self {
        Self {
            kind,
            samples: Vec::new(),
            marks: Vec::new(),
            values: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&Sample> {
        self.samples.last()
    }

    pub fn variances(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.variance)
    }

    pub fn is_time_increasing(&self) -> bool {
        self.samples.windows(2).all(|w| w[0].t < w[1].t)
    }
}
