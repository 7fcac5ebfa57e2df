use serde::{Deserialize, Serialize};

use crate::dist::ArrivalDistribution;
use crate::error::{check_positive_probability, check_probability, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Gossip with probability `1 - p`, replacement with probability `p`.
    FixedSize,
    /// Arrival with probability `p_n`, gossip otherwise; no departures.
    Growing,
}

/// Arrival probability `p_n` as a function of the current size `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum Schedule {
    Constant { p: f64 },
    /// Arrivals at a fixed rate `lambda_a`, gossips at `lambda_g` per agent:
    /// `p_n = lambda_a / (lambda_a + lambda_g n)`.
    FixedArrivalRate { lambda_a: f64, lambda_g: f64 },
    /// Arrivals at `lambda_r` per agent: `p_n = lambda_r / (lambda_r + lambda_g)`.
    LinearArrivalRate { lambda_r: f64, lambda_g: f64 },
    /// `p_n = 1 / n`.
    Harmonic,
    /// `p_n = table[n - 1]`, the last entry repeating past the end.
    Table { values: Vec<f64> },
}

impl Schedule {
    pub fn constant(p: f64) -> Self {
        Schedule::Constant { p }
    }

    pub fn p_at(&self, n: usize) -> f64 {
        let nf = n as f64;
        match self {
            Schedule::Constant { p } => *p,
            Schedule::FixedArrivalRate { lambda_a, lambda_g } => lambda_a / (lambda_a + lambda_g * nf),
            Schedule::LinearArrivalRate { lambda_r, lambda_g } => lambda_r / (lambda_r + lambda_g),
            Schedule::Harmonic => 1.0 / nf.max(1.0),
            Schedule::Table { values } => {
                let idx = n.saturating_sub(1).min(values.len().saturating_sub(1));
                values.get(idx).copied().unwrap_or(f64::NAN)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        let rate = |name: &'static str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::InvalidParameter {
                    name,
                    value: v,
                    reason: "rate must be finite and positive",
                })
            }
        };
        match self {
            Schedule::Constant { p } => check_positive_probability("p", *p),
            Schedule::FixedArrivalRate { lambda_a, lambda_g } => {
                rate("lambda_a", *lambda_a)?;
                rate("lambda_g", *lambda_g)
            }
            Schedule::LinearArrivalRate { lambda_r, lambda_g } => {
                rate("lambda_r", *lambda_r)?;
                rate("lambda_g", *lambda_g)
            }
            Schedule::Harmonic => Ok(()),
            Schedule::Table { values } => {
                if values.is_empty() {
                    return Err(Error::InvalidConfig("empty p_n table".into()));
                }
                values
                    .iter()
                    .try_for_each(|&p| check_positive_probability("p_n", p))
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "count")]
pub enum Horizon {
    Events(u64),
    /// Fixed-size mode: stop after this many replacements.
    Replacements(u64),
    /// Growing mode: stop after this many arrivals.
    Arrivals(u64),
}

impl Horizon {
    pub fn count(&self) -> u64 {
        match *self {
            Horizon::Events(c) | Horizon::Replacements(c) | Horizon::Arrivals(c) => c,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum InitialState {
    /// `n0` values drawn i.i.d. from the arrival distribution.
    Iid,
    Explicit { values: Vec<f64> },
    Consensus { value: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sampling {
    /// A sample after every event.
    PerEvent,
    /// A sample just after every arrival (growing mode).
    AtArrivals,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub mode: Mode,
    pub n0: usize,
    /// Replacement probability (fixed-size mode).
    pub p: f64,
    /// Arrival probability schedule (growing mode).
    pub schedule: Schedule,
    pub dist: ArrivalDistribution,
    pub horizon: Horizon,
    pub replicates: usize,
    pub seed: u64,
    pub init: InitialState,
    pub sampling: Sampling,
    /// Keep a snapshot of all agent values after every event.
    pub record_values: bool,
}

impl SimConfig {
    pub fn fixed(n0: usize, p: f64, dist: ArrivalDistribution, events: u64) -> Self {
        Self {
            mode: Mode::FixedSize,
            n0,
            p,
            schedule: Schedule::constant(p.max(f64::MIN_POSITIVE)),
            dist,
            horizon: Horizon::Events(events),
            replicates: 1,
            seed: 0,
            init: InitialState::Iid,
            sampling: Sampling::PerEvent,
            record_values: false,
        }
    }

    pub fn growing(n0: usize, schedule: Schedule, dist: ArrivalDistribution, arrivals: u64) -> Self {
        Self {
            mode: Mode::Growing,
            n0,
            p: schedule.p_at(n0.max(1)),
            schedule,
            dist,
            horizon: Horizon::Arrivals(arrivals),
            replicates: 1,
            seed: 0,
            init: InitialState::Iid,
            sampling: Sampling::AtArrivals,
            record_values: false,
        }
    }

    pub fn with_replicates(mut self, replicates: usize) -> Self {
        self.replicates = replicates;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_init(mut self, init: InitialState) -> Self {
        if let InitialState::Explicit { values } = &init {
            self.n0 = values.len();
        }
        self.init = init;
        self
    }

    pub fn with_horizon(mut self, horizon: Horizon) -> Self {
        self.horizon = horizon;
        self
    }

    pub fn with_sampling(mut self, sampling: Sampling) -> Self {
        self.sampling = sampling;
        self
    }

    pub fn with_record_values(mut self, on: bool) -> Self {
        self.record_values = on;
        self
    }

    pub fn sigma2(&self) -> f64 {
        self.dist.sigma2()
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.horizon.count() < 1 {
            return bad("horizon must be at least 1".into());
        }
        if self.replicates < 1 {
            return bad("replicates must be at least 1".into());
        }
        if let InitialState::Explicit { values } = &self.init {
            if values.len() != self.n0 {
                return bad(format!(
                    "explicit initial state has {} values but n0 = {}",
                    values.len(),
                    self.n0
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return bad("explicit initial state contains non-finite values".into());
            }
        }
        match self.mode {
            Mode::FixedSize => {
                if self.n0 < 2 {
                    return bad(format!("fixed-size mode requires n0 >= 2, got {}", self.n0));
                }
                check_probability("p", self.p)?;
                if matches!(self.horizon, Horizon::Arrivals(_)) {
                    return bad("fixed-size mode has no arrivals; use an event or replacement horizon".into());
                }
                if matches!(self.horizon, Horizon::Replacements(_)) && self.p == 0.0 {
                    return bad("replacement horizon with p = 0 never terminates".into());
                }
            }
            Mode::Growing => {
                if self.n0 < 1 {
                    return bad("growing mode requires n0 >= 1".into());
                }
                self.schedule.validate()?;
                if !matches!(self.horizon, Horizon::Arrivals(_)) {
                    return bad("growing mode requires an arrival horizon".into());
                }
            }
        }
        Ok(())
    }
}
