//! Expected-moment dynamics and Monte Carlo simulation of open gossip systems.
//!
//! Agents hold real values and repeatedly average with a random partner,
//! while the population changes through arrivals, departures and
//! replacements. The expectation of the moment vector
//! `X = (x̄², mean of x²)` evolves under small affine maps; [`analytic`]
//! holds those maps in closed form, [`oracle`] recomputes them by exhaustive
//! enumeration on small systems and [`sim`] estimates them by seeded
//! ensembles.

pub mod analytic;
pub mod config;
pub mod dist;
pub mod error;
pub mod io;
pub mod moments;
pub mod oracle;
pub mod report;
pub mod sim;
pub mod state;
pub mod stats;
pub mod trajectory;

pub use config::{Horizon, InitialState, Mode, Sampling, Schedule, SimConfig};
pub use dist::{ArrivalDistribution, DistKind};
pub use error::{Error, Result};
pub use moments::{AffineMap2, MomentVector};
pub use state::{empirical_moments, empirical_summary, SystemState};
pub use trajectory::{EventMark, MarkKind, Sample, Trajectory, TrajectoryKind};
