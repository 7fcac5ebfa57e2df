//! Seeded Monte Carlo simulation of open gossip systems.

mod ensemble;
mod event;
mod rng;
mod run;

pub use ensemble::{run_ensemble, run_ensemble_with, EnsembleResult, Execution};
pub use event::{
    apply_event, apply_in_place, inter_arrival_gaps, sample_event_fixed, sample_event_growing, EventKind,
};
pub use rng::RngStream;
pub use run::{initial_state, run, run_fixed, run_growing};
