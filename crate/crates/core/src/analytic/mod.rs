//! Closed-form expected-moment maps.
//!
//! Every event type acts on the expectation of the moment vector through an
//! affine map `E X' = A E X + b`. The maps here are exact; the test suite
//! checks them against [`crate::oracle`] and against each other.

mod growing;
mod maps;
mod spectrum;

pub use growing::{
    appendix_bound, closed_system_baseline, closed_system_baseline_limit, gamma, growing_limit,
    growing_moment_trajectory, growing_step, growing_trajectory, q_from_p, GrowingRecursionState,
};
pub use maps::{
    arrival_map, departure_map, fixed_point, fixed_trajectory, gossip_map, inter_arrival_map,
    mixed_event_map, replacement_map,
};
pub use spectrum::{spectral_radius_regime, spectrum, Regime, Spectrum2};
