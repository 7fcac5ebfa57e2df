use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dist::ArrivalDistribution;
use crate::error::Result;
use crate::state::SystemState;

/// A single event. Agent indices are 0-based slots in the current state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum EventKind {
    Gossip { i: usize, j: usize },
    Departure { i: usize },
    Arrival { value: f64 },
    Replacement { i: usize, value: f64 },
}

/// Applies `ev` to `state`, returning the value of a departing agent.
pub fn apply_in_place(state: &mut SystemState, ev: &EventKind) -> Result<Option<f64>> {
    match *ev {
        EventKind::Gossip { i, j } => state.gossip(i, j).map(|_| None),
        EventKind::Departure { i } => state.depart(i).map(Some),
        EventKind::Arrival { value } => {
            state.arrive(value);
            Ok(None)
        }
        EventKind::Replacement { i, value } => state.replace(i, value).map(Some),
    }
}

pub fn apply_event(state: &SystemState, ev: &EventKind) -> Result<SystemState> {
    let mut next = state.clone();
    apply_in_place(&mut next, ev)?;
    Ok(next)
}

fn gossip_pair<R: Rng + ?Sized>(n: usize, rng: &mut R) -> EventKind {
    // Ordered pair with replacement; i == j is kept and acts as a no-op.
    EventKind::Gossip {
        i: rng.random_range(0..n),
        j: rng.random_range(0..n),
    }
}

/// Replacement with probability `p`, otherwise a gossip.
pub fn sample_event_fixed<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    dist: &ArrivalDistribution,
    rng: &mut R,
) -> EventKind {
    if rng.random::<f64>() < p {
        EventKind::Replacement {
            i: rng.random_range(0..n),
            value: dist.sample(rng),
        }
    } else {
        gossip_pair(n, rng)
    }
}

/// Arrival with probability `p_n`, otherwise a gossip.
pub fn sample_event_growing<R: Rng + ?Sized>(
    n: usize,
    p_n: f64,
    dist: &ArrivalDistribution,
    rng: &mut R,
) -> EventKind {
    if rng.random::<f64>() < p_n {
        EventKind::Arrival {
            value: dist.sample(rng),
        }
    } else {
        gossip_pair(n, rng)
    }
}

/// Gossip counts between `gaps + 1` consecutive arrivals, drawn from the
/// growing-mode event sampler at constant size `n` and probability `p`.
pub fn inter_arrival_gaps<R: Rng + ?Sized>(
    n: usize,
    p: f64,
    dist: &ArrivalDistribution,
    gaps: usize,
    rng: &mut R,
) -> Vec<u64> {
    let mut out = Vec::with_capacity(gaps);
    let mut run = 0u64;
    while out.len() < gaps {
        match sample_event_growing(n, p, dist, rng) {
            EventKind::Arrival { .. } => {
                out.push(run);
                run = 0;
            }
            _ => run += 1,
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;
    use crate::sim::RngStream;

    #[test]
    fn gossip_midpoint() {
        let s = SystemState::new(vec![0.0, 1.0]);
        let out = apply_event(&s, &EventKind::Gossip { i: 0, j: 1 }).unwrap();
        assert_eq!(out.values(), &[0.5, 0.5]);
    }

    #[test]
    fn self_gossip_is_identity() {
        let s = SystemState::new(vec![0.1, 0.7, -3.3]);
        for i in 0..3 {
            let out = apply_event(&s, &EventKind::Gossip { i, j: i }).unwrap();
            assert_eq!(out.values(), s.values());
            for (a, b) in out.values().iter().zip(s.values()) {
                assert_eq!(a.to_bits(), b.to_bits());
            }
        }
    }

    #[test]
    fn replacement_as_multiset() {
        let s = SystemState::new(vec![0.0, 1.0]);
        let out = apply_event(&s, &EventKind::Replacement { i: 0, value: 0.3 }).unwrap();
        let mut v = out.values().to_vec();
        v.sort_by(f64::total_cmp);
        assert_eq!(v, vec![0.3, 1.0]);
        assert_eq!(out.len(), 2);
    }

    #[test]
    fn arrival_and_departure() {
        let s = SystemState::new(vec![2.0]);
        let s = apply_event(&s, &EventKind::Arrival { value: -1.0 }).unwrap();
        assert_eq!(s.values(), &[2.0, -1.0]);
        assert_eq!(s.next_label(), 2);
        let s = apply_event(&s, &EventKind::Departure { i: 0 }).unwrap();
        assert_eq!(s.values(), &[-1.0]);
        let s = apply_event(&s, &EventKind::Departure { i: 0 }).unwrap();
        assert!(s.is_empty());
        assert_eq!(apply_event(&s, &EventKind::Departure { i: 0 }), Err(Error::EmptySystem));
    }

    #[test]
    fn invalid_index() {
        let s = SystemState::new(vec![0.0, 1.0]);
        assert!(apply_event(&s, &EventKind::Gossip { i: 0, j: 2 }).is_err());
        assert!(apply_event(&s, &EventKind::Replacement { i: 5, value: 0.0 }).is_err());
    }

    #[test]
    fn fixed_sampler_extremes() {
        let d = ArrivalDistribution::unit_uniform();
        let mut rng = RngStream::new(1, 0).rng();
        for _ in 0..1000 {
            assert!(matches!(sample_event_fixed(5, 0.0, &d, &mut rng), EventKind::Gossip { .. }));
            assert!(matches!(
                sample_event_fixed(5, 1.0, &d, &mut rng),
                EventKind::Replacement { .. }
            ));
        }
    }

    #[test]
    fn fixed_sampler_frequency() {
        let d = ArrivalDistribution::unit_uniform();
        let mut rng = RngStream::new(2, 0).rng();
        let draws = 1_000_000;
        let p = 0.05;
        let hits = (0..draws)
            .filter(|_| matches!(sample_event_fixed(25, p, &d, &mut rng), EventKind::Replacement { .. }))
            .count();
        let freq = hits as f64 / draws as f64;
        let sigma = (p * (1.0 - p) / draws as f64).sqrt();
        assert!((freq - p).abs() < 3.0 * sigma, "freq {freq}");
    }

    #[test]
    fn growing_sampler_always_arrives_at_one() {
        let d = ArrivalDistribution::unit_uniform();
        let mut rng = RngStream::new(3, 0).rng();
        let gaps = inter_arrival_gaps(4, 1.0, &d, 1000, &mut rng);
        assert!(gaps.iter().all(|&k| k == 0));
    }

    #[test]
    fn geometric_gap_mean_and_mass_at_zero() {
        let d = ArrivalDistribution::unit_uniform();
        let mut rng = RngStream::new(4, 0).rng();
        let gaps = inter_arrival_gaps(10, 0.5, &d, 100_000, &mut rng);
        let mean = gaps.iter().sum::<u64>() as f64 / gaps.len() as f64;
        // Var K = (1-p)/p² = 2.
        let se = (2.0 / gaps.len() as f64).sqrt();
        assert!((mean - 1.0).abs() < 3.0 * se, "mean {mean}");

        let gaps = inter_arrival_gaps(10, 0.2, &d, 100_000, &mut rng);
        let zero = gaps.iter().filter(|&&k| k == 0).count() as f64 / gaps.len() as f64;
        let sigma = (0.2 * 0.8 / gaps.len() as f64).sqrt();
        assert!((zero - 0.2).abs() < 3.0 * sigma, "P(K=0) {zero}");
    }
}
