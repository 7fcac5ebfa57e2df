use rand::Rng;

use super::event::{apply_in_place, sample_event_fixed, sample_event_growing, EventKind};
use super::rng::RngStream;
use crate::config::{Horizon, InitialState, Mode, Sampling, SimConfig};
use crate::error::{Error, Result};
use crate::state::{empirical_summary, SystemState};
use crate::trajectory::{EventMark, MarkKind, Sample, Trajectory, TrajectoryKind};

pub fn initial_state<R: Rng + ?Sized>(config: &SimConfig, rng: &mut R) -> SystemState {
    let values = match &config.init {
        InitialState::Iid => (0..config.n0).map(|_| config.dist.sample(rng)).collect(),
        InitialState::Explicit { values } => values.clone(),
        InitialState::Consensus { value } => vec![*value; config.n0],
    };
    SystemState::new(values)
}

fn record(traj: &mut Trajectory, state: &SystemState, keep_values: bool) -> Result<()> {
    let (m, mean) = empirical_summary(state.values())?;
    if !(m.is_finite() && mean.is_finite()) {
        return Err(Error::NonFinite { t: state.time() });
    }
    traj.samples.push(Sample {
        t: state.time() as f64,
        n: state.len(),
        sq_mean: m.sq_mean,
        mean_sq: m.mean_sq,
        variance: m.variance(),
        mean: Some(mean),
    });
    if keep_values {
        traj.values.push(state.values().to_vec());
    }
    Ok(())
}

/// Fixed-size system: one sample after every event.
pub fn run_fixed(config: &SimConfig, stream: RngStream) -> Result<Trajectory> {
    config.validate()?;
    if config.mode != Mode::FixedSize {
        return Err(Error::InvalidConfig("run_fixed needs a fixed_size config".into()));
    }
    let mut rng = stream.rng();
    let mut state = initial_state(config, &mut rng);
    let mut traj = Trajectory::new(TrajectoryKind::EmpiricalSingle);
    if let Horizon::Events(c) = config.horizon {
        traj.samples.reserve(c as usize + 1);
    }
    record(&mut traj, &state, config.record_values)?;

    let mut replacements = 0u64;
    loop {
        let done = match config.horizon {
            Horizon::Events(c) => state.time() >= c,
            Horizon::Replacements(c) => replacements >= c,
            Horizon::Arrivals(_) => unreachable!("rejected by validate"),
        };
        if done {
            break;
        }
        let ev = sample_event_fixed(state.len(), config.p, &config.dist, &mut rng);
        let departed = apply_in_place(&mut state, &ev)?;
        if let EventKind::Replacement { value, .. } = ev {
            replacements += 1;
            traj.marks.push(EventMark {
                t: state.time(),
                kind: MarkKind::Replacement,
                departed,
                arrived: Some(value),
            });
        }
        record(&mut traj, &state, config.record_values)?;
    }
    Ok(traj)
}

/// Growing system: runs until `horizon` arrivals have happened. Samples are
/// taken just after each arrival, or after every event with
/// [`Sampling::PerEvent`]. The first sample is the initial state.
pub fn run_growing(config: &SimConfig, stream: RngStream) -> Result<Trajectory> {
    config.validate()?;
    if config.mode != Mode::Growing {
        return Err(Error::InvalidConfig("run_growing needs a growing config".into()));
    }
    let target = config.horizon.count();
    let mut rng = stream.rng();
    let mut state = initial_state(config, &mut rng);
    let mut traj = Trajectory::new(TrajectoryKind::EmpiricalSingle);
    if config.sampling == Sampling::AtArrivals {
        traj.samples.reserve(target as usize + 1);
    }
    record(&mut traj, &state, config.record_values)?;

    let mut arrivals = 0u64;
    while arrivals < target {
        let p_n = config.schedule.p_at(state.len());
        let ev = sample_event_growing(state.len(), p_n, &config.dist, &mut rng);
        apply_in_place(&mut state, &ev)?;
        let arrived = if let EventKind::Arrival { value } = ev {
            arrivals += 1;
            traj.marks.push(EventMark {
                t: state.time(),
                kind: MarkKind::Arrival,
                departed: None,
                arrived: Some(value),
            });
            true
        } else {
            false
        };
        if arrived || config.sampling == Sampling::PerEvent {
            record(&mut traj, &state, config.record_values)?;
        }
    }
    Ok(traj)
}

/// Dispatches on `config.mode`.
pub fn run(config: &SimConfig, stream: RngStream) -> Result<Trajectory> {
    match config.mode {
        Mode::FixedSize => run_fixed(config, stream),
        Mode::Growing => run_growing(config, stream),
    }
}
