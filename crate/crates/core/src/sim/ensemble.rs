#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::rng::RngStream;
use super::run::run;
use crate::config::{Mode, Sampling, SimConfig};
use crate::error::{Error, Result};
use crate::stats::RunningStats;
use crate::trajectory::{Sample, Trajectory, TrajectoryKind};

/// Replicates per aggregation block. Blocks are reduced in index order, so
/// the result does not depend on the thread count.
const BLOCK: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Execution {
    Sequential,
    /// Blocks fan out over the rayon pool. Without the `parallel` feature
    /// this runs sequentially.
    #[default]
    Parallel,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleResult {
    pub mean_trajectory: Trajectory,
    pub stderr_trajectory: Trajectory,
    pub replicates: usize,
}

#[derive(Clone)]
struct SeriesStats {
    n: Vec<usize>,
    // t, sq_mean, mean_sq, variance, mean
    cols: Vec<[RunningStats; 5]>,
}

impl SeriesStats {
    fn from_first(traj: &Trajectory) -> Self {
        let mut s = SeriesStats {
            n: traj.samples.iter().map(|x| x.n).collect(),
            cols: vec![[RunningStats::default(); 5]; traj.len()],
        };
        s.push_unchecked(traj);
        s
    }

    fn push(&mut self, traj: &Trajectory) -> Result<()> {
        self.check_aligned(&traj.samples.iter().map(|s| s.n).collect::<Vec<_>>())?;
        self.push_unchecked(traj);
        Ok(())
    }

    fn push_unchecked(&mut self, traj: &Trajectory) {
        for (c, s) in self.cols.iter_mut().zip(&traj.samples) {
            c[0].push(s.t);
            c[1].push(s.sq_mean);
            c[2].push(s.mean_sq);
            c[3].push(s.variance);
            c[4].push(s.mean.unwrap_or(f64::NAN));
        }
    }

    fn check_aligned(&self, n: &[usize]) -> Result<()> {
        if self.n != n {
            return Err(Error::Misaligned(format!(
                "replicate sample grid differs ({} vs {} samples)",
                self.n.len(),
                n.len()
            )));
        }
        Ok(())
    }

    fn merge(&mut self, other: &SeriesStats) -> Result<()> {
        self.check_aligned(&other.n)?;
        for (a, b) in self.cols.iter_mut().zip(&other.cols) {
            for k in 0..5 {
                a[k].merge(&b[k]);
            }
        }
        Ok(())
    }
}

fn run_block(config: &SimConfig, base_seed: u64, block: usize) -> Result<SeriesStats> {
    let lo = block * BLOCK;
    let hi = (lo + BLOCK).min(config.replicates);
    let mut acc: Option<SeriesStats> = None;
    for r in lo..hi {
        let traj = run(config, RngStream::new(base_seed, r as u64))?;
        match acc.as_mut() {
            None => acc = Some(SeriesStats::from_first(&traj)),
            Some(a) => a.push(&traj)?,
        }
    }
    Ok(acc.expect("blocks are never empty"))
}

pub fn run_ensemble(config: &SimConfig, base_seed: u64) -> Result<EnsembleResult> {
    run_ensemble_with(config, base_seed, Execution::default())
}

/// Runs `config.replicates` independent replicates, replicate `r` on stream
/// `(base_seed, r)`, and returns the pointwise mean and standard error.
pub fn run_ensemble_with(config: &SimConfig, base_seed: u64, exec: Execution) -> Result<EnsembleResult> {
    config.validate()?;
    if config.replicates < 2 {
        return Err(Error::InvalidConfig(
            "an ensemble needs at least 2 replicates for a standard error".into(),
        ));
    }
    if config.mode == Mode::Growing && config.sampling == Sampling::PerEvent {
        return Err(Error::Misaligned(
            "per-event sampling in growing mode gives replicate-dependent grids; sample at arrivals".into(),
        ));
    }
    if config.mode == Mode::FixedSize && !matches!(config.horizon, crate::config::Horizon::Events(_)) {
        return Err(Error::Misaligned("ensembles in fixed-size mode need an event horizon".into()));
    }

    let blocks = config.replicates.div_ceil(BLOCK);
    let parts: Vec<SeriesStats> = match exec {
        Execution::Sequential => (0..blocks)
            .map(|b| run_block(config, base_seed, b))
            .collect::<Result<_>>()?,
        #[cfg(feature = "parallel")]
        Execution::Parallel => (0..blocks)
            .into_par_iter()
            .map(|b| run_block(config, base_seed, b))
            .collect::<Result<_>>()?,
        #[cfg(not(feature = "parallel"))]
        Execution::Parallel => (0..blocks)
            .map(|b| run_block(config, base_seed, b))
            .collect::<Result<_>>()?,
    };

    let mut parts = parts.into_iter();
    let mut total = parts.next().expect("at least one block");
    for p in parts {
        total.merge(&p)?;
    }
    Ok(summarize(&total, config.replicates))
}

fn summarize(stats: &SeriesStats, replicates: usize) -> EnsembleResult {
    let mut mean = Trajectory::new(TrajectoryKind::EmpiricalEnsembleMean);
    let mut se = Trajectory::new(TrajectoryKind::EmpiricalEnsembleStderr);
    for (n, c) in stats.n.iter().zip(&stats.cols) {
        mean.samples.push(Sample {
            t: c[0].mean(),
            n: *n,
            sq_mean: c[1].mean(),
            mean_sq: c[2].mean(),
            variance: c[3].mean(),
            mean: Some(c[4].mean()),
        });
        se.samples.push(Sample {
            t: c[0].mean(),
            n: *n,
            sq_mean: c[1].std_error(),
            mean_sq: c[2].std_error(),
            variance: c[3].std_error(),
            mean: Some(c[4].std_error()),
        });
    }
    EnsembleResult {
        mean_trajectory: mean,
        stderr_trajectory: se,
        replicates,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{InitialState, Schedule};
    use crate::dist::{ArrivalDistribution, DistKind};
    use crate::stats::RunningStats;

    #[test]
    fn needs_two_replicates() {
        let cfg = SimConfig::fixed(5, 0.1, ArrivalDistribution::unit_uniform(), 10).with_replicates(1);
        assert!(run_ensemble(&cfg, 0).is_err());
    }

    #[test]
    fn degenerate_runs_have_zero_spread() {
        let d = ArrivalDistribution::new(DistKind::DegenerateZero, 0.0).unwrap();
        let cfg = SimConfig::fixed(6, 0.3, d, 100)
            .with_init(InitialState::Consensus { value: 0.0 })
            .with_replicates(20);
        let e = run_ensemble(&cfg, 1).unwrap();
        assert!(e.mean_trajectory.samples.iter().all(|s| s.variance == 0.0));
        assert!(e.stderr_trajectory.samples.iter().all(|s| s.variance == 0.0));
    }

    #[test]
    fn matches_manual_aggregation() {
        let cfg = SimConfig::fixed(5, 0.2, ArrivalDistribution::unit_uniform(), 30).with_replicates(37);
        let e = run_ensemble_with(&cfg, 42, Execution::Sequential).unwrap();
        let runs: Vec<Trajectory> = (0..37).map(|r| run(&cfg, RngStream::new(42, r)).unwrap()).collect();
        for k in [0, 10, 30] {
            let s: RunningStats = runs.iter().map(|t| t.samples[k].variance).collect();
            assert!((e.mean_trajectory.samples[k].variance - s.mean()).abs() < 1e-15);
            assert!((e.stderr_trajectory.samples[k].variance - s.std_error()).abs() < 1e-15);
        }
    }

    #[test]
    fn parallel_equals_sequential() {
        let cfg = SimConfig::fixed(8, 0.1, ArrivalDistribution::unit_uniform(), 200).with_replicates(100);
        let a = run_ensemble_with(&cfg, 3, Execution::Sequential).unwrap();
        let b = run_ensemble_with(&cfg, 3, Execution::Parallel).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn growing_per_event_rejected() {
        let cfg = SimConfig::growing(1, Schedule::constant(0.5), ArrivalDistribution::unit_uniform(), 10)
            .with_sampling(Sampling::PerEvent)
            .with_replicates(4);
        assert!(matches!(run_ensemble(&cfg, 0), Err(Error::Misaligned(_))));
    }
}
