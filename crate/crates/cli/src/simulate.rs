use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Subcommand};
use opengossip::analytic::{
    fixed_point, fixed_trajectory, growing_limit, growing_moment_trajectory, growing_trajectory,
    spectral_radius_regime, spectrum, GrowingRecursionState,
};
use opengossip::io::{write_ensemble_csv, write_single_csv, write_values_csv};
use opengossip::report::{
    compare, AnalyticSummary, CompareOptions, EmpiricalSummary, RunReport, DEFAULT_K, DEFAULT_MIN_FRACTION,
};
use opengossip::sim::{run_ensemble_with, run_fixed, run_growing, Execution, RngStream};
use opengossip::{
    empirical_moments, ArrivalDistribution, DistKind, Horizon, InitialState, MomentVector, Sampling, Schedule,
    SimConfig, Trajectory,
};
use serde_json::json;

use crate::output::{sink, write_report};
use crate::parse;

const UNIFORM_SIGMA2: f64 = 1.0 / 12.0;
const DEFAULT_EVENTS: u64 = 2000;
const DEFAULT_COMPARE_REPLICATES: usize = 1000;

#[derive(Subcommand)]
pub enum SimulateCmd {
    /// Fixed-size system: each event is a replacement with probability p,
    /// a gossip otherwise.
    Fixed(FixedArgs),
    /// Growing system: each event is an arrival with probability p_n, a
    /// gossip otherwise.
    Growing(GrowingArgs),
}

#[derive(Subcommand)]
pub enum CompareCmd {
    Fixed {
        #[command(flatten)]
        sim: FixedArgs,
        #[command(flatten)]
        cmp: CompareArgs,
    },
    Growing {
        #[command(flatten)]
        sim: GrowingArgs,
        #[command(flatten)]
        cmp: CompareArgs,
    },
}

#[derive(Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// Arrival distribution: uniform, gaussian, two_point or zero.
    #[arg(long, default_value = "uniform")]
    dist: DistKind,
    /// Number of independent realizations; 1 writes the realization itself.
    #[arg(long)]
    replicates: Option<usize>,
    #[arg(long, env = "OPEN_GOSSIP_SEED", default_value_t = 0)]
    seed: u64,
    /// Initial agents: `iid`, `consensus:C` or `values:X1,X2,...`.
    #[arg(long, default_value = "iid", value_parser = parse::init, allow_hyphen_values = true)]
    init: InitialState,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-agent values of a single realization, one row per agent and event.
    #[arg(long)]
    values_out: Option<PathBuf>,
    /// JSON report path. Without it the report goes to stdout when the CSV
    /// has its own file, and is skipped otherwise.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Append the analytic expectation as extra CSV columns.
    #[arg(long)]
    overlay: bool,
    /// Run replicates on one thread.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
#[command(group(ArgGroup::new("fixed_horizon").args(["events", "replacements"])))]
pub struct FixedArgs {
    /// Number of agents; implied by `--init values:...`.
    #[arg(long)]
    n: Option<usize>,
    /// Replacement probability per event.
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    /// Stop after this many events (default 2000).
    #[arg(long)]
    events: Option<u64>,
    /// Stop after this many replacements (single realizations only).
    #[arg(long)]
    replacements: Option<u64>,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
#[command(group(ArgGroup::new("arrival_law").required(true).args(["p", "schedule"])))]
pub struct GrowingArgs {
    /// Initial number of agents; implied by `--init values:...`.
    #[arg(long, default_value_t = 1)]
    n0: usize,
    /// Constant arrival probability.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Size-dependent arrival probability, e.g. `fixed-rate:1,1` or `harmonic`.
    #[arg(long, value_parser = parse::schedule)]
    schedule: Option<Schedule>,
    #[arg(long, default_value_t = 1000)]
    arrivals: u64,
    /// Sample after every event instead of after every arrival (single
    /// realizations only).
    #[arg(long)]
    per_event: bool,
    #[command(flatten)]
    common: CommonArgs,
}

#[derive(Args)]
pub struct CompareArgs {
    /// Tolerance in standard errors.
    #[arg(long, default_value_t = DEFAULT_K)]
    k: f64,
    /// Fraction of points that must fall within tolerance.
    #[arg(long, default_value_t = DEFAULT_MIN_FRACTION)]
    min_fraction: f64,
    /// Ignore points below this system size.
    #[arg(long, default_value_t = 0)]
    min_n: usize,
    /// Evaluate the analytic side at this probability instead of the
    /// simulated one.
    #[arg(long, allow_negative_numbers = true)]
    analytic_p: Option<f64>,
}

fn distribution(c: &CommonArgs) -> Result<ArrivalDistribution> {
    Ok(ArrivalDistribution::new(c.dist, c.sigma2)?)
}

fn execution(c: &CommonArgs) -> Execution {
    if c.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    }
}

/// Expected moments of the starting configuration.
fn start_moments(cfg: &SimConfig) -> Result<MomentVector> {
    Ok(match &cfg.init {
        InitialState::Iid => MomentVector::new(cfg.sigma2() / cfg.n0 as f64, cfg.sigma2()),
        InitialState::Explicit { values } => empirical_moments(values)?,
        InitialState::Consensus { value } => MomentVector::consensus(*value),
    })
}

fn fixed_config(a: &FixedArgs, default_replicates: usize) -> Result<SimConfig> {
    let c = &a.common;
    let n = match (&c.init, a.n) {
        (InitialState::Explicit { values }, Some(n)) if n != values.len() => {
            bail!("--n {n} disagrees with the {} initial values given", values.len())
        }
        (InitialState::Explicit { values }, _) => values.len(),
        (_, Some(n)) => n,
        (_, None) => bail!("--n is required unless --init values:... is given"),
    };
    let horizon = match (a.events, a.replacements) {
        (_, Some(r)) => Horizon::Replacements(r),
        (e, None) => Horizon::Events(e.unwrap_or(DEFAULT_EVENTS)),
    };
    let cfg = SimConfig::fixed(n, a.p, distribution(c)?, 0)
        .with_horizon(horizon)
        .with_init(c.init.clone())
        .with_replicates(c.replicates.unwrap_or(default_replicates))
        .with_seed(c.seed);
    cfg.validate()?;
    Ok(cfg)
}

fn growing_config(a: &GrowingArgs, default_replicates: usize) -> Result<SimConfig> {
    let c = &a.common;
    let sched = match (a.p, &a.schedule) {
        (Some(p), None) => Schedule::constant(p),
        (None, Some(s)) => s.clone(),
        _ => unreachable!("clap enforces exactly one of --p and --schedule"),
    };
    let sampling = if a.per_event {
        Sampling::PerEvent
    } else {
        Sampling::AtArrivals
    };
    let cfg = SimConfig::growing(a.n0, sched, distribution(c)?, a.arrivals)
        .with_init(c.init.clone())
        .with_sampling(sampling)
        .with_replicates(c.replicates.unwrap_or(default_replicates))
        .with_seed(c.seed);
    cfg.validate()?;
    Ok(cfg)
}

/// Mixed-event recursion over `steps` events at replacement probability `p`.
fn fixed_expectation(cfg: &SimConfig, p: f64, steps: u64) -> Result<Trajectory> {
    Ok(fixed_trajectory(cfg.n0, p, cfg.sigma2(), start_moments(cfg)?, steps)?)
}

/// Arrival-by-arrival expectation under `sched`.
fn growing_expectation(cfg: &SimConfig, sched: &Schedule) -> Result<Trajectory> {
    let n_max = cfg.n0 + cfg.horizon.count() as usize;
    let s2 = cfg.sigma2();
    Ok(match cfg.init {
        InitialState::Iid => growing_trajectory(GrowingRecursionState::iid(cfg.n0, s2)?, sched, s2, n_max)?,
        _ => growing_moment_trajectory(cfg.n0, start_moments(cfg)?, sched, s2, n_max)?,
    })
}

fn fixed_summary(n: usize, p: f64, sigma2: f64, expectation: Option<&Trajectory>) -> Result<AnalyticSummary> {
    let fp = if p > 0.0 { Some(fixed_point(n, p, sigma2)?) } else { None };
    Ok(AnalyticSummary {
        fixed_point: fp,
        equilibrium_variance: fp.map(|x| x.variance()),
        spectrum: Some(spectrum(n, p)?),
        regime: Some(spectral_radius_regime(n, p)?),
        final_sample: expectation.and_then(|t| t.last().copied()),
        ..Default::default()
    })
}

fn growing_summary(sched: &Schedule, sigma2: f64, expectation: Option<&Trajectory>) -> Result<AnalyticSummary> {
    let mut summary = AnalyticSummary {
        final_sample: expectation.and_then(|t| t.last().copied()),
        ..Default::default()
    };
    if let Schedule::Constant { p } = sched {
        summary.limits.insert("variance_limit".into(), growing_limit(*p, sigma2)?);
    }
    Ok(summary)
}

/// Where the report goes when `--report` is absent: stdout if the CSV has
/// its own file, nowhere otherwise.
fn emit_report(report: &RunReport, c: &CommonArgs) -> Result<()> {
    match (&c.report, &c.out) {
        (Some(path), _) => write_report(report, Some(path)),
        (None, Some(_)) => write_report(report, None),
        (None, None) => Ok(()),
    }
}

fn write_single(traj: &Trajectory, overlay: Option<&Trajectory>, c: &CommonArgs) -> Result<()> {
    write_single_csv(sink(c.out.as_deref())?, traj, overlay)?;
    if let Some(path) = &c.values_out {
        write_values_csv(sink(Some(path))?, traj)?;
    }
    Ok(())
}

fn check_single_only(cfg: &SimConfig, c: &CommonArgs) -> Result<()> {
    if cfg.replicates > 1 && c.values_out.is_some() {
        bail!("--values-out needs a single realization (--replicates 1)");
    }
    Ok(())
}

pub fn run_simulate(cmd: SimulateCmd) -> Result<()> {
    match cmd {
        SimulateCmd::Fixed(a) => {
            let c = &a.common;
            let cfg = fixed_config(&a, 1)?.with_record_values(c.values_out.is_some());
            check_single_only(&cfg, c)?;
            let mut report = RunReport::new("simulate fixed", serde_json::to_value(&cfg)?);
            let expectation;
            if cfg.replicates == 1 {
                let traj = run_fixed(&cfg, RngStream::new(cfg.seed, 0))?;
                // One sample per event, so the realization's length fixes the
                // number of steps to iterate.
                expectation = fixed_expectation(&cfg, cfg.p, traj.len() as u64 - 1)?;
                write_single(&traj, c.overlay.then_some(&expectation), c)?;
                report.empirical = EmpiricalSummary::from_single(&traj);
            } else {
                let ens = run_ensemble_with(&cfg, cfg.seed, execution(c))?;
                expectation = fixed_expectation(&cfg, cfg.p, cfg.horizon.count())?;
                write_ensemble_csv(sink(c.out.as_deref())?, &ens, c.overlay.then_some(&expectation))?;
                report.empirical = EmpiricalSummary::from_ensemble(&ens);
            }
            report.analytic = Some(fixed_summary(cfg.n0, cfg.p, cfg.sigma2(), Some(&expectation))?);
            emit_report(&report, c)
        }
        SimulateCmd::Growing(a) => {
            let c = &a.common;
            let cfg = growing_config(&a, 1)?.with_record_values(c.values_out.is_some());
            check_single_only(&cfg, c)?;
            if a.per_event && c.overlay {
                bail!("--overlay is aligned by arrival and cannot be combined with --per-event");
            }
            let mut report = RunReport::new("simulate growing", serde_json::to_value(&cfg)?);
            let expectation = growing_expectation(&cfg, &cfg.schedule)?;
            if cfg.replicates == 1 {
                let traj = run_growing(&cfg, RngStream::new(cfg.seed, 0))?;
                write_single(&traj, c.overlay.then_some(&expectation), c)?;
                report.empirical = EmpiricalSummary::from_single(&traj);
            } else {
                let ens = run_ensemble_with(&cfg, cfg.seed, execution(c))?;
                write_ensemble_csv(sink(c.out.as_deref())?, &ens, c.overlay.then_some(&expectation))?;
                report.empirical = EmpiricalSummary::from_ensemble(&ens);
            }
            report.analytic = Some(growing_summary(&cfg.schedule, cfg.sigma2(), Some(&expectation))?);
            emit_report(&report, c)
        }
    }
}

fn compare_options(cmp: &CompareArgs) -> Result<CompareOptions> {
    if !(cmp.k.is_finite() && cmp.k > 0.0) {
        bail!("--k must be finite and positive, got {}", cmp.k);
    }
    if !(0.0..=1.0).contains(&cmp.min_fraction) {
        bail!("--min-fraction must lie in [0, 1], got {}", cmp.min_fraction);
    }
    Ok(CompareOptions {
        k: cmp.k,
        min_fraction: cmp.min_fraction,
        min_n: cmp.min_n,
    })
}

/// Returns whether every verdict passed.
pub fn run_compare(cmd: CompareCmd) -> Result<bool> {
    let (report, c) = match &cmd {
        CompareCmd::Fixed { sim, cmp } => {
            let opts = compare_options(cmp)?;
            let cfg = fixed_config(sim, DEFAULT_COMPARE_REPLICATES)?;
            let ens = run_ensemble_with(&cfg, cfg.seed, execution(&sim.common))?;
            let p = cmp.analytic_p.unwrap_or(cfg.p);
            let expectation = fixed_expectation(&cfg, p, cfg.horizon.count())?;
            let mut report = RunReport::new(
                "compare fixed",
                json!({ "sim": cfg, "analytic_p": p, "k": opts.k, "min_fraction": opts.min_fraction, "min_n": opts.min_n }),
            );
            report.verdicts = compare(&ens, &expectation, opts)?;
            report.analytic = Some(fixed_summary(cfg.n0, p, cfg.sigma2(), Some(&expectation))?);
            report.empirical = EmpiricalSummary::from_ensemble(&ens);
            if sim.common.out.is_some() {
                write_ensemble_csv(sink(sim.common.out.as_deref())?, &ens, Some(&expectation))?;
            }
            (report, &sim.common)
        }
        CompareCmd::Growing { sim, cmp } => {
            let opts = compare_options(cmp)?;
            let cfg = growing_config(sim, DEFAULT_COMPARE_REPLICATES)?;
            let ens = run_ensemble_with(&cfg, cfg.seed, execution(&sim.common))?;
            let sched = match cmp.analytic_p {
                Some(p) => Schedule::constant(p),
                None => cfg.schedule.clone(),
            };
            sched.validate().context("--analytic-p")?;
            let expectation = growing_expectation(&cfg, &sched)?;
            let mut report = RunReport::new(
                "compare growing",
                json!({ "sim": cfg, "analytic_schedule": sched, "k": opts.k, "min_fraction": opts.min_fraction, "min_n": opts.min_n }),
            );
            report.verdicts = compare(&ens, &expectation, opts)?;
            report.analytic = Some(growing_summary(&sched, cfg.sigma2(), Some(&expectation))?);
            report.empirical = EmpiricalSummary::from_ensemble(&ens);
            if sim.common.out.is_some() {
                write_ensemble_csv(sink(sim.common.out.as_deref())?, &ens, Some(&expectation))?;
            }
            (report, &sim.common)
        }
    };
    for v in &report.verdicts {
        eprintln!(
            "{} {}: {}/{} within {} se, max z {:.2}",
            if v.pass { "PASS" } else { "FAIL" },
            v.name,
            v.within,
            v.points,
            v.k,
            v.max_z
        );
    }
    write_report(&report, c.report.as_deref())?;
    Ok(report.all_pass())
}
