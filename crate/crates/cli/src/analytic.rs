use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{ArgGroup, Args, Subcommand};
use opengossip::analytic::{
    appendix_bound, closed_system_baseline, closed_system_baseline_limit, fixed_point, fixed_trajectory,
    growing_limit, growing_step, growing_trajectory, q_from_p, spectral_radius_regime, spectrum,
    GrowingRecursionState,
};
use opengossip::io::{write_analytic_csv, write_bound_csv};
use opengossip::report::{AnalyticSummary, RunReport};
use opengossip::{MomentVector, Schedule};
use serde_json::json;

use crate::output::{sink, write_report};
use crate::parse;

const UNIFORM_SIGMA2: f64 = 1.0 / 12.0;

#[derive(Subcommand)]
pub enum AnalyticCmd {
    /// Stationary expected moments of the fixed-size system.
    FixedPoint(SizeArgs),
    /// Eigenvalues and eigenvectors of the mixed-event matrix.
    Spectrum(SpectrumArgs),
    /// Iterate the mixed-event map from X0.
    Trajectory(TrajectoryArgs),
    /// Expected variance of a growing system, arrival by arrival.
    Growing(GrowingArgs),
    /// The growing-system upper bound on n·Var against the recursion.
    Bound(BoundArgs),
    /// Closed-system baseline σ² e^{-K}.
    Baseline(BaselineArgs),
}

#[derive(Args)]
pub struct SizeArgs {
    #[arg(long)]
    n: usize,
    /// Replacement probability per event.
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// JSON report path (stdout when omitted).
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
pub struct SpectrumArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long)]
    report: Option<PathBuf>,
}

#[derive(Args)]
pub struct TrajectoryArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// Starting moments `SQ_MEAN,MEAN_SQ`; defaults to i.i.d. agents,
    /// `σ²/n, σ²`.
    #[arg(long, value_parser = parse::moments, allow_hyphen_values = true)]
    x0: Option<MomentVector>,
    #[arg(long, default_value_t = 1000)]
    steps: u64,
    /// CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[command(group(ArgGroup::new("arrival_law").required(true).args(["p", "schedule"])))]
pub struct GrowingArgs {
    /// Constant arrival probability.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Size-dependent arrival probability, e.g. `fixed-rate:1,1` or `harmonic`.
    #[arg(long, value_parser = parse::schedule)]
    schedule: Option<Schedule>,
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// Initial number of i.i.d. agents.
    #[arg(long, default_value_t = 1)]
    n0: usize,
    #[arg(long)]
    n_max: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BoundArgs {
    /// Upper bound on every arrival probability from `n0` on.
    #[arg(long, allow_negative_numbers = true)]
    p: f64,
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// Size from which the bound is anchored.
    #[arg(long, default_value_t = 2)]
    n0: usize,
    #[arg(long)]
    n_max: usize,
    /// Emit every `every`-th size only.
    #[arg(long, default_value_t = 1)]
    every: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct BaselineArgs {
    /// Gossips per agent after assembly.
    #[arg(long, allow_negative_numbers = true)]
    k: f64,
    #[arg(long, default_value_t = UNIFORM_SIGMA2, allow_negative_numbers = true)]
    sigma2: f64,
    /// Also evaluate the finite-size baseline at this size.
    #[arg(long)]
    n: Option<usize>,
    /// Also report the open-system limit pσ² and the ratio of the two.
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    #[arg(long)]
    report: Option<PathBuf>,
}

pub fn run(cmd: AnalyticCmd) -> Result<()> {
    match cmd {
        AnalyticCmd::FixedPoint(a) => {
            let x = fixed_point(a.n, a.p, a.sigma2)?;
            let mut report = RunReport::new(
                "analytic fixed-point",
                json!({ "n": a.n, "p": a.p, "sigma2": a.sigma2 }),
            );
            report.analytic = Some(AnalyticSummary {
                fixed_point: Some(x),
                equilibrium_variance: Some(x.variance()),
                spectrum: Some(spectrum(a.n, a.p)?),
                regime: Some(spectral_radius_regime(a.n, a.p)?),
                ..Default::default()
            });
            write_report(&report, a.report.as_deref())
        }
        AnalyticCmd::Spectrum(a) => {
            let mut report = RunReport::new("analytic spectrum", json!({ "n": a.n, "p": a.p }));
            report.analytic = Some(AnalyticSummary {
                spectrum: Some(spectrum(a.n, a.p)?),
                regime: Some(spectral_radius_regime(a.n, a.p)?),
                ..Default::default()
            });
            write_report(&report, a.report.as_deref())
        }
        AnalyticCmd::Trajectory(a) => {
            let x0 = a.x0.unwrap_or(MomentVector::new(a.sigma2 / a.n as f64, a.sigma2));
            let traj = fixed_trajectory(a.n, a.p, a.sigma2, x0, a.steps)?;
            write_analytic_csv(sink(a.out.as_deref())?, &traj, |_| a.p, a.sigma2)?;
            Ok(())
        }
        AnalyticCmd::Growing(a) => {
            let sched = match (a.p, a.schedule) {
                (Some(p), None) => Schedule::constant(p),
                (None, Some(s)) => s,
                _ => unreachable!("clap enforces exactly one of --p and --schedule"),
            };
            sched.validate()?;
            if a.n_max < a.n0 {
                bail!("--n-max ({}) must be at least --n0 ({})", a.n_max, a.n0);
            }
            let start = GrowingRecursionState::iid(a.n0, a.sigma2)?;
            let traj = growing_trajectory(start, &sched, a.sigma2, a.n_max)?;
            write_analytic_csv(sink(a.out.as_deref())?, &traj, |n| sched.p_at(n), a.sigma2)?;
            Ok(())
        }
        AnalyticCmd::Bound(a) => {
            Schedule::constant(a.p).validate()?;
            let q = q_from_p(a.p);
            if a.every == 0 {
                bail!("--every must be positive");
            }
            if a.n_max <= a.n0 {
                bail!("--n-max ({}) must exceed --n0 ({})", a.n_max, a.n0);
            }
            // Validates q > 0 and n0 >= 2 before iterating.
            appendix_bound(a.n0, a.n0 + 1, q, 0.0, a.sigma2)?;
            let mut s = GrowingRecursionState::single_agent(a.sigma2);
            while s.n < a.n0 {
                s = growing_step(s, a.p, a.sigma2)?;
            }
            let w_n0 = s.w_n;
            let mut rows = Vec::new();
            while s.n < a.n_max {
                s = growing_step(s, a.p, a.sigma2)?;
                if (s.n - a.n0).is_multiple_of(a.every) || s.n == a.n_max {
                    rows.push((s.n, s.w_n, appendix_bound(a.n0, s.n, q, w_n0, a.sigma2)?));
                }
            }
            write_bound_csv(sink(a.out.as_deref())?, a.p, a.sigma2, &rows)?;
            Ok(())
        }
        AnalyticCmd::Baseline(a) => {
            if !(a.k.is_finite() && a.k >= 0.0) {
                bail!("--k must be finite and non-negative, got {}", a.k);
            }
            if !(a.sigma2.is_finite() && a.sigma2 >= 0.0) {
                bail!("--sigma2 must be finite and non-negative, got {}", a.sigma2);
            }
            let mut limits = std::collections::BTreeMap::new();
            let lim = closed_system_baseline_limit(a.k, a.sigma2);
            limits.insert("closed_baseline_limit".to_string(), lim);
            if let Some(n) = a.n {
                limits.insert("closed_baseline".to_string(), closed_system_baseline(n, a.k, a.sigma2)?);
            }
            if let Some(p) = a.p {
                let open = growing_limit(p, a.sigma2)?;
                limits.insert("open_limit".to_string(), open);
                if open > 0.0 {
                    limits.insert("closed_over_open".to_string(), lim / open);
                }
            }
            let mut config = json!({ "k": a.k, "sigma2": a.sigma2 });
            if let Some(n) = a.n {
                config["n"] = json!(n);
            }
            if let Some(p) = a.p {
                config["p"] = json!(p);
            }
            let mut report = RunReport::new("analytic baseline", config);
            report.analytic = Some(AnalyticSummary {
                limits,
                ..Default::default()
            });
            write_report(&report, a.report.as_deref())
        }
    }
}
