use serde::{Deserialize, Serialize};

use super::maps::{arrival_map, inter_arrival_map};
use crate::config::Schedule;
use crate::error::{check_positive_probability, check_sigma2, Error, Result};
use crate::moments::MomentVector;
use crate::trajectory::{Sample, Trajectory, TrajectoryKind};

/// Contraction of the expected variance over the gossips that separate two
/// arrivals at size `n` with arrival probability `p`.
pub fn gamma(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    nf / (nf - 1.0 + 1.0 / p)
}

/// `q = 1/p - 1`, the expected number of gossips between arrivals.
pub fn q_from_p(p: f64) -> f64 {
    1.0 / p - 1.0
}

/// Expected moments just after the arrival that brought the size to `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GrowingRecursionState {
    pub n: usize,
    pub var_n: f64,
    pub sq_mean_n: f64,
    /// `n * var_n`.
    pub w_n: f64,
}

impl GrowingRecursionState {
    /// A lone agent drawn from the arrival distribution.
    pub fn single_agent(sigma2: f64) -> Self {
        Self {
            n: 1,
            var_n: 0.0,
            sq_mean_n: sigma2,
            w_n: 0.0,
        }
    }

    /// `n0` agents drawn i.i.d. from the arrival distribution.
    pub fn iid(n0: usize, sigma2: f64) -> Result<Self> {
        if n0 < 1 {
            return Err(Error::InvalidSize {
                n: n0,
                reason: "growing recursion starts from at least one agent",
            });
        }
        let nf = n0 as f64;
        let w = (nf - 1.0) * sigma2;
        Ok(Self {
            n: n0,
            var_n: w / nf,
            sq_mean_n: sigma2 / nf,
            w_n: w,
        })
    }
}

/// Advance from `n` to `n + 1` agents: a geometric run of gossips with
/// arrival probability `p_n`, then the arrival.
pub fn growing_step(state: GrowingRecursionState, p_n: f64, sigma2: f64) -> Result<GrowingRecursionState> {
    check_positive_probability("p_n", p_n)?;
    check_sigma2(sigma2)?;
    if state.n < 1 {
        return Err(Error::InvalidSize {
            n: state.n,
            reason: "growing recursion needs at least one agent",
        });
    }
    let g = gamma(state.n, p_n);
    let n1 = state.n + 1;
    let w = g * state.w_n + sigma2;
    Ok(GrowingRecursionState {
        n: n1,
        var_n: w / n1 as f64,
        sq_mean_n: sigma2 / n1 as f64,
        w_n: w,
    })
}

/// Large-size limit of the expected variance for constant `p`.
pub fn growing_limit(p: f64, sigma2: f64) -> Result<f64> {
    check_positive_probability("p", p)?;
    check_sigma2(sigma2)?;
    Ok(p * sigma2)
}

/// Iterates [`growing_step`] from `start` until the size reaches `n_max`,
/// recording every arrival. `t` holds the expected arrival time
/// `Σ 1/p_m` counted from the start.
pub fn growing_trajectory(
    start: GrowingRecursionState,
    schedule: &Schedule,
    sigma2: f64,
    n_max: usize,
) -> Result<Trajectory> {
    schedule.validate()?;
    let mut traj = Trajectory::new(TrajectoryKind::Analytic);
    let mut state = start;
    let mut t = 0.0;
    let push = |traj: &mut Trajectory, s: &GrowingRecursionState, t: f64| {
        traj.samples.push(Sample {
            t,
            n: s.n,
            sq_mean: s.sq_mean_n,
            mean_sq: s.sq_mean_n + s.var_n,
            variance: s.var_n,
            mean: None,
        });
    };
    push(&mut traj, &state, t);
    while state.n < n_max {
        let p = schedule.p_at(state.n);
        state = growing_step(state, p, sigma2)?;
        t += 1.0 / p;
        push(&mut traj, &state, t);
    }
    Ok(traj)
}

/// Same growth process as [`growing_trajectory`] but started from arbitrary
/// moments `x0` at size `n0`, so the square of the mean is tracked through
/// the arrival map rather than assumed to be `σ²/n`.
pub fn growing_moment_trajectory(
    n0: usize,
    x0: MomentVector,
    schedule: &Schedule,
    sigma2: f64,
    n_max: usize,
) -> Result<Trajectory> {
    schedule.validate()?;
    check_sigma2(sigma2)?;
    if n0 < 1 {
        return Err(Error::InvalidSize {
            n: n0,
            reason: "growing system starts from at least one agent",
        });
    }
    let mut traj = Trajectory::new(TrajectoryKind::Analytic);
    let (mut n, mut x, mut t) = (n0, x0, 0.0);
    let push = |traj: &mut Trajectory, n: usize, x: MomentVector, t: f64| {
        traj.samples.push(Sample {
            t,
            n,
            sq_mean: x.sq_mean,
            mean_sq: x.mean_sq,
            variance: x.variance(),
            mean: None,
        });
    };
    push(&mut traj, n, x, t);
    while n < n_max {
        let p = schedule.p_at(n);
        x = arrival_map(n, sigma2)?.compose(&inter_arrival_map(n, p)?).apply(x);
        n += 1;
        t += 1.0 / p;
        push(&mut traj, n, x, t);
    }
    Ok(traj)
}

/// Upper bound on `W_n` for arrival probabilities `p_m <= p`, `m >= n0`,
/// with `q = 1/p - 1`.
pub fn appendix_bound(n0: usize, n: usize, q: f64, w_n0: f64, sigma2: f64) -> Result<f64> {
    if !(q.is_finite() && q > 0.0) {
        return Err(Error::InvalidParameter {
            name: "q",
            value: q,
            reason: "must be positive",
        });
    }
    if n0 < 2 || n <= n0 {
        return Err(Error::InvalidSize {
            n,
            reason: "bound needs n > n0 >= 2",
        });
    }
    check_sigma2(sigma2)?;
    let (n0f, nf) = (n0 as f64, n as f64);
    let head = w_n0 * ((n0f + q) / (nf + q)).powf(q);
    // σ² (n+q+1)^{q+1} / ((n+q)^q (q+1)), kept as a ratio to avoid overflow.
    let tail = sigma2 * ((nf + q + 1.0) / (nf + q)).powf(q) * (nf + q + 1.0) / (q + 1.0);
    Ok(head + tail)
}

/// Expected variance after assembling `n` i.i.d. agents and then running
/// `n K` gossips with no arrivals.
pub fn closed_system_baseline(n: usize, k: f64, sigma2: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidSize {
            n,
            reason: "baseline needs at least two agents",
        });
    }
    if !(k.is_finite() && k >= 0.0) {
        return Err(Error::InvalidParameter {
            name: "K",
            value: k,
            reason: "must be finite and non-negative",
        });
    }
    check_sigma2(sigma2)?;
    let nf = n as f64;
    Ok(sigma2 * (nf - 1.0) / nf * (nf * k * (-1.0 / nf).ln_1p()).exp())
}

/// `σ² e^{-K}`, the `n → ∞` limit of [`closed_system_baseline`].
pub fn closed_system_baseline_limit(k: f64, sigma2: f64) -> f64 {
    sigma2 * (-k).exp()
}
