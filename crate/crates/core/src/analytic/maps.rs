use crate::error::{check_positive_probability, check_probability, check_sigma2, Error, Result};
use crate::moments::{AffineMap2, MomentVector};
use crate::trajectory::{Sample, Trajectory, TrajectoryKind};

fn require_size(n: usize, min: usize, reason: &'static str) -> Result<f64> {
    if n < min {
        return Err(Error::InvalidSize { n, reason });
    }
    Ok(n as f64)
}

/// One gossip step between a uniformly drawn ordered pair.
pub fn gossip_map(n: usize) -> Result<AffineMap2> {
    let nf = require_size(n, 1, "gossip needs at least one agent")?;
    Ok(AffineMap2::linear([[1.0, 0.0], [1.0 / nf, 1.0 - 1.0 / nf]]))
}

/// Arrival of one agent into a system of `n` agents.
pub fn arrival_map(n: usize, sigma2: f64) -> Result<AffineMap2> {
    let nf = require_size(n, 1, "arrival map is undefined for an empty system")?;
    check_sigma2(sigma2)?;
    let m = nf + 1.0;
    Ok(AffineMap2::new(
        [[nf * nf / (m * m), 0.0], [0.0, nf / m]],
        [sigma2 / (m * m), sigma2 / m],
    ))
}

/// Departure of a uniformly drawn agent from a system of `n` agents.
pub fn departure_map(n: usize) -> Result<AffineMap2> {
    if n < 2 {
        return Err(Error::DepartureUndefined { n });
    }
    let nf = n as f64;
    let d = (nf - 1.0) * (nf - 1.0);
    Ok(AffineMap2::linear([[(nf * nf - 2.0 * nf) / d, 1.0 / d], [0.0, 1.0]]))
}

/// Departure immediately followed by an arrival; size stays `n`.
pub fn replacement_map(n: usize, sigma2: f64) -> Result<AffineMap2> {
    let nf = require_size(n, 2, "replacement needs at least two agents")?;
    check_sigma2(sigma2)?;
    let n2 = nf * nf;
    Ok(AffineMap2::new(
        [[(nf - 2.0) / nf, 1.0 / n2], [0.0, (nf - 1.0) / nf]],
        [sigma2 / n2, sigma2 / nf],
    ))
}

/// One event of the fixed-size system: replacement with probability `p`,
/// gossip otherwise.
pub fn mixed_event_map(n: usize, p: f64, sigma2: f64) -> Result<AffineMap2> {
    let nf = require_size(n, 2, "mixed events need at least two agents")?;
    check_probability("p", p)?;
    check_sigma2(sigma2)?;
    let n2 = nf * nf;
    Ok(AffineMap2::new(
        [
            [1.0 - 2.0 * p / nf, p / n2],
            [(1.0 - p) / nf, 1.0 - 1.0 / nf],
        ],
        [sigma2 * p / n2, sigma2 * p / nf],
    ))
}

/// Stationary expected moments of [`mixed_event_map`].
pub fn fixed_point(n: usize, p: f64, sigma2: f64) -> Result<MomentVector> {
    let nf = require_size(n, 2, "fixed point needs at least two agents")?;
    check_probability("p", p)?;
    check_sigma2(sigma2)?;
    if p == 0.0 {
        return Err(Error::NonUniqueFixedPoint);
    }
    let den = p + 2.0 * nf - 1.0;
    Ok(MomentVector::new(
        sigma2 * (p + 1.0) / den,
        sigma2 * (1.0 + p * (2.0 * nf - 1.0)) / den,
    ))
}

/// Expected effect of the geometric run of gossips that precedes an arrival
/// when the arrival probability is `p`.
///
/// Equals `p (I - (1-p) A_g)^{-1}`; the variance contracts by
/// `gamma = n / (n - 1 + 1/p)`.
pub fn inter_arrival_map(n: usize, p: f64) -> Result<AffineMap2> {
    require_size(n, 1, "inter-arrival map needs at least one agent")?;
    if p == 0.0 {
        return Err(Error::InvalidProbability {
            name: "p",
            value: p,
            reason: "expected number of gossips between arrivals diverges at p = 0",
        });
    }
    check_positive_probability("p", p)?;
    let g = super::gamma(n, p);
    Ok(AffineMap2::linear([[1.0, 0.0], [1.0 - g, g]]))
}

/// Iterates [`mixed_event_map`] `steps` times from `x0`.
pub fn fixed_trajectory(
    n: usize,
    p: f64,
    sigma2: f64,
    x0: MomentVector,
    steps: u64,
) -> Result<Trajectory> {
    let map = mixed_event_map(n, p, sigma2)?;
    let mut traj = Trajectory::new(TrajectoryKind::Analytic);
    traj.samples.reserve(steps as usize + 1);
    let mut x = x0;
    for t in 0..=steps {
        if t > 0 {
            x = map.apply(x);
        }
        traj.samples.push(Sample {
            t: t as f64,
            n,
            sq_mean: x.sq_mean,
            mean_sq: x.mean_sq,
            variance: x.variance(),
            mean: None,
        });
    }
    Ok(traj)
}
