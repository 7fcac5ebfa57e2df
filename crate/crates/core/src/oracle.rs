//! Exact one-step conditional expectations `E(X' | x)` by enumeration.
//!
//! Each function walks every random branch of one event on a small system
//! and averages the resulting empirical moments. Arrivals use the two-point
//! distribution `±sqrt(σ²)`: the expected moments after an arrival depend
//! on the arrival law only through its mean and variance, so two branches
//! are enough for an exact result.

use crate::error::{check_sigma2, Error, Result};
use crate::moments::MomentVector;
use crate::state::empirical_moments;

pub const MAX_ORACLE_SIZE: usize = 8;

fn check_len(x: &[f64], min: usize) -> Result<()> {
    if x.len() < min || x.len() > MAX_ORACLE_SIZE {
        return Err(Error::InvalidSize {
            n: x.len(),
            reason: "oracle enumerates systems of 1..=8 agents only (2..=8 with a departure)",
        });
    }
    Ok(())
}

#[derive(Default)]
struct Average {
    sq_mean: f64,
    mean_sq: f64,
    count: usize,
}

impl Average {
    fn push(&mut self, m: MomentVector) {
        self.sq_mean += m.sq_mean;
        self.mean_sq += m.mean_sq;
        self.count += 1;
    }

    fn finish(self) -> MomentVector {
        let c = self.count as f64;
        MomentVector::new(self.sq_mean / c, self.mean_sq / c)
    }
}

fn arrival_branches(sigma2: f64) -> [f64; 2] {
    let s = sigma2.sqrt();
    [s, -s]
}

/// Averages over all `n²` ordered pairs `(i, j)`, self-pairs included.
pub fn gossip_oracle(x: &[f64]) -> Result<MomentVector> {
    check_len(x, 1)?;
    let mut avg = Average::default();
    let mut buf = x.to_vec();
    for i in 0..x.len() {
        for j in 0..x.len() {
            buf.copy_from_slice(x);
            let mid = (x[i] + x[j]) / 2.0;
            buf[i] = mid;
            buf[j] = mid;
            avg.push(empirical_moments(&buf)?);
        }
    }
    Ok(avg.finish())
}

pub fn departure_oracle(x: &[f64]) -> Result<MomentVector> {
    check_len(x, 2)?;
    let mut avg = Average::default();
    for j in 0..x.len() {
        avg.push(empirical_moments(&without(x, j))?);
    }
    Ok(avg.finish())
}

pub fn arrival_oracle(x: &[f64], sigma2: f64) -> Result<MomentVector> {
    check_len(x, 1)?;
    check_sigma2(sigma2)?;
    let mut avg = Average::default();
    let mut buf = x.to_vec();
    buf.push(0.0);
    for v in arrival_branches(sigma2) {
        *buf.last_mut().unwrap() = v;
        avg.push(empirical_moments(&buf)?);
    }
    Ok(avg.finish())
}

pub fn replacement_oracle(x: &[f64], sigma2: f64) -> Result<MomentVector> {
    check_len(x, 2)?;
    check_sigma2(sigma2)?;
    let mut avg = Average::default();
    for j in 0..x.len() {
        let mut buf = without(x, j);
        buf.push(0.0);
        for v in arrival_branches(sigma2) {
            *buf.last_mut().unwrap() = v;
            avg.push(empirical_moments(&buf)?);
        }
    }
    Ok(avg.finish())
}

fn without(x: &[f64], j: usize) -> Vec<f64> {
    x.iter()
        .enumerate()
        .filter_map(|(k, &v)| (k != j).then_some(v))
        .collect()
}
