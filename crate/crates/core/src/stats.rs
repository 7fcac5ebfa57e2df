//! Streaming sample statistics and goodness-of-fit helpers.

use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Welford accumulator with Chan et al. merging.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunningStats {
    count: u64,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.count += 1;
        let d = x - self.mean;
        self.mean += d / self.count as f64;
        self.m2 += d * (x - self.mean);
    }

    pub fn merge(&mut self, other: &RunningStats) {
        if other.count == 0 {
            return;
        }
        if self.count == 0 {
            *self = *other;
            return;
        }
        let total = self.count + other.count;
        let d = other.mean - self.mean;
        let (na, nb, nt) = (self.count as f64, other.count as f64, total as f64);
        self.mean += d * nb / nt;
        self.m2 += other.m2 + d * d * na * nb / nt;
        self.count = total;
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Unbiased sample variance; NaN with fewer than two samples.
    pub fn sample_variance(&self) -> f64 {
        if self.count < 2 {
            return f64::NAN;
        }
        (self.m2 / (self.count - 1) as f64).max(0.0)
    }

    pub fn std_error(&self) -> f64 {
        (self.sample_variance() / self.count as f64).sqrt()
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Number of bins left after merging sparse ones.
    pub bins: usize,
}

impl ChiSquareTest {
    pub fn rejected_at(&self, alpha: f64) -> bool {
        self.p_value < alpha
    }
}

/// Pearson goodness-of-fit of `observed` counts against cell probabilities.
///
/// Cells whose expected count falls below `min_expected` are folded into
/// their left neighbour, scanning from the right. The probabilities should
/// sum to one (include a tail cell for unbounded supports).
pub fn chi_square_gof(observed: &[u64], probs: &[f64], min_expected: f64) -> ChiSquareTest {
    assert_eq!(observed.len(), probs.len(), "observed and probability cells differ in length");
    let total: u64 = observed.iter().sum();
    let mut cells: Vec<(f64, f64)> = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| (o as f64, p * total as f64))
        .collect();
    while cells.len() > 1 {
        let last = cells.len() - 1;
        if cells[last].1 >= min_expected {
            break;
        }
        let (o, e) = cells.pop().unwrap();
        cells[last - 1].0 += o;
        cells[last - 1].1 += e;
    }
    let statistic: f64 = cells.iter().map(|&(o, e)| (o - e) * (o - e) / e).sum();
    let dof = cells.len().saturating_sub(1).max(1);
    let p_value = ChiSquared::new(dof as f64)
        .map(|d| d.sf(statistic))
        .unwrap_or(f64::NAN);
    ChiSquareTest {
        statistic,
        dof,
        p_value,
        bins: cells.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 4.0, 2.5, -3.0, 7.25, 0.0];
        let s: RunningStats = xs.iter().copied().collect();
        let mean = xs.iter().sum::<f64>() / 6.0;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 5.0;
        assert!((s.mean() - mean).abs() < 1e-15);
        assert!((s.sample_variance() - var).abs() < 1e-13);
        assert!((s.std_error() - (var / 6.0).sqrt()).abs() < 1e-14);
    }

    #[test]
    fn merge_equals_single_pass() {
        let xs: Vec<f64> = (0..100).map(|i| (i as f64 * 0.37).sin()).collect();
        let whole: RunningStats = xs.iter().copied().collect();
        let mut a: RunningStats = xs[..37].iter().copied().collect();
        let b: RunningStats = xs[37..].iter().copied().collect();
        a.merge(&b);
        assert_eq!(a.count(), 100);
        assert!((a.mean() - whole.mean()).abs() < 1e-15);
        assert!((a.sample_variance() - whole.sample_variance()).abs() < 1e-14);
        let mut empty = RunningStats::default();
        empty.merge(&whole);
        assert_eq!(empty, whole);
    }

    #[test]
    fn single_sample_has_no_variance() {
        let s: RunningStats = [3.0].into_iter().collect();
        assert!(s.sample_variance().is_nan());
    }

    #[test]
    fn chi_square_exact_fit() {
        let t = chi_square_gof(&[25, 25, 25, 25], &[0.25; 4], 5.0);
        assert_eq!(t.statistic, 0.0);
        assert_eq!(t.dof, 3);
        assert!((t.p_value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn chi_square_known_value() {
        // χ² = (60-50)²/50 + (40-50)²/50 = 4 on 1 dof; sf(4) = 0.0455003.
        let t = chi_square_gof(&[60, 40], &[0.5, 0.5], 5.0);
        assert!((t.statistic - 4.0).abs() < 1e-12);
        assert!((t.p_value - 0.045_500_263_896_358_4).abs() < 1e-9);
        assert!(!t.rejected_at(0.001));
        assert!(t.rejected_at(0.05));
    }

    #[test]
    fn sparse_cells_are_merged() {
        let t = chi_square_gof(&[90, 9, 1, 0], &[0.9, 0.09, 0.009, 0.001], 5.0);
        assert_eq!(t.bins, 2);
    }
}
