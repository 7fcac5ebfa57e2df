use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::moments::MomentVector;

/// Values held by the agents currently in the system.
///
/// Agent identity is implicit: the position in `values` is the current slot
/// and `next_label` counts every agent that ever joined, so labels are never
/// reused.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemState {
    values: Vec<f64>,
    next_label: u64,
    time: u64,
}

impl SystemState {
    pub fn new(values: Vec<f64>) -> Self {
        let next_label = values.len() as u64;
        Self {
            values,
            next_label,
            time: 0,
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn next_label(&self) -> u64 {
        self.next_label
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn moments(&self) -> Result<MomentVector> {
        empirical_moments(&self.values)
    }

    pub fn mean(&self) -> Result<f64> {
        if self.values.is_empty() {
            return Err(Error::EmptySystem);
        }
        Ok(neumaier_sum(self.values.iter().copied()) / self.values.len() as f64)
    }

    fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.values.len() {
            return Err(Error::InvalidIndex {
                index,
                n: self.values.len(),
            });
        }
        Ok(())
    }

    /// Pairwise average of agents `i` and `j`. `i == j` leaves the state
    /// untouched apart from the clock.
    pub fn gossip(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_index(i)?;
        self.check_index(j)?;
        if i != j {
            let mid = (self.values[i] + self.values[j]) / 2.0;
            self.values[i] = mid;
            self.values[j] = mid;
        }
        self.time += 1;
        Ok(())
    }

    /// Removes agent `i` and returns its value.
    pub fn depart(&mut self, i: usize) -> Result<f64> {
        if self.values.is_empty() {
            return Err(Error::EmptySystem);
        }
        self.check_index(i)?;
        let v = self.values.remove(i);
        self.time += 1;
        Ok(v)
    }

    pub fn arrive(&mut self, value: f64) {
        self.values.push(value);
        self.next_label += 1;
        self.time += 1;
    }

    /// Departure of agent `i` immediately followed by an arrival, counted as
    /// one event. Returns the departed value.
    pub fn replace(&mut self, i: usize, value: f64) -> Result<f64> {
        self.check_index(i)?;
        let old = self.values.remove(i);
        self.values.push(value);
        self.next_label += 1;
        self.time += 1;
        Ok(old)
    }
}

/// `(x̄², mean of x²)` of a non-empty value vector, both sums compensated.
pub fn empirical_moments(values: &[f64]) -> Result<MomentVector> {
    empirical_summary(values).map(|(m, _)| m)
}

/// Moment vector together with the signed mean, from one pass.
pub fn empirical_summary(values: &[f64]) -> Result<(MomentVector, f64)> {
    if values.is_empty() {
        return Err(Error::EmptySystem);
    }
    let n = values.len() as f64;
    let (sum, sum_sq) = neumaier_sum2(values);
    let mean = sum / n;
    Ok((MomentVector::new(mean * mean, sum_sq / n), mean))
}

fn neumaier_sum(it: impl Iterator<Item = f64>) -> f64 {
    let mut acc = Neumaier::default();
    for v in it {
        acc.add(v);
    }
    acc.total()
}

fn neumaier_sum2(values: &[f64]) -> (f64, f64) {
    let mut s = Neumaier::default();
    let mut s2 = Neumaier::default();
    for &v in values {
        s.add(v);
        s2.add(v * v);
    }
    (s.total(), s2.total())
}

#[derive(Default)]
struct Neumaier {
    sum: f64,
    comp: f64,
}

impl Neumaier {
    #[inline]
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn total(&self) -> f64 {
        self.sum + self.comp
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn consensus_has_zero_variance() {
        let m = empirical_moments(&[1.5; 7]).unwrap();
        assert_eq!(m, MomentVector::new(2.25, 2.25));
        assert_eq!(m.variance(), 0.0);
    }

    #[test]
    fn zero_one_pair() {
        let m = empirical_moments(&[0.0, 1.0]).unwrap();
        assert_eq!(m, MomentVector::new(0.25, 0.5));
        assert_eq!(m.variance(), 0.25);
    }

    #[test]
    fn symmetric_pair() {
        let m = empirical_moments(&[1.0, -1.0]).unwrap();
        assert_eq!(m, MomentVector::new(0.0, 1.0));
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(empirical_moments(&[]), Err(Error::EmptySystem));
        assert_eq!(SystemState::new(vec![]).moments(), Err(Error::EmptySystem));
    }

    #[test]
    fn compensated_sum_survives_cancellation() {
        let mut v = vec![1e16, 1.0, -1e16];
        v.extend(std::iter::repeat_n(1.0, 9));
        let m = empirical_moments(&v).unwrap();
        let mean = 10.0 / 12.0;
        assert!((m.sq_mean - mean * mean).abs() < 1e-15);
    }

    #[test]
    fn events_advance_clock_and_labels() {
        let mut s = SystemState::new(vec![0.0, 1.0]);
        s.gossip(0, 1).unwrap();
        assert_eq!(s.values(), &[0.5, 0.5]);
        s.arrive(2.0);
        assert_eq!(s.next_label(), 3);
        assert_eq!(s.depart(0).unwrap(), 0.5);
        assert_eq!(s.time(), 3);
        assert_eq!(s.len(), 2);
        assert!(matches!(s.gossip(0, 5), Err(Error::InvalidIndex { index: 5, n: 2 })));
    }

    #[test]
    fn replacement_keeps_size() {
        let mut s = SystemState::new(vec![0.0, 1.0]);
        let old = s.replace(0, 0.3).unwrap();
        assert_eq!(old, 0.0);
        assert_eq!(s.values(), &[1.0, 0.3]);
        assert_eq!(s.time(), 1);
    }

    #[test]
    fn departure_from_empty() {
        let mut s = SystemState::new(vec![]);
        assert_eq!(s.depart(0), Err(Error::EmptySystem));
    }

    proptest! {
        #[test]
        fn cauchy_schwarz(values in prop::collection::vec(-1e3f64..1e3, 1..64)) {
            let m = empirical_moments(&values).unwrap();
            prop_assert!(m.sq_mean <= m.mean_sq * (1.0 + 1e-12) + 1e-300);
        }

        #[test]
        fn permutation_invariant_and_scale_equivariant(
            values in prop::collection::vec(-10.0f64..10.0, 1..32),
            c in -5.0f64..5.0,
        ) {
            let m = empirical_moments(&values).unwrap();
            let mut rev = values.clone();
            rev.reverse();
            let mr = empirical_moments(&rev).unwrap();
            prop_assert!(m.max_abs_diff(&mr) <= 1e-12 * (1.0 + m.mean_sq));

            let scaled: Vec<f64> = values.iter().map(|v| v * c).collect();
            let ms = empirical_moments(&scaled).unwrap();
            let tol = 1e-12 * (1.0 + c * c * m.mean_sq);
            prop_assert!((ms.sq_mean - c * c * m.sq_mean).abs() <= tol);
            prop_assert!((ms.mean_sq - c * c * m.mean_sq).abs() <= tol);
        }
    }
}
