use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{check_sigma2, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistKind {
    /// Uniform on `[-sqrt(3 σ²), sqrt(3 σ²)]`.
    UniformCentered,
    Gaussian,
    /// `±sqrt(σ²)` with equal probability.
    TwoPoint,
    /// Always 0; only valid with `σ² = 0`.
    DegenerateZero,
}

impl std::str::FromStr for DistKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" | "uniform_centered" => Ok(DistKind::UniformCentered),
            "gaussian" | "normal" => Ok(DistKind::Gaussian),
            "two_point" | "two-point" => Ok(DistKind::TwoPoint),
            "degenerate_zero" | "zero" => Ok(DistKind::DegenerateZero),
            other => Err(Error::InvalidConfig(format!("unknown distribution kind {other:?}"))),
        }
    }
}

/// Zero-mean distribution of the values carried by arriving agents.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrivalDistribution {
    kind: DistKind,
    sigma2: f64,
}

impl ArrivalDistribution {
    pub fn new(kind: DistKind, sigma2: f64) -> Result<Self> {
        check_sigma2(sigma2)?;
        if kind == DistKind::DegenerateZero && sigma2 != 0.0 {
            return Err(Error::InvalidParameter {
                name: "sigma2",
                value: sigma2,
                reason: "degenerate_zero distribution has zero variance",
            });
        }
        Ok(Self { kind, sigma2 })
    }

    /// Uniform on `[-1/2, 1/2]`, variance 1/12.
    pub fn unit_uniform() -> Self {
        Self {
            kind: DistKind::UniformCentered,
            sigma2: 1.0 / 12.0,
        }
    }

    pub fn kind(&self) -> DistKind {
        self.kind
    }

    pub fn sigma2(&self) -> f64 {
        self.sigma2
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match self.kind {
            DistKind::UniformCentered => {
                let half_width = (3.0 * self.sigma2).sqrt();
                half_width * (2.0 * rng.random::<f64>() - 1.0)
            }
            DistKind::Gaussian => {
                let z: f64 = rng.sample(StandardNormal);
                self.sigma2.sqrt() * z
            }
            DistKind::TwoPoint => {
                let s = self.sigma2.sqrt();
                if rng.random::<bool>() {
                    s
                } else {
                    -s
                }
            }
            DistKind::DegenerateZero => 0.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn sample_stats(d: &ArrivalDistribution, n: usize) -> (f64, f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let xs: Vec<f64> = (0..n).map(|_| d.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        (mean, var)
    }

    #[test]
    fn moments_match_sigma2() {
        let n = 200_000;
        for kind in [DistKind::UniformCentered, DistKind::Gaussian, DistKind::TwoPoint] {
            let d = ArrivalDistribution::new(kind, 0.5).unwrap();
            let (mean, var) = sample_stats(&d, n);
            // 5 standard errors; fourth moments are bounded by 3σ⁴ for all three kinds.
            let se_mean = (0.5f64 / n as f64).sqrt();
            let se_var = (2.0 * 0.25 / n as f64).sqrt();
            assert!(mean.abs() < 5.0 * se_mean, "{kind:?} mean {mean}");
            assert!((var - 0.5).abs() < 5.0 * se_var, "{kind:?} var {var}");
        }
    }

    #[test]
    fn uniform_support() {
        let d = ArrivalDistribution::unit_uniform();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10_000 {
            let v = d.sample(&mut rng);
            assert!((-0.5..=0.5).contains(&v));
        }
    }

    #[test]
    fn degenerate_requires_zero_variance() {
        assert!(ArrivalDistribution::new(DistKind::DegenerateZero, 1.0).is_err());
        let d = ArrivalDistribution::new(DistKind::DegenerateZero, 0.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert_eq!(d.sample(&mut rng), 0.0);
    }

    #[test]
    fn rejects_negative_variance() {
        assert!(ArrivalDistribution::new(DistKind::Gaussian, -1.0).is_err());
        assert!(ArrivalDistribution::new(DistKind::Gaussian, f64::NAN).is_err());
    }
}
