use serde::{Deserialize, Serialize};

use super::maps::mixed_event_map;
use crate::error::{check_probability, Error, Result};

/// Eigen-decomposition of the linear part of the mixed-event map.
///
/// Eigenvectors are scaled so that their second component is 1, except when
/// that component vanishes (the `r_minus` vector at `p = 1` is `(1, 0)`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Spectrum2 {
    pub r_plus: f64,
    pub r_minus: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
    pub delta: f64,
}

impl Spectrum2 {
    /// Largest of `|A v - r v|∞ / (|r| |v|∞)` over both eigenpairs of `matrix`.
    pub fn eigen_residual(&self, matrix: [[f64; 2]; 2]) -> f64 {
        let res = |r: f64, v: [f64; 2]| {
            let av0 = matrix[0][0] * v[0] + matrix[0][1] * v[1];
            let av1 = matrix[1][0] * v[0] + matrix[1][1] * v[1];
            let num = (av0 - r * v[0]).abs().max((av1 - r * v[1]).abs());
            let scale = r.abs().max(f64::MIN_POSITIVE) * v[0].abs().max(v[1].abs());
            num / scale
        };
        res(self.r_plus, self.v_plus).max(res(self.r_minus, self.v_minus))
    }
}

pub fn spectrum(n: usize, p: f64) -> Result<Spectrum2> {
    if n < 2 {
        return Err(Error::InvalidSize {
            n,
            reason: "spectrum needs at least two agents",
        });
    }
    check_probability("p", p)?;
    let nf = n as f64;
    let a = 1.0 - 2.0 * p;
    let delta = a * a + 4.0 * p * (1.0 - p) / nf;
    let s = delta.sqrt();
    let r_plus = (2.0 * nf - 2.0 * p - 1.0 + s) / (2.0 * nf);
    let r_minus = (2.0 * nf - 2.0 * p - 1.0 - s) / (2.0 * nf);

    // First components (2p - 1 ∓ s) / (2(p - 1)). Whichever of a ± s
    // cancels is rewritten through (a + s)(a - s) = -4p(1-p)/n, which also
    // removes the division by p - 1.
    let v_plus0 = if a < 0.0 {
        -2.0 * p / (nf * (a - s))
    } else {
        (a + s) / (2.0 * (1.0 - p))
    };
    let v_minus = if p == 1.0 {
        [1.0, 0.0]
    } else if a >= 0.0 {
        [-2.0 * p / (nf * (a + s)), 1.0]
    } else {
        [(a - s) / (2.0 * (1.0 - p)), 1.0]
    };

    Ok(Spectrum2 {
        r_plus,
        r_minus,
        v_plus: [v_plus0, 1.0],
        v_minus,
        delta,
    })
}

/// Which mode sets the slowest convergence rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// Dominant eigenvalue ≈ 1 - 1/n: variance reduction by gossip.
    GossipDominated,
    /// Dominant eigenvalue ≈ 1 - 2p/n: squared mean, moved only by replacements.
    ReplacementDominated,
    Boundary,
}

const REGIME_TOL: f64 = 1e-9;

/// The dominant eigenvalue `r_plus` lies above both diagonal entries of the
/// mixed-event matrix; the regime is named after the diagonal entry it
/// sits closest to. When the two diagonal entries coincide within 1e-9
/// (`p = 1/2`) neither mode dominates.
pub fn spectral_radius_regime(n: usize, p: f64) -> Result<Regime> {
    let sp = spectrum(n, p)?;
    let m = mixed_event_map(n, p, 0.0)?;
    let to_replacement = (sp.r_plus - m.a11).abs();
    let to_gossip = (sp.r_plus - m.a22).abs();
    if (m.a11 - m.a22).abs() < REGIME_TOL {
        return Ok(Regime::Boundary);
    }
    Ok(if to_gossip < to_replacement {
        Regime::GossipDominated
    } else {
        Regime::ReplacementDominated
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const GRID_N: [usize; 5] = [2, 5, 25, 100, 1000];
    const GRID_P: [f64; 7] = [0.0, 0.01, 0.05, 0.5, 0.9, 0.999, 1.0];

    #[test]
    fn residual_on_grid() {
        for n in GRID_N {
            for p in GRID_P {
                let sp = spectrum(n, p).unwrap();
                let m = mixed_event_map(n, p, 1.0).unwrap().matrix();
                let res = sp.eigen_residual(m);
                assert!(res < 1e-12, "n = {n}, p = {p}: residual {res}");
                assert!(sp.r_plus >= sp.r_minus);
            }
        }
    }

    #[test]
    fn agrees_with_direct_form_away_from_cancellation() {
        // Direct (2p - 1 ∓ sqrt Δ) / (2(p - 1)) where it is well conditioned.
        for (n, p) in [(5, 0.3), (25, 0.7), (100, 0.05)] {
            let sp = spectrum(n, p).unwrap();
            let s = sp.delta.sqrt();
            let vp = (2.0 * p - 1.0 - s) / (2.0 * (p - 1.0));
            let vm = (2.0 * p - 1.0 + s) / (2.0 * (p - 1.0));
            assert!((sp.v_plus[0] - vp).abs() < 1e-12 * vp.abs().max(1.0));
            assert!((sp.v_minus[0] - vm).abs() < 1e-9 * vm.abs().max(1e-3));
        }
    }

    #[test]
    fn replacement_only() {
        for n in GRID_N {
            let nf = n as f64;
            let sp = spectrum(n, 1.0).unwrap();
            assert_eq!(sp.delta, 1.0);
            assert!((sp.r_plus - (1.0 - 1.0 / nf)).abs() < 1e-15);
            assert!((sp.r_minus - (1.0 - 2.0 / nf)).abs() < 1e-15);
            assert!((sp.v_plus[0] - 1.0 / nf).abs() < 1e-15);
            assert_eq!(sp.v_minus, [1.0, 0.0]);
        }
    }

    #[test]
    fn half() {
        for n in GRID_N {
            let nf = n as f64;
            let sp = spectrum(n, 0.5).unwrap();
            assert!((sp.delta - 1.0 / nf).abs() < 1e-15);
            let root = 1.0 / nf.sqrt();
            assert!((sp.r_plus - (2.0 * nf - 2.0 + root) / (2.0 * nf)).abs() < 1e-15);
            assert!((sp.r_minus - (2.0 * nf - 2.0 - root) / (2.0 * nf)).abs() < 1e-15);
        }
    }

    #[test]
    fn large_n_orders() {
        let n = 1000;
        let nf = n as f64;
        let sp = spectrum(n, 0.1).unwrap();
        assert!((sp.r_plus - (1.0 - 0.2 / nf)).abs() < nf.powf(-1.5));
        assert!((sp.r_minus - (1.0 - 1.0 / nf)).abs() < nf.powf(-1.5));
    }

    #[test]
    fn regimes() {
        assert_eq!(spectral_radius_regime(100, 0.9).unwrap(), Regime::GossipDominated);
        assert_eq!(spectral_radius_regime(100, 0.1).unwrap(), Regime::ReplacementDominated);
        assert_eq!(spectral_radius_regime(100, 0.5).unwrap(), Regime::Boundary);
        assert_eq!(spectral_radius_regime(1000, 0.49).unwrap(), Regime::ReplacementDominated);
        assert_eq!(spectral_radius_regime(1000, 0.51).unwrap(), Regime::GossipDominated);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(spectrum(1, 0.5).is_err());
        assert!(spectrum(10, 1.01).is_err());
    }
}
