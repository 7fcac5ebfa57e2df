use serde::{Deserialize, Serialize};

/// The moment vector `X = (x̄², mean of x²)`.
///
/// The variance of the agent values is `mean_sq - sq_mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentVector {
    pub sq_mean: f64,
    pub mean_sq: f64,
}

impl MomentVector {
    pub const fn new(sq_mean: f64, mean_sq: f64) -> Self {
        Self { sq_mean, mean_sq }
    }

    /// Consensus at value `c`: every agent holds `c`.
    pub fn consensus(c: f64) -> Self {
        Self::new(c * c, c * c)
    }

    pub fn variance(&self) -> f64 {
        self.mean_sq - self.sq_mean
    }

    pub fn is_finite(&self) -> bool {
        self.sq_mean.is_finite() && self.mean_sq.is_finite()
    }

    pub fn max_abs_diff(&self, other: &MomentVector) -> f64 {
        (self.sq_mean - other.sq_mean)
            .abs()
            .max((self.mean_sq - other.mean_sq).abs())
    }
}

/// Affine map `X' = A X + b` on moment vectors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AffineMap2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
    pub b1: f64,
    pub b2: f64,
}

impl AffineMap2 {
    pub const fn new(matrix: [[f64; 2]; 2], offset: [f64; 2]) -> Self {
        Self {
            a11: matrix[0][0],
            a12: matrix[0][1],
            a21: matrix[1][0],
            a22: matrix[1][1],
            b1: offset[0],
            b2: offset[1],
        }
    }

    pub const fn linear(matrix: [[f64; 2]; 2]) -> Self {
        Self::new(matrix, [0.0, 0.0])
    }

    pub const fn identity() -> Self {
        Self::linear([[1.0, 0.0], [0.0, 1.0]])
    }

    pub fn matrix(&self) -> [[f64; 2]; 2] {
        [[self.a11, self.a12], [self.a21, self.a22]]
    }

    pub fn offset(&self) -> [f64; 2] {
        [self.b1, self.b2]
    }

    pub fn apply(&self, x: MomentVector) -> MomentVector {
        MomentVector {
            sq_mean: self.a11 * x.sq_mean + self.a12 * x.mean_sq + self.b1,
            mean_sq: self.a21 * x.sq_mean + self.a22 * x.mean_sq + self.b2,
        }
    }

    /// `self ∘ inner`: apply `inner` first, then `self`.
    pub fn compose(&self, inner: &AffineMap2) -> AffineMap2 {
        let m = self.matrix();
        let n = inner.matrix();
        let mut prod = [[0.0; 2]; 2];
        for (r, row) in prod.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = m[r][0] * n[0][c] + m[r][1] * n[1][c];
            }
        }
        let b = self.apply(MomentVector::new(inner.b1, inner.b2));
        AffineMap2::new(prod, [b.sq_mean, b.mean_sq])
    }

    /// Entrywise `self * scale`, offset included.
    pub fn scaled(&self, scale: f64) -> AffineMap2 {
        AffineMap2 {
            a11: self.a11 * scale,
            a12: self.a12 * scale,
            a21: self.a21 * scale,
            a22: self.a22 * scale,
            b1: self.b1 * scale,
            b2: self.b2 * scale,
        }
    }

    /// Entrywise sum, offset included.
    pub fn plus(&self, other: &AffineMap2) -> AffineMap2 {
        AffineMap2 {
            a11: self.a11 + other.a11,
            a12: self.a12 + other.a12,
            a21: self.a21 + other.a21,
            a22: self.a22 + other.a22,
            b1: self.b1 + other.b1,
            b2: self.b2 + other.b2,
        }
    }

    pub fn max_abs_diff(&self, other: &AffineMap2) -> f64 {
        [
            self.a11 - other.a11,
            self.a12 - other.a12,
            self.a21 - other.a21,
            self.a22 - other.a22,
            self.b1 - other.b1,
            self.b2 - other.b2,
        ]
        .iter()
        .fold(0.0_f64, |acc, d| acc.max(d.abs()))
    }
}

impl Default for AffineMap2 {
    fn default() -> Self {
        Self::identity()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_map() {
        let x = MomentVector::new(0.3, 0.7);
        assert_eq!(AffineMap2::identity().apply(x), x);
    }

    #[test]
    fn pure_offset() {
        let m = AffineMap2::new([[0.0, 0.0], [0.0, 0.0]], [1.0, 2.0]);
        assert_eq!(m.apply(MomentVector::new(123.0, -4.0)), MomentVector::new(1.0, 2.0));
    }

    #[test]
    fn gossip_matrix_at_two() {
        let m = AffineMap2::linear([[1.0, 0.0], [0.5, 0.5]]);
        let out = m.apply(MomentVector::new(0.25, 0.5));
        assert_eq!(out, MomentVector::new(0.25, 0.375));
    }

    #[test]
    fn compose_matches_sequential_application() {
        let a = AffineMap2::new([[0.5, 0.1], [0.2, 0.9]], [0.01, 0.3]);
        let b = AffineMap2::new([[1.5, -0.3], [0.0, 0.7]], [-0.2, 0.05]);
        let x = MomentVector::new(0.4, 1.1);
        let seq = a.apply(b.apply(x));
        let comp = a.compose(&b).apply(x);
        assert!(seq.max_abs_diff(&comp) < 1e-15);
    }
}
