//! Scalar Normal distribution helpers.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// A univariate Normal distribution given by mean and variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub variance: f64,
}

impl Normal {
    pub fn new(mean: f64, variance: f64) -> Self {
        Self { mean, variance }
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.max(0.0).sqrt()
    }

    pub fn cdf(&self, x: f64) -> f64 {
        let sd = self.std_dev();
        if sd == 0.0 {
            return if x >= self.mean { 1.0 } else { 0.0 };
        }
        std_cdf((x - self.mean) / sd)
    }

    /// `E[(X - c)^+]`.
    pub fn expected_excess(&self, c: f64) -> f64 {
        expected_excess(self.mean, self.std_dev(), c)
    }
}

pub fn std_pdf(z: f64) -> f64 {
    INV_SQRT_2PI * (-0.5 * z * z).exp()
}

pub fn std_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z * FRAC_1_SQRT_2)
}

/// Upper tail `1 - Φ(z)` without cancellation.
pub fn std_sf(z: f64) -> f64 {
    0.5 * libm::erfc(z * FRAC_1_SQRT_2)
}

/// `f(z) = z Φ(z) + φ(z)`, the expected positive part of `Z + z` for a
/// standard Normal `Z`. Stable for large negative arguments.
pub fn kg_f(z: f64) -> f64 {
    if z >= -5.0 {
        return (z * std_cdf(z) + std_pdf(z)).max(0.0);
    }
    // For x = -z large, f(-x) = φ(x) t / (x + t) where
    // t = 1 / (x + 2 / (x + 3 / (x + ...))) (Mills-ratio continued fraction).
    let x = -z;
    let mut tail = x;
    for k in (2..=80).rev() {
        tail = x + k as f64 / tail;
    }
    let t = 1.0 / tail;
    std_pdf(x) * t / (x + t)
}

/// `E[(X - c)^+]` for `X ~ N(mean, sd^2)`.
pub fn expected_excess(mean: f64, sd: f64, c: f64) -> f64 {
    if sd <= 0.0 {
        return (mean - c).max(0.0);
    }
    sd * kg_f((mean - c) / sd)
}

/// Moment-matched Normal approximation of `max(X, Y)` for independent Normals.
pub fn clark_max(x: Normal, y: Normal) -> Normal {
    let theta2 = x.variance.max(0.0) + y.variance.max(0.0);
    if theta2 <= 0.0 {
        return Normal::new(x.mean.max(y.mean), 0.0);
    }
    let theta = theta2.sqrt();
    let alpha = (x.mean - y.mean) / theta;
    let (p, q, d) = (std_cdf(alpha), std_cdf(-alpha), std_pdf(alpha));
    let m1 = x.mean * p + y.mean * q + theta * d;
    let m2 = (x.mean * x.mean + x.variance) * p
        + (y.mean * y.mean + y.variance) * q
        + (x.mean + y.mean) * theta * d;
    Normal::new(m1, (m2 - m1 * m1).max(0.0))
}

/// Expected maximum of two i.i.d. standard Normals, `1/√π`.
pub fn expected_max_two_std() -> f64 {
    1.0 / PI.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn cdf_reference_points() {
        assert_relative_eq!(std_cdf(0.0), 0.5, epsilon = 1e-15);
        assert_relative_eq!(std_cdf(1.959_963_984_540_054), 0.975, epsilon = 1e-12);
        assert_relative_eq!(std_sf(8.0), 6.220_960_574_271_785e-16, max_relative = 1e-10);
    }

    #[test]
    fn kg_f_is_continuous_across_branch_switch() {
        let left = kg_f(-5.0 - 1e-9);
        let right = kg_f(-5.0 + 1e-9);
        assert_relative_eq!(left, right, max_relative = 1e-6);
    }

    #[test]
    fn kg_f_matches_numerical_integral() {
        // f(z) = ∫ (x + z)^+ φ(x) dx, midpoint rule on a wide grid.
        for &z in &[-7.0, -3.0, -0.5, 0.0, 1.2] {
            let (lo, hi, n) = (-z, 12.0, 400_000);
            let h = (hi - lo) / n as f64;
            let s: f64 = (0..n)
                .map(|i| {
                    let x = lo + (i as f64 + 0.5) * h;
                    (x + z) * std_pdf(x) * h
                })
                .sum();
            assert_relative_eq!(kg_f(z), s, max_relative = 1e-6);
        }
    }

    #[test]
    fn clark_max_of_identical_standard_normals() {
        let m = clark_max(Normal::new(0.0, 1.0), Normal::new(0.0, 1.0));
        assert_relative_eq!(m.mean, expected_max_two_std(), epsilon = 1e-12);
        // Var(max) = 1 - 1/π for two i.i.d. standard Normals.
        assert_relative_eq!(m.variance, 1.0 - 1.0 / PI, epsilon = 1e-12);
    }

    #[test]
    fn point_masses() {
        assert_eq!(expected_excess(2.0, 0.0, 1.5), 0.5);
        assert_eq!(Normal::new(1.0, 0.0).cdf(1.0), 1.0);
        assert_eq!(clark_max(Normal::new(1.0, 0.0), Normal::new(3.0, 0.0)).mean, 3.0);
    }
}
