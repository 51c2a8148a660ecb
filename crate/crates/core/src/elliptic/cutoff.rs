//! The cutoff `ζ₀` that keeps the momentum argument of `J` below the sonic limit.
//!
//! `ζ₀(s) = s` for `s ≤ -2ε₀` and `ζ₀(s) = -ε₀` for `s ≥ -ε₀`, joined on
//! `(-2ε₀, -ε₀)` by a polynomial blend with matching slopes (`1` and `0`).
//! Any such blend must rise by `ε₀` over a length `ε₀` while leaving with
//! slope `0`, so its slope necessarily exceeds `1` somewhere inside.

use serde::{Deserialize, Serialize};

/// Polynomial used on the blend interval, in `t = (s + 2ε₀)/ε₀ ∈ [0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Blend {
    /// `t + 4t³ - 7t⁴ + 3t⁵`: matches value, slope and curvature at both ends.
    #[default]
    Quintic,
    /// `t + t² - t³`: matches value and slope only.
    Cubic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationParams {
    pub eps: f64,
    #[serde(default)]
    pub blend: Blend,
}

impl TruncationParams {
    pub fn new(eps: f64) -> Self {
        Self {
            eps,
            blend: Blend::Quintic,
        }
    }

    /// `(ζ₀(s), ζ₀'(s))`.
    #[inline]
    pub fn cutoff_with_deriv(&self, s: f64) -> (f64, f64) {
        let e = self.eps;
        if s <= -2.0 * e {
            return (s, 1.0);
        }
        if s >= -e {
            return (-e, 0.0);
        }
        let t = (s + 2.0 * e) / e;
        let (p, dp) = match self.blend {
            Blend::Quintic => {
                let t2 = t * t;
                let t3 = t2 * t;
                (
                    t + 4.0 * t3 - 7.0 * t3 * t + 3.0 * t3 * t2,
                    1.0 + 12.0 * t2 - 28.0 * t3 + 15.0 * t3 * t,
                )
            }
            Blend::Cubic => (t + t * t - t * t * t, 1.0 + 2.0 * t - 3.0 * t * t),
        };
        (-2.0 * e + e * p, dp)
    }

    /// Whether `ζ₀` differs from the identity at `s`.
    #[inline]
    pub fn is_active(&self, s: f64) -> bool {
        s > -2.0 * self.eps
    }
}

/// `ζ₀(s)`.
pub fn cutoff(s: f64, params: &TruncationParams) -> f64 {
    params.cutoff_with_deriv(s).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_and_clamp_regions() {
        let p = TruncationParams::new(0.1);
        assert_eq!(cutoff(-0.5, &p), -0.5);
        assert_eq!(cutoff(0.3, &p), -0.1);
        assert_eq!(cutoff(-0.1, &p), -0.1);
        assert_eq!(cutoff(-0.2, &p), -0.2);
    }

    #[test]
    fn blend_midpoint() {
        let p = TruncationParams::new(0.1);
        let v = cutoff(-0.15, &p);
        // Direct evaluation of the quintic at t = 1/2.
        let t: f64 = 0.5;
        let oracle = -0.2 + 0.1 * (t + 4.0 * t.powi(3) - 7.0 * t.powi(4) + 3.0 * t.powi(5));
        assert!((v - oracle).abs() < 1e-15);
        assert!((v + 0.134375).abs() < 1e-15);
        assert!(v > -0.15 && v < -0.1);
    }

    #[test]
    fn derivative_is_continuous_at_the_joins() {
        for blend in [Blend::Quintic, Blend::Cubic] {
            let p = TruncationParams { eps: 0.05, blend };
            let e = 1e-9;
            for s in [-0.1, -0.05] {
                let (v0, d0) = p.cutoff_with_deriv(s - e);
                let (v1, d1) = p.cutoff_with_deriv(s + e);
                assert!((v0 - v1).abs() < 1e-8);
                assert!((d0 - d1).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        let p = TruncationParams::new(0.2);
        for s in [-0.39, -0.33, -0.3, -0.25, -0.21] {
            let e = 1e-7;
            let fd = (cutoff(s + e, &p) - cutoff(s - e, &p)) / (2.0 * e);
            assert!((fd - p.cutoff_with_deriv(s).1).abs() < 1e-6);
        }
    }

    proptest! {
        #[test]
        fn nondecreasing_and_bounded(eps in 1e-4f64..1.0, a in -3.0f64..1.0, d in 0.0f64..0.5) {
            let p = TruncationParams::new(eps);
            let (lo, hi) = (cutoff(a, &p), cutoff(a + d, &p));
            prop_assert!(hi >= lo - 1e-15);
            prop_assert!(hi <= -eps + 1e-15);
            prop_assert!(p.cutoff_with_deriv(a).1 >= 0.0);
            // Never above the identity shifted by ε₀.
            prop_assert!(lo <= a.min(-eps) + eps + 1e-15);
        }
    }
}
