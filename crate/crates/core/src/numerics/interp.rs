//! Piecewise-cubic interpolation on increasing abscissae.
//!
//! All interpolants clamp to the end values outside the sample range; the
//! derivative is zero there.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InterpError {
    TooFewSamples,
    LengthMismatch,
    NotIncreasing,
}

fn check_abscissae(x: &[f64], y_len: usize) -> Result<(), InterpError> {
    if x.len() != y_len {
        return Err(InterpError::LengthMismatch);
    }
    if x.len() < 2 {
        return Err(InterpError::TooFewSamples);
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(InterpError::NotIncreasing);
    }
    Ok(())
}

/// Index `k` of the interval `[x_k, x_{k+1}]` holding `t` (clamped).
fn locate(x: &[f64], t: f64) -> usize {
    let k = x.partition_point(|&v| v <= t);
    k.saturating_sub(1).min(x.len() - 2)
}

/// Cubic Hermite interpolant through values and slopes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HermiteTable {
    x: Vec<f64>,
    y: Vec<f64>,
    dy: Vec<f64>,
}

impl HermiteTable {
    pub fn new(x: Vec<f64>, y: Vec<f64>, dy: Vec<f64>) -> Result<Self, InterpError> {
        check_abscissae(&x, y.len())?;
        if dy.len() != y.len() {
            return Err(InterpError::LengthMismatch);
        }
        Ok(Self { x, y, dy })
    }

    /// Monotone cubic (Fritsch–Carlson) slopes for the samples.
    pub fn monotone(x: Vec<f64>, y: Vec<f64>) -> Result<Self, InterpError> {
        check_abscissae(&x, y.len())?;
        let n = x.len();
        let secant: Vec<f64> = (0..n - 1)
            .map(|k| (y[k + 1] - y[k]) / (x[k + 1] - x[k]))
            .collect();
        let mut dy = vec![0.0; n];
        if n == 2 {
            dy[0] = secant[0];
            dy[1] = secant[0];
            return Ok(Self { x, y, dy });
        }
        for k in 1..n - 1 {
            let (d0, d1) = (secant[k - 1], secant[k]);
            if d0 * d1 <= 0.0 {
                dy[k] = 0.0;
            } else {
                let h0 = x[k] - x[k - 1];
                let h1 = x[k + 1] - x[k];
                let w1 = 2.0 * h1 + h0;
                let w2 = h1 + 2.0 * h0;
                dy[k] = (w1 + w2) / (w1 / d0 + w2 / d1);
            }
        }
        dy[0] = end_slope(x[1] - x[0], x[2] - x[1], secant[0], secant[1]);
        dy[n - 1] = end_slope(
            x[n - 1] - x[n - 2],
            x[n - 2] - x[n - 3],
            secant[n - 2],
            secant[n - 3],
        );
        Ok(Self { x, y, dy })
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    pub fn x_min(&self) -> f64 {
        self.x[0]
    }

    pub fn x_max(&self) -> f64 {
        self.x[self.x.len() - 1]
    }

    /// Value, first and second derivative at `t`.
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.y[0], 0.0, 0.0);
        }
        if t >= self.x[n - 1] {
            return (self.y[n - 1], 0.0, 0.0);
        }
        let k = locate(&self.x, t);
        let h = self.x[k + 1] - self.x[k];
        let s = (t - self.x[k]) / h;
        let (y0, y1) = (self.y[k], self.y[k + 1]);
        let (m0, m1) = (self.dy[k] * h, self.dy[k + 1] * h);
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        let v = h00 * y0 + h10 * m0 + h01 * y1 + h11 * m1;
        let d = ((6.0 * s2 - 6.0 * s) * y0
            + (3.0 * s2 - 4.0 * s + 1.0) * m0
            + (-6.0 * s2 + 6.0 * s) * y1
            + (3.0 * s2 - 2.0 * s) * m1)
            / h;
        let dd = ((12.0 * s - 6.0) * y0
            + (6.0 * s - 4.0) * m0
            + (-12.0 * s + 6.0) * y1
            + (6.0 * s - 2.0) * m1)
            / (h * h);
        (v, d, dd)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.eval_all(t).0
    }

    pub fn deriv(&self, t: f64) -> f64 {
        self.eval_all(t).1
    }
}

fn end_slope(h0: f64, h1: f64, d0: f64, d1: f64) -> f64 {
    let d = ((2.0 * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if d.signum() != d0.signum() {
        0.0
    } else if d0.signum() != d1.signum() && d.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        d
    }
}

/// Natural cubic spline (zero second derivative at both ends).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CubicSpline {
    x: Vec<f64>,
    y: Vec<f64>,
    m: Vec<f64>,
}

impl CubicSpline {
    pub fn natural(x: Vec<f64>, y: Vec<f64>) -> Result<Self, InterpError> {
        check_abscissae(&x, y.len())?;
        let n = x.len();
        let mut m = vec![0.0; n];
        if n > 2 {
            // Thomas algorithm on the interior second-derivative system.
            let k = n - 2;
            let mut diag = vec![0.0; k];
            let mut upper = vec![0.0; k];
            let mut rhs = vec![0.0; k];
            for i in 0..k {
                let h0 = x[i + 1] - x[i];
                let h1 = x[i + 2] - x[i + 1];
                diag[i] = 2.0 * (h0 + h1);
                upper[i] = h1;
                rhs[i] = 6.0 * ((y[i + 2] - y[i + 1]) / h1 - (y[i + 1] - y[i]) / h0);
            }
            for i in 1..k {
                let lower = x[i + 1] - x[i];
                let w = lower / diag[i - 1];
                diag[i] -= w * upper[i - 1];
                rhs[i] -= w * rhs[i - 1];
            }
            m[k] = rhs[k - 1] / diag[k - 1];
            for i in (0..k - 1).rev() {
                m[i + 1] = (rhs[i] - upper[i] * m[i + 2]) / diag[i];
            }
        }
        Ok(Self { x, y, m })
    }

    pub fn first(&self) -> (f64, f64) {
        (self.x[0], self.y[0])
    }

    pub fn last(&self) -> (f64, f64) {
        let n = self.x.len();
        (self.x[n - 1], self.y[n - 1])
    }

    /// Value, first and second derivative at `t`.
    pub fn eval_all(&self, t: f64) -> (f64, f64, f64) {
        let n = self.x.len();
        if t <= self.x[0] {
            return (self.y[0], 0.0, 0.0);
        }
        if t >= self.x[n - 1] {
            return (self.y[n - 1], 0.0, 0.0);
        }
        let k = locate(&self.x, t);
        let h = self.x[k + 1] - self.x[k];
        let a = (self.x[k + 1] - t) / h;
        let b = (t - self.x[k]) / h;
        let (m0, m1) = (self.m[k], self.m[k + 1]);
        let v = a * self.y[k]
            + b * self.y[k + 1]
            + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0;
        let d = (self.y[k + 1] - self.y[k]) / h - (3.0 * a * a - 1.0) * h * m0 / 6.0
            + (3.0 * b * b - 1.0) * h * m1 / 6.0;
        let dd = a * m0 + b * m1;
        (v, d, dd)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermite_reproduces_cubic_with_exact_slopes() {
        let x: Vec<f64> = (0..6).map(|k| k as f64 * 0.4).collect();
        let f = |t: f64| t * t * t - 2.0 * t;
        let df = |t: f64| 3.0 * t * t - 2.0;
        let tab = HermiteTable::new(
            x.clone(),
            x.iter().map(|&t| f(t)).collect(),
            x.iter().map(|&t| df(t)).collect(),
        )
        .unwrap();
        for t in [0.05, 0.33, 1.17, 1.99] {
            let (v, d, dd) = tab.eval_all(t);
            assert!((v - f(t)).abs() < 1e-13);
            assert!((d - df(t)).abs() < 1e-12);
            assert!((dd - 6.0 * t).abs() < 1e-10);
        }
    }

    #[test]
    fn monotone_cubic_preserves_monotonicity() {
        let x = vec![0.0, 1.0, 2.0, 3.0, 4.0];
        let y = vec![0.0, 0.1, 0.1, 5.0, 5.1];
        let tab = HermiteTable::monotone(x, y).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..=400 {
            let v = tab.eval(k as f64 * 0.01);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn clamps_outside_range() {
        let tab = HermiteTable::monotone(vec![0.0, 1.0, 2.0], vec![1.0, 2.0, 4.0]).unwrap();
        assert_eq!(tab.eval(-3.0), 1.0);
        assert_eq!(tab.eval(7.0), 4.0);
        assert_eq!(tab.deriv(7.0), 0.0);
    }

    #[test]
    fn natural_spline_reproduces_lines_and_knots() {
        let x = vec![0.0, 0.5, 1.5, 2.0, 3.0];
        let y: Vec<f64> = x.iter().map(|t| 2.0 * t - 1.0).collect();
        let s = CubicSpline::natural(x.clone(), y.clone()).unwrap();
        for t in [0.1, 0.7, 1.9, 2.6] {
            let (v, d, dd) = s.eval_all(t);
            assert!((v - (2.0 * t - 1.0)).abs() < 1e-13);
            assert!((d - 2.0).abs() < 1e-12);
            assert!(dd.abs() < 1e-11);
        }
        let s = CubicSpline::natural(x.clone(), x.iter().map(|t| t.sin()).collect()).unwrap();
        for (xi, yi) in x.iter().zip(x.iter().map(|t| t.sin())) {
            assert!((s.eval_all(*xi).0 - yi).abs() < 1e-14);
        }
    }

    #[test]
    fn rejects_unsorted_abscissae() {
        assert_eq!(
            HermiteTable::monotone(vec![0.0, 0.0], vec![1.0, 2.0]).unwrap_err(),
            InterpError::NotIncreasing
        );
        assert_eq!(
            CubicSpline::natural(vec![0.0], vec![1.0]).unwrap_err(),
            InterpError::TooFewSamples
        );
    }
}
