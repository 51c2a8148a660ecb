//! Upstream Bernoulli profiles `B(x₂)` on `[0, 1]`.

use crate::numerics::interp::{HermiteTable, InterpError};

use super::FarFieldError;

const SCAN_POINTS: usize = 10_001;

#[derive(Debug, Clone, PartialEq)]
enum Repr {
    /// Monomial coefficients, lowest degree first.
    Polynomial(Vec<f64>),
    Table(HermiteTable),
}

/// `B(x₂)` with its derivative and the derived bounds `B̲`, `B̄`, `δ`.
#[derive(Debug, Clone, PartialEq)]
pub struct BernoulliProfile {
    repr: Repr,
    b_min: f64,
    b_max: f64,
    delta: f64,
}

impl BernoulliProfile {
    pub fn constant(value: f64) -> Result<Self, FarFieldError> {
        Self::polynomial(vec![value])
    }

    pub fn polynomial(coefficients: Vec<f64>) -> Result<Self, FarFieldError> {
        if coefficients.is_empty() {
            return Err(FarFieldError::InvalidProfile(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if coefficients.iter().any(|c| !c.is_finite()) {
            return Err(FarFieldError::InvalidProfile(
                "polynomial coefficients must be finite".into(),
            ));
        }
        Ok(Self::finish(Repr::Polynomial(coefficients)))
    }

    /// Samples `(x₂, B)` covering `[0, 1]`, interpolated by a monotone cubic.
    pub fn table(x: Vec<f64>, values: Vec<f64>) -> Result<Self, FarFieldError> {
        if values.iter().chain(&x).any(|v| !v.is_finite()) {
            return Err(FarFieldError::InvalidProfile(
                "table entries must be finite".into(),
            ));
        }
        let table = HermiteTable::monotone(x, values).map_err(|e| {
            FarFieldError::InvalidProfile(match e {
                InterpError::TooFewSamples => "table needs at least two samples".into(),
                InterpError::LengthMismatch => "table columns differ in length".into(),
                InterpError::NotIncreasing => "table abscissae must be strictly increasing".into(),
            })
        })?;
        if table.x_min() > 0.0 || table.x_max() < 1.0 {
            return Err(FarFieldError::InvalidProfile(format!(
                "table must cover [0, 1], got [{}, {}]",
                table.x_min(),
                table.x_max()
            )));
        }
        Ok(Self::finish(Repr::Table(table)))
    }

    fn finish(repr: Repr) -> Self {
        let mut p = Self {
            repr,
            b_min: 0.0,
            b_max: 0.0,
            delta: 0.0,
        };
        let dx = 1.0 / (SCAN_POINTS - 1) as f64;
        let mut b_min = f64::INFINITY;
        let mut b_max = f64::NEG_INFINITY;
        let mut sup_d: f64 = 0.0;
        let mut lip: f64 = 0.0;
        let mut prev_d: Option<f64> = None;
        for k in 0..SCAN_POINTS {
            let x = k as f64 * dx;
            let (b, d) = p.eval_with_deriv(x);
            b_min = b_min.min(b);
            b_max = b_max.max(b);
            sup_d = sup_d.max(d.abs());
            if let Some(pd) = prev_d {
                lip = lip.max((d - pd).abs() / dx);
            }
            prev_d = Some(d);
        }
        p.b_min = b_min;
        p.b_max = b_max;
        // Lipschitz-C¹ norm of B': max(sup |B'|, Lip B').
        p.delta = sup_d.max(lip);
        if let Repr::Polynomial(c) = &p.repr {
            if c.len() <= 1 {
                p.delta = 0.0;
            }
        }
        p
    }

    pub fn is_constant(&self) -> bool {
        match &self.repr {
            Repr::Polynomial(c) => c[1..].iter().all(|&v| v == 0.0),
            Repr::Table(t) => t.y().windows(2).all(|w| w[0] == w[1]),
        }
    }

    /// `(B(x), B'(x))`, with `x` clamped to `[0, 1]`.
    pub fn eval_with_deriv(&self, x: f64) -> (f64, f64) {
        let x = x.clamp(0.0, 1.0);
        match &self.repr {
            Repr::Polynomial(c) => {
                let mut v = 0.0;
                let mut d = 0.0;
                for &ck in c.iter().rev() {
                    d = d * x + v;
                    v = v * x + ck;
                }
                (v, d)
            }
            Repr::Table(t) => {
                let (v, d, _) = t.eval_all(x);
                (v, d)
            }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_with_deriv(x).0
    }

    pub fn deriv(&self, x: f64) -> f64 {
        self.eval_with_deriv(x).1
    }

    /// `B̲ = inf B`.
    pub fn b_min(&self) -> f64 {
        self.b_min
    }

    /// `B̄ = sup B`.
    pub fn b_max(&self) -> f64 {
        self.b_max
    }

    /// `δ = ‖B'‖_{C^{0,1}}`.
    pub fn delta(&self) -> f64 {
        self.delta
    }
}
