//! Isentropic gas laws and the Bernoulli-law density/momentum algebra.
//!
//! For a Bernoulli constant `s` the stagnant state has the maximum density
//! `ϱ̄(s)` (`h(ϱ̄) = s`), the sonic state has the critical density `ϱ(s)` and
//! speed `Γ(s)` (`h(ϱ) + Γ²/2 = s`, `c²(ϱ) = Γ²`), and `Σ(s) = ϱ Γ` is the
//! largest momentum density reachable without passing the sonic point.
//!
//! The momentum function `I(ρ) = 2ρ²(s - h(ρ))` rises on `(0, ϱ)` and falls on
//! `(ϱ, ϱ̄)`; [`GasLaw::subsonic_density`] inverts it on the falling
//! (subsonic) branch.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::numerics::roots::{newton_bisect, RootError};

const ROOT_TOL: f64 = 1e-13;
const ROOT_MAX_ITER: usize = 100;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GasError {
    #[error("invalid gas parameter: {0}")]
    InvalidParameter(String),
    #[error("density must be positive, got {0}")]
    NonPositiveDensity(f64),
    #[error("Bernoulli constant {s} is not above the enthalpy infimum {b0}")]
    BelowEnthalpyInfimum { s: f64, b0: f64 },
    #[error("density {rho} exceeds the stagnation density {rho_max} for s = {s}")]
    AboveStagnationDensity { rho: f64, rho_max: f64, s: f64 },
    #[error("momentum square {msq} must be non-negative")]
    NegativeMomentum { msq: f64 },
    #[error("momentum square {msq} exceeds the sonic limit Σ² = {sigma_sq} (supersonic state)")]
    Supersonic { msq: f64, sigma_sq: f64 },
    #[error("subsonic branch inversion failed: {0:?}")]
    Root(RootError),
}

/// Isentropic pressure law `p(ρ)`.
///
/// Polytropic gases use `p = Aρ^γ` with `h(0) = 0`; isothermal gases use
/// `p = c²ρ` with `h(1) = 0`, so their enthalpy is unbounded below.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum GasLaw {
    Polytropic {
        #[serde(rename = "A")]
        a: f64,
        gamma: f64,
    },
    Isothermal {
        c: f64,
    },
}

/// Maximum, critical and sonic quantities for one Bernoulli constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CriticalState {
    pub s: f64,
    pub rho_bar: f64,
    pub rho_crit: f64,
    pub gamma_crit: f64,
    pub sigma: f64,
}

/// A point on the subsonic branch; `sonic` marks the branch endpoint `ϱ(s)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BranchDensity {
    pub rho: f64,
    pub sonic: bool,
}

impl GasLaw {
    pub fn polytropic(a: f64, gamma: f64) -> Result<Self, GasError> {
        let g = GasLaw::Polytropic { a, gamma };
        g.validate()?;
        Ok(g)
    }

    pub fn isothermal(c: f64) -> Result<Self, GasError> {
        let g = GasLaw::Isothermal { c };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), GasError> {
        match *self {
            GasLaw::Polytropic { a, gamma } => {
                if !(a > 0.0 && a.is_finite()) {
                    return Err(GasError::InvalidParameter(format!(
                        "A must be positive, got {a}"
                    )));
                }
                if !(gamma > 1.0 && gamma.is_finite()) {
                    return Err(GasError::InvalidParameter(format!(
                        "gamma must exceed 1, got {gamma}"
                    )));
                }
            }
            GasLaw::Isothermal { c } => {
                if !(c > 0.0 && c.is_finite()) {
                    return Err(GasError::InvalidParameter(format!(
                        "sound speed must be positive, got {c}"
                    )));
                }
            }
        }
        Ok(())
    }

    /// Infimum of the enthalpy; `None` when it is `-∞` (isothermal).
    pub fn b0(&self) -> Option<f64> {
        match self {
            GasLaw::Polytropic { .. } => Some(0.0),
            GasLaw::Isothermal { .. } => None,
        }
    }

    fn check_s(&self, s: f64) -> Result<(), GasError> {
        match self.b0() {
            Some(b0) if !(s > b0) => Err(GasError::BelowEnthalpyInfimum { s, b0 }),
            _ if !s.is_finite() => Err(GasError::InvalidParameter(format!(
                "Bernoulli constant must be finite, got {s}"
            ))),
            _ => Ok(()),
        }
    }

    pub fn pressure(&self, rho: f64) -> f64 {
        match *self {
            GasLaw::Polytropic { a, gamma } => a * rho.powf(gamma),
            GasLaw::Isothermal { c } => c * c * rho,
        }
    }

    /// `h(ρ)`, normalized by `h(0) = 0` (polytropic) or `h(1) = 0` (isothermal).
    pub fn enthalpy(&self, rho: f64) -> Result<f64, GasError> {
        match *self {
            GasLaw::Polytropic { a, gamma } => {
                if rho < 0.0 {
                    return Err(GasError::NonPositiveDensity(rho));
                }
                Ok(a * gamma / (gamma - 1.0) * rho.powf(gamma - 1.0))
            }
            GasLaw::Isothermal { c } => {
                if !(rho > 0.0) {
                    return Err(GasError::NonPositiveDensity(rho));
                }
                Ok(c * c * rho.ln())
            }
        }
    }

    /// `h(ρ)` without argument checks; callers guarantee `ρ > 0`.
    #[inline]
    pub(crate) fn h(&self, rho: f64) -> f64 {
        match *self {
            GasLaw::Polytropic { a, gamma } => a * gamma / (gamma - 1.0) * rho.powf(gamma - 1.0),
            GasLaw::Isothermal { c } => c * c * rho.ln(),
        }
    }

    /// `c²(ρ) = p'(ρ)` without argument checks.
    #[inline]
    pub(crate) fn c2(&self, rho: f64) -> f64 {
        match *self {
            GasLaw::Polytropic { a, gamma } => a * gamma * rho.powf(gamma - 1.0),
            GasLaw::Isothermal { c } => c * c,
        }
    }

    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64, GasError> {
        if !(rho > 0.0) {
            return Err(GasError::NonPositiveDensity(rho));
        }
        Ok(self.c2(rho))
    }

    /// `p''(ρ)`.
    pub fn pressure_second_derivative(&self, rho: f64) -> f64 {
        match *self {
            GasLaw::Polytropic { a, gamma } => a * gamma * (gamma - 1.0) * rho.powf(gamma - 2.0),
            GasLaw::Isothermal { .. } => 0.0,
        }
    }

    /// The density with enthalpy `s`, i.e. the stagnation density `ϱ̄(s)`.
    pub fn inverse_enthalpy(&self, s: f64) -> Result<f64, GasError> {
        self.check_s(s)?;
        Ok(self.rho_bar(s))
    }

    #[inline]
    fn rho_bar(&self, s: f64) -> f64 {
        match *self {
            GasLaw::Polytropic { a, gamma } => {
                (s * (gamma - 1.0) / (a * gamma)).powf(1.0 / (gamma - 1.0))
            }
            GasLaw::Isothermal { c } => (s / (c * c)).exp(),
        }
    }

    #[inline]
    fn rho_crit(&self, s: f64) -> f64 {
        match *self {
            // h(ϱ) = 2s/(γ+1) because c² = (γ-1)h.
            GasLaw::Polytropic { gamma, .. } => self.rho_bar(2.0 * s / (gamma + 1.0)),
            GasLaw::Isothermal { c } => (s / (c * c) - 0.5).exp(),
        }
    }

    /// `Σ²(s)` without argument checks.
    #[inline]
    pub(crate) fn sigma_sq_unchecked(&self, s: f64) -> f64 {
        let rho = self.rho_crit(s);
        rho * rho * self.c2(rho)
    }

    pub fn sigma_sq(&self, s: f64) -> Result<f64, GasError> {
        self.check_s(s)?;
        Ok(self.sigma_sq_unchecked(s))
    }

    /// `(ϱ̄, ϱ, Γ, Σ)` at Bernoulli constant `s`.
    pub fn critical_state(&self, s: f64) -> Result<CriticalState, GasError> {
        self.check_s(s)?;
        let rho_bar = self.rho_bar(s);
        let rho_crit = self.rho_crit(s);
        let gamma_crit = self.c2(rho_crit).sqrt();
        let sigma = rho_crit * (2.0 * (s - self.h(rho_crit))).max(0.0).sqrt();
        Ok(CriticalState {
            s,
            rho_bar,
            rho_crit,
            gamma_crit,
            sigma,
        })
    }

    /// `dΣ/ds` from the closed-form expression in terms of `p'` and `p''` at `ϱ(s)`.
    pub fn dsigma_ds(&self, s: f64) -> Result<f64, GasError> {
        let cs = self.critical_state(s)?;
        let rho = cs.rho_crit;
        let p1 = self.c2(rho);
        let p2 = self.pressure_second_derivative(rho);
        let q = (2.0 * (s - self.h(rho))).sqrt();
        Ok(q / (p1 / rho + 0.5 * p2) + rho * (1.0 - 2.0 * p1 / (2.0 * p1 + rho * p2)) / q)
    }

    /// `I(ρ) = 2ρ²(s - h(ρ))` for `0 < ρ ≤ ϱ̄(s)`.
    pub fn momentum_sq(&self, rho: f64, s: f64) -> Result<f64, GasError> {
        self.check_s(s)?;
        if !(rho > 0.0) {
            return Err(GasError::NonPositiveDensity(rho));
        }
        let head = s - self.h(rho);
        if head < 0.0 {
            let rho_max = self.rho_bar(s);
            if rho > rho_max * (1.0 + 4.0 * f64::EPSILON) {
                return Err(GasError::AboveStagnationDensity { rho, rho_max, s });
            }
            return Ok(0.0);
        }
        Ok(2.0 * rho * rho * head)
    }

    /// `J(M, s)`: the subsonic root of `I(ρ) = M`, in `(ϱ(s), ϱ̄(s)]`.
    ///
    /// `M = Σ²(s)` (to rounding) returns `ϱ(s)` flagged as sonic.
    pub fn subsonic_density(&self, msq: f64, s: f64) -> Result<BranchDensity, GasError> {
        self.check_s(s)?;
        self.subsonic_density_unchecked(msq, s)
    }

    pub(crate) fn subsonic_density_unchecked(
        &self,
        msq: f64,
        s: f64,
    ) -> Result<BranchDensity, GasError> {
        if !(msq >= 0.0) {
            return Err(GasError::NegativeMomentum { msq });
        }
        let rho_max = self.rho_bar(s);
        if msq == 0.0 {
            return Ok(BranchDensity {
                rho: rho_max,
                sonic: false,
            });
        }
        let rho_c = self.rho_crit(s);
        let sigma_sq = rho_c * rho_c * self.c2(rho_c);
        let sonic_band = 8.0 * f64::EPSILON * sigma_sq;
        if msq > sigma_sq + sonic_band {
            return Err(GasError::Supersonic { msq, sigma_sq });
        }
        if msq >= sigma_sq - sonic_band {
            return Ok(BranchDensity {
                rho: rho_c,
                sonic: true,
            });
        }
        let fdf = |rho: f64| {
            let head = s - self.h(rho);
            let f = 2.0 * rho * rho * head - msq;
            let df = 4.0 * rho * head - 2.0 * rho * self.c2(rho);
            (f, df)
        };
        let root = newton_bisect(fdf, rho_c, rho_max, rho_max, ROOT_TOL, ROOT_MAX_ITER)
            .map_err(GasError::Root)?;
        Ok(BranchDensity {
            rho: root.x,
            sonic: false,
        })
    }
}
