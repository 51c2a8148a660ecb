//! Far-field states and the stream-coordinate coefficient functions.

mod bernoulli;
mod profiles;
mod states;

use serde::Serialize;
use thiserror::Error;

use crate::gas::{GasError, GasLaw};
use crate::numerics::roots::RootError;

pub use bernoulli::BernoulliProfile;
pub use profiles::StreamProfiles;
pub use states::{
    solve_downstream, solve_upstream, subsonic_window, upstream_flux_range, Downstream, Upstream,
    FLOW_MAP_STEPS, QUAD_NODES,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FarFieldError {
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error("invalid Bernoulli profile: {0}")]
    InvalidProfile(String),
    #[error("mass flux must be positive and finite, got {0}")]
    InvalidMassFlux(f64),
    #[error(
        "mass flux exceeds subsonic range: m = {m} but the upstream section carries at most {max}"
    )]
    MassFluxAboveSubsonic { m: f64, max: f64 },
    #[error("mass flux below assumed lower bound: m = {m} but the subsonic window requires more than {min}")]
    MassFluxBelowBound { m: f64, min: f64 },
    #[error("downstream heights must satisfy b > a, got a = {a}, b = {b}")]
    InvalidHeights { a: f64, b: f64 },
    #[error("downstream choking: widen b-a or reduce m (width {width}, sonic flow needs at least {min_width})")]
    DownstreamChoking { width: f64, min_width: f64 },
    #[error("flow map integration error: y(1) = {end}, expected {b}")]
    FlowMapMismatch { end: f64, b: f64 },
    #[error("upstream flux density vanishes; stream coordinate undefined")]
    StagnantUpstream,
    #[error("root bracket failure: {0:?}")]
    Root(RootError),
}

/// Both asymptotic states and the coefficient functions for one run.
#[derive(Debug, Clone)]
pub struct FarField {
    pub gas: GasLaw,
    pub m: f64,
    pub upstream: Upstream,
    pub downstream: Downstream,
    pub streams: StreamProfiles,
}

impl FarField {
    pub fn build(
        gas: GasLaw,
        profile: &BernoulliProfile,
        m: f64,
        a: f64,
        b: f64,
    ) -> Result<Self, FarFieldError> {
        gas.validate()?;
        if let Some(b0) = gas.b0() {
            if !(profile.b_min() > b0) {
                return Err(GasError::BelowEnthalpyInfimum {
                    s: profile.b_min(),
                    b0,
                }
                .into());
            }
        }
        let upstream = solve_upstream(&gas, profile, m)?;
        let downstream = solve_downstream(&gas, &upstream, a, b)?;
        let streams = StreamProfiles::build(&upstream)?;
        Ok(Self {
            gas,
            m,
            upstream,
            downstream,
            streams,
        })
    }

    pub fn profile(&self) -> &BernoulliProfile {
        self.upstream.profile()
    }

    /// Upstream stream-function profile `∫₀^{x₂} ρ₀u₀`.
    pub fn psi_upstream(&self, x2: f64) -> f64 {
        self.streams.psi_bar0(x2)
    }

    /// Downstream stream-function profile `∫ₐ^{x₂} ρ₁u₁`.
    pub fn psi_downstream(&self, x2: f64) -> f64 {
        self.streams.psi_bar1(&self.downstream, x2)
    }
}

/// Advisory check of the hypotheses under which the flow is known to exist.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub delta: f64,
    pub b_min: f64,
    pub b_max: f64,
    pub b_min_above_infimum: bool,
    pub b_prime_0_nonpositive: bool,
    pub b_prime_1_nonnegative: bool,
    pub m_above_delta_quarter: bool,
    pub upstream_bracket_ok: bool,
    pub downstream_bracket_ok: bool,
    /// `B'(0) = B'(1) = 0`, assumed by the critical mass-flux statement.
    pub critical_condition: bool,
    pub warnings: Vec<String>,
}

impl AdmissibilityReport {
    pub fn all_pass(&self) -> bool {
        self.warnings.is_empty()
    }
}

pub fn check_assumptions(
    gas: &GasLaw,
    profile: &BernoulliProfile,
    m: f64,
    a: f64,
    b: f64,
) -> AdmissibilityReport {
    let delta = profile.delta();
    let mut warnings = Vec::new();
    let b_min_above_infimum = gas.b0().is_none_or(|b0| profile.b_min() > b0);
    if !b_min_above_infimum {
        warnings.push(format!(
            "inf B = {} does not exceed the enthalpy infimum",
            profile.b_min()
        ));
    }
    let d0 = profile.deriv(0.0);
    let d1 = profile.deriv(1.0);
    let b_prime_0_nonpositive = d0 <= 0.0;
    let b_prime_1_nonnegative = d1 >= 0.0;
    if !b_prime_0_nonpositive {
        warnings.push(format!("B'(0) = {d0} > 0"));
    }
    if !b_prime_1_nonnegative {
        warnings.push(format!("B'(1) = {d1} < 0"));
    }
    let m_above_delta_quarter = m > delta.powf(0.25);
    if !m_above_delta_quarter {
        warnings.push(format!(
            "m = {m} does not exceed delta^(1/4) = {}",
            delta.powf(0.25)
        ));
    }
    let mut upstream_bracket_ok = false;
    let mut downstream_bracket_ok = false;
    if b_min_above_infimum {
        match solve_upstream(gas, profile, m) {
            Ok(up) => {
                upstream_bracket_ok = true;
                match solve_downstream(gas, &up, a, b) {
                    Ok(_) => downstream_bracket_ok = true,
                    Err(e) => warnings.push(format!("downstream: {e}")),
                }
            }
            Err(e) => warnings.push(format!("upstream: {e}")),
        }
    }
    let critical_condition = d0 == 0.0 && d1 == 0.0;
    AdmissibilityReport {
        delta,
        b_min: profile.b_min(),
        b_max: profile.b_max(),
        b_min_above_infimum,
        b_prime_0_nonpositive,
        b_prime_1_nonnegative,
        m_above_delta_quarter,
        upstream_bracket_ok,
        downstream_bracket_ok,
        critical_condition,
        warnings,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gas() -> GasLaw {
        GasLaw::polytropic(0.5, 2.0).unwrap()
    }

    #[test]
    fn constant_profile_passes_everything() {
        let b = BernoulliProfile::constant(1.5).unwrap();
        let r = check_assumptions(&gas(), &b, 0.5, 0.0, 1.0);
        assert_eq!(r.delta, 0.0);
        assert!(r.all_pass(), "{:?}", r.warnings);
        assert!(r.critical_condition);
    }

    #[test]
    fn small_flux_against_quadratic_profile_is_flagged() {
        let b = BernoulliProfile::polynomial(vec![1.5025, -0.01, 0.01]).unwrap();
        let r = check_assumptions(&gas(), &b, 0.2, 0.0, 1.0);
        assert!((r.delta - 0.02).abs() < 1e-9);
        assert!(!r.m_above_delta_quarter);
        assert!(r.b_prime_0_nonpositive && r.b_prime_1_nonnegative);
        assert!(!r.critical_condition);
        assert!(!r.all_pass());
    }

    #[test]
    fn increasing_profile_at_lower_wall_is_flagged() {
        let b = BernoulliProfile::polynomial(vec![1.5, 0.01]).unwrap();
        let r = check_assumptions(&gas(), &b, 0.5, 0.0, 1.0);
        assert!(!r.b_prime_0_nonpositive);
    }

    #[test]
    fn supersonic_flux_fails_upstream_bracket() {
        let b = BernoulliProfile::constant(1.5).unwrap();
        let r = check_assumptions(&gas(), &b, 1.2, 0.0, 1.0);
        assert!(!r.upstream_bracket_ok);
        assert!(!r.downstream_bracket_ok);
    }

    #[test]
    fn builds_bundle_for_widening_nozzle() {
        let b = BernoulliProfile::constant(1.5).unwrap();
        let ff = FarField::build(gas(), &b, 0.6, 0.0, 2.0).unwrap();
        assert!((ff.psi_downstream(1.0) - 0.3).abs() < 1e-12);
        assert!((ff.psi_upstream(0.5) - 0.3).abs() < 1e-12);
    }
}
