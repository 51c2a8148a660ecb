//! Sweep of the mass flux toward the critical value `m̂`.
//!
//! Each sample solves the truncated problem by domain continuation. When the
//! cutoff is active in the converged iterate the truncation parameter is
//! refined (`ε → ε/8`) and the solve repeated, down to a floor proportional
//! to `Σ²(B̲)`. A sample is *rejected* when the solver fails to converge, the
//! far-field states do not exist, or the cutoff is still active at the floor.

use std::fmt::Write as _;

use serde::Serialize;
use thiserror::Error;

use crate::elliptic::{
    continuation_solve, transfer, ContinuationConfig, EllipticError, SeedFn, StreamSolution,
    TruncationParams,
};
use crate::farfield::{
    check_assumptions, upstream_flux_range, BernoulliProfile, FarField, FarFieldError,
};
use crate::flow::subsonic_margin_psi;
use crate::gas::GasLaw;
use crate::geometry::{Mesh, NozzleGeometry};

/// `ε` is refined down to `EPS_FLOOR · Σ²(B̲)`.
pub const EPS_FLOOR: f64 = 1e-6;
/// Accepted samples with `M ≥ -EPS_ACCEPT · Σ²(B̲)` are flagged near-sonic.
pub const EPS_ACCEPT: f64 = 1e-3;
const EPS_REFINE: f64 = 8.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriticalError {
    #[error("infeasible configuration: no accepted subsonic solution at m = {m} ({reason})")]
    Infeasible { m: f64, reason: String },
    #[error("invalid sweep: {0}")]
    InvalidInput(String),
    #[error(transparent)]
    FarField(#[from] FarFieldError),
    #[error(transparent)]
    Elliptic(#[from] EllipticError),
}

/// Problem data shared by every sample.
#[derive(Debug, Clone)]
pub struct CriticalSetup {
    pub gas: GasLaw,
    pub profile: BernoulliProfile,
    pub nozzle: NozzleGeometry,
    pub continuation: ContinuationConfig,
    /// `ε₀ = eps0_scale · Σ²(B̲)`.
    pub eps0_scale: f64,
}

impl CriticalSetup {
    fn sigma_sq_min(&self) -> Result<f64, CriticalError> {
        Ok(self
            .gas
            .sigma_sq(self.profile.b_min())
            .map_err(FarFieldError::from)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginSample {
    pub m: f64,
    /// `M(m)`; NaN when no iterate exists.
    pub margin: f64,
    pub converged: bool,
    pub truncation_active: bool,
    /// Truncation parameter of the final solve.
    pub eps: f64,
    pub accepted: bool,
    pub near_sonic: bool,
    pub note: Option<String>,
}

impl MarginSample {
    pub fn rejected(&self) -> bool {
        !self.accepted
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginCurve {
    /// Sorted by `m`.
    pub samples: Vec<MarginSample>,
    /// Largest accepted `m` below the smallest rejected `m`, and that rejected `m`.
    pub bracket: Option<(f64, f64)>,
}

impl MarginCurve {
    fn from_samples(mut samples: Vec<MarginSample>) -> Self {
        samples.sort_by(|a, b| a.m.total_cmp(&b.m));
        let hi = samples.iter().find(|s| s.rejected()).map(|s| s.m);
        let lo = samples
            .iter()
            .filter(|s| s.accepted && hi.is_none_or(|h| s.m < h))
            .map(|s| s.m)
            .next_back();
        let bracket = match (lo, hi) {
            (Some(l), Some(h)) => Some((l, h)),
            _ => None,
        };
        Self { samples, bracket }
    }

    /// CSV with header `m,M,converged,truncation_active`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,M,converged,truncation_active\n");
        for s in &self.samples {
            let _ = writeln!(
                out,
                "{},{},{},{}",
                s.m, s.margin, s.converged, s.truncation_active
            );
        }
        out
    }
}

/// Outcome of one sample, with the iterate kept for warm starts.
struct SampleRun {
    sample: MarginSample,
    solution: Option<StreamSolution>,
}

fn warm_seed(
    prev: &(f64, StreamSolution),
    mesh: &Mesh,
    m: f64,
    ff: &FarField,
    setup: &CriticalSetup,
) -> Vec<f64> {
    let (m_prev, sol) = prev;
    let scale = m / m_prev;
    transfer(sol, mesh, m, ff, &setup.continuation.solver)
        .into_iter()
        .map(|p| p * scale)
        .collect()
}

fn run_sample(
    setup: &CriticalSetup,
    m: f64,
    warm: Option<&(f64, StreamSolution)>,
    sigma_sq: f64,
) -> SampleRun {
    let fail = |note: String| SampleRun {
        sample: MarginSample {
            m,
            margin: f64::NAN,
            converged: false,
            truncation_active: false,
            eps: f64::NAN,
            accepted: false,
            near_sonic: false,
            note: Some(note),
        },
        solution: None,
    };
    let ff = match FarField::build(setup.gas, &setup.profile, m, setup.nozzle.a, setup.nozzle.b) {
        Ok(ff) => ff,
        Err(e) => return fail(e.to_string()),
    };
    let floor = EPS_FLOOR * sigma_sq;
    let mut eps = setup.eps0_scale * sigma_sq;
    let mut start: Option<(f64, StreamSolution)> = warm.cloned();
    loop {
        let params = TruncationParams::new(eps);
        let seed_fn =
            |mesh: &Mesh| warm_seed(start.as_ref().expect("checked"), mesh, m, &ff, setup);
        let seed: Option<SeedFn> = if start.is_some() {
            Some(&seed_fn)
        } else {
            None
        };
        let result =
            match continuation_solve(&setup.nozzle, &ff, &params, &setup.continuation, seed) {
                Ok(r) => r,
                Err(e) => return fail(e.to_string()),
            };
        let sol = result.solution;
        let margin = subsonic_margin_psi(&sol.mesh, &sol.psi, &ff);
        let converged = sol.converged;
        let truncated = sol.truncation_active();
        if converged && truncated && eps / EPS_REFINE >= floor {
            eps /= EPS_REFINE;
            start = Some((m, sol));
            continue;
        }
        let accepted = converged && !truncated && margin < 0.0;
        let note = if !converged {
            Some("nonlinear iteration did not converge".to_string())
        } else if truncated {
            Some(format!("cutoff active at eps = {eps:.3e}"))
        } else {
            None
        };
        return SampleRun {
            sample: MarginSample {
                m,
                margin,
                converged,
                truncation_active: truncated,
                eps,
                accepted,
                near_sonic: accepted && margin >= -EPS_ACCEPT * sigma_sq,
                note,
            },
            solution: converged.then_some(sol),
        };
    }
}

/// Solve at each `m` in increasing order, warm-starting from the previous
/// converged iterate. Per-sample failures are recorded, not returned.
pub fn margin_curve(setup: &CriticalSetup, m_values: &[f64]) -> Result<MarginCurve, CriticalError> {
    if m_values.iter().any(|&m| !(m > 0.0 && m.is_finite())) {
        return Err(CriticalError::InvalidInput(
            "mass fluxes must be positive".into(),
        ));
    }
    if m_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(CriticalError::InvalidInput(
            "mass fluxes must be increasing".into(),
        ));
    }
    let sigma_sq = setup.sigma_sq_min()?;
    let mut warm: Option<(f64, StreamSolution)> = None;
    let mut samples = Vec::with_capacity(m_values.len());
    for &m in m_values {
        let run = run_sample(setup, m, warm.as_ref(), sigma_sq);
        if let Some(sol) = run.solution {
            warm = Some((m, sol));
        }
        samples.push(run.sample);
    }
    Ok(MarginCurve::from_samples(samples))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalResult {
    pub m_lo: f64,
    pub m_hi: f64,
    /// The accepted endpoint has `M ≥ -EPS_ACCEPT · Σ²(B̲)`.
    pub near_sonic: bool,
    pub curve: MarginCurve,
    pub warnings: Vec<String>,
}

/// Bisect between an accepted and a rejected sample until the bracket is at
/// most `tol_m` wide. The search starts at `m0` (default: half the largest
/// upstream subsonic flux) and at the largest upstream subsonic flux.
pub fn find_critical(
    setup: &CriticalSetup,
    m0: Option<f64>,
    tol_m: f64,
) -> Result<CriticalResult, CriticalError> {
    if !(tol_m > 0.0) {
        return Err(CriticalError::InvalidInput(format!(
            "tol_m must be positive, got {tol_m}"
        )));
    }
    let sigma_sq = setup.sigma_sq_min()?;
    let (_, flux_max) = upstream_flux_range(&setup.gas, &setup.profile)?;
    let m0 = m0.unwrap_or(0.5 * flux_max);
    if !(m0 > 0.0 && m0 < flux_max) {
        return Err(CriticalError::InvalidInput(format!(
            "start m0 = {m0} must lie in (0, {flux_max})"
        )));
    }
    let mut warnings = Vec::new();
    let report = check_assumptions(
        &setup.gas,
        &setup.profile,
        m0,
        setup.nozzle.a,
        setup.nozzle.b,
    );
    if !report.critical_condition {
        warnings.push(
            "B'(0) = B'(1) = 0 does not hold; the critical flux statement assumes it".to_string(),
        );
    }

    let mut samples = Vec::new();
    let first = run_sample(setup, m0, None, sigma_sq);
    if !first.sample.accepted {
        let reason = first
            .sample
            .note
            .clone()
            .unwrap_or_else(|| format!("margin {}", first.sample.margin));
        return Err(CriticalError::Infeasible { m: m0, reason });
    }
    let mut lo = (
        m0,
        first.solution.expect("accepted samples carry a solution"),
    );
    samples.push(first.sample);
    let top = run_sample(setup, flux_max, Some(&lo), sigma_sq);
    let mut hi = flux_max;
    let top_accepted = top.sample.accepted;
    samples.push(top.sample);
    if top_accepted {
        warnings.push(format!(
            "largest subsonic flux {flux_max} accepted; no rejection found"
        ));
        let curve = MarginCurve::from_samples(samples);
        return Ok(CriticalResult {
            m_lo: flux_max,
            m_hi: flux_max,
            near_sonic: true,
            curve,
            warnings,
        });
    }
    while hi - lo.0 > tol_m {
        let mid = 0.5 * (lo.0 + hi);
        let run = run_sample(setup, mid, Some(&lo), sigma_sq);
        if run.sample.accepted {
            lo = (
                mid,
                run.solution.expect("accepted samples carry a solution"),
            );
        } else {
            hi = mid;
        }
        samples.push(run.sample);
    }
    let m_lo = lo.0;
    let curve = MarginCurve::from_samples(samples);
    let near_sonic = curve
        .samples
        .iter()
        .find(|s| s.m == m_lo)
        .is_some_and(|s| s.near_sonic);
    Ok(CriticalResult {
        m_lo,
        m_hi: hi,
        near_sonic,
        curve,
        warnings,
    })
}
