//! Physical flow recovery from `ψ` and the invariant diagnostics.
//!
//! `ρ = H(|∇ψ|², ψ)`, `u = ψ_{x₂}/ρ`, `v = -ψ_{x₁}/ρ`, with `H` the
//! untruncated subsonic density.

mod diagnostics;
mod oracle;
mod streamline;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::elliptic::StreamSolution;
use crate::farfield::FarField;
use crate::geometry::Mesh;

pub use diagnostics::{
    farfield_deviation, farfield_deviation_psi, mass_flux_error, subsonic_margin,
    subsonic_margin_psi, vorticity_residual, MassFluxReport,
};
pub use oracle::{solve_1d_oracle, OracleProfile};
pub use streamline::{default_seeds, trace_streamline, Streamline};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("sonic/supersonic node: {count} nodes with |grad psi|^2 >= Sigma^2; worst (i, j, margin): {worst:?}")]
    SonicNodes {
        count: usize,
        worst: Vec<(usize, usize, f64)>,
    },
    #[error("degenerate stream function: psi vanishes everywhere but m = {m}")]
    DegenerateField { m: f64 },
    #[error("field length {found} does not match mesh with {expected} nodes")]
    LengthMismatch { expected: usize, found: usize },
    #[error("streamline from eta = {eta0} left through a wall at x1 = {x1}")]
    WallExit { eta0: f64, x1: f64 },
    #[error("stagnation on streamline from eta = {eta0}: u = {u} at x1 = {x1}")]
    Stagnation { eta0: f64, x1: f64, u: f64 },
    #[error("1-D oracle shooting bracket failure: configuration outside subsonic range")]
    OracleBracket,
    #[error("1-D oracle requires the straight strip 0 < x2 < 1")]
    OracleGeometry,
}

/// Nodal physical fields on a mesh.
#[derive(Debug, Clone)]
pub struct FlowField {
    pub mesh: Mesh,
    pub psi: Vec<f64>,
    pub rho: Vec<f64>,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub mach_sq: Vec<f64>,
    /// `|∇ψ|² - Σ²(𝓑(ψ))` per node.
    pub margin: Vec<f64>,
}

/// Recover `(ρ, u, v)` from a converged solution.
pub fn recover_fields(sol: &StreamSolution, farfield: &FarField) -> Result<FlowField, FlowError> {
    recover_from_psi(&sol.mesh, &sol.psi, farfield)
}

pub fn recover_from_psi(
    mesh: &Mesh,
    psi: &[f64],
    farfield: &FarField,
) -> Result<FlowField, FlowError> {
    if psi.len() != mesh.len() {
        return Err(FlowError::LengthMismatch {
            expected: mesh.len(),
            found: psi.len(),
        });
    }
    if farfield.m > 0.0 && psi.iter().all(|&p| p == 0.0) {
        return Err(FlowError::DegenerateField { m: farfield.m });
    }
    let gas = farfield.gas;
    let grads = mesh.nodal_gradients(psi);
    let nodal: Vec<(f64, f64, Option<f64>)> = psi
        .par_iter()
        .zip(grads.par_iter())
        .map(|(&p, g)| {
            let grad_sq = g[0] * g[0] + g[1] * g[1];
            let s = farfield.streams.bernoulli_of_psi(p);
            let sigma_sq = gas.sigma_sq_unchecked(s);
            let margin = grad_sq - sigma_sq;
            let rho = if margin < 0.0 {
                gas.subsonic_density_unchecked(grad_sq, s)
                    .ok()
                    .filter(|j| !j.sonic)
                    .map(|j| j.rho)
            } else {
                None
            };
            (grad_sq, margin, rho)
        })
        .collect();
    let bad: Vec<(usize, f64)> = nodal
        .iter()
        .enumerate()
        .filter(|(_, n)| n.2.is_none())
        .map(|(k, n)| (k, n.1))
        .collect();
    if !bad.is_empty() {
        let mut worst = bad.clone();
        worst.sort_by(|a, b| b.1.total_cmp(&a.1));
        let worst = worst
            .iter()
            .take(5)
            .map(|&(k, mg)| (k / mesh.n_eta, k % mesh.n_eta, mg))
            .collect();
        return Err(FlowError::SonicNodes {
            count: bad.len(),
            worst,
        });
    }
    let n = mesh.len();
    let mut field = FlowField {
        mesh: mesh.clone(),
        psi: psi.to_vec(),
        rho: Vec::with_capacity(n),
        u: Vec::with_capacity(n),
        v: Vec::with_capacity(n),
        mach_sq: Vec::with_capacity(n),
        margin: Vec::with_capacity(n),
    };
    for (g, (grad_sq, margin, rho)) in grads.iter().zip(nodal) {
        let rho = rho.expect("checked above");
        field.rho.push(rho);
        field.u.push(g[1] / rho);
        field.v.push(-g[0] / rho);
        field.mach_sq.push(grad_sq / (rho * rho * gas.c2(rho)));
        field.margin.push(margin);
    }
    Ok(field)
}

impl FlowField {
    /// Assemble a field from stored nodal values (e.g. read back from disk);
    /// Mach number and margin are recomputed from `ρ, u, v` and `ψ`.
    pub fn from_parts(
        mesh: &Mesh,
        psi: Vec<f64>,
        rho: Vec<f64>,
        u: Vec<f64>,
        v: Vec<f64>,
        farfield: &FarField,
    ) -> Result<Self, FlowError> {
        let n = mesh.len();
        for len in [psi.len(), rho.len(), u.len(), v.len()] {
            if len != n {
                return Err(FlowError::LengthMismatch {
                    expected: n,
                    found: len,
                });
            }
        }
        let gas = farfield.gas;
        let mach_sq = (0..n)
            .map(|k| (u[k] * u[k] + v[k] * v[k]) / gas.c2(rho[k]))
            .collect();
        let margin = subsonic_margin_nodes(mesh, &psi, farfield);
        Ok(Self {
            mesh: mesh.clone(),
            psi,
            rho,
            u,
            v,
            mach_sq,
            margin,
        })
    }

    pub fn min_u(&self) -> f64 {
        self.u.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_v(&self) -> f64 {
        self.v.iter().fold(0.0, |a, &b| a.max(b.abs()))
    }
}

pub(crate) fn subsonic_margin_nodes(mesh: &Mesh, psi: &[f64], farfield: &FarField) -> Vec<f64> {
    let grads = mesh.nodal_gradients(psi);
    psi.par_iter()
        .zip(grads.par_iter())
        .map(|(&p, g)| {
            let s = farfield.streams.bernoulli_of_psi(p);
            g[0] * g[0] + g[1] * g[1] - farfield.gas.sigma_sq_unchecked(s)
        })
        .collect()
}

/// Scalar diagnostics of one run.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DiagnosticReport {
    pub mass_flux_max_err: f64,
    pub bernoulli_max_drift: f64,
    pub vorticity_sup_residual: f64,
    pub subsonic_margin: f64,
    pub farfield_dev_minus: f64,
    pub farfield_dev_plus: f64,
    pub psi_min: f64,
    pub psi_max: f64,
    pub min_u: f64,
    pub truncation_active: bool,
    pub euler_consistent: bool,
}

/// Thresholds used by the consistency label.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConsistencyTolerances {
    /// Relative tolerance on `0 ≤ ψ ≤ m`.
    pub psi_bounds: f64,
    /// Relative mass-flux deviation.
    pub mass_flux: f64,
}

impl Default for ConsistencyTolerances {
    fn default() -> Self {
        Self {
            psi_bounds: 1e-8,
            mass_flux: 1e-4,
        }
    }
}

/// Run every diagnostic on a recovered field.
pub fn diagnose(
    field: &FlowField,
    farfield: &FarField,
    truncation_active: bool,
    tol: &ConsistencyTolerances,
) -> DiagnosticReport {
    let m = farfield.m;
    let mass = mass_flux_error(field, m);
    let drift = default_seeds(10)
        .iter()
        .map(|&eta| match trace_streamline(field, farfield, eta) {
            Ok(line) => line.bernoulli_drift,
            Err(_) => f64::INFINITY,
        })
        .fold(0.0, f64::max);
    let vort = vorticity_residual(field, farfield);
    let margin = subsonic_margin(field);
    let (dev_minus, dev_plus) = farfield_deviation_psi(&field.mesh, &field.psi, farfield);
    let psi_min = field.psi.iter().copied().fold(f64::INFINITY, f64::min);
    let psi_max = field.psi.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min_u = field.min_u();
    let euler_consistent = !truncation_active
        && psi_min >= -tol.psi_bounds * m
        && psi_max <= m * (1.0 + tol.psi_bounds)
        && min_u > 0.0
        && margin < 0.0
        && mass.max_err <= tol.mass_flux;
    DiagnosticReport {
        mass_flux_max_err: mass.max_err,
        bernoulli_max_drift: drift,
        vorticity_sup_residual: vort,
        subsonic_margin: margin,
        farfield_dev_minus: dev_minus,
        farfield_dev_plus: dev_plus,
        psi_min,
        psi_max,
        min_u,
        truncation_active,
        euler_consistent,
    }
}
