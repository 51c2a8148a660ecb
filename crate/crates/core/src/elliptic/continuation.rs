//! Domain continuation `L₀, 2L₀, 4L₀, …` until the far field is reached.
//!
//! Each doubling keeps the `ξ` spacing, so the nodes of the previous domain
//! reappear in the new mesh and the warm start copies them exactly.

use serde::Serialize;

use crate::farfield::FarField;
use crate::flow::farfield_deviation;
use crate::geometry::{
    boundary_values, generate_mesh, linear_seed, truncate, Mesh, NozzleGeometry,
};

use super::assembly::Discretization;
use super::cutoff::TruncationParams;
use super::picard::solve_with;
use super::{EllipticError, SolverConfig, StreamSolution};

#[derive(Debug, Clone, PartialEq)]
pub struct ContinuationConfig {
    pub l0: f64,
    pub l_max: f64,
    /// Node counts on the first domain; later domains keep the spacing.
    pub n_xi: usize,
    pub n_eta: usize,
    pub tol_farfield: f64,
    pub solver: SolverConfig,
}

impl Default for ContinuationConfig {
    fn default() -> Self {
        Self {
            l0: 8.0,
            l_max: 32.0,
            n_xi: 401,
            n_eta: 41,
            tol_farfield: 1e-6,
            solver: SolverConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelRecord {
    pub l: f64,
    pub n_xi: usize,
    pub iterations: usize,
    pub converged: bool,
    pub dev_minus: f64,
    pub dev_plus: f64,
}

#[derive(Debug, Clone)]
pub struct ContinuationResult {
    pub solution: StreamSolution,
    pub levels: Vec<LevelRecord>,
    /// Far-field deviation fell below tolerance on a converged level.
    pub accepted: bool,
    pub warnings: Vec<String>,
}

/// Interpolate `prev` onto `mesh` column-wise in `ξ`; columns outside the old
/// domain get the bilinear seed.
pub fn transfer(
    prev: &StreamSolution,
    mesh: &Mesh,
    m: f64,
    farfield: &FarField,
    config: &SolverConfig,
) -> Vec<f64> {
    let bc = boundary_values(mesh, m, config.bc_mode, Some(farfield));
    let mut psi = linear_seed(mesh, &bc, m);
    let old = &prev.mesh;
    let l_old = old.l();
    if old.n_eta != mesh.n_eta {
        for i in 0..mesh.n_xi {
            for j in 0..mesh.n_eta {
                let xi = mesh.xi()[i];
                if xi.abs() <= l_old {
                    psi[mesh.index(i, j)] = old.interpolate(&prev.psi, xi, mesh.eta()[j]);
                }
            }
        }
        return psi;
    }
    for i in 0..mesh.n_xi {
        let xi = mesh.xi()[i];
        if xi.abs() > l_old * (1.0 + 1e-12) {
            continue;
        }
        let (io, s) = old.locate_xi(xi);
        for j in 0..mesh.n_eta {
            let a = prev.psi[old.index(io, j)];
            let b = prev.psi[old.index(io + 1, j)];
            psi[mesh.index(i, j)] = if s == 0.0 {
                a
            } else if s == 1.0 {
                b
            } else {
                (1.0 - s) * a + s * b
            };
        }
    }
    psi
}

/// Initial guess generator for the first continuation level.
pub type SeedFn<'a> = &'a dyn Fn(&Mesh) -> Vec<f64>;

/// Solve on growing domains; the first level may use an explicit seed.
pub fn continuation_solve(
    nozzle: &NozzleGeometry,
    farfield: &FarField,
    params: &TruncationParams,
    config: &ContinuationConfig,
    seed: Option<SeedFn>,
) -> Result<ContinuationResult, EllipticError> {
    if !(config.l0 > 0.0) || !(config.l_max >= config.l0) {
        return Err(EllipticError::InvalidConfig(format!(
            "need 0 < L0 <= L_max, got L0 = {}, L_max = {}",
            config.l0, config.l_max
        )));
    }
    if !(config.tol_farfield > 0.0) {
        return Err(EllipticError::InvalidConfig(
            "tol_farfield must be positive".into(),
        ));
    }
    let mut l = config.l0;
    let mut n_xi = config.n_xi;
    let mut levels: Vec<LevelRecord> = Vec::new();
    let mut warnings = Vec::new();
    let mut prev: Option<StreamSolution> = None;
    loop {
        let domain = truncate(nozzle, l)?;
        let mesh = generate_mesh(&domain, n_xi, config.n_eta)?;
        let start = match (&prev, seed) {
            (Some(p), _) => Some(transfer(p, &mesh, farfield.m, farfield, &config.solver)),
            (None, Some(f)) => Some(f(&mesh)),
            (None, None) => None,
        };
        let disc = Discretization::new(&mesh);
        let sol = solve_with(&disc, farfield, params, &config.solver, start.as_deref())?;
        let (dev_minus, dev_plus) = farfield_deviation(&sol, farfield);
        let dev = dev_minus.max(dev_plus);
        if let Some(last) = levels.last() {
            if dev >= last.dev_minus.max(last.dev_plus) && dev > config.tol_farfield {
                warnings.push(format!(
                    "slow decay; increase L cap (deviation {dev:.3e} at L = {l})"
                ));
            }
        }
        levels.push(LevelRecord {
            l,
            n_xi,
            iterations: sol.iterations,
            converged: sol.converged,
            dev_minus,
            dev_plus,
        });
        if !sol.converged {
            warnings.push(format!("nonlinear iteration did not converge at L = {l}"));
            return Ok(ContinuationResult {
                solution: sol,
                levels,
                accepted: false,
                warnings,
            });
        }
        if dev <= config.tol_farfield {
            return Ok(ContinuationResult {
                solution: sol,
                levels,
                accepted: true,
                warnings,
            });
        }
        if 2.0 * l > config.l_max * (1.0 + 1e-12) {
            warnings.push(format!(
                "L cap {} reached with far-field deviation {dev:.3e}",
                config.l_max
            ));
            return Ok(ContinuationResult {
                solution: sol,
                levels,
                accepted: false,
                warnings,
            });
        }
        l *= 2.0;
        n_xi = 2 * (n_xi - 1) + 1;
        prev = Some(sol);
    }
}
