//! The truncated quasilinear problem `div(∇ψ/H̃) = F̃F̃'H̃` and its solvers.

mod assembly;
mod coefficients;
mod continuation;
mod cutoff;
mod picard;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farfield::BernoulliProfile;
use crate::gas::{GasError, GasLaw};
use crate::geometry::{BcMode, GeometryError, Mesh};
use crate::numerics::banded::BandError;

pub use assembly::{Discretization, LinearSystem, QuadCoeff, QuadState};
pub use coefficients::{truncated_density, untruncated_density, Coefficients};
pub use continuation::{
    continuation_solve, transfer, ContinuationConfig, ContinuationResult, LevelRecord, SeedFn,
};
pub use cutoff::{cutoff, Blend, TruncationParams};
pub use picard::{evaluate_coefficients, solve_bvp, truncation_map, untruncated_residual};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error(transparent)]
    Gas(#[from] GasError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(
        "internal invariant violated: coefficient H = {value} at quadrature point {quad_point}"
    )]
    NonPositiveCoefficient { quad_point: usize, value: f64 },
    #[error("linear solver failure: {0:?}")]
    LinearSolve(BandError),
    #[error("seed has {found} values, mesh has {expected} nodes")]
    SeedLength { expected: usize, found: usize },
    #[error("invalid solver configuration: {0}")]
    InvalidConfig(String),
}

impl From<BandError> for EllipticError {
    fn from(e: BandError) -> Self {
        EllipticError::LinearSolve(e)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub tol_nonlinear: f64,
    pub max_iter: usize,
    pub damping: f64,
    pub bc_mode: BcMode,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self {
            tol_nonlinear: 1e-10,
            max_iter: 200,
            damping: 0.7,
            bc_mode: BcMode::Paper,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<(), EllipticError> {
        if !(self.tol_nonlinear > 0.0) {
            return Err(EllipticError::InvalidConfig(
                "tol_nonlinear must be positive".into(),
            ));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(EllipticError::InvalidConfig(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if self.max_iter == 0 {
            return Err(EllipticError::InvalidConfig(
                "max_iter must be at least 1".into(),
            ));
        }
        Ok(())
    }
}

/// `ε₀ = scale · Σ²(B̲)`.
pub fn default_eps(gas: &GasLaw, profile: &BernoulliProfile, scale: f64) -> Result<f64, GasError> {
    Ok(scale * gas.sigma_sq(profile.b_min())?)
}

/// Converged (or last) iterate of the Picard loop with solver metadata.
#[derive(Debug, Clone)]
pub struct StreamSolution {
    pub mesh: Mesh,
    pub psi: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
    /// `‖K(ψᵏ)ψᵏ - f(ψᵏ)‖∞` per iteration.
    pub residual_history: Vec<f64>,
    /// `‖ψ̂ - ψᵏ‖∞` per iteration.
    pub update_history: Vec<f64>,
    pub final_residual: f64,
    /// Per node: the cutoff is active at the nodal gradient.
    pub truncation: Vec<bool>,
    pub truncated_quad_points: usize,
    /// Largest `|∇ψ|² - Σ²` over quadrature points.
    pub max_quad_margin: f64,
    /// Ellipticity bounds `λ = min H̃`, `Λ = max(H̃ - 2H̃₁|∇ψ|²)`.
    pub lambda: f64,
    pub big_lambda: f64,
    pub params: TruncationParams,
    pub bc_mode: BcMode,
    pub damping_final: f64,
}

impl StreamSolution {
    pub fn truncation_active(&self) -> bool {
        self.truncated_quad_points > 0 || self.truncation.iter().any(|&t| t)
    }

    pub fn psi_min(&self) -> f64 {
        self.psi.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn psi_max(&self) -> f64 {
        self.psi.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }
}
