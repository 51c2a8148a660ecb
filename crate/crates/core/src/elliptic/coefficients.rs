//! Pointwise coefficients of the truncated stream-function equation.

use crate::farfield::StreamProfiles;
use crate::gas::{GasError, GasLaw};

use super::cutoff::TruncationParams;

/// Coefficients at one point, given `|∇ψ|²` and `ψ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefficients {
    /// Truncated density `H̃`.
    pub h: f64,
    /// `H̃₁ = ∂H̃/∂|∇ψ|²`.
    pub h1: f64,
    /// `F̃F̃'H̃`.
    pub source: f64,
    /// `𝓑̃(ψ)`.
    pub bernoulli: f64,
    pub sigma_sq: f64,
    /// `|∇ψ|² - Σ²(𝓑̃)`.
    pub margin: f64,
    /// The cutoff differs from the identity here.
    pub truncated: bool,
}

/// `H̃ = J(Δ̃, 𝓑̃)` with `Δ̃ = ζ₀(|∇ψ|² - Σ²) + Σ²`, plus the derived terms.
pub fn truncated_density(
    gas: &GasLaw,
    streams: &StreamProfiles,
    grad_sq: f64,
    psi: f64,
    params: &TruncationParams,
) -> Result<Coefficients, GasError> {
    let (f, fp) = streams.fext_pair(psi);
    let bernoulli = streams.h0 + 0.5 * f * f;
    let sigma_sq = gas.sigma_sq_unchecked(bernoulli);
    let margin = grad_sq - sigma_sq;
    let (zeta, dzeta) = params.cutoff_with_deriv(margin);
    let delta = (zeta + sigma_sq).max(0.0);
    let h = gas.subsonic_density_unchecked(delta, bernoulli)?.rho;
    let h1 = -dzeta * h / (2.0 * (h * h * gas.c2(h) - delta));
    Ok(Coefficients {
        h,
        h1,
        source: f * fp * h,
        bernoulli,
        sigma_sq,
        margin,
        truncated: params.is_active(margin),
    })
}

/// Untruncated density `J(|∇ψ|², 𝓑̃(ψ))`; fails on sonic or supersonic input.
pub fn untruncated_density(
    gas: &GasLaw,
    streams: &StreamProfiles,
    grad_sq: f64,
    psi: f64,
) -> Result<f64, GasError> {
    let bernoulli = streams.bernoulli_of_psi(psi);
    let j = gas.subsonic_density_unchecked(grad_sq, bernoulli)?;
    if j.sonic {
        return Err(GasError::Supersonic {
            msq: grad_sq,
            sigma_sq: gas.sigma_sq_unchecked(bernoulli),
        });
    }
    Ok(j.rho)
}
