//! Streamline tracing through the recovered velocity field.
//!
//! In mapped coordinates a streamline obeys
//! `dη/dξ = η_{x₁} + (v/u) η_{x₂}`, integrated with RK4 at a quarter of the
//! mesh spacing on bilinearly interpolated nodal fields.

use crate::farfield::FarField;

use super::{FlowError, FlowField};

#[derive(Debug, Clone, PartialEq)]
pub struct Streamline {
    /// Physical points `(x₁, x₂)` along the path.
    pub points: Vec<(f64, f64)>,
    /// `max |h(ρ) + q²/2 - 𝓑(ψ_seed)|` along the path.
    pub bernoulli_drift: f64,
    pub psi_seed: f64,
    pub eta_end: f64,
}

/// `n` seed heights `η = (k + 1/2)/n`.
pub fn default_seeds(n: usize) -> Vec<f64> {
    (0..n).map(|k| (k as f64 + 0.5) / n as f64).collect()
}

/// Trace from `(ξ, η) = (-L + h, eta0)` to `ξ = L - h`.
pub fn trace_streamline(
    field: &FlowField,
    farfield: &FarField,
    eta0: f64,
) -> Result<Streamline, FlowError> {
    let mesh = &field.mesh;
    let nozzle = &mesh.domain.nozzle;
    let l = mesh.l();
    let h = mesh.h_xi();
    let gas = farfield.gas;
    let walls = |xi: f64| {
        let (f1, d1, _) = nozzle.f1.eval_all(xi);
        let (f2, d2, _) = nozzle.f2.eval_all(xi);
        (f1, d1, f2, d2)
    };
    let to_physical = |xi: f64, eta: f64| {
        let (f1, _, f2, _) = walls(xi);
        (xi, f1 + eta * (f2 - f1))
    };
    let velocity = |xi: f64, eta: f64| {
        (
            mesh.interpolate(&field.u, xi, eta),
            mesh.interpolate(&field.v, xi, eta),
        )
    };
    let rhs = |xi: f64, eta: f64| -> Result<f64, FlowError> {
        let (u, v) = velocity(xi, eta);
        if !(u > 0.0) {
            return Err(FlowError::Stagnation { eta0, x1: xi, u });
        }
        let (f1, d1, f2, d2) = walls(xi);
        let w = f2 - f1;
        Ok(-(d1 + eta * (d2 - d1)) / w + v / (u * w))
    };
    let psi_seed = mesh.interpolate(&field.psi, -l + h, eta0);
    let target = farfield.streams.bernoulli_of_psi(psi_seed);
    let bernoulli_at = |xi: f64, eta: f64| {
        let rho = mesh.interpolate(&field.rho, xi, eta);
        let (u, v) = velocity(xi, eta);
        gas.h(rho) + 0.5 * (u * u + v * v)
    };

    let start = -l + h;
    let end = l - h;
    let n_steps = ((end - start) / (0.25 * h)).ceil().max(1.0) as usize;
    let dxi = (end - start) / n_steps as f64;
    let mut xi = start;
    let mut eta = eta0;
    let mut points = vec![to_physical(xi, eta)];
    let mut drift = (bernoulli_at(xi, eta) - target).abs();
    for _ in 0..n_steps {
        let k1 = rhs(xi, eta)?;
        let k2 = rhs(xi + 0.5 * dxi, eta + 0.5 * dxi * k1)?;
        let k3 = rhs(xi + 0.5 * dxi, eta + 0.5 * dxi * k2)?;
        let k4 = rhs(xi + dxi, eta + dxi * k3)?;
        eta += dxi / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        xi += dxi;
        if !(0.0..=1.0).contains(&eta) {
            return Err(FlowError::WallExit { eta0, x1: xi });
        }
        let (u, _) = velocity(xi, eta);
        if !(u > 0.0) {
            return Err(FlowError::Stagnation { eta0, x1: xi, u });
        }
        points.push(to_physical(xi, eta));
        drift = drift.max((bernoulli_at(xi, eta) - target).abs());
    }
    Ok(Streamline {
        points,
        bernoulli_drift: drift,
        psi_seed,
        eta_end: eta,
    })
}
