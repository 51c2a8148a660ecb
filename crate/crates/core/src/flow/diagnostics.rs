//! Scalar invariant checks on a recovered field.

use crate::elliptic::StreamSolution;
use crate::farfield::FarField;
use crate::geometry::Mesh;
use crate::numerics::quadrature::trapezoid_samples;

use super::{subsonic_margin_nodes, FlowField};

#[derive(Debug, Clone, PartialEq)]
pub struct MassFluxReport {
    /// `max |∫ρu dx₂ - m| / m` over all columns.
    pub max_err: f64,
    /// `(x₁, ∫ρu dx₂)` per column.
    pub per_section: Vec<(f64, f64)>,
}

/// Mass flux through every mesh column by the trapezoid rule in `x₂`.
pub fn mass_flux_error(field: &FlowField, m: f64) -> MassFluxReport {
    let mesh = &field.mesh;
    let mut per_section = Vec::with_capacity(mesh.n_xi);
    let mut max_err: f64 = 0.0;
    for i in 0..mesh.n_xi {
        let col = mesh.column(i);
        let x2: Vec<f64> = mesh.eta().iter().map(|&e| col.x2(e)).collect();
        let flux: Vec<f64> = (0..mesh.n_eta)
            .map(|j| {
                let k = mesh.index(i, j);
                field.rho[k] * field.u[k]
            })
            .collect();
        let total = trapezoid_samples(&x2, &flux);
        max_err = max_err.max((total - m).abs() / m);
        per_section.push((col.xi, total));
    }
    MassFluxReport {
        max_err,
        per_section,
    }
}

/// `sup |ω/ρ + F̃F̃'(ψ)|` over interior nodes, with `ω = v_{x₁} - u_{x₂}` from
/// the discrete curl of the nodal velocity.
pub fn vorticity_residual(field: &FlowField, farfield: &FarField) -> f64 {
    let mesh = &field.mesh;
    let gu = mesh.nodal_gradients(&field.u);
    let gv = mesh.nodal_gradients(&field.v);
    let mut sup: f64 = 0.0;
    for i in 1..mesh.n_xi - 1 {
        for j in 1..mesh.n_eta - 1 {
            let k = mesh.index(i, j);
            let omega = gv[k][0] - gu[k][1];
            let (f, fp) = farfield.streams.fext_pair(field.psi[k]);
            sup = sup.max((omega / field.rho[k] + f * fp).abs());
        }
    }
    sup
}

/// `M = sup(|∇ψ|² - Σ²(𝓑(ψ)))` over nodes.
pub fn subsonic_margin(field: &FlowField) -> f64 {
    field
        .margin
        .iter()
        .copied()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// The margin computed from `ψ` alone; defined for truncated solutions too.
pub fn subsonic_margin_psi(mesh: &Mesh, psi: &[f64], farfield: &FarField) -> f64 {
    subsonic_margin_nodes(mesh, psi, farfield)
        .into_iter()
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Deviation from the asymptotic profiles at the probe columns `ξ = ∓L/2`.
pub fn farfield_deviation(sol: &StreamSolution, farfield: &FarField) -> (f64, f64) {
    farfield_deviation_psi(&sol.mesh, &sol.psi, farfield)
}

/// The end columns carry Dirichlet data, so the deviation is measured on the
/// columns nearest `ξ = ∓L/2`, against `ψ̄₀` upstream and `ψ̄₁` downstream
/// evaluated at the affine image of `η`.
pub fn farfield_deviation_psi(mesh: &Mesh, psi: &[f64], farfield: &FarField) -> (f64, f64) {
    let l = mesh.l();
    let probe = |xi: f64| ((xi + l) / mesh.h_xi()).round() as usize;
    let (a, b) = (mesh.domain.nozzle.a, mesh.domain.nozzle.b);
    let i_minus = probe(-0.5 * l);
    let i_plus = probe(0.5 * l);
    let mut dev_minus: f64 = 0.0;
    let mut dev_plus: f64 = 0.0;
    for j in 0..mesh.n_eta {
        let eta = mesh.eta()[j];
        dev_minus = dev_minus.max((psi[mesh.index(i_minus, j)] - farfield.psi_upstream(eta)).abs());
        dev_plus = dev_plus
            .max((psi[mesh.index(i_plus, j)] - farfield.psi_downstream(a + eta * (b - a))).abs());
    }
    (dev_minus, dev_plus)
}
