//! Independent 1-D solve of the far-field problem on the unit strip.
//!
//! An `x₁`-independent stream function satisfies `(ψ'/H)' = F̃F̃'H` with
//! `ψ(0) = 0`, `ψ(1) = m`. With `w = ψ'/H` (the horizontal speed) this is the
//! first-order system `ψ' = ρw`, `w' = F̃F̃'ρ`, where `ρ` follows from
//! Bernoulli's law `h(ρ) + w²/2 = 𝓑̃(ψ)`. The wall speed `w(0)` is found by
//! shooting.

use crate::farfield::FarField;
use crate::numerics::interp::HermiteTable;
use crate::numerics::roots::bisect;

use super::FlowError;

#[derive(Debug, Clone)]
pub struct OracleProfile {
    pub x2: Vec<f64>,
    pub psi: Vec<f64>,
    /// `ψ' = ρw`.
    pub dpsi: Vec<f64>,
    pub wall_speed: f64,
    table: HermiteTable,
}

impl OracleProfile {
    pub fn eval(&self, x2: f64) -> f64 {
        self.table.eval(x2)
    }
}

fn density(ff: &FarField, psi: f64, w: f64) -> Option<f64> {
    let s = ff.streams.bernoulli_of_psi(psi) - 0.5 * w * w;
    let rho = ff.gas.inverse_enthalpy(s).ok()?;
    (w * w < ff.gas.c2(rho)).then_some(rho)
}

fn rhs(ff: &FarField, psi: f64, w: f64) -> Option<(f64, f64)> {
    let rho = density(ff, psi, w)?;
    let (f, fp) = ff.streams.fext_pair(psi);
    Some((rho * w, f * fp * rho))
}

/// RK4 from `x₂ = 0` with `ψ = 0`, `w = w0`; `None` once the state turns sonic.
fn shoot(
    ff: &FarField,
    w0: f64,
    n: usize,
    mut record: Option<&mut Vec<(f64, f64, f64)>>,
) -> Option<f64> {
    let dx = 1.0 / n as f64;
    let (mut psi, mut w) = (0.0, w0);
    for k in 0..n {
        let (a1, b1) = rhs(ff, psi, w)?;
        if let Some(r) = record.as_deref_mut() {
            r.push((k as f64 * dx, psi, a1));
        }
        let (a2, b2) = rhs(ff, psi + 0.5 * dx * a1, w + 0.5 * dx * b1)?;
        let (a3, b3) = rhs(ff, psi + 0.5 * dx * a2, w + 0.5 * dx * b2)?;
        let (a4, b4) = rhs(ff, psi + dx * a3, w + dx * b3)?;
        psi += dx / 6.0 * (a1 + 2.0 * a2 + 2.0 * a3 + a4);
        w += dx / 6.0 * (b1 + 2.0 * b2 + 2.0 * b3 + b4);
    }
    let (a_end, _) = rhs(ff, psi, w)?;
    if let Some(r) = record {
        r.push((1.0, psi, a_end));
    }
    Some(psi)
}

/// Shooting solve with `n` RK4 steps.
pub fn solve_1d_oracle(farfield: &FarField, n: usize) -> Result<OracleProfile, FlowError> {
    if farfield.downstream.a != 0.0 || farfield.downstream.b != 1.0 {
        return Err(FlowError::OracleGeometry);
    }
    let n = n.max(2);
    let m = farfield.m;
    let s0 = farfield.streams.bernoulli_of_psi(0.0);
    let w_max = farfield
        .gas
        .critical_state(s0)
        .map_err(|_| FlowError::OracleBracket)?
        .gamma_crit;
    let mismatch = |w0: f64| shoot(farfield, w0, n, None).map_or(f64::INFINITY, |p| p - m);
    let root =
        bisect(mismatch, 1e-12 * w_max, w_max, 1e-15, 200).map_err(|_| FlowError::OracleBracket)?;
    let mut rec = Vec::with_capacity(n + 1);
    shoot(farfield, root.x, n, Some(&mut rec)).ok_or(FlowError::OracleBracket)?;
    let x2: Vec<f64> = rec.iter().map(|r| r.0).collect();
    let psi: Vec<f64> = rec.iter().map(|r| r.1).collect();
    let dpsi: Vec<f64> = rec.iter().map(|r| r.2).collect();
    let table = HermiteTable::new(x2.clone(), psi.clone(), dpsi.clone())
        .map_err(|_| FlowError::OracleBracket)?;
    Ok(OracleProfile {
        x2,
        psi,
        dpsi,
        wall_speed: root.x,
        table,
    })
}
