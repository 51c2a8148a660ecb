//! Damped Picard iteration on the frozen-coefficient linearization.

use rayon::prelude::*;

use crate::farfield::FarField;
use crate::geometry::{boundary_values, linear_seed, Mesh};

use super::assembly::{Discretization, QuadCoeff};
use super::coefficients::{truncated_density, untruncated_density, Coefficients};
use super::cutoff::TruncationParams;
use super::{EllipticError, SolverConfig, StreamSolution};

const MIN_DAMPING: f64 = 1.0 / 64.0;

/// Coefficients at every quadrature point of the current iterate.
pub fn evaluate_coefficients(
    disc: &Discretization,
    farfield: &FarField,
    params: &TruncationParams,
    psi: &[f64],
) -> Result<Vec<Coefficients>, EllipticError> {
    let gas = farfield.gas;
    let streams = &farfield.streams;
    disc.quad_states(psi)
        .par_iter()
        .map(|st| {
            truncated_density(&gas, streams, st.grad_sq(), st.psi, params)
                .map_err(EllipticError::from)
        })
        .collect()
}

/// Nodes where the cutoff deviates from the identity, judged from the nodal
/// gradient reconstruction.
pub fn truncation_map(
    mesh: &Mesh,
    farfield: &FarField,
    params: &TruncationParams,
    psi: &[f64],
) -> Vec<bool> {
    let grads = mesh.nodal_gradients(psi);
    psi.par_iter()
        .zip(grads.par_iter())
        .map(|(&p, g)| {
            let s = farfield.streams.bernoulli_of_psi(p);
            let margin = g[0] * g[0] + g[1] * g[1] - farfield.gas.sigma_sq_unchecked(s);
            params.is_active(margin)
        })
        .collect()
}

/// Solve the truncated problem on one mesh. Non-convergence is reported
/// through [`StreamSolution::converged`], not as an error.
pub fn solve_bvp(
    mesh: &Mesh,
    farfield: &FarField,
    params: &TruncationParams,
    config: &SolverConfig,
    seed: Option<&[f64]>,
) -> Result<StreamSolution, EllipticError> {
    let disc = Discretization::new(mesh);
    solve_with(&disc, farfield, params, config, seed)
}

pub(crate) fn solve_with(
    disc: &Discretization,
    farfield: &FarField,
    params: &TruncationParams,
    config: &SolverConfig,
    seed: Option<&[f64]>,
) -> Result<StreamSolution, EllipticError> {
    config.validate()?;
    let mesh = disc.mesh();
    let m = farfield.m;
    let bc = boundary_values(mesh, m, config.bc_mode, Some(farfield));
    let mut psi = match seed {
        Some(s) if s.len() != mesh.len() => {
            return Err(EllipticError::SeedLength {
                expected: mesh.len(),
                found: s.len(),
            });
        }
        Some(s) => s.to_vec(),
        None => linear_seed(mesh, &bc, m),
    };
    for i in 0..mesh.n_xi {
        for j in 0..mesh.n_eta {
            if mesh.is_boundary(i, j) {
                let k = mesh.index(i, j);
                psi[k] = bc.values[k];
            }
        }
    }

    let mut theta = config.damping;
    let mut residual_history = Vec::new();
    let mut update_history = Vec::new();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < config.max_iter {
        iterations += 1;
        let coeffs = evaluate_coefficients(disc, farfield, params, &psi)?;
        let frozen: Vec<QuadCoeff> = coeffs
            .iter()
            .map(|c| QuadCoeff {
                h: c.h,
                source: c.source,
            })
            .collect();
        let system = disc.assemble(&frozen, &psi)?;
        let residual = disc.residual_norm(&system, &psi);
        if let Some(&prev) = residual_history.last() {
            if residual > prev && theta > MIN_DAMPING {
                theta = (0.5 * theta).max(MIN_DAMPING);
            }
        }
        residual_history.push(residual);
        let factor = system.matrix.cholesky()?;
        let target = factor.solve(&system.rhs);
        let current = disc.gather(&psi);
        let update = target
            .iter()
            .zip(&current)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        update_history.push(update);
        if update <= config.tol_nonlinear {
            disc.scatter(&target, &mut psi);
            converged = true;
            break;
        }
        let next: Vec<f64> = current
            .iter()
            .zip(&target)
            .map(|(c, t)| (1.0 - theta) * c + theta * t)
            .collect();
        disc.scatter(&next, &mut psi);
    }

    let coeffs = evaluate_coefficients(disc, farfield, params, &psi)?;
    let frozen: Vec<QuadCoeff> = coeffs
        .iter()
        .map(|c| QuadCoeff {
            h: c.h,
            source: c.source,
        })
        .collect();
    let final_residual = disc.residual_norm(&disc.assemble(&frozen, &psi)?, &psi);
    let mut lambda = f64::INFINITY;
    let mut big_lambda: f64 = 0.0;
    let states = disc.quad_states(&psi);
    for (c, st) in coeffs.iter().zip(&states) {
        lambda = lambda.min(c.h);
        big_lambda = big_lambda.max(c.h - 2.0 * c.h1 * st.grad_sq());
    }
    let truncated_quad_points = coeffs.iter().filter(|c| c.truncated).count();
    let max_quad_margin = coeffs
        .iter()
        .map(|c| c.margin)
        .fold(f64::NEG_INFINITY, f64::max);
    let truncation = truncation_map(mesh, farfield, params, &psi);
    Ok(StreamSolution {
        mesh: mesh.clone(),
        psi,
        iterations,
        converged,
        residual_history,
        update_history,
        final_residual,
        truncation,
        truncated_quad_points,
        max_quad_margin,
        lambda,
        big_lambda,
        params: *params,
        bc_mode: config.bc_mode,
        damping_final: theta,
    })
}

/// `‖K ψ - f‖∞` with untruncated coefficients; `None` if some quadrature
/// point is sonic or supersonic.
pub fn untruncated_residual(sol: &StreamSolution, farfield: &FarField) -> Option<f64> {
    let disc = Discretization::new(&sol.mesh);
    let states = disc.quad_states(&sol.psi);
    let coeffs: Option<Vec<QuadCoeff>> = states
        .par_iter()
        .map(|st| {
            let h =
                untruncated_density(&farfield.gas, &farfield.streams, st.grad_sq(), st.psi).ok()?;
            let (f, fp) = farfield.streams.fext_pair(st.psi);
            Some(QuadCoeff {
                h,
                source: f * fp * h,
            })
        })
        .collect();
    let system = disc.assemble(&coeffs?, &sol.psi).ok()?;
    Some(disc.residual_norm(&system, &sol.psi))
}
