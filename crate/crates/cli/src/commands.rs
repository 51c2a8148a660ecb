//! Command pipelines. Each fills a [`RunSummary`]; errors end up in its
//! `failure` field.

use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::{bail, ensure, Context, Result};
use serde::Serialize;

use subsonic_core::critical::{find_critical, margin_curve, CriticalSetup, MarginCurve};
use subsonic_core::elliptic::{
    continuation_solve, default_eps, evaluate_coefficients, truncation_map, ContinuationResult,
    Discretization, LevelRecord, TruncationParams,
};
use subsonic_core::farfield::{check_assumptions, AdmissibilityReport, FarField};
use subsonic_core::flow::{
    diagnose, recover_fields, subsonic_margin_psi, ConsistencyTolerances, DiagnosticReport,
    FlowField,
};
use subsonic_core::geometry::{generate_mesh, truncate};

use crate::config::RunConfig;
use crate::io::{field_csv, read_field_csv, write_text};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    Solve,
    Farfield,
    Critical,
    Verify,
    Gastable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    /// The truncated solution solves the untruncated problem.
    EulerConsistent,
    /// Only the modified (truncated) problem is known to be solved.
    ModifiedOnly,
    Completed,
    Failed,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::EulerConsistent | Status::Completed => 0,
            Status::ModifiedOnly => 2,
            Status::Failed => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FarFieldSummary {
    pub m: f64,
    pub rho0: f64,
    pub rho1: f64,
    pub u0_range: (f64, f64),
    pub u1_range: (f64, f64),
    pub a: f64,
    pub b: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SolverSummary {
    pub l_used: f64,
    pub n_xi: usize,
    pub n_eta: usize,
    pub eps: f64,
    pub iterations: usize,
    pub converged: bool,
    pub final_residual: f64,
    pub farfield_accepted: bool,
    pub lambda: f64,
    pub big_lambda: f64,
    pub truncated_quad_points: usize,
    pub levels: Vec<LevelRecord>,
}

impl SolverSummary {
    fn new(res: &ContinuationResult, eps: f64) -> Self {
        let sol = &res.solution;
        Self {
            l_used: sol.mesh.l(),
            n_xi: sol.mesh.n_xi,
            n_eta: sol.mesh.n_eta,
            eps,
            iterations: sol.iterations,
            converged: sol.converged,
            final_residual: sol.final_residual,
            farfield_accepted: res.accepted,
            lambda: sol.lambda,
            big_lambda: sol.big_lambda,
            truncated_quad_points: sol.truncated_quad_points,
            levels: res.levels.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriticalSummary {
    pub bracket: Option<(f64, f64)>,
    pub near_sonic: Option<bool>,
    pub curve: MarginCurve,
}

/// Written for every run, including failed ones.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunSummary {
    pub command: Command,
    pub status: Status,
    pub exit_code: i32,
    pub failure: Option<String>,
    pub warnings: Vec<String>,
    pub admissibility: Option<AdmissibilityReport>,
    pub farfield: Option<FarFieldSummary>,
    pub solver: Option<SolverSummary>,
    pub diagnostics: Option<DiagnosticReport>,
    /// Consistency checks that failed.
    pub violations: Vec<String>,
    pub euler_consistent: bool,
    pub margin: Option<f64>,
    pub critical: Option<CriticalSummary>,
    pub files: Vec<PathBuf>,
}

impl RunSummary {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            status: Status::Failed,
            exit_code: 1,
            failure: None,
            warnings: Vec::new(),
            admissibility: None,
            farfield: None,
            solver: None,
            diagnostics: None,
            violations: Vec::new(),
            euler_consistent: false,
            margin: None,
            critical: None,
            files: Vec::new(),
        }
    }

    pub fn fail(&mut self, reason: String) {
        self.status = Status::Failed;
        self.exit_code = 1;
        self.failure = Some(reason);
    }

    fn finish(&mut self, status: Status) {
        self.status = status;
        self.exit_code = status.exit_code();
    }
}

/// Run `command`; the summary is complete whether or not it succeeded.
pub fn run(command: Command, cfg: &RunConfig) -> RunSummary {
    let mut summary = RunSummary::new(command);
    let result = match command {
        Command::Solve => solve(cfg, &mut summary),
        Command::Farfield => farfield(cfg, &mut summary),
        Command::Critical => critical(cfg, &mut summary),
        Command::Verify => verify(cfg, &mut summary),
        Command::Gastable => gastable(cfg, &mut summary),
    };
    if let Err(e) = result {
        summary.fail(format!("{e:#}"));
    }
    summary
}

fn build_farfield(cfg: &RunConfig, s: &mut RunSummary) -> Result<FarField> {
    let (a, b) = (cfg.nozzle.a, cfg.nozzle.b);
    let report = check_assumptions(&cfg.gas, &cfg.profile, cfg.m, a, b);
    s.warnings.extend(
        report
            .warnings
            .iter()
            .map(|w| format!("admissibility: {w}")),
    );
    s.admissibility = Some(report);
    let ff = FarField::build(cfg.gas, &cfg.profile, cfg.m, a, b).context("far-field states")?;
    s.farfield = Some(FarFieldSummary {
        m: cfg.m,
        rho0: ff.upstream.rho0,
        rho1: ff.downstream.rho1,
        u0_range: ff.upstream.u0_range(),
        u1_range: ff.downstream.u1_range(),
        a,
        b,
    });
    Ok(ff)
}

fn params(cfg: &RunConfig) -> Result<TruncationParams> {
    let eps = default_eps(&cfg.gas, &cfg.profile, cfg.solver.eps0_scale)
        .context("truncation parameter")?;
    Ok(TruncationParams::new(eps))
}

fn violations(report: &DiagnosticReport, m: f64, tol: &ConsistencyTolerances) -> Vec<String> {
    let mut v = Vec::new();
    if report.truncation_active {
        v.push("truncation: cutoff active in the solution".to_string());
    }
    if report.psi_min < -tol.psi_bounds * m || report.psi_max > m * (1.0 + tol.psi_bounds) {
        v.push(format!(
            "psi_bounds: psi in [{}, {}] leaves [0, {m}]",
            report.psi_min, report.psi_max
        ));
    }
    if !(report.min_u > 0.0) {
        v.push(format!(
            "min_u: horizontal velocity reaches {}",
            report.min_u
        ));
    }
    if !(report.subsonic_margin < 0.0) {
        v.push(format!("subsonic_margin: {}", report.subsonic_margin));
    }
    if !(report.mass_flux_max_err <= tol.mass_flux) {
        v.push(format!(
            "mass_flux: relative deviation {:.3e} exceeds {:.0e}",
            report.mass_flux_max_err, tol.mass_flux
        ));
    }
    v
}

fn record_diagnostics(
    s: &mut RunSummary,
    field: &FlowField,
    ff: &FarField,
    truncation_active: bool,
) {
    let tol = ConsistencyTolerances::default();
    let report = diagnose(field, ff, truncation_active, &tol);
    s.violations = violations(&report, ff.m, &tol);
    s.euler_consistent = report.euler_consistent;
    s.margin = Some(report.subsonic_margin);
    s.finish(if report.euler_consistent {
        Status::EulerConsistent
    } else {
        Status::ModifiedOnly
    });
    s.diagnostics = Some(report);
}

fn solve(cfg: &RunConfig, s: &mut RunSummary) -> Result<()> {
    let ff = build_farfield(cfg, s)?;
    let params = params(cfg)?;
    let res = continuation_solve(&cfg.nozzle, &ff, &params, &cfg.solver.continuation(), None)
        .context("elliptic solve")?;
    s.warnings.extend(res.warnings.iter().cloned());
    s.solver = Some(SolverSummary::new(&res, params.eps));
    let sol = res.solution;
    ensure!(
        sol.converged,
        "nonlinear iteration did not converge in {} iterations",
        sol.iterations
    );
    s.margin = Some(subsonic_margin_psi(&sol.mesh, &sol.psi, &ff));
    let field = match recover_fields(&sol, &ff) {
        Ok(f) => f,
        Err(e) => {
            // The truncated problem is solved but no physical field exists.
            s.violations.push(format!("field recovery: {e}"));
            s.finish(Status::ModifiedOnly);
            return Ok(());
        }
    };
    write_text(&cfg.outputs.field_csv_path, &field_csv(&field))?;
    s.files.push(cfg.outputs.field_csv_path.clone());
    record_diagnostics(s, &field, &ff, sol.truncation_active());
    Ok(())
}

fn farfield(cfg: &RunConfig, s: &mut RunSummary) -> Result<()> {
    let ff = build_farfield(cfg, s)?;
    let (a, b) = (cfg.nozzle.a, cfg.nozzle.b);
    let mut out = String::from("t,x2,u0,psi0,y,u1,psi1\n");
    let n = 200;
    for k in 0..=n {
        let t = k as f64 / n as f64;
        let y = a + t * (b - a);
        let _ = writeln!(
            out,
            "{t},{t},{},{},{y},{},{}",
            ff.upstream.u0(t),
            ff.psi_upstream(t),
            ff.downstream.u1(y),
            ff.psi_downstream(y)
        );
    }
    write_text(&cfg.outputs.profiles_csv_path, &out)?;
    s.files.push(cfg.outputs.profiles_csv_path.clone());
    s.finish(Status::Completed);
    Ok(())
}

fn critical(cfg: &RunConfig, s: &mut RunSummary) -> Result<()> {
    let setup = CriticalSetup {
        gas: cfg.gas,
        profile: cfg.profile.clone(),
        nozzle: cfg.nozzle.clone(),
        continuation: cfg.solver.continuation(),
        eps0_scale: cfg.solver.eps0_scale,
    };
    let summary = match &cfg.critical.m_values {
        Some(values) => {
            let curve = margin_curve(&setup, values).context("margin sweep")?;
            CriticalSummary {
                bracket: curve.bracket,
                near_sonic: None,
                curve,
            }
        }
        None => {
            let res = find_critical(&setup, cfg.critical.m_start, cfg.critical.tol_m)
                .context("critical search")?;
            s.warnings.extend(res.warnings.iter().cloned());
            CriticalSummary {
                bracket: Some((res.m_lo, res.m_hi)),
                near_sonic: Some(res.near_sonic),
                curve: res.curve,
            }
        }
    };
    write_text(&cfg.outputs.margin_csv_path, &summary.curve.to_csv())?;
    s.files.push(cfg.outputs.margin_csv_path.clone());
    s.critical = Some(summary);
    s.finish(Status::Completed);
    Ok(())
}

fn verify(cfg: &RunConfig, s: &mut RunSummary) -> Result<()> {
    let path = &cfg.outputs.field_csv_path;
    let table = read_field_csv(path)?;
    let n_eta = cfg.solver.n_eta;
    let rows = table.x1.len();
    ensure!(
        rows > 0 && rows % n_eta == 0,
        "{rows} rows do not form columns of n_eta = {n_eta} nodes"
    );
    let n_xi = rows / n_eta;
    let l = table.x1[rows - 1];
    let mesh =
        generate_mesh(&truncate(&cfg.nozzle, l)?, n_xi, n_eta).context("rebuilding the mesh")?;
    for i in 0..n_xi {
        for j in 0..n_eta {
            let k = mesh.index(i, j);
            let (x1, x2) = mesh.node(i, j);
            if (x1 - table.x1[k]).abs() > 1e-9 * (1.0 + x1.abs())
                || (x2 - table.x2[k]).abs() > 1e-9 * (1.0 + x2.abs())
            {
                bail!(
                    "node ({i}, {j}) at ({}, {}) does not match the configured nozzle ({x1}, {x2})",
                    table.x1[k],
                    table.x2[k]
                );
            }
        }
    }
    let ff = build_farfield(cfg, s)?;
    let params = params(cfg)?;
    let disc = Discretization::new(&mesh);
    let coeffs = evaluate_coefficients(&disc, &ff, &params, &table.psi)
        .context("coefficients of the stored field")?;
    let truncation_active = coeffs.iter().any(|c| c.truncated)
        || truncation_map(&mesh, &ff, &params, &table.psi)
            .into_iter()
            .any(|t| t);
    let field = FlowField::from_parts(&mesh, table.psi, table.rho, table.u, table.v, &ff)?;
    record_diagnostics(s, &field, &ff, truncation_active);
    Ok(())
}

fn gastable(cfg: &RunConfig, s: &mut RunSummary) -> Result<()> {
    let g = &cfg.gastable;
    let mut out = String::from("s,rho_bar,rho_crit,gamma_crit,sigma\n");
    for k in 0..g.n {
        let sv = g.s_min + (g.s_max - g.s_min) * k as f64 / (g.n - 1) as f64;
        let c = cfg
            .gas
            .critical_state(sv)
            .with_context(|| format!("critical state at s = {sv}"))?;
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            c.s, c.rho_bar, c.rho_crit, c.gamma_crit, c.sigma
        );
    }
    write_text(&cfg.outputs.gastable_csv_path, &out)?;
    s.files.push(cfg.outputs.gastable_csv_path.clone());
    s.finish(Status::Completed);
    Ok(())
}
