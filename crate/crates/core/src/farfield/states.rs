//! Asymptotic upstream (`x₁ → -∞`) and downstream (`x₁ → +∞`) states.
//!
//! Both ends carry parallel flow with constant density. Upstream the speed is
//! fixed by `h(ρ₀) + u₀²/2 = B(x₂)`; the streamline entering at height `s`
//! leaves at `y(s)` downstream with the same Bernoulli constant, and the
//! downstream density `ρ₁` is set by requiring the streamlines to fill `[a, b]`.

use crate::gas::GasLaw;
use crate::numerics::interp::HermiteTable;
use crate::numerics::quadrature::simpson;
use crate::numerics::roots::{bisect, RootError};

use super::{BernoulliProfile, FarFieldError};

/// Composite Simpson nodes for every `x₂`-integral.
pub const QUAD_NODES: usize = 8001;
/// RK4 steps for the flow map; with an `s`-only right-hand side this matches
/// the Simpson rule above node for node.
pub const FLOW_MAP_STEPS: usize = 4000;
const ROOT_REL_TOL: f64 = 1e-15;
const ROOT_MAX_ITER: usize = 200;

/// Upstream state: `ρ₀` and `u₀(x₂) = √(2(B(x₂) - h(ρ₀)))`.
#[derive(Debug, Clone)]
pub struct Upstream {
    pub rho0: f64,
    pub h0: f64,
    pub m: f64,
    profile: BernoulliProfile,
}

impl Upstream {
    pub fn u0(&self, x2: f64) -> f64 {
        (2.0 * (self.profile.eval(x2) - self.h0)).max(0.0).sqrt()
    }

    /// `u₀' = B'/u₀`, from differentiating the upstream Bernoulli relation.
    pub fn u0_prime(&self, x2: f64) -> f64 {
        let (b, db) = self.profile.eval_with_deriv(x2);
        db / (2.0 * (b - self.h0)).sqrt()
    }

    pub fn profile(&self) -> &BernoulliProfile {
        &self.profile
    }

    /// `∫₀¹ ρ₀u₀`.
    pub fn mass_flux(&self) -> f64 {
        simpson(|x| self.rho0 * self.u0(x), 0.0, 1.0, QUAD_NODES)
    }

    /// `(min u₀, max u₀)` on a sample grid.
    pub fn u0_range(&self) -> (f64, f64) {
        speed_range(|x| self.u0(x), 0.0, 1.0)
    }
}

fn speed_range(f: impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    (0..=1000)
        .map(|k| f(a + (b - a) * k as f64 / 1000.0))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            (lo.min(v), hi.max(v))
        })
}

/// Subsonic density window `(ϱ(B̄), ϱ̄(B̲))` shared by both ends.
pub fn subsonic_window(
    gas: &GasLaw,
    profile: &BernoulliProfile,
) -> Result<(f64, f64), FarFieldError> {
    let lo = gas.critical_state(profile.b_max())?.rho_crit;
    let hi = gas.critical_state(profile.b_min())?.rho_bar;
    Ok((lo, hi))
}

fn upstream_flux(gas: &GasLaw, profile: &BernoulliProfile, rho: f64) -> f64 {
    let h = gas.h(rho);
    simpson(
        |x| rho * (2.0 * (profile.eval(x) - h)).max(0.0).sqrt(),
        0.0,
        1.0,
        QUAD_NODES,
    )
}

/// Upstream mass flux at both ends of the subsonic window: `(flux at ϱ̄(B̲), flux at ϱ(B̄))`.
pub fn upstream_flux_range(
    gas: &GasLaw,
    profile: &BernoulliProfile,
) -> Result<(f64, f64), FarFieldError> {
    let (lo, hi) = subsonic_window(gas, profile)?;
    Ok((
        upstream_flux(gas, profile, hi),
        upstream_flux(gas, profile, lo),
    ))
}

/// Solve `m = ∫₀¹ ρ₀√(2(B - h(ρ₀)))` for `ρ₀` in the subsonic window.
pub fn solve_upstream(
    gas: &GasLaw,
    profile: &BernoulliProfile,
    m: f64,
) -> Result<Upstream, FarFieldError> {
    if !(m > 0.0 && m.is_finite()) {
        return Err(FarFieldError::InvalidMassFlux(m));
    }
    let (lo, hi) = subsonic_window(gas, profile)?;
    let flux_max = upstream_flux(gas, profile, lo);
    let flux_min = upstream_flux(gas, profile, hi);
    if m >= flux_max {
        return Err(FarFieldError::MassFluxAboveSubsonic { m, max: flux_max });
    }
    if m <= flux_min {
        return Err(FarFieldError::MassFluxBelowBound { m, min: flux_min });
    }
    // The flux decreases in ρ on the subsonic window.
    let root = bisect(
        |rho| upstream_flux(gas, profile, rho) - m,
        lo,
        hi,
        ROOT_REL_TOL,
        ROOT_MAX_ITER,
    )
    .map_err(FarFieldError::Root)?;
    let rho0 = root.x;
    Ok(Upstream {
        rho0,
        h0: gas.h(rho0),
        m,
        profile: profile.clone(),
    })
}

/// Downstream state on `[a, b]`.
#[derive(Debug, Clone)]
pub struct Downstream {
    pub rho1: f64,
    pub h1: f64,
    pub a: f64,
    pub b: f64,
    /// `s ↦ y(s)` with slopes `y'(s)`.
    ymap: HermiteTable,
    /// `y ↦ s(y)`, the inverse flow map.
    smap: HermiteTable,
    profile: BernoulliProfile,
}

impl Downstream {
    /// Flow map `y(s)`.
    pub fn ymap(&self, s: f64) -> f64 {
        self.ymap.eval(s)
    }

    pub fn ymap_prime(&self, s: f64) -> f64 {
        self.ymap.deriv(s)
    }

    /// Upstream height whose streamline reaches downstream height `y`.
    pub fn inverse_ymap(&self, y: f64) -> f64 {
        self.smap.eval(y)
    }

    /// Downstream speed `u₁(y)`, from Bernoulli conservation along the streamline.
    pub fn u1(&self, y: f64) -> f64 {
        self.u1_at_source(self.inverse_ymap(y))
    }

    /// `u₁` on the streamline that entered at upstream height `s`.
    pub fn u1_at_source(&self, s: f64) -> f64 {
        (2.0 * (self.profile.eval(s) - self.h1)).max(0.0).sqrt()
    }

    pub fn u1_range(&self) -> (f64, f64) {
        speed_range(|y| self.u1(y), self.a, self.b)
    }
}

fn height_integrand<'a>(gas: &GasLaw, up: &'a Upstream, rho1: f64) -> impl Fn(f64) -> f64 + 'a {
    let h1 = gas.h(rho1);
    move |s: f64| {
        let head = up.profile.eval(s) - h1;
        if head > 0.0 {
            up.rho0 * up.u0(s) / (rho1 * (2.0 * head).sqrt())
        } else {
            f64::INFINITY
        }
    }
}

fn downstream_height(gas: &GasLaw, up: &Upstream, rho1: f64) -> f64 {
    let v = simpson(height_integrand(gas, up, rho1), 0.0, 1.0, QUAD_NODES);
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Solve for `ρ₁` from the height relation and integrate the flow map.
pub fn solve_downstream(
    gas: &GasLaw,
    up: &Upstream,
    a: f64,
    b: f64,
) -> Result<Downstream, FarFieldError> {
    if !(b > a) || !a.is_finite() || !b.is_finite() {
        return Err(FarFieldError::InvalidHeights { a, b });
    }
    let profile = &up.profile;
    let (lo, hi) = subsonic_window(gas, profile)?;
    let width = b - a;
    let h_lo = downstream_height(gas, up, lo);
    if h_lo >= width {
        return Err(FarFieldError::DownstreamChoking {
            width,
            min_width: h_lo,
        });
    }
    // Height grows with ρ₁ and diverges at the stagnation density.
    let root = bisect(
        |rho1| {
            if rho1 >= hi {
                f64::INFINITY
            } else {
                downstream_height(gas, up, rho1) - width
            }
        },
        lo,
        hi,
        ROOT_REL_TOL,
        ROOT_MAX_ITER,
    )
    .map_err(|e| match e {
        RootError::NoSignChange { .. } => FarFieldError::DownstreamChoking {
            width,
            min_width: h_lo,
        },
        other => FarFieldError::Root(other),
    })?;
    let rho1 = root.x;
    let rhs = height_integrand(gas, up, rho1);

    let n = FLOW_MAP_STEPS;
    let ds = 1.0 / n as f64;
    let mut s_grid = Vec::with_capacity(n + 1);
    let mut y_grid = Vec::with_capacity(n + 1);
    let mut slope = Vec::with_capacity(n + 1);
    let mut y = a;
    for k in 0..=n {
        let s = k as f64 * ds;
        s_grid.push(s);
        y_grid.push(y);
        let k1 = rhs(s);
        slope.push(k1);
        if k < n {
            // Classical RK4; the right-hand side does not depend on y.
            let k2 = rhs(s + 0.5 * ds);
            let k3 = k2;
            let k4 = rhs(s + ds);
            y += ds / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
    }
    let end_err = (y - b).abs();
    if end_err > 1e-6 {
        return Err(FarFieldError::FlowMapMismatch { end: y, b });
    }
    // Snap the end to b; the remaining discrepancy is within tolerance.
    let last = y_grid.len() - 1;
    y_grid[last] = b;
    if y_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FarFieldError::FlowMapMismatch { end: y, b });
    }
    let inv_slope: Vec<f64> = slope.iter().map(|d| 1.0 / d).collect();
    let ymap = HermiteTable::new(s_grid.clone(), y_grid.clone(), slope)
        .expect("flow map grid is increasing");
    let smap =
        HermiteTable::new(y_grid, s_grid, inv_slope).expect("flow map is strictly increasing");
    Ok(Downstream {
        rho1,
        h1: gas.h(rho1),
        a,
        b,
        ymap,
        smap,
        profile: profile.clone(),
    })
}
