//! Stream-coordinate functions built from the upstream state.
//!
//! `ψ̄₀(X) = ∫₀^X ρ₀u₀` labels the streamline entering at height `X`; its
//! inverse is `κ`. The coefficient functions are `F(ψ) = u₀(κ(ψ))` and
//! `F'(ψ) = u₀'(κ)/(ρ₀u₀(κ))`, extended to all of `ℝ` by a Lipschitz taper.

use crate::numerics::interp::HermiteTable;
use crate::numerics::quadrature::cumulative;

use super::states::{Downstream, Upstream};
use super::FarFieldError;

/// Intervals of the upstream `X` grid used for `ψ̄₀`.
const X_INTERVALS: usize = 4096;
/// Intervals of the uniform `ψ` grid used for `κ`.
const PSI_INTERVALS: usize = 4096;

#[derive(Debug, Clone)]
pub struct StreamProfiles {
    pub m: f64,
    pub rho0: f64,
    pub h0: f64,
    up: Upstream,
    /// `X ↦ ψ̄₀(X)`.
    psi_bar0: HermiteTable,
    /// `ψ ↦ κ(ψ)`.
    kappa: HermiteTable,
    f0: f64,
    fm: f64,
    fp0: f64,
    fpm: f64,
}

impl StreamProfiles {
    pub fn build(up: &Upstream) -> Result<Self, FarFieldError> {
        let rho0 = up.rho0;
        let flux = |x: f64| rho0 * up.u0(x);
        let xs: Vec<f64> = (0..=X_INTERVALS)
            .map(|k| k as f64 / X_INTERVALS as f64)
            .collect();
        let psi = cumulative(flux, &xs);
        let slopes: Vec<f64> = xs.iter().map(|&x| flux(x)).collect();
        if slopes.iter().any(|&v| !(v > 0.0)) {
            return Err(FarFieldError::StagnantUpstream);
        }
        let total = psi[X_INTERVALS];
        let psi_bar0 = HermiteTable::new(xs.clone(), psi.clone(), slopes.clone())
            .map_err(|_| FarFieldError::StagnantUpstream)?;

        let m = up.m;
        let mut kx = Vec::with_capacity(PSI_INTERVALS + 1);
        let mut ky = Vec::with_capacity(PSI_INTERVALS + 1);
        let mut kd = Vec::with_capacity(PSI_INTERVALS + 1);
        let mut seg = 0usize;
        for k in 0..=PSI_INTERVALS {
            let target = m * k as f64 / PSI_INTERVALS as f64;
            // Quadrature and root-solve discrepancies between `total` and `m`
            // are rescaled away so that κ(0) = 0 and κ(m) = 1 exactly.
            let t = target * total / m;
            let x = if k == 0 {
                0.0
            } else if k == PSI_INTERVALS {
                1.0
            } else {
                while seg + 1 < X_INTERVALS && psi[seg + 1] < t {
                    seg += 1;
                }
                invert_segment(&psi_bar0, xs[seg], xs[seg + 1], t)
            };
            kx.push(target);
            ky.push(x);
            kd.push(1.0 / flux(x));
        }
        let kappa = HermiteTable::new(kx, ky, kd).map_err(|_| FarFieldError::StagnantUpstream)?;

        let mut out = Self {
            m,
            rho0,
            h0: up.h0,
            up: up.clone(),
            psi_bar0,
            kappa,
            f0: 0.0,
            fm: 0.0,
            fp0: 0.0,
            fpm: 0.0,
        };
        out.f0 = out.f(0.0);
        out.fm = out.f(m);
        out.fp0 = out.f_prime(0.0);
        out.fpm = out.f_prime(m);
        Ok(out)
    }

    pub fn upstream(&self) -> &Upstream {
        &self.up
    }

    /// `ψ̄₀(X) = ∫₀^X ρ₀u₀`, the upstream stream-function profile.
    pub fn psi_bar0(&self, x2: f64) -> f64 {
        self.psi_bar0.eval(x2) * self.m / self.psi_bar0.y()[X_INTERVALS]
    }

    /// `∫ₐ^y ρ₁u₁`, the downstream profile, via the flow map.
    pub fn psi_bar1(&self, down: &Downstream, y: f64) -> f64 {
        self.psi_bar0(down.inverse_ymap(y))
    }

    pub fn kappa(&self, psi: f64) -> f64 {
        self.kappa.eval(psi)
    }

    /// `F(ψ) = u₀(κ(ψ))` on `[0, m]` (clamped outside).
    pub fn f(&self, psi: f64) -> f64 {
        self.up.u0(self.kappa(psi.clamp(0.0, self.m)))
    }

    /// `F'(ψ)` on `[0, m]` (clamped outside).
    pub fn f_prime(&self, psi: f64) -> f64 {
        let x = self.kappa(psi.clamp(0.0, self.m));
        self.up.u0_prime(x) / (self.rho0 * self.up.u0(x))
    }

    /// `f(ψ) = ρ₀ F F'`, the vorticity function.
    pub fn vorticity_fn(&self, psi: f64) -> f64 {
        self.rho0 * self.f(psi) * self.f_prime(psi)
    }

    /// Extended `g̃ = F̃'`: `F'` on `[0, m]`, linear tapers to zero on
    /// `[m, 2m]` and `[-m, 0]`, zero beyond.
    pub fn fext_prime(&self, s: f64) -> f64 {
        let m = self.m;
        if (0.0..=m).contains(&s) {
            self.f_prime(s)
        } else if s > m && s <= 2.0 * m {
            self.fpm * (2.0 * m - s) / m
        } else if (-m..0.0).contains(&s) {
            self.fp0 * (s + m) / m
        } else {
            0.0
        }
    }

    /// Extended `F̃(s) = F(0) + ∫₀ˢ g̃`.
    pub fn fext(&self, s: f64) -> f64 {
        let m = self.m;
        if (0.0..=m).contains(&s) {
            self.f(s)
        } else if s > m {
            let t = s.min(2.0 * m);
            self.fm + self.fpm / m * (2.0 * m * (t - m) - 0.5 * (t * t - m * m))
        } else {
            let t = s.max(-m);
            self.f0 - self.fp0 / m * 0.5 * (m * m - (t + m) * (t + m))
        }
    }

    /// `(F̃, F̃')` evaluated together.
    pub fn fext_pair(&self, s: f64) -> (f64, f64) {
        if (0.0..=self.m).contains(&s) {
            let x = self.kappa(s);
            let u = self.up.u0(x);
            (u, self.up.u0_prime(x) / (self.rho0 * u))
        } else {
            (self.fext(s), self.fext_prime(s))
        }
    }

    /// Bernoulli function of the stream label, `𝓑̃(ψ) = h(ρ₀) + F̃²/2`.
    pub fn bernoulli_of_psi(&self, psi: f64) -> f64 {
        let f = self.fext(psi);
        self.h0 + 0.5 * f * f
    }

    /// End values `(F(0), F(m), F'(0), F'(m))`.
    pub fn end_values(&self) -> (f64, f64, f64, f64) {
        (self.f0, self.fm, self.fp0, self.fpm)
    }
}

/// Solve `p(x) = t` on `[lo, hi]` for an increasing Hermite table `p`.
fn invert_segment(p: &HermiteTable, mut lo: f64, mut hi: f64, t: f64) -> f64 {
    let mut x = 0.5 * (lo + hi);
    for _ in 0..60 {
        let (v, d, _) = p.eval_all(x);
        let r = v - t;
        if r > 0.0 {
            hi = x;
        } else {
            lo = x;
        }
        let nx = x - r / d;
        let next = if d > 0.0 && nx > lo && nx < hi {
            nx
        } else {
            0.5 * (lo + hi)
        };
        if (next - x).abs() <= 1e-16 * x.abs().max(1e-300)
            || hi - lo <= 4.0 * f64::EPSILON * hi.abs()
        {
            return next;
        }
        x = next;
    }
    x
}
