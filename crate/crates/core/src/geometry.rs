//! Nozzle walls, truncated domains, wall-fitted meshes and Dirichlet data.
//!
//! The nozzle is the region `f₁(x₁) < x₂ < f₂(x₁)`. The walls tend to `0` and
//! `1` upstream and to `a` and `b` downstream. Computations use the mapped
//! coordinates `ξ = x₁`, `η = (x₂ - f₁)/(f₂ - f₁)` on `[-L, L] × [0, 1]`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::farfield::FarField;
use crate::numerics::interp::CubicSpline;

const SCAN_POINTS: usize = 10_000;
const ASYMPTOTE_PROBE: f64 = 1e3;
const ASYMPTOTE_TOL: f64 = 1e-8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("invalid nozzle parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid geometry: upper wall does not lie above lower wall at x1 = {x1} (f1 = {f1}, f2 = {f2})")]
    WallsCross { x1: f64, f1: f64, f2: f64 },
    #[error("invalid geometry: {wall} wall tends to {found} at x1 = {x1}, expected {expected}")]
    BadAsymptote {
        wall: &'static str,
        x1: f64,
        found: f64,
        expected: f64,
    },
    #[error("mesh needs at least 3 nodes per direction, got {n_xi} x {n_eta}")]
    MeshTooSmall { n_xi: usize, n_eta: usize },
    #[error("truncation half-length must be positive, got {0}")]
    InvalidLength(f64),
    #[error("geometry too distorted for resolution: nonpositive Jacobian in cell ({i}, {j}); refine n_xi")]
    DegenerateCell { i: usize, j: usize },
}

/// Which wall a bump sits on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    Lower,
    Upper,
}

/// One wall as a function of `x₁`.
#[derive(Debug, Clone, PartialEq)]
pub enum WallProfile {
    Constant(f64),
    /// `minus + (plus - minus)(1 + tanh(k(x - c)))/2`.
    Tanh {
        center: f64,
        steepness: f64,
        minus: f64,
        plus: f64,
    },
    /// `base + amplitude · exp(-(x/width)²)`.
    Gaussian {
        base: f64,
        amplitude: f64,
        width: f64,
    },
    /// Natural cubic spline through samples, constant outside them.
    Spline(CubicSpline),
}

impl WallProfile {
    /// `(f, f', f'')` at `x`.
    pub fn eval_all(&self, x: f64) -> (f64, f64, f64) {
        match self {
            WallProfile::Constant(c) => (*c, 0.0, 0.0),
            WallProfile::Tanh {
                center,
                steepness: k,
                minus,
                plus,
            } => {
                let t = (k * (x - center)).tanh();
                let half = 0.5 * (plus - minus);
                let sech2 = 1.0 - t * t;
                (
                    minus + half * (1.0 + t),
                    half * k * sech2,
                    -2.0 * half * k * k * t * sech2,
                )
            }
            WallProfile::Gaussian {
                base,
                amplitude,
                width,
            } => {
                let z = x / width;
                let g = amplitude * (-z * z).exp();
                (
                    base + g,
                    -2.0 * z / width * g,
                    (4.0 * z * z - 2.0) / (width * width) * g,
                )
            }
            WallProfile::Spline(s) => s.eval_all(x),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.eval_all(x).0
    }

    /// `x₁`-extent outside which the wall is (numerically) at its asymptote.
    fn extent(&self) -> f64 {
        match self {
            WallProfile::Constant(_) => 0.0,
            WallProfile::Tanh {
                center, steepness, ..
            } => center.abs() + 20.0 / steepness,
            WallProfile::Gaussian { width, .. } => 7.0 * width,
            WallProfile::Spline(s) => s.first().0.abs().max(s.last().0.abs()),
        }
    }

    fn is_analytic(&self) -> bool {
        !matches!(self, WallProfile::Spline(_))
    }
}

/// Family parameters accepted by [`build_nozzle`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum NozzleSpec {
    Straight,
    /// Each wall moves between `[upstream, downstream]` heights.
    TanhTransition {
        center: f64,
        steepness: f64,
        lower: [f64; 2],
        upper: [f64; 2],
    },
    Bump {
        amplitude: f64,
        width: f64,
        wall: Wall,
    },
    /// Wall samples `(x₁, height)`; the first sample fixes the upstream
    /// height and the last one the downstream height.
    Tabulated {
        lower: Vec<[f64; 2]>,
        upper: Vec<[f64; 2]>,
    },
}

pub const SUPPORTED_FAMILIES: &[&str] = &["straight", "tanh_transition", "bump", "tabulated"];

#[derive(Debug, Clone, PartialEq)]
pub struct NozzleGeometry {
    pub f1: WallProfile,
    pub f2: WallProfile,
    pub a: f64,
    pub b: f64,
    pub family: &'static str,
}

impl NozzleGeometry {
    pub fn straight() -> Self {
        Self {
            f1: WallProfile::Constant(0.0),
            f2: WallProfile::Constant(1.0),
            a: 0.0,
            b: 1.0,
            family: "straight",
        }
    }

    pub fn is_straight_strip(&self) -> bool {
        self.f1 == WallProfile::Constant(0.0) && self.f2 == WallProfile::Constant(1.0)
    }

    pub fn width(&self, x1: f64) -> f64 {
        self.f2.eval(x1) - self.f1.eval(x1)
    }

    /// Half-width of an `x₁`-window containing all wall variation.
    pub fn feature_extent(&self) -> f64 {
        self.f1.extent().max(self.f2.extent())
    }
}

fn spline_wall(samples: &[[f64; 2]], name: &str) -> Result<WallProfile, GeometryError> {
    let x: Vec<f64> = samples.iter().map(|p| p[0]).collect();
    let y: Vec<f64> = samples.iter().map(|p| p[1]).collect();
    if x.iter().chain(&y).any(|v| !v.is_finite()) {
        return Err(GeometryError::InvalidParameter(format!(
            "{name} wall samples must be finite"
        )));
    }
    CubicSpline::natural(x, y)
        .map(WallProfile::Spline)
        .map_err(|e| GeometryError::InvalidParameter(format!("{name} wall samples: {e:?}")))
}

pub fn build_nozzle(spec: &NozzleSpec) -> Result<NozzleGeometry, GeometryError> {
    let geom = match spec {
        NozzleSpec::Straight => NozzleGeometry::straight(),
        NozzleSpec::TanhTransition {
            center,
            steepness,
            lower,
            upper,
        } => {
            if !(*steepness > 0.0 && steepness.is_finite()) || !center.is_finite() {
                return Err(GeometryError::InvalidParameter(format!(
                    "steepness must be positive and center finite, got steepness {steepness}, center {center}"
                )));
            }
            if lower[0] != 0.0 || upper[0] != 1.0 {
                return Err(GeometryError::InvalidParameter(format!(
                    "upstream heights must be lower 0 and upper 1, got {} and {}",
                    lower[0], upper[0]
                )));
            }
            if !(upper[1] > lower[1]) {
                return Err(GeometryError::InvalidParameter(format!(
                    "downstream heights need b > a, got a = {}, b = {}",
                    lower[1], upper[1]
                )));
            }
            let wall = |h: [f64; 2]| {
                if h[0] == h[1] {
                    WallProfile::Constant(h[0])
                } else {
                    WallProfile::Tanh {
                        center: *center,
                        steepness: *steepness,
                        minus: h[0],
                        plus: h[1],
                    }
                }
            };
            NozzleGeometry {
                f1: wall(*lower),
                f2: wall(*upper),
                a: lower[1],
                b: upper[1],
                family: "tanh_transition",
            }
        }
        NozzleSpec::Bump {
            amplitude,
            width,
            wall,
        } => {
            if !(*width > 0.0 && width.is_finite()) || !amplitude.is_finite() {
                return Err(GeometryError::InvalidParameter(format!(
                    "bump needs positive width and finite amplitude, got width {width}, amplitude {amplitude}"
                )));
            }
            let (f1, f2) = match wall {
                Wall::Lower => (
                    WallProfile::Gaussian {
                        base: 0.0,
                        amplitude: *amplitude,
                        width: *width,
                    },
                    WallProfile::Constant(1.0),
                ),
                Wall::Upper => (
                    WallProfile::Constant(0.0),
                    WallProfile::Gaussian {
                        base: 1.0,
                        amplitude: *amplitude,
                        width: *width,
                    },
                ),
            };
            NozzleGeometry {
                f1,
                f2,
                a: 0.0,
                b: 1.0,
                family: "bump",
            }
        }
        NozzleSpec::Tabulated { lower, upper } => {
            let f1 = spline_wall(lower, "lower")?;
            let f2 = spline_wall(upper, "upper")?;
            let (lo0, lo1) = (lower[0][1], lower[lower.len() - 1][1]);
            let (up0, up1) = (upper[0][1], upper[upper.len() - 1][1]);
            if (lo0 - 0.0).abs() > ASYMPTOTE_TOL || (up0 - 1.0).abs() > ASYMPTOTE_TOL {
                return Err(GeometryError::InvalidParameter(format!(
                    "tabulated walls must start at heights 0 and 1, got {lo0} and {up0}"
                )));
            }
            NozzleGeometry {
                f1,
                f2,
                a: lo1,
                b: up1,
                family: "tabulated",
            }
        }
    };
    validate(&geom)?;
    Ok(geom)
}

fn validate(g: &NozzleGeometry) -> Result<(), GeometryError> {
    let r = g.feature_extent() + 1.0;
    for k in 0..SCAN_POINTS {
        let x1 = -r + 2.0 * r * k as f64 / (SCAN_POINTS - 1) as f64;
        let (f1, d1, s1) = g.f1.eval_all(x1);
        let (f2, d2, s2) = g.f2.eval_all(x1);
        if [f1, d1, s1, f2, d2, s2].iter().any(|v| !v.is_finite()) {
            return Err(GeometryError::InvalidParameter(format!(
                "wall derivatives not finite at x1 = {x1}"
            )));
        }
        if !(f2 > f1) {
            return Err(GeometryError::WallsCross { x1, f1, f2 });
        }
    }
    if !(g.b > g.a) {
        return Err(GeometryError::WallsCross {
            x1: f64::INFINITY,
            f1: g.a,
            f2: g.b,
        });
    }
    let checks: [(&'static str, &WallProfile, f64, f64); 4] = [
        ("lower", &g.f1, -ASYMPTOTE_PROBE, 0.0),
        ("upper", &g.f2, -ASYMPTOTE_PROBE, 1.0),
        ("lower", &g.f1, ASYMPTOTE_PROBE, g.a),
        ("upper", &g.f2, ASYMPTOTE_PROBE, g.b),
    ];
    for (wall, f, x1, expected) in checks {
        if !f.is_analytic() {
            continue;
        }
        let found = f.eval(x1);
        if (found - expected).abs() > ASYMPTOTE_TOL {
            return Err(GeometryError::BadAsymptote {
                wall,
                x1,
                found,
                expected,
            });
        }
    }
    Ok(())
}

/// The truncated domain `Ω_L = {-L < x₁ < L}` of a nozzle.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    pub nozzle: NozzleGeometry,
    pub l: f64,
}

pub fn truncate(nozzle: &NozzleGeometry, l: f64) -> Result<Domain, GeometryError> {
    if !(l > 0.0 && l.is_finite()) {
        return Err(GeometryError::InvalidLength(l));
    }
    Ok(Domain {
        nozzle: nozzle.clone(),
        l,
    })
}

/// Wall data for one mesh column.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Column {
    pub xi: f64,
    pub f1: f64,
    pub f1p: f64,
    pub f2: f64,
    pub f2p: f64,
}

impl Column {
    pub fn width(&self) -> f64 {
        self.f2 - self.f1
    }

    pub fn x2(&self, eta: f64) -> f64 {
        self.f1 + eta * (self.f2 - self.f1)
    }

    /// `∂η/∂x₁` at height `η`.
    pub fn eta_x1(&self, eta: f64) -> f64 {
        -(self.f1p + eta * (self.f2p - self.f1p)) / self.width()
    }
}

/// Structured wall-fitted mesh; node `(i, j)` has index `i * n_eta + j`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub domain: Domain,
    pub n_xi: usize,
    pub n_eta: usize,
    xi: Vec<f64>,
    eta: Vec<f64>,
    columns: Vec<Column>,
}

pub fn generate_mesh(domain: &Domain, n_xi: usize, n_eta: usize) -> Result<Mesh, GeometryError> {
    if n_xi < 3 || n_eta < 3 {
        return Err(GeometryError::MeshTooSmall { n_xi, n_eta });
    }
    let l = domain.l;
    let xi: Vec<f64> = (0..n_xi)
        .map(|i| -l + 2.0 * l * i as f64 / (n_xi - 1) as f64)
        .collect();
    let eta: Vec<f64> = (0..n_eta).map(|j| j as f64 / (n_eta - 1) as f64).collect();
    let columns: Vec<Column> = xi
        .iter()
        .map(|&x| {
            let (f1, f1p, _) = domain.nozzle.f1.eval_all(x);
            let (f2, f2p, _) = domain.nozzle.f2.eval_all(x);
            Column {
                xi: x,
                f1,
                f1p,
                f2,
                f2p,
            }
        })
        .collect();
    let mesh = Mesh {
        domain: domain.clone(),
        n_xi,
        n_eta,
        xi,
        eta,
        columns,
    };
    for i in 0..n_xi - 1 {
        for j in 0..n_eta - 1 {
            if !mesh.cell_corner_jacobians(i, j).iter().all(|&d| d > 0.0) {
                return Err(GeometryError::DegenerateCell { i, j });
            }
        }
    }
    Ok(mesh)
}

impl Mesh {
    pub fn l(&self) -> f64 {
        self.domain.l
    }

    pub fn len(&self) -> usize {
        self.n_xi * self.n_eta
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        i * self.n_eta + j
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn h_xi(&self) -> f64 {
        2.0 * self.l() / (self.n_xi - 1) as f64
    }

    pub fn h_eta(&self) -> f64 {
        1.0 / (self.n_eta - 1) as f64
    }

    pub fn column(&self, i: usize) -> &Column {
        &self.columns[i]
    }

    pub fn columns(&self) -> &[Column] {
        &self.columns
    }

    /// Physical coordinates of node `(i, j)`.
    pub fn node(&self, i: usize, j: usize) -> (f64, f64) {
        let c = &self.columns[i];
        (c.xi, c.x2(self.eta[j]))
    }

    pub fn is_boundary(&self, i: usize, j: usize) -> bool {
        i == 0 || j == 0 || i + 1 == self.n_xi || j + 1 == self.n_eta
    }

    /// Bilinear-map Jacobian determinants at the four corners of cell `(i, j)`.
    pub fn cell_corner_jacobians(&self, i: usize, j: usize) -> [f64; 4] {
        let p = [
            self.node(i, j),
            self.node(i + 1, j),
            self.node(i + 1, j + 1),
            self.node(i, j + 1),
        ];
        let mut out = [0.0; 4];
        for (k, slot) in out.iter_mut().enumerate() {
            let prev = p[(k + 3) % 4];
            let cur = p[k];
            let next = p[(k + 1) % 4];
            let e1 = (next.0 - cur.0, next.1 - cur.1);
            let e2 = (prev.0 - cur.0, prev.1 - cur.1);
            *slot = e1.0 * e2.1 - e1.1 * e2.0;
        }
        out
    }

    /// Column index and local coordinate for `ξ`, clamped to the mesh.
    pub fn locate_xi(&self, xi: f64) -> (usize, f64) {
        let t = ((xi + self.l()) / self.h_xi()).clamp(0.0, (self.n_xi - 1) as f64);
        let i = (t.floor() as usize).min(self.n_xi - 2);
        (i, t - i as f64)
    }

    /// Row index and local coordinate for `η`, clamped to `[0, 1]`.
    pub fn locate_eta(&self, eta: f64) -> (usize, f64) {
        let t = (eta / self.h_eta()).clamp(0.0, (self.n_eta - 1) as f64);
        let j = (t.floor() as usize).min(self.n_eta - 2);
        (j, t - j as f64)
    }

    /// Physical gradients `(∂/∂x₁, ∂/∂x₂)` of nodal values: second-order
    /// differences in `(ξ, η)` (centered inside, one-sided on the boundary)
    /// combined with the exact wall metric terms.
    pub fn nodal_gradients(&self, values: &[f64]) -> Vec<[f64; 2]> {
        let (nx, ne) = (self.n_xi, self.n_eta);
        let (hx, he) = (self.h_xi(), self.h_eta());
        let v = |i: usize, j: usize| values[i * ne + j];
        let mut out = Vec::with_capacity(self.len());
        for i in 0..nx {
            let col = &self.columns[i];
            for j in 0..ne {
                let d_xi = if i == 0 {
                    (-3.0 * v(0, j) + 4.0 * v(1, j) - v(2, j)) / (2.0 * hx)
                } else if i + 1 == nx {
                    (3.0 * v(i, j) - 4.0 * v(i - 1, j) + v(i - 2, j)) / (2.0 * hx)
                } else {
                    (v(i + 1, j) - v(i - 1, j)) / (2.0 * hx)
                };
                let d_eta = if j == 0 {
                    (-3.0 * v(i, 0) + 4.0 * v(i, 1) - v(i, 2)) / (2.0 * he)
                } else if j + 1 == ne {
                    (3.0 * v(i, j) - 4.0 * v(i, j - 1) + v(i, j - 2)) / (2.0 * he)
                } else {
                    (v(i, j + 1) - v(i, j - 1)) / (2.0 * he)
                };
                let eta = self.eta[j];
                out.push([d_xi + d_eta * col.eta_x1(eta), d_eta / col.width()]);
            }
        }
        out
    }

    /// Bilinear interpolation of nodal values at mapped coordinates.
    pub fn interpolate(&self, values: &[f64], xi: f64, eta: f64) -> f64 {
        let (i, s) = self.locate_xi(xi);
        let (j, t) = self.locate_eta(eta);
        let v = |a: usize, b: usize| values[self.index(a, b)];
        (1.0 - s) * ((1.0 - t) * v(i, j) + t * v(i, j + 1))
            + s * ((1.0 - t) * v(i + 1, j) + t * v(i + 1, j + 1))
    }
}

/// Dirichlet data on the artificial ends.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BcMode {
    /// `ψ = η·m` on the whole boundary.
    #[default]
    Paper,
    /// Walls at `0` and `m`; ends carry the asymptotic stream-function profiles.
    FarfieldProfile,
}

/// Nodal Dirichlet values; only boundary entries are meaningful.
#[derive(Debug, Clone, PartialEq)]
pub struct DirichletData {
    pub values: Vec<f64>,
    pub mode: BcMode,
}

/// Boundary values. In profile mode the end profiles are evaluated at the
/// affine image of `η` in `[0, 1]` upstream and `[a, b]` downstream, so the
/// data stays continuous at the corners for finite `L`.
pub fn boundary_values(
    mesh: &Mesh,
    m: f64,
    mode: BcMode,
    farfield: Option<&FarField>,
) -> DirichletData {
    let mut values = vec![0.0; mesh.len()];
    let (a, b) = (mesh.domain.nozzle.a, mesh.domain.nozzle.b);
    for i in 0..mesh.n_xi {
        for j in 0..mesh.n_eta {
            if !mesh.is_boundary(i, j) {
                continue;
            }
            let eta = mesh.eta()[j];
            let v = if j == 0 {
                0.0
            } else if j + 1 == mesh.n_eta {
                m
            } else {
                match (mode, farfield) {
                    (BcMode::FarfieldProfile, Some(ff)) if i == 0 => ff.psi_upstream(eta),
                    (BcMode::FarfieldProfile, Some(ff)) => ff.psi_downstream(a + eta * (b - a)),
                    _ => eta * m,
                }
            };
            values[mesh.index(i, j)] = v;
        }
    }
    DirichletData { values, mode }
}

/// The bilinear extension of the paper data, `ψ⁰ = η·m`, overwritten with the
/// Dirichlet values on the boundary.
pub fn linear_seed(mesh: &Mesh, bc: &DirichletData, m: f64) -> Vec<f64> {
    let mut psi = vec![0.0; mesh.len()];
    for i in 0..mesh.n_xi {
        for j in 0..mesh.n_eta {
            let k = mesh.index(i, j);
            psi[k] = if mesh.is_boundary(i, j) {
                bc.values[k]
            } else {
                mesh.eta()[j] * m
            };
        }
    }
    psi
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tanh_spec() -> NozzleSpec {
        NozzleSpec::TanhTransition {
            center: 0.0,
            steepness: 1.0,
            lower: [0.0, 0.0],
            upper: [1.0, 2.0],
        }
    }

    #[test]
    fn straight_walls() {
        let g = build_nozzle(&NozzleSpec::Straight).unwrap();
        assert_eq!(g.f1.eval(-3.0), 0.0);
        assert_eq!(g.f2.eval(7.0), 1.0);
        assert_eq!((g.a, g.b), (0.0, 1.0));
        assert!(g.is_straight_strip());
    }

    #[test]
    fn tanh_transition_walls() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        for x in [-2.0, 0.0, 0.7, 3.0] {
            assert!((g.f2.eval(x) - (1.5 + 0.5 * f64::tanh(x))).abs() < 1e-15);
        }
        assert_eq!(g.f2.eval(0.0), 1.5);
        assert_eq!((g.a, g.b), (0.0, 2.0));
        // width at ξ = 8 within 1e-6 of the downstream width
        assert!((g.width(8.0) - 2.0).abs() < 1e-6);
    }

    #[test]
    fn wall_derivatives_match_finite_differences() {
        let walls = [
            WallProfile::Tanh {
                center: 0.3,
                steepness: 1.7,
                minus: 1.0,
                plus: 2.0,
            },
            WallProfile::Gaussian {
                base: 0.0,
                amplitude: -0.1,
                width: 0.8,
            },
        ];
        for w in walls {
            for x in [-1.1, 0.0, 0.4, 2.0] {
                let e = 1e-5;
                let (_, d, dd) = w.eval_all(x);
                let fd = (w.eval(x + e) - w.eval(x - e)) / (2.0 * e);
                let fdd = (w.eval(x + e) - 2.0 * w.eval(x) + w.eval(x - e)) / (e * e);
                assert!((d - fd).abs() < 1e-8);
                assert!((dd - fdd).abs() < 1e-4);
            }
        }
    }

    #[test]
    fn bump_on_lower_wall() {
        let g = build_nozzle(&NozzleSpec::Bump {
            amplitude: -0.1,
            width: 1.0,
            wall: Wall::Lower,
        })
        .unwrap();
        assert!((g.f1.eval(0.0) + 0.1).abs() < 1e-15);
        assert!(g.f1.eval(50.0).abs() < 1e-15);
        assert_eq!((g.a, g.b), (0.0, 1.0));
    }

    #[test]
    fn crossing_walls_are_rejected() {
        let spec = NozzleSpec::Bump {
            amplitude: 1.5,
            width: 1.0,
            wall: Wall::Lower,
        };
        assert!(matches!(
            build_nozzle(&spec),
            Err(GeometryError::WallsCross { .. })
        ));
        let spec = NozzleSpec::TanhTransition {
            center: 0.0,
            steepness: 1.0,
            lower: [0.0, 1.0],
            upper: [1.0, 0.5],
        };
        assert!(build_nozzle(&spec).is_err());
    }

    #[test]
    fn tabulated_walls_follow_samples() {
        let upper: Vec<[f64; 2]> = (-20..=20)
            .map(|k| [k as f64 * 0.5, 1.5 + 0.5 * (k as f64 * 0.5).tanh()])
            .collect();
        let upper: Vec<[f64; 2]> = upper
            .into_iter()
            .map(|[x, y]| [x, if x == -10.0 { 1.0 } else { y }])
            .collect();
        let spec = NozzleSpec::Tabulated {
            lower: vec![[-10.0, 0.0], [10.0, 0.0]],
            upper,
        };
        let g = build_nozzle(&spec).unwrap();
        assert!((g.f2.eval(0.0) - 1.5).abs() < 1e-12);
        assert!((g.b - (1.5 + 0.5 * 10f64.tanh())).abs() < 1e-15);
        assert_eq!(g.f2.eval(-50.0), 1.0);
    }

    #[test]
    fn small_straight_mesh_nodes() {
        let d = truncate(&NozzleGeometry::straight(), 1.0).unwrap();
        let mesh = generate_mesh(&d, 3, 3).unwrap();
        let xs: Vec<(f64, f64)> = (0..3)
            .flat_map(|i| (0..3).map(move |j| (i, j)))
            .map(|(i, j)| mesh.node(i, j))
            .collect();
        assert_eq!(xs[0], (-1.0, 0.0));
        assert_eq!(xs[4], (0.0, 0.5));
        assert_eq!(xs[8], (1.0, 1.0));
    }

    #[test]
    fn top_row_lies_on_upper_wall() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        let mesh = generate_mesh(&truncate(&g, 8.0).unwrap(), 101, 41).unwrap();
        for i in 0..mesh.n_xi {
            let (x1, x2) = mesh.node(i, 40);
            assert_eq!(x2, g.f2.eval(x1));
        }
    }

    #[test]
    fn built_in_families_have_positive_cells() {
        let specs = [
            NozzleSpec::Straight,
            tanh_spec(),
            NozzleSpec::Bump {
                amplitude: -0.1,
                width: 1.0,
                wall: Wall::Lower,
            },
            NozzleSpec::Bump {
                amplitude: 0.2,
                width: 0.5,
                wall: Wall::Upper,
            },
        ];
        for spec in specs {
            let g = build_nozzle(&spec).unwrap();
            let mesh = generate_mesh(&truncate(&g, 8.0).unwrap(), 101, 11).unwrap();
            for i in 0..100 {
                for j in 0..10 {
                    // Oracle: shoelace area of the cell is positive.
                    let p = [
                        mesh.node(i, j),
                        mesh.node(i + 1, j),
                        mesh.node(i + 1, j + 1),
                        mesh.node(i, j + 1),
                    ];
                    let area: f64 = (0..4)
                        .map(|k| p[k].0 * p[(k + 1) % 4].1 - p[(k + 1) % 4].0 * p[k].1)
                        .sum::<f64>()
                        / 2.0;
                    assert!(area > 0.0);
                }
            }
        }
    }

    #[test]
    fn refinement_reproduces_coarse_nodes() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        let d = truncate(&g, 8.0).unwrap();
        let coarse = generate_mesh(&d, 51, 11).unwrap();
        let fine = generate_mesh(&d, 101, 21).unwrap();
        for i in 0..51 {
            for j in 0..11 {
                assert_eq!(coarse.node(i, j), fine.node(2 * i, 2 * j));
            }
        }
    }

    #[test]
    fn paper_boundary_data() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        let mesh = generate_mesh(&truncate(&g, 8.0).unwrap(), 21, 6).unwrap();
        let bc = boundary_values(&mesh, 0.6, BcMode::Paper, None);
        for i in 0..21 {
            assert_eq!(bc.values[mesh.index(i, 0)], 0.0);
            assert_eq!(bc.values[mesh.index(i, 5)], 0.6);
        }
        assert!((bc.values[mesh.index(0, 2)] - 0.24).abs() < 1e-15);
        assert!((bc.values[mesh.index(20, 3)] - 0.36).abs() < 1e-15);
    }

    #[test]
    fn nodal_gradients_exact_for_quadratics_in_physical_coordinates() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        let mesh = generate_mesh(&truncate(&g, 4.0).unwrap(), 81, 11).unwrap();
        // Linear in x₂ along a column but not in ξ; the difference formulas are
        // exact for quadratics in (ξ, η), so use a field quadratic in those.
        let vals: Vec<f64> = (0..mesh.n_xi)
            .flat_map(|i| (0..mesh.n_eta).map(move |j| (i, j)))
            .map(|(i, j)| {
                let xi = mesh.xi()[i];
                let eta = mesh.eta()[j];
                xi * xi + 3.0 * eta * eta - xi * eta
            })
            .collect();
        let grads = mesh.nodal_gradients(&vals);
        for &(i, j) in &[(0, 0), (40, 5), (80, 10), (17, 3)] {
            let c = mesh.column(i);
            let (xi, eta) = (mesh.xi()[i], mesh.eta()[j]);
            let p_xi = 2.0 * xi - eta;
            let p_eta = 6.0 * eta - xi;
            let gx = p_xi + p_eta * c.eta_x1(eta);
            let gy = p_eta / c.width();
            let k = mesh.index(i, j);
            assert!((grads[k][0] - gx).abs() < 1e-10, "{i},{j}");
            assert!((grads[k][1] - gy).abs() < 1e-10);
        }
    }

    #[test]
    fn metric_of_tanh_column() {
        let g = build_nozzle(&tanh_spec()).unwrap();
        let mesh = generate_mesh(&truncate(&g, 4.0).unwrap(), 9, 5).unwrap();
        let c = mesh.column(4);
        // η = (x₂ - f₁)/(f₂ - f₁) with f₁ = 0, f₂ = 1.5 + tanh(x)/2 at x = 0.
        let e = 1e-6;
        let eta_at = |x1: f64, x2: f64| (x2 - g.f1.eval(x1)) / g.width(x1);
        let x2 = c.x2(0.5);
        let fd = (eta_at(e, x2) - eta_at(-e, x2)) / (2.0 * e);
        assert!((c.eta_x1(0.5) - fd).abs() < 1e-9);
    }
}
