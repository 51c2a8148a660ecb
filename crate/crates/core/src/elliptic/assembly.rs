//! Bilinear Galerkin discretization of `-div((1/H)∇ψ) + s = 0` on a wall-fitted mesh.
//!
//! Interior nodes are the unknowns, numbered with `η` fastest, so the matrix
//! has half-bandwidth `n_eta - 1`. Each cell uses the isoparametric bilinear
//! map and a 2×2 Gauss rule.

use rayon::prelude::*;

use crate::geometry::Mesh;
use crate::numerics::banded::BandMatrix;

use super::EllipticError;

const GAUSS: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];
/// Reference corners in cell-node order `(i,j), (i+1,j), (i+1,j+1), (i,j+1)`.
const CORNERS: [(f64, f64); 4] = [(-1.0, -1.0), (1.0, -1.0), (1.0, 1.0), (-1.0, 1.0)];

#[derive(Debug, Clone, Copy, PartialEq)]
struct GaussPoint {
    shape: [f64; 4],
    grad: [[f64; 2]; 4],
    weight: f64,
}

/// Frozen coefficients at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadCoeff {
    pub h: f64,
    pub source: f64,
}

/// `ψ` and `∇ψ` at one quadrature point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadState {
    pub psi: f64,
    pub grad: [f64; 2],
}

impl QuadState {
    pub fn grad_sq(&self) -> f64 {
        self.grad[0] * self.grad[0] + self.grad[1] * self.grad[1]
    }
}

/// Reduced system on the interior unknowns.
#[derive(Debug, Clone)]
pub struct LinearSystem {
    pub matrix: BandMatrix,
    pub rhs: Vec<f64>,
}

/// Mesh-dependent data reused across Picard iterations.
#[derive(Debug, Clone)]
pub struct Discretization {
    mesh: Mesh,
    dof_of_node: Vec<Option<usize>>,
    node_of_dof: Vec<usize>,
    cells: Vec<[usize; 4]>,
    gauss: Vec<[GaussPoint; 4]>,
}

impl Discretization {
    pub fn new(mesh: &Mesh) -> Self {
        let (nx, ne) = (mesh.n_xi, mesh.n_eta);
        let mut dof_of_node = vec![None; mesh.len()];
        let mut node_of_dof = Vec::with_capacity((nx - 2) * (ne - 2));
        for i in 1..nx - 1 {
            for j in 1..ne - 1 {
                let k = mesh.index(i, j);
                dof_of_node[k] = Some(node_of_dof.len());
                node_of_dof.push(k);
            }
        }
        let mut cells = Vec::with_capacity((nx - 1) * (ne - 1));
        for i in 0..nx - 1 {
            for j in 0..ne - 1 {
                cells.push([
                    mesh.index(i, j),
                    mesh.index(i + 1, j),
                    mesh.index(i + 1, j + 1),
                    mesh.index(i, j + 1),
                ]);
            }
        }
        let gauss = cells
            .par_iter()
            .map(|cell| {
                let xy: Vec<(f64, f64)> = cell
                    .iter()
                    .map(|&k| {
                        let (i, j) = (k / ne, k % ne);
                        mesh.node(i, j)
                    })
                    .collect();
                let mut pts = [GaussPoint {
                    shape: [0.0; 4],
                    grad: [[0.0; 2]; 4],
                    weight: 0.0,
                }; 4];
                let mut q = 0;
                for &s in &GAUSS {
                    for &r in &GAUSS {
                        pts[q] = gauss_point(&xy, r, s);
                        q += 1;
                    }
                }
                pts
            })
            .collect();
        Self {
            mesh: mesh.clone(),
            dof_of_node,
            node_of_dof,
            cells,
            gauss,
        }
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn n_dofs(&self) -> usize {
        self.node_of_dof.len()
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    /// Number of quadrature points (four per cell).
    pub fn n_quad(&self) -> usize {
        4 * self.cells.len()
    }

    pub fn node_of_dof(&self) -> &[usize] {
        &self.node_of_dof
    }

    /// Nodes of each cell, counter-clockwise from `(i, j)`.
    pub fn cells(&self) -> &[[usize; 4]] {
        &self.cells
    }

    /// `ψ` and `∇ψ` at every quadrature point, cell by cell.
    pub fn quad_states(&self, psi: &[f64]) -> Vec<QuadState> {
        self.cells
            .par_iter()
            .zip(self.gauss.par_iter())
            .flat_map_iter(|(cell, pts)| {
                let vals = [psi[cell[0]], psi[cell[1]], psi[cell[2]], psi[cell[3]]];
                pts.iter().map(move |gp| {
                    let mut st = QuadState {
                        psi: 0.0,
                        grad: [0.0; 2],
                    };
                    for a in 0..4 {
                        st.psi += gp.shape[a] * vals[a];
                        st.grad[0] += gp.grad[a][0] * vals[a];
                        st.grad[1] += gp.grad[a][1] * vals[a];
                    }
                    st
                })
            })
            .collect()
    }

    /// Assemble with coefficients frozen at the quadrature points; `psi`
    /// supplies the Dirichlet values on boundary nodes.
    pub fn assemble(
        &self,
        coeffs: &[QuadCoeff],
        psi: &[f64],
    ) -> Result<LinearSystem, EllipticError> {
        assert_eq!(
            coeffs.len(),
            self.n_quad(),
            "one coefficient per quadrature point"
        );
        if let Some((q, c)) = coeffs
            .iter()
            .enumerate()
            .find(|(_, c)| !(c.h > 0.0 && c.h.is_finite()))
        {
            return Err(EllipticError::NonPositiveCoefficient {
                quad_point: q,
                value: c.h,
            });
        }
        let locals: Vec<([[f64; 4]; 4], [f64; 4])> = self
            .gauss
            .par_iter()
            .enumerate()
            .map(|(c, pts)| {
                let mut k = [[0.0; 4]; 4];
                let mut f = [0.0; 4];
                for (q, gp) in pts.iter().enumerate() {
                    let co = coeffs[4 * c + q];
                    let w = gp.weight / co.h;
                    for a in 0..4 {
                        for b in 0..4 {
                            k[a][b] +=
                                w * (gp.grad[a][0] * gp.grad[b][0] + gp.grad[a][1] * gp.grad[b][1]);
                        }
                        f[a] -= gp.weight * co.source * gp.shape[a];
                    }
                }
                (k, f)
            })
            .collect();
        let n = self.n_dofs();
        let mut matrix = BandMatrix::zeros(n, self.mesh.n_eta - 1);
        let mut rhs = vec![0.0; n];
        for (cell, (k, f)) in self.cells.iter().zip(&locals) {
            for a in 0..4 {
                let Some(ra) = self.dof_of_node[cell[a]] else {
                    continue;
                };
                rhs[ra] += f[a];
                for b in 0..4 {
                    match self.dof_of_node[cell[b]] {
                        Some(rb) => matrix.add(ra, rb, k[a][b]),
                        None => rhs[ra] -= k[a][b] * psi[cell[b]],
                    }
                }
            }
        }
        Ok(LinearSystem { matrix, rhs })
    }

    pub fn gather(&self, psi: &[f64]) -> Vec<f64> {
        self.node_of_dof.iter().map(|&k| psi[k]).collect()
    }

    pub fn scatter(&self, dofs: &[f64], psi: &mut [f64]) {
        for (&k, &v) in self.node_of_dof.iter().zip(dofs) {
            psi[k] = v;
        }
    }

    /// `‖K u - f‖∞` over the unknowns.
    pub fn residual_norm(&self, system: &LinearSystem, psi: &[f64]) -> f64 {
        let u = self.gather(psi);
        system
            .matrix
            .mul_vec(&u)
            .iter()
            .zip(&system.rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn gauss_point(xy: &[(f64, f64)], r: f64, s: f64) -> GaussPoint {
    let mut shape = [0.0; 4];
    let mut dr = [0.0; 4];
    let mut ds = [0.0; 4];
    for (a, &(ra, sa)) in CORNERS.iter().enumerate() {
        shape[a] = 0.25 * (1.0 + ra * r) * (1.0 + sa * s);
        dr[a] = 0.25 * ra * (1.0 + sa * s);
        ds[a] = 0.25 * sa * (1.0 + ra * r);
    }
    let (mut x_r, mut x_s, mut y_r, mut y_s) = (0.0, 0.0, 0.0, 0.0);
    for a in 0..4 {
        x_r += dr[a] * xy[a].0;
        x_s += ds[a] * xy[a].0;
        y_r += dr[a] * xy[a].1;
        y_s += ds[a] * xy[a].1;
    }
    let det = x_r * y_s - x_s * y_r;
    let mut grad = [[0.0; 2]; 4];
    for a in 0..4 {
        grad[a][0] = (y_s * dr[a] - y_r * ds[a]) / det;
        grad[a][1] = (-x_s * dr[a] + x_r * ds[a]) / det;
    }
    GaussPoint {
        shape,
        grad,
        weight: det,
    }
}
