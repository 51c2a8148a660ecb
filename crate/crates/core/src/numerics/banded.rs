//! Banded matrices and a banded Cholesky factorization.
//!
//! Structured-mesh Galerkin systems numbered with the short direction fastest
//! have a half-bandwidth equal to the short-direction node count, so a dense
//! band factorization is a direct sparse solver for them.

/// Square matrix with entries only for `|row - col| <= half_bandwidth`.
#[derive(Debug, Clone, PartialEq)]
pub struct BandMatrix {
    n: usize,
    bw: usize,
    data: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BandError {
    /// Non-positive pivot during factorization.
    NotPositiveDefinite { row: usize, pivot: f64 },
}

impl BandMatrix {
    pub fn zeros(n: usize, half_bandwidth: usize) -> Self {
        Self {
            n,
            bw: half_bandwidth,
            data: vec![0.0; n * (2 * half_bandwidth + 1)],
        }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn half_bandwidth(&self) -> usize {
        self.bw
    }

    #[inline]
    fn slot(&self, row: usize, col: usize) -> usize {
        debug_assert!(
            row.abs_diff(col) <= self.bw,
            "entry ({row},{col}) outside band {}",
            self.bw
        );
        row * (2 * self.bw + 1) + (col + self.bw - row)
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        if row.abs_diff(col) > self.bw {
            0.0
        } else {
            self.data[self.slot(row, col)]
        }
    }

    #[inline]
    pub fn add(&mut self, row: usize, col: usize, v: f64) {
        let s = self.slot(row, col);
        self.data[s] += v;
    }

    /// `y = A x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|r| {
                let lo = r.saturating_sub(self.bw);
                let hi = (r + self.bw).min(self.n - 1);
                (lo..=hi).map(|c| self.data[self.slot(r, c)] * x[c]).sum()
            })
            .collect()
    }

    /// Largest `|A_ij - A_ji|` over the band.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for r in 0..self.n {
            for c in (r + 1)..=(r + self.bw).min(self.n.saturating_sub(1)) {
                worst = worst.max((self.get(r, c) - self.get(c, r)).abs());
            }
        }
        worst
    }

    /// Cholesky factorization using the lower half of the band.
    pub fn cholesky(&self) -> Result<BandCholesky, BandError> {
        let n = self.n;
        let bw = self.bw;
        let w = bw + 1;
        let mut l = vec![0.0; n * w];
        // Row i of L holds columns i-bw ..= i at offsets 0 ..= bw.
        let idx = |i: usize, p: usize| i * w + (p + bw - i);
        for j in 0..n {
            let j0 = j.saturating_sub(bw);
            let mut sum = self.get(j, j);
            for p in j0..j {
                let v = l[idx(j, p)];
                sum -= v * v;
            }
            if !(sum > 0.0) {
                return Err(BandError::NotPositiveDefinite { row: j, pivot: sum });
            }
            let d = sum.sqrt();
            l[idx(j, j)] = d;
            for i in (j + 1)..=(j + bw).min(n - 1) {
                let p0 = i.saturating_sub(bw);
                let mut s = self.get(i, j);
                for p in p0..j {
                    s -= l[idx(i, p)] * l[idx(j, p)];
                }
                l[idx(i, j)] = s / d;
            }
        }
        Ok(BandCholesky { n, bw, l })
    }
}

/// Lower-triangular band factor `L` with `A = L Lᵀ`.
#[derive(Debug, Clone)]
pub struct BandCholesky {
    n: usize,
    bw: usize,
    l: Vec<f64>,
}

impl BandCholesky {
    #[inline]
    fn at(&self, i: usize, p: usize) -> f64 {
        self.l[i * (self.bw + 1) + (p + self.bw - i)]
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.n;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for p in i.saturating_sub(self.bw)..i {
                s -= self.at(i, p) * y[p];
            }
            y[i] = s / self.at(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for r in (i + 1)..=(i + self.bw).min(n - 1) {
                s -= self.at(r, i) * y[r];
            }
            y[i] = s / self.at(i, i);
        }
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> BandMatrix {
        let mut a = BandMatrix::zeros(n, 1);
        for i in 0..n {
            a.add(i, i, 2.0);
            if i > 0 {
                a.add(i, i - 1, -1.0);
                a.add(i - 1, i, -1.0);
            }
        }
        a
    }

    #[test]
    fn solves_tridiagonal_system() {
        let n = 50;
        let a = laplacian_1d(n);
        let x_true: Vec<f64> = (0..n).map(|i| (i as f64 * 0.3).sin()).collect();
        let b = a.mul_vec(&x_true);
        let x = a.cholesky().unwrap().solve(&b);
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-11);
        }
    }

    #[test]
    fn solves_wider_band() {
        // 2-D five-point Laplacian on a 7x5 grid, numbered with the short side fastest.
        let (nx, ny) = (7, 5);
        let n = nx * ny;
        let mut a = BandMatrix::zeros(n, ny);
        for i in 0..nx {
            for j in 0..ny {
                let k = i * ny + j;
                a.add(k, k, 4.0);
                if j > 0 {
                    a.add(k, k - 1, -1.0);
                }
                if j + 1 < ny {
                    a.add(k, k + 1, -1.0);
                }
                if i > 0 {
                    a.add(k, k - ny, -1.0);
                }
                if i + 1 < nx {
                    a.add(k, k + ny, -1.0);
                }
            }
        }
        assert_eq!(a.asymmetry(), 0.0);
        let x_true: Vec<f64> = (0..n).map(|k| 1.0 + (k as f64).cos()).collect();
        let x = a.cholesky().unwrap().solve(&a.mul_vec(&x_true));
        for (u, v) in x.iter().zip(&x_true) {
            assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn detects_indefinite_matrix() {
        let mut a = laplacian_1d(4);
        a.add(2, 2, -10.0);
        assert!(matches!(
            a.cholesky(),
            Err(BandError::NotPositiveDefinite { row: 2, .. })
        ));
    }
}
