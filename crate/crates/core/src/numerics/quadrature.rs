//! Fixed-rule quadrature on intervals.

/// Composite Simpson rule on `[a, b]` with `n` nodes (`n` is raised to the
/// next odd number, minimum 3).
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, n: usize) -> f64 {
    let n = if n < 3 {
        3
    } else if n.is_multiple_of(2) {
        n + 1
    } else {
        n
    };
    let panels = n - 1;
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * f(a + k as f64 * h);
    }
    sum * h / 3.0
}

/// Composite trapezoid rule over tabulated samples `(x_k, y_k)`.
pub fn trapezoid_samples(x: &[f64], y: &[f64]) -> f64 {
    debug_assert_eq!(x.len(), y.len());
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

const GL5_NODES: [f64; 5] = [
    0.0,
    -0.538_469_310_105_683_1,
    0.538_469_310_105_683_1,
    -0.906_179_845_938_664,
    0.906_179_845_938_664,
];
const GL5_WEIGHTS: [f64; 5] = [
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
    0.236_926_885_056_189_08,
];

/// Five-point Gauss–Legendre rule on a single interval (exact for degree 9).
pub fn gauss_legendre5<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let c = 0.5 * (a + b);
    let r = 0.5 * (b - a);
    GL5_NODES
        .iter()
        .zip(GL5_WEIGHTS.iter())
        .map(|(&t, &w)| w * f(c + r * t))
        .sum::<f64>()
        * r
}

/// Cumulative integral `∫_{x_0}^{x_k} f` on the given increasing grid, using
/// the five-point rule on every sub-interval.
pub fn cumulative<F: FnMut(f64) -> f64>(mut f: F, grid: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(grid.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in grid.windows(2) {
        acc += gauss_legendre5(&mut f, w[0], w[1]);
        out.push(acc);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn simpson_exact_for_cubics() {
        let v = simpson(|x| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 5);
        assert!((v - (4.0 - 4.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn simpson_rounds_even_node_counts_up() {
        let v = simpson(|x| x.sin(), 0.0, std::f64::consts::PI, 1000);
        assert!((v - 2.0).abs() < 1e-11);
    }

    #[test]
    fn gauss_legendre_exact_degree_nine() {
        let v = gauss_legendre5(|x| x.powi(9) + x.powi(8), 0.0, 1.0);
        assert!((v - (0.1 + 1.0 / 9.0)).abs() < 1e-15);
    }

    #[test]
    fn cumulative_matches_antiderivative() {
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 / 20.0).collect();
        let c = cumulative(|x| x.exp(), &grid);
        for (x, v) in grid.iter().zip(&c) {
            assert!((v - (x.exp() - 1.0)).abs() < 1e-14);
        }
    }
}
