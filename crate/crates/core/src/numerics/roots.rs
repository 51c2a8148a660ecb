//! Bracketed scalar root finding.

/// Outcome of a bracketed root search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub iterations: usize,
}

/// Failure modes of the bracketed solvers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RootError {
    /// `f(lo)` and `f(hi)` have the same strict sign.
    NoSignChange { f_lo: f64, f_hi: f64 },
    /// Iteration budget exhausted before the bracket shrank below tolerance.
    NotConverged { x: f64, width: f64 },
}

/// Bisection on `[lo, hi]` until the bracket width falls below
/// `rel_tol * max(|lo|, |hi|)`.
///
/// `f` may return `+inf`/`-inf` at points where the underlying function is
/// undefined but its sign is known; only the sign is used.
pub fn bisect<F>(
    mut f: F,
    mut lo: f64,
    mut hi: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Root, RootError>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { f_lo, f_hi });
    }
    for it in 1..=max_iter {
        let mid = 0.5 * (lo + hi);
        if (hi - lo) <= rel_tol * lo.abs().max(hi.abs()) || mid == lo || mid == hi {
            return Ok(Root {
                x: mid,
                iterations: it,
            });
        }
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return Ok(Root {
                x: mid,
                iterations: it,
            });
        }
        if f_mid.signum() == f_lo.signum() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(RootError::NotConverged {
        x: 0.5 * (lo + hi),
        width: hi - lo,
    })
}

/// Newton iteration safeguarded by a bisection bracket.
///
/// `fdf` returns `(f(x), f'(x))`. A Newton step that leaves the current
/// bracket, or fails to halve it, is replaced by a bisection step.
pub fn newton_bisect<F>(
    mut fdf: F,
    lo: f64,
    hi: f64,
    x0: f64,
    rel_tol: f64,
    max_iter: usize,
) -> Result<Root, RootError>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (f_lo, _) = fdf(lo);
    let (f_hi, _) = fdf(hi);
    if f_lo == 0.0 {
        return Ok(Root {
            x: lo,
            iterations: 0,
        });
    }
    if f_hi == 0.0 {
        return Ok(Root {
            x: hi,
            iterations: 0,
        });
    }
    if f_lo.signum() == f_hi.signum() {
        return Err(RootError::NoSignChange { f_lo, f_hi });
    }
    // Orient so that f(neg) < 0 < f(pos).
    let (mut neg, mut pos) = if f_lo < 0.0 { (lo, hi) } else { (hi, lo) };
    let mut x = if x0 > lo.min(hi) && x0 < lo.max(hi) {
        x0
    } else {
        0.5 * (lo + hi)
    };
    let mut dx_old = (hi - lo).abs();
    let mut dx = dx_old;
    for it in 1..=max_iter {
        let (fx, dfx) = fdf(x);
        if fx == 0.0 {
            return Ok(Root { x, iterations: it });
        }
        if fx < 0.0 {
            neg = x;
        } else {
            pos = x;
        }
        let a = neg.min(pos);
        let b = neg.max(pos);
        let newton = x - fx / dfx;
        let use_newton = dfx.is_finite()
            && dfx != 0.0
            && newton > a
            && newton < b
            && (fx / dfx).abs() * 2.0 <= dx_old.abs();
        dx_old = dx;
        let x_new = if use_newton { newton } else { 0.5 * (a + b) };
        dx = x_new - x;
        x = x_new;
        if dx.abs() <= rel_tol * x.abs() || (b - a) <= rel_tol * x.abs() {
            return Ok(Root { x, iterations: it });
        }
    }
    Err(RootError::NotConverged {
        x,
        width: (pos - neg).abs(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bisect_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-14, 200).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn bisect_reports_missing_sign_change() {
        let e = bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12, 100).unwrap_err();
        assert!(matches!(e, RootError::NoSignChange { .. }));
    }

    #[test]
    fn bisect_accepts_infinite_sentinels() {
        let r = bisect(
            |x| if x > 1.5 { f64::INFINITY } else { x - 1.0 },
            0.0,
            3.0,
            1e-14,
            200,
        )
        .unwrap();
        assert!((r.x - 1.0).abs() < 1e-13);
    }

    #[test]
    fn newton_converges_on_cubic() {
        let r = newton_bisect(
            |x| (x * x * x - x - 2.0, 3.0 * x * x - 1.0),
            1.0,
            2.0,
            1.0,
            1e-15,
            100,
        )
        .unwrap();
        assert!((r.x.powi(3) - r.x - 2.0).abs() < 1e-13);
        assert!(r.iterations < 20);
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // f'(1) = 0 at the initial guess; bisection must take over.
        let r = newton_bisect(
            |x| ((x - 1.0).powi(3) - 0.001, 3.0 * (x - 1.0).powi(2)),
            0.0,
            3.0,
            1.0,
            1e-14,
            200,
        )
        .unwrap();
        assert!((r.x - 1.1).abs() < 1e-12);
    }
}
