//! Scalar numerics shared by the half-map solver and the flow oracle:
//! stable quadratic roots, a safeguarded Newton iteration on a bracket,
//! and a few series-guarded elementary functions.

/// Real roots of `c2·y² + c1·y + c0` in ascending order.
///
/// Falls back to the linear equation when `c2 == 0`. A discriminant that is
/// negative only by rounding noise is treated as a double root.
pub fn real_quadratic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let mut disc = c1 * c1 - 4.0 * c2 * c0;
    let noise = 8.0 * f64::EPSILON * (c1 * c1 + (4.0 * c2 * c0).abs());
    if disc < 0.0 {
        if -disc > noise {
            return Vec::new();
        }
        disc = 0.0;
    }
    let sq = disc.sqrt();
    let q = -0.5 * (c1 + sq.copysign(c1));
    if q == 0.0 {
        // c1 == 0 and c0 == 0
        return vec![0.0, 0.0];
    }
    let (r1, r2) = (q / c2, c0 / q);
    if r1 <= r2 {
        vec![r1, r2]
    } else {
        vec![r2, r1]
    }
}

/// Outcome of [`newton_bracketed`].
#[derive(Debug, Clone, Copy)]
pub struct RootEstimate {
    pub x: f64,
    pub residual: f64,
    pub iterations: usize,
}

/// Safeguarded Newton iteration for a root of `f` inside `[lo, hi]`.
///
/// `f` returns the value and the derivative. The endpoints must carry
/// opposite signs (a zero at either endpoint is returned as is). Newton
/// steps leaving the current bracket are replaced by bisection, so the
/// iteration never leaves the bracket. Stops once a step is below a few
/// ulps of the iterate or the bracket collapses.
pub fn newton_bracketed<F>(mut f: F, lo: f64, hi: f64, start: Option<f64>, max_iter: usize) -> Option<RootEstimate>
where
    F: FnMut(f64) -> (f64, f64),
{
    let (mut lo, mut hi) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let (f_lo, _) = f(lo);
    if f_lo == 0.0 {
        return Some(RootEstimate { x: lo, residual: 0.0, iterations: 0 });
    }
    let (f_hi, _) = f(hi);
    if f_hi == 0.0 {
        return Some(RootEstimate { x: hi, residual: 0.0, iterations: 0 });
    }
    if !(f_lo.is_finite() && f_hi.is_finite()) || f_lo.signum() == f_hi.signum() {
        return None;
    }
    let lo_positive = f_lo > 0.0;

    let mut x = match start {
        Some(s) if s > lo && s < hi => s,
        _ => 0.5 * (lo + hi),
    };
    let mut best = RootEstimate { x, residual: f64::INFINITY, iterations: 0 };
    for it in 1..=max_iter {
        let (fx, dfx) = f(x);
        if fx.abs() <= best.residual.abs() || !best.residual.is_finite() {
            best = RootEstimate { x, residual: fx, iterations: it };
        }
        if fx == 0.0 {
            return Some(best);
        }
        if (fx > 0.0) == lo_positive {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        let next = if newton.is_finite() && newton > lo && newton < hi {
            newton
        } else {
            0.5 * (lo + hi)
        };
        let step = (next - x).abs();
        let scale = x.abs().max(next.abs());
        x = next;
        if step <= 4.0 * f64::EPSILON * scale || hi - lo <= 4.0 * f64::EPSILON * lo.abs().max(hi.abs()) {
            let (fx, _) = f(x);
            if fx.abs() <= best.residual.abs() {
                best = RootEstimate { x, residual: fx, iterations: it };
            }
            return Some(best);
        }
    }
    Some(best)
}

/// Plain bisection on a sign change, stopping at absolute width `tol`.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64, max_iter: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if f_lo.signum() == f_hi.signum() || !f_lo.is_finite() || !f_hi.is_finite() {
        return None;
    }
    for _ in 0..max_iter {
        let mid = 0.5 * (lo + hi);
        if hi - lo <= tol || mid <= lo || mid >= hi {
            return Some(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if fm.signum() == f_lo.signum() {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// `sin(x)/x`, exact at the origin.
pub fn sinc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 - x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sin() / x
    }
}

/// `sinh(x)/x`, exact at the origin.
pub fn sinhc(x: f64) -> f64 {
    if x.abs() < 1e-4 {
        let x2 = x * x;
        1.0 + x2 / 6.0 + x2 * x2 / 120.0
    } else {
        x.sinh() / x
    }
}

/// `(e^x - 1 - x) / x²`, exact at the origin.
pub fn exp_second_remainder(x: f64) -> f64 {
    if x.abs() < 1e-3 {
        1.0 / 2.0 + x / 6.0 + x * x / 24.0 + x * x * x / 120.0
    } else {
        (x.exp_m1() - x) / (x * x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots_factored() {
        let r = real_quadratic_roots(2.0, -3.0, 1.0);
        assert_eq!(r.len(), 2);
        assert!((r[0] - 0.5).abs() < 1e-15 && (r[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn quadratic_roots_degenerate() {
        assert!(real_quadratic_roots(1.0, 0.0, 1.0).is_empty());
        assert_eq!(real_quadratic_roots(0.0, 2.0, -4.0), vec![2.0]);
        assert!(real_quadratic_roots(0.0, 0.0, 1.0).is_empty());
        let r = real_quadratic_roots(1.0, -2.0, 1.0);
        assert_eq!(r, vec![1.0, 1.0]);
    }

    #[test]
    fn quadratic_roots_cancellation() {
        // roots 1e-9 and 1e9
        let r = real_quadratic_roots(1.0, -(1e9 + 1e-9), 1.0);
        assert!((r[0] - 1e-9).abs() / 1e-9 < 1e-14);
        assert!((r[1] - 1e9).abs() / 1e9 < 1e-14);
    }

    #[test]
    fn newton_finds_sqrt_two() {
        let r = newton_bracketed(|x| (x * x - 2.0, 2.0 * x), 0.0, 2.0, None, 100).unwrap();
        assert!((r.x - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn newton_survives_flat_derivative() {
        // derivative vanishes at the left endpoint; bisection must take over
        let r = newton_bracketed(|x| (x.powi(3) - 0.001, 3.0 * x * x), 0.0, 1.0, Some(1e-12), 200).unwrap();
        assert!((r.x - 0.1).abs() < 1e-14);
    }

    #[test]
    fn newton_rejects_bad_bracket() {
        assert!(newton_bracketed(|x| (x * x + 1.0, 2.0 * x), -1.0, 1.0, None, 10).is_none());
    }

    #[test]
    fn bisect_basic() {
        let r = bisect(|x| x.cos(), 0.0, 3.0, 1e-13, 200).unwrap();
        assert!((r - std::f64::consts::FRAC_PI_2).abs() < 1e-12);
    }

    #[test]
    fn series_helpers_continuous() {
        for f in [sinc as fn(f64) -> f64, sinhc, exp_second_remainder] {
            let below = f(0.99e-4);
            let above = f(1.01e-3);
            assert!(below.is_finite() && above.is_finite());
        }
        let x = 0.999e-3_f64;
        assert!((exp_second_remainder(x) - (x.exp_m1() - x) / (x * x)).abs() < 1e-11);
        assert!((sinc(0.9999e-4) - sinc(1.0001e-4)).abs() < 1e-12);
    }
}
