//! Closed-form evaluation of `PV ∫_{y1}^{y0} -y / W(y) dy`.
//!
//! With `W(y) = D y² + B y + C` (`B = -aT`, `C = a²`) the integrand splits as
//! `-(2Dy + B) / (2D W) + (B / 2D) / W`. The first piece integrates to a log
//! of `W`; the second to an arctangent, an inverse hyperbolic tangent or a
//! rational term depending on the sign of `B² - 4DC = a²(T² - 4D)`. The
//! differences of antiderivatives are written as single `atan2` / `atanh`
//! calls so that nothing blows up as the discriminant goes to zero.

use super::{HalfSystem, WPolynomial};
use crate::{Error, Result};

/// `PV ∫_{y1}^{y0} -y / W(y) dy` for the polynomial of `h`.
///
/// When `a = 0` the integrand is `-1/(D y)` and the principal value across
/// the origin is taken symbolically. Otherwise `W` must stay strictly
/// positive on `[y1, y0]`.
pub fn pv_integral(h: &HalfSystem, y1: f64, y0: f64) -> Result<f64> {
    if !(y1.is_finite() && y0.is_finite()) || y1 > y0 {
        return Err(Error::Domain(format!("integration limits must satisfy y1 <= y0, got [{y1}, {y0}]")));
    }
    let w = h.w();
    if w.c0 == 0.0 {
        if w.c2 == 0.0 {
            return Err(Error::Domain("W vanishes identically".into()));
        }
        if y1 == y0 {
            return Ok(0.0);
        }
        if y1 == 0.0 || y0 == 0.0 {
            return Err(Error::Domain("integral diverges at an endpoint equal to 0".into()));
        }
        return Ok(log_branch_a_zero(&w, y1, y0));
    }
    if let Some(r) = w.real_roots().into_iter().find(|&r| r >= y1 && r <= y0) {
        return Err(Error::Domain(format!("W vanishes at {r} inside [{y1}, {y0}]")));
    }
    if w.eval(0.5 * (y1 + y0)) <= 0.0 {
        return Err(Error::Domain(format!("W is negative on [{y1}, {y0}]")));
    }
    Ok(definite(&w, y1, y0))
}

/// `a = 0`: `-(1/D) (ln|y0| - ln|y1|)`, a principal value when `y1 < 0 < y0`.
fn log_branch_a_zero(w: &WPolynomial, y1: f64, y0: f64) -> f64 {
    -(y0.abs() / y1.abs()).ln() / w.c2
}

/// Proper integral for `a != 0` without validation; callers guarantee that
/// `W` does not vanish on the interval.
pub(crate) fn definite(w: &WPolynomial, y1: f64, y0: f64) -> f64 {
    if y1 == y0 {
        return 0.0;
    }
    if w.c0 == 0.0 {
        return log_branch_a_zero(w, y1, y0);
    }
    let (d, b, c) = (w.c2, w.c1, w.c0);
    if d == 0.0 {
        if b == 0.0 {
            return -(y0 - y1) * (y0 + y1) / (2.0 * c);
        }
        // ∫ -y/(By + C) = -y/B + (C/B²) ln|By + C|
        let ratio = (b * y0 + c) / (b * y1 + c);
        return -(y0 - y1) / b + c / (b * b) * ratio.ln();
    }

    let log_term = -(w.eval(y0) / w.eval(y1)).ln() / (2.0 * d);
    let p0 = 2.0 * d * y0 + b;
    let p1 = 2.0 * d * y1 + b;
    let disc = b * b - 4.0 * d * c;
    let inv_w = if disc < 0.0 {
        let s = (-disc).sqrt();
        2.0 / s * (s * (p0 - p1)).atan2(s * s + p0 * p1)
    } else if disc > 0.0 {
        let s = disc.sqrt();
        2.0 / s * (s * (p0 - p1) / (p0 * p1 - s * s)).atanh()
    } else {
        2.0 * (p0 - p1) / (p0 * p1)
    };
    log_term + b / (2.0 * d) * inv_w
}
