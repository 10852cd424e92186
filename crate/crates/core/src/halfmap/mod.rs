//! Forward and backward Poincaré half-maps of a linear zone.
//!
//! For the zone `ẋ = T x - y`, `ẏ = D x - a`, the forward half-map sends
//! `y0 >= 0` to the ordinate `y1 <= 0` of the next crossing of `x = 0`. It is
//! the unique solution of
//!
//! ```text
//! PV ∫_{y1}^{y0} -y / W(y) dy = q(a, T, D),     W(y) = D y² - a T y + a²,
//! ```
//!
//! with `q = 0` for `a > 0`, `πT / (D √(4D - T²))` for `a = 0` and twice that
//! for `a < 0`. The backward half-map of a zone `(a, T, D)` is the forward
//! half-map of `(-a, -T, D)`; every `Backward` method routes through that dual.
//!
//! Evaluation solves the integral equation for `y1` with a safeguarded
//! Newton iteration on a bracket. The residual is strictly monotone in `y1`
//! (its derivative is `y1 / W(y1) < 0`), so a bracket is always available:
//! below by the largest negative root of `W`, or by geometric expansion
//! where the integral diverges.

mod integral;

pub use integral::pv_integral;

use crate::numeric::{newton_bracketed, real_quadratic_roots};
use crate::{Error, Result, Sign};
use serde::{Deserialize, Serialize, Serializer};
use std::cmp::Ordering;
use std::f64::consts::PI;
use std::fmt;

/// Tolerances of the half-map solver.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfMapConfig {
    /// Absolute tolerance on the integral residual.
    pub residual_tol: f64,
    /// Evaluation points closer than `mu · mu_cap` to a finite `mu` are
    /// clamped and flagged.
    pub mu_cap: f64,
    pub max_iter: usize,
}

impl Default for HalfMapConfig {
    fn default() -> Self {
        Self { residual_tol: 1e-12, mu_cap: 1e-9, max_iter: 200 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    Forward,
    Backward,
}

/// One zone of the canonical form, reduced to `(a, T, D)`.
///
/// `Forward` is the left zone; `Backward` the right zone with `b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HalfSystem {
    pub a: f64,
    pub trace: f64,
    pub det: f64,
    pub orientation: Orientation,
}

/// `W(y) = c2 y² + c1 y + c0` with `c2 = D`, `c1 = -aT`, `c0 = a²`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WPolynomial {
    pub c2: f64,
    pub c1: f64,
    pub c0: f64,
}

impl WPolynomial {
    pub fn new(a: f64, trace: f64, det: f64) -> Self {
        Self { c2: det, c1: -a * trace, c0: a * a }
    }

    pub fn eval(&self, y: f64) -> f64 {
        (self.c2 * y + self.c1) * y + self.c0
    }

    /// `W(y) > 0` by more than a bound on its evaluation error.
    pub fn reliably_positive(&self, y: f64) -> bool {
        let size = self.c2.abs() * y * y + self.c1.abs() * y.abs() + self.c0.abs();
        self.eval(y) > 64.0 * f64::EPSILON * size
    }

    pub fn real_roots(&self) -> Vec<f64> {
        real_quadratic_roots(self.c2, self.c1, self.c0)
    }

    pub fn smallest_positive_root(&self) -> Option<f64> {
        self.real_roots().into_iter().find(|&r| r > 0.0)
    }

    pub fn largest_negative_root(&self) -> Option<f64> {
        self.real_roots().into_iter().rev().find(|&r| r < 0.0)
    }
}

/// Right endpoint of a half-map domain: a finite root of `W` or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UpperBound {
    Finite(f64),
    Infinite,
}

impl UpperBound {
    pub fn is_finite(&self) -> bool {
        matches!(self, UpperBound::Finite(_))
    }

    /// `+∞` for the infinite bound.
    pub fn value(&self) -> f64 {
        match *self {
            UpperBound::Finite(v) => v,
            UpperBound::Infinite => f64::INFINITY,
        }
    }

    /// `y < self`.
    pub fn exceeds(&self, y: f64) -> bool {
        match *self {
            UpperBound::Finite(v) => y < v,
            UpperBound::Infinite => true,
        }
    }

    pub fn min(self, other: Self) -> Self {
        if self <= other {
            self
        } else {
            other
        }
    }

    pub fn shifted(self, by: f64) -> Self {
        match self {
            UpperBound::Finite(v) => UpperBound::Finite(v + by),
            UpperBound::Infinite => UpperBound::Infinite,
        }
    }
}

impl PartialOrd for UpperBound {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self, other) {
            (UpperBound::Infinite, UpperBound::Infinite) => Some(Ordering::Equal),
            (UpperBound::Infinite, UpperBound::Finite(_)) => Some(Ordering::Greater),
            (UpperBound::Finite(_), UpperBound::Infinite) => Some(Ordering::Less),
            (UpperBound::Finite(a), UpperBound::Finite(b)) => a.partial_cmp(b),
        }
    }
}

impl fmt::Display for UpperBound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UpperBound::Finite(v) => write!(f, "{v}"),
            UpperBound::Infinite => write!(f, "inf"),
        }
    }
}

impl Serialize for UpperBound {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            UpperBound::Finite(v) => s.serialize_f64(*v),
            UpperBound::Infinite => s.serialize_str("inf"),
        }
    }
}

/// `[lambda, mu)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HalfMapDomain {
    pub lambda: f64,
    pub mu: UpperBound,
    pub exists: bool,
}

impl HalfMapDomain {
    pub fn contains(&self, y0: f64) -> bool {
        y0 >= self.lambda && self.mu.exceeds(y0)
    }

    pub fn contains_interior(&self, y0: f64) -> bool {
        y0 > self.lambda && self.mu.exceeds(y0)
    }
}

/// A half-map value and whether the argument had to be pulled back from `mu`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfMapValue {
    pub value: f64,
    /// Set when `y0` was within `mu · mu_cap` of `mu` and was clamped.
    pub conditioning_warning: bool,
}

impl HalfSystem {
    pub fn forward(a: f64, trace: f64, det: f64) -> Self {
        Self { a, trace, det, orientation: Orientation::Forward }
    }

    pub fn backward(a: f64, trace: f64, det: f64) -> Self {
        Self { a, trace, det, orientation: Orientation::Backward }
    }

    /// The forward triple whose half-map coincides with this one:
    /// identity for `Forward`, `(-a, -T, D)` for `Backward`.
    pub fn as_forward(&self) -> HalfSystem {
        match self.orientation {
            Orientation::Forward => *self,
            Orientation::Backward => HalfSystem::forward(-self.a, -self.trace, self.det),
        }
    }

    pub fn w(&self) -> WPolynomial {
        WPolynomial::new(self.a, self.trace, self.det)
    }

    fn focus_discriminant(&self) -> f64 {
        4.0 * self.det - self.trace * self.trace
    }

    pub fn exists(&self) -> bool {
        let f = self.as_forward();
        (f.a <= 0.0 && f.focus_discriminant() > 0.0) || f.a > 0.0
    }

    fn require_exists(&self) -> Result<()> {
        if self.exists() {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "half-map undefined for a = {}, T = {}, D = {} ({:?})",
                self.a, self.trace, self.det, self.orientation
            )))
        }
    }

    /// Right-hand side of the integral characterization.
    pub fn q_value(&self) -> Result<f64> {
        self.require_exists()?;
        let f = self.as_forward();
        Ok(if f.a > 0.0 {
            0.0
        } else {
            let base = PI * f.trace / (f.det * f.focus_discriminant().sqrt());
            if f.a == 0.0 {
                base
            } else {
                2.0 * base
            }
        })
    }

    /// `[lambda, mu)`: `mu` is the smallest positive root of `W` (or `+∞`),
    /// `lambda` is positive only for a forward focus-type zone with `a < 0`
    /// and `T < 0` (dually for backward), where the half-map reaches `0`.
    pub fn domain(&self) -> Result<HalfMapDomain> {
        self.domain_with(&HalfMapConfig::default())
    }

    pub fn domain_with(&self, cfg: &HalfMapConfig) -> Result<HalfMapDomain> {
        self.require_exists()?;
        let f = self.as_forward();
        let w = f.w();
        let mu = w.smallest_positive_root().map_or(UpperBound::Infinite, UpperBound::Finite);
        let lambda = if f.a < 0.0 && f.focus_discriminant() > 0.0 && f.trace < 0.0 {
            f.solve_lambda(cfg)?
        } else {
            0.0
        };
        Ok(HalfMapDomain { lambda, mu, exists: true })
    }

    /// Positive solution of `∫_0^λ -y/W = q`; forward orientation, `a < 0`,
    /// `T < 0`, `4D > T²`.
    fn solve_lambda(&self, cfg: &HalfMapConfig) -> Result<f64> {
        let w = self.w();
        let q = self.q_value()?;
        let phi = |l: f64| (integral::definite(&w, 0.0, l) - q, -l / w.eval(l));
        let mut hi = self.a.abs().max(1.0);
        let mut guard = 0;
        while phi(hi).0 >= 0.0 {
            hi *= 2.0;
            guard += 1;
            if guard > 2000 || !hi.is_finite() {
                return Err(Error::Domain("no positive left endpoint found".into()));
            }
        }
        newton_bracketed(phi, 0.0, hi, None, cfg.max_iter)
            .map(|r| r.x)
            .ok_or_else(|| Error::Domain("left endpoint bracket lost".into()))
    }

    /// Half-map value `y1 <= 0` at `y0`.
    pub fn eval(&self, y0: f64) -> Result<f64> {
        self.eval_detailed(y0, &HalfMapConfig::default()).map(|v| v.value)
    }

    pub fn eval_detailed(&self, y0: f64, cfg: &HalfMapConfig) -> Result<HalfMapValue> {
        self.require_exists()?;
        self.as_forward().eval_forward(y0, cfg)
    }

    fn eval_forward(&self, y0: f64, cfg: &HalfMapConfig) -> Result<HalfMapValue> {
        if !y0.is_finite() || y0 < 0.0 {
            return Err(Error::Domain(format!("y0 = {y0} is not a non-negative real")));
        }
        let w = self.w();
        let mut y0 = y0;
        let mut conditioning_warning = false;
        if let Some(mu) = w.smallest_positive_root() {
            if y0 >= mu {
                return Err(Error::Domain(format!("y0 = {y0} is not below mu = {mu}")));
            }
            let cap = mu * (1.0 - cfg.mu_cap);
            if y0 > cap {
                y0 = cap;
                conditioning_warning = true;
            }
        }

        if self.a == 0.0 {
            let value = -(PI * self.trace / self.focus_discriminant().sqrt()).exp() * y0;
            return Ok(HalfMapValue { value, conditioning_warning });
        }

        let q = self.q_value()?;
        let residual = |y1: f64| integral::definite(&w, y1, y0) - q;
        // Residual at y1 = 0 is positive exactly when y0 < lambda.
        let at_zero = residual(0.0);
        if at_zero > 1e-10 * q.abs().max(1.0) {
            return Err(Error::Domain(format!("y0 = {y0} lies below the left endpoint of the domain")));
        }
        if at_zero >= 0.0 {
            return Ok(HalfMapValue { value: 0.0, conditioning_warning });
        }

        let lo = match w.largest_negative_root() {
            Some(r) => {
                // Move the barrier off the root until W(lo) is above its own
                // rounding error; near a double root that takes more than 1e-12.
                let mut gap = 1e-12;
                let mut lo = r * (1.0 - gap);
                while gap < 1e-3 && !w.reliably_positive(lo) {
                    gap *= 4.0;
                    lo = r * (1.0 - gap);
                }
                if residual(lo) <= 0.0 {
                    return Ok(HalfMapValue { value: lo, conditioning_warning });
                }
                lo
            }
            None => {
                let mut lo = -y0.max(1.0);
                let mut guard = 0;
                while residual(lo) <= 0.0 {
                    lo *= 2.0;
                    guard += 1;
                    if guard > 2000 || !lo.is_finite() {
                        return Err(Error::Domain(format!("no bracket for the half-map at y0 = {y0}")));
                    }
                }
                lo
            }
        };

        let root = newton_bracketed(|y1| (residual(y1), y1 / w.eval(y1)), lo, 0.0, Some(-y0), cfg.max_iter)
            .ok_or_else(|| Error::Domain(format!("half-map bracket lost at y0 = {y0}")))?;
        Ok(HalfMapValue { value: root.x.min(0.0), conditioning_warning })
    }

    /// `y'(y0) = y0 W(y(y0)) / (y(y0) W(y0))`, strictly negative on the
    /// interior of the domain.
    pub fn derivative(&self, y0: f64) -> Result<f64> {
        let dom = self.domain()?;
        if !dom.contains_interior(y0) {
            return Err(Error::Domain(format!("y0 = {y0} is not interior to [{}, {})", dom.lambda, dom.mu)));
        }
        let y1 = self.eval(y0)?;
        if y1 == 0.0 {
            return Err(Error::Domain(format!("half-map vanishes at y0 = {y0}")));
        }
        let w = self.w();
        Ok(y0 * w.eval(y1) / (y1 * w.eval(y0)))
    }

    /// `sign(y0 + y(y0))`, which equals `-sign(T)` for forward maps and
    /// `sign(T)` for backward maps away from `y0 = 0`.
    pub fn sign_relation(&self, y0: f64) -> Result<Sign> {
        let y1 = self.eval(y0)?;
        let tol = 1e-12 * y0.abs().max(y1.abs()).max(1.0);
        Ok(Sign::with_tol(y0 + y1, tol))
    }

    /// Backward maps with `y(0) = ŷ1 < 0`: returns `(ŷ1, W(ŷ1) / (2 a² ŷ1))`,
    /// the constant and quadratic Taylor coefficients at the origin (the
    /// linear one vanishes).
    pub fn taylor_at_zero(&self) -> Result<(f64, f64)> {
        if self.orientation != Orientation::Backward {
            return Err(Error::Precondition("Taylor expansion at 0 is provided for backward half-maps".into()));
        }
        let dom = self.domain()?;
        if dom.lambda != 0.0 {
            return Err(Error::Domain("0 is not in the domain".into()));
        }
        let y1 = self.eval(0.0)?;
        if y1 >= 0.0 {
            return Err(Error::Domain("half-map vanishes at 0".into()));
        }
        Ok((y1, self.w().eval(y1) / (2.0 * self.a * self.a * y1)))
    }

    /// Forward maps with `lambda > 0`: returns `(lambda, a √(2λ / W(λ)))`,
    /// the coefficient of `(y0 - λ)^{1/2}`.
    pub fn puiseux_at_lambda(&self) -> Result<(f64, f64)> {
        if self.orientation != Orientation::Forward {
            return Err(Error::Precondition("Newton-Puiseux expansion is provided for forward half-maps".into()));
        }
        let lambda = self.domain()?.lambda;
        if lambda <= 0.0 {
            return Err(Error::Domain("left endpoint of the domain is 0".into()));
        }
        Ok((lambda, self.a * (2.0 * lambda / self.w().eval(lambda)).sqrt()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SQRT3: f64 = 1.732_050_807_568_877_2;

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * b.abs().max(1.0)
    }

    #[test]
    fn existence_clauses() {
        assert!(!HalfSystem::forward(-1.0, 3.0, 2.0).exists());
        assert!(HalfSystem::forward(1.0, 100.0, -5.0).exists());
        assert!(HalfSystem::backward(1.0, -1.0, 1.0).exists());
        assert!(!HalfSystem::backward(1.0, 3.0, 2.0).exists());
        assert!(HalfSystem::backward(-1.0, 3.0, 2.0).exists());
    }

    #[test]
    fn q_values() {
        assert_eq!(HalfSystem::forward(1.0, 5.0, 2.0).q_value().unwrap(), 0.0);
        assert_eq!(HalfSystem::forward(0.0, 0.0, 1.0).q_value().unwrap(), 0.0);
        assert!(close(HalfSystem::forward(-1.0, 2.0, 2.0).q_value().unwrap(), PI, 1e-15));
        // backward (a > 0) is -2πT/(D√(4D - T²))
        let q = HalfSystem::backward(1.0, 1.0, 1.0).q_value().unwrap();
        assert!(close(q, -2.0 * PI / SQRT3, 1e-15));
        assert!(HalfSystem::forward(-1.0, 3.0, 2.0).q_value().is_err());
    }

    #[test]
    fn domain_factored_quadratic() {
        let d = HalfSystem::forward(1.0, 3.0, 2.0).domain().unwrap();
        assert_eq!(d.lambda, 0.0);
        assert_eq!(d.mu, UpperBound::Finite(0.5));
    }

    #[test]
    fn domain_positive_definite() {
        let d = HalfSystem::forward(-1.0, 0.0, 1.0).domain().unwrap();
        assert_eq!((d.lambda, d.mu), (0.0, UpperBound::Infinite));
    }

    #[test]
    fn domain_positive_lambda_pin() {
        // mpmath: ∫_0^λ -y/(y² - y + 1) dy = -2π/√3
        let d = HalfSystem::forward(-1.0, -1.0, 1.0).domain().unwrap();
        assert!(close(d.lambda, 12.185_744_190_338_538, 1e-12), "{}", d.lambda);
        assert_eq!(d.mu, UpperBound::Infinite);
        assert_eq!(HalfSystem::forward(-1.0, -1.0, 1.0).eval(d.lambda).unwrap(), 0.0);
    }

    #[test]
    fn eval_closed_forms() {
        assert_eq!(HalfSystem::forward(0.0, 0.0, 1.0).eval(2.0).unwrap(), -2.0);
        let v = HalfSystem::forward(0.0, 1.0, 1.0).eval(1.0).unwrap();
        assert!(close(v, -(PI / SQRT3).exp(), 1e-15));
    }

    #[test]
    fn eval_root_pin() {
        // mpmath root of ∫_{y1}^{1} -y/(y²+y+1) dy = 2π/√3
        let v = HalfSystem::forward(-1.0, 1.0, 1.0).eval(1.0).unwrap();
        assert!(close(v, -15.340_487_060_457_24, 1e-12), "{v}");
    }

    #[test]
    fn eval_outside_domain() {
        let h = HalfSystem::forward(1.0, 3.0, 2.0);
        assert!(matches!(h.eval(0.5), Err(Error::Domain(_))));
        assert!(h.eval(-0.1).is_err());
        assert!(HalfSystem::forward(-1.0, -1.0, 1.0).eval(5.0).is_err());
    }

    #[test]
    fn conditioning_cap_near_mu() {
        let h = HalfSystem::forward(1.0, 3.0, 2.0);
        let v = h.eval_detailed(0.5 * (1.0 - 1e-12), &HalfMapConfig::default()).unwrap();
        assert!(v.conditioning_warning);
        assert!(v.value.is_finite() && v.value < 0.0);
        assert!(!h.eval_detailed(0.25, &HalfMapConfig::default()).unwrap().conditioning_warning);
    }

    #[test]
    fn derivative_values() {
        assert!(close(HalfSystem::forward(0.0, 0.0, 1.0).derivative(1.0).unwrap(), -1.0, 1e-15));
        let s = HalfSystem::forward(0.0, 1.0, 1.0).derivative(1.0).unwrap();
        assert!(close(s, -(PI / SQRT3).exp(), 1e-14));
        // mpmath: 1·W(y1)/(y1·W(1)) at the pinned root
        let d = HalfSystem::forward(-1.0, 1.0, 1.0).derivative(1.0).unwrap();
        assert!(close(d, -4.801_891_346_314_962, 1e-11), "{d}");
    }

    #[test]
    fn derivative_refuses_endpoints() {
        let h = HalfSystem::forward(-1.0, 0.0, 1.0);
        assert!(h.derivative(0.0).is_err());
        let h = HalfSystem::forward(1.0, 3.0, 2.0);
        assert!(h.derivative(0.5).is_err());
    }

    #[test]
    fn sign_relation_cases() {
        assert_eq!(HalfSystem::forward(-1.0, 0.0, 1.0).sign_relation(1.3).unwrap(), Sign::Zero);
        assert_eq!(HalfSystem::forward(2.0, 0.0, -1.0).sign_relation(0.7).unwrap(), Sign::Zero);
        assert_eq!(HalfSystem::forward(0.0, 1.0, 1.0).sign_relation(1.0).unwrap(), Sign::Negative);
        assert_eq!(HalfSystem::backward(0.0, 1.0, 1.0).sign_relation(1.0).unwrap(), Sign::Positive);
    }

    #[test]
    fn backward_routes_through_dual() {
        let b = HalfSystem::backward(0.7, -0.4, 1.3);
        let f = HalfSystem::forward(-0.7, 0.4, 1.3);
        for y0 in [0.0, 0.3, 1.0, 4.0] {
            assert_eq!(b.eval(y0).unwrap().to_bits(), f.eval(y0).unwrap().to_bits());
        }
        assert_eq!(b.domain().unwrap(), f.domain().unwrap());
    }

    #[test]
    fn taylor_requires_nonzero_value_at_origin() {
        let (y1, c) = HalfSystem::backward(1.0, -1.0, 1.0).taylor_at_zero().unwrap();
        assert!(y1 < 0.0 && c.is_finite());
        assert!(matches!(HalfSystem::backward(1.0, 0.0, 1.0).taylor_at_zero(), Err(Error::Domain(_))));
        assert!(matches!(HalfSystem::forward(1.0, -1.0, 1.0).taylor_at_zero(), Err(Error::Precondition(_))));
    }

    #[test]
    fn puiseux_coefficient() {
        let (lambda, coeff) = HalfSystem::forward(-1.0, -1.0, 1.0).puiseux_at_lambda().unwrap();
        let expected = -(2.0 * lambda / (lambda * lambda - lambda + 1.0)).sqrt();
        assert!(close(coeff, expected, 1e-15));
        // mpmath at the pinned λ
        assert!(close(coeff, -0.421_303_718_549_851_67, 1e-12));
        assert!(matches!(HalfSystem::forward(-1.0, 1.0, 1.0).puiseux_at_lambda(), Err(Error::Domain(_))));
    }

    #[test]
    fn upper_bound_ordering() {
        let a = UpperBound::Finite(0.5);
        assert_eq!(a.min(UpperBound::Infinite), a);
        assert_eq!(UpperBound::Infinite.min(a), a);
        assert!(UpperBound::Infinite.exceeds(1e300));
        assert!(!a.exceeds(0.5));
        assert_eq!(a.shifted(1.0), UpperBound::Finite(1.5));
    }
}
