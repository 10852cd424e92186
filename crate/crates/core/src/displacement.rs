//! Displacement function `δ(y0) = y_R(y0 - b) + b - y_L(y0)` and the sign
//! formulas for its derivatives at zeros.
//!
//! `y_L` is the forward half-map of the left zone and `y_R` the backward
//! half-map of the right zone with `b = 0`. A crossing periodic orbit through
//! `(0, y0)` is a zero of `δ`; a crossing period annulus is an interval where
//! `δ` vanishes identically.

use crate::halfmap::{HalfSystem, Orientation, UpperBound};
use crate::numeric::bisect;
use crate::{Error, Result, Sign};
use serde::Serialize;

/// Everything needed to evaluate `δ` on `[lambda_b, mu_b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DisplacementContext {
    pub left: HalfSystem,
    pub right: HalfSystem,
    pub b: f64,
    pub lambda_b: f64,
    pub mu_b: UpperBound,
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    /// `lambda_b >= mu_b`: no common domain.
    pub empty: bool,
    /// Absolute tolerance, relative to `max(1, |y0|)`, for "δ = 0".
    pub contract_tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrbitKind {
    Isolated,
    AnnulusCandidate,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingOrbit {
    pub y0: f64,
    pub kind: OrbitKind,
}

/// Grid scan settings for [`DisplacementContext::find_crossing_orbits`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub grid_n: usize,
    /// Scan length for infinite `mu_b`, in units of `max(1, lambda_b)`.
    pub span_factor: f64,
    /// Uniform smallness of `|δ| / max(1, |y0|)` that marks an annulus.
    pub annulus_tol: f64,
    pub refine_tol: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self { grid_n: 64, span_factor: 10.0, annulus_tol: 1e-9, refine_tol: 1e-10 }
    }
}

/// `c0 + c1 y0 y1 + c2 (y0 + y1)`.
pub fn f_polynomial(c0: f64, c1: f64, c2: f64, y0: f64, y1: f64) -> f64 {
    c0 + c1 * y0 * y1 + c2 * (y0 + y1)
}

impl DisplacementContext {
    pub fn new(left: HalfSystem, right: HalfSystem, b: f64) -> Result<Self> {
        if left.orientation != Orientation::Forward || right.orientation != Orientation::Backward {
            return Err(Error::Precondition("expected a forward left zone and a backward right zone".into()));
        }
        if !b.is_finite() {
            return Err(Error::InvalidParams(format!("non-finite offset b = {b}")));
        }
        let dl = left.domain()?;
        let dr = right.domain()?;
        let lambda_b = dl.lambda.max(dr.lambda + b);
        let mu_b = dl.mu.min(dr.mu.shifted(b));
        let (al, tl, dl_) = (left.a, left.trace, left.det);
        let (ar, tr, dr_) = (right.a, right.trace, right.det);
        Ok(Self {
            left,
            right,
            b,
            lambda_b,
            mu_b,
            c0: ar * al * (ar * tl - al * tr),
            c1: ar * tr * dl_ - al * tl * dr_,
            c2: al * al * dr_ - ar * ar * dl_,
            empty: !mu_b.exceeds(lambda_b),
            contract_tol: 1e-8,
        })
    }

    pub fn contains(&self, y0: f64) -> bool {
        !self.empty && y0 >= self.lambda_b && self.mu_b.exceeds(y0)
    }

    fn require_domain(&self, y0: f64) -> Result<()> {
        if self.contains(y0) {
            Ok(())
        } else {
            Err(Error::Domain(format!("y0 = {y0} is outside [{}, {})", self.lambda_b, self.mu_b)))
        }
    }

    /// Right half-map argument `y0 - b`, pulled up to `lambda_R` when it
    /// falls short only by rounding.
    fn right_argument(&self, y0: f64) -> Result<f64> {
        let arg = y0 - self.b;
        let lambda_r = self.right.domain()?.lambda;
        if arg < lambda_r && arg >= lambda_r - 4.0 * f64::EPSILON * y0.abs().max(self.b.abs()).max(1.0) {
            Ok(lambda_r)
        } else {
            Ok(arg)
        }
    }

    pub fn delta(&self, y0: f64) -> Result<f64> {
        self.require_domain(y0)?;
        let yl = self.left.eval(y0)?;
        let yr = self.right.eval(self.right_argument(y0)?)?;
        Ok(yr + self.b - yl)
    }

    /// `δ'(y0)` from the half-map derivative formula; interior points only.
    pub fn delta_prime(&self, y0: f64) -> Result<f64> {
        self.require_domain(y0)?;
        Ok(self.right.derivative(self.right_argument(y0)?)? - self.left.derivative(y0)?)
    }

    /// Magnitudes of the products that make up `c0`, `c1`, `c2`; cancellation
    /// below these (times a small factor) is rounding noise.
    fn coefficient_scales(&self) -> (f64, f64, f64) {
        let (al, tl, dl) = (self.left.a, self.left.trace, self.left.det);
        let (ar, tr, dr) = (self.right.a, self.right.trace, self.right.det);
        (
            (ar * al).abs() * ((ar * tl).abs() + (al * tr).abs()),
            (ar * tr * dl).abs() + (al * tl * dr).abs(),
            (al * al * dr).abs() + (ar * ar * dl).abs(),
        )
    }

    pub fn f_value(&self, y0: f64, y1: f64) -> f64 {
        f_polynomial(self.c0, self.c1, self.c2, y0, y1)
    }

    fn require_zero(&self, y0: f64, y1: f64) -> Result<()> {
        if self.b != 0.0 {
            return Err(Error::Contract(format!("sign formulas need b = 0, got {}", self.b)));
        }
        if !(y0 > self.lambda_b && self.mu_b.exceeds(y0)) || self.empty {
            return Err(Error::Contract(format!("y0 = {y0} is not interior to the domain")));
        }
        let scale = y0.abs().max(1.0);
        let yl = self.left.eval(y0)?;
        let yr = self.right.eval(y0)?;
        if (yr - yl).abs() > self.contract_tol * scale {
            return Err(Error::Contract(format!("δ({y0}) = {} is not zero", yr - yl)));
        }
        if (y1 - yl).abs() > self.contract_tol * scale.max(yl.abs()) {
            return Err(Error::Contract(format!("y1 = {y1} is not the half-map value {yl}")));
        }
        if y1 >= 0.0 {
            return Err(Error::Contract(format!("y1 = {y1} must be negative")));
        }
        Ok(())
    }

    /// `sign(δ'(y0))` at a zero `y0` with common half-map value `y1`, read
    /// off the sign of `F(y0, y1)`.
    pub fn sign_delta_prime_at_zero(&self, y0: f64, y1: f64) -> Result<Sign> {
        self.require_zero(y0, y1)?;
        let (s0, s1, s2) = self.coefficient_scales();
        let size = s0 + s1 * (y0 * y1).abs() + s2 * (y0.abs() + y1.abs());
        Ok(Sign::with_tol(self.f_value(y0, y1), 1e-10 * size))
    }

    /// At a double zero of `δ`: `(sign(T_L (c2 y0 + c0)), -sign(T_R (c2 y1 + c0)))`.
    /// Both components give `sign(δ''(y0))` and must agree.
    pub fn sign_delta_second_at_critical(&self, y0: f64, y1: f64) -> Result<(Sign, Sign)> {
        self.require_zero(y0, y1)?;
        let dp = self.delta_prime(y0)?;
        let slope = self.left.derivative(y0)?.abs().max(1.0);
        if dp.abs() > self.contract_tol.sqrt() * slope {
            return Err(Error::Contract(format!("δ'({y0}) = {dp} is not zero")));
        }
        let l = self.left.trace * (self.c2 * y0 + self.c0);
        let r = self.right.trace * (self.c2 * y1 + self.c0);
        let (s0, _, s2) = self.coefficient_scales();
        let tol = |v: f64, t: f64| 1e-10 * t.abs() * (s2 * v.abs() + s0);
        Ok((Sign::with_tol(l, tol(y0, self.left.trace)), -Sign::with_tol(r, tol(y1, self.right.trace))))
    }

    /// End of the scanned interval.
    pub fn scan_end(&self, cfg: &ScanConfig) -> f64 {
        match self.mu_b {
            UpperBound::Finite(mu) => mu,
            UpperBound::Infinite => self.lambda_b + cfg.span_factor * self.lambda_b.max(1.0),
        }
    }

    /// Samples of `δ` at the `grid_n` cell midpoints `lambda_b + (i + 1/2) h`,
    /// `h = (end - lambda_b) / grid_n`. The endpoint itself is skipped: at a
    /// positive `lambda_b` the half-maps have a square-root singularity there.
    pub fn sample(&self, cfg: &ScanConfig) -> Vec<(f64, Result<f64>)> {
        if self.empty {
            return Vec::new();
        }
        let n = cfg.grid_n.max(2);
        let end = self.scan_end(cfg);
        let h = (end - self.lambda_b) / n as f64;
        (0..n)
            .map(|i| {
                let y0 = self.lambda_b + (i as f64 + 0.5) * h;
                (y0, self.delta(y0))
            })
            .collect()
    }

    /// Zeros of `δ` on a grid scan. A uniformly vanishing `δ` is reported as
    /// one [`OrbitKind::AnnulusCandidate`] per grid point; otherwise each sign
    /// change is refined by bisection into an [`OrbitKind::Isolated`] zero.
    pub fn find_crossing_orbits(&self, cfg: &ScanConfig) -> Vec<CrossingOrbit> {
        let samples: Vec<(f64, f64)> =
            self.sample(cfg).into_iter().filter_map(|(y, d)| d.ok().map(|d| (y, d))).collect();
        if samples.is_empty() {
            return Vec::new();
        }
        if samples.iter().all(|&(y, d)| d.abs() < cfg.annulus_tol * y.abs().max(1.0)) {
            return samples.iter().map(|&(y0, _)| CrossingOrbit { y0, kind: OrbitKind::AnnulusCandidate }).collect();
        }
        let mut out = Vec::new();
        for pair in samples.windows(2) {
            let ((ya, da), (yb, db)) = (pair[0], pair[1]);
            // y0 = 0 with both maps vanishing is the tangency point, not an orbit
            if da == 0.0 && ya != 0.0 {
                out.push(CrossingOrbit { y0: ya, kind: OrbitKind::Isolated });
            } else if da * db < 0.0 {
                let f = |y: f64| self.delta(y).unwrap_or(f64::NAN);
                if let Some(y0) = bisect(f, ya, yb, cfg.refine_tol, 200) {
                    out.push(CrossingOrbit { y0, kind: OrbitKind::Isolated });
                }
            }
        }
        if let Some(&(y, d)) = samples.last() {
            if d == 0.0 {
                out.push(CrossingOrbit { y0: y, kind: OrbitKind::Isolated });
            }
        }
        out
    }
}

/// Shorthand for [`DisplacementContext::new`].
pub fn make_context(left: HalfSystem, right: HalfSystem, b: f64) -> Result<DisplacementContext> {
    DisplacementContext::new(left, right, b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn ctx(l: (f64, f64, f64), r: (f64, f64, f64), b: f64) -> DisplacementContext {
        make_context(HalfSystem::forward(l.0, l.1, l.2), HalfSystem::backward(r.0, r.1, r.2), b).unwrap()
    }

    #[test]
    fn domain_examples() {
        let c = ctx((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0), 0.0);
        assert_eq!((c.lambda_b, c.mu_b), (0.0, UpperBound::Infinite));
        let c = ctx((1.0, 3.0, 2.0), (1.0, 0.0, 1.0), 0.0);
        assert_eq!(c.mu_b, UpperBound::Finite(0.5));
        assert!(!c.empty);
        let c = ctx((1.0, 3.0, 2.0), (1.0, 0.0, 1.0), 10.0);
        assert!(c.lambda_b >= 10.0 && c.empty);
        assert!(c.delta(10.0).is_err());
    }

    #[test]
    fn orientation_checked() {
        let f = HalfSystem::forward(-1.0, 0.0, 1.0);
        assert!(make_context(f, f, 0.0).is_err());
        // right zone without a backward half-map
        assert!(make_context(f, HalfSystem::backward(1.0, 3.0, 2.0), 0.0).is_err());
    }

    #[test]
    fn zero_traces_give_zero_delta() {
        let c = ctx((-0.7, 0.0, 2.0), (1.3, 0.0, 0.5), 0.0);
        for y in [0.0, 0.3, 1.0, 7.5] {
            assert!(c.delta(y).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_family_delta_vanishes() {
        let c = ctx((-2.0, -2.0, 4.0), (1.0, 1.0, 1.0), 0.0);
        assert!(c.lambda_b > 0.0);
        for i in 0..20 {
            let y = c.lambda_b + 0.25 * i as f64;
            assert!(c.delta(y).unwrap().abs() < 1e-8, "{y}");
        }
        let found = c.find_crossing_orbits(&ScanConfig::default());
        assert!(!found.is_empty() && found.iter().all(|o| o.kind == OrbitKind::AnnulusCandidate));
    }

    #[test]
    fn foci_delta_positive() {
        let c = ctx((0.0, 1.0, 1.0), (0.0, 1.0, 1.0), 0.0);
        let e = (PI / 3f64.sqrt()).exp();
        assert!((c.delta(1.0).unwrap() - (e - 1.0 / e)).abs() < 1e-12);
        assert!(c.find_crossing_orbits(&ScanConfig::default()).is_empty());
    }

    #[test]
    fn f_arithmetic() {
        assert_eq!(f_polynomial(2.0, 3.0, 5.0, 1.0, -1.0), -1.0);
        assert_eq!(f_polynomial(0.0, 0.0, 0.0, 4.0, -3.0), 0.0);
    }

    #[test]
    fn coefficient_identities() {
        let (al, tl, dl) = (-0.8, 0.6, 1.7);
        let (ar, tr, dr) = (1.4, -0.3, 0.9);
        let c = ctx((al, tl, dl), (ar, tr, dr), 0.0);
        let xi0 = ar * tl - al * tr;
        let xi_inf = tl * tl * dr - tr * tr * dl;
        assert!((c.c0 - ar * al * xi0).abs() < 1e-14);
        assert!((tl * c.c1 + al * xi_inf - dl * tr * xi0).abs() < 1e-14);
        assert!((tr * c.c1 + ar * xi_inf - dr * tl * xi0).abs() < 1e-14);
    }

    #[test]
    fn sign_formula_at_isolated_zero() {
        // one crossing limit cycle near y0 = 2.097
        let c = ctx((-1.0, 0.2, 1.0), (-1.0, -0.5, 1.0), 0.0);
        let zeros = c.find_crossing_orbits(&ScanConfig::default());
        assert_eq!(zeros.len(), 1, "{zeros:?}");
        let y0 = zeros[0].y0;
        let y1 = c.left.eval(y0).unwrap();
        let h = 1e-5 * y0.max(1.0);
        let fd = (c.delta(y0 + h).unwrap() - c.delta(y0 - h).unwrap()) / (2.0 * h);
        let s = c.sign_delta_prime_at_zero(y0, y1).unwrap();
        assert_eq!(s, Sign::of(fd));
        assert_eq!(s, Sign::of(c.delta_prime(y0).unwrap()));
    }

    #[test]
    fn contract_violations() {
        let c = ctx((0.0, 1.0, 1.0), (0.0, 1.0, 1.0), 0.0);
        let y1 = c.left.eval(1.0).unwrap();
        assert!(matches!(c.sign_delta_prime_at_zero(1.0, y1), Err(Error::Contract(_))));
        let c = ctx((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0), 0.5);
        assert!(matches!(c.sign_delta_prime_at_zero(1.0, -1.0), Err(Error::Contract(_))));
    }

    #[test]
    fn second_sign_zero_trace() {
        // both traces zero: δ ≡ 0 and both components vanish
        let c = ctx((-1.0, 0.0, 1.0), (1.0, 0.0, 1.0), 0.0);
        let (l, r) = c.sign_delta_second_at_critical(2.0, -2.0).unwrap();
        assert_eq!((l, r), (Sign::Zero, Sign::Zero));
    }
}
