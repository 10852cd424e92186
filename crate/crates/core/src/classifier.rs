//! Decision procedure for crossing period annuli.
//!
//! A system satisfying the crossing hypothesis (H) has a crossing period
//! annulus exactly when `sign(T_R) = -sign(T_L)` and `ξ0 = ξ∞ = β = 0`.
//! The equalities are tested against `tol · max(1, M)^k` where `M` is the
//! largest absolute coefficient and `k` the polynomial degree of the
//! quantity in the coefficients, so the test is invariant under rescaling.
//! Every clause is recorded together with its raw value.

use crate::params::{DerivedQuantities, SystemParams};
use crate::{Error, Result, Sign};
use serde::Serialize;
use std::fmt;

pub const DEFAULT_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Clause {
    /// `a12_L · a12_R > 0`.
    CrossingDirection,
    /// `(a_L <= 0 and 4D_L > T_L²) or a_L > 0`.
    LeftHalfMap,
    /// `(a_R >= 0 and 4D_R > T_R²) or a_R < 0`.
    RightHalfMap,
    /// `sign(T_R) = -sign(T_L)`.
    TraceSign,
    Xi0,
    XiInf,
    Beta,
    /// Linear center in the left zone: `T_L = 0`, `D_L > 0`, `a_L < 0`.
    CenterLeft,
    /// Linear center in the right zone: `T_R = 0`, `D_R > 0`, `a_R > 0`.
    CenterRight,
}

impl Clause {
    pub fn name(self) -> &'static str {
        match self {
            Clause::CrossingDirection => "crossing_direction",
            Clause::LeftHalfMap => "left_half_map",
            Clause::RightHalfMap => "right_half_map",
            Clause::TraceSign => "trace_sign",
            Clause::Xi0 => "xi0",
            Clause::XiInf => "xi_inf",
            Clause::Beta => "beta",
            Clause::CenterLeft => "center_left",
            Clause::CenterRight => "center_right",
        }
    }

    /// Clauses of (H).
    pub fn is_hypothesis(self) -> bool {
        matches!(self, Clause::CrossingDirection | Clause::LeftHalfMap | Clause::RightHalfMap)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClauseRecord {
    pub name: Clause,
    /// Raw residual or tested quantity.
    pub value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    LinearCenterLeft,
    LinearCenterRight,
    CrossingPeriodAnnulus,
    NoPeriodAnnulus,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::LinearCenterLeft => "linear_center_left",
            Verdict::LinearCenterRight => "linear_center_right",
            Verdict::CrossingPeriodAnnulus => "crossing_period_annulus",
            Verdict::NoPeriodAnnulus => "no_period_annulus",
        })
    }
}

/// Open interval `(lower, upper)` of separation-line ordinates where the
/// flow slides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SlidingInterval {
    pub lower: f64,
    pub upper: f64,
}

impl SlidingInterval {
    pub fn contains(&self, y: f64) -> bool {
        y > self.lower && y < self.upper
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: Verdict,
    pub reasons: Vec<ClauseRecord>,
    pub sliding: Option<SlidingInterval>,
}

impl Classification {
    pub fn record(&self, clause: Clause) -> Option<&ClauseRecord> {
        self.reasons.iter().find(|r| r.name == clause)
    }

    /// Failing clauses of the annulus predicate, in a fixed order; center
    /// clauses are excluded.
    pub fn failing(&self) -> Vec<Clause> {
        self.reasons
            .iter()
            .filter(|r| !r.pass && !matches!(r.name, Clause::CenterLeft | Clause::CenterRight))
            .map(|r| r.name)
            .collect()
    }
}

fn scale(d: &DerivedQuantities, degree: i32) -> f64 {
    d.magnitude.max(1.0).powi(degree)
}

fn half_map_clause(a: f64, trace: f64, det: f64, forward: bool) -> (f64, bool) {
    let disc = 4.0 * det - trace * trace;
    let a = if forward { a } else { -a };
    if a > 0.0 {
        (a, true)
    } else {
        (disc, disc > 0.0)
    }
}

/// Hypothesis (H): crossing direction and existence of both half-maps.
pub fn check_h(d: &DerivedQuantities) -> (bool, Vec<ClauseRecord>) {
    let product = d.a12_product();
    let (lv, lp) = half_map_clause(d.a_left, d.t_left, d.d_left, true);
    let (rv, rp) = half_map_clause(d.a_right, d.t_right, d.d_right, false);
    let records = vec![
        ClauseRecord { name: Clause::CrossingDirection, value: product, pass: product > 0.0 },
        ClauseRecord { name: Clause::LeftHalfMap, value: lv, pass: lp },
        ClauseRecord { name: Clause::RightHalfMap, value: rv, pass: rp },
    ];
    (records.iter().all(|r| r.pass), records)
}

fn center_records(d: &DerivedQuantities, tol: f64) -> [ClauseRecord; 2] {
    let t_tol = tol * scale(d, 1);
    [
        ClauseRecord {
            name: Clause::CenterLeft,
            value: d.t_left,
            pass: d.t_left.abs() <= t_tol && d.d_left > 0.0 && d.a_left < 0.0,
        },
        ClauseRecord {
            name: Clause::CenterRight,
            value: d.t_right,
            pass: d.t_right.abs() <= t_tol && d.d_right > 0.0 && d.a_right > 0.0,
        },
    ]
}

/// Linear center verdict from conditions (A) or (B); the left one wins when
/// both hold.
pub fn trivial_centers(d: &DerivedQuantities) -> Option<Verdict> {
    trivial_centers_with(d, DEFAULT_TOL)
}

pub fn trivial_centers_with(d: &DerivedQuantities, tol: f64) -> Option<Verdict> {
    let [l, r] = center_records(d, tol);
    if l.pass {
        Some(Verdict::LinearCenterLeft)
    } else if r.pass {
        Some(Verdict::LinearCenterRight)
    } else {
        None
    }
}

/// Sliding part of the separation line, present when `β != 0`.
pub fn sliding_set(p: &SystemParams, tol: f64) -> Result<Option<SlidingInterval>> {
    let d = p.derive_invariants();
    let product = d.a12_product();
    if product <= 0.0 {
        return Err(Error::Precondition(format!("a12_L · a12_R = {product} is not positive")));
    }
    if d.beta.abs() <= tol * scale(&d, 2) {
        return Ok(None);
    }
    // `+ 0.0` turns a negative zero into zero
    let yl = -p.b_left()[0] / d.a12_left + 0.0;
    let yr = -p.b_right()[0] / d.a12_right + 0.0;
    Ok(Some(SlidingInterval { lower: yl.min(yr), upper: yl.max(yr) }))
}

/// Full classification of `p`; `tol` is relative to the coefficient scale.
pub fn classify(p: &SystemParams, tol: f64) -> Classification {
    let d = p.derive_invariants();
    let (_, mut reasons) = check_h(&d);

    let t_tol = tol * scale(&d, 1);
    let sl = Sign::with_tol(d.t_left, t_tol);
    let sr = Sign::with_tol(d.t_right, t_tol);
    reasons.push(ClauseRecord { name: Clause::TraceSign, value: d.t_left * d.t_right, pass: sr == -sl });
    for (name, value, degree) in [(Clause::Xi0, d.xi0, 3), (Clause::XiInf, d.xi_inf, 4), (Clause::Beta, d.beta, 2)] {
        reasons.push(ClauseRecord { name, value, pass: value.abs() <= tol * scale(&d, degree) });
    }
    let centers = center_records(&d, tol);
    reasons.extend(centers);

    let sliding = sliding_set(p, tol).ok().flatten();

    let verdict = if centers[0].pass {
        Verdict::LinearCenterLeft
    } else if centers[1].pass {
        Verdict::LinearCenterRight
    } else if reasons.iter().take(7).all(|r| r.pass) {
        Verdict::CrossingPeriodAnnulus
    } else {
        Verdict::NoPeriodAnnulus
    };
    Classification { verdict, reasons, sliding }
}
