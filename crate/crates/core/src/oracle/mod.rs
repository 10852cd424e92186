//! Exact-flow ground truth for the canonical piecewise linear system.
//!
//! Each zone is linear, so the solution is available in closed form and a
//! crossing of `x = 0` is a root of an explicit scalar function `x(t)`. The
//! critical points of `x(t)` are also explicit (half a rotation apart for a
//! focus, at most one otherwise), which splits the time axis into monotone
//! pieces; each piece holds at most one root and is refined by a
//! safeguarded Newton iteration. No numerical integrator is involved.
//!
//! Sliding along the separation line is not integrated: reaching the
//! sliding interval aborts with [`Error::SlidingEncountered`].

mod flow;

pub use flow::SpectralCase;

use crate::halfmap::{HalfSystem, Orientation};
use crate::numeric::newton_bracketed;
use crate::params::CanonicalSystem;
use crate::{Error, Result};
use flow::Affine;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TimeDirection {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ZoneSide {
    Left,
    Right,
}

impl ZoneSide {
    fn sign(self) -> f64 {
        match self {
            ZoneSide::Left => -1.0,
            ZoneSide::Right => 1.0,
        }
    }
}

/// One zone of the canonical form: `ẋ = T x - y + b`, `ẏ = D x - a`
/// (`b = 0` on the left).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZoneFlow {
    pub trace: f64,
    pub det: f64,
    pub a: f64,
    pub b: f64,
    pub side: ZoneSide,
    pub case: SpectralCase,
}

/// First return to the separation line.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingEvent {
    /// Flight time, positive in the chosen time direction.
    pub t: f64,
    pub y: f64,
    pub transversal: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PeriodicCheck {
    /// The composed left and right passages return to `(0, y0)`.
    pub closed: bool,
    /// Backward right passage minus forward left passage from `(0, y0)`;
    /// the oracle counterpart of the displacement function.
    pub gap: f64,
    /// Ordinate reached after the full left-then-right circuit.
    pub return_ordinate: f64,
    pub period: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub x: f64,
    pub y: f64,
    pub zone: ZoneSide,
}

/// Closure tolerance of [`verify_periodic`], relative to `max(1, |y0|)`.
pub const CLOSURE_TOL: f64 = 1e-8;

impl ZoneFlow {
    pub fn left(a: f64, trace: f64, det: f64) -> Self {
        Self::build(a, trace, det, 0.0, ZoneSide::Left)
    }

    pub fn right(a: f64, trace: f64, det: f64, b: f64) -> Self {
        Self::build(a, trace, det, b, ZoneSide::Right)
    }

    fn build(a: f64, trace: f64, det: f64, b: f64, side: ZoneSide) -> Self {
        let mut z = Self { trace, det, a, b, side, case: SpectralCase::RealDouble };
        z.case = z.affine(TimeDirection::Forward).spectral_case();
        z
    }

    fn affine(&self, direction: TimeDirection) -> Affine {
        let s = match direction {
            TimeDirection::Forward => 1.0,
            TimeDirection::Backward => -1.0,
        };
        Affine::new([[s * self.trace, -s], [s * self.det, 0.0]], [s * self.b, -s * self.a])
    }

    pub fn vector_field(&self, x: f64, y: f64) -> (f64, f64) {
        let v = self.affine(TimeDirection::Forward).field([x, y]);
        (v[0], v[1])
    }

    /// State at time `t` (any sign) starting from `(x0, y0)`.
    pub fn flow(&self, x0: f64, y0: f64, t: f64) -> (f64, f64) {
        let z = self.affine(TimeDirection::Forward).state([x0, y0], t);
        (z[0], z[1])
    }

    /// Exact time derivative of [`flow`](Self::flow) with respect to `t`.
    pub fn flow_velocity(&self, x0: f64, y0: f64, t: f64) -> (f64, f64) {
        let v = self.affine(TimeDirection::Forward).velocity([x0, y0], t);
        (v[0], v[1])
    }

    /// First return of the orbit through `(0, y0)` to `x = 0`, following
    /// time in `direction`. The start point must move into this zone.
    pub fn next_crossing(&self, y0: f64, direction: TimeDirection) -> Result<CrossingEvent> {
        first_return(&self.affine(direction), y0, self.side.sign())
    }
}

fn first_return(f: &Affine, y0: f64, side: f64) -> Result<CrossingEvent> {
    let z0 = [0.0, y0];
    let v0 = f.field(z0);
    if v0 == [0.0, 0.0] {
        return Err(Error::NoReturn);
    }
    let tau = f.time_scale();
    let t_min = 1e-10 * tau;
    let scale = y0.abs().max(1.0);
    let x_at = |t: f64| f.state(z0, t)[0];
    let dx_at = |t: f64| f.velocity(z0, t)[0];

    let horizon = match f.omega() {
        // any return happens within one revolution; scan two
        Some(w) => 2.0 * (2.0 * std::f64::consts::TAU / w),
        None => f64::INFINITY,
    };
    let crits = f.x_critical_times(z0, t_min, horizon);

    let first_end = crits.first().copied().unwrap_or(if horizon.is_finite() { horizon } else { tau });
    let entry = x_at(first_end);
    if entry * side <= 0.0 {
        return Err(Error::Precondition(format!(
            "orbit through (0, {y0}) does not enter the {} zone",
            if side < 0.0 { "left" } else { "right" }
        )));
    }

    let refine = |lo: f64, hi: f64| -> Result<CrossingEvent> {
        let root = newton_bracketed(|t| (x_at(t), dx_at(t)), lo, hi, None, 200).ok_or(Error::NoReturn)?;
        let z = f.state(z0, root.x);
        let dx = dx_at(root.x);
        Ok(CrossingEvent { t: root.x, y: z[1], transversal: dx.abs() > 1e-12 * scale })
    };

    // monotone pieces between consecutive critical points
    let mut t_prev = first_end;
    for &t in crits.iter().skip(1) {
        let x = x_at(t);
        if x.abs() <= 1e-13 * scale {
            return Err(Error::Tangency { t, y: f.state(z0, t)[1] });
        }
        if x * side < 0.0 {
            return refine(t_prev, t);
        }
        t_prev = t;
    }

    if horizon.is_finite() {
        let x = x_at(horizon);
        if x * side < 0.0 {
            return refine(t_prev, horizon);
        }
        return Err(Error::NoReturn);
    }

    // unbounded monotone tail
    let mut step = tau.max(t_prev);
    while step < 1e12 * tau {
        let t = t_prev + step;
        let x = x_at(t);
        if !x.is_finite() {
            break;
        }
        if x * side < 0.0 {
            return refine(t_prev, t);
        }
        step *= 2.0;
    }
    Err(Error::NoReturn)
}

/// Half-map computed by following the flow: forward in time through the
/// left zone for `Forward`, backward in time through the right zone (with
/// `b = 0`) for `Backward`.
pub fn oracle_halfmap(h: &HalfSystem, y0: f64) -> Result<f64> {
    let (zone, direction) = match h.orientation {
        Orientation::Forward => (ZoneFlow::left(h.a, h.trace, h.det), TimeDirection::Forward),
        Orientation::Backward => (ZoneFlow::right(h.a, h.trace, h.det, 0.0), TimeDirection::Backward),
    };
    match zone.next_crossing(y0, direction) {
        Ok(ev) => Ok(ev.y),
        // tangential start that never leaves the line, or grazes it again
        Err(Error::Precondition(_)) | Err(Error::NoReturn) if y0 == 0.0 => Ok(0.0),
        Err(Error::Tangency { y, .. }) if y0 == 0.0 => Ok(y),
        Err(e) => Err(e),
    }
}

fn zones(canon: &CanonicalSystem) -> (ZoneFlow, ZoneFlow) {
    let (l, r) = (&canon.left, &canon.right);
    (ZoneFlow::left(l.a, l.trace, l.det), ZoneFlow::right(r.a, r.trace, r.det, canon.b))
}

fn check_sliding(y: f64, b: f64) -> Result<()> {
    let (lo, hi) = if b < 0.0 { (b, 0.0) } else { (0.0, b) };
    if y > lo && y < hi {
        Err(Error::SlidingEncountered { y })
    } else {
        Ok(())
    }
}

/// Follows the crossing orbit through `(0, y0)` once around: left zone
/// forward, then right zone forward.
pub fn verify_periodic(canon: &CanonicalSystem, y0: f64) -> Result<PeriodicCheck> {
    if y0 < canon.b.max(0.0) {
        return Err(Error::Precondition(format!("y0 = {y0} must be at least max(0, b) = {}", canon.b.max(0.0))));
    }
    check_sliding(y0, canon.b)?;
    let (left, right) = zones(canon);
    let down = left.next_crossing(y0, TimeDirection::Forward)?;
    check_sliding(down.y, canon.b)?;
    let up = right.next_crossing(down.y, TimeDirection::Forward)?;
    check_sliding(up.y, canon.b)?;
    let back = right.next_crossing(y0, TimeDirection::Backward)?;
    Ok(PeriodicCheck {
        closed: (up.y - y0).abs() <= CLOSURE_TOL * y0.abs().max(1.0),
        gap: back.y - down.y,
        return_ordinate: up.y,
        period: down.t + up.t,
    })
}

/// Samples one circuit of the orbit through `(0, y0)`, `per_zone` points
/// per passage (both endpoints included).
pub fn sample_orbit(canon: &CanonicalSystem, y0: f64, per_zone: usize) -> Result<Vec<TrajectorySample>> {
    let per_zone = per_zone.max(2);
    let (left, right) = zones(canon);
    let down = left.next_crossing(y0, TimeDirection::Forward)?;
    check_sliding(down.y, canon.b)?;
    let up = right.next_crossing(down.y, TimeDirection::Forward)?;

    let mut out = Vec::with_capacity(2 * per_zone);
    for i in 0..per_zone {
        let t = down.t * i as f64 / (per_zone - 1) as f64;
        let (x, y) = left.flow(0.0, y0, t);
        out.push(TrajectorySample { t, x: x.min(0.0), y, zone: ZoneSide::Left });
    }
    for i in 0..per_zone {
        let t = up.t * i as f64 / (per_zone - 1) as f64;
        let (x, y) = right.flow(0.0, down.y, t);
        out.push(TrajectorySample { t: down.t + t, x: x.max(0.0), y, zone: ZoneSide::Right });
    }
    Ok(out)
}
