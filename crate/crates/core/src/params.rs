//! Raw system coefficients, derived invariants and the Liénard reduction.
//!
//! The system is `ẋ = A_L x + b_L` for `x <= 0` and `ẋ = A_R x + b_R` for
//! `x >= 0`. Everything downstream depends only on the traces, determinants,
//! the two values `a_L`, `a_R`, and the canonical offset `b`.

use crate::halfmap::HalfSystem;
use crate::{Error, Result};
use serde::{Deserialize, Serialize};

pub type Matrix2 = [[f64; 2]; 2];
pub type Vector2 = [f64; 2];

/// The twelve real coefficients of the two affine vector fields.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    a_left: Matrix2,
    a_right: Matrix2,
    b_left: Vector2,
    b_right: Vector2,
}

impl SystemParams {
    /// Rejects NaN and infinite entries.
    pub fn new(a_left: Matrix2, b_left: Vector2, a_right: Matrix2, b_right: Vector2) -> Result<Self> {
        let all = a_left
            .iter()
            .chain(a_right.iter())
            .flatten()
            .chain(b_left.iter())
            .chain(b_right.iter());
        for v in all {
            if !v.is_finite() {
                return Err(Error::InvalidParams(format!("non-finite coefficient {v}")));
            }
        }
        Ok(Self { a_left, a_right, b_left, b_right })
    }

    /// Lifts canonical parameters back to coefficients using the Liénard
    /// matrices `[[T, -1], [D, 0]]` and offsets `(0, -a_L)`, `(b, -a_R)`.
    ///
    /// [`derive_invariants`](Self::derive_invariants) on the result recovers
    /// the same `(a, T, D)` triples and `b`.
    pub fn from_canonical(left: (f64, f64, f64), right: (f64, f64, f64), b: f64) -> Result<Self> {
        let (al, tl, dl) = left;
        let (ar, tr, dr) = right;
        Self::new([[tl, -1.0], [dl, 0.0]], [0.0, -al], [[tr, -1.0], [dr, 0.0]], [b, -ar])
    }

    pub fn a_left(&self) -> &Matrix2 {
        &self.a_left
    }

    pub fn a_right(&self) -> &Matrix2 {
        &self.a_right
    }

    pub fn b_left(&self) -> &Vector2 {
        &self.b_left
    }

    pub fn b_right(&self) -> &Vector2 {
        &self.b_right
    }

    /// Largest absolute coefficient.
    pub fn magnitude(&self) -> f64 {
        self.a_left
            .iter()
            .chain(self.a_right.iter())
            .flatten()
            .chain(self.b_left.iter())
            .chain(self.b_right.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    /// Exchanges the roles of the two zones.
    pub fn swapped(&self) -> Self {
        Self {
            a_left: self.a_right,
            a_right: self.a_left,
            b_left: self.b_right,
            b_right: self.b_left,
        }
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        let m = |a: &Matrix2| [[a[0][0] * s, a[0][1] * s], [a[1][0] * s, a[1][1] * s]];
        let v = |b: &Vector2| [b[0] * s, b[1] * s];
        Self::new(m(&self.a_left), v(&self.b_left), m(&self.a_right), v(&self.b_right))
    }

    pub fn derive_invariants(&self) -> DerivedQuantities {
        let (l, r) = (&self.a_left, &self.a_right);
        let (bl, br) = (&self.b_left, &self.b_right);

        let t_left = l[0][0] + l[1][1];
        let t_right = r[0][0] + r[1][1];
        let d_left = l[0][0] * l[1][1] - l[0][1] * l[1][0];
        let d_right = r[0][0] * r[1][1] - r[0][1] * r[1][0];
        let a_left = l[0][1] * bl[1] - l[1][1] * bl[0];
        let a_right = r[0][1] * br[1] - r[1][1] * br[0];

        let beta = l[0][1] * br[0] - bl[0] * r[0][1];
        DerivedQuantities {
            t_left,
            t_right,
            d_left,
            d_right,
            a_left,
            a_right,
            xi0: a_right * t_left - a_left * t_right,
            xi_inf: t_left * t_left * d_right - t_right * t_right * d_left,
            beta,
            b: (r[0][1] != 0.0).then(|| beta / r[0][1] + 0.0),
            a12_left: l[0][1],
            a12_right: r[0][1],
            magnitude: self.magnitude(),
        }
    }

    /// Parameters of the Liénard canonical form.
    ///
    /// Only defined when `a12_L · a12_R > 0`; otherwise crossing dynamics
    /// through the separation line is impossible.
    pub fn to_canonical(&self) -> Result<CanonicalSystem> {
        self.derive_invariants().to_canonical()
    }
}

/// Scalar invariants of a [`SystemParams`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivedQuantities {
    pub t_left: f64,
    pub t_right: f64,
    pub d_left: f64,
    pub d_right: f64,
    pub a_left: f64,
    pub a_right: f64,
    pub xi0: f64,
    pub xi_inf: f64,
    pub beta: f64,
    /// `beta / a12_R`; absent when `a12_R = 0`.
    pub b: Option<f64>,
    pub a12_left: f64,
    pub a12_right: f64,
    /// Largest absolute raw coefficient, used to scale tolerances.
    pub magnitude: f64,
}

impl DerivedQuantities {
    pub fn a12_product(&self) -> f64 {
        self.a12_left * self.a12_right
    }

    pub fn to_canonical(&self) -> Result<CanonicalSystem> {
        let product = self.a12_product();
        match self.b {
            Some(b) if product > 0.0 => Ok(CanonicalSystem {
                left: HalfSystem::forward(self.a_left, self.t_left, self.d_left),
                right: HalfSystem::backward(self.a_right, self.t_right, self.d_right),
                b,
            }),
            _ => Err(Error::Canonicalization { product }),
        }
    }
}

/// System in Liénard canonical form: the left zone drives the forward
/// half-map, the right zone (with `b = 0`) the backward one.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CanonicalSystem {
    pub left: HalfSystem,
    pub right: HalfSystem,
    pub b: f64,
}

impl CanonicalSystem {
    /// Builds the canonical system from `(a, T, D)` triples.
    pub fn new(left: (f64, f64, f64), right: (f64, f64, f64), b: f64) -> Self {
        Self {
            left: HalfSystem::forward(left.0, left.1, left.2),
            right: HalfSystem::backward(right.0, right.1, right.2),
            b,
        }
    }

    pub fn to_params(&self) -> Result<SystemParams> {
        SystemParams::from_canonical(
            (self.left.a, self.left.trace, self.left.det),
            (self.right.a, self.right.trace, self.right.det),
            self.b,
        )
    }

    /// Liénard matrices `[[T, -1], [D, 0]]` of the two zones.
    pub fn matrices(&self) -> (Matrix2, Matrix2) {
        let m = |h: &HalfSystem| [[h.trace, -1.0], [h.det, 0.0]];
        (m(&self.left), m(&self.right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Orientation;

    fn example() -> SystemParams {
        SystemParams::new([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0], [[1.0, 2.0], [-1.0, -1.0]], [1.0, 0.0]).unwrap()
    }

    #[test]
    fn derive_example_values() {
        let d = example().derive_invariants();
        assert_eq!((d.t_left, d.d_left, d.a_left), (0.0, 1.0, 0.0));
        assert_eq!((d.t_right, d.d_right, d.a_right), (0.0, 1.0, 1.0));
        assert_eq!((d.beta, d.xi0, d.xi_inf), (1.0, 0.0, 0.0));
        assert_eq!(d.b, Some(0.5));
    }

    #[test]
    fn identical_zones_cancel() {
        let m = [[1.3, -0.7], [2.1, 0.4]];
        let v = [0.3, -1.9];
        let d = SystemParams::new(m, v, m, v).unwrap().derive_invariants();
        assert_eq!((d.xi0, d.xi_inf, d.beta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn a_values_by_substitution() {
        let p = SystemParams::new([[1.0, 1.0], [0.0, 1.0]], [0.0, 2.0], [[-1.0, 3.0], [0.0, 1.0]], [0.0, 1.0]).unwrap();
        let d = p.derive_invariants();
        assert_eq!((d.a_left, d.a_right, d.xi0), (2.0, 3.0, 6.0));
    }

    #[test]
    fn b_absent_without_a12_right() {
        let p = SystemParams::new([[0.0, 1.0], [-1.0, 0.0]], [1.0, 0.0], [[1.0, 0.0], [-1.0, -1.0]], [1.0, 0.0]).unwrap();
        assert_eq!(p.derive_invariants().b, None);
        assert!(matches!(p.to_canonical(), Err(Error::Canonicalization { .. })));
    }

    #[test]
    fn rejects_non_finite() {
        let r = SystemParams::new([[f64::NAN, 1.0], [0.0, 0.0]], [0.0; 2], [[0.0; 2]; 2], [0.0; 2]);
        assert!(matches!(r, Err(Error::InvalidParams(_))));
        let r = SystemParams::new([[0.0; 2]; 2], [0.0, f64::INFINITY], [[0.0; 2]; 2], [0.0; 2]);
        assert!(r.is_err());
    }

    #[test]
    fn canonical_example() {
        let c = example().to_canonical().unwrap();
        assert_eq!((c.left.a, c.left.trace, c.left.det), (0.0, 0.0, 1.0));
        assert_eq!((c.right.a, c.right.trace, c.right.det), (1.0, 0.0, 1.0));
        assert_eq!(c.b, 0.5);
        assert_eq!(c.left.orientation, Orientation::Forward);
        assert_eq!(c.right.orientation, Orientation::Backward);
    }

    #[test]
    fn canonical_form_round_trips() {
        let c = CanonicalSystem::new((-2.0, -2.0, 4.0), (1.0, 1.0, 1.0), 0.75);
        let back = c.to_params().unwrap().to_canonical().unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn opposite_a12_signs_refused() {
        let p = SystemParams::new([[0.0, 1.0], [-1.0, 0.0]], [0.0; 2], [[0.0, -1.0], [1.0, 0.0]], [0.0; 2]).unwrap();
        assert_eq!(p.to_canonical(), Err(Error::Canonicalization { product: -1.0 }));
    }

    #[test]
    fn canonical_matrices_keep_trace_and_determinant() {
        let p = SystemParams::new([[0.3, 2.0], [-1.5, 0.9]], [0.2, -0.4], [[-1.1, 0.5], [2.0, 0.7]], [0.6, 1.0]).unwrap();
        let d = p.derive_invariants();
        let (ml, mr) = p.to_canonical().unwrap().matrices();
        let tr = |m: &Matrix2| m[0][0] + m[1][1];
        let det = |m: &Matrix2| m[0][0] * m[1][1] - m[0][1] * m[1][0];
        assert_eq!((tr(&ml), det(&ml)), (d.t_left, d.d_left));
        assert_eq!((tr(&mr), det(&mr)), (d.t_right, d.d_right));
    }
}
