//! Crossing period annuli of planar piecewise linear differential systems
//! with two zones separated by the line `x = 0`.
//!
//! The crate is organised bottom-up:
//!
//! * [`params`] holds the twelve raw coefficients of the system, the derived
//!   scalar invariants and the reduction to Liénard canonical form.
//! * [`halfmap`] computes the forward and backward Poincaré half-maps from
//!   their integral characterization (closed-form antiderivatives plus a
//!   safeguarded Newton solve), together with their domains, derivatives and
//!   local expansions.
//! * [`displacement`] combines both half-maps into the displacement function
//!   and the sign formulas for its derivatives at zeros.
//! * [`classifier`] decides existence of a crossing period annulus from the
//!   parameters alone.
//! * [`oracle`] integrates the exact piecewise linear flow with event
//!   detection; it is an independent check on everything above.

pub mod classifier;
pub mod displacement;
pub mod halfmap;
pub mod numeric;
pub mod oracle;
pub mod params;

mod error;
mod sign;

pub use classifier::{classify, Classification, Clause, ClauseRecord, SlidingInterval, Verdict};
pub use displacement::{CrossingOrbit, DisplacementContext, OrbitKind, ScanConfig};
pub use error::{Error, Result};
pub use halfmap::{HalfMapDomain, HalfSystem, Orientation, UpperBound, WPolynomial};
pub use oracle::{CrossingEvent, PeriodicCheck, SpectralCase, TimeDirection, TrajectorySample, ZoneFlow};
pub use params::{CanonicalSystem, DerivedQuantities, SystemParams};
pub use sign::Sign;
