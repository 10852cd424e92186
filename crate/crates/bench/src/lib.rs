//! Fixed systems shared by the benchmarks in `benches/`.

use pwl_annulus::{CanonicalSystem, HalfSystem, SystemParams};

/// Focus-focus system with a period annulus above `lambda ~ 12.19`.
pub fn annulus() -> CanonicalSystem {
    CanonicalSystem::new((-2.0, -2.0, 4.0), (1.0, 1.0, 1.0), 0.0)
}

/// System with one crossing limit cycle near `y0 ~ 2.097`.
pub fn limit_cycle() -> CanonicalSystem {
    CanonicalSystem {
        left: HalfSystem::forward(-1.0, 0.2, 1.0),
        right: HalfSystem::backward(-1.0, -0.5, 1.0),
        b: 0.0,
    }
}

/// Raw coefficients with a sliding segment; not in canonical form.
pub fn raw_with_sliding() -> SystemParams {
    SystemParams::new([[0.0, 1.0], [-1.0, 0.0]], [0.0, 0.0], [[1.0, 2.0], [-1.0, -1.0]], [1.0, 0.0])
        .expect("finite coefficients")
}
