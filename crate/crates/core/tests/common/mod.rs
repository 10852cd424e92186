//! Helpers shared by the integration tests: seeded samplers, system
//! families and an adaptive quadrature rule used as an independent check.

#![allow(dead_code)]

use pwl_annulus::{CanonicalSystem, HalfSystem, SystemParams, UpperBound};
use rand::Rng;
use std::f64::consts::PI;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    r.gen_range(lo..hi)
}

pub fn log_uniform(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    uniform(r, lo.ln(), hi.ln()).exp()
}

/// Uniform magnitude in `[lo, hi)` with a random sign.
pub fn signed(r: &mut impl Rng, lo: f64, hi: f64) -> f64 {
    let v = uniform(r, lo, hi);
    if r.gen_bool(0.5) {
        v
    } else {
        -v
    }
}

// 15-point Kronrod nodes and weights with the embedded 7-point Gauss rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

fn gk15(f: &impl Fn(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for i in 0..7 {
        let dx = h * XGK[i];
        let pair = f(c - dx) + f(c + dx);
        kron += WGK[i] * pair;
        if i % 2 == 1 {
            gauss += WG[i / 2] * pair;
        }
    }
    (kron * h, ((kron - gauss) * h).abs())
}

/// Adaptive Gauss-Kronrod quadrature to absolute tolerance `tol`.
pub fn quad(f: impl Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let mut stack = vec![(a, b, tol, 0u32)];
    let mut total = 0.0;
    while let Some((lo, hi, t, depth)) = stack.pop() {
        let (v, err) = gk15(&f, lo, hi);
        if err <= t || depth > 40 {
            total += v;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((lo, mid, 0.5 * t, depth + 1));
            stack.push((mid, hi, 0.5 * t, depth + 1));
        }
    }
    total
}

/// Sample point in `[lambda + lo_frac·w, lambda + hi_frac·w]` with
/// `w = min(mu, lambda + span) - lambda`.
pub fn sample_in(r: &mut impl Rng, lambda: f64, mu: UpperBound, span: f64, lo_frac: f64, hi_frac: f64) -> f64 {
    let end = match mu {
        UpperBound::Finite(m) => m.min(lambda + span),
        UpperBound::Infinite => lambda + span,
    };
    let w = end - lambda;
    lambda + w * uniform(r, lo_frac, hi_frac)
}

/// Right zone `(a_R, T_R, D_R)` with a backward half-map and a
/// non-negligible trace.
pub fn right_zone(r: &mut impl Rng) -> (f64, f64, f64) {
    loop {
        let ar = signed(r, 0.1, 2.0);
        let tr = signed(r, 0.1, 1.5);
        let dr = if ar >= 0.0 {
            uniform(r, 0.3 * tr * tr + 0.05, 3.0) + 0.25 * tr * tr
        } else {
            signed(r, 0.1, 3.0)
        };
        if ar < 0.0 || 4.0 * dr > tr * tr {
            return (ar, tr, dr);
        }
    }
}

/// `W_L = k W_R` family: `D_L = k D_R`, `T_L = -√k T_R`, `a_L = -√k a_R`.
pub fn k_family(r: &mut impl Rng) -> (CanonicalSystem, f64) {
    let k = log_uniform(r, 1e-2, 1e2);
    let (ar, tr, dr) = right_zone(r);
    let s = k.sqrt();
    (CanonicalSystem::new((-s * ar, -s * tr, k * dr), (ar, tr, dr), 0.0), k)
}

/// Random `(a, T, D)` with an existing half-map of the given orientation.
pub fn valid_half(r: &mut impl Rng, forward: bool) -> HalfSystem {
    loop {
        let a = match r.gen_range(0..5) {
            0 => 0.0,
            1 | 2 => -uniform(r, 0.1, 2.0),
            _ => uniform(r, 0.1, 2.0),
        };
        let t = match r.gen_range(0..6) {
            0 => 0.0,
            _ => signed(r, 0.05, 1.5),
        };
        let d = match r.gen_range(0..6) {
            // double eigenvalue
            0 => 0.25 * t * t,
            1 => signed(r, 0.05, 0.5),
            _ => uniform(r, 0.2, 3.0),
        };
        let h = if forward { HalfSystem::forward(a, t, d) } else { HalfSystem::backward(a, t, d) };
        // keep the focus rotation factor e^{πT/ω} within e^3 so that values
        // stay on the scale of y0
        let disc = 4.0 * d - t * t;
        let tame = disc <= 0.0 || (PI * t / disc.sqrt()).abs() <= 3.0;
        if h.exists() && d != 0.0 && tame {
            return h;
        }
    }
}

/// Canonical system lifted to raw coefficients, with the left zone written
/// as `[[T_L, s], [-s D_L, 0]]`, `b_L = (0, s a_L)` for `s = ±1`.
pub fn lift_with_left_a12(c: &CanonicalSystem, s: f64) -> SystemParams {
    let l = &c.left;
    let r = &c.right;
    SystemParams::new(
        [[l.trace, s], [-s * l.det, 0.0]],
        [0.0, s * l.a],
        [[r.trace, -1.0], [r.det, 0.0]],
        [c.b, -r.a],
    )
    .unwrap()
}
