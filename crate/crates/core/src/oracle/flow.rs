//! Closed-form flow of one affine zone `ż = M z + c`.
//!
//! The propagator uses the Cayley–Hamilton form
//! `e^{Mt} = e^{λt} [C(t) I + S(t) (M - λI)]` with `λ = tr M / 2`, where
//! `(C, S)` is `(cos ωt, sin ωt / ω)`, `(cosh νt, sinh νt / ν)` or `(1, t)`
//! according to the sign of `tr²/4 - det`. Non-singular zones are solved
//! around their equilibrium; singular ones (`det = 0`) through the drift
//! integral `∫_0^t e^{Ms} ds = t I + t² R(tr·t) M`.

use crate::numeric::{exp_second_remainder, sinc, sinhc};
use serde::{Deserialize, Serialize};

pub(crate) type Mat = [[f64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpectralCase {
    ComplexPair,
    RealDistinct,
    RealDouble,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Affine {
    pub m: Mat,
    pub c: [f64; 2],
    half_trace: f64,
    /// `tr²/4 - det`
    disc: f64,
    det: f64,
    trace: f64,
}

impl Affine {
    pub fn new(m: Mat, c: [f64; 2]) -> Self {
        let trace = m[0][0] + m[1][1];
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        let half_trace = 0.5 * trace;
        Self { m, c, half_trace, disc: half_trace * half_trace - det, det, trace }
    }

    pub fn spectral_case(&self) -> SpectralCase {
        if self.disc < 0.0 {
            SpectralCase::ComplexPair
        } else if self.disc > 0.0 {
            SpectralCase::RealDistinct
        } else {
            SpectralCase::RealDouble
        }
    }

    /// Imaginary part ω of the eigenvalues, complex case only.
    pub fn omega(&self) -> Option<f64> {
        (self.disc < 0.0).then(|| (-self.disc).sqrt())
    }

    /// Reciprocal of the fastest eigenvalue modulus, or 1 for a nilpotent matrix.
    pub fn time_scale(&self) -> f64 {
        let rate = self.half_trace.abs() + self.disc.abs().sqrt();
        if rate > 0.0 {
            1.0 / rate
        } else {
            1.0
        }
    }

    pub fn apply(&self, z: [f64; 2]) -> [f64; 2] {
        [self.m[0][0] * z[0] + self.m[0][1] * z[1], self.m[1][0] * z[0] + self.m[1][1] * z[1]]
    }

    pub fn field(&self, z: [f64; 2]) -> [f64; 2] {
        let mz = self.apply(z);
        [mz[0] + self.c[0], mz[1] + self.c[1]]
    }

    /// `(e^{λt}, C(t), S(t))`.
    fn scalar_parts(&self, t: f64) -> (f64, f64, f64) {
        let growth = (self.half_trace * t).exp();
        if self.disc < 0.0 {
            let w = (-self.disc).sqrt();
            (growth, (w * t).cos(), t * sinc(w * t))
        } else if self.disc > 0.0 {
            let n = self.disc.sqrt();
            (growth, (n * t).cosh(), t * sinhc(n * t))
        } else {
            (growth, 1.0, t)
        }
    }

    pub fn propagator(&self, t: f64) -> Mat {
        let (g, c, s) = self.scalar_parts(t);
        let l = self.half_trace;
        let m = &self.m;
        [
            [g * (c + s * (m[0][0] - l)), g * s * m[0][1]],
            [g * s * m[1][0], g * (c + s * (m[1][1] - l))],
        ]
    }

    fn mul(p: &Mat, z: [f64; 2]) -> [f64; 2] {
        [p[0][0] * z[0] + p[0][1] * z[1], p[1][0] * z[0] + p[1][1] * z[1]]
    }

    pub fn equilibrium(&self) -> Option<[f64; 2]> {
        if self.det == 0.0 {
            return None;
        }
        // z* = -M^{-1} c
        let m = &self.m;
        let inv = [[m[1][1] / self.det, -m[0][1] / self.det], [-m[1][0] / self.det, m[0][0] / self.det]];
        let z = Self::mul(&inv, self.c);
        Some([-z[0], -z[1]])
    }

    pub fn state(&self, z0: [f64; 2], t: f64) -> [f64; 2] {
        if t == 0.0 {
            return z0;
        }
        let p = self.propagator(t);
        match self.equilibrium() {
            Some(eq) => {
                let w = Self::mul(&p, [z0[0] - eq[0], z0[1] - eq[1]]);
                [eq[0] + w[0], eq[1] + w[1]]
            }
            None => {
                let e = Self::mul(&p, z0);
                let g = t * t * exp_second_remainder(self.trace * t);
                let mc = self.apply(self.c);
                [e[0] + t * self.c[0] + g * mc[0], e[1] + t * self.c[1] + g * mc[1]]
            }
        }
    }

    /// Velocity along the orbit through `z0`: `ż(t) = e^{Mt} ż(0)`.
    pub fn velocity(&self, z0: [f64; 2], t: f64) -> [f64; 2] {
        Self::mul(&self.propagator(t), self.field(z0))
    }

    /// Positive times in `(t_min, horizon]` where `ẋ` vanishes, ascending.
    ///
    /// `ẋ(t) = e^{λt} [C(t) P + S(t) Q]` with `P = v_x`, `Q = ((M - λI) v)_x`.
    pub fn x_critical_times(&self, z0: [f64; 2], t_min: f64, horizon: f64) -> Vec<f64> {
        let v = self.field(z0);
        let p = v[0];
        let q = (self.m[0][0] - self.half_trace) * v[0] + self.m[0][1] * v[1];
        let mut out = Vec::new();
        if p == 0.0 && q == 0.0 {
            return out;
        }
        if self.disc < 0.0 {
            let w = (-self.disc).sqrt();
            // P cos ωt + (Q/ω) sin ωt = ρ cos(ωt - ψ)
            let psi = (q / w).atan2(p);
            let base = psi + std::f64::consts::FRAC_PI_2;
            let mut k = ((w * t_min - base) / std::f64::consts::PI).floor() as i64;
            loop {
                let t = (base + k as f64 * std::f64::consts::PI) / w;
                if t > horizon {
                    break;
                }
                if t > t_min {
                    out.push(t);
                }
                k += 1;
            }
        } else if self.disc > 0.0 {
            let n = self.disc.sqrt();
            if q != 0.0 {
                let r = -p * n / q;
                if r.abs() < 1.0 {
                    let t = r.atanh() / n;
                    if t > t_min && t <= horizon {
                        out.push(t);
                    }
                }
            }
        } else if q != 0.0 {
            let t = -p / q;
            if t > t_min && t <= horizon {
                out.push(t);
            }
        }
        out
    }
}
