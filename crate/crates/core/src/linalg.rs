//! Fixed-size 2×2 algebra used by the canonical-system solvers.

use num_complex::Complex64;
use std::ops::Mul;

pub type C64 = Complex64;

/// A complex column vector `(u1, u2)`.
pub type Vec2 = [C64; 2];

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

/// `a^t J b` with `J = [[0, -1], [1, 0]]`.
#[inline]
pub fn symplectic_form(a: &Vec2, b: &Vec2) -> C64 {
    a[1] * b[0] - a[0] * b[1]
}

/// Real symmetric 2×2 matrix `[[h1, h3], [h3, h2]]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sym2 {
    pub h1: f64,
    pub h2: f64,
    pub h3: f64,
}

impl Sym2 {
    pub const fn new(h1: f64, h2: f64, h3: f64) -> Self {
        Self { h1, h2, h3 }
    }

    pub const fn diag(h1: f64, h2: f64) -> Self {
        Self { h1, h2, h3: 0.0 }
    }

    pub fn trace(&self) -> f64 {
        self.h1 + self.h2
    }

    pub fn det(&self) -> f64 {
        self.h1 * self.h2 - self.h3 * self.h3
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let half_gap = (0.25 * (self.h1 - self.h2).powi(2) + self.h3 * self.h3).sqrt();
        0.5 * self.trace() - half_gap
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self::new(self.h1 * s, self.h2 * s, self.h3 * s)
    }

    /// `a^t H b` (bilinear, no conjugation).
    #[inline]
    pub fn bilinear(&self, a: &Vec2, b: &Vec2) -> C64 {
        a[0] * (b[0] * self.h1 + b[1] * self.h3) + a[1] * (b[0] * self.h3 + b[1] * self.h2)
    }

    /// `J H`, the generator of the flow `u' = z J H u`.
    pub fn j_times(&self) -> Mat2 {
        Mat2::real(-self.h3, -self.h2, self.h1, self.h3)
    }

    /// Angle `phi` in `[0, pi)` such that a rank-one `H` is a multiple of `xi_phi xi_phi^t`.
    pub fn rank_one_angle(&self) -> f64 {
        let phi = 0.5 * (2.0 * self.h3).atan2(self.h1 - self.h2);
        phi.rem_euclid(std::f64::consts::PI)
    }
}

/// Complex 2×2 matrix, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2 {
    pub a: C64,
    pub b: C64,
    pub c: C64,
    pub d: C64,
}

impl Mat2 {
    pub const IDENTITY: Mat2 = Mat2 { a: ONE, b: ZERO, c: ZERO, d: ONE };

    pub const fn new(a: C64, b: C64, c: C64, d: C64) -> Self {
        Self { a, b, c, d }
    }

    pub fn real(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::new(C64::from(a), C64::from(b), C64::from(c), C64::from(d))
    }

    pub fn scale(&self, s: C64) -> Self {
        Self::new(self.a * s, self.b * s, self.c * s, self.d * s)
    }

    pub fn add(&self, o: &Mat2) -> Self {
        Self::new(self.a + o.a, self.b + o.b, self.c + o.c, self.d + o.d)
    }

    pub fn sub(&self, o: &Mat2) -> Self {
        Self::new(self.a - o.a, self.b - o.b, self.c - o.c, self.d - o.d)
    }

    pub fn det(&self) -> C64 {
        self.a * self.d - self.b * self.c
    }

    pub fn apply(&self, v: &Vec2) -> Vec2 {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    pub fn max_abs(&self) -> f64 {
        self.a.norm().max(self.b.norm()).max(self.c.norm()).max(self.d.norm())
    }

    /// `exp(M)` for a traceless `M`, using `M^2 = -det(M) I`.
    pub fn exp_traceless(&self) -> Mat2 {
        let s2 = -self.det();
        let (ch, sh_over_s) = if s2.norm() < 1e-6 {
            (
                ONE + s2 / 2.0 + s2 * s2 / 24.0,
                ONE + s2 / 6.0 + s2 * s2 / 120.0,
            )
        } else {
            let s = s2.sqrt();
            (s.cosh(), s.sinh() / s)
        };
        Mat2::IDENTITY.scale(ch).add(&self.scale(sh_over_s))
    }
}

impl Mul for Mat2 {
    type Output = Mat2;

    fn mul(self, o: Mat2) -> Mat2 {
        Mat2::new(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Transfer matrix of a constant block `H` over a length `s`:
/// `exp(z s J H) = cos(z s k) I + s sinc(z s k) z J H` with `k = sqrt(det H)`.
pub fn constant_transfer(h: &Sym2, z: C64, s: f64) -> Mat2 {
    let k = h.det().max(0.0).sqrt();
    let phase = z * (s * k);
    let (cos, sinc) = if phase.norm() < 1e-4 {
        let p2 = phase * phase;
        (ONE - p2 / 2.0 + p2 * p2 / 24.0, ONE - p2 / 6.0 + p2 * p2 / 120.0)
    } else {
        (phase.cos(), phase.sin() / phase)
    };
    Mat2::IDENTITY.scale(cos).add(&h.j_times().scale(z * s * sinc))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_transfer_is_unimodular() {
        let h = Sym2::new(0.7, 0.4, 0.2);
        let t = constant_transfer(&h, C64::new(3.1, -0.7), 1.3);
        assert!((t.det() - ONE).norm() < 1e-12);
    }

    #[test]
    fn constant_transfer_matches_exp() {
        let h = Sym2::new(0.7, 0.4, 0.2);
        let z = C64::new(1.5, 0.3);
        let t = constant_transfer(&h, z, 0.8);
        let e = h.j_times().scale(z * 0.8).exp_traceless();
        assert!(t.sub(&e).max_abs() < 1e-13);
    }

    #[test]
    fn rank_one_angles() {
        assert!(Sym2::diag(1.0, 0.0).rank_one_angle().abs() < 1e-15);
        let a = Sym2::diag(0.0, 1.0).rank_one_angle();
        assert!((a - std::f64::consts::FRAC_PI_2).abs() < 1e-15);
        let phi: f64 = 2.5;
        let (s, c) = phi.sin_cos();
        let h = Sym2::new(c * c, s * s, c * s);
        assert!((h.rank_one_angle() - phi).abs() < 1e-12);
    }
}
