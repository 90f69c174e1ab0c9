//! Reproducing kernels `K_l`, the taper weight `omega`, the oversampling kernel
//! `J`, and the Paley-Wiener closed forms.
//!
//! With `u` the fundamental solution and `t = z - conj(w)`:
//!
//! * `K_l(z, w) = u(z, l)^t J u(conj w, l) / t = int_0^l u(z)^t H u(conj w)`;
//! * `J(z, w) = int_0^b u(z)^t H u(conj w) R`, `R = 1` on `[0, a]` and `omega` on `(a, b]`,
//!   which integrates by parts to `J(z, w) = (1 / (t (c - a))) int_a^c u(z)^t J u(conj w)`
//!   for the piecewise-linear taper.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{symplectic_form, Vec2, C64};
use crate::quadrature;
use crate::solver::SolutionSource;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

/// Below this `|z - conj w|` the quotient forms are replaced by integrals.
pub const TOL_COINCIDE: f64 = 1e-6;
/// Relative (to the L1 mass) tolerance of kernel quadratures.
pub const QUAD_TOL: f64 = 1e-12;
/// Largest oscillation phase per quadrature panel.
const MAX_PHASE: f64 = 2.0;
/// Phase per panel and order of the fixed rule shared by kernel matrices.
const MATRIX_PHASE: f64 = 3.0;
const MATRIX_ORDER: usize = 16;

/// Piecewise-linear taper: `1` on `[0, a]`, `(c - x)/(c - a)` on `[a, c]`, `0` on `[c, b]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TaperWeight {
    pub a: f64,
    pub c: f64,
    pub b: f64,
}

impl TaperWeight {
    pub fn new(a: f64, c: f64, b: f64) -> Result<Self> {
        let bad = |reason: &str| Error::InvalidTaper { a, c, reason: reason.to_string() };
        if !(a > 0.0) {
            return Err(bad("a must be positive"));
        }
        if !(c > a) {
            return Err(bad("c must exceed a"));
        }
        if !(c <= b) {
            return Err(bad("c must not exceed b"));
        }
        Ok(Self { a, c, b })
    }

    /// Taper with `c` at the midpoint of `[a, b]`.
    pub fn midpoint(a: f64, b: f64) -> Result<Self> {
        Self::new(a, 0.5 * (a + b), b)
    }

    /// `omega(x)` on `[a, b]`.
    pub fn value(&self, x: f64) -> f64 {
        if x <= self.a {
            1.0
        } else if x >= self.c {
            0.0
        } else {
            (self.c - x) / (self.c - self.a)
        }
    }

    /// `omega'(x)`.
    pub fn derivative(&self, x: f64) -> f64 {
        if x > self.a && x < self.c {
            -1.0 / (self.c - self.a)
        } else {
            0.0
        }
    }

    /// `R(x) = chi_[0,a] + omega chi_(a,b]`.
    pub fn r_weight(&self, x: f64) -> f64 {
        self.value(x)
    }

    /// Checks that the taper fits into `[0, b]` of `h` and avoids singular intervals.
    pub fn check_against(&self, h: &Hamiltonian) -> Result<()> {
        if (self.b - h.length()).abs() > 1e-12 * h.length().max(1.0) {
            return Err(Error::InvalidTaper { a: self.a, c: self.c, reason: format!("b = {} differs from the Hamiltonian length {}", self.b, h.length()) });
        }
        if h.singular_intervals().iter().any(|s| s.to > self.a && s.from < self.c) {
            return Err(Error::InvalidTaper { a: self.a, c: self.c, reason: "taper meets a singular interval".into() });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelForm {
    Quotient,
    Integral,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KernelEval {
    pub z: C64,
    pub w: C64,
    pub value: C64,
    pub form_used: KernelForm,
}

/// Quadrature panels on `[a, b]` split at every kink of `H`, sized so that the
/// product of solutions at parameters of total magnitude `scale` moves at most
/// `max_phase` radians per panel.
pub fn panels(h: &Hamiltonian, a: f64, b: f64, scale: f64, max_phase: f64) -> Vec<(f64, f64)> {
    let mut out = Vec::new();
    for s in h.segments() {
        let rate = scale.max(1.0) * s.rate_bound().max(1e-3);
        for w in s.breakpoints().windows(2) {
            let (lo, hi) = (w[0].max(a), w[1].min(b));
            if hi > lo {
                quadrature::panelize(lo, hi, rate, max_phase, &mut out);
            }
        }
    }
    out
}

/// `int_a^b f(x, u(z1, x), u(z2, x)) dx` by composite Gauss-Legendre with order doubling.
pub fn integrate_pair<S, F>(src: &S, z1: C64, z2: C64, a: f64, b: f64, f: F) -> Result<C64>
where
    S: SolutionSource + ?Sized,
    F: Fn(f64, &Vec2, &Vec2) -> C64,
{
    let p = panels(src.hamiltonian(), a, b, z1.norm() + z2.norm(), MAX_PHASE);
    quadrature::integrate_batched(&p, QUAD_TOL, |nodes| {
        let u = src.solve_many(z1, nodes)?;
        let v = src.solve_many(z2, nodes)?;
        Ok(nodes.iter().zip(u.iter().zip(&v)).map(|(&x, (p, q))| f(x, p, q)).collect())
    })
}

/// `int_0^l u(z)^t H u(conj w)`, the integral form of `K_l(z, w)`.
pub fn kernel_integral<S: SolutionSource + ?Sized>(src: &S, l: f64, z: C64, w: C64) -> Result<C64> {
    let h = src.hamiltonian();
    integrate_pair(src, z, w.conj(), 0.0, l, |x, u, v| h.matrix_at(x).bilinear(u, v))
}

/// `K_l(z, w)`: quotient form away from `z = conj w`, integral form near it.
pub fn reproducing_kernel<S: SolutionSource + ?Sized>(src: &S, l: f64, z: C64, w: C64) -> Result<KernelEval> {
    let t = z - w.conj();
    if t.norm() > TOL_COINCIDE {
        let u = src.solve(z, l)?;
        let v = src.solve(w.conj(), l)?;
        Ok(KernelEval { z, w, value: symplectic_form(&u, &v) / t, form_used: KernelForm::Quotient })
    } else {
        Ok(KernelEval { z, w, value: kernel_integral(src, l, z, w)?, form_used: KernelForm::Integral })
    }
}

/// `K_l(z, w)` with both forms evaluated; fails when they disagree beyond `1e-6` relative.
pub fn reproducing_kernel_checked<S: SolutionSource + ?Sized>(src: &S, l: f64, z: C64, w: C64) -> Result<KernelEval> {
    let integral = kernel_integral(src, l, z, w)?;
    let t = z - w.conj();
    if t.norm() <= TOL_COINCIDE {
        return Ok(KernelEval { z, w, value: integral, form_used: KernelForm::Integral });
    }
    let q = reproducing_kernel(src, l, z, w)?.value;
    if (q - integral).norm() > 1e-6 * integral.norm().max(q.norm()).max(f64::MIN_POSITIVE) {
        return Err(Error::CoincidenceInstability { quotient: q.norm(), integral: integral.norm() });
    }
    Ok(KernelEval { z, w, value: q, form_used: KernelForm::Quotient })
}

/// Direct form `int_0^c u(z)^t H u(conj w) R`.
pub fn oversampling_direct<S: SolutionSource + ?Sized>(src: &S, taper: &TaperWeight, z: C64, w: C64) -> Result<C64> {
    let h = src.hamiltonian();
    let inner = integrate_pair(src, z, w.conj(), 0.0, taper.a, |x, u, v| h.matrix_at(x).bilinear(u, v))?;
    let outer = integrate_pair(src, z, w.conj(), taper.a, taper.c, |x, u, v| {
        h.matrix_at(x).bilinear(u, v) * taper.value(x)
    })?;
    Ok(inner + outer)
}

/// `J(z, w)` for the taper: quotient form `int_a^c u^t J u / (t (c - a))` away from
/// `z = conj w`, direct form near it.
pub fn oversampling_kernel<S: SolutionSource + ?Sized>(src: &S, taper: &TaperWeight, z: C64, w: C64) -> Result<KernelEval> {
    let t = z - w.conj();
    if t.norm() > TOL_COINCIDE {
        let num = integrate_pair(src, z, w.conj(), taper.a, taper.c, |_, u, v| symplectic_form(u, v))?;
        Ok(KernelEval { z, w, value: num / (t * (taper.c - taper.a)), form_used: KernelForm::Quotient })
    } else {
        Ok(KernelEval { z, w, value: oversampling_direct(src, taper, z, w)?, form_used: KernelForm::Integral })
    }
}

/// `K_l(z_i, lambda_j)` for real `lambda_j`; rows follow `zs`.
pub fn reproducing_matrix<S: SolutionSource + ?Sized>(src: &S, l: f64, zs: &[C64], lambdas: &[f64]) -> Result<Vec<Vec<C64>>> {
    let ends_z = zs.par_iter().map(|&z| src.solve(z, l)).collect::<Result<Vec<_>>>()?;
    let ends_l = lambdas.par_iter().map(|&x| src.solve(C64::new(x, 0.0), l)).collect::<Result<Vec<_>>>()?;
    zs.par_iter()
        .zip(&ends_z)
        .map(|(&z, u)| {
            lambdas
                .iter()
                .zip(&ends_l)
                .map(|(&lam, v)| {
                    let t = z - lam;
                    if t.norm() > TOL_COINCIDE {
                        Ok(symplectic_form(u, v) / t)
                    } else {
                        kernel_integral(src, l, z, C64::new(lam, 0.0))
                    }
                })
                .collect()
        })
        .collect()
}

/// `J(z_i, lambda_j)` for real `lambda_j` on one fixed composite rule shared by all pairs.
pub fn oversampling_matrix<S: SolutionSource + ?Sized>(
    src: &S,
    taper: &TaperWeight,
    zs: &[C64],
    lambdas: &[f64],
) -> Result<Vec<Vec<C64>>> {
    let zmax = zs.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let lmax = lambdas.iter().map(|l| l.abs()).fold(0.0, f64::max);
    let p = panels(src.hamiltonian(), taper.a, taper.c, zmax + lmax, MATRIX_PHASE);
    let (nodes, weights) = quadrature::composite(&p, MATRIX_ORDER);
    let scale = 1.0 / (taper.c - taper.a);
    // Column data: weighted solution values at the nodes.
    let cols = lambdas
        .par_iter()
        .map(|&lam| {
            let v = src.solve_many(C64::new(lam, 0.0), &nodes)?;
            Ok(v.iter().zip(&weights).map(|(v, &w)| [v[0] * w, v[1] * w]).collect::<Vec<Vec2>>())
        })
        .collect::<Result<Vec<_>>>()?;
    zs.par_iter()
        .map(|&z| {
            let u = src.solve_many(z, &nodes)?;
            lambdas
                .iter()
                .zip(&cols)
                .map(|(&lam, v)| {
                    let t = z - lam;
                    if t.norm() > TOL_COINCIDE {
                        let num: C64 = u.iter().zip(v).map(|(u, v)| symplectic_form(u, v)).sum();
                        Ok(num * scale / t)
                    } else {
                        oversampling_direct(src, taper, z, C64::new(lam, 0.0))
                    }
                })
                .collect()
        })
        .collect()
}

/// Inner product of kernel sections `<K_l(., w'), K_l(., w)>` in the de Branges space,
/// computed as `int_0^l u(w)^t H u(conj w')`, the `L^2_H` product of their coefficient functions.
pub fn section_inner_product<S: SolutionSource + ?Sized>(src: &S, l: f64, w: C64, w_prime: C64) -> Result<C64> {
    kernel_integral(src, l, w, w_prime)
}

/// Paley-Wiener kernels at `t = z - conj w`:
/// `G_a = sin(a t) / (a t)` and `G_ab = 2 (cos(a t) - cos(b t)) / ((b - a) t^2)`.
pub fn pw_kernels(a: f64, b: f64, z: C64, w: C64) -> (C64, C64) {
    let t = z - w.conj();
    if t.norm() < 1e-4 {
        let t2 = t * t;
        let t4 = t2 * t2;
        let ga = 1.0 - a * a * t2 / 6.0 + a.powi(4) * t4 / 120.0;
        let gab = (a + b) - (a + b) * (a * a + b * b) * t2 / 12.0
            + (b.powi(6) - a.powi(6)) / (b - a) * t4 / 360.0;
        (ga, gab)
    } else {
        let at = t * a;
        ((at.sin() / at), ((at.cos() - (t * b).cos()) * 2.0 / ((b - a) * t * t)))
    }
}

/// Outcome of the Paley-Wiener normalization calibration.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PwCalibration {
    pub a_pw: f64,
    pub b_pw: f64,
    /// Ratio of the raw `G_ab` reconstruction to the general `J / K(lambda, lambda)` one.
    pub factor: f64,
    /// Largest relative deviation of the pointwise ratio from `factor`.
    pub variation: f64,
    pub n_terms: usize,
    pub n_points: usize,
}

impl PwCalibration {
    /// `G_ab / factor`, the kernel that plays the role of `J / K(lambda, lambda)`.
    pub fn calibrated_gab(&self, z: C64, w: C64) -> C64 {
        pw_kernels(self.a_pw, self.b_pw, z, w).1 / self.factor
    }
}

/// The default test grid: 100 points in `[-5, 5] x [-1, 1]`.
pub fn calibration_grid() -> Vec<C64> {
    let mut zs = Vec::with_capacity(100);
    for i in 0..20 {
        for k in 0..5 {
            zs.push(C64::new(-5.0 + 10.0 * i as f64 / 19.0, -1.0 + 0.5 * k as f64 + 0.05));
        }
    }
    zs
}

/// Calibration with `2 * 60 + 1` sampling terms on [`calibration_grid`].
pub fn calibrate_pw_normalization(a_pw: f64, b_pw: f64) -> Result<PwCalibration> {
    calibrate_pw_normalization_with(a_pw, b_pw, 60, &calibration_grid())
}

/// Measures the constant relating the raw `G_ab` series to the general oversampling
/// series on the equivalent canonical system: `H = I / 2` on `[0, 2 b_pw]` (type `b_pw`),
/// sampling points `n pi / b_pw` for `|n| <= n_max`, taper `[2 a_pw, 2 b_pw]`, and the
/// test element `F = K_{2 a_pw}(., w0)`.
pub fn calibrate_pw_normalization_with(a_pw: f64, b_pw: f64, n_max: usize, zs: &[C64]) -> Result<PwCalibration> {
    if !(a_pw > 0.0 && b_pw > a_pw) {
        return Err(Error::InvalidTaper { a: a_pw, c: b_pw, reason: "need 0 < a_pw < b_pw".into() });
    }
    if zs.is_empty() {
        return Err(Error::InvalidArgument("calibration needs at least one test point".into()));
    }
    let b = 2.0 * b_pw;
    let src = crate::solver::GenericSolver::new(Hamiltonian::constant_diagonal(0.0, b)?);
    let taper = TaperWeight::new(2.0 * a_pw, b, b)?;
    let n = n_max as i64;
    let lambdas: Vec<f64> = (-n..=n).map(|k| k as f64 * std::f64::consts::PI / b_pw).collect();
    let w0 = C64::new(0.3, 0.2);
    let samples = lambdas
        .par_iter()
        .map(|&lam| Ok(reproducing_kernel(&src, taper.a, C64::new(lam, 0.0), w0)?.value))
        .collect::<Result<Vec<_>>>()?;
    let norms = lambdas
        .par_iter()
        .map(|&lam| Ok(kernel_integral(&src, b, C64::new(lam, 0.0), C64::new(lam, 0.0))?.re))
        .collect::<Result<Vec<_>>>()?;
    let jm = oversampling_matrix(&src, &taper, zs, &lambdas)?;
    let ratios: Vec<f64> = zs
        .iter()
        .zip(&jm)
        .map(|(&z, row)| {
            let mut general = C64::new(0.0, 0.0);
            let mut raw = C64::new(0.0, 0.0);
            for ((&lam, j), (f, k)) in lambdas.iter().zip(row).zip(samples.iter().zip(&norms)) {
                general += j / k * f;
                raw += pw_kernels(a_pw, b_pw, z, C64::new(lam, 0.0)).1 * f;
            }
            (raw / general).re
        })
        .collect();
    let factor = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let variation = ratios.iter().map(|r| ((r - factor) / factor).abs()).fold(0.0, f64::max);
    if !(variation <= 1e-6) || !(factor > 0.0) {
        return Err(Error::NonConstantRatio { variation });
    }
    Ok(PwCalibration { a_pw, b_pw, factor, variation, n_terms: lambdas.len(), n_points: zs.len() })
}

/// CSV of kernel values with columns `re_z, im_z, re_val, im_val`.
pub fn kernel_csv(evals: &[KernelEval]) -> String {
    let mut s = String::from("re_z,im_z,re_val,im_val\n");
    for e in evals {
        writeln!(s, "{:e},{:e},{:e},{:e}", e.z.re, e.z.im, e.value.re, e.value.im).unwrap();
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Profile, Segment, SegmentKind};
    use crate::solver::GenericSolver;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn constant(g0: f64, b: f64) -> GenericSolver {
        GenericSolver::new(Hamiltonian::constant_diagonal(g0, b).unwrap())
    }

    fn variable() -> GenericSolver {
        GenericSolver::new(
            Hamiltonian::new(vec![Segment::new(
                0.0,
                2.0,
                SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly: vec![0.1, 0.15, -0.1] } },
            )])
            .unwrap(),
        )
    }

    #[test]
    fn taper_shape() {
        let t = TaperWeight::new(0.8, 1.4, 2.0).unwrap();
        assert_eq!((t.value(0.3), t.value(0.8), t.value(1.4), t.value(2.0)), (1.0, 1.0, 0.0, 0.0));
        assert_relative_eq!(t.value(1.1), 0.5);
        assert_relative_eq!(t.derivative(1.0), -1.0 / 0.6);
        assert!(TaperWeight::new(1.0, 0.5, 2.0).is_err());
        assert!(TaperWeight::new(0.0, 0.5, 2.0).is_err());
        assert!(TaperWeight::new(0.5, 2.5, 2.0).is_err());
        assert_relative_eq!(TaperWeight::midpoint(0.8, 2.0).unwrap().c, 1.4);
    }

    #[test]
    fn constant_reproducing_kernel_closed_form() {
        let s = constant(0.0, 2.0);
        for (z, w) in [(c(1.0, 0.3), c(-2.0, 0.5)), (c(7.0, 0.0), c(3.0, 0.0)), (c(0.1, -0.9), c(0.4, 1.1))] {
            let t = z - w.conj();
            let k = reproducing_kernel_checked(&s, 1.5, z, w).unwrap();
            assert!((k.value - (t * 0.75).sin() / t).norm() < 1e-13);
        }
        let d = reproducing_kernel(&s, 2.0, c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert_eq!(d.form_used, KernelForm::Integral);
        assert_relative_eq!(d.value.re, s.norm_squared(2.0, 2.0).unwrap(), epsilon = 1e-12);
    }

    #[test]
    fn oversampling_closed_form_constant() {
        let s = constant(0.0, 2.0);
        let taper = TaperWeight::new(0.8, 1.4, 2.0).unwrap();
        let kappa = 0.5;
        for (z, lam) in [(c(1.3, 0.4), 5.0), (c(-4.0, -1.0), 37.0), (c(0.0, 0.0), -2.5)] {
            let t = z - lam;
            let expect = ((t * kappa * 0.8).cos() - (t * kappa * 1.4).cos()) / (kappa * 0.6 * t * t);
            let j = oversampling_kernel(&s, &taper, z, c(lam, 0.0)).unwrap();
            assert!((j.value - expect).norm() < 1e-12, "{} vs {}", j.value, expect);
        }
    }

    #[test]
    fn oversampling_forms_agree() {
        let s = variable();
        let taper = TaperWeight::new(0.7, 1.5, 2.0).unwrap();
        for (z, w) in [(c(1.0, 0.5), c(-3.0, 0.2)), (c(12.0, 0.0), c(11.0, 0.0)), (c(0.3, 0.2), c(0.3, -0.2 + 1e-3))] {
            let q = oversampling_kernel(&s, &taper, z, w).unwrap();
            let d = oversampling_direct(&s, &taper, z, w).unwrap();
            assert_eq!(q.form_used, KernelForm::Quotient);
            assert!((q.value - d).norm() < 1e-7 * d.norm());
        }
        let diag = oversampling_kernel(&s, &taper, c(2.0, 0.0), c(2.0, 0.0)).unwrap();
        assert_eq!(diag.form_used, KernelForm::Integral);
        assert!(diag.value.re > 0.0 && diag.value.im.abs() < 1e-14);
    }

    #[test]
    fn decomposition_into_kernel_and_taper_part() {
        let s = variable();
        let taper = TaperWeight::new(0.7, 1.5, 2.0).unwrap();
        let h = s.hamiltonian().clone();
        let (z, w) = (c(2.0, 0.4), c(-1.0, 0.3));
        let j = oversampling_kernel(&s, &taper, z, w).unwrap().value;
        let ka = reproducing_kernel(&s, 0.7, z, w).unwrap().value;
        // The taper has a kink at c, so integrate up to it only (it vanishes beyond).
        let rest = integrate_pair(&s, z, w.conj(), 0.7, 1.5, |x, u, v| h.matrix_at(x).bilinear(u, v) * taper.value(x)).unwrap();
        assert!((j - ka - rest).norm() < 1e-10);
    }

    #[test]
    fn reproduces_subspace_elements() {
        // <J(., z), F> = F(z) for F = K_a(., w0).
        let s = variable();
        let taper = TaperWeight::new(0.7, 1.5, 2.0).unwrap();
        let h = s.hamiltonian().clone();
        let w0 = c(0.8, 0.6);
        for z in [c(1.0, 0.0), c(-3.0, 0.5)] {
            // F is supported on [0, a], where R = 1.
            let ip = integrate_pair(&s, z, w0.conj(), 0.0, taper.a, |x, u, v| {
                h.matrix_at(x).bilinear(u, v) * taper.r_weight(x)
            })
            .unwrap();
            let f = reproducing_kernel(&s, 0.7, z, w0).unwrap().value;
            assert!((ip - f).norm() < 1e-7);
        }
    }

    #[test]
    fn degenerate_taper_is_continuous() {
        let s = constant(0.3, 2.0);
        let (z, w) = (c(1.0, 0.2), c(4.0, 0.0));
        let at_end = oversampling_kernel(&s, &TaperWeight::new(0.8, 2.0, 2.0).unwrap(), z, w).unwrap().value;
        let near = oversampling_kernel(&s, &TaperWeight::new(0.8, 2.0 - 1e-6, 2.0).unwrap(), z, w).unwrap().value;
        assert!(at_end.norm().is_finite());
        assert!((at_end - near).norm() < 1e-5);
    }

    #[test]
    fn matrices_match_pointwise() {
        let s = variable();
        let taper = TaperWeight::new(0.7, 1.5, 2.0).unwrap();
        let zs = [c(0.0, 0.0), c(-4.0, 1.0), c(3.0, -0.5)];
        let lambdas = [-60.0, -3.0, 0.0, 2.5, 41.0];
        let jm = oversampling_matrix(&s, &taper, &zs, &lambdas).unwrap();
        let km = reproducing_matrix(&s, 2.0, &zs, &lambdas).unwrap();
        for (i, &z) in zs.iter().enumerate() {
            for (j, &lam) in lambdas.iter().enumerate() {
                let w = c(lam, 0.0);
                let jd = oversampling_kernel(&s, &taper, z, w).unwrap().value;
                let kd = reproducing_kernel(&s, 2.0, z, w).unwrap().value;
                assert!((jm[i][j] - jd).norm() < 1e-10 * (1.0 + jd.norm()));
                assert!((km[i][j] - kd).norm() < 1e-10 * (1.0 + kd.norm()));
            }
        }
    }

    #[test]
    fn pw_examples() {
        let (ga, gab) = pw_kernels(1.0, 2.0, c(0.7, 0.2), c(0.7, -0.2));
        assert_eq!(ga, c(1.0, 0.0));
        assert_eq!(gab, c(3.0, 0.0));
        let (_, gab) = pw_kernels(1.0, 2.0, c(std::f64::consts::PI, 0.0), c(0.0, 0.0));
        assert_relative_eq!(gab.re, -4.0 / std::f64::consts::PI.powi(2), epsilon = 1e-15);
        // The series and closed forms agree across the switch.
        let t = 1.0001e-4;
        let (sa, sab) = pw_kernels(0.9, 1.7, c(t, 0.0), c(0.0, 0.0));
        let (la, lab) = pw_kernels(0.9, 1.7, c(0.99e-4, 0.0), c(0.0, 0.0));
        assert!((sa - la).norm() < 1e-8 && (sab - lab).norm() < 1e-8);
    }

    #[test]
    fn calibration_factor_is_constant() {
        let cal = calibrate_pw_normalization(1.0, 2.0).unwrap();
        assert!(cal.variation < 1e-9, "{}", cal.variation);
        assert_relative_eq!(cal.factor, 4.0, max_relative = 1e-9);
        let z = c(0.4, 0.1);
        assert_relative_eq!(cal.calibrated_gab(z, c(0.0, 0.0)).re, pw_kernels(1.0, 2.0, z, c(0.0, 0.0)).1.re / cal.factor);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn kernel_symmetries(zr in -8.0f64..8.0, zi in -1.5f64..1.5, wr in -8.0f64..8.0, wi in -1.5f64..1.5) {
            let s = variable();
            let taper = TaperWeight::new(0.7, 1.5, 2.0).unwrap();
            let (z, w) = (c(zr, zi), c(wr, wi));
            let k = |a, b| reproducing_kernel(&s, 2.0, a, b).unwrap().value;
            prop_assert!((k(z, w) - k(w, z).conj()).norm() < 1e-9 * (1.0 + k(z, w).norm()));
            let j = |a, b| oversampling_kernel(&s, &taper, a, b).unwrap().value;
            let jzw = j(z, w);
            prop_assert!((jzw - j(w, z).conj()).norm() < 1e-9 * (1.0 + jzw.norm()));
            prop_assert!((jzw - j(w.conj(), z.conj())).norm() < 1e-9 * (1.0 + jzw.norm()));
        }
    }
}
