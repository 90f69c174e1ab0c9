//! Fundamental solutions of `J u' = -z H u`, `u(z, 0) = (1, 0)`, and the
//! Prüfer angle/amplitude representation for real spectral parameters.
//!
//! Constant blocks are propagated with their exact transfer matrix. Other
//! segments use a fourth-order Magnus integrator on a uniform step plan. A plan
//! depends only on the magnitude bucket of `z` (powers of two), so the computed
//! solution is a smooth function of `z` within a bucket; this keeps finite
//! differences and root bracketing clean.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{constant_transfer, symplectic_form, Mat2, Sym2, Vec2, C64, ONE, ZERO};
use crate::quadrature;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex};

/// Something that can evaluate the fundamental solution `u(z, x)` of a
/// canonical system along increasing positions `x`.
pub trait SolutionSource: Send + Sync {
    fn hamiltonian(&self) -> &Hamiltonian;

    /// `u(z, x)` for each `x` of the ascending slice `xs`.
    fn solve_many(&self, z: C64, xs: &[f64]) -> Result<Vec<Vec2>>;

    fn solve(&self, z: C64, x: f64) -> Result<Vec2> {
        Ok(self.solve_many(z, &[x])?[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Relative agreement demanded between a step plan and its refinement.
    pub tol: f64,
    /// Upper limit on Magnus steps per piece before giving up.
    pub max_steps: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self { tol: 1e-10, max_steps: 1 << 22 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FundamentalValue {
    pub u1: C64,
    pub u2: C64,
    pub z: C64,
    pub x: f64,
}

/// Polar form `u(lambda, x) = R (cos theta, sin theta)` with a continuous angle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PruferState {
    pub theta: f64,
    pub log_r: f64,
    pub lambda: f64,
    pub x: f64,
}

#[derive(Clone, Debug)]
struct Piece {
    seg: usize,
    from: f64,
    to: f64,
    constant: Option<Sym2>,
    /// Upper bound of `tr H` on the piece.
    trace: f64,
}

/// Number of integration steps per piece for one magnitude bucket of `z`.
#[derive(Clone, Debug, PartialEq)]
pub struct StepPlan {
    steps: Vec<usize>,
}

/// Generic solver for any valid [`Hamiltonian`].
#[derive(Debug)]
pub struct GenericSolver {
    h: Hamiltonian,
    opts: SolverOptions,
    pieces: Vec<Piece>,
    plans: Mutex<HashMap<i32, Arc<StepPlan>>>,
}

impl Clone for GenericSolver {
    fn clone(&self) -> Self {
        Self::with_options(self.h.clone(), self.opts)
    }
}

const SQRT3: f64 = 1.732_050_807_568_877_2;

fn magnus_step(h: &Hamiltonian, seg: usize, z: C64, x0: f64, len: f64) -> Mat2 {
    let s = &h.segments()[seg];
    let c = SQRT3 / 6.0;
    let a1 = s.matrix(x0 + len * (0.5 - c)).j_times().scale(z);
    let a2 = s.matrix(x0 + len * (0.5 + c)).j_times().scale(z);
    let comm = (a1 * a2).sub(&(a2 * a1));
    a1.add(&a2)
        .scale(C64::new(0.5 * len, 0.0))
        .sub(&comm.scale(C64::new(SQRT3 * len * len / 12.0, 0.0)))
        .exp_traceless()
}

/// Bucket index of a magnitude: plans are shared for `|z|` in `(2^(k-1), 2^k]`.
fn bucket(scale: f64) -> i32 {
    scale.max(1.0).log2().ceil() as i32
}

fn wrap_angle(d: f64) -> f64 {
    let r = (d + PI).rem_euclid(2.0 * PI) - PI;
    if r == -PI {
        PI
    } else {
        r
    }
}

impl GenericSolver {
    pub fn new(h: Hamiltonian) -> Self {
        Self::with_options(h, SolverOptions::default())
    }

    pub fn with_options(h: Hamiltonian, opts: SolverOptions) -> Self {
        let mut pieces = Vec::new();
        for (i, s) in h.segments().iter().enumerate() {
            let constant = s.constant_matrix();
            let trace = match constant {
                Some(m) => m.trace(),
                None => 2.0 * s.rate_bound(),
            };
            for w in s.breakpoints().windows(2) {
                pieces.push(Piece { seg: i, from: w[0], to: w[1], constant, trace });
            }
        }
        Self { h, opts, pieces, plans: Mutex::new(HashMap::new()) }
    }

    pub fn options(&self) -> SolverOptions {
        self.opts
    }

    fn step(&self, p: &Piece, z: C64, x0: f64, len: f64) -> Mat2 {
        match &p.constant {
            Some(m) => constant_transfer(m, z, len),
            None => magnus_step(&self.h, p.seg, z, x0, len),
        }
    }

    fn piece_transfer(&self, p: &Piece, z: C64, n: usize) -> Mat2 {
        let h = (p.to - p.from) / n as f64;
        let mut t = Mat2::IDENTITY;
        for k in 0..n {
            t = self.step(p, z, p.from + h * k as f64, h) * t;
        }
        t
    }

    /// The step plan shared by every `z` with `|z|` in the same power-of-two bucket as `scale`.
    pub fn plan(&self, scale: f64) -> Result<Arc<StepPlan>> {
        let key = bucket(scale);
        if let Some(p) = self.plans.lock().unwrap().get(&key) {
            return Ok(p.clone());
        }
        let s = 2f64.powi(key);
        let probes = [C64::new(s, 0.0), C64::new(s, s.min(4.0))];
        let mut steps = Vec::with_capacity(self.pieces.len());
        for p in &self.pieces {
            if p.constant.is_some() {
                steps.push(1);
                continue;
            }
            let mut n = ((s * p.trace * (p.to - p.from)).ceil() as usize).max(1);
            loop {
                if 2 * n > self.opts.max_steps {
                    return Err(Error::StepUnderflow { from: p.from, to: p.to, steps: 2 * n });
                }
                let ok = probes.iter().all(|&z| {
                    let coarse = self.piece_transfer(p, z, n);
                    let fine = self.piece_transfer(p, z, 2 * n);
                    coarse.sub(&fine).max_abs() <= self.opts.tol * fine.max_abs()
                });
                if ok {
                    break;
                }
                n *= 2;
            }
            steps.push(n);
        }
        let plan = Arc::new(StepPlan { steps });
        self.plans.lock().unwrap().insert(key, plan.clone());
        Ok(plan)
    }

    fn check_positions(&self, xs: &[f64]) -> Result<()> {
        let b = self.h.length();
        if let Some(&x) = xs.iter().find(|&&x| !(x >= 0.0 && x <= b * (1.0 + 1e-14))) {
            return Err(Error::InvalidArgument(format!("position {x} outside [0, {b}]")));
        }
        if xs.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidArgument("positions must be ascending".into()));
        }
        Ok(())
    }

    /// `u(z, x)` at ascending `xs` with an explicit plan.
    pub fn solve_with(&self, plan: &StepPlan, z: C64, xs: &[f64]) -> Result<Vec<Vec2>> {
        self.check_positions(xs)?;
        let mut out = Vec::with_capacity(xs.len());
        let mut v: Vec2 = [ONE, ZERO];
        let mut idx = 0;
        while idx < xs.len() && xs[idx] <= 0.0 {
            out.push(v);
            idx += 1;
        }
        for (p, &n) in self.pieces.iter().zip(&plan.steps) {
            if idx == xs.len() {
                break;
            }
            let h = (p.to - p.from) / n as f64;
            for k in 0..n {
                let s0 = p.from + h * k as f64;
                let s1 = if k + 1 == n { p.to } else { s0 + h };
                while idx < xs.len() && xs[idx] <= s1 {
                    let x = xs[idx].max(s0);
                    out.push(if x == s0 { v } else { self.step(p, z, s0, x - s0).apply(&v) });
                    idx += 1;
                }
                if idx == xs.len() {
                    break;
                }
                v = self.step(p, z, s0, s1 - s0).apply(&v);
            }
        }
        while idx < xs.len() {
            out.push(v);
            idx += 1;
        }
        Ok(out)
    }

    pub fn fundamental_solution(&self, z: C64, x: f64) -> Result<FundamentalValue> {
        let u = self.solve(z, x)?;
        Ok(FundamentalValue { u1: u[0], u2: u[1], z, x })
    }

    /// Transfer matrix `T` with `u(z, x1) = T u(z, x0)`.
    pub fn transfer(&self, z: C64, x0: f64, x1: f64) -> Result<Mat2> {
        self.check_positions(&[x0, x1])?;
        let plan = self.plan(z.norm())?;
        let mut t = Mat2::IDENTITY;
        for (p, &n) in self.pieces.iter().zip(&plan.steps) {
            if p.to <= x0 || p.from >= x1 {
                continue;
            }
            let h = (p.to - p.from) / n as f64;
            for k in 0..n {
                let s0 = p.from + h * k as f64;
                let s1 = if k + 1 == n { p.to } else { s0 + h };
                let (lo, hi) = (s0.max(x0), s1.min(x1));
                if hi > lo {
                    t = self.step(p, z, lo, hi - lo) * t;
                }
            }
        }
        Ok(t)
    }

    /// Prüfer variables at ascending `xs` for any (not necessarily diagonal) `H`.
    ///
    /// Diagonal constant blocks with both entries positive use the exact
    /// solution of the angle equation; elsewhere the real solution is
    /// propagated with the plan and the angle is unwrapped step by step.
    pub fn prufer_with(&self, plan: &StepPlan, lambda: f64, xs: &[f64]) -> Result<Vec<PruferState>> {
        self.check_positions(xs)?;
        let z = C64::new(lambda, 0.0);
        let mut out = Vec::with_capacity(xs.len());
        let (mut theta, mut log_r) = (0.0f64, 0.0f64);
        let mut idx = 0;
        let state = |theta: f64, log_r: f64, x: f64| PruferState { theta, log_r, lambda, x };
        while idx < xs.len() && xs[idx] <= 0.0 {
            out.push(state(0.0, 0.0, xs[idx]));
            idx += 1;
        }
        let advance = |m: &Mat2, theta: f64, log_r: f64| -> (f64, f64) {
            let v = m.apply(&[C64::new(theta.cos(), 0.0), C64::new(theta.sin(), 0.0)]);
            let (a, b) = (v[0].re, v[1].re);
            let nrm = a.hypot(b);
            (theta + wrap_angle(b.atan2(a) - theta), log_r + nrm.ln())
        };
        for (p, &n) in self.pieces.iter().zip(&plan.steps) {
            if idx == xs.len() {
                break;
            }
            if let Some(m) = p.constant.filter(|m| m.h3 == 0.0 && m.h1 > 0.0 && m.h2 > 0.0) {
                let flow = |s: f64| constant_diagonal_prufer(m.h1, m.h2, lambda, theta, s);
                while idx < xs.len() && xs[idx] <= p.to {
                    let (t, dl) = flow(xs[idx] - p.from);
                    out.push(state(t, log_r + dl, xs[idx]));
                    idx += 1;
                }
                let (t, dl) = flow(p.to - p.from);
                theta = t;
                log_r += dl;
                continue;
            }
            // Constant blocks get sub-steps so that the angle moves less than one radian per step.
            let n = if p.constant.is_some() {
                ((lambda.abs() * p.trace * (p.to - p.from)).ceil() as usize).max(1)
            } else {
                n
            };
            let h = (p.to - p.from) / n as f64;
            for k in 0..n {
                let s0 = p.from + h * k as f64;
                let s1 = if k + 1 == n { p.to } else { s0 + h };
                while idx < xs.len() && xs[idx] <= s1 {
                    let x = xs[idx].max(s0);
                    let (t, l) = if x == s0 {
                        (theta, log_r)
                    } else {
                        advance(&self.step(p, z, s0, x - s0), theta, log_r)
                    };
                    out.push(state(t, l, xs[idx]));
                    idx += 1;
                }
                if idx == xs.len() {
                    break;
                }
                (theta, log_r) = advance(&self.step(p, z, s0, s1 - s0), theta, log_r);
            }
        }
        while idx < xs.len() {
            out.push(state(theta, log_r, xs[idx]));
            idx += 1;
        }
        Ok(out)
    }

    /// Prüfer variables of a diagonal Hamiltonian at `x`.
    pub fn prufer_flow(&self, lambda: f64, x: f64) -> Result<PruferState> {
        if !self.h.is_diagonal() {
            return Err(Error::NonDiagonalHamiltonian);
        }
        let plan = self.plan(lambda.abs())?;
        Ok(self.prufer_with(&plan, lambda, &[x])?[0])
    }

    /// `int_0^l u^t H u` for real `lambda` by composite Gauss-Legendre quadrature.
    pub fn norm_quadrature(&self, plan: &StepPlan, lambda: f64, l: f64) -> Result<f64> {
        let z = C64::new(lambda, 0.0);
        let panels = self.panels(0.0, l, lambda.abs(), 2.0);
        let v = quadrature::integrate_batched(&panels, 1e-12, |nodes| {
            let us = self.solve_with(plan, z, nodes)?;
            Ok(nodes
                .iter()
                .zip(&us)
                .map(|(&x, u)| self.h.matrix_at(x).bilinear(u, u))
                .collect())
        })?;
        Ok(v.re)
    }

    /// Panels covering `[a, b]`, split at every piece boundary, with phase per panel at most `max_phase`.
    pub fn panels(&self, a: f64, b: f64, scale: f64, max_phase: f64) -> Vec<(f64, f64)> {
        let mut out = Vec::new();
        for p in &self.pieces {
            let (lo, hi) = (p.from.max(a), p.to.min(b));
            if hi > lo {
                quadrature::panelize(lo, hi, scale.max(1.0) * p.trace, max_phase, &mut out);
            }
        }
        out
    }

    /// `K_l(lambda, lambda) = ||u(lambda, .)||^2` on `[0, l]`, cross-checked against
    /// the derivative form `d/dz [u(z, l)^t J u(lambda, l)]` at `z = lambda`.
    pub fn norm_squared(&self, lambda: f64, l: f64) -> Result<f64> {
        let tau = self.h.exponential_type(l)?;
        let step = 1e-4 / tau.max(1.0);
        let plan = self.plan(lambda.abs() + step)?;
        let quad = self.norm_quadrature(&plan, lambda, l)?;
        let at = |z: f64| -> Result<Vec2> { Ok(self.solve_with(&plan, C64::new(z, 0.0), &[l])?[0]) };
        let u0 = at(lambda)?;
        let up = at(lambda + step)?;
        let um = at(lambda - step)?;
        let wronskian = ((symplectic_form(&up, &u0) - symplectic_form(&um, &u0)) / (2.0 * step)).re;
        if (quad - wronskian).abs() > 1e-6 * quad.abs() {
            return Err(Error::FormMismatch { lambda, quadrature: quad, wronskian });
        }
        Ok(quad)
    }
}

/// Exact Prüfer flow of `H = diag(h1, h2)`, `h1, h2 > 0`, over a length `s`
/// starting from angle `theta0`; returns the new angle and the increment of `log R`.
///
/// With `tan theta = alpha tan psi`, `alpha = sqrt(h1 / h2)`, the angle `psi`
/// advances linearly at rate `lambda sqrt(h1 h2)` and `R^2` is proportional to
/// `cos^2 psi + alpha^2 sin^2 psi`.
pub fn constant_diagonal_prufer(h1: f64, h2: f64, lambda: f64, theta0: f64, s: f64) -> (f64, f64) {
    let alpha = (h1 / h2).sqrt();
    let kappa = (h1 * h2).sqrt();
    // atan(c tan t) on the branch containing t, robust when t rounds past +-pi/2.
    let branch = |t: f64, c: f64| -> f64 {
        let k = (t / PI).round();
        let r = t - k * PI;
        let mut m = (c * r.tan()).atan();
        if r > 0.0 && m < 0.0 {
            m += PI;
        } else if r < 0.0 && m > 0.0 {
            m -= PI;
        }
        k * PI + m
    };
    let psi0 = branch(theta0, 1.0 / alpha);
    let psi1 = psi0 + lambda * kappa * s;
    let theta1 = branch(psi1, alpha);
    let d = |psi: f64| psi.cos().powi(2) + alpha * alpha * psi.sin().powi(2);
    (theta1, 0.5 * (d(psi1).ln() - d(psi0).ln()))
}

impl SolutionSource for GenericSolver {
    fn hamiltonian(&self) -> &Hamiltonian {
        &self.h
    }

    fn solve_many(&self, z: C64, xs: &[f64]) -> Result<Vec<Vec2>> {
        let plan = self.plan(z.norm())?;
        self.solve_with(&plan, z, xs)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Profile, Segment, SegmentKind};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mixed() -> Hamiltonian {
        Hamiltonian::new(vec![
            Segment::new(0.0, 0.7, SegmentKind::ConstantDiagonal { g0: 0.2 }),
            Segment::new(
                0.7,
                1.5,
                SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly: vec![0.1, 0.1, -0.05] } },
            ),
            Segment::new(
                1.5,
                2.0,
                SegmentKind::GridGeneral {
                    h1: vec![0.6, 0.5, 0.7],
                    h2: vec![0.4, 0.6, 0.3],
                    h3: vec![0.1, -0.1, 0.05],
                    x: vec![],
                },
            ),
        ])
        .unwrap()
    }

    #[test]
    fn zero_parameter_gives_unit_vector() {
        let s = GenericSolver::new(mixed());
        for x in [0.0, 0.3, 1.1, 2.0] {
            let u = s.solve(ZERO, x).unwrap();
            assert_eq!(u, [ONE, ZERO]);
        }
    }

    #[test]
    fn constant_case_closed_form() {
        let s = GenericSolver::new(Hamiltonian::constant_diagonal(0.0, 2.0).unwrap());
        let u = s.solve(c(PI, 0.0), 1.0).unwrap();
        assert!((u[0] - ZERO).norm() < 1e-15);
        assert!((u[1] - ONE).norm() < 1e-15);
    }

    #[test]
    fn constant_block_through_magnus_path() {
        // The same constant matrix as a tabulated segment runs through the Magnus integrator.
        let g = 0.3;
        let grid = Hamiltonian::new(vec![Segment::new(
            0.0,
            2.0,
            SegmentKind::DiagonalFunction { g: Profile::Samples { samples: vec![g, g], x: vec![] } },
        )])
        .unwrap();
        let exact = Hamiltonian::constant_diagonal(g, 2.0).unwrap();
        let (a, b) = (GenericSolver::new(grid), GenericSolver::new(exact));
        for z in [c(3.0, 0.5), c(-40.0, 0.0), c(0.2, -2.0)] {
            let (ua, ub) = (a.solve(z, 1.7).unwrap(), b.solve(z, 1.7).unwrap());
            assert!((ua[0] - ub[0]).norm() + (ua[1] - ub[1]).norm() < 1e-9 * (1.0 + ub[0].norm()));
        }
    }

    #[test]
    fn airy_solution_satisfies_equation() {
        // Residual of u1' = -z x u2, u2' = z u1 by central differences of the computed trajectory.
        let s = GenericSolver::new(Hamiltonian::airy(1.0).unwrap());
        let z = c(7.0, 0.8);
        let d = 1e-4;
        let xs = [0.5 - d, 0.5, 0.5 + d];
        let u = s.solve_many(z, &xs).unwrap();
        let du1 = (u[2][0] - u[0][0]) / (2.0 * d);
        let du2 = (u[2][1] - u[0][1]) / (2.0 * d);
        assert!((du1 + z * 0.5 * u[1][1]).norm() < 1e-6);
        assert!((du2 - z * u[1][0]).norm() < 1e-6);
    }

    #[test]
    fn prufer_examples() {
        let s = GenericSolver::new(Hamiltonian::constant_diagonal(0.0, 2.0).unwrap());
        let p = s.prufer_flow(0.0, 1.5).unwrap();
        assert_eq!((p.theta, p.log_r), (0.0, 0.0));
        for lambda in [0.3, 17.0, -250.0] {
            let p = s.prufer_flow(lambda, 1.3).unwrap();
            assert_relative_eq!(p.theta, lambda * 1.3 / 2.0, epsilon = 1e-12 * lambda.abs().max(1.0));
            assert!(p.log_r.abs() < 1e-13);
        }
        let general = GenericSolver::new(mixed());
        assert_eq!(general.prufer_flow(1.0, 1.0), Err(Error::NonDiagonalHamiltonian));
    }

    #[test]
    fn prufer_reproduces_solution() {
        let h = Hamiltonian::new(vec![
            Segment::new(0.0, 0.7, SegmentKind::ConstantDiagonal { g0: 0.2 }),
            Segment::new(
                0.7,
                2.0,
                SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly: vec![0.1, 0.1, -0.05] } },
            ),
        ])
        .unwrap();
        let s = GenericSolver::new(h);
        for lambda in [-31.0, 0.7, 12.5, 90.0] {
            for x in [0.35, 0.7, 1.2, 2.0] {
                let p = s.prufer_flow(lambda, x).unwrap();
                let u = s.solve(c(lambda, 0.0), x).unwrap();
                let r = p.log_r.exp();
                assert!((r * p.theta.cos() - u[0].re).abs() < 1e-8);
                assert!((r * p.theta.sin() - u[1].re).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn prufer_angle_is_monotone_in_lambda() {
        let s = GenericSolver::new(mixed());
        let plan = s.plan(64.0).unwrap();
        let mut prev = f64::NEG_INFINITY;
        for k in 0..200 {
            let lambda = 33.0 + 0.15 * k as f64;
            let t = s.prufer_with(&plan, lambda, &[2.0]).unwrap()[0].theta;
            assert!(t > prev);
            prev = t;
        }
    }

    #[test]
    fn norm_examples() {
        let s = GenericSolver::new(Hamiltonian::constant_diagonal(0.0, 2.0).unwrap());
        for lambda in [0.0, 1.0, -13.7, 1000.0] {
            assert_relative_eq!(s.norm_squared(lambda, 2.0).unwrap(), 1.0, epsilon = 1e-10);
        }
        let a = GenericSolver::new(Hamiltonian::airy(1.5).unwrap());
        assert_relative_eq!(a.norm_squared(0.0, 1.5).unwrap(), 1.5, epsilon = 1e-12);
        let m = GenericSolver::new(mixed());
        for lambda in [2.0, -45.0, 300.0] {
            assert!(m.norm_squared(lambda, 2.0).unwrap() > 0.0);
        }
    }

    #[test]
    fn norm_lower_bound_ratio() {
        // ||u(lambda, .)||^2 / R(lambda, a)^2 stays bounded below on a dense real grid.
        let h = Hamiltonian::new(vec![Segment::new(
            0.0,
            2.0,
            SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly: vec![0.0, 0.2] } },
        )])
        .unwrap();
        let s = GenericSolver::new(h);
        let min = (0..1000)
            .map(|k| {
                let lambda = -200.0 + 0.4 * k as f64;
                let n = s.norm_squared(lambda, 2.0).unwrap();
                let r = s.prufer_flow(lambda, 0.8).unwrap().log_r.exp();
                n / (r * r)
            })
            .fold(f64::INFINITY, f64::min);
        assert!(min > 0.1, "min ratio {min}");
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn transfer_is_symplectic(re in -40.0f64..40.0, im in -3.0f64..3.0, x0 in 0.0f64..1.0, len in 0.0f64..1.0) {
            let s = GenericSolver::new(mixed());
            let t = s.transfer(c(re, im), x0, x0 + len).unwrap();
            prop_assert!((t.det() - ONE).norm() < 1e-10 * t.max_abs().powi(2).max(1.0));
        }

        #[test]
        fn conjugation_symmetry(re in -40.0f64..40.0, im in -3.0f64..3.0, x in 0.0f64..2.0) {
            let s = GenericSolver::new(mixed());
            let u = s.solve(c(re, im), x).unwrap();
            let v = s.solve(c(re, -im), x).unwrap();
            let scale = u[0].norm().max(u[1].norm()).max(1.0);
            prop_assert!((u[0] - v[0].conj()).norm() < 1e-12 * scale);
            prop_assert!((u[1] - v[1].conj()).norm() < 1e-12 * scale);
        }
    }
}
