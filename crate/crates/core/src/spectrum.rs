//! Eigenvalues of the self-adjoint extensions `S_b^gamma` and their norming constants.
//!
//! An eigenvalue for the boundary angle `gamma` is a real `lambda` with
//! `theta(lambda, b) = gamma + n pi`, where `theta` is the continuous Prüfer
//! angle. Index `n = 0` is the smallest nonnegative eigenvalue.

use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::solver::{GenericSolver, SolutionSource, StepPlan};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::fmt::Write as _;

/// Refusal distance from the exceptional angle.
pub const EXCEPTIONAL_TOL: f64 = 1e-8;

/// A boundary angle `gamma` in `[0, pi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct BoundaryAngle(f64);

impl BoundaryAngle {
    pub fn new(gamma: f64) -> Result<Self> {
        if (0.0..PI).contains(&gamma) {
            Ok(Self(gamma))
        } else {
            Err(Error::InvalidArgument(format!("boundary angle {gamma} outside [0, pi)")))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for BoundaryAngle {
    type Error = Error;
    fn try_from(g: f64) -> Result<Self> {
        Self::new(g)
    }
}

impl From<BoundaryAngle> for f64 {
    fn from(g: BoundaryAngle) -> f64 {
        g.0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectrumEntry {
    pub n: i64,
    pub lambda: f64,
    /// `K_b(lambda, lambda)`.
    pub k_diag: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Spectrum {
    pub gamma: BoundaryAngle,
    pub b: f64,
    pub entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    /// Sorts by index and checks that eigenvalues strictly increase with it.
    pub fn new(gamma: BoundaryAngle, b: f64, mut entries: Vec<SpectrumEntry>) -> Result<Self> {
        entries.sort_by_key(|e| e.n);
        if let Some(w) = entries.windows(2).find(|w| w[1].lambda <= w[0].lambda || w[1].n == w[0].n) {
            return Err(Error::MonotonicityFailure { lambda: w[1].lambda });
        }
        Ok(Self { gamma, b, entries })
    }

    pub fn get(&self, n: i64) -> Option<&SpectrumEntry> {
        self.entries.binary_search_by_key(&n, |e| e.n).ok().map(|i| &self.entries[i])
    }

    pub fn lambdas(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.lambda).collect()
    }

    /// Entries with `|n| <= n_max`.
    pub fn window(&self, n_max: i64) -> Vec<SpectrumEntry> {
        self.entries.iter().filter(|e| e.n.abs() <= n_max).copied().collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,lambda,k_diag\n");
        for e in &self.entries {
            writeln!(s, "{},{:e},{:e}", e.n, e.lambda, e.k_diag).unwrap();
        }
        s
    }
}

/// The angle `omega` of the exceptional extension when `[0, b]` ends with a
/// singular interval of type `phi`: `omega = phi + pi/2 (mod pi)`.
pub fn detect_exceptional(h: &Hamiltonian) -> Option<f64> {
    let b = h.length();
    h.singular_intervals()
        .last()
        .filter(|s| (s.to - b).abs() <= 1e-12 * b.max(1.0))
        .map(|s| (s.phi + PI / 2.0).rem_euclid(PI))
}

/// Eigenvalues `lambda_n`, `n_lo <= n <= n_hi`, of `S_b^gamma` for `H` restricted to `[0, b]`.
pub fn eigenvalues(h: &Hamiltonian, b: f64, gamma: f64, n_lo: i64, n_hi: i64) -> Result<Spectrum> {
    let solver = GenericSolver::new(h.restrict(b)?);
    eigenvalues_with(&solver, gamma, n_lo, n_hi)
}

/// As [`eigenvalues`] on the full interval of an existing solver.
pub fn eigenvalues_with(solver: &GenericSolver, gamma: f64, n_lo: i64, n_hi: i64) -> Result<Spectrum> {
    let angle = BoundaryAngle::new(gamma)?;
    let h = solver.hamiltonian();
    if let Some(omega) = detect_exceptional(h) {
        let d = (gamma - omega).rem_euclid(PI);
        if d.min(PI - d) < EXCEPTIONAL_TOL {
            return Err(Error::ExceptionalExtension { gamma, omega });
        }
    }
    if n_hi < n_lo {
        return Spectrum::new(angle, h.length(), Vec::new());
    }
    let search = RootSearch::new(solver)?;
    let entries = (n_lo..=n_hi)
        .into_par_iter()
        .map(|n| search.find(n, gamma + n as f64 * PI))
        .collect::<Result<Vec<_>>>()?;
    Spectrum::new(angle, h.length(), entries)
}

struct RootSearch<'a> {
    solver: &'a GenericSolver,
    b: f64,
    tau: f64,
}

const MAX_EXPANSIONS: usize = 200;

impl<'a> RootSearch<'a> {
    fn new(solver: &'a GenericSolver) -> Result<Self> {
        let b = solver.hamiltonian().length();
        let tau = solver.hamiltonian().exponential_type(b)?;
        Ok(Self { solver, b, tau })
    }

    fn theta(&self, plan: &StepPlan, lambda: f64) -> Result<(f64, f64)> {
        let p = self.solver.prufer_with(plan, lambda, &[self.b])?[0];
        Ok((p.theta, p.log_r))
    }

    fn theta_auto(&self, lambda: f64) -> Result<f64> {
        let plan = self.solver.plan(lambda.abs())?;
        Ok(self.theta(&plan, lambda)?.0)
    }

    fn find(&self, n: i64, target: f64) -> Result<SpectrumEntry> {
        if target == 0.0 {
            // theta(0, b) = 0 exactly.
            return Ok(SpectrumEntry { n, lambda: 0.0, k_diag: self.solver.norm_squared(0.0, self.b)? });
        }
        let rate = if self.tau > 0.0 { self.tau } else { self.solver.hamiltonian().trace_integral(self.b) };
        let mut step = PI / (2.0 * rate);
        let guess = target / rate;
        // Geometric bracket expansion from the asymptotic guess.
        let (mut lo, mut hi);
        let f0 = self.theta_auto(guess)? - target;
        if f0 < 0.0 {
            lo = guess;
            hi = guess + step;
            let mut k = 0;
            while self.theta_auto(hi)? - target < 0.0 {
                lo = hi;
                step *= 2.0;
                hi += step;
                k += 1;
                if k > MAX_EXPANSIONS {
                    return Err(Error::InvalidArgument(format!("no eigenvalue with index {n}")));
                }
            }
        } else {
            hi = guess;
            lo = guess - step;
            let mut k = 0;
            while self.theta_auto(lo)? - target > 0.0 {
                hi = lo;
                step *= 2.0;
                lo -= step;
                k += 1;
                if k > MAX_EXPANSIONS {
                    return Err(Error::InvalidArgument(format!("no eigenvalue with index {n}")));
                }
            }
        }
        // Lock one step plan so that theta is smooth on the whole bracket.
        let plan = self.solver.plan(lo.abs().max(hi.abs()))?;
        let f = |l: f64| -> Result<f64> { Ok(self.theta(&plan, l)?.0 - target) };
        let (mut flo, mut fhi) = (f(lo)?, f(hi)?);
        let mut widen = 0;
        while flo > 0.0 || fhi < 0.0 {
            let w = hi - lo;
            if flo > 0.0 {
                lo -= w;
                flo = f(lo)?;
            }
            if fhi < 0.0 {
                hi += w;
                fhi = f(hi)?;
            }
            widen += 1;
            if widen > 8 {
                return Err(Error::MonotonicityFailure { lambda: 0.5 * (lo + hi) });
            }
        }
        // Monotonicity screen before root finding.
        let mut prev = flo;
        for k in 1..8 {
            let v = f(lo + (hi - lo) * k as f64 / 8.0)?;
            if v < prev - 1e-10 * target.abs().max(1.0) {
                return Err(Error::MonotonicityFailure { lambda: lo + (hi - lo) * k as f64 / 8.0 });
            }
            prev = v;
        }
        if fhi < prev - 1e-10 * target.abs().max(1.0) {
            return Err(Error::MonotonicityFailure { lambda: hi });
        }
        // Illinois-modified regula falsi, falling back to bisection.
        let mut side = 0i8;
        for _ in 0..200 {
            if hi - lo <= 1e-14 * lo.abs().max(hi.abs()).max(1.0) {
                break;
            }
            let mut mid = if fhi > flo { lo - flo * (hi - lo) / (fhi - flo) } else { 0.5 * (lo + hi) };
            if !(mid > lo && mid < hi) {
                mid = 0.5 * (lo + hi);
            }
            let fm = f(mid)?;
            if fm == 0.0 {
                lo = mid;
                hi = mid;
                break;
            }
            if fm < 0.0 {
                lo = mid;
                flo = fm;
                if side == -1 {
                    fhi *= 0.5;
                }
                side = -1;
            } else {
                hi = mid;
                fhi = fm;
                if side == 1 {
                    flo *= 0.5;
                }
                side = 1;
            }
        }
        let mut lambda = 0.5 * (lo + hi);
        let k_diag = self.solver.norm_squared(lambda, self.b)?;
        // Newton polish with d theta / d lambda = ||u||^2 / R(b)^2.
        let (t, log_r) = self.theta(&plan, lambda)?;
        let polished = lambda - (t - target) * (2.0 * log_r).exp() / k_diag;
        if (polished - lambda).abs() <= (hi - lo).max(1e-15 * lambda.abs()) * 4.0 {
            lambda = polished;
        }
        Ok(SpectrumEntry { n, lambda, k_diag })
    }
}

/// Leading-order models for the growth of eigenvalues.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum AsymptoticModel {
    /// `lambda_n = slope n + intercept`, fitted by least squares.
    Linear,
    /// `H = diag(1, x)` on `[0, b]`:
    /// `|lambda_n| b^(3/2) ~ (3 pi / 2)(m + 5/12 -+ arctan(beta) / pi)` with
    /// `beta = cot(gamma) / sqrt(b)`, `m = n` for `n >= 0` and `m = -n - 1` for `n < 0`.
    Airy,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CountingReport {
    pub model: AsymptoticModel,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// `(n, relative residual)` against the model.
    pub residuals: Vec<(i64, f64)>,
    pub max_residual: f64,
}

/// Model value of `lambda_n` for the Airy system.
pub fn airy_model(n: i64, gamma: f64, b: f64) -> f64 {
    // arctan(cot(gamma) / sqrt(b)), equal to pi/2 at gamma = 0.
    let phase = gamma.cos().atan2(gamma.sin() * b.sqrt()) / PI;
    let scale = 1.5 * PI / b.powf(1.5);
    if n >= 0 {
        scale * (n as f64 + 5.0 / 12.0 - phase)
    } else {
        -scale * ((-n - 1) as f64 + 5.0 / 12.0 + phase)
    }
}

/// Compares a spectrum with an asymptotic model; needs at least 20 entries of each sign.
pub fn counting_check(spectrum: &Spectrum, model: AsymptoticModel) -> Result<CountingReport> {
    let pos = spectrum.entries.iter().filter(|e| e.n > 0).count();
    let neg = spectrum.entries.iter().filter(|e| e.n < 0).count();
    if pos < 20 || neg < 20 {
        return Err(Error::InvalidArgument("counting check needs 20 eigenvalues of each sign".into()));
    }
    match model {
        AsymptoticModel::Linear => {
            let m = spectrum.entries.len() as f64;
            let (sx, sy) = spectrum
                .entries
                .iter()
                .fold((0.0, 0.0), |(a, b), e| (a + e.n as f64, b + e.lambda));
            let (mx, my) = (sx / m, sy / m);
            let (sxy, sxx) = spectrum.entries.iter().fold((0.0, 0.0), |(a, b), e| {
                let dx = e.n as f64 - mx;
                (a + dx * (e.lambda - my), b + dx * dx)
            });
            let slope = sxy / sxx;
            let intercept = my - slope * mx;
            let residuals: Vec<(i64, f64)> = spectrum
                .entries
                .iter()
                .map(|e| {
                    let fit = slope * e.n as f64 + intercept;
                    (e.n, (e.lambda - fit).abs() / fit.abs().max(1.0))
                })
                .collect();
            let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
            Ok(CountingReport { model, slope: Some(slope), intercept: Some(intercept), residuals, max_residual })
        }
        AsymptoticModel::Airy => {
            let residuals: Vec<(i64, f64)> = spectrum
                .entries
                .iter()
                .filter(|e| e.n != 0)
                .map(|e| {
                    let m = airy_model(e.n, spectrum.gamma.value(), spectrum.b);
                    (e.n, (e.lambda / m - 1.0).abs())
                })
                .collect();
            let max_residual = residuals.iter().map(|r| r.1).fold(0.0, f64::max);
            Ok(CountingReport { model, slope: None, intercept: None, residuals, max_residual })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{Profile, Segment, SegmentKind};
    use crate::linalg::C64;
    use approx::assert_relative_eq;

    #[test]
    fn constant_dirichlet_and_neumann() {
        let h = Hamiltonian::constant_diagonal(0.0, 2.0).unwrap();
        let s = eigenvalues(&h, 2.0, 0.0, -5, 5).unwrap();
        for e in &s.entries {
            assert!((e.lambda - e.n as f64 * PI).abs() < 1e-12 * (1.0 + e.lambda.abs()));
            assert_relative_eq!(e.k_diag, 1.0, epsilon = 1e-10);
        }
        let s = eigenvalues(&h, 2.0, PI / 2.0, -5, 5).unwrap();
        for e in &s.entries {
            assert!((e.lambda - (e.n as f64 + 0.5) * PI).abs() < 1e-12 * (1.0 + e.lambda.abs()));
        }
    }

    #[test]
    fn airy_dirichlet_has_zero() {
        let h = Hamiltonian::airy(1.0).unwrap();
        let s = eigenvalues(&h, 1.0, 0.0, -2, 2).unwrap();
        assert_eq!(s.get(0).unwrap().lambda, 0.0);
        assert_relative_eq!(s.get(1).unwrap().lambda, -s.get(-1).unwrap().lambda, epsilon = 1e-10);
    }

    #[test]
    fn exceptional_angles() {
        let regular = Hamiltonian::constant_diagonal(0.1, 1.0).unwrap();
        assert_eq!(detect_exceptional(&regular), None);
        let tail = |h1: f64, h2: f64| {
            Hamiltonian::new(vec![
                Segment::new(0.0, 1.0, SegmentKind::ConstantDiagonal { g0: 0.0 }),
                Segment::new(1.0, 2.0, SegmentKind::PolynomialDiagonal { h1: vec![h1], h2: vec![h2] }),
            ])
            .unwrap()
        };
        assert_relative_eq!(detect_exceptional(&tail(1.0, 0.0)).unwrap(), PI / 2.0);
        assert_eq!(detect_exceptional(&tail(0.0, 1.0)).unwrap(), 0.0);
        let err = eigenvalues(&tail(1.0, 0.0), 2.0, PI / 2.0, 0, 1).unwrap_err();
        assert!(matches!(err, Error::ExceptionalExtension { .. }));
        assert!(eigenvalues(&tail(1.0, 0.0), 2.0, 0.3, -3, 3).is_ok());
    }

    fn variable() -> Hamiltonian {
        Hamiltonian::new(vec![Segment::new(
            0.0,
            2.0,
            SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly: vec![0.1, 0.15, -0.1] } },
        )])
        .unwrap()
    }

    #[test]
    fn boundary_condition_residual() {
        let h = variable();
        let solver = GenericSolver::new(h);
        for gamma in [0.0, 0.4, 2.5] {
            let s = eigenvalues_with(&solver, gamma, -12, 12).unwrap();
            for e in &s.entries {
                let u = solver.solve(C64::new(e.lambda, 0.0), 2.0).unwrap();
                let r = (u[0].re * gamma.sin() - u[1].re * gamma.cos()).abs();
                let norm = u[0].norm().hypot(u[1].norm());
                assert!(r < 1e-9 * norm, "n = {}, residual {r}", e.n);
            }
        }
    }

    #[test]
    fn interlacing_and_disjointness() {
        let h = Hamiltonian::constant_diagonal(0.3, 2.0).unwrap();
        let a = eigenvalues(&h, 2.0, 0.0, -10, 10).unwrap();
        let b = eigenvalues(&h, 2.0, 1.0, -10, 10).unwrap();
        for w in a.entries.windows(2) {
            let inside = b.entries.iter().filter(|e| e.lambda > w[0].lambda && e.lambda < w[1].lambda).count();
            assert_eq!(inside, 1);
        }
        assert!(a.entries.iter().all(|e| b.entries.iter().all(|f| (e.lambda - f.lambda).abs() > 1e-3)));
    }

    #[test]
    fn dirichlet_symmetric_for_diagonal() {
        let s = eigenvalues(&variable(), 2.0, 0.0, -15, 15).unwrap();
        for n in 1..=15 {
            assert_relative_eq!(s.get(n).unwrap().lambda, -s.get(-n).unwrap().lambda, epsilon = 1e-9, max_relative = 1e-10);
        }
    }

    #[test]
    fn general_hamiltonian_spectrum() {
        let h = Hamiltonian::new(vec![Segment::new(
            0.0,
            1.0,
            SegmentKind::GridGeneral {
                h1: vec![0.6, 0.5, 0.7],
                h2: vec![0.4, 0.6, 0.3],
                h3: vec![0.1, -0.1, 0.05],
                x: vec![],
            },
        )])
        .unwrap();
        let solver = GenericSolver::new(h);
        let s = eigenvalues_with(&solver, 0.7, -6, 6).unwrap();
        for e in &s.entries {
            let u = solver.solve(C64::new(e.lambda, 0.0), 1.0).unwrap();
            let r = (u[0].re * 0.7f64.sin() - u[1].re * 0.7f64.cos()).abs();
            assert!(r < 1e-9 * u[0].norm().hypot(u[1].norm()));
        }
    }

    #[test]
    fn counting_linear_slope() {
        let h = Hamiltonian::constant_diagonal(0.0, 2.0).unwrap();
        let s = eigenvalues(&h, 2.0, 0.0, -25, 25).unwrap();
        let r = counting_check(&s, AsymptoticModel::Linear).unwrap();
        assert!((r.slope.unwrap() - PI).abs() < 1e-6);
    }

    #[test]
    fn partial_sums_of_inverse_squares_settle() {
        let h = Hamiltonian::constant_diagonal(0.2, 2.0).unwrap();
        let s = eigenvalues(&h, 2.0, 0.5, -200, 200).unwrap();
        let partial = |n: i64| s.window(n).iter().map(|e| 1.0 / (1.0 + e.lambda * e.lambda)).sum::<f64>();
        assert!(partial(200) - partial(100) < 0.01 * partial(200));
        assert!(partial(200) - partial(100) < partial(100) - partial(50));
    }

    #[test]
    fn csv_header() {
        let h = Hamiltonian::constant_diagonal(0.0, 2.0).unwrap();
        let s = eigenvalues(&h, 2.0, 0.0, 0, 1).unwrap();
        let csv = s.to_csv();
        assert!(csv.starts_with("n,lambda,k_diag\n0,0e0,"));
        assert_eq!(csv.lines().count(), 3);
    }
}
