//! Closed-form treatment of the Airy system `H = diag(1, x)`.
//!
//! `wi` is the solution of `wi'' = t wi` with `wi(0) = 0`, `wi'(0) = 1`, namely
//! `wi(t) = pi [Ai(0) Bi(t) - Bi(0) Ai(t)]`. The fundamental solution of the
//! Airy system is `u(lambda, x) = (wi'(-lambda^(2/3) x), -lambda^(1/3) wi(-lambda^(2/3) x))`,
//! its Dirichlet spectrum comes from the zeros `y_n` of `wi(-x)`, and the other
//! boundary angles from the zeros `x_n(beta)` of `w(beta, x) = wi'(-x) + beta sqrt(x) wi(-x)`.

use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::hamiltonian::Hamiltonian;
use crate::linalg::{Vec2, C64, ONE, ZERO};
use crate::solver::{GenericSolver, SolutionSource};
use crate::spectrum::{BoundaryAngle, Spectrum, SpectrumEntry};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::sync::OnceLock;

/// Arguments `t < -X_SWITCH` use the oscillatory asymptotic expansion.
pub const X_SWITCH: f64 = 9.0;
/// Largest admissible disagreement of the two branches near the switch.
pub const BRANCH_TOL: f64 = 1e-8;

/// `C0 = 2 sqrt(pi) / (3^(2/3) Gamma(2/3))`, the amplitude of `wi` on the negative axis.
pub fn c0() -> f64 {
    static C0: OnceLock<f64> = OnceLock::new();
    *C0.get_or_init(|| 2.0 * PI.sqrt() / (3f64.powf(2.0 / 3.0) * gamma(2.0 / 3.0)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    Series,
    Asymptotic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WiEvaluation {
    /// The argument `t`.
    pub x: f64,
    pub wi: f64,
    pub wi_prime: f64,
    pub branch: Branch,
}

/// `wi(t)` and `wi'(t)`.
pub fn wi_eval(t: f64) -> WiEvaluation {
    if t < -X_SWITCH {
        let (wi, wi_prime) = wi_asymptotic(-t);
        WiEvaluation { x: t, wi, wi_prime, branch: Branch::Asymptotic }
    } else {
        let (wi, wi_prime) = wi_series(t);
        WiEvaluation { x: t, wi, wi_prime, branch: Branch::Series }
    }
}

/// Taylor series `wi(t) = sum c(k) t^(3k+1) / (3k+1)!`, `c(k) = prod_{l<k} (2 + 3l)`,
/// and its derivative, summed in double-double arithmetic because the terms
/// alternate and grow large for negative `t`.
pub fn wi_series(t: f64) -> (f64, f64) {
    let sum = |first: Dd, den: fn(f64) -> f64| -> f64 {
        let mut term = first;
        let mut acc = first;
        let mut largest = first.abs();
        for k in 0..400 {
            let k = k as f64;
            term = term.mul_f64(t).mul_f64(t).mul_f64(t).div_f64(den(k));
            acc = acc + term;
            largest = largest.max(term.abs());
            let size = term.abs();
            if size <= 1e-20 * acc.abs() || size <= 1e-34 * largest || size == 0.0 {
                break;
            }
        }
        acc.to_f64()
    };
    let wi = sum(Dd::from_f64(t), |k| (3.0 * k + 3.0) * (3.0 * k + 4.0));
    let wi_prime = sum(Dd::from_f64(1.0), |k| (3.0 * k + 1.0) * (3.0 * k + 3.0));
    (wi, wi_prime)
}

/// `(wi(-x), wi'(-x))` for large `x > 0` from the Hankel-type expansion:
/// with `zeta = (2/3) x^(3/2)` and `chi = zeta + pi/12`,
/// `wi(-x) = C0 x^(-1/4) [Q cos chi - P sin chi]`,
/// `wi'(-x) = C0 x^(1/4) [P' cos chi + Q' sin chi]`,
/// where `P, Q` (resp. `P', Q'`) are the even and odd parts of `sum (-1)^k u_k zeta^-k`
/// (resp. `v_k`) and the sums stop at the smallest term.
pub fn wi_asymptotic(x: f64) -> (f64, f64) {
    let zeta = 2.0 / 3.0 * x.powf(1.5);
    let (mut p, mut q, mut pv, mut qv) = (1.0, 0.0, 1.0, 0.0);
    let mut u = 1.0;
    let mut zk = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..200 {
        let kf = k as f64;
        u *= (6.0 * kf - 5.0) * (6.0 * kf - 3.0) * (6.0 * kf - 1.0) / ((2.0 * kf - 1.0) * 216.0 * kf);
        let v = -(6.0 * kf + 1.0) / (6.0 * kf - 1.0) * u;
        zk /= zeta;
        let (tu, tv) = (u * zk, v * zk);
        if tu.abs() >= last {
            break;
        }
        last = tu.abs();
        // Terms k = 2m + 1 go to Q with sign (-1)^m, k = 2m to P with sign (-1)^m.
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 1 {
            q += sign * tu;
            qv += sign * tv;
        } else {
            p += sign * tu;
            pv += sign * tv;
        }
        if last < 1e-17 {
            break;
        }
    }
    let chi = zeta + PI / 12.0;
    let (s, c) = chi.sin_cos();
    let c0 = c0();
    let x4 = x.powf(0.25);
    (c0 / x4 * (q * c - p * s), c0 * x4 * (pv * c + qv * s))
}

/// Largest disagreement of the series and asymptotic branches on `[x_switch - 1, x_switch + 1]`,
/// relative to the local amplitude; fails with [`Error::BranchMismatch`] beyond [`BRANCH_TOL`].
pub fn branch_check(x_switch: f64) -> Result<f64> {
    let mut worst: f64 = 0.0;
    for k in 0..=40 {
        let x = x_switch - 1.0 + k as f64 / 20.0;
        let (s, sp) = wi_series(-x);
        let (a, ap) = wi_asymptotic(x);
        let d = ((s - a).abs() * x.powf(0.25)).max((sp - ap).abs() / x.powf(0.25)) / c0();
        if d > BRANCH_TOL {
            return Err(Error::BranchMismatch { x, difference: d });
        }
        worst = worst.max(d);
    }
    Ok(worst)
}

/// `w(beta, x) = wi'(-x) + beta sqrt(x) wi(-x)`.
pub fn w_beta(beta: f64, x: f64) -> f64 {
    let e = wi_eval(-x);
    e.wi_prime + beta * x.sqrt() * e.wi
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ZeroKind {
    /// Zeros `y_n` of `wi(-x)`, `y_0 = 0`.
    Wi,
    /// Zeros `x_n(beta)` of `w(beta, x)`, `x_0 > 0`.
    WBeta,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ZeroEntry {
    pub n: usize,
    pub value: f64,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ZeroTable {
    pub kind: ZeroKind,
    pub beta: f64,
    pub entries: Vec<ZeroEntry>,
}

impl ZeroTable {
    pub fn values(&self) -> Vec<f64> {
        self.entries.iter().map(|e| e.value).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("n,value,residual\n");
        for e in &self.entries {
            writeln!(s, "{},{:e},{:e}", e.n, e.value, e.residual).unwrap();
        }
        s
    }
}

/// Asymptotic location of the `n`-th zero:
/// `y_n ~ ((3 pi / 2)(n - 1/12))^(2/3)` and
/// `x_n(beta) ~ ((3 pi / 2)(n + 5/12) - (3/2) arctan(beta))^(2/3)`.
pub fn zero_model(kind: ZeroKind, beta: f64, n: usize) -> f64 {
    let t = match kind {
        ZeroKind::Wi => 1.5 * PI * (n as f64 - 1.0 / 12.0),
        ZeroKind::WBeta => 1.5 * PI * (n as f64 + 5.0 / 12.0) - 1.5 * beta.atan(),
    };
    t.max(0.0).powf(2.0 / 3.0)
}

struct ZeroFunction {
    kind: ZeroKind,
    beta: f64,
}

impl ZeroFunction {
    /// Value and derivative in `x`.
    fn eval(&self, x: f64) -> (f64, f64) {
        let e = wi_eval(-x);
        match self.kind {
            ZeroKind::Wi => (e.wi, -e.wi_prime),
            ZeroKind::WBeta => {
                let r = x.sqrt();
                let f = e.wi_prime + self.beta * r * e.wi;
                let d = x * e.wi + self.beta * (e.wi / (2.0 * r) - r * e.wi_prime);
                (f, d)
            }
        }
    }

    /// Safeguarded Newton iteration inside a sign-changing bracket.
    fn refine(&self, mut lo: f64, mut hi: f64) -> f64 {
        let mut flo = self.eval(lo).0;
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let (f, d) = self.eval(x);
            if f == 0.0 {
                return x;
            }
            if (f < 0.0) == (flo < 0.0) {
                lo = x;
                flo = f;
            } else {
                hi = x;
            }
            let newton = x - f / d;
            let next = if d != 0.0 && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
            if (next - x).abs() <= 2.0 * f64::EPSILON * x.abs() || hi - lo <= 2.0 * f64::EPSILON * hi {
                return next;
            }
            x = next;
        }
        x
    }

    fn sign_changes(&self, a: f64, b: f64, samples: usize) -> usize {
        let mut prev = self.eval(a).0;
        let mut count = 0;
        for k in 1..=samples {
            let v = self.eval(a + (b - a) * k as f64 / samples as f64).0;
            if v != 0.0 && prev != 0.0 && (v < 0.0) != (prev < 0.0) {
                count += 1;
            }
            if v != 0.0 {
                prev = v;
            }
        }
        count
    }
}

const SCAN_END: f64 = 12.0;
const SCAN_STEP: f64 = 0.005;

/// Zeros with indices `0..=n_max`: a fine scan locates those below a small
/// cutoff; the rest start from [`zero_model`] and are refined by safeguarded
/// Newton. Every gap between consecutive zeros is screened for extra sign changes.
pub fn zeros(kind: ZeroKind, beta: f64, n_max: usize) -> Result<ZeroTable> {
    let f = ZeroFunction { kind, beta };
    let mut roots: Vec<f64> = Vec::new();
    let start = match kind {
        ZeroKind::Wi => {
            roots.push(0.0);
            1e-3
        }
        ZeroKind::WBeta => 0.0,
    };
    // Scan phase.
    let mut a = start;
    let mut fa = f.eval(a).0;
    while a < SCAN_END && roots.len() <= n_max {
        let b = a + SCAN_STEP;
        let fb = f.eval(b).0;
        if fb == 0.0 {
            roots.push(b);
        } else if fa != 0.0 && (fa < 0.0) != (fb < 0.0) {
            roots.push(f.refine(a, b));
        }
        a = b;
        fa = fb;
    }
    roots.truncate(n_max + 1);
    // Model-guided phase.
    let first = roots.len();
    if first <= n_max {
        let rest = (first..=n_max)
            .into_par_iter()
            .map(|n| {
                let g = zero_model(kind, beta, n);
                let half = 0.45 * PI / g.sqrt();
                let (lo, hi) = (g - half, g + half);
                let (flo, fhi) = (f.eval(lo).0, f.eval(hi).0);
                if (flo < 0.0) == (fhi < 0.0) {
                    return Err(Error::EnumerationGap { index: n });
                }
                Ok(f.refine(lo, hi))
            })
            .collect::<Result<Vec<_>>>()?;
        roots.extend(rest);
    }
    // Enumeration validation.
    if roots.windows(2).any(|w| w[1] <= w[0]) {
        let index = roots.windows(2).position(|w| w[1] <= w[0]).unwrap() + 1;
        return Err(Error::EnumerationGap { index });
    }
    let lead = if kind == ZeroKind::Wi { 1e-3 } else { 0.0 };
    if let Some(&r0) = roots.get(if kind == ZeroKind::Wi { 1 } else { 0 }) {
        if f.sign_changes(lead, r0 * (1.0 - 1e-9), 64) > 0 {
            return Err(Error::EnumerationGap { index: 0 });
        }
    }
    let skip = if kind == ZeroKind::Wi { 1 } else { 0 };
    for (i, w) in roots.windows(2).enumerate().skip(skip) {
        let pad = 1e-7 * (w[1] - w[0]);
        if f.sign_changes(w[0] + pad, w[1] - pad, 16) > 0 {
            return Err(Error::EnumerationGap { index: i + 1 });
        }
    }
    let entries = roots
        .into_iter()
        .enumerate()
        .map(|(n, value)| ZeroEntry { n, value, residual: f.eval(value).0.abs() })
        .collect();
    Ok(ZeroTable { kind, beta, entries })
}

/// `||u(lambda, .)||^2` on `[0, b]` in closed form; `b` at `lambda = 0`.
pub fn airy_norm(lambda: f64, b: f64) -> f64 {
    if lambda == 0.0 {
        return b;
    }
    let s = lambda.abs().powf(2.0 / 3.0);
    let l = s * b;
    let e = wi_eval(-l);
    (2.0 * l * l * e.wi * e.wi + 2.0 * l * e.wi_prime * e.wi_prime - e.wi * e.wi_prime) / (3.0 * s)
}

/// Spectrum of the Airy system on `[0, b]` for indices `n_lo..=n_hi`.
///
/// `gamma = 0`: `lambda_{+-n} = +-(y_n / b)^(3/2)`. Otherwise, with
/// `beta = cot(gamma) / sqrt(b)`, `lambda_n = (x_n(beta) / b)^(3/2)` for `n >= 0`
/// and `lambda_{-(m+1)} = -(x_m(-beta) / b)^(3/2)`.
pub fn airy_spectrum(b: f64, gamma: f64, n_lo: i64, n_hi: i64) -> Result<Spectrum> {
    let angle = BoundaryAngle::new(gamma)?;
    if !(b > 0.0) {
        return Err(Error::EmptyDomain { b });
    }
    let scale = |x: f64| (x / b).powf(1.5);
    let pos_max = n_hi.max(0) as usize;
    let neg_max = (-n_lo).max(0) as usize;
    let mut entries = Vec::new();
    if gamma == 0.0 {
        let y = zeros(ZeroKind::Wi, 0.0, pos_max.max(neg_max).max(1))?.values();
        for n in n_lo..=n_hi {
            let l = scale(y[n.unsigned_abs() as usize]).copysign(n as f64);
            entries.push(SpectrumEntry { n, lambda: if n == 0 { 0.0 } else { l }, k_diag: 0.0 });
        }
    } else {
        let beta = (gamma.cos() / gamma.sin()) / b.sqrt();
        let pos = if n_hi >= 0 { zeros(ZeroKind::WBeta, beta, pos_max)?.values() } else { Vec::new() };
        let neg = if n_lo < 0 { zeros(ZeroKind::WBeta, -beta, neg_max.max(1) - 1)?.values() } else { Vec::new() };
        for n in n_lo..=n_hi {
            let lambda = if n >= 0 { scale(pos[n as usize]) } else { -scale(neg[(-n - 1) as usize]) };
            entries.push(SpectrumEntry { n, lambda, k_diag: 0.0 });
        }
    }
    entries.par_iter_mut().for_each(|e| e.k_diag = airy_norm(e.lambda, b));
    Spectrum::new(angle, b, entries)
}

/// Largest `(2/3) sqrt(|z|^2 x^3)` for which the complex power series is used;
/// beyond it terms grow enough to spoil double precision and the generic solver takes over.
const SERIES_LIMIT: f64 = 12.0;

/// Fundamental solution of the Airy system from `wi`, usable wherever a
/// [`SolutionSource`] is expected.
#[derive(Debug, Clone)]
pub struct AiryClosedForm {
    fallback: GenericSolver,
}

impl AiryClosedForm {
    pub fn new(b: f64) -> Result<Self> {
        Ok(Self { fallback: GenericSolver::new(Hamiltonian::airy(b)?) })
    }

    /// Composed power series in `s = z^2 x^3`:
    /// `u1 = sum (-1)^k c(k) s^k / (3k)!`, `u2 = z x sum (-1)^k c(k) s^k / (3k+1)!`.
    pub fn series(z: C64, x: f64) -> Vec2 {
        let s = z * z * (x * x * x);
        let sum = |den: fn(f64) -> f64| -> C64 {
            let mut term = ONE;
            let mut acc = ONE;
            for k in 0..400 {
                let k = k as f64;
                term = -term * s / den(k);
                acc += term;
                if term.norm() <= 1e-18 * acc.norm() || term.norm() == 0.0 {
                    break;
                }
            }
            acc
        };
        let u1 = sum(|k| (3.0 * k + 1.0) * (3.0 * k + 3.0));
        let u2 = z * x * sum(|k| (3.0 * k + 3.0) * (3.0 * k + 4.0));
        [u1, u2]
    }

    /// Real `lambda`: `u = (wi'(-|lambda|^(2/3) x), -sgn(lambda) |lambda|^(1/3) wi(-|lambda|^(2/3) x))`.
    pub fn real(lambda: f64, x: f64) -> Vec2 {
        if lambda == 0.0 {
            return [ONE, ZERO];
        }
        let a = lambda.abs();
        let e = wi_eval(-a.powf(2.0 / 3.0) * x);
        [C64::new(e.wi_prime, 0.0), C64::new(-lambda.signum() * a.cbrt() * e.wi, 0.0)]
    }
}

impl SolutionSource for AiryClosedForm {
    fn hamiltonian(&self) -> &Hamiltonian {
        self.fallback.hamiltonian()
    }

    fn solve_many(&self, z: C64, xs: &[f64]) -> Result<Vec<Vec2>> {
        let b = self.hamiltonian().length();
        if let Some(&x) = xs.iter().find(|&&x| !(x >= 0.0 && x <= b * (1.0 + 1e-14))) {
            return Err(Error::InvalidArgument(format!("position {x} outside [0, {b}]")));
        }
        if z.im == 0.0 {
            return Ok(xs.iter().map(|&x| Self::real(z.re, x)).collect());
        }
        let xmax = xs.iter().copied().fold(0.0, f64::max);
        if 2.0 / 3.0 * z.norm() * xmax.powf(1.5) <= SERIES_LIMIT {
            Ok(xs.iter().map(|&x| Self::series(z, x)).collect())
        } else {
            self.fallback.solve_many(z, xs)
        }
    }
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    // Reference values from an independent arbitrary-precision evaluation of
    // pi [Ai(0) Bi(t) - Bi(0) Ai(t)] and its derivative.
    const REFERENCE: [(f64, f64, f64); 8] = [
        (-1.0, -0.918_628_888_527_886_6, 0.680_336_924_767_703_9),
        (1.0, 1.085_339_648_082_982_3, 1.347_444_527_384_729_8),
        (-5.0, -0.831_947_798_341_728_9, 0.236_117_204_385_535_6),
        (-9.0, 0.405_190_150_241_943_9, 1.820_813_596_266_504_6),
        (-9.5, -0.574_315_166_759_824_3, 1.307_128_140_871_661_9),
        (-20.0, 0.117_563_911_502_251_67, -2.607_599_358_255_161_5),
        (-100.0, -0.314_386_895_395_623_7, 2.439_574_468_880_245_1),
        (3.0, 15.643_851_268_272_989, 25.589_387_356_314_792),
    ];

    #[test]
    fn wi_reference_values() {
        let e = wi_eval(0.0);
        assert_eq!((e.wi, e.wi_prime), (0.0, 1.0));
        for (t, w, wp) in REFERENCE {
            let e = wi_eval(t);
            assert!((e.wi - w).abs() < 1e-12 * (1.0 + w.abs()), "wi({t}) = {} vs {w}", e.wi);
            assert!((e.wi_prime - wp).abs() < 1e-12 * (1.0 + wp.abs()), "wi'({t}) = {} vs {wp}", e.wi_prime);
        }
        assert_eq!(wi_eval(-20.0).branch, Branch::Asymptotic);
        assert_eq!(wi_eval(-5.0).branch, Branch::Series);
    }

    #[test]
    fn alternating_partial_sums() {
        // 1 - 1/12 + 10/7! - 80/10! approximates -wi(-1).
        let partial = 1.0 - 1.0 / 12.0 + 10.0 / 5040.0 - 80.0 / 3_628_800.0;
        assert!((-wi_eval(-1.0).wi - partial).abs() < 1e-6);
        assert!((-wi_eval(-1.0).wi - 0.918_629).abs() < 1e-6);
    }

    #[test]
    fn amplitude_constant() {
        assert_relative_eq!(c0(), 1.258_541_682_585_905_5, epsilon = 1e-14);
    }

    #[test]
    fn branches_agree_near_switch() {
        let d = branch_check(X_SWITCH).unwrap();
        assert!(d < 1e-9, "branch disagreement {d}");
    }

    #[test]
    fn w_beta_properties() {
        for x in [0.5, 3.0, 11.0] {
            assert_eq!(w_beta(0.0, x), wi_eval(-x).wi_prime);
        }
        let y = zeros(ZeroKind::Wi, 0.0, 5).unwrap();
        for e in &y.entries[1..] {
            assert!((w_beta(2.5, e.value) - wi_eval(-e.value).wi_prime).abs() < 1e-12);
        }
        // Leading oscillatory form.
        for beta in [-1.0, 0.5] {
            let x: f64 = 400.0;
            let chi = 2.0 / 3.0 * x.powf(1.5) + PI / 12.0;
            let lead = c0() * x.powf(0.25) * (chi.cos() - beta * chi.sin());
            assert!((w_beta(beta, x) - lead).abs() < 2.0 * x.powf(-1.25) * (1.0 + beta.abs()));
        }
    }

    #[test]
    fn first_zeros() {
        let y = zeros(ZeroKind::Wi, 0.0, 3).unwrap();
        assert_eq!(y.entries[0].value, 0.0);
        let expected = [2.666_352_690_406_937_9, 4.342_477_568_039_557, 5.741_028_816_112_24];
        for (e, v) in y.entries[1..].iter().zip(expected) {
            assert_relative_eq!(e.value, v, epsilon = 1e-13);
            assert!(e.residual < 1e-12);
        }
        let cases = [
            (1.0, [0.879_913_691_879_930_5, 3.114_455_633_595_204, 4.705_860_258_234_788]),
            (-1.0, [2.135_072_255_854_464, 3.949_107_710_988_313_5, 5.404_170_697_376_572]),
            (0.0, [1.514_906_050_296_654_6, 3.534_048_578_693_180_7, 5.056_146_204_424_819]),
        ];
        for (beta, xs) in cases {
            let t = zeros(ZeroKind::WBeta, beta, 2).unwrap();
            for (e, v) in t.entries.iter().zip(xs) {
                assert_relative_eq!(e.value, v, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn zero_tables_are_clean() {
        for (kind, beta) in [(ZeroKind::Wi, 0.0), (ZeroKind::WBeta, 3.0), (ZeroKind::WBeta, -4.0)] {
            let t = zeros(kind, beta, 300).unwrap();
            assert_eq!(t.entries.len(), 301);
            assert!(t.entries.iter().all(|e| e.residual < 1e-10));
        }
        assert!(zeros(ZeroKind::Wi, 0.0, 2).unwrap().to_csv().starts_with("n,value,residual\n0,0e0,0e0\n"));
    }

    #[test]
    fn closed_form_solution_matches_reference() {
        // lambda = 7, x = 1.3 against an independent arbitrary-precision evaluation.
        let u = AiryClosedForm::real(7.0, 1.3);
        assert_relative_eq!(u[0].re, 1.142_470_342_693_836_3, epsilon = 1e-12);
        assert_relative_eq!(u[1].re, 1.261_483_881_637_731_7, epsilon = 1e-12);
        let v = AiryClosedForm::series(C64::new(7.0, 0.0), 1.3);
        assert!((v[0] - u[0]).norm() < 1e-11 && (v[1] - u[1]).norm() < 1e-11);
        let m = AiryClosedForm::real(-7.0, 1.3);
        assert_eq!((m[0].re, m[1].re), (u[0].re, -u[1].re));
    }

    #[test]
    fn closed_form_satisfies_canonical_system() {
        // u1' = -z x u2, u2' = z u1, by central differences of the series.
        let d = 1e-5;
        for z in [C64::new(3.0, 1.0), C64::new(-5.0, 0.5), C64::new(0.0, 2.0)] {
            for x in [0.2, 0.6, 0.95] {
                let (m, c, p) = (AiryClosedForm::series(z, x - d), AiryClosedForm::series(z, x), AiryClosedForm::series(z, x + d));
                let du1 = (p[0] - m[0]) / (2.0 * d);
                let du2 = (p[1] - m[1]) / (2.0 * d);
                assert!((du1 + z * x * c[1]).norm() < 1e-9 * (1.0 + c[1].norm() * z.norm()));
                assert!((du2 - z * c[0]).norm() < 1e-9 * (1.0 + c[0].norm() * z.norm()));
            }
        }
    }

    #[test]
    fn norm_examples() {
        assert_eq!(airy_norm(0.0, 1.7), 1.7);
        assert_relative_eq!(airy_norm(7.0, 1.3), 2.992_747_152_328_678_7, epsilon = 1e-12);
        let b = 1.4;
        let s = airy_spectrum(b, 0.0, 1, 6).unwrap();
        let y = zeros(ZeroKind::Wi, 0.0, 6).unwrap();
        for e in &s.entries {
            let wp = wi_eval(-y.entries[e.n as usize].value).wi_prime;
            assert_relative_eq!(e.k_diag, 2.0 / 3.0 * b * wp * wp, max_relative = 1e-10);
        }
    }

    #[test]
    fn spectrum_structure() {
        let s = airy_spectrum(1.0, 0.0, -10, 10).unwrap();
        assert_eq!(s.get(0).unwrap().lambda, 0.0);
        for n in 1..=10 {
            assert_eq!(s.get(n).unwrap().lambda, -s.get(-n).unwrap().lambda);
        }
        let g = airy_spectrum(1.0, 1.0, -3, 3).unwrap();
        assert!(0.0 < g.get(0).unwrap().lambda && g.get(0).unwrap().lambda < s.get(1).unwrap().lambda);
    }

    #[test]
    fn generic_solver_agrees() {
        let h = Hamiltonian::airy(1.0).unwrap();
        for gamma in [0.0, 2.0] {
            let a = airy_spectrum(1.0, gamma, -4, 4).unwrap();
            let g = crate::spectrum::eigenvalues(&h, 1.0, gamma, -4, 4).unwrap();
            for (x, y) in a.entries.iter().zip(&g.entries) {
                assert!((x.lambda - y.lambda).abs() < 1e-9 * x.lambda.abs().max(1.0));
                assert_relative_eq!(x.k_diag, y.k_diag, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn sample_weight_growth() {
        // K(lambda_n, lambda_n)^(1/2) grows like n^(1/6).
        let s = airy_spectrum(1.0, 0.0, 0, 100).unwrap();
        let pts: Vec<(f64, f64)> =
            (20..=100).map(|n| ((n as f64).ln(), 0.5 * s.get(n).unwrap().k_diag.ln())).collect();
        let m = pts.len() as f64;
        let (mx, my) = pts.iter().fold((0.0, 0.0), |a, p| (a.0 + p.0 / m, a.1 + p.1 / m));
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope - 1.0 / 6.0).abs() < 0.02, "slope {slope}");
    }
}
