//! Sampling and oversampling reconstructions, weighted `l_p` sample noise, and
//! summability diagnostics.
//!
//! Every series is truncated symmetrically in the eigenvalue index (`|n| <= N`) and
//! summed in the fixed order `n = 0, -1, 1, -2, 2, ...`, so reports do not depend on
//! how work was scheduled.

use crate::error::{Error, Result};
use crate::kernels::{self, TaperWeight};
use crate::linalg::{Vec2, C64};
use crate::quadrature;
use crate::solver::SolutionSource;
use crate::spectrum::{Spectrum, SpectrumEntry};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt::Write as _;

/// Step-function coefficient `f`: value `values[i]` on `[breaks[i], breaks[i + 1])`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StepFunction {
    pub breaks: Vec<f64>,
    pub values: Vec<[f64; 2]>,
}

impl StepFunction {
    pub fn new(breaks: Vec<f64>, values: Vec<[f64; 2]>) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::InvalidArgument("step function needs one value per interval".into()));
        }
        if breaks[0] < 0.0 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument("step function breaks must be increasing from x >= 0".into()));
        }
        Ok(Self { breaks, values })
    }

    /// Right end of the last interval carrying a nonzero value.
    pub fn support(&self) -> f64 {
        self.values
            .iter()
            .enumerate()
            .rev()
            .find(|(_, v)| v[0] != 0.0 || v[1] != 0.0)
            .map_or(0.0, |(i, _)| self.breaks[i + 1])
    }
}

/// An element `F` of the de Branges space, described by how to evaluate it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SampleSource {
    /// `F = K_l(., w0)`.
    KernelSection { l: f64, w0: C64 },
    /// `F(z) = int u(z)^t H f`, with `f` claimed to vanish beyond `claimed_support`.
    Coefficient { f: StepFunction, claimed_support: Option<f64> },
    /// `F = sum c_k F_k`.
    Combination(Vec<(C64, SampleSource)>),
}

impl SampleSource {
    /// Smallest `a` with `F` in `B_a`.
    pub fn support(&self) -> f64 {
        match self {
            SampleSource::KernelSection { l, .. } => *l,
            SampleSource::Coefficient { f, claimed_support } => claimed_support.unwrap_or_else(|| f.support()),
            SampleSource::Combination(parts) => parts.iter().map(|(_, s)| s.support()).fold(0.0, f64::max),
        }
    }

    fn validate(&self, b: f64) -> Result<()> {
        match self {
            SampleSource::KernelSection { l, .. } if !(*l > 0.0 && *l <= b * (1.0 + 1e-12)) => {
                Err(Error::InvalidArgument(format!("kernel section length {l} outside (0, {b}]")))
            }
            SampleSource::Coefficient { f, claimed_support } => {
                let support = f.support();
                if support > b * (1.0 + 1e-12) {
                    return Err(Error::SupportViolation { support });
                }
                match claimed_support {
                    Some(a) if support > *a => Err(Error::SupportViolation { support }),
                    _ => Ok(()),
                }
            }
            SampleSource::Combination(parts) => parts.iter().try_for_each(|(_, s)| s.validate(b)),
            _ => Ok(()),
        }
    }

    /// `F(z)`.
    pub fn evaluate<S: SolutionSource + ?Sized>(&self, src: &S, z: C64) -> Result<C64> {
        match self {
            SampleSource::KernelSection { l, w0 } => Ok(kernels::reproducing_kernel(src, *l, z, *w0)?.value),
            SampleSource::Coefficient { f, .. } => {
                let h = src.hamiltonian();
                let mut total = C64::new(0.0, 0.0);
                for (w, v) in f.breaks.windows(2).zip(&f.values) {
                    if v[0] == 0.0 && v[1] == 0.0 {
                        continue;
                    }
                    let fv: Vec2 = [C64::new(v[0], 0.0), C64::new(v[1], 0.0)];
                    let p = kernels::panels(h, w[0], w[1], z.norm(), 2.0);
                    total += quadrature::integrate_batched(&p, kernels::QUAD_TOL, |xs| {
                        let u = src.solve_many(z, xs)?;
                        Ok(xs.iter().zip(&u).map(|(&x, u)| h.matrix_at(x).bilinear(u, &fv)).collect())
                    })?;
                }
                Ok(total)
            }
            SampleSource::Combination(parts) => {
                parts.iter().try_fold(C64::new(0.0, 0.0), |acc, (c, s)| Ok(acc + c * s.evaluate(src, z)?))
            }
        }
    }
}

/// `p` in `(2, inf]`; serialized as a number or the string `"inf"`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PExponent(pub f64);

impl PExponent {
    pub const INFINITY: PExponent = PExponent(f64::INFINITY);

    /// Dual exponent `q = p / (p - 1)`.
    pub fn dual(self) -> f64 {
        if self.0.is_infinite() {
            1.0
        } else {
            self.0 / (self.0 - 1.0)
        }
    }
}

impl Serialize for PExponent {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        if self.0.is_infinite() {
            s.serialize_str("inf")
        } else {
            s.serialize_f64(self.0)
        }
    }
}

impl<'de> Deserialize<'de> for PExponent {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Name(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(p) => Ok(PExponent(p)),
            Raw::Name(s) if matches!(s.as_str(), "inf" | "infinity" | "Infinity") => Ok(PExponent::INFINITY),
            Raw::Name(s) => Err(serde::de::Error::custom(format!("invalid exponent {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum NoiseMode {
    /// Uniform magnitudes and phases, rescaled onto the weighted `l_p` sphere.
    Random { seed: u64 },
    /// `eps_n = epsilon K(lambda_n, lambda_n)^{1/2} conj(phase(kernel(z0, lambda_n)))`, `p = inf` only.
    Adversarial { z0: C64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseSpec {
    pub p: PExponent,
    pub epsilon: f64,
    pub mode: NoiseMode,
}

/// Where a sample set came from.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub source: SampleSource,
    pub noise: Option<NoiseSpec>,
}

/// Samples `F(lambda_n)` aligned with the entries of a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SampleSet {
    pub spectrum: Spectrum,
    pub values: Vec<C64>,
    pub provenance: Provenance,
}

impl SampleSet {
    /// Weighted noise `eps_n / K(lambda_n, lambda_n)^{1/2}` relative to the exact samples.
    pub fn weighted_difference(&self, exact: &SampleSet) -> Vec<C64> {
        self.values
            .iter()
            .zip(&exact.values)
            .zip(&self.spectrum.entries)
            .map(|((a, b), e)| (a - b) / e.k_diag.sqrt())
            .collect()
    }
}

/// Samples `F` at every eigenvalue of `spectrum`.
pub fn make_samples<S: SolutionSource + ?Sized>(src: &S, spectrum: &Spectrum, source: SampleSource) -> Result<SampleSet> {
    source.validate(spectrum.b)?;
    if let Some(e) = spectrum.entries.iter().find(|e| !(e.k_diag > 0.0)) {
        return Err(Error::InvalidArgument(format!("non-positive kernel diagonal at n = {}", e.n)));
    }
    let values = spectrum
        .entries
        .par_iter()
        .map(|e| source.evaluate(src, C64::new(e.lambda, 0.0)))
        .collect::<Result<Vec<_>>>()?;
    Ok(SampleSet { spectrum: spectrum.clone(), values, provenance: Provenance { source, noise: None } })
}

/// Which kernel a reconstruction or tail diagnostic uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Method {
    /// `K_b(z, lambda)`, the sampling formula.
    Sampling,
    /// `J(z, lambda)` for the given taper.
    Oversampling(TaperWeight),
}

fn kernel_matrix<S: SolutionSource + ?Sized>(src: &S, method: &Method, b: f64, zs: &[C64], lambdas: &[f64]) -> Result<Vec<Vec<C64>>> {
    match method {
        Method::Sampling => kernels::reproducing_matrix(src, b, zs, lambdas),
        Method::Oversampling(taper) => kernels::oversampling_matrix(src, taper, zs, lambdas),
    }
}

/// Indices of the entries with `|n| <= n_max` in the order `0, -1, 1, -2, 2, ...`.
fn truncation_order(spectrum: &Spectrum, n_max: usize) -> Result<Vec<usize>> {
    if spectrum.entries.is_empty() {
        return Ok(Vec::new());
    }
    let index_of = |n: i64| spectrum.entries.iter().position(|e| e.n == n);
    let mut order = Vec::with_capacity(2 * n_max + 1);
    for k in 0..=n_max as i64 {
        for n in if k == 0 { vec![0] } else { vec![-k, k] } {
            order.push(index_of(n).ok_or(Error::EnumerationGap { index: n.unsigned_abs() as usize })?);
        }
    }
    Ok(order)
}

/// Evaluation grid: `n_re x n_im` points of `[re_min, re_max] x [im_min, im_max]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
    pub n_re: usize,
    pub n_im: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Self { re_min: -5.0, re_max: 5.0, im_min: -1.0, im_max: 1.0, n_re: 51, n_im: 11 }
    }
}

impl Grid {
    pub fn points(&self) -> Vec<C64> {
        let axis = |lo: f64, hi: f64, n: usize, i: usize| if n <= 1 { 0.5 * (lo + hi) } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 };
        let mut out = Vec::with_capacity(self.n_re * self.n_im);
        for i in 0..self.n_re {
            for k in 0..self.n_im {
                out.push(C64::new(axis(self.re_min, self.re_max, self.n_re, i), axis(self.im_min, self.im_max, self.n_im, k)));
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.re_min, self.re_max, self.im_min, self.im_max].iter().all(|v| v.is_finite());
        if !finite || self.re_min > self.re_max || self.im_min > self.im_max || self.n_re == 0 || self.n_im == 0 {
            return Err(Error::InvalidArgument("grid needs finite ordered bounds and at least one point per axis".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReconstructionReport {
    pub method: Method,
    pub grid: Vec<C64>,
    pub truncation: usize,
    pub values: Vec<C64>,
    pub reference: Vec<C64>,
    pub sup_error: f64,
    /// Partial sums of `|kernel(z*, lambda_n)| / K(lambda_n, lambda_n)^{1/2}` in summation
    /// order, at the grid point `z*` where the full sum is largest.
    pub tail_sums: Vec<f64>,
    /// `max_z sum_n |kernel(z, lambda_n)| / K(lambda_n, lambda_n)^{1/2}`: the `l_inf` noise gain.
    pub stability_constant: f64,
    /// Envelope decay exponent of the terms behind `tail_sums` against `|lambda|`.
    pub decay_exponent: Option<f64>,
}

/// JSON-friendly summary of a report.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportSummary {
    pub sup_error: f64,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub tail_sum: f64,
    pub stability_constant: f64,
    pub decay_exponent: Option<f64>,
}

impl ReconstructionReport {
    /// CSV with columns `z_re, z_im, ref_re, ref_im, rec_re, rec_im, abs_err`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("z_re,z_im,ref_re,ref_im,rec_re,rec_im,abs_err\n");
        for ((z, r), v) in self.grid.iter().zip(&self.reference).zip(&self.values) {
            writeln!(s, "{:e},{:e},{:e},{:e},{:e},{:e},{:e}", z.re, z.im, r.re, r.im, v.re, v.im, (v - r).norm()).unwrap();
        }
        s
    }

    pub fn summary(&self) -> ReportSummary {
        ReportSummary {
            sup_error: self.sup_error,
            truncation: self.truncation,
            tail_sum: self.tail_sums.last().copied().unwrap_or(0.0),
            stability_constant: self.stability_constant,
            decay_exponent: self.decay_exponent,
        }
    }
}

/// `sum_{|n| <= N} kernel(z, lambda_n) F(lambda_n) / K_b(lambda_n, lambda_n)` on `grid`,
/// compared with the exact `F` of the samples' source.
pub fn reconstruct<S: SolutionSource + ?Sized>(
    src: &S,
    method: &Method,
    samples: &SampleSet,
    grid: &[C64],
    n_max: usize,
) -> Result<ReconstructionReport> {
    if let Method::Oversampling(taper) = method {
        let declared = samples.provenance.source.support();
        if declared > taper.a * (1.0 + 1e-12) {
            return Err(Error::SubspaceMismatch { declared, taper_a: taper.a });
        }
    }
    let spectrum = &samples.spectrum;
    let order = truncation_order(spectrum, n_max)?;
    let lambdas: Vec<f64> = order.iter().map(|&i| spectrum.entries[i].lambda).collect();
    let weights: Vec<f64> = order.iter().map(|&i| spectrum.entries[i].k_diag).collect();
    let sample: Vec<C64> = order.iter().map(|&i| samples.values[i]).collect();
    let reference = grid
        .par_iter()
        .map(|&z| samples.provenance.source.evaluate(src, z))
        .collect::<Result<Vec<_>>>()?;
    let matrix = if lambdas.is_empty() { vec![Vec::new(); grid.len()] } else { kernel_matrix(src, method, spectrum.b, grid, &lambdas)? };
    let values: Vec<C64> = matrix
        .iter()
        .map(|row| row.iter().zip(&sample).zip(&weights).map(|((k, f), w)| k * f / w).sum())
        .collect();
    let gains: Vec<Vec<f64>> = matrix
        .iter()
        .map(|row| row.iter().zip(&weights).map(|(k, w)| k.norm() / w.sqrt()).collect())
        .collect();
    let worst = gains
        .iter()
        .map(|g| g.iter().sum::<f64>())
        .enumerate()
        .fold((0, -1.0), |acc, (i, s)| if s > acc.1 { (i, s) } else { acc })
        .0;
    let (tail_sums, decay_exponent) = match gains.get(worst) {
        Some(g) => {
            let pts: Vec<(f64, f64)> = lambdas.iter().map(|l| l.abs()).zip(g.iter().copied()).collect();
            (partial_sums(g), fit_decay_exponent(&pts, None))
        }
        None => (Vec::new(), None),
    };
    let sup_error = values.iter().zip(&reference).map(|(v, r)| (v - r).norm()).fold(0.0, f64::max);
    Ok(ReconstructionReport {
        method: *method,
        grid: grid.to_vec(),
        truncation: n_max,
        values,
        reference,
        sup_error,
        stability_constant: tail_sums.last().copied().unwrap_or(0.0),
        tail_sums,
        decay_exponent,
    })
}

/// The sampling formula with `K_b`.
pub fn reconstruct_sampling<S: SolutionSource + ?Sized>(src: &S, samples: &SampleSet, grid: &[C64], n_max: usize) -> Result<ReconstructionReport> {
    reconstruct(src, &Method::Sampling, samples, grid, n_max)
}

/// The oversampling formula with `J` for `taper`.
pub fn reconstruct_oversampling<S: SolutionSource + ?Sized>(
    src: &S,
    taper: &TaperWeight,
    samples: &SampleSet,
    grid: &[C64],
    n_max: usize,
) -> Result<ReconstructionReport> {
    reconstruct(src, &Method::Oversampling(*taper), samples, grid, n_max)
}

/// Adds noise with `|| eps_n / K(lambda_n, lambda_n)^{1/2} ||_p = epsilon` over all entries.
/// Adversarial noise aligns with `kernel(z0, .)` for `method`.
pub fn perturb<S: SolutionSource + ?Sized>(src: &S, method: &Method, samples: &SampleSet, noise: NoiseSpec) -> Result<SampleSet> {
    let p = noise.p.0;
    if !(p > 2.0) {
        return Err(Error::UnsupportedP { p });
    }
    if !(noise.epsilon >= 0.0) || !noise.epsilon.is_finite() {
        return Err(Error::InvalidArgument(format!("noise level {} must be finite and >= 0", noise.epsilon)));
    }
    let entries = &samples.spectrum.entries;
    let weighted: Vec<C64> = match noise.mode {
        NoiseMode::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let raw: Vec<C64> = entries
                .iter()
                .map(|_| {
                    let r: f64 = rng.random();
                    let phase: f64 = rng.random::<f64>() * std::f64::consts::TAU;
                    C64::from_polar(r, phase)
                })
                .collect();
            let norm = lp_norm(&raw, p);
            let scale = if norm > 0.0 { noise.epsilon / norm } else { 0.0 };
            raw.into_iter().map(|v| v * scale).collect()
        }
        NoiseMode::Adversarial { z0 } => {
            if p.is_finite() {
                return Err(Error::UnsupportedP { p });
            }
            let lambdas: Vec<f64> = entries.iter().map(|e| e.lambda).collect();
            let row = kernel_matrix(src, method, samples.spectrum.b, &[z0], &lambdas)?.remove(0);
            row.iter()
                .map(|k| if k.norm() > 0.0 { k.conj() / k.norm() * noise.epsilon } else { C64::new(noise.epsilon, 0.0) })
                .collect()
        }
    };
    let values = samples
        .values
        .iter()
        .zip(entries)
        .zip(&weighted)
        .map(|((f, e), w)| f + w * e.k_diag.sqrt())
        .collect();
    Ok(SampleSet {
        spectrum: samples.spectrum.clone(),
        values,
        provenance: Provenance { source: samples.provenance.source.clone(), noise: Some(noise) },
    })
}

/// `(sum |v|^p)^{1/p}`, or `max |v|` for `p = inf`.
pub fn lp_norm(v: &[C64], p: f64) -> f64 {
    if p.is_infinite() {
        v.iter().map(|x| x.norm()).fold(0.0, f64::max)
    } else {
        v.iter().map(|x| x.norm().powf(p)).sum::<f64>().powf(1.0 / p)
    }
}

fn partial_sums(terms: &[f64]) -> Vec<f64> {
    terms
        .iter()
        .scan(0.0, |acc, t| {
            *acc += t;
            Some(*acc)
        })
        .collect()
}

/// Terms `(|kernel(z, lambda_n)| / K(lambda_n, lambda_n)^{1/2})^q` ordered by `|lambda_n|`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailDiagnostic {
    pub z: C64,
    pub q: f64,
    pub n: Vec<i64>,
    pub abs_lambda: Vec<f64>,
    pub terms: Vec<f64>,
    pub partial_sums: Vec<f64>,
    pub decay_exponent: Option<f64>,
}

impl TailDiagnostic {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Envelope decay exponent restricted to `|lambda|` in `[lo, hi]`.
    pub fn decay_exponent_in(&self, lo: f64, hi: f64) -> Option<f64> {
        let pts: Vec<(f64, f64)> = self.abs_lambda.iter().copied().zip(self.terms.iter().copied()).collect();
        fit_decay_exponent(&pts, Some((lo, hi)))
    }

    /// Estimated remainder of the series beyond the last computed term, from the
    /// geometric ratio of the sums over the last two octaves of `|lambda|`.
    /// `None` when those sums do not shrink.
    pub fn extrapolated_remainder(&self) -> Option<f64> {
        let top = *self.abs_lambda.last()?;
        let block = |lo: f64, hi: f64| -> f64 {
            self.abs_lambda.iter().zip(&self.terms).filter(|(l, _)| **l > lo && **l <= hi).map(|(_, t)| t).sum()
        };
        let last = block(top / 2.0, top);
        let prev = block(top / 4.0, top / 2.0);
        if !(prev > 0.0) {
            return None;
        }
        let r = last / prev;
        (r < 1.0).then(|| last * r / (1.0 - r))
    }

    /// Share of the (extrapolated) total contributed by terms with `|lambda| > cut`.
    pub fn tail_fraction(&self, cut: f64) -> Option<f64> {
        let rest = self.extrapolated_remainder()?;
        let beyond: f64 = self.abs_lambda.iter().zip(&self.terms).filter(|(l, _)| **l > cut).map(|(_, t)| t).sum();
        Some((beyond + rest) / (self.total() + rest))
    }
}

/// Partial sums of `(|kernel(z, lambda_n)| / K(lambda_n, lambda_n)^{1/2})^q` over the whole
/// spectrum ordered by `|lambda_n|`, with an envelope decay fit.
pub fn tail_diagnostic<S: SolutionSource + ?Sized>(src: &S, method: &Method, spectrum: &Spectrum, z: C64, q: f64) -> Result<TailDiagnostic> {
    if !(1.0..2.0).contains(&q) {
        return Err(Error::InvalidArgument(format!("dual exponent q = {q} must lie in [1, 2)")));
    }
    let mut entries: Vec<SpectrumEntry> = spectrum.entries.clone();
    entries.sort_by(|a, b| a.lambda.abs().total_cmp(&b.lambda.abs()).then(a.n.cmp(&b.n)));
    let lambdas: Vec<f64> = entries.iter().map(|e| e.lambda).collect();
    let row = if lambdas.is_empty() { Vec::new() } else { kernel_matrix(src, method, spectrum.b, &[z], &lambdas)?.remove(0) };
    let terms: Vec<f64> = row.iter().zip(&entries).map(|(k, e)| (k.norm() / e.k_diag.sqrt()).powf(q)).collect();
    let abs_lambda: Vec<f64> = lambdas.iter().map(|l| l.abs()).collect();
    let pts: Vec<(f64, f64)> = abs_lambda.iter().copied().zip(terms.iter().copied()).collect();
    Ok(TailDiagnostic {
        z,
        q,
        n: entries.iter().map(|e| e.n).collect(),
        partial_sums: partial_sums(&terms),
        decay_exponent: fit_decay_exponent(&pts, None),
        abs_lambda,
        terms,
    })
}

/// Slope of `log(envelope)` against `log(x)`, where the envelope is the largest value in
/// each of up to 12 logarithmic bins of `x` (restricted to `range` when given).
/// Oscillating terms with isolated zeros are fitted by their maxima this way.
pub fn fit_decay_exponent(points: &[(f64, f64)], range: Option<(f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .copied()
        .filter(|&(x, y)| x > 0.0 && y > 0.0 && range.is_none_or(|(lo, hi)| x >= lo && x <= hi))
        .collect();
    let lo = pts.iter().map(|p| p.0).fold(f64::INFINITY, f64::min);
    let hi = pts.iter().map(|p| p.0).fold(0.0, f64::max);
    if pts.len() < 4 || !(hi > lo * 1.5) {
        return None;
    }
    let bins = 12.min(pts.len() / 2);
    let width = (hi / lo).ln() / bins as f64;
    let mut best: Vec<Option<(f64, f64)>> = vec![None; bins];
    for &(x, y) in &pts {
        let k = (((x / lo).ln() / width) as usize).min(bins - 1);
        if best[k].is_none_or(|(_, by)| y > by) {
            best[k] = Some((x, y));
        }
    }
    let env: Vec<(f64, f64)> = best.into_iter().flatten().map(|(x, y)| (x.ln(), y.ln())).collect();
    if env.len() < 3 {
        return None;
    }
    Some(least_squares_slope(&env))
}

/// Ordinary least-squares slope of `y` on `x`.
pub fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}
