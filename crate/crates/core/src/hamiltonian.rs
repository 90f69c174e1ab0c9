//! Coefficient matrices `H` of canonical systems on `[0, b]`.
//!
//! A [`Hamiltonian`] is an ordered partition of `[0, b]` into [`Segment`]s, each
//! carrying a closed-form or tabulated description of `H(x)`. Construction
//! validates the partition and positivity, and records whether `H` is diagonal,
//! trace-normalized, and where its singular (indivisible) intervals are.

use crate::error::{Error, Result};
use crate::linalg::Sym2;
use crate::quadrature;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::sync::Arc;

/// Absolute tolerance on the smallest eigenvalue of `H(x)`.
pub const PSD_TOL: f64 = 1e-12;
/// `det H` below this (relative to `tr H^2`) counts as rank one.
pub const SINGULAR_DET_TOL: f64 = 1e-10;
/// Largest direction drift, in radians, inside one singular interval.
pub const SINGULAR_ANGLE_TOL: f64 = 1e-8;
const TRACE_TOL: f64 = 1e-10;
const POLY_SAMPLES: usize = 257;

/// A scalar profile on a segment: a polynomial in the global coordinate `x`, or
/// samples joined by straight lines. Samples without explicit abscissae are
/// spread uniformly over the segment.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Profile {
    Polynomial {
        poly: Vec<f64>,
    },
    Samples {
        samples: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        x: Vec<f64>,
    },
}

impl Profile {
    fn eval(&self, t: f64) -> f64 {
        match self {
            Profile::Polynomial { poly } => poly_eval(poly, t),
            Profile::Samples { samples, x } => interpolate(x, samples, t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum SegmentKind {
    /// `H = diag(1/2 + g0, 1/2 - g0)` with `|g0| < 1/2`.
    ConstantDiagonal { g0: f64 },
    /// `H = diag(1/2 + g(x), 1/2 - g(x))` with `|g| <= 1/2`.
    DiagonalFunction { g: Profile },
    /// `H = diag(p1(x), p2(x))` for polynomials in `x` (coefficients in ascending order).
    PolynomialDiagonal { h1: Vec<f64>, h2: Vec<f64> },
    /// Piecewise-linear `h1, h2, h3` through tabulated values.
    GridGeneral {
        h1: Vec<f64>,
        h2: Vec<f64>,
        h3: Vec<f64>,
        #[serde(default, skip_serializing_if = "Vec::is_empty")]
        x: Vec<f64>,
    },
    /// `H(x(y)) / tr H(x(y))` for a source segment, produced by trace normalization.
    #[serde(skip)]
    Reparametrized(Reparametrized),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Reparametrized {
    source: Arc<Segment>,
    y_from: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Segment {
    pub from: f64,
    pub to: f64,
    #[serde(flatten)]
    pub kind: SegmentKind,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SingularInterval {
    pub from: f64,
    pub to: f64,
    /// Type of the interval, in `[0, pi)`: `H` is a multiple of `xi_phi xi_phi^t` there.
    pub phi: f64,
}

fn poly_eval(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

fn poly_antiderivative(c: &[f64], x: f64) -> f64 {
    c.iter()
        .enumerate()
        .rev()
        .fold(0.0, |acc, (k, &a)| acc * x + a / (k + 1) as f64)
        * x
}

fn interpolate(xs: &[f64], v: &[f64], t: f64) -> f64 {
    let i = xs.partition_point(|&p| p <= t).clamp(1, xs.len() - 1) - 1;
    let w = (t - xs[i]) / (xs[i + 1] - xs[i]);
    v[i] + w * (v[i + 1] - v[i])
}

/// `int_{xs[0]}^{t} v` for the piecewise-linear interpolant.
fn interpolate_integral(xs: &[f64], v: &[f64], t: f64) -> f64 {
    let mut acc = 0.0;
    for i in 0..xs.len() - 1 {
        if t <= xs[i] {
            break;
        }
        let hi = t.min(xs[i + 1]);
        acc += 0.5 * (hi - xs[i]) * (v[i] + interpolate(xs, v, hi));
    }
    acc
}

fn uniform_nodes(from: f64, to: f64, n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| {
            if i + 1 == n {
                to
            } else {
                from + (to - from) * i as f64 / (n - 1) as f64
            }
        })
        .collect()
}

impl Segment {
    pub fn new(from: f64, to: f64, kind: SegmentKind) -> Self {
        Self { from, to, kind }
    }

    pub fn length(&self) -> f64 {
        self.to - self.from
    }

    pub fn matrix(&self, x: f64) -> Sym2 {
        match &self.kind {
            SegmentKind::ConstantDiagonal { g0 } => Sym2::diag(0.5 + g0, 0.5 - g0),
            SegmentKind::DiagonalFunction { g } => {
                let g = g.eval(x);
                Sym2::diag(0.5 + g, 0.5 - g)
            }
            SegmentKind::PolynomialDiagonal { h1, h2 } => Sym2::diag(poly_eval(h1, x), poly_eval(h2, x)),
            SegmentKind::GridGeneral { h1, h2, h3, x: xs } => Sym2::new(
                interpolate(xs, h1, x),
                interpolate(xs, h2, x),
                interpolate(xs, h3, x),
            ),
            SegmentKind::Reparametrized(r) => {
                let src = r.source.x_at_trace(x - r.y_from);
                let m = r.source.matrix(src);
                let tr = m.trace();
                if tr > f64::MIN_POSITIVE {
                    m.scaled(1.0 / tr)
                } else {
                    m
                }
            }
        }
    }

    /// `H` when it does not depend on `x`.
    pub fn constant_matrix(&self) -> Option<Sym2> {
        match &self.kind {
            SegmentKind::ConstantDiagonal { g0 } => Some(Sym2::diag(0.5 + g0, 0.5 - g0)),
            SegmentKind::DiagonalFunction { g: Profile::Polynomial { poly } } if poly.len() <= 1 => {
                Some(self.matrix(self.from))
            }
            SegmentKind::PolynomialDiagonal { h1, h2 } if h1.len() <= 1 && h2.len() <= 1 => {
                Some(self.matrix(self.from))
            }
            SegmentKind::Reparametrized(r) => r.source.constant_matrix().map(|m| {
                let tr = m.trace();
                m.scaled(1.0 / tr)
            }),
            _ => None,
        }
    }

    pub fn is_diagonal(&self) -> bool {
        match &self.kind {
            SegmentKind::GridGeneral { h3, .. } => h3.iter().all(|&v| v == 0.0),
            SegmentKind::Reparametrized(r) => r.source.is_diagonal(),
            _ => true,
        }
    }

    /// Segment end points together with interior kinks of tabulated profiles.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut pts = vec![self.from];
        let inner: Vec<f64> = match &self.kind {
            SegmentKind::DiagonalFunction { g: Profile::Samples { x, .. } } => x.clone(),
            SegmentKind::GridGeneral { x, .. } => x.clone(),
            SegmentKind::Reparametrized(r) => {
                let y0 = r.y_from;
                r.source
                    .breakpoints()
                    .into_iter()
                    .map(|p| y0 + r.source.trace_integral(p))
                    .collect()
            }
            _ => Vec::new(),
        };
        pts.extend(inner.into_iter().filter(|&p| p > self.from + 1e-14 && p < self.to - 1e-14));
        pts.push(self.to);
        pts
    }

    /// `int_from^x tr H`.
    pub fn trace_integral(&self, x: f64) -> f64 {
        match &self.kind {
            SegmentKind::ConstantDiagonal { .. }
            | SegmentKind::DiagonalFunction { .. }
            | SegmentKind::Reparametrized(_) => x - self.from,
            SegmentKind::PolynomialDiagonal { h1, h2 } => {
                poly_antiderivative(h1, x) + poly_antiderivative(h2, x)
                    - poly_antiderivative(h1, self.from)
                    - poly_antiderivative(h2, self.from)
            }
            SegmentKind::GridGeneral { h1, h2, x: xs, .. } => {
                let base = interpolate_integral(xs, h1, self.from) + interpolate_integral(xs, h2, self.from);
                interpolate_integral(xs, h1, x) + interpolate_integral(xs, h2, x) - base
            }
        }
    }

    /// Inverse of [`Segment::trace_integral`]: bisection safeguarded Newton.
    pub fn x_at_trace(&self, t: f64) -> f64 {
        match &self.kind {
            SegmentKind::ConstantDiagonal { .. }
            | SegmentKind::DiagonalFunction { .. }
            | SegmentKind::Reparametrized(_) => return self.from + t,
            _ => {}
        }
        let total = self.trace_integral(self.to);
        if t <= 0.0 {
            return self.from;
        }
        if t >= total {
            return self.to;
        }
        let (mut lo, mut hi) = (self.from, self.to);
        let mut x = self.from + self.length() * t / total;
        for _ in 0..200 {
            let f = self.trace_integral(x) - t;
            if f.abs() <= 1e-15 * total.max(1.0) {
                return x;
            }
            if f > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let d = self.matrix(x).trace();
            let newton = x - f / d;
            x = if d > 0.0 && newton > lo && newton < hi {
                newton
            } else {
                0.5 * (lo + hi)
            };
            if hi - lo <= 4.0 * f64::EPSILON * hi.abs().max(1.0) {
                break;
            }
        }
        x
    }

    /// Points used for positivity and singularity checks.
    pub fn sample_points(&self) -> Vec<f64> {
        if self.constant_matrix().is_some() {
            return vec![self.from, self.to];
        }
        match &self.kind {
            SegmentKind::DiagonalFunction { g: Profile::Samples { .. } } | SegmentKind::GridGeneral { .. } => {
                self.breakpoints()
            }
            _ => uniform_nodes(self.from, self.to, POLY_SAMPLES),
        }
    }

    /// Upper bound of `sqrt(det H)` on the segment; the oscillation rate of `u(z, .)` per unit `|z|`.
    pub fn rate_bound(&self) -> f64 {
        if let Some(m) = self.constant_matrix() {
            return m.det().max(0.0).sqrt();
        }
        // sqrt(det) <= tr / 2, and the trace bound is robust between samples.
        self.sample_points()
            .iter()
            .map(|&x| 0.5 * self.matrix(x).trace())
            .fold(0.0, f64::max)
    }

    /// Whether every sample of `H` is rank one with a common direction; returns the type.
    fn singular_type(&self, pts: &[f64]) -> Option<f64> {
        let mut phi: Option<f64> = None;
        for &x in pts {
            let m = self.matrix(x);
            let tr = m.trace();
            if tr <= 1e-14 || m.det() > SINGULAR_DET_TOL * tr.max(1.0).powi(2) {
                return None;
            }
            let p = m.rank_one_angle();
            match phi {
                None => phi = Some(p),
                Some(q) => {
                    let d = (p - q).rem_euclid(PI);
                    if d.min(PI - d) > SINGULAR_ANGLE_TOL {
                        return None;
                    }
                }
            }
        }
        phi
    }

    fn singular_intervals(&self) -> Vec<SingularInterval> {
        match &self.kind {
            SegmentKind::DiagonalFunction { g: Profile::Samples { .. } } | SegmentKind::GridGeneral { .. } => {
                let bp = self.breakpoints();
                bp.windows(2)
                    .filter_map(|w| {
                        self.singular_type(&[w[0], 0.5 * (w[0] + w[1]), w[1]])
                            .map(|phi| SingularInterval { from: w[0], to: w[1], phi })
                    })
                    .collect()
            }
            _ => self
                .singular_type(&self.sample_points())
                .map(|phi| SingularInterval { from: self.from, to: self.to, phi })
                .into_iter()
                .collect(),
        }
    }

    /// Fills implicit uniform abscissae and checks local well-formedness.
    fn normalize(mut self) -> Result<Self> {
        let (from, to) = (self.from, self.to);
        let bad = |reason: &str| Error::InvalidSegment { from, to, reason: reason.to_string() };
        if !(from.is_finite() && to.is_finite()) || to <= from {
            return Err(bad("segment must have positive length"));
        }
        let fix_nodes = |x: &mut Vec<f64>, n: usize| -> Result<()> {
            if n < 2 {
                return Err(bad("tabulated profile needs at least two samples"));
            }
            if x.is_empty() {
                *x = uniform_nodes(from, to, n);
            }
            if x.len() != n {
                return Err(bad("abscissae and samples differ in length"));
            }
            if x.windows(2).any(|w| w[1] <= w[0]) || x[0] > from + 1e-12 || x[n - 1] < to - 1e-12 {
                return Err(bad("abscissae must increase and cover the segment"));
            }
            Ok(())
        };
        match &mut self.kind {
            SegmentKind::ConstantDiagonal { g0 } => {
                if !(g0.abs() < 0.5) {
                    return Err(bad("constant_diagonal needs |g0| < 1/2"));
                }
            }
            SegmentKind::DiagonalFunction { g } => match g {
                Profile::Polynomial { poly } => {
                    if poly.is_empty() {
                        return Err(bad("empty polynomial"));
                    }
                }
                Profile::Samples { samples, x } => fix_nodes(x, samples.len())?,
            },
            SegmentKind::PolynomialDiagonal { h1, h2 } => {
                if h1.is_empty() || h2.is_empty() {
                    return Err(bad("empty polynomial"));
                }
            }
            SegmentKind::GridGeneral { h1, h2, h3, x } => {
                if h1.len() != h2.len() || h1.len() != h3.len() {
                    return Err(bad("h1, h2, h3 grids differ in length"));
                }
                fix_nodes(x, h1.len())?;
            }
            SegmentKind::Reparametrized(_) => {}
        }
        let pts = self.sample_points();
        if let SegmentKind::DiagonalFunction { g } = &self.kind {
            if let Some(&x) = pts.iter().find(|&&x| g.eval(x).abs() > 0.5 + PSD_TOL) {
                return Err(Error::NonPositiveSemidefinite {
                    x,
                    eigenvalue: 0.5 - g.eval(x).abs(),
                });
            }
        }
        let mut max_trace: f64 = 0.0;
        for &x in &pts {
            let m = self.matrix(x);
            if !(m.h1.is_finite() && m.h2.is_finite() && m.h3.is_finite()) {
                return Err(bad("non-finite entry"));
            }
            let e = m.min_eigenvalue();
            if e < -PSD_TOL {
                return Err(Error::NonPositiveSemidefinite { x, eigenvalue: e });
            }
            max_trace = max_trace.max(m.trace());
        }
        if max_trace <= 1e-14 {
            return Err(Error::ZeroHamiltonian { from, to });
        }
        Ok(self)
    }
}

/// A validated coefficient matrix on `[0, b]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    segments: Vec<Segment>,
    diagonal: bool,
    trace_normalized: bool,
    singular: Vec<SingularInterval>,
}

/// Result of [`Hamiltonian::trace_normalize`].
#[derive(Clone, Debug)]
pub struct TraceNormalization {
    pub hamiltonian: Hamiltonian,
    pub map: TraceMap,
}

/// The change of variables `y(x) = int_0^x tr H` and its inverse.
#[derive(Clone, Debug)]
pub struct TraceMap {
    pieces: Vec<(f64, f64, f64, f64, Arc<Segment>)>,
}

impl TraceMap {
    fn identity(h: &Hamiltonian) -> Self {
        let pieces = h
            .segments
            .iter()
            .map(|s| {
                let mut unit = s.clone();
                unit.kind = SegmentKind::ConstantDiagonal { g0: 0.0 };
                (s.from, s.to, s.from, s.to, Arc::new(unit))
            })
            .collect();
        Self { pieces }
    }

    pub fn y_of_x(&self, x: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.1 < x).min(self.pieces.len() - 1);
        let (x0, x1, y0, _, ref s) = self.pieces[i];
        y0 + s.trace_integral(x.clamp(x0, x1))
    }

    pub fn x_of_y(&self, y: f64) -> f64 {
        let i = self.pieces.partition_point(|p| p.3 < y).min(self.pieces.len() - 1);
        let (_, _, y0, y1, ref s) = self.pieces[i];
        s.x_at_trace(y.clamp(y0, y1) - y0)
    }
}

impl Hamiltonian {
    /// Validates a segment list; segments must tile `[0, b]` in order.
    pub fn new(segments: Vec<Segment>) -> Result<Self> {
        let b = segments.last().map_or(0.0, |s| s.to);
        if segments.is_empty() || !(b > 0.0) {
            return Err(Error::EmptyDomain { b });
        }
        let tol = 1e-12 * b.max(1.0);
        if segments[0].from.abs() > tol {
            return Err(Error::GapInPartition { at: 0.0 });
        }
        for w in segments.windows(2) {
            if (w[0].to - w[1].from).abs() > tol {
                return Err(Error::GapInPartition { at: w[0].to });
            }
        }
        let mut segments = segments
            .into_iter()
            .map(Segment::normalize)
            .collect::<Result<Vec<_>>>()?;
        segments[0].from = 0.0;
        for i in 1..segments.len() {
            segments[i].from = segments[i - 1].to;
        }
        let diagonal = segments.iter().all(Segment::is_diagonal);
        let trace_normalized = segments.iter().all(|s| {
            s.sample_points()
                .iter()
                .all(|&x| (s.matrix(x).trace() - 1.0).abs() <= TRACE_TOL)
        });
        let mut h = Self { segments, diagonal, trace_normalized, singular: Vec::new() };
        h.singular = h.detect_singular_intervals();
        Ok(h)
    }

    /// `diag(1/2 + g0, 1/2 - g0)` on `[0, b]`.
    pub fn constant_diagonal(g0: f64, b: f64) -> Result<Self> {
        Self::new(vec![Segment::new(0.0, b, SegmentKind::ConstantDiagonal { g0 })])
    }

    /// `diag(1, x)` on `[0, b]`.
    pub fn airy(b: f64) -> Result<Self> {
        Self::new(vec![Segment::new(
            0.0,
            b,
            SegmentKind::PolynomialDiagonal { h1: vec![1.0], h2: vec![0.0, 1.0] },
        )])
    }

    pub fn length(&self) -> f64 {
        self.segments[self.segments.len() - 1].to
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn is_diagonal(&self) -> bool {
        self.diagonal
    }

    pub fn is_trace_normalized(&self) -> bool {
        self.trace_normalized
    }

    pub fn singular_intervals(&self) -> &[SingularInterval] {
        &self.singular
    }

    pub fn segment_index(&self, x: f64) -> usize {
        self.segments.partition_point(|s| s.to < x).min(self.segments.len() - 1)
    }

    pub fn matrix_at(&self, x: f64) -> Sym2 {
        self.segments[self.segment_index(x)].matrix(x)
    }

    /// Maximal intervals on which `H` is a fixed rank-one projector direction.
    pub fn detect_singular_intervals(&self) -> Vec<SingularInterval> {
        let mut out: Vec<SingularInterval> = Vec::new();
        for s in &self.segments {
            for iv in s.singular_intervals() {
                if let Some(last) = out.last_mut() {
                    let d = (last.phi - iv.phi).rem_euclid(PI);
                    if (last.to - iv.from).abs() <= 1e-12 && d.min(PI - d) <= SINGULAR_ANGLE_TOL {
                        last.to = iv.to;
                        continue;
                    }
                }
                out.push(iv);
            }
        }
        out
    }

    /// Whether `x` lies in the interior or at the edge of a singular interval.
    pub fn is_regular_point(&self, x: f64) -> bool {
        !self.singular.iter().any(|s| x > s.from + 1e-12 && x < s.to - 1e-12)
    }

    /// Exponential type of the subspace `B_l`: `int_0^l sqrt(det H)`.
    pub fn exponential_type(&self, l: f64) -> Result<f64> {
        if !(l > 0.0 && l <= self.length() * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("l = {l} outside (0, {}]", self.length())));
        }
        let mut total = 0.0;
        for s in &self.segments {
            if s.from >= l {
                break;
            }
            let hi = s.to.min(l);
            total += match (&s.kind, s.constant_matrix()) {
                (SegmentKind::ConstantDiagonal { g0 }, _) => 0.5 * (1.0 - 4.0 * g0 * g0).sqrt() * (hi - s.from),
                (_, Some(m)) => m.det().max(0.0).sqrt() * (hi - s.from),
                _ => {
                    let bp = s.breakpoints();
                    bp.windows(2)
                        .filter(|w| w[0] < hi)
                        .map(|w| {
                            quadrature::adaptive(&|x| s.matrix(x).det().max(0.0).sqrt(), w[0], w[1].min(hi), 1e-14)
                        })
                        .sum()
                }
            };
        }
        Ok(total)
    }

    /// `int_0^l tr H`.
    pub fn trace_integral(&self, l: f64) -> f64 {
        self.segments
            .iter()
            .filter(|s| s.from < l)
            .map(|s| s.trace_integral(s.to.min(l)))
            .sum()
    }

    /// The same Hamiltonian on `[0, l]`.
    pub fn restrict(&self, l: f64) -> Result<Self> {
        if !(l > 0.0 && l <= self.length() * (1.0 + 1e-12)) {
            return Err(Error::InvalidArgument(format!("l = {l} outside (0, {}]", self.length())));
        }
        if (l - self.length()).abs() <= 1e-14 * l.max(1.0) {
            return Ok(self.clone());
        }
        let mut segments: Vec<Segment> = self.segments.iter().filter(|s| s.from < l).cloned().collect();
        if let Some(last) = segments.last_mut() {
            last.to = l;
        }
        Self::new(segments)
    }

    /// Reparametrizes by `y = int_0^x tr H` so that the result has unit trace.
    pub fn trace_normalize(&self) -> TraceNormalization {
        if self.trace_normalized {
            return TraceNormalization { hamiltonian: self.clone(), map: TraceMap::identity(self) };
        }
        let mut y = 0.0;
        let mut segments = Vec::with_capacity(self.segments.len());
        let mut pieces = Vec::with_capacity(self.segments.len());
        for s in &self.segments {
            let y_to = y + s.trace_integral(s.to);
            let source = Arc::new(s.clone());
            let kind = match s.constant_matrix() {
                Some(m) => {
                    let m = m.scaled(1.0 / m.trace());
                    if m.h3 == 0.0 && m.h1 > 0.0 && m.h2 > 0.0 {
                        SegmentKind::ConstantDiagonal { g0: 0.5 * (m.h1 - m.h2) }
                    } else if m.h3 == 0.0 {
                        SegmentKind::PolynomialDiagonal { h1: vec![m.h1], h2: vec![m.h2] }
                    } else {
                        SegmentKind::GridGeneral {
                            h1: vec![m.h1; 2],
                            h2: vec![m.h2; 2],
                            h3: vec![m.h3; 2],
                            x: vec![y, y_to],
                        }
                    }
                }
                None => SegmentKind::Reparametrized(Reparametrized { source: source.clone(), y_from: y }),
            };
            segments.push(Segment::new(y, y_to, kind));
            pieces.push((s.from, s.to, y, y_to, source));
            y = y_to;
        }
        let hamiltonian = Hamiltonian::new(segments).expect("normalization preserves validity");
        TraceNormalization { hamiltonian, map: TraceMap { pieces } }
    }
}

/// Validates raw segments; alias of [`Hamiltonian::new`].
pub fn validate(segments: Vec<Segment>) -> Result<Hamiltonian> {
    Hamiltonian::new(segments)
}
