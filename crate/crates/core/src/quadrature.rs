//! Gauss-Legendre quadrature with order doubling, plus a bisection-adaptive rule
//! for integrands with endpoint singularities such as `sqrt(x)`.

use crate::error::{Error, Result};
use crate::linalg::C64;
use gauss_quad::legendre::GaussLegendre;
use std::num::NonZeroUsize;
use std::sync::OnceLock;

const MIN_ORDER_LOG2: usize = 2;
const MAX_ORDER_LOG2: usize = 9;
const RULES: usize = MAX_ORDER_LOG2 - MIN_ORDER_LOG2 + 1;

static CACHE: [OnceLock<Vec<(f64, f64)>>; RULES] = [const { OnceLock::new() }; RULES];

/// Gauss-Legendre nodes and weights on `[-1, 1]`, sorted by node. `order` is
/// rounded up to a power of two between 4 and 512.
pub fn rule(order: usize) -> &'static [(f64, f64)] {
    let log2 = order
        .next_power_of_two()
        .trailing_zeros()
        .clamp(MIN_ORDER_LOG2 as u32, MAX_ORDER_LOG2 as u32) as usize;
    CACHE[log2 - MIN_ORDER_LOG2].get_or_init(|| {
        let n = NonZeroUsize::new(1 << log2).unwrap();
        let mut pairs = GaussLegendre::new(n).as_node_weight_pairs().to_vec();
        pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
        pairs
    })
}

/// Splits `[a, b]` into equal panels whose width times `rate` is at most `max_phase`.
pub fn panelize(a: f64, b: f64, rate: f64, max_phase: f64, out: &mut Vec<(f64, f64)>) {
    if b <= a {
        return;
    }
    let n = ((b - a) * rate / max_phase).ceil().max(1.0) as usize;
    let h = (b - a) / n as f64;
    for i in 0..n {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
        out.push((lo, hi));
    }
}

/// Nodes and weights of the composite rule of the given order over `panels`.
/// Nodes come out sorted when the panels are sorted and disjoint.
pub fn composite(panels: &[(f64, f64)], order: usize) -> (Vec<f64>, Vec<f64>) {
    let r = rule(order);
    let mut nodes = Vec::with_capacity(panels.len() * r.len());
    let mut weights = Vec::with_capacity(panels.len() * r.len());
    for &(lo, hi) in panels {
        let mid = 0.5 * (lo + hi);
        let half = 0.5 * (hi - lo);
        for &(t, w) in r {
            nodes.push(mid + half * t);
            weights.push(half * w);
        }
    }
    (nodes, weights)
}

/// Integrates a complex integrand that is evaluated in batches over sorted nodes.
///
/// The order is doubled from 16 until two successive estimates agree to `tol`
/// relative to the L1 mass of the integrand. When the largest rule is reached
/// without agreement every panel is bisected and the process restarts.
pub fn integrate_batched<F>(panels: &[(f64, f64)], tol: f64, mut f: F) -> Result<C64>
where
    F: FnMut(&[f64]) -> Result<Vec<C64>>,
{
    if panels.is_empty() {
        return Ok(C64::new(0.0, 0.0));
    }
    let mut panels = panels.to_vec();
    for _ in 0..4 {
        let mut previous: Option<C64> = None;
        for log2 in 4..=MAX_ORDER_LOG2 {
            let (nodes, weights) = composite(&panels, 1 << log2);
            let values = f(&nodes)?;
            let mut sum = C64::new(0.0, 0.0);
            let mut mass = 0.0;
            for (v, w) in values.iter().zip(&weights) {
                sum += v * w;
                mass += v.norm() * w.abs();
            }
            if let Some(prev) = previous {
                if (sum - prev).norm() <= tol * mass.max(f64::MIN_POSITIVE) {
                    return Ok(sum);
                }
            }
            previous = Some(sum);
        }
        panels = panels
            .iter()
            .flat_map(|&(lo, hi)| {
                let mid = 0.5 * (lo + hi);
                [(lo, mid), (mid, hi)]
            })
            .collect();
    }
    Err(Error::QuadratureFailure {
        from: panels[0].0,
        to: panels[panels.len() - 1].1,
    })
}

/// Real integral by recursive bisection with a 16/32-point Gauss-Legendre pair.
/// Handles integrable endpoint singularities like `sqrt(x)` at `x = 0`.
pub fn adaptive<F>(f: &F, a: f64, b: f64, tol: f64) -> f64
where
    F: Fn(f64) -> f64,
{
    fn gl(f: &dyn Fn(f64) -> f64, a: f64, b: f64, order: usize) -> f64 {
        let mid = 0.5 * (a + b);
        let half = 0.5 * (b - a);
        rule(order).iter().map(|&(t, w)| w * f(mid + half * t)).sum::<f64>() * half
    }
    fn recurse(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64, whole: f64, depth: u32) -> f64 {
        let fine = gl(f, a, b, 32);
        if (fine - whole).abs() <= tol || depth == 0 {
            return fine;
        }
        let mid = 0.5 * (a + b);
        let left = gl(f, a, mid, 16);
        let right = gl(f, mid, b, 16);
        recurse(f, a, mid, 0.5 * tol, left, depth - 1) + recurse(f, mid, b, 0.5 * tol, right, depth - 1)
    }
    if b <= a {
        return 0.0;
    }
    let coarse = gl(f, a, b, 16);
    recurse(f, a, b, tol, coarse, 48)
}
