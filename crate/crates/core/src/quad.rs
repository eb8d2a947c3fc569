//! Quadrature rules: Gauss–Legendre for the mixing measure, double-exponential
//! rules for singular or semi-infinite integrals, and summation helpers.

use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evaluations: usize,
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`, nodes increasing.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "need at least one node");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter().zip(&w).map(|(&xi, &wi)| (mid + half * xi, half * wi)).collect()
}

const TS_TMAX: f64 = 4.0;
const ES_TMAX: f64 = 4.5;
const MAX_LEVEL: u32 = 9;

/// Tanh–sinh quadrature on a finite interval; tolerates integrable endpoint singularities.
pub fn tanh_sinh<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Result<Estimate> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("tanh_sinh needs finite bounds, got [{a}, {b}]")));
    }
    if a == b {
        return Ok(Estimate { value: 0.0, error: 0.0, evaluations: 0 });
    }
    let (lo, hi, sign) = if a < b { (a, b, 1.0) } else { (b, a, -1.0) };
    let half = 0.5 * (hi - lo);
    let node = |t: f64| -> Option<(f64, f64)> {
        let u = FRAC_PI_2 * t.sinh();
        let d = 2.0 * half / (1.0 + (2.0 * u.abs()).exp());
        if d <= 0.0 || !d.is_finite() {
            return None;
        }
        let x = if t > 0.0 { hi - d } else if t < 0.0 { lo + d } else { lo + half };
        if x <= lo || x >= hi {
            return None;
        }
        let ch = u.cosh();
        let w = half * FRAC_PI_2 * t.cosh() / (ch * ch);
        if w == 0.0 || !w.is_finite() {
            return None;
        }
        Some((x, w))
    };
    double_exponential(f, node, TS_TMAX, tol, "tanh-sinh").map(|e| Estimate {
        value: sign * e.value,
        ..e
    })
}

/// Exp–sinh quadrature on `(0, ∞)`; tolerates integrable singularities at 0 and
/// algebraic or exponential decay at infinity.
pub fn exp_sinh<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<Estimate> {
    let node = |t: f64| -> Option<(f64, f64)> {
        let x = (FRAC_PI_2 * t.sinh()).exp();
        if x == 0.0 || !x.is_finite() {
            return None;
        }
        Some((x, x * FRAC_PI_2 * t.cosh()))
    };
    double_exponential(f, node, ES_TMAX, tol, "exp-sinh")
}

fn double_exponential<F, N>(f: F, node: N, tmax: f64, tol: f64, name: &str) -> Result<Estimate>
where
    F: Fn(f64) -> f64,
    N: Fn(f64) -> Option<(f64, f64)>,
{
    let mut evaluations = 0usize;
    let mut eval = |t: f64| -> Result<f64> {
        match node(t) {
            None => Ok(0.0),
            Some((x, w)) => {
                evaluations += 1;
                let v = f(x);
                if !v.is_finite() {
                    return Err(Error::Quadrature {
                        context: format!("{name}: integrand not finite at x = {x:e}"),
                        residual: f64::INFINITY,
                    });
                }
                Ok(v * w)
            }
        }
    };
    // level 0: integer nodes
    let n0 = tmax.floor() as i64;
    let mut sum = 0.0;
    for j in -n0..=n0 {
        sum += eval(j as f64)?;
    }
    let mut h = 1.0;
    let mut prev = sum * h;
    let mut last_diff = f64::INFINITY;
    for level in 1..=MAX_LEVEL {
        h *= 0.5;
        let count = (tmax / h).floor() as i64;
        let mut j = 1;
        while j <= count {
            let t = j as f64 * h;
            sum += eval(t)? + eval(-t)?;
            j += 2;
        }
        let est = sum * h;
        let diff = (est - prev).abs();
        if level >= 3 && diff <= tol * est.abs().max(1e-300) {
            return Ok(Estimate { value: est, error: diff, evaluations });
        }
        if est == 0.0 && prev == 0.0 && level >= 3 {
            return Ok(Estimate { value: 0.0, error: 0.0, evaluations });
        }
        last_diff = diff;
        prev = est;
    }
    Err(Error::Quadrature {
        context: format!("{name} after {MAX_LEVEL} levels, estimate {prev:e}"),
        residual: last_diff,
    })
}

/// A fixed exp–sinh rule on `(0, ∞)`, for integrals that share one node set
/// across many integrands.
#[derive(Debug, Clone)]
pub struct ExpSinhRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl ExpSinhRule {
    pub fn new(step: f64, tmin: f64, tmax: f64) -> Self {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        let jmin = (tmin / step).ceil() as i64;
        let jmax = (tmax / step).floor() as i64;
        for j in jmin..=jmax {
            let t = j as f64 * step;
            let x = (FRAC_PI_2 * t.sinh()).exp();
            if x > 0.0 && x.is_finite() {
                nodes.push(x);
                weights.push(step * x * FRAC_PI_2 * t.cosh());
            }
        }
        Self { nodes, weights }
    }

    /// Nodes and weights for `∫_0^∞ g(s) ds` with nodes scaled by `scale`.
    pub fn scaled(&self, scale: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.iter().zip(&self.weights).map(move |(&x, &w)| (scale * x, scale * w))
    }
}

/// A fixed tanh–sinh rule on `[a, b]`, nodes increasing.
pub fn tanh_sinh_rule(a: f64, b: f64, step: f64) -> Vec<(f64, f64)> {
    let half = 0.5 * (b - a);
    let jmax = (TS_TMAX / step).floor() as i64;
    let mut rule = Vec::new();
    for j in -jmax..=jmax {
        let t = j as f64 * step;
        let u = FRAC_PI_2 * t.sinh();
        let d = 2.0 * half / (1.0 + (2.0 * u.abs()).exp());
        let x = if j > 0 { b - d } else if j < 0 { a + d } else { a + half };
        let ch = u.cosh();
        let w = step * half * FRAC_PI_2 * t.cosh() / (ch * ch);
        if x > a && x < b && w > 0.0 && w.is_finite() {
            rule.push((x, w));
        }
    }
    rule
}

/// Outcome of an integral that may legitimately diverge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Extended {
    Finite(f64),
    Infinite,
}

impl Extended {
    pub fn value(self) -> f64 {
        match self {
            Extended::Finite(v) => v,
            Extended::Infinite => f64::INFINITY,
        }
    }
    pub fn is_finite(self) -> bool {
        matches!(self, Extended::Finite(_))
    }
}

impl serde::Serialize for Extended {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Extended::Finite(v) => serializer.serialize_f64(*v),
            Extended::Infinite => serializer.serialize_str("inf"),
        }
    }
}

/// Partial sums above this are reported as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e12;

/// Classify a sequence of increments of a nonnegative partial-sum sequence.
///
/// Divergent when the partial sum passes [`DIVERGENCE_THRESHOLD`], or when the
/// last increments fail to shrink geometrically while still being relevant.
pub fn classify_partial_sums(increments: &[f64], rel_tol: f64) -> Extended {
    let mut total = 0.0;
    for &d in increments {
        total += d;
        if !total.is_finite() || total > DIVERGENCE_THRESHOLD {
            return Extended::Infinite;
        }
    }
    let n = increments.len();
    if n < 4 {
        return Extended::Finite(total);
    }
    let last = increments[n - 1].abs();
    if last <= rel_tol * total.abs().max(1e-300) {
        return Extended::Finite(total);
    }
    let ratios: Vec<f64> = (n - 3..n)
        .map(|i| increments[i].abs() / increments[i - 1].abs().max(1e-300))
        .collect();
    if ratios.iter().all(|&r| r < 0.8) {
        // geometric tail extrapolation
        let r = ratios[2];
        Extended::Finite(total + last * r / (1.0 - r))
    } else {
        Extended::Infinite
    }
}

/// `∫_0^∞ f(s) ds` for nonnegative `f` that may be singular at 0 and may fail to decay.
///
/// `[0, 1]` is integrated in the variable `v = -ln s`; then decades `[10^{k-1}, 10^k]`
/// are added until the increments become negligible or the sum is classified as divergent.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, tol: f64) -> Result<Extended> {
    let head = exp_sinh(
        |v| {
            let s = (-v).exp();
            if s == 0.0 {
                0.0
            } else {
                f(s) * s
            }
        },
        tol,
    )?;
    let mut increments = vec![head.value];
    let mut lo = 1.0_f64;
    for _ in 0..30 {
        let hi = lo * 10.0;
        let piece = tanh_sinh(&f, lo, hi, tol)?;
        increments.push(piece.value);
        lo = hi;
        let total: f64 = increments.iter().sum();
        if total > DIVERGENCE_THRESHOLD {
            return Ok(Extended::Infinite);
        }
        if increments.len() > 4 && piece.value.abs() <= 1e-3 * tol * total.abs().max(1e-300) {
            return Ok(Extended::Finite(total));
        }
    }
    Ok(classify_partial_sums(&increments, tol))
}

/// `∫_0^∞ e^{-λ s} g(s) ds`, split at the points where `g` is not smooth.
pub fn laplace_piecewise<G: Fn(f64) -> f64>(g: G, lambda: f64, breaks: &[f64], tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut lo = 0.0;
    for &b in breaks.iter().filter(|&&b| b > 0.0) {
        total += tanh_sinh(|s| (-lambda * s).exp() * g(s), lo, b, tol)?.value;
        lo = b;
    }
    let shift = (-lambda * lo).exp();
    total += shift * exp_sinh(|w| (-lambda * w).exp() * g(lo + w), tol)?.value;
    Ok(total)
}

/// Pairwise (tree) summation; deterministic for a given input order.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 32;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}

/// Composite trapezoid rule on an arbitrary increasing grid.
pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2)
        .zip(y.windows(2))
        .map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1]))
        .sum()
}

/// Running trapezoid integral, starting from 0 at `x[0]`.
pub fn cumulative_trapezoid(x: &[f64], y: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(x.len());
    let mut acc = 0.0;
    out.push(0.0);
    for i in 1..x.len() {
        acc += 0.5 * (x[i] - x[i - 1]) * (y[i] + y[i - 1]);
        out.push(acc);
    }
    out
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}

pub fn logspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    linspace(a.ln(), b.ln(), n).into_iter().map(f64::exp).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_legendre_integrates_polynomials_exactly() {
        for n in [1usize, 2, 5, 16, 64, 128] {
            let rule = gauss_legendre_on(n, 0.0, 2.0);
            let w: f64 = rule.iter().map(|p| p.1).sum();
            assert!((w - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let v: f64 = rule.iter().map(|&(x, w)| w * x.powi(deg as i32)).sum();
            let exact = 2f64.powi(deg as i32 + 1) / (deg as f64 + 1.0);
            assert!(((v - exact) / exact).abs() < 1e-12, "n={n}: {v} vs {exact}");
        }
    }

    #[test]
    fn gauss_legendre_nodes_increase() {
        let (x, w) = gauss_legendre(64);
        assert!(x.windows(2).all(|p| p[0] < p[1]));
        assert!(w.iter().all(|&v| v > 0.0));
    }

    #[test]
    fn tanh_sinh_endpoint_singularity() {
        let e = tanh_sinh(|x| x.powf(-0.5), 0.0, 1.0, 1e-12).unwrap();
        assert!((e.value - 2.0).abs() < 1e-10);
        let e = tanh_sinh(|x| (1.0 - x).powf(-0.5), 0.0, 1.0, 1e-8).unwrap();
        assert!((e.value - 2.0).abs() < 1e-6, "{}", e.value);
    }

    #[test]
    fn exp_sinh_power_and_exponential() {
        let e = exp_sinh(|x| (-x).exp() * x.powf(-0.5), 1e-12).unwrap();
        assert!((e.value - PI.sqrt()).abs() < 1e-10);
        let e = exp_sinh(|x| 1.0 / (1.0 + x * x), 1e-12).unwrap();
        assert!((e.value - FRAC_PI_2).abs() < 1e-10);
    }

    #[test]
    fn divergence_detection() {
        let finite = integrate_to_infinity(|s| (-s).exp() / s.sqrt(), 1e-10).unwrap();
        assert!((finite.value() - PI.sqrt()).abs() < 1e-8);
        let heavy = integrate_to_infinity(|s| if s < 1e-3 { 0.0 } else { s.powf(-1.5) * (-(1.0 / s)).exp() }, 1e-10).unwrap();
        assert!((heavy.value() - PI.sqrt()).abs() < 1e-6, "{heavy:?}");
        assert_eq!(integrate_to_infinity(|s| s.powf(-0.5), 1e-10).unwrap(), Extended::Infinite);
        assert_eq!(integrate_to_infinity(|s| 1.0 / (1.0 + s), 1e-10).unwrap(), Extended::Infinite);
    }

    #[test]
    fn pairwise_matches_naive_on_small() {
        let v: Vec<f64> = (0..1000).map(|i| (i as f64).sin()).collect();
        let a = pairwise_sum(&v);
        let b: f64 = v.iter().sum();
        assert!((a - b).abs() < 1e-12);
    }
}
