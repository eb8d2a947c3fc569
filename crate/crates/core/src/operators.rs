//! Discretization of the distributed-order Riemann–Liouville operator
//! `D u(t) = E b(Y) u'(t) + d/dt ∫_c^t u(s) E ν̄(t - s, Y) ds` and its regularized form.
//!
//! The kernel enters only through its cell integrals `w_k = ∫_{kh}^{(k+1)h} E ν̄`,
//! which stay finite under A2 even though `E ν̄` blows up at 0.

use std::path::Path;

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export;
use crate::mixing::MixedExponent;
use crate::quad;

/// Uniform grid `t_i = origin + i h`, `i = 0..count`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    pub step: f64,
    pub count: usize,
    #[serde(default)]
    pub origin: f64,
}

impl TimeGrid {
    pub fn new(step: f64, count: usize) -> Result<Self> {
        Self::with_origin(step, count, 0.0)
    }

    pub fn with_origin(step: f64, count: usize, origin: f64) -> Result<Self> {
        let grid = Self { step, count, origin };
        grid.validate()?;
        Ok(grid)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.step > 0.0 && self.step.is_finite()) || self.count < 2 || !self.origin.is_finite() {
            return Err(Error::Config(format!(
                "time grid needs step > 0 and at least 2 points, got step {} count {}",
                self.step, self.count
            )));
        }
        Ok(())
    }

    pub fn point(&self, i: usize) -> f64 {
        self.origin + i as f64 * self.step
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.count).map(|i| self.point(i)).collect()
    }

    pub fn sample<F: Fn(f64) -> f64>(&self, u: F) -> Vec<f64> {
        (0..self.count).map(|i| u(self.point(i))).collect()
    }
}

/// Product-integration weights of the kernel `E ν̄(·, Y)` on a time grid.
#[derive(Debug, Clone)]
pub struct ConvolutionKernel {
    pub grid: TimeGrid,
    /// `w_k = ∫_{kh}^{(k+1)h} E ν̄(s, Y) ds`.
    pub weights: Vec<f64>,
    /// `μ_k = h^{-1} ∫_{kh}^{(k+1)h} (s - kh) E ν̄(s, Y) ds`, for linear interpolation of `u`.
    pub moments: Vec<f64>,
    /// `E b(Y)`.
    pub drift: f64,
}

pub fn build_kernel(mixed: &MixedExponent, grid: TimeGrid) -> Result<ConvolutionKernel> {
    grid.validate()?;
    let h = grid.step;
    let cum: Vec<f64> = (0..=grid.count).map(|k| mixed.mixed_cumulative_tail(k as f64 * h)).collect();
    let weights: Vec<f64> = cum.windows(2).map(|c| (c[1] - c[0]).max(0.0)).collect();
    if !weights[0].is_finite() {
        return Err(Error::Assumption("kernel is not integrable at 0 (A2 fails)".into()));
    }
    // ∫_a^b (s - a) K = b C(b) - a C(a) - ∫_a^b C - a (C(b) - C(a))
    let rule = quad::gauss_legendre_on(6, 0.0, h);
    let moments = (0..grid.count)
        .map(|k| {
            let a = k as f64 * h;
            let int_c: f64 = rule.iter().map(|&(x, w)| w * mixed.mixed_cumulative_tail(a + x)).sum();
            let m = (a + h) * cum[k + 1] - a * cum[k] - int_c - a * weights[k];
            (m / h).clamp(0.0, weights[k])
        })
        .collect();
    Ok(ConvolutionKernel { grid, weights, moments, drift: mixed.mixed_drift() })
}

impl ConvolutionKernel {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let h = self.grid.step;
        export::write_csv_file(
            path,
            &["k", "s_lo", "s_hi", "weight", "moment"],
            self.weights
                .iter()
                .zip(&self.moments)
                .enumerate()
                .map(|(k, (&w, &m))| vec![k as f64, k as f64 * h, (k + 1) as f64 * h, w, m]),
        )
    }
}

/// Values on `t_1, ..., t_{N-1}`; each value belongs to the cell ending at its point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GridFunction {
    pub points: Vec<f64>,
    pub values: Vec<f64>,
}

fn check_len(u: &[f64], kernel: &ConvolutionKernel) -> Result<()> {
    if u.len() != kernel.grid.count {
        return Err(Error::Shape { expected: kernel.grid.count, got: u.len() });
    }
    Ok(())
}

/// Size above which the discrete convolution goes through the FFT.
const FFT_THRESHOLD: usize = 512;

/// First `n` terms of the linear convolution of `a` and `b`.
fn convolve(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    if n <= FFT_THRESHOLD {
        return (0..n)
            .map(|i| (0..=i).map(|k| a[k] * b[i - k]).sum())
            .collect();
    }
    let size = (2 * n).next_power_of_two();
    let mut planner = FftPlanner::<f64>::new();
    let forward = planner.plan_fft_forward(size);
    let inverse = planner.plan_fft_inverse(size);
    let lift = |v: &[f64]| {
        let mut buf = vec![Complex64::new(0.0, 0.0); size];
        for (slot, &x) in buf.iter_mut().zip(v.iter().take(n)) {
            *slot = Complex64::new(x, 0.0);
        }
        buf
    };
    let mut fa = lift(a);
    let mut fb = lift(b);
    forward.process(&mut fa);
    forward.process(&mut fb);
    for (x, y) in fa.iter_mut().zip(&fb) {
        *x *= y;
    }
    inverse.process(&mut fa);
    fa.iter().take(n).map(|z| z.re / size as f64).collect()
}

/// `E b(Y) u' + d/dt ∫ u(t - s) E ν̄(s, Y) ds`, first order in `h`.
///
/// `I_n = Σ_{k<n} (w_k - μ_k) u_{n-k} + μ_k u_{n-k-1}` integrates the kernel exactly
/// against the piecewise-linear interpolant of `u`; the outer derivative is the
/// backward difference `(I_n - I_{n-1})/h`.
pub fn apply_rl(u: &[f64], kernel: &ConvolutionKernel) -> Result<GridFunction> {
    check_len(u, kernel)?;
    let n = u.len();
    let h = kernel.grid.step;
    let near: Vec<f64> = kernel.weights.iter().zip(&kernel.moments).map(|(w, m)| w - m).collect();
    // I_n for n = 1..N-1: Σ_k near_k u_{n-k} + Σ_k μ_k u_{n-1-k}
    let first = convolve(&near, &u[1..], n - 1);
    let second = convolve(&kernel.moments, &u[..n - 1], n - 1);
    let mut values = Vec::with_capacity(n - 1);
    let mut prev = 0.0;
    for (i, (&c1, &c2)) in first.iter().zip(&second).enumerate() {
        let c = c1 + c2;
        let m = i + 1;
        values.push((c - prev) / h + kernel.drift * (u[m] - u[m - 1]) / h);
        prev = c;
    }
    let points = (1..n).map(|m| kernel.grid.point(m)).collect();
    Ok(GridFunction { points, values })
}

/// `apply_rl(u) - u(c) E ν̄(t - c, Y)`, the kernel term taken as its cell average
/// `(w_0 + ... + w_{n-1} - (w_0 + ... + w_{n-2}))/h` so constants are annihilated exactly.
pub fn apply_regularized(u: &[f64], kernel: &ConvolutionKernel) -> Result<GridFunction> {
    let mut out = apply_rl(u, kernel)?;
    let h = kernel.grid.step;
    for (i, v) in out.values.iter_mut().enumerate() {
        *v -= u[0] * kernel.weights[i] / h;
    }
    Ok(out)
}

/// Worst relative residuals of the two Laplace-symbol identities.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymbolReport {
    pub lambdas: Vec<f64>,
    pub rl_residuals: Vec<f64>,
    pub regularized_residuals: Vec<f64>,
    pub max_residual: f64,
}

/// Laplace transforms `apply_rl(u)` and `apply_regularized(u)` on the grid and compares
/// them with `E f(λ) ũ(λ) - E b u(0)` and `E f(λ) ũ(λ) - λ^{-1} E f(λ) u(0)`.
///
/// `ũ` is the trapezoid transform of the samples; the operator outputs are
/// integrated with their cell values at cell midpoints.
pub fn symbol_check(u: &[f64], mixed: &MixedExponent, lambdas: &[f64], grid: TimeGrid) -> Result<SymbolReport> {
    grid.validate()?;
    if grid.origin != 0.0 {
        return Err(Error::Precondition("symbol check needs origin 0".into()));
    }
    let kernel = build_kernel(mixed, grid)?;
    let rl = apply_rl(u, &kernel)?;
    let reg = apply_regularized(u, &kernel)?;
    let t = grid.points();
    let end = *t.last().expect("grid has points");
    let umax = u.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let h = grid.step;
    let mut rl_residuals = Vec::new();
    let mut regularized_residuals = Vec::new();
    for &lam in lambdas {
        if !(lam > 0.0) {
            return Err(Error::Domain(format!("lambda must be positive, got {lam}")));
        }
        let decayed = u[u.len() - 1].abs() <= 1e-10 * umax;
        if (-lam * end).exp() >= 1e-10 && !decayed {
            return Err(Error::Precondition(format!(
                "grid end {end} too short for lambda {lam}: e^(-lambda T) = {:e} and u has not decayed",
                (-lam * end).exp()
            )));
        }
        let weighted: Vec<f64> = t.iter().zip(u).map(|(&s, &v)| (-lam * s).exp() * v).collect();
        let u_hat = quad::trapezoid(&t, &weighted);
        let transform = |g: &GridFunction| -> f64 {
            let terms: Vec<f64> = g
                .points
                .iter()
                .zip(&g.values)
                .map(|(&s, &v)| h * (-lam * (s - 0.5 * h)).exp() * v)
                .collect();
            quad::pairwise_sum(&terms)
        };
        let f = mixed.mixed_f(lam);
        let want_rl = f * u_hat - mixed.mixed_drift() * u[0];
        let want_reg = f * u_hat - f * u[0] / lam;
        rl_residuals.push((transform(&rl) - want_rl).abs() / want_rl.abs());
        regularized_residuals.push((transform(&reg) - want_reg).abs() / want_reg.abs());
    }
    let max_residual = rl_residuals.iter().chain(&regularized_residuals).fold(0.0f64, |m, &v| m.max(v));
    Ok(SymbolReport { lambdas: lambdas.to_vec(), rl_residuals, regularized_residuals, max_residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Family, ParamMap};
    use crate::measure::{MeasureSpec, MixingMeasure};
    use crate::special::gamma;

    fn mixed(f: Family, m: MeasureSpec) -> MixedExponent {
        MixedExponent::new(f, MixingMeasure::new(m).unwrap()).unwrap()
    }

    fn stable_half() -> MixedExponent {
        mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 })
    }

    #[test]
    fn stable_weights_closed_form() {
        let grid = TimeGrid::new(0.01, 50).unwrap();
        let k = build_kernel(&stable_half(), grid).unwrap();
        for (i, w) in k.weights.iter().enumerate() {
            let exact = ((i as f64 + 1.0) * 0.01f64).sqrt() / gamma(1.5) - (i as f64 * 0.01f64).sqrt() / gamma(1.5);
            assert!((w - exact).abs() < 1e-15);
        }
        assert!(k.weights.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn unit_poisson_weights() {
        let cp = Family::CompoundPoisson { rate: ParamMap::Constant { value: 1.0 }, jump: 1.0 };
        let k = build_kernel(&mixed(cp, MeasureSpec::Dirac { y: 1.0 }), TimeGrid::new(0.1, 20).unwrap()).unwrap();
        for w in &k.weights[..9] {
            assert!((w - 0.1).abs() < 1e-15);
        }
        assert!(k.weights[10..].iter().all(|&w| w == 0.0));
    }

    #[test]
    fn constant_input_returns_kernel() {
        let m = stable_half();
        let grid = TimeGrid::new(1e-3, 2001).unwrap();
        let k = build_kernel(&m, grid).unwrap();
        let out = apply_rl(&vec![1.0; grid.count], &k).unwrap();
        let last = out.values.len() - 1;
        assert!((out.values[last] - m.mixed_tail(out.points[last])).abs() < 1e-3);
        let reg = apply_regularized(&vec![3.0; grid.count], &k).unwrap();
        assert!(reg.values.iter().all(|v| v.abs() < 1e-9));
    }

    #[test]
    fn identity_function_under_half_derivative() {
        let m = stable_half();
        for h in [1e-2, 5e-3] {
            let grid = TimeGrid::new(h, (1.0 / h) as usize + 1).unwrap();
            let k = build_kernel(&m, grid).unwrap();
            let u = grid.sample(|t| t);
            let out = apply_rl(&u, &k).unwrap();
            let reg = apply_regularized(&grid.sample(|t| 1.0 + t), &k).unwrap();
            for ((t, a), b) in out.points.iter().zip(&out.values).zip(&reg.values) {
                // cell average of t^{1/2}/Γ(3/2) over [t - h, t]
                let exact = (t.powf(1.5) - (t - h).max(0.0).powf(1.5)) / (1.5 * h * gamma(1.5));
                assert!((a - exact).abs() < 2.0 * h, "t={t}");
                assert!((b - exact).abs() < 2.0 * h, "t={t}");
            }
        }
    }

    #[test]
    fn drift_is_derivative() {
        let d = mixed(Family::drift(), MeasureSpec::Dirac { y: 1.0 });
        let grid = TimeGrid::new(1e-3, 1001).unwrap();
        let k = build_kernel(&d, grid).unwrap();
        let out = apply_rl(&grid.sample(|t| t * t), &k).unwrap();
        for (t, v) in out.points.iter().zip(&out.values) {
            assert!((v - 2.0 * t).abs() <= 1.01e-3);
        }
    }

    #[test]
    fn fft_matches_direct() {
        let a: Vec<f64> = (0..1500).map(|i| 1.0 / (1.0 + i as f64)).collect();
        let b: Vec<f64> = (0..1500).map(|i| (i as f64 * 0.01).cos()).collect();
        let fast = convolve(&a, &b, 1500);
        for i in [0, 10, 700, 1499] {
            let direct: f64 = (0..=i).map(|k| a[k] * b[i - k]).sum();
            assert!((fast[i] - direct).abs() < 1e-11, "{i}");
        }
    }

    #[test]
    fn linearity() {
        let m = mixed(Family::gamma(), MeasureSpec::Uniform { lo: 0.5, hi: 1.5 });
        let grid = TimeGrid::new(1e-2, 300).unwrap();
        let k = build_kernel(&m, grid).unwrap();
        let u = grid.sample(|t| (-t).exp());
        let v = grid.sample(|t| t.sin());
        let w: Vec<f64> = u.iter().zip(&v).map(|(a, b)| 2.0 * a - 0.5 * b).collect();
        let (ou, ov, ow) = (apply_rl(&u, &k).unwrap(), apply_rl(&v, &k).unwrap(), apply_rl(&w, &k).unwrap());
        for i in 0..ow.values.len() {
            assert!((ow.values[i] - (2.0 * ou.values[i] - 0.5 * ov.values[i])).abs() < 1e-12);
        }
    }

    #[test]
    fn symbol_residual_for_drift_and_stable() {
        let d = mixed(Family::drift(), MeasureSpec::Dirac { y: 1.0 });
        let grid = TimeGrid::new(1e-3, 40_001).unwrap();
        let u = grid.sample(|t| (-t).exp());
        let r = symbol_check(&u, &d, &[0.5, 1.0, 2.0], grid).unwrap();
        assert!(r.max_residual < 1e-5, "{r:?}");
        let r = symbol_check(&u, &stable_half(), &[1.0], grid).unwrap();
        assert!(r.max_residual < 1e-2, "{r:?}");
    }

    #[test]
    fn short_grid_is_refused() {
        let grid = TimeGrid::new(1e-2, 100).unwrap();
        let u = grid.sample(|_| 1.0);
        assert!(matches!(symbol_check(&u, &stable_half(), &[1.0], grid), Err(Error::Precondition(_))));
    }
}
