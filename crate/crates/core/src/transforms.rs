//! Numerical Laplace inversion and the transform-side densities: the subordinator
//! density `μ_p(t, x)`, the inverse density `l_p(x, t)` and the renewal function `U(t)`.
//!
//! Convention: `μ_p(t, x)` is the density in real time `t` of `σ(x)`, so its
//! `t`-Laplace transform is `exp(-x E f(λ, Y))`.

use std::f64::consts::{FRAC_PI_2, PI};
use std::path::Path;
use std::sync::Mutex;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::export;
use crate::mixing::MixedExponent;
use crate::quad;

/// Values below this are counted as inversion ringing before being clipped to zero.
pub const CLIP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InversionConfig {
    /// Points on the contour; accuracy improves roughly like `exp(-1.36 nodes)`.
    pub nodes: usize,
    /// Multiplies the contour size.
    pub scale: f64,
}

impl Default for InversionConfig {
    fn default() -> Self {
        Self { nodes: 32, scale: 1.0 }
    }
}

impl InversionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.nodes < 8 {
            return Err(Error::Config(format!("inversion needs at least 8 contour nodes, got {}", self.nodes)));
        }
        if !(self.scale > 0.0 && self.scale.is_finite()) {
            return Err(Error::Config(format!("contour scale must be positive, got {}", self.scale)));
        }
        Ok(())
    }
}

/// Shape of the integration contour, independent of `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ContourShape {
    /// Cotangent contour; the transform must stay bounded in the left half-plane
    /// away from the negative axis.
    Talbot,
    /// `z(u) = (m/t)(1 + sin(iu - α))` at `u = kh`, `|k| ≤ half_nodes`, with
    /// asymptotes at angle `π/2 + α`.
    Hyperbola { alpha: f64, h: f64, m: f64, half_nodes: usize },
}

/// Target log-error of the hyperbolic contour parameters.
const HYPERBOLA_LOG_TOL: f64 = -27.0;
const HYPERBOLA_MAX_HALF_NODES: usize = 4096;

static SHAPES: Mutex<Vec<((u64, usize), ContourShape)>> = Mutex::new(Vec::new());

impl ContourShape {
    /// Talbot when transforms are bounded on `|arg z| < π`; otherwise the cheapest
    /// hyperbola inside `|arg z| < phi` that meets the error target.
    pub fn for_sector(phi: f64, cfg: &InversionConfig) -> Result<Self> {
        cfg.validate()?;
        let opening = phi.min(PI) - FRAC_PI_2;
        if phi >= PI * (1.0 - 1e-12) || opening < 1e-3 {
            return Ok(ContourShape::Talbot);
        }
        let key = (phi.to_bits(), cfg.nodes);
        if let Some(&(_, shape)) = SHAPES.lock().expect("shape cache").iter().find(|(k, _)| *k == key) {
            return Ok(shape);
        }
        let mut half = (cfg.nodes / 2).max(8);
        let shape = loop {
            let (err, alpha, h, m) = hyperbola_parameters(opening, half);
            if err <= HYPERBOLA_LOG_TOL || half >= HYPERBOLA_MAX_HALF_NODES {
                break ContourShape::Hyperbola { alpha, h, m, half_nodes: half };
            }
            half *= 2;
        };
        SHAPES.lock().expect("shape cache").push((key, shape));
        Ok(shape)
    }
}

/// Grid search of `(α, h, m = μt)` minimizing the largest of the two discretization
/// errors, the truncation error and the round-off amplification, in log scale.
fn hyperbola_parameters(opening: f64, half_nodes: usize) -> (f64, f64, f64, f64) {
    let mut best = (f64::INFINITY, 0.0, 0.0, 0.0);
    let last = half_nodes as f64;
    for ai in 1..40 {
        let alpha = opening * ai as f64 / 40.0;
        for hi in 0..80 {
            let h = 10f64.powf(-3.0 + 3.5 * hi as f64 / 79.0);
            let stretch = alpha.sin() * (last * h).cosh();
            for mi in 0..120 {
                let m = 0.25 + 0.3 * mi as f64;
                let below = m - 2.0 * PI * alpha / h;
                let above = m * (1.0 - opening.sin()) - 2.0 * PI * (opening - alpha) / h;
                let truncation = m * (1.0 - stretch);
                let roundoff = m + f64::EPSILON.ln();
                let err = below.max(above).max(truncation).max(roundoff);
                if err < best.0 {
                    best = (err, alpha, h, m);
                }
            }
        }
    }
    best
}

/// Fixed contour for one time `t`: `F(t) ≈ Σ_k Im(w_k F(z_k))` over its upper half.
#[derive(Debug, Clone)]
pub struct Contour {
    pub t: f64,
    pub points: Vec<(Complex64, Complex64)>,
}

const SIGMA: f64 = 0.6122;
const MU: f64 = 0.5017;
const ALPHA: f64 = 0.6407;
const NU: f64 = 0.2645;

impl Contour {
    /// Talbot contour with `cfg.nodes` points.
    pub fn new(t: f64, cfg: &InversionConfig) -> Result<Self> {
        Self::with_shape(t, cfg, ContourShape::Talbot)
    }

    pub fn with_shape(t: f64, cfg: &InversionConfig, shape: ContourShape) -> Result<Self> {
        cfg.validate()?;
        if !(t > 0.0 && t.is_finite()) {
            return Err(Error::Domain(format!("inversion needs t > 0, got {t}")));
        }
        let points = match shape {
            ContourShape::Talbot => talbot_points(t, cfg),
            ContourShape::Hyperbola { alpha, h, m, half_nodes } => {
                let mu = cfg.scale * m / t;
                (0..=half_nodes)
                    .map(|k| {
                        let u = k as f64 * h;
                        let z = Complex64::new(mu * (1.0 - alpha.sin() * u.cosh()), mu * alpha.cos() * u.sinh());
                        let dz = Complex64::new(-mu * alpha.sin() * u.sinh(), mu * alpha.cos() * u.cosh());
                        let share = if k == 0 { 0.5 } else { 1.0 };
                        (z, (z * t).exp() * dz * (share * h / PI))
                    })
                    .collect()
            }
        };
        Ok(Self { t, points })
    }

    /// Inverts a transform from its values at the contour nodes.
    ///
    /// Fails when rounding in the sum (`ε Σ |terms|`) exceeds `1e-6 max(|sum|, 1)`.
    pub fn combine(&self, values: impl IntoIterator<Item = Complex64>) -> Result<f64> {
        let mut acc = 0.0;
        let mut magnitude = 0.0;
        for ((_, w), v) in self.points.iter().zip(values) {
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Inversion { t: self.t, reason: "transform not finite on the contour".into() });
            }
            let term = (w * v).im;
            if !term.is_finite() {
                return Err(Error::Inversion { t: self.t, reason: "contour term overflowed".into() });
            }
            acc += term;
            magnitude += term.abs();
        }
        if magnitude * f64::EPSILON > 1e-6 * acc.abs().max(1.0) {
            return Err(Error::Inversion {
                t: self.t,
                reason: format!("cancellation on the contour (term magnitude {magnitude:e}, result {acc:e})"),
            });
        }
        Ok(acc)
    }

    pub fn invert<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Result<f64> {
        self.combine(self.points.iter().map(|(z, _)| f(*z)))
    }
}

fn talbot_points(t: f64, cfg: &InversionConfig) -> Vec<(Complex64, Complex64)> {
    let n = cfg.nodes;
    let r = cfg.scale * n as f64 / t;
    let h = 2.0 * PI / n as f64;
    (0..n)
        .map(|k| -PI + (k as f64 + 0.5) * h)
        .filter(|&theta| theta > 0.0)
        .map(|theta| {
            let (s, c) = (ALPHA * theta).sin_cos();
            let cot = c / s;
            let z = Complex64::new(r * (MU * theta * cot - SIGMA), r * NU * theta);
            let dz = Complex64::new(r * MU * (cot - ALPHA * theta / (s * s)), r * NU);
            (z, (z * t).exp() * dz * (2.0 / n as f64))
        })
        .collect()
}

/// Inverse Laplace transform of `f` at `t`.
pub fn invert_laplace<F: Fn(Complex64) -> Complex64>(f: F, t: f64, cfg: &InversionConfig) -> Result<f64> {
    Contour::new(t, cfg)?.invert(f)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Mu,
    L,
    U,
    Q,
    Kernel,
}

/// A tabulated function on an increasing 1-D grid.
#[derive(Debug, Clone, Serialize)]
pub struct DensityGrid {
    pub kind: DensityKind,
    pub points: Vec<f64>,
    pub values: Vec<f64>,
    /// Free-form description of what was computed.
    pub params: serde_json::Value,
    /// Number of values below `-CLIP_TOL` that were clipped to zero.
    pub clipped: usize,
}

impl DensityGrid {
    fn from_raw(kind: DensityKind, points: Vec<f64>, raw: Vec<f64>, params: serde_json::Value) -> Self {
        let mut clipped = 0;
        let values = raw
            .into_iter()
            .map(|v| {
                if v < -CLIP_TOL {
                    clipped += 1;
                }
                v.max(0.0)
            })
            .collect();
        Self { kind, points, values, params, clipped }
    }

    /// Trapezoid integral over the grid.
    pub fn mass(&self) -> f64 {
        quad::trapezoid(&self.points, &self.values)
    }

    /// Trapezoid integral of `point · value`.
    pub fn first_moment(&self) -> f64 {
        let xv: Vec<f64> = self.points.iter().zip(&self.values).map(|(x, v)| x * v).collect();
        quad::trapezoid(&self.points, &xv)
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[1] >= w[0])
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        export::write_csv_file(
            path,
            &["point", "value"],
            self.points.iter().zip(&self.values).map(|(&p, &v)| vec![p, v]),
        )
    }

    /// Metadata sidecar (everything except the samples).
    pub fn write_metadata(&self, path: &Path) -> Result<()> {
        let meta = serde_json::json!({
            "kind": self.kind,
            "count": self.points.len(),
            "params": self.params,
            "clipped": self.clipped,
        });
        export::write_json_file(path, &meta)
    }
}

fn check_grid(grid: &[f64], what: &str) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Config(format!("{what} grid is empty")));
    }
    if grid.iter().any(|&v| !(v > 0.0 && v.is_finite())) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain(format!("{what} grid must be positive and increasing")));
    }
    Ok(())
}

fn require_density(mixed: &MixedExponent) -> Result<()> {
    if mixed.total_mass().is_finite() {
        return Err(Error::Precondition(
            "the mixed Lévy measure has finite activity; sigma(x) has no density".into(),
        ));
    }
    Ok(())
}

/// `μ_p(t, x)` on a grid of `t`, by inverting `exp(-x E f(λ, Y))`.
pub fn subordinator_density(mixed: &MixedExponent, x: f64, t_grid: &[f64], cfg: &InversionConfig) -> Result<DensityGrid> {
    require_density(mixed)?;
    check_grid(t_grid, "time")?;
    if !(x > 0.0) {
        return Err(Error::Domain(format!("operational time must be positive, got {x}")));
    }
    let raw = t_grid
        .par_iter()
        .map(|&t| ExponentOnContour::new(mixed, t, cfg)?.mu(x))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityGrid::from_raw(
        DensityKind::Mu,
        t_grid.to_vec(),
        raw,
        serde_json::json!({ "x": x, "contour_nodes": cfg.nodes }),
    ))
}

/// Renewal function `U(t) = E L(t)`, by inverting `1/(λ E f(λ, Y))`.
pub fn renewal_function(mixed: &MixedExponent, t_grid: &[f64], cfg: &InversionConfig) -> Result<DensityGrid> {
    check_grid(t_grid, "time")?;
    let raw = t_grid
        .par_iter()
        .map(|&t| renewal_at(mixed, t, cfg))
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityGrid::from_raw(DensityKind::U, t_grid.to_vec(), raw, serde_json::json!({ "contour_nodes": cfg.nodes })))
}

pub fn renewal_at(mixed: &MixedExponent, t: f64, cfg: &InversionConfig) -> Result<f64> {
    invert_laplace(|z| (z * mixed.mixed_f_complex(z)).inv(), t, cfg)
}

/// Values below this are reported as zero instead of being inverted.
pub const NEGLIGIBLE: f64 = 1e-30;
/// Trial points `c = 2^k / 2` of the Chernoff bound, at `λ = c / t`.
const CHERNOFF_TRIALS: i32 = 22;

/// Mixed exponent values along one contour, reused for every `x`.
pub(crate) struct ExponentOnContour {
    contour: Contour,
    exponent: Vec<Complex64>,
    /// `(c, E f(c/t, Y))`.
    chernoff: Vec<(f64, f64)>,
}

impl ExponentOnContour {
    /// Uses a hyperbola when `exp(-x E f)` grows somewhere off the negative axis.
    pub(crate) fn new(mixed: &MixedExponent, t: f64, cfg: &InversionConfig) -> Result<Self> {
        let shape = ContourShape::for_sector(mixed.bounded_sector(), cfg)?;
        let contour = Contour::with_shape(t, cfg, shape)?;
        let exponent = contour.points.iter().map(|(z, _)| mixed.mixed_f_complex(*z)).collect();
        let chernoff = (0..CHERNOFF_TRIALS)
            .map(|k| {
                let c = 0.5 * 2f64.powi(k);
                (c, mixed.mixed_f(c / t))
            })
            .collect();
        Ok(Self { contour, exponent, chernoff })
    }

    /// `P(σ(x) ≤ t) ≤ min_c exp(c - x E f(c/t, Y))`.
    pub(crate) fn lower_tail_bound(&self, x: f64) -> f64 {
        self.chernoff.iter().map(|&(c, f)| (c - x * f).exp()).fold(1.0, f64::min)
    }

    /// Whether `σ(x) ≤ t` is negligible; the contour sums then lose all digits to
    /// cancellation (or overflow), so densities tied to that event are set to zero.
    fn negligible(&self, x: f64) -> bool {
        self.lower_tail_bound(x) < NEGLIGIBLE
    }

    /// `μ_p(t, x)`.
    pub(crate) fn mu(&self, x: f64) -> Result<f64> {
        if self.negligible(x) {
            return Ok(0.0);
        }
        self.contour.combine(self.exponent.iter().map(|f| (-f * x).exp()))
    }

    /// `P(σ(x) ≤ t)`.
    pub(crate) fn cdf(&self, x: f64) -> Result<f64> {
        if self.negligible(x) {
            return Ok(0.0);
        }
        self.contour
            .combine(self.exponent.iter().zip(&self.contour.points).map(|(f, (z, _))| (-f * x).exp() / z))
    }

    /// `L^{-1}[(E f(λ)/λ) exp(-x E f(λ))](t)`, the density of `L(t)` at `x`.
    pub(crate) fn direct_l(&self, x: f64) -> Result<f64> {
        // P(L(t) ≥ x) ≤ P(σ(x) ≤ t)
        if self.negligible(x) {
            return Ok(0.0);
        }
        self.contour
            .combine(self.exponent.iter().zip(&self.contour.points).map(|(f, (z, _))| f / z * (-f * x).exp()))
    }
}

/// Cells of the product-integration rule on `u = t - s ∈ [0, t/2]`.
const PRODUCT_CELLS: usize = 96;
/// Step of the fixed tanh–sinh rule on `s ∈ [s0, t/2]`.
const HEAD_STEP: f64 = 1.0 / 64.0;
/// `s0 / t`; the mass of `σ(x)` below `s0` is weighted by `E ν̄(t, Y)`.
const HEAD_CUT: f64 = 1e-10;

/// `l_p(x, t) = E b(Y) μ_p(t, x) + ∫_0^t μ_p(s, x) E ν̄(t - s, Y) ds` on a grid of `x`.
///
/// The convolution is split at `t/2`. On `[s0, t/2]` a fixed tanh–sinh rule is used,
/// and `(0, s0)` contributes `P(σ(x) ≤ s0) E ν̄(t, Y)`;
/// on `[t/2, t]` the density is interpolated linearly in `u = t - s` over a mesh
/// graded towards `u = 0` and integrated exactly against the kernel, whose cell
/// moments come from the closed-form cumulative tail.
pub fn inverse_density(mixed: &MixedExponent, x_grid: &[f64], t: f64, cfg: &InversionConfig) -> Result<DensityGrid> {
    require_density(mixed)?;
    check_grid(x_grid, "space")?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("time must be positive, got {t}")));
    }
    let half = 0.5 * t;
    let s0 = HEAD_CUT * t;
    let k_at_t = mixed.mixed_tail(t);
    let head: Vec<(f64, f64)> = quad::tanh_sinh_rule(s0, half, HEAD_STEP)
        .into_iter()
        .map(|(s, w)| (s, w * mixed.mixed_tail(t - s)))
        .collect();
    // tail: u in [0, t/2], s = t - u
    let mesh: Vec<f64> = (0..=PRODUCT_CELLS)
        .map(|i| half * (i as f64 / PRODUCT_CELLS as f64).powi(2))
        .collect();
    let tail_weights = product_weights(mixed, &mesh);
    let mut s_nodes: Vec<f64> = head.iter().map(|p| p.0).collect();
    s_nodes.extend(mesh.iter().map(|&u| t - u));
    s_nodes.push(t);
    s_nodes.push(s0);
    let contours = s_nodes
        .par_iter()
        .map(|&s| ExponentOnContour::new(mixed, s, cfg))
        .collect::<Result<Vec<_>>>()?;
    let (head_c, rest) = contours.split_at(head.len());
    let (mesh_c, at_t) = rest.split_at(mesh.len());
    let drift = mixed.mixed_drift();
    let raw = x_grid
        .par_iter()
        .map(|&x| -> Result<f64> {
            let mut acc = 0.0;
            for ((_, w), c) in head.iter().zip(head_c) {
                acc += w * c.mu(x)?;
            }
            for (w, c) in tail_weights.iter().zip(mesh_c) {
                acc += w * c.mu(x)?;
            }
            if drift > 0.0 {
                acc += drift * at_t[0].mu(x)?;
            }
            acc += k_at_t * at_t[1].cdf(x)?.max(0.0);
            Ok(acc)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(DensityGrid::from_raw(
        DensityKind::L,
        x_grid.to_vec(),
        raw,
        serde_json::json!({ "t": t, "route": "renewal-convolution", "contour_nodes": cfg.nodes }),
    ))
}

/// Weights `W_i` with `∫_0^{u_M} K(u) g(u) du ≈ Σ W_i g(u_i)` for `g` linear on each cell.
fn product_weights(mixed: &MixedExponent, mesh: &[f64]) -> Vec<f64> {
    let cum = |u: f64| mixed.mixed_cumulative_tail(u);
    let mut weights = vec![0.0; mesh.len()];
    for i in 0..mesh.len() - 1 {
        let (a, b) = (mesh[i], mesh[i + 1]);
        let m0 = cum(b) - cum(a);
        let int_c: f64 = quad::gauss_legendre_on(8, a, b).into_iter().map(|(u, w)| w * cum(u)).sum();
        let m1 = b * cum(b) - a * cum(a) - int_c;
        // g(u) ≈ g(a) (b - u)/(b - a) + g(b) (u - a)/(b - a)
        let d = b - a;
        weights[i] += (b * m0 - m1) / d;
        weights[i + 1] += (m1 - a * m0) / d;
    }
    weights
}

/// `l_p(x, t)` by inverting `(E f(λ)/λ) exp(-x E f(λ))` directly; a cross-check for
/// [`inverse_density`].
pub fn inverse_density_direct(mixed: &MixedExponent, x_grid: &[f64], t: f64, cfg: &InversionConfig) -> Result<DensityGrid> {
    check_grid(x_grid, "space")?;
    let c = ExponentOnContour::new(mixed, t, cfg)?;
    let raw = x_grid.iter().map(|&x| c.direct_l(x)).collect::<Result<Vec<f64>>>()?;
    Ok(DensityGrid::from_raw(
        DensityKind::L,
        x_grid.to_vec(),
        raw,
        serde_json::json!({ "t": t, "route": "direct", "contour_nodes": cfg.nodes }),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::Family;
    use crate::measure::{MeasureSpec, MixingMeasure};
    use std::f64::consts::PI;

    fn stable(beta: f64) -> MixedExponent {
        MixedExponent::new(Family::stable(), MixingMeasure::new(MeasureSpec::Dirac { y: beta }).unwrap()).unwrap()
    }

    #[test]
    fn elementary_inversions() {
        let cfg = InversionConfig::default();
        for t in [0.1, 1.0, 7.0] {
            assert!((invert_laplace(|z| z.inv(), t, &cfg).unwrap() - 1.0).abs() < 1e-8);
        }
        assert!((invert_laplace(|z| (z * z).inv(), 2.0, &cfg).unwrap() - 2.0).abs() < 1e-8);
        let v = invert_laplace(|z| (z + 1.0).inv(), 1.0, &cfg).unwrap();
        assert!((v - (-1f64).exp()).abs() < 1e-8);
    }

    #[test]
    fn hyperbolic_contours() {
        let cfg = InversionConfig::default();
        assert_eq!(ContourShape::for_sector(PI, &cfg).unwrap(), ContourShape::Talbot);
        for beta in [0.55, 0.7, 0.9] {
            let shape = ContourShape::for_sector(PI / (2.0 * beta), &cfg).unwrap();
            let ContourShape::Hyperbola { alpha, .. } = shape else { panic!("{shape:?}") };
            assert!(FRAC_PI_2 + alpha < PI / (2.0 * beta));
            for t in [0.01, 1.0, 50.0] {
                let c = Contour::with_shape(t, &cfg, shape).unwrap();
                assert!((c.invert(|z| z.inv()).unwrap() - 1.0).abs() < 1e-11);
                assert!((c.invert(|z| (z + 1.0).inv()).unwrap() - (-t).exp()).abs() < 1e-11);
                let closed = t.powf(-1.5) * (-0.25 / t).exp() / (2.0 * PI.sqrt());
                assert!((c.invert(|z| (-z.sqrt()).exp()).unwrap() - closed).abs() < 1e-11);
            }
        }
    }

    #[test]
    fn rejects_coarse_contour() {
        let cfg = InversionConfig { nodes: 4, scale: 1.0 };
        assert!(matches!(invert_laplace(|z| z.inv(), 1.0, &cfg), Err(Error::Config(_))));
    }

    #[test]
    fn stable_half_density() {
        let m = stable(0.5);
        let g = subordinator_density(&m, 1.0, &[1.0, 4.0, 9.0], &InversionConfig::default()).unwrap();
        let closed = |t: f64| t.powf(-1.5) * (-0.25 / t).exp() / (2.0 * PI.sqrt());
        assert!((g.values[0] - 0.219_695_644_733_861).abs() < 1e-8);
        for (t, v) in g.points.iter().zip(&g.values) {
            assert!((v - closed(*t)).abs() < 1e-9);
        }
        // independent check of the closed form: its Laplace transform is e^{-√λ}
        for lam in [0.5, 2.0] {
            let lap = quad::exp_sinh(|t| (-lam * t).exp() * closed(t), 1e-12).unwrap().value;
            assert!((lap - (-f64::sqrt(lam)).exp()).abs() < 1e-10);
        }
    }

    #[test]
    fn drift_has_no_density() {
        let m = MixedExponent::new(Family::drift(), MixingMeasure::new(MeasureSpec::Dirac { y: 1.0 }).unwrap()).unwrap();
        assert!(matches!(
            subordinator_density(&m, 1.0, &[1.0], &InversionConfig::default()),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn renewal_for_drift_and_stable() {
        let cfg = InversionConfig::default();
        let d = MixedExponent::new(Family::drift(), MixingMeasure::new(MeasureSpec::Dirac { y: 2.0 }).unwrap()).unwrap();
        let u = renewal_function(&d, &[0.5, 3.0], &cfg).unwrap();
        assert!((u.values[0] - 0.25).abs() < 1e-9 && (u.values[1] - 1.5).abs() < 1e-9);
        let s = stable(0.5);
        let u = renewal_function(&s, &[1.0, 10.0], &cfg).unwrap();
        for (t, v) in u.points.iter().zip(&u.values) {
            assert!((v - t.sqrt() / crate::special::gamma(1.5)).abs() < 1e-9);
        }
    }

    #[test]
    fn convolution_and_direct_routes_agree() {
        let m = stable(0.5);
        let xs = quad::linspace(0.05, 4.0, 80);
        let cfg = InversionConfig::default();
        let conv = inverse_density(&m, &xs, 1.0, &cfg).unwrap();
        let direct = inverse_density_direct(&m, &xs, 1.0, &cfg).unwrap();
        for ((x, a), b) in xs.iter().zip(&conv.values).zip(&direct.values) {
            let exact = (-x * x / 4.0).exp() / PI.sqrt();
            assert!((b - exact).abs() < 1e-8, "direct x={x}");
            assert!((a - exact).abs() < 1e-4, "convolution x={x}: {a} vs {exact}");
        }
    }

    #[test]
    fn inverse_density_of_gamma_mixture_is_normalized() {
        let m = MixedExponent::new(Family::gamma(), MixingMeasure::new(MeasureSpec::Uniform { lo: 0.5, hi: 2.0 }).unwrap()).unwrap();
        let xs = quad::linspace(1e-3, 40.0, 4000);
        let l = inverse_density(&m, &xs, 1.0, &InversionConfig::default()).unwrap();
        assert!((l.mass() - 1.0).abs() < 2e-3, "{}", l.mass());
    }

    #[test]
    fn heavy_indices_at_small_times() {
        // for β > 1/2, exp(-x λ^β) blows up on part of the contour when x t^{-β} is large
        let cfg = InversionConfig::default();
        let xs = quad::linspace(0.01, 6.0, 600);
        for m in [
            stable(0.9),
            MixedExponent::new(Family::stable(), MixingMeasure::new(MeasureSpec::Uniform { lo: 0.3, hi: 0.7 }).unwrap()).unwrap(),
        ] {
            let conv = inverse_density(&m, &xs, 1.0, &cfg).unwrap();
            let direct = inverse_density_direct(&m, &xs, 1.0, &cfg).unwrap();
            let gap = conv.values.iter().zip(&direct.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            assert!(gap < 1e-3, "{gap}");
            assert!((direct.mass() + 0.01 * direct.values[0] - 1.0).abs() < 2e-3, "{}", direct.mass());
        }
        let mu = subordinator_density(&stable(0.9), 5.0, &[1e-6, 1e-3], &cfg).unwrap();
        assert_eq!(mu.values, vec![0.0, 0.0]);
        assert!(mu.values.iter().all(|v| v.is_finite()));
    }
}
