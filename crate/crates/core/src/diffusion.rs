//! Slow diffusions `B(L(t))`: the fundamental solution by subordination, the mean
//! square displacement, the regular-variation index and the diffusivity limit.

use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::export;
use crate::mixing::MixedExponent;
use crate::operators::{apply_regularized, apply_rl, build_kernel, TimeGrid};
use crate::quad::{self, Extended, ExpSinhRule};
use crate::special::gamma;
use crate::transforms::{renewal_at, renewal_function, ExponentOnContour, InversionConfig};

/// `q(|x|, t)` on a radial grid.
#[derive(Debug, Clone, Serialize)]
pub struct DiffusionField {
    pub r: Vec<f64>,
    pub dimension: usize,
    pub t: f64,
    pub q: Vec<f64>,
}

impl DiffusionField {
    /// `∫_{R^n} q dx` by the trapezoid rule in `r` (meaningful when the grid starts at 0
    /// and reaches into the tail).
    pub fn mass(&self) -> f64 {
        let n = self.dimension as f64;
        let surface = 2.0 * std::f64::consts::PI.powf(n / 2.0) / gamma(n / 2.0);
        let integrand: Vec<f64> = self
            .r
            .iter()
            .zip(&self.q)
            .map(|(&r, &q)| if r == 0.0 && self.dimension > 1 { 0.0 } else { surface * r.powf(n - 1.0) * q })
            .collect();
        quad::trapezoid(&self.r, &integrand)
    }

    pub fn write_csv(&self, path: &Path) -> Result<()> {
        export::write_csv_file(
            path,
            &["r", "t", "q"],
            self.r.iter().zip(&self.q).map(|(&r, &q)| vec![r, self.t, q]),
        )
    }
}

/// `(4π s)^{-n/2} exp(-r²/(4s))`.
pub fn heat_kernel(r: f64, s: f64, n: usize) -> f64 {
    (4.0 * std::f64::consts::PI * s).powf(-(n as f64) / 2.0) * (-r * r / (4.0 * s)).exp()
}

/// Quadrature in operational time `s` against the law of `L(t)`.
struct InverseLaw {
    /// `(s_j, w_j l(s_j, t))`, or a single atom for a deterministic `L(t)`.
    nodes: Vec<(f64, f64)>,
}

impl InverseLaw {
    fn new(mixed: &MixedExponent, t: f64, cfg: &InversionConfig) -> Result<Self> {
        if mixed.total_mass() == 0.0 && mixed.mixed_kill() == 0.0 {
            // pure drift: L(t) = t / E b
            return Ok(Self { nodes: vec![(t / mixed.mixed_drift(), 1.0)] });
        }
        let on_contour = ExponentOnContour::new(mixed, t, cfg)?;
        let scale = renewal_at(mixed, t, cfg)?.max(f64::MIN_POSITIVE);
        let rule = ExpSinhRule::new(1.0 / 32.0, -4.5, 2.7);
        let mut nodes = Vec::with_capacity(rule.nodes.len());
        for (s, w) in rule.scaled(scale) {
            let l = on_contour.direct_l(s)?;
            nodes.push((s, w * l.max(0.0)));
        }
        Ok(Self { nodes })
    }

    fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.nodes.iter().map(|&(s, w)| w * g(s)).sum()
    }
}

/// `q(x, t) = ∫_0^∞ (4π s)^{-n/2} e^{-|x|²/(4s)} l_p(s, t) ds` on a radial grid,
/// with `l_p` from the direct transform route.
pub fn fundamental_solution(mixed: &MixedExponent, r_grid: &[f64], t: f64, n: usize, cfg: &InversionConfig) -> Result<DiffusionField> {
    if n == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    if r_grid.iter().any(|&r| !(r >= 0.0 && r.is_finite())) {
        return Err(Error::Domain("radial grid must be nonnegative".into()));
    }
    let law = InverseLaw::new(mixed, t, cfg)?;
    let q = r_grid.iter().map(|&r| law.expect(|s| heat_kernel(r, s, n))).collect();
    Ok(DiffusionField { r: r_grid.to_vec(), dimension: n, t, q })
}

/// Mean square displacement curve with its asymptote.
#[derive(Debug, Clone, Serialize)]
pub struct MsdCurve {
    pub t: Vec<f64>,
    pub msd: Vec<f64>,
    /// `1/E f(1/t, Y)`.
    pub asymptote: Vec<f64>,
    pub alpha: f64,
}

impl MsdCurve {
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        export::write_csv_file(
            path,
            &["t", "msd", "asymptote"],
            (0..self.t.len()).map(|i| vec![self.t[i], self.msd[i], self.asymptote[i]]),
        )
    }
}

/// `M(t) = 2n U(t)`.
pub fn msd(mixed: &MixedExponent, t_grid: &[f64], n: usize, cfg: &InversionConfig) -> Result<MsdCurve> {
    if n == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let u = renewal_function(mixed, t_grid, cfg)?;
    let msd = u.values.iter().map(|v| 2.0 * n as f64 * v).collect();
    let asymptote = t_grid.iter().map(|&t| 1.0 / mixed.mixed_f(1.0 / t)).collect();
    Ok(MsdCurve { t: t_grid.to_vec(), msd, asymptote, alpha: regular_variation_index(mixed).alpha })
}

/// Estimate of the index `α` in `E f(λ x, Y)/E f(λ, Y) → x^α` as `λ → 0`.
#[derive(Debug, Clone, Serialize)]
pub struct RegularVariation {
    pub alpha: f64,
    /// `(λ, log₂(E f(2λ)/E f(λ)))`.
    pub raw: Vec<(f64, f64)>,
    /// Largest minus smallest raw estimate.
    pub spread: f64,
    pub slowly_varying: bool,
    pub indeterminate: bool,
}

/// `α̂(λ) = log₂(E f(2λ)/E f(λ))` at `λ = 1e-4, 1e-5, 1e-6`, extrapolated to
/// `λ → 0` by the quadratic through the three points in `1/|ln λ|`.
///
/// Estimates below 0.03 with a visible drift are reported as 0 (slowly varying);
/// a spread above 0.05 is flagged as indeterminate.
pub fn regular_variation_index(mixed: &MixedExponent) -> RegularVariation {
    let raw: Vec<(f64, f64)> = [1e-4, 1e-5, 1e-6]
        .iter()
        .map(|&lam| (lam, (mixed.mixed_f(2.0 * lam) / mixed.mixed_f(lam)).log2()))
        .collect();
    let lo = raw.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let hi = raw.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
    let spread = hi - lo;
    // Lagrange extrapolation to e = 0 in e = 1/|ln λ|
    let e: Vec<f64> = raw.iter().map(|p| 1.0 / p.0.ln().abs()).collect();
    let mut extrapolated = 0.0;
    for i in 0..3 {
        let mut basis = 1.0;
        for j in 0..3 {
            if j != i {
                basis *= (0.0 - e[j]) / (e[i] - e[j]);
            }
        }
        extrapolated += basis * raw[i].1;
    }
    let slowly_varying = extrapolated.abs() < 0.03 && spread > 1e-3;
    let alpha = if slowly_varying { 0.0 } else { extrapolated.clamp(0.0, 1.0) };
    RegularVariation { alpha, raw, spread, slowly_varying, indeterminate: spread > 0.05 }
}

/// `Γ(1 + α) M(t)/(2n) ÷ (1/E f(1/t, Y))`.
pub fn msd_asymptotic_ratio(mixed: &MixedExponent, t: f64, cfg: &InversionConfig) -> Result<f64> {
    let alpha = regular_variation_index(mixed).alpha;
    Ok(gamma(1.0 + alpha) * renewal_at(mixed, t, cfg)? * mixed.mixed_f(1.0 / t))
}

/// `lim t / (Γ(1+α) M(t)/2n) = E b(Y) + ∫_0^∞ E ν̄(s, Y) ds`, possibly infinite.
pub fn diffusivity_limit(mixed: &MixedExponent) -> Result<Extended> {
    if mixed.mixed_kill() > 0.0 {
        return Ok(Extended::Infinite);
    }
    let breaks = mixed.breakpoints();
    let tail = |s: f64| mixed.mixed_jump_tail(s);
    let integral = if breaks.is_empty() {
        quad::integrate_to_infinity(tail, 1e-10)?
    } else {
        // piecewise up to the last breakpoint, then the smooth remainder
        let mut pts = vec![0.0];
        pts.extend(breaks.iter().copied().filter(|&b| b > 0.0));
        let head: f64 = pts
            .windows(2)
            .map(|w| quad::tanh_sinh(tail, w[0], w[1], 1e-12).map(|e| e.value))
            .sum::<Result<f64>>()?;
        let last = *pts.last().expect("nonempty");
        match quad::integrate_to_infinity(|s| tail(last + s), 1e-10)? {
            Extended::Finite(v) => Extended::Finite(head + v),
            Extended::Infinite => Extended::Infinite,
        }
    };
    Ok(match integral {
        Extended::Finite(v) => Extended::Finite(mixed.mixed_drift() + v),
        Extended::Infinite => Extended::Infinite,
    })
}

/// Max-norm residual of a governing equation over an interior window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PdeResidual {
    pub max_abs: f64,
    pub h: f64,
    pub dx: f64,
}

/// Residual of `D_t q = Δ q` (regularized operator in time, radial second
/// differences in space) over `t ∈ [t_lo, t_hi]`, `r ∈ [r_lo, r_hi]`.
pub fn pde_residual(
    mixed: &MixedExponent,
    n: usize,
    h: f64,
    dx: f64,
    window: ([f64; 2], [f64; 2]),
    cfg: &InversionConfig,
) -> Result<PdeResidual> {
    let ([t_lo, t_hi], [r_lo, r_hi]) = window;
    check_window(h, dx, t_lo, t_hi, r_lo, r_hi)?;
    let grid = TimeGrid::new(h, (t_hi / h).round() as usize + 1)?;
    let r: Vec<f64> = space_grid(r_lo, r_hi, dx);
    // field[i][j] = q(r_j, t_i); q(r, 0) = 0 away from the origin
    let fields = (1..grid.count)
        .into_par_iter()
        .map(|i| fundamental_solution(mixed, &r, grid.point(i), n, cfg).map(|f| f.q))
        .collect::<Result<Vec<_>>>()?;
    let kernel = build_kernel(mixed, grid)?;
    let nf = n as f64;
    let mut worst = 0.0f64;
    for j in 1..r.len() - 1 {
        let mut series = vec![0.0];
        series.extend(fields.iter().map(|f| f[j]));
        let dt = apply_regularized(&series, &kernel)?;
        for (k, &t) in dt.points.iter().enumerate() {
            if t < t_lo - 1e-12 {
                continue;
            }
            let f = &fields[k];
            let lap = (f[j + 1] - 2.0 * f[j] + f[j - 1]) / (dx * dx) + (nf - 1.0) / r[j] * (f[j + 1] - f[j - 1]) / (2.0 * dx);
            worst = worst.max((dt.values[k] - lap).abs());
        }
    }
    Ok(PdeResidual { max_abs: worst, h, dx })
}

/// Residual of `D_t l + ∂_x l = 0` for the inverse density (`x > 0`), with `l` from
/// the direct transform route and a central difference in `x`.
pub fn inverse_density_residual(
    mixed: &MixedExponent,
    h: f64,
    dx: f64,
    window: ([f64; 2], [f64; 2]),
    cfg: &InversionConfig,
) -> Result<PdeResidual> {
    let ([t_lo, t_hi], [x_lo, x_hi]) = window;
    check_window(h, dx, t_lo, t_hi, x_lo, x_hi)?;
    let grid = TimeGrid::new(h, (t_hi / h).round() as usize + 1)?;
    let x = space_grid(x_lo, x_hi, dx);
    let fields = (1..grid.count)
        .into_par_iter()
        .map(|i| crate::transforms::inverse_density_direct(mixed, &x, grid.point(i), cfg).map(|g| g.values))
        .collect::<Result<Vec<_>>>()?;
    let kernel = build_kernel(mixed, grid)?;
    let mut worst = 0.0f64;
    for j in 1..x.len() - 1 {
        let mut series = vec![0.0];
        series.extend(fields.iter().map(|f| f[j]));
        let dt = apply_rl(&series, &kernel)?;
        for (k, &t) in dt.points.iter().enumerate() {
            if t < t_lo - 1e-12 {
                continue;
            }
            let f = &fields[k];
            let dl = (f[j + 1] - f[j - 1]) / (2.0 * dx);
            worst = worst.max((dt.values[k] + dl).abs());
        }
    }
    Ok(PdeResidual { max_abs: worst, h, dx })
}

fn check_window(h: f64, dx: f64, t_lo: f64, t_hi: f64, x_lo: f64, x_hi: f64) -> Result<()> {
    if !(h > 0.0 && dx > 0.0 && 0.0 < t_lo && t_lo < t_hi && 0.0 < x_lo && x_lo < x_hi) {
        return Err(Error::Config("residual window needs 0 < t_lo < t_hi, 0 < x_lo < x_hi and positive steps".into()));
    }
    if x_lo <= dx {
        return Err(Error::Config("spatial window must stay one step away from the origin".into()));
    }
    Ok(())
}

/// `x_lo - dx, x_lo, ..., x_hi + dx` (one ghost point on each side).
fn space_grid(lo: f64, hi: f64, dx: f64) -> Vec<f64> {
    let m = ((hi - lo) / dx).round() as usize;
    (0..=m + 2).map(|i| lo + (i as f64 - 1.0) * dx).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::{Family, ParamMap};
    use crate::measure::{MeasureSpec, MixingMeasure};
    use std::f64::consts::PI;

    fn mixed(f: Family, m: MeasureSpec) -> MixedExponent {
        MixedExponent::new(f, MixingMeasure::new(m).unwrap()).unwrap()
    }

    #[test]
    fn drift_gives_heat_kernel() {
        let d = mixed(Family::drift(), MeasureSpec::Dirac { y: 1.0 });
        for n in 1..=3 {
            let q = fundamental_solution(&d, &[0.0, 0.5], 1.0, n, &InversionConfig::default()).unwrap();
            assert!((q.q[0] - (4.0 * PI).powf(-(n as f64) / 2.0)).abs() < 1e-15);
        }
        let c = msd(&d, &[1.0, 3.0], 1, &InversionConfig::default()).unwrap();
        assert!((c.msd[0] - 2.0).abs() < 1e-9 && (c.msd[1] - 6.0).abs() < 1e-8);
        assert_eq!(c.alpha, 1.0);
    }

    #[test]
    fn stable_half_at_origin() {
        let s = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
        let q = fundamental_solution(&s, &[0.0, 1.0], 1.0, 1, &InversionConfig::default()).unwrap();
        let closed = gamma(0.25) / (2.0 * 2f64.sqrt() * PI);
        assert!((q.q[0] - closed).abs() < 1e-8, "{} vs {closed}", q.q[0]);
        // q(1, 1) = ∫ heat(1, s) e^{-s²/4}/√π ds by an adaptive oracle
        let oracle = quad::exp_sinh(|s| heat_kernel(1.0, s, 1) * (-s * s / 4.0).exp() / PI.sqrt(), 1e-12).unwrap().value;
        assert!((q.q[1] - oracle).abs() < 1e-9);
    }

    #[test]
    fn mass_is_conserved() {
        let s = mixed(Family::gamma(), MeasureSpec::Uniform { lo: 0.5, hi: 2.0 });
        let r = quad::linspace(0.0, 30.0, 6001);
        let q = fundamental_solution(&s, &r, 2.0, 1, &InversionConfig::default()).unwrap();
        assert!((2.0 * quad::trapezoid(&r, &q.q) - 1.0).abs() < 1e-3);
        assert!((q.mass() - 1.0).abs() < 1e-3);
    }

    #[test]
    fn indices() {
        let s = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.3 });
        assert!((regular_variation_index(&s).alpha - 0.3).abs() < 1e-12);
        let d = mixed(Family::drift(), MeasureSpec::Dirac { y: 2.0 });
        assert_eq!(regular_variation_index(&d).alpha, 1.0);
        let u = mixed(Family::stable(), MeasureSpec::Uniform { lo: 0.0, hi: 1.0 });
        let rv = regular_variation_index(&u);
        assert_eq!(rv.alpha, 0.0);
        assert!(rv.slowly_varying);
        let g = mixed(Family::gamma(), MeasureSpec::Dirac { y: 1.0 });
        assert!((regular_variation_index(&g).alpha - 1.0).abs() < 1e-3);
    }

    #[test]
    fn diffusivity_limits() {
        let g = mixed(Family::gamma(), MeasureSpec::Dirac { y: 2.0 });
        assert!((diffusivity_limit(&g).unwrap().value() - 0.5).abs() < 1e-8);
        let s = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
        assert_eq!(diffusivity_limit(&s).unwrap(), Extended::Infinite);
        let cp = Family::CompoundPoisson { rate: ParamMap::Constant { value: 2.0 }, jump: 0.75 };
        let c = mixed(cp, MeasureSpec::Dirac { y: 1.0 });
        assert!((diffusivity_limit(&c).unwrap().value() - 1.5).abs() < 1e-9);
        let k = Family::Killed { rate: ParamMap::Constant { value: 0.1 }, base: Some(Box::new(Family::gamma())) };
        assert_eq!(diffusivity_limit(&mixed(k, MeasureSpec::Dirac { y: 1.0 })).unwrap(), Extended::Infinite);
    }

    #[test]
    fn stable_ratio_is_one() {
        let s = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
        let r = msd_asymptotic_ratio(&s, 1e4, &InversionConfig::default()).unwrap();
        assert!((r - 1.0).abs() < 1e-8);
    }

    #[test]
    fn heat_equation_residual_for_drift() {
        let d = mixed(Family::drift(), MeasureSpec::Dirac { y: 1.0 });
        let cfg = InversionConfig::default();
        let coarse = pde_residual(&d, 1, 4e-3, 4e-2, ([0.5, 1.0], [0.1, 3.0]), &cfg).unwrap();
        let fine = pde_residual(&d, 1, 2e-3, 2e-2, ([0.5, 1.0], [0.1, 3.0]), &cfg).unwrap();
        assert!(fine.max_abs < coarse.max_abs / 1.8, "{coarse:?} {fine:?}");
    }
}
