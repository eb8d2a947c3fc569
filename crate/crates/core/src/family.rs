//! Parametrized Bernstein families `y ↦ (a(y), b(y), ν(ds, y))`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::{exp_integral_e1, recip_gamma};

/// How a family coefficient depends on the mixing parameter `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "map", rename_all = "kebab-case")]
pub enum ParamMap {
    #[default]
    Identity,
    Constant {
        value: f64,
    },
    Linear {
        scale: f64,
        #[serde(default)]
        offset: f64,
    },
    /// `coef · y^exponent`
    Power {
        coef: f64,
        exponent: f64,
    },
}

impl ParamMap {
    pub fn eval(&self, y: f64) -> f64 {
        match *self {
            ParamMap::Identity => y,
            ParamMap::Constant { value } => value,
            ParamMap::Linear { scale, offset } => scale * y + offset,
            ParamMap::Power { coef, exponent } => coef * y.powf(exponent),
        }
    }
}

/// Built-in registry of parametrized Bernstein families.
///
/// Every family exposes the jump tail `ν((s, ∞), y)` in closed form together with
/// its antiderivative `∫_0^s ν((w, ∞), y) dw`, which the convolution kernels use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Family {
    /// `f(λ, y) = λ^{β(y)}` with `β(y) ∈ (0, 1)`.
    Stable {
        #[serde(default)]
        exponent: ParamMap,
    },
    /// `f(λ, y) = log(1 + λ / r(y))`, Lévy density `e^{-r s} / s`.
    Gamma {
        #[serde(default)]
        rate: ParamMap,
    },
    /// `f(λ, y) = b(y) λ`.
    Drift {
        #[serde(default)]
        slope: ParamMap,
    },
    /// Adds a killing rate `a(y)` to an optional base family.
    Killed {
        #[serde(default)]
        rate: ParamMap,
        #[serde(default)]
        base: Option<Box<Family>>,
    },
    /// `ν(ds, y) = r(y) δ_jump(ds)`.
    CompoundPoisson {
        #[serde(default)]
        rate: ParamMap,
        jump: f64,
    },
    /// `ν((s, ∞), y) = r(y) T(s)` with `T` piecewise linear through `[s, T(s)]` pairs,
    /// starting at `s = 0` and ending at `T = 0`.
    CustomTabulated {
        #[serde(default)]
        rate: ParamMap,
        tail: Vec<[f64; 2]>,
    },
}

pub const REGISTRY: &str = "stable, gamma, drift, killed, compound-poisson, custom-tabulated";

impl Family {
    pub fn stable() -> Self {
        Family::Stable { exponent: ParamMap::Identity }
    }

    pub fn gamma() -> Self {
        Family::Gamma { rate: ParamMap::Identity }
    }

    pub fn drift() -> Self {
        Family::Drift { slope: ParamMap::Identity }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Family::Stable { .. } => "stable",
            Family::Gamma { .. } => "gamma",
            Family::Drift { .. } => "drift",
            Family::Killed { .. } => "killed",
            Family::CompoundPoisson { .. } => "compound-poisson",
            Family::CustomTabulated { .. } => "custom-tabulated",
        }
    }

    /// Checks parameters that do not depend on `y` (table shape, jump size).
    pub fn validate_shape(&self) -> Result<()> {
        match self {
            Family::CompoundPoisson { jump, .. } => {
                if !(*jump > 0.0 && jump.is_finite()) {
                    return Err(Error::Config(format!("compound-poisson jump must be positive, got {jump}")));
                }
            }
            Family::CustomTabulated { tail, .. } => {
                if tail.len() < 2 {
                    return Err(Error::Config("custom-tabulated tail needs at least two points".into()));
                }
                if tail[0][0] != 0.0 {
                    return Err(Error::Config("custom-tabulated tail must start at s = 0".into()));
                }
                if tail.last().map(|p| p[1]) != Some(0.0) {
                    return Err(Error::Config("custom-tabulated tail must end at value 0".into()));
                }
                for w in tail.windows(2) {
                    if !(w[1][0] > w[0][0]) || w[1][1] > w[0][1] || w[1][1] < 0.0 {
                        return Err(Error::Config(
                            "custom-tabulated tail must have increasing s and nonincreasing, nonnegative values".into(),
                        ));
                    }
                }
            }
            Family::Killed { base: Some(base), .. } => base.validate_shape()?,
            _ => {}
        }
        Ok(())
    }

    /// Parameter-domain check for a single `y`.
    pub fn check_param(&self, y: f64) -> Result<()> {
        let bad = |reason: String| Err(Error::Parameter { y, reason });
        if !y.is_finite() {
            return bad("parameter is not finite".into());
        }
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                if !(b > 0.0 && b < 1.0) {
                    return bad(format!("stable exponent {b} not in (0, 1)"));
                }
            }
            Family::Gamma { rate } => {
                let r = rate.eval(y);
                if !(r > 0.0 && r.is_finite()) {
                    return bad(format!("gamma rate {r} not positive"));
                }
            }
            Family::Drift { slope } => {
                let b = slope.eval(y);
                if !(b >= 0.0 && b.is_finite()) {
                    return bad(format!("drift {b} negative or not finite"));
                }
            }
            Family::Killed { rate, base } => {
                let a = rate.eval(y);
                if !(a >= 0.0 && a.is_finite()) {
                    return bad(format!("killing rate {a} negative or not finite"));
                }
                if let Some(base) = base {
                    base.check_param(y)?;
                }
            }
            Family::CompoundPoisson { rate, .. } | Family::CustomTabulated { rate, .. } => {
                let r = rate.eval(y);
                if !(r >= 0.0 && r.is_finite()) {
                    return bad(format!("rate {r} negative or not finite"));
                }
            }
        }
        Ok(())
    }

    /// Killing rate `a(y)`.
    pub fn kill(&self, y: f64) -> f64 {
        match self {
            Family::Killed { rate, base } => rate.eval(y) + base.as_ref().map_or(0.0, |b| b.kill(y)),
            _ => 0.0,
        }
    }

    /// Drift `b(y)`.
    pub fn drift_coef(&self, y: f64) -> f64 {
        match self {
            Family::Drift { slope } => slope.eval(y),
            Family::Killed { base: Some(b), .. } => b.drift_coef(y),
            _ => 0.0,
        }
    }

    /// Jump tail `ν((s, ∞), y)` for `s > 0`.
    pub fn jump_tail(&self, s: f64, y: f64) -> f64 {
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                s.powf(-b) * recip_gamma(1.0 - b)
            }
            Family::Gamma { rate } => exp_integral_e1(rate.eval(y) * s),
            Family::Drift { .. } => 0.0,
            Family::Killed { base, .. } => base.as_ref().map_or(0.0, |b| b.jump_tail(s, y)),
            Family::CompoundPoisson { rate, jump } => {
                if s < *jump {
                    rate.eval(y)
                } else {
                    0.0
                }
            }
            Family::CustomTabulated { rate, tail } => rate.eval(y) * table_value(tail, s),
        }
    }

    /// `ν̄(s, y) = a(y) + ν((s, ∞), y)`.
    pub fn tail_bar(&self, s: f64, y: f64) -> f64 {
        self.kill(y) + self.jump_tail(s, y)
    }

    /// Lévy density `ν(ds, y)/ds` where the Lévy measure is absolutely continuous.
    pub fn levy_density(&self, s: f64, y: f64) -> Option<f64> {
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                Some(b * s.powf(-b - 1.0) * recip_gamma(1.0 - b))
            }
            Family::Gamma { rate } => Some((-rate.eval(y) * s).exp() / s),
            Family::Drift { .. } => Some(0.0),
            Family::Killed { base, .. } => match base {
                Some(b) => b.levy_density(s, y),
                None => Some(0.0),
            },
            Family::CompoundPoisson { .. } => None,
            Family::CustomTabulated { rate, tail } => {
                let r = rate.eval(y);
                Some(
                    tail.windows(2)
                        .find(|w| s >= w[0][0] && s < w[1][0])
                        .map_or(0.0, |w| r * (w[0][1] - w[1][1]) / (w[1][0] - w[0][0])),
                )
            }
        }
    }

    /// `∫_0^s ν((w, ∞), y) dw` (killing excluded).
    pub fn cumulative_jump_tail(&self, s: f64, y: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                s.powf(1.0 - b) * recip_gamma(2.0 - b)
            }
            Family::Gamma { rate } => {
                let r = rate.eval(y);
                s * exp_integral_e1(r * s) - (-r * s).exp_m1() / r
            }
            Family::Drift { .. } => 0.0,
            Family::Killed { base, .. } => base.as_ref().map_or(0.0, |b| b.cumulative_jump_tail(s, y)),
            Family::CompoundPoisson { rate, jump } => rate.eval(y) * s.min(*jump),
            Family::CustomTabulated { rate, tail } => rate.eval(y) * table_integral(tail, s),
        }
    }

    /// Total jump intensity `ν((0, ∞), y)`, possibly infinite.
    pub fn total_mass(&self, y: f64) -> f64 {
        match self {
            Family::Stable { .. } | Family::Gamma { .. } => f64::INFINITY,
            Family::Drift { .. } => 0.0,
            Family::Killed { base, .. } => base.as_ref().map_or(0.0, |b| b.total_mass(y)),
            Family::CompoundPoisson { rate, .. } => rate.eval(y),
            Family::CustomTabulated { rate, tail } => rate.eval(y) * tail[0][1],
        }
    }

    /// Mean jump `∫ s ν(ds, y) = ∫_0^∞ ν((s, ∞), y) ds`, possibly infinite.
    pub fn mean_jump(&self, y: f64) -> f64 {
        match self {
            Family::Stable { .. } => f64::INFINITY,
            Family::Gamma { rate } => 1.0 / rate.eval(y),
            Family::Drift { .. } => 0.0,
            Family::Killed { base, .. } => base.as_ref().map_or(0.0, |b| b.mean_jump(y)),
            Family::CompoundPoisson { rate, jump } => rate.eval(y) * jump,
            Family::CustomTabulated { rate, tail } => {
                rate.eval(y) * table_integral(tail, tail.last().map_or(0.0, |p| p[0]))
            }
        }
    }

    /// `f(λ, y)` for real `λ ≥ 0`.
    pub fn exponent(&self, lambda: f64, y: f64) -> f64 {
        match self {
            Family::Stable { exponent } => lambda.powf(exponent.eval(y)),
            Family::Gamma { rate } => (lambda / rate.eval(y)).ln_1p(),
            Family::Drift { slope } => slope.eval(y) * lambda,
            Family::Killed { rate, base } => {
                rate.eval(y) + base.as_ref().map_or(0.0, |b| b.exponent(lambda, y))
            }
            Family::CompoundPoisson { rate, jump } => -rate.eval(y) * (-lambda * jump).exp_m1(),
            Family::CustomTabulated { .. } => self.exponent_complex(Complex64::new(lambda, 0.0), y).re,
        }
    }

    /// Analytic continuation of `f(·, y)` to the cut plane `C \ (-∞, 0]`.
    pub fn exponent_complex(&self, z: Complex64, y: f64) -> Complex64 {
        match self {
            Family::Stable { exponent } => z.powf(exponent.eval(y)),
            Family::Gamma { rate } => (Complex64::new(1.0, 0.0) + z / rate.eval(y)).ln(),
            Family::Drift { slope } => z * slope.eval(y),
            Family::Killed { rate, base } => {
                Complex64::new(rate.eval(y), 0.0)
                    + base.as_ref().map_or(Complex64::new(0.0, 0.0), |b| b.exponent_complex(z, y))
            }
            Family::CompoundPoisson { rate, jump } => (Complex64::new(1.0, 0.0) - (-z * jump).exp()) * rate.eval(y),
            Family::CustomTabulated { rate, tail } => {
                // jump density is constant on each segment
                let mut acc = Complex64::new(0.0, 0.0);
                for w in tail.windows(2) {
                    let (s0, t0) = (w[0][0], w[0][1]);
                    let (s1, t1) = (w[1][0], w[1][1]);
                    let d = s1 - s0;
                    let mass = t0 - t1;
                    if mass == 0.0 {
                        continue;
                    }
                    // ∫_{s0}^{s1} (1 - e^{-z s}) ds / d
                    let inner = Complex64::new(1.0, 0.0) - (-z * s0).exp() * phi1(z * d);
                    acc += inner * mass;
                }
                acc * rate.eval(y)
            }
        }
    }

    /// Draws a jump from `ν(·, y)` conditioned on `(ε, ∞)`.
    pub fn sample_jump<R: Rng + ?Sized>(&self, y: f64, eps: f64, rng: &mut R) -> f64 {
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                let u = 1.0 - rng.random::<f64>();
                eps * u.powf(-1.0 / b)
            }
            Family::Gamma { rate } => sample_gamma_jump(rate.eval(y), eps, rng),
            Family::Drift { .. } => f64::NAN,
            Family::Killed { base, .. } => base.as_ref().map_or(f64::NAN, |b| b.sample_jump(y, eps, rng)),
            Family::CompoundPoisson { jump, .. } => *jump,
            Family::CustomTabulated { tail, .. } => {
                let level = table_value(tail, eps) * (1.0 - rng.random::<f64>());
                table_inverse(tail, eps, level)
            }
        }
    }

    /// `V(y) = ∫ (s ∧ 1) ν(ds, y) = ∫_0^1 ν((w, ∞), y) dw`.
    pub fn small_jump_index(&self, y: f64) -> f64 {
        self.cumulative_jump_tail(1.0, y)
    }

    /// Points where the jump tail is not smooth.
    pub fn breakpoints(&self) -> Vec<f64> {
        match self {
            Family::CompoundPoisson { jump, .. } => vec![*jump],
            Family::CustomTabulated { tail, .. } => tail.iter().skip(1).map(|p| p[0]).collect(),
            Family::Killed { base: Some(b), .. } => b.breakpoints(),
            _ => Vec::new(),
        }
    }

    /// Whether `λ ↦ f(λ, y)` is known to be a special Bernstein function.
    pub fn is_special(&self) -> Option<bool> {
        match self {
            Family::Stable { .. } | Family::Gamma { .. } | Family::Drift { .. } => Some(true),
            Family::Killed { base: None, .. } => Some(true),
            Family::Killed { base: Some(b), .. } => match **b {
                Family::Stable { .. } | Family::Gamma { .. } | Family::Drift { .. } => Some(true),
                _ => None,
            },
            Family::CompoundPoisson { .. } | Family::CustomTabulated { .. } => None,
        }
    }

    /// Half-angle `φ ≤ π` of the sector `|arg z| ≤ φ` on which `Re f(z, y) ≥ 0`,
    /// so that `exp(-x f(z, y))` stays bounded there.
    pub fn bounded_sector(&self, y: f64) -> f64 {
        match self {
            Family::Stable { exponent } => (PI / (2.0 * exponent.eval(y))).min(PI),
            Family::Gamma { .. } => PI,
            Family::Killed { base: None, .. } => PI,
            Family::Killed { base: Some(b), .. } => b.bounded_sector(y),
            Family::Drift { .. } | Family::CompoundPoisson { .. } | Family::CustomTabulated { .. } => PI / 2.0,
        }
    }

    /// Density `η_y(t) ∈ [0, 1]` of the exponential-mixture representation
    /// `f(λ, y) - a(y) = ∫ (1/t - 1/(λ+t)) η_y(t) dt`, where known.
    pub fn me_density(&self, t: f64, y: f64) -> Option<f64> {
        match self {
            Family::Stable { exponent } => {
                let b = exponent.eval(y);
                Some((PI * b).sin() * t.powf(b) / PI)
            }
            Family::Gamma { rate } => Some(if t > rate.eval(y) { 1.0 } else { 0.0 }),
            Family::Killed { base, .. } => match base {
                Some(b) => b.me_density(t, y),
                None => Some(0.0),
            },
            Family::Drift { .. } | Family::CompoundPoisson { .. } | Family::CustomTabulated { .. } => None,
        }
    }
}

/// `(1 - e^{-z}) / z`, accurate near 0.
fn phi1(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        Complex64::new(1.0, 0.0) - z / 2.0 + z * z / 6.0 - z * z * z / 24.0
    } else {
        (Complex64::new(1.0, 0.0) - (-z).exp()) / z
    }
}

fn table_value(tail: &[[f64; 2]], s: f64) -> f64 {
    if s <= 0.0 {
        return tail[0][1];
    }
    for w in tail.windows(2) {
        if s < w[1][0] {
            let frac = (s - w[0][0]) / (w[1][0] - w[0][0]);
            return w[0][1] + frac * (w[1][1] - w[0][1]);
        }
    }
    0.0
}

fn table_integral(tail: &[[f64; 2]], s: f64) -> f64 {
    let mut acc = 0.0;
    for w in tail.windows(2) {
        if s <= w[0][0] {
            break;
        }
        let hi = s.min(w[1][0]);
        let v_hi = if hi >= w[1][0] {
            w[1][1]
        } else {
            w[0][1] + (hi - w[0][0]) / (w[1][0] - w[0][0]) * (w[1][1] - w[0][1])
        };
        acc += 0.5 * (hi - w[0][0]) * (w[0][1] + v_hi);
    }
    acc
}

/// Smallest `s ≥ eps` with `T(s) = level`, for `0 < level ≤ T(eps)`.
fn table_inverse(tail: &[[f64; 2]], eps: f64, level: f64) -> f64 {
    for w in tail.windows(2) {
        if w[1][0] <= eps {
            continue;
        }
        let a = w[0][0].max(eps);
        let ta = table_value(tail, a);
        let (b, tb) = (w[1][0], w[1][1]);
        if level >= tb && level <= ta && ta > tb {
            return a + (ta - level) / (ta - tb) * (b - a);
        }
    }
    tail.last().map_or(f64::NAN, |p| p[0])
}

fn sample_gamma_jump<R: Rng + ?Sized>(r: f64, eps: f64, rng: &mut R) -> f64 {
    let s0 = eps.max(1.0 / r);
    let mass_low = if s0 > eps { exp_integral_e1(r * eps) - exp_integral_e1(r * s0) } else { 0.0 };
    let mass_high = exp_integral_e1(r * s0);
    let p_low = mass_low / (mass_low + mass_high);
    if rng.random::<f64>() < p_low {
        // log-uniform proposal on (eps, s0), acceptance e^{-r (s - eps)}
        loop {
            let s = eps * (s0 / eps).powf(rng.random::<f64>());
            if rng.random::<f64>() <= (-r * (s - eps)).exp() {
                return s;
            }
        }
    }
    // shifted exponential proposal on (s0, ∞), acceptance s0 / s
    loop {
        let s = s0 - (1.0 - rng.random::<f64>()).ln() / r;
        if rng.random::<f64>() * s <= s0 {
            return s;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tab() -> Family {
        Family::CustomTabulated {
            rate: ParamMap::Identity,
            tail: vec![[0.0, 2.0], [0.5, 1.0], [1.0, 1.0], [2.0, 0.0]],
        }
    }

    #[test]
    fn examples_for_exponent() {
        assert!((Family::stable().exponent(4.0, 0.5) - 2.0).abs() < 1e-15);
        assert!((Family::gamma().exponent(0.7, 0.7) - 2f64.ln()).abs() < 1e-15);
        assert_eq!(Family::drift().exponent(3.0, 2.0), 6.0);
    }

    #[test]
    fn complex_matches_real_on_axis() {
        let fams = [
            Family::stable(),
            Family::gamma(),
            Family::drift(),
            Family::CompoundPoisson { rate: ParamMap::Identity, jump: 1.0 },
            tab(),
            Family::Killed { rate: ParamMap::Constant { value: 0.3 }, base: Some(Box::new(Family::gamma())) },
        ];
        for f in &fams {
            for &l in &[0.01, 0.5, 3.0, 40.0] {
                let r = f.exponent(l, 0.6);
                let c = f.exponent_complex(Complex64::new(l, 0.0), 0.6);
                assert!((r - c.re).abs() < 1e-12 * r.abs().max(1.0), "{}: {r} vs {c}", f.name());
                assert!(c.im.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tail_matches_density_integral() {
        // stable and gamma: ∫_s^∞ density = tail
        for (f, y) in [(Family::stable(), 0.4), (Family::gamma(), 1.3)] {
            for &s in &[0.01, 0.5, 2.0] {
                let q = quad::exp_sinh(|w| f.levy_density(s + w, y).unwrap(), 1e-12).unwrap();
                assert!((q.value - f.jump_tail(s, y)).abs() < 1e-9 * q.value, "{} s={s}", f.name());
            }
        }
    }

    fn piecewise(f: impl Fn(f64) -> f64, lo: f64, hi: f64, breaks: &[f64]) -> f64 {
        let mut pts = vec![lo];
        pts.extend(breaks.iter().copied().filter(|&b| b > lo && b < hi));
        pts.push(hi);
        pts.windows(2).map(|w| quad::tanh_sinh(&f, w[0], w[1], 1e-12).unwrap().value).sum()
    }

    #[test]
    fn cumulative_tail_matches_quadrature() {
        for (f, y) in [(Family::stable(), 0.7), (Family::gamma(), 0.4), (tab(), 1.5)] {
            for &s in &[0.2, 1.0, 3.5] {
                let q = piecewise(|w| f.jump_tail(w, y), 0.0, s, &f.breakpoints());
                let c = f.cumulative_jump_tail(s, y);
                assert!((q - c).abs() < 1e-8 * c.max(1.0), "{} s={s}: {q} vs {c}", f.name());
            }
        }
    }

    #[test]
    fn tabulated_exponent_is_laplace_of_tail() {
        let f = tab();
        for &l in &[0.3, 2.0, 9.0] {
            let lap = piecewise(|s| (-l * s).exp() * f.jump_tail(s, 1.0), 0.0, 2.0, &f.breakpoints());
            assert!((l * lap - f.exponent(l, 1.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn eval_tail_examples() {
        let f = Family::stable();
        assert!((f.jump_tail(1.0, 0.5) - 0.564_189_583_547_756_3).abs() < 1e-14);
        assert!(f.jump_tail(1e12, 0.5) < 1e-5);
        assert!((Family::gamma().jump_tail(1.0, 1.0) - 0.219_383_934_395_520_3).abs() < 1e-13);
    }

    #[test]
    fn jump_samplers_respect_conditional_law() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let eps = 0.05;
        for (f, y) in [(Family::stable(), 0.5), (Family::gamma(), 2.0), (tab(), 1.0)] {
            let n = 40_000;
            let draws: Vec<f64> = (0..n).map(|_| f.sample_jump(y, eps, &mut rng)).collect();
            assert!(draws.iter().all(|&s| s > eps));
            // P(S > s | S > eps) = tail(s)/tail(eps)
            for &s in &[0.1, 0.6, 1.5] {
                let emp = draws.iter().filter(|&&d| d > s).count() as f64 / n as f64;
                let exact = f.jump_tail(s, y) / f.jump_tail(eps, y);
                let se = (exact * (1.0 - exact) / n as f64).sqrt().max(1e-4);
                assert!((emp - exact).abs() < 4.0 * se, "{} s={s}: {emp} vs {exact}", f.name());
            }
        }
    }

    #[test]
    fn domain_errors() {
        assert!(Family::stable().check_param(1.0).is_err());
        assert!(Family::gamma().check_param(0.0).is_err());
        assert!(Family::stable().check_param(0.3).is_ok());
        let bad = Family::CustomTabulated { rate: ParamMap::Identity, tail: vec![[0.0, 1.0], [1.0, 2.0]] };
        assert!(bad.validate_shape().is_err());
    }

    #[test]
    fn registry_parses_from_json() {
        let f: Family = serde_json::from_str(r#"{"kind":"stable","exponent":{"map":"linear","scale":0.5}}"#).unwrap();
        assert_eq!(f, Family::Stable { exponent: ParamMap::Linear { scale: 0.5, offset: 0.0 } });
        let err = serde_json::from_str::<Family>(r#"{"kind":"cauchy"}"#).unwrap_err().to_string();
        assert!(err.contains("compound-poisson"), "{err}");
    }
}
