//! Conjugates of special Bernstein exponents, the mixed potential measure and the
//! inverse-local-time exponent `λ / E f*(λ, Y)`.

use std::sync::OnceLock;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mixing::MixedExponent;
use crate::quad;
use crate::transforms::{invert_laplace, InversionConfig};

/// Conjugate data of `f(·, y)`: `f*(λ) = λ / f(λ) = a* + b* λ + ∫ (1 - e^{-λ t}) ν*(dt)`.
#[derive(Debug, Clone, Serialize)]
pub struct ConjugateData {
    pub y: f64,
    pub a_star: f64,
    pub b_star: f64,
    #[serde(skip)]
    family: Family,
    #[serde(skip)]
    cfg: InversionConfig,
}

impl ConjugateData {
    /// `f*(λ, y) = λ / f(λ, y)`.
    pub fn f_star(&self, lambda: f64) -> f64 {
        lambda / self.family.exponent(lambda, self.y)
    }

    /// `ν̄*(t, y) = a*(y) + ν*((t, ∞), y)`, the density of the potential measure,
    /// by inverting `1/f(λ, y) - b*(y)`.
    pub fn tail_star(&self, t: f64) -> Result<f64> {
        let b = self.b_star;
        invert_laplace(|z| self.family.exponent_complex(z, self.y).inv() - b, t, &self.cfg)
    }

    /// `∫_0^t ν̄*(s, y) ds`, by inverting `(1/f(λ, y) - b*(y))/λ`.
    pub fn cumulative_tail_star(&self, t: f64) -> Result<f64> {
        let b = self.b_star;
        invert_laplace(|z| (self.family.exponent_complex(z, self.y).inv() - b) / z, t, &self.cfg)
    }

    /// `f*` rebuilt from `b*` and the numerically inverted potential measure:
    /// `λ (b* + ∫_0^∞ e^{-λ t} ν̄*(t) dt)`, the integral taken by parts against the
    /// cumulative tail, which stays bounded where `ν̄*` is singular.
    pub fn f_star_from_tail(&self, lambda: f64) -> Result<f64> {
        let failure = std::cell::Cell::new(None);
        let integral = quad::exp_sinh(
            |t| match self.cumulative_tail_star(t) {
                Ok(v) => (-lambda * t).exp() * v,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            },
            1e-10,
        )?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        Ok(lambda * (self.b_star + lambda * integral.value))
    }
}

/// `(a*, b*)` from the triplet of `f(·, y)`.
///
/// `b* = 0` if `b > 0`, else `1/(a + ν((0, ∞)))`; `a* = 0` if `a > 0`, else `1/(b + ∫ s ν(ds))`.
pub fn conjugate_coefficients(family: &Family, y: f64) -> (f64, f64) {
    let (a, b) = (family.kill(y), family.drift_coef(y));
    let b_star = if b > 0.0 { 0.0 } else { 1.0 / (a + family.total_mass(y)) };
    let a_star = if a > 0.0 { 0.0 } else { 1.0 / (b + family.mean_jump(y)) };
    (a_star, b_star)
}

/// Conjugate of a single `f(·, y)`.
pub fn conjugate(family: &Family, y: f64, cfg: &InversionConfig) -> Result<ConjugateData> {
    cfg.validate()?;
    family.validate_shape()?;
    family.check_param(y)?;
    if family.is_special() != Some(true) {
        return Err(Error::Precondition(format!(
            "{} exponents are not known to be special; certify SBF and use conjugate_assuming_special",
            family.name()
        )));
    }
    Ok(conjugate_assuming_special(family, y, cfg))
}

/// Conjugate of `f(·, y)` when the caller vouches that it is special.
pub fn conjugate_assuming_special(family: &Family, y: f64, cfg: &InversionConfig) -> ConjugateData {
    let (a_star, b_star) = conjugate_coefficients(family, y);
    ConjugateData { y, a_star, b_star, family: family.clone(), cfg: *cfg }
}

/// Per-node conjugates of a mixed exponent, computed lazily and cached.
#[derive(Debug)]
pub struct MixedConjugate<'a> {
    mixed: &'a MixedExponent,
    cfg: InversionConfig,
    nodes: Vec<OnceLock<ConjugateData>>,
}

impl<'a> MixedConjugate<'a> {
    /// Fails unless the family is known to be special at every node.
    pub fn new(mixed: &'a MixedExponent, cfg: &InversionConfig) -> Result<Self> {
        if mixed.family().is_special() != Some(true) {
            return Err(Error::Config(format!(
                "node conjugates unavailable: {} exponents are not known to be special",
                mixed.family().name()
            )));
        }
        Ok(Self::assuming_special(mixed, cfg))
    }

    pub fn assuming_special(mixed: &'a MixedExponent, cfg: &InversionConfig) -> Self {
        let nodes = (0..mixed.nodes().len()).map(|_| OnceLock::new()).collect();
        Self { mixed, cfg: *cfg, nodes }
    }

    pub fn node(&self, j: usize) -> &ConjugateData {
        self.nodes[j].get_or_init(|| {
            conjugate_assuming_special(self.mixed.family(), self.mixed.nodes()[j].0, &self.cfg)
        })
    }

    /// `E f*(λ, Y)`.
    pub fn mixed_f_star(&self, lambda: f64) -> f64 {
        self.mixed
            .nodes()
            .iter()
            .enumerate()
            .map(|(j, &(_, w))| w * self.node(j).f_star(lambda))
            .sum()
    }

    /// `λ / E f*(λ, Y)`, the inverse-local-time exponent at the random starting point.
    pub fn inverse_local_time_exponent(&self, lambda: f64) -> f64 {
        lambda / self.mixed_f_star(lambda)
    }

    /// Atom at zero of the mixed potential measure, `E b*(Y)`.
    pub fn potential_atom(&self) -> f64 {
        self.mixed
            .nodes()
            .iter()
            .enumerate()
            .map(|(j, &(_, w))| w * self.node(j).b_star)
            .sum()
    }

    /// Density `E ν̄*(t, Y)` of the mixed potential measure, by one inversion of
    /// `E (1/f(λ, Y) - b*(Y))`.
    pub fn potential_density(&self, t: f64) -> Result<f64> {
        let atom = self.potential_atom();
        let family = self.mixed.family();
        invert_laplace(
            |z| {
                let s: Complex64 = self
                    .mixed
                    .nodes()
                    .iter()
                    .map(|&(y, w)| family.exponent_complex(z, y).inv() * w)
                    .sum();
                s - atom
            },
            t,
            &self.cfg,
        )
    }

    /// `∫_0^t E ν̄*(s, Y) ds`.
    pub fn potential_cumulative(&self, t: f64) -> Result<f64> {
        let atom = self.potential_atom();
        let family = self.mixed.family();
        invert_laplace(
            |z| {
                let s: Complex64 = self
                    .mixed
                    .nodes()
                    .iter()
                    .map(|&(y, w)| family.exponent_complex(z, y).inv() * w)
                    .sum();
                (s - atom) / z
            },
            t,
            &self.cfg,
        )
    }

    /// Relative gap between `L[U^{f,p}](λ)` and `E f*(λ, Y)/λ`, the transform of
    /// the inverted potential measure taken by quadrature (by parts).
    pub fn potential_laplace_residual(&self, lambda: f64) -> Result<f64> {
        let failure = std::cell::Cell::new(None);
        let integral = quad::exp_sinh(
            |t| match self.potential_cumulative(t) {
                Ok(v) => (-lambda * t).exp() * v,
                Err(e) => {
                    failure.set(Some(e));
                    0.0
                }
            },
            1e-10,
        )?;
        if let Some(e) = failure.take() {
            return Err(e);
        }
        let expected = self.mixed_f_star(lambda) / lambda;
        Ok(((self.potential_atom() + lambda * integral.value) - expected).abs() / expected)
    }
}
