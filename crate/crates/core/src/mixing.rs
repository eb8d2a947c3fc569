//! The mixed exponent `E f(λ, Y)` and the A1/A2 assumption checks.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::Family;
use crate::measure::MixingMeasure;
use crate::quad::{self, Extended};

/// Outcome of checking `E a(Y) < ∞, E b(Y) < ∞` (A1) and `E V(Y) < ∞` (A2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AssumptionReport {
    pub a1: bool,
    pub a2: bool,
    pub mixed_kill: Extended,
    pub mixed_drift: Extended,
    pub mixed_v: Extended,
    /// First node outside the family's parameter domain, if any.
    pub domain: Option<String>,
}

impl AssumptionReport {
    pub fn passed(&self) -> bool {
        self.a1 && self.a2 && self.domain.is_none()
    }

    pub fn summary(&self) -> String {
        let show = |e: Extended| match e {
            Extended::Finite(v) => format!("{v:.6e}"),
            Extended::Infinite => "inf".to_string(),
        };
        let mut s = format!(
            "A1 {} (E a = {}, E b = {}), A2 {} (E V = {})",
            if self.a1 { "pass" } else { "FAIL" },
            show(self.mixed_kill),
            show(self.mixed_drift),
            if self.a2 { "pass" } else { "FAIL" },
            show(self.mixed_v)
        );
        if let Some(d) = &self.domain {
            s.push_str(&format!("; {d}"));
        }
        s
    }
}

/// Checks A1/A2 for a family under a mixing measure. Failures are reported, not raised.
pub fn check_assumptions(family: &Family, measure: &MixingMeasure) -> AssumptionReport {
    let domain = family.validate_shape().err().map(|e| e.to_string()).or_else(|| {
        measure
            .nodes()
            .iter()
            .find_map(|&(y, _)| family.check_param(y).err().map(|e| e.to_string()))
    });
    let guard = |g: &dyn Fn(f64) -> f64| {
        measure.expect_extended(|y| if family.check_param(y).is_ok() { g(y) } else { f64::NAN })
    };
    let mixed_kill = guard(&|y| family.kill(y));
    let mixed_drift = guard(&|y| family.drift_coef(y));
    let mixed_v = guard(&|y| family.small_jump_index(y));
    AssumptionReport {
        a1: mixed_kill.is_finite() && mixed_drift.is_finite(),
        a2: mixed_v.is_finite(),
        mixed_kill,
        mixed_drift,
        mixed_v,
        domain,
    }
}

/// `f(λ, y)` with domain checks.
pub fn eval_f(family: &Family, lambda: f64, y: f64) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda must be positive, got {lambda}")));
    }
    family.validate_shape()?;
    family.check_param(y)?;
    Ok(family.exponent(lambda, y))
}

/// `ν̄(s, y) = a(y) + ν((s, ∞), y)` with domain checks.
pub fn eval_tail(family: &Family, s: f64, y: f64) -> Result<f64> {
    if !(s > 0.0) {
        return Err(Error::Domain(format!("tail needs s > 0, got {s}")));
    }
    family.validate_shape()?;
    family.check_param(y)?;
    Ok(family.tail_bar(s, y))
}

/// `|f(λ, y)/λ - b(y) - ∫_0^∞ e^{-λ s} ν̄(s, y) ds|`, the tail integral computed by quadrature.
pub fn laplace_identity_residual(family: &Family, lambda: f64, y: f64) -> Result<f64> {
    let f = eval_f(family, lambda, y)?;
    let jumps = quad::laplace_piecewise(|s| family.jump_tail(s, y), lambda, &family.breakpoints(), 1e-12)?;
    Ok((f / lambda - family.drift_coef(y) - family.kill(y) / lambda - jumps).abs())
}

/// A family paired with a mixing measure that passed A1/A2.
#[derive(Debug, Clone)]
pub struct MixedExponent {
    family: Family,
    measure: MixingMeasure,
    report: AssumptionReport,
    mixed_kill: f64,
    mixed_drift: f64,
}

impl MixedExponent {
    pub fn new(family: Family, measure: MixingMeasure) -> Result<Self> {
        family.validate_shape()?;
        for &(y, _) in measure.nodes() {
            family.check_param(y)?;
        }
        let report = check_assumptions(&family, &measure);
        if !report.passed() {
            return Err(Error::Assumption(report.summary()));
        }
        let mixed_kill = measure.expect(|y| family.kill(y));
        let mixed_drift = measure.expect(|y| family.drift_coef(y));
        Ok(Self { family, measure, report, mixed_kill, mixed_drift })
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    pub fn measure(&self) -> &MixingMeasure {
        &self.measure
    }

    pub fn nodes(&self) -> &[(f64, f64)] {
        self.measure.nodes()
    }

    pub fn report(&self) -> &AssumptionReport {
        &self.report
    }

    /// `E a(Y)`.
    pub fn mixed_kill(&self) -> f64 {
        self.mixed_kill
    }

    /// `E b(Y)`.
    pub fn mixed_drift(&self) -> f64 {
        self.mixed_drift
    }

    /// `E f(λ, Y)`.
    pub fn mixed_f(&self, lambda: f64) -> f64 {
        self.measure.expect(|y| self.family.exponent(lambda, y))
    }

    /// `E f(z, Y)` on the cut plane.
    pub fn mixed_f_complex(&self, z: Complex64) -> Complex64 {
        self.nodes()
            .iter()
            .map(|&(y, w)| self.family.exponent_complex(z, y) * w)
            .sum()
    }

    /// Smallest [`Family::bounded_sector`] over the mixing nodes.
    pub fn bounded_sector(&self) -> f64 {
        self.nodes()
            .iter()
            .map(|&(y, _)| self.family.bounded_sector(y))
            .fold(std::f64::consts::PI, f64::min)
    }

    /// `E ν̄(s, Y)`, the kernel of the distributed-order operators.
    pub fn mixed_tail(&self, s: f64) -> f64 {
        self.mixed_kill + self.mixed_jump_tail(s)
    }

    /// `E ν((s, ∞), Y)`.
    pub fn mixed_jump_tail(&self, s: f64) -> f64 {
        self.measure.expect(|y| self.family.jump_tail(s, y))
    }

    /// `∫_0^s E ν̄(w, Y) dw`.
    pub fn mixed_cumulative_tail(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        self.mixed_kill * s + self.measure.expect(|y| self.family.cumulative_jump_tail(s, y))
    }

    /// Mixed Lévy density, where every node has one.
    pub fn mixed_density(&self, s: f64) -> Option<f64> {
        let mut acc = 0.0;
        for &(y, w) in self.nodes() {
            acc += w * self.family.levy_density(s, y)?;
        }
        Some(acc)
    }

    /// `E ν((0, ∞), Y)`, infinite for infinite-activity mixtures.
    pub fn total_mass(&self) -> f64 {
        self.measure.expect(|y| self.family.total_mass(y))
    }

    /// `∫ s E ν(ds, Y)`, possibly infinite.
    pub fn mean_jump(&self) -> f64 {
        self.measure.expect(|y| self.family.mean_jump(y))
    }

    /// `∫_0^ε s E ν(ds, Y) = ∫_0^ε E ν((w, ∞), Y) dw - ε E ν((ε, ∞), Y)`.
    pub fn small_jump_mean(&self, eps: f64) -> f64 {
        self.measure
            .expect(|y| self.family.cumulative_jump_tail(eps, y) - eps * self.family.jump_tail(eps, y))
            .max(0.0)
    }

    /// Union of the node families' tail breakpoints.
    pub fn breakpoints(&self) -> Vec<f64> {
        self.family.breakpoints()
    }

    /// `|E f(λ)/λ - E b - ∫ e^{-λ s} E ν̄(s) ds|` at the mixed level.
    pub fn laplace_identity_residual(&self, lambda: f64) -> Result<f64> {
        let jumps = quad::laplace_piecewise(|s| self.mixed_jump_tail(s), lambda, &self.breakpoints(), 1e-11)?;
        Ok((self.mixed_f(lambda) / lambda - self.mixed_drift - self.mixed_kill / lambda - jumps).abs())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::ParamMap;
    use crate::measure::MeasureSpec;
    use crate::special::recip_gamma;

    fn mixed(f: Family, m: MeasureSpec) -> MixedExponent {
        MixedExponent::new(f, MixingMeasure::new(m).unwrap()).unwrap()
    }

    #[test]
    fn eval_f_rejects_bad_input() {
        assert!(matches!(eval_f(&Family::stable(), 1.0, 1.5), Err(Error::Parameter { .. })));
        assert!(matches!(eval_tail(&Family::stable(), 0.0, 0.5), Err(Error::Domain(_))));
    }

    #[test]
    fn uniform_stable_mixture() {
        let m = mixed(Family::stable(), MeasureSpec::Uniform { lo: 0.0, hi: 1.0 });
        assert!((m.mixed_f(std::f64::consts::E) - (std::f64::consts::E - 1.0)).abs() < 1e-12);
        let oracle = quad::tanh_sinh(|y| recip_gamma(1.0 - y), 0.0, 1.0, 1e-13).unwrap().value;
        assert!((m.mixed_tail(1.0) - oracle).abs() < 1e-10);
    }

    #[test]
    fn two_atoms_at_one() {
        let m = mixed(Family::stable(), MeasureSpec::Atoms { atoms: vec![[0.3, 0.5], [0.7, 0.5]] });
        assert_eq!(m.mixed_f(1.0), 1.0);
    }

    #[test]
    fn assumptions() {
        let uni = MixingMeasure::new(MeasureSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        let r = check_assumptions(&Family::drift(), &uni);
        assert!(r.passed());
        assert_eq!(r.mixed_v, Extended::Finite(0.0));
        let r = check_assumptions(&Family::stable(), &uni);
        assert!(r.passed());
        let oracle = quad::tanh_sinh(|y| recip_gamma(2.0 - y), 0.0, 1.0, 1e-13).unwrap().value;
        assert!((r.mixed_v.value() - oracle).abs() < 1e-8);

        let cp = Family::CompoundPoisson { rate: ParamMap::Power { coef: 1.0, exponent: -1.0 }, jump: 1.0 };
        let r = check_assumptions(&cp, &uni);
        assert!(r.a1 && !r.a2);
        let heavy_drift = Family::Drift { slope: ParamMap::Power { coef: 1.0, exponent: -1.0 } };
        let r = check_assumptions(&heavy_drift, &uni);
        assert!(!r.a1 && r.a2);
        assert!(matches!(MixedExponent::new(cp, uni), Err(Error::Assumption(_))));
    }

    #[test]
    fn laplace_identity_holds() {
        assert!(laplace_identity_residual(&Family::stable(), 1.0, 0.5).unwrap() <= 1e-8);
        assert!(laplace_identity_residual(&Family::gamma(), 2.0, 1.0).unwrap() <= 1e-8);
        assert_eq!(laplace_identity_residual(&Family::drift(), 3.0, 2.0).unwrap(), 0.0);
        let cp = Family::CompoundPoisson { rate: ParamMap::Constant { value: 1.5 }, jump: 0.7 };
        assert!(laplace_identity_residual(&cp, 2.0, 1.0).unwrap() <= 1e-8);
        let m = mixed(Family::gamma(), MeasureSpec::Pareto { scale: 1.0, shape: 2.0 });
        assert!(m.laplace_identity_residual(0.7).unwrap() <= 1e-7);
    }

    #[test]
    fn small_jump_mean_matches_density() {
        let m = mixed(Family::stable(), MeasureSpec::Dirac { y: 0.5 });
        let eps = 1e-2;
        let oracle = quad::tanh_sinh(|s| s * m.mixed_density(s).unwrap(), 0.0, eps, 1e-12).unwrap().value;
        assert!((m.small_jump_mean(eps) - oracle).abs() < 1e-12);
    }
}
