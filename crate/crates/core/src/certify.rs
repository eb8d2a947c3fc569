//! Numerical class certificates (CBF, SBF, TBF, ME) by finite-order divided differences.
//!
//! A pass is evidence up to the stated order on the stated grid, not a proof.

use serde::{Deserialize, Serialize};

use crate::family::Family;
use crate::mixing::MixedExponent;
use crate::quad::{self, Extended};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum ClassKind {
    Cbf,
    Sbf,
    Tbf,
    Me,
}

impl ClassKind {
    pub fn witness_name(self) -> &'static str {
        match self {
            ClassKind::Cbf => "Levy density m(s)",
            ClassKind::Sbf => "lambda / f(lambda)",
            ClassKind::Tbf => "s * m(s)",
            ClassKind::Me => "eta(t)",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    /// First violated order and the grid point where the window starts.
    Fail { order: usize, at: f64 },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn is_fail(&self) -> bool {
        matches!(self, Verdict::Fail { .. })
    }

    /// Combines node verdicts: any fail wins, then any inconclusive.
    fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (f @ Verdict::Fail { .. }, _) | (_, f @ Verdict::Fail { .. }) => f,
            (i @ Verdict::Inconclusive { .. }, _) | (_, i @ Verdict::Inconclusive { .. }) => i,
            _ => Verdict::Pass,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CheckGrid {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
    pub log_spaced: bool,
    pub max_order: usize,
    pub rtol: f64,
}

impl Default for CheckGrid {
    fn default() -> Self {
        Self { lo: 1e-2, hi: 1e2, count: 64, log_spaced: true, max_order: 4, rtol: 1e-7 }
    }
}

impl CheckGrid {
    pub fn points(&self) -> Vec<f64> {
        if self.log_spaced {
            quad::logspace(self.lo, self.hi, self.count)
        } else {
            quad::linspace(self.lo, self.hi, self.count)
        }
    }
}

/// Divided difference of order `k` over `x[i..=i+k]`, with the scale `Σ |c_j g_j|`
/// used as the rounding reference.
fn divided_difference(x: &[f64], g: &[f64], i: usize, k: usize) -> (f64, f64) {
    let mut value = 0.0;
    let mut scale = 0.0;
    for j in i..=i + k {
        let mut denom = 1.0;
        for m in i..=i + k {
            if m != j {
                denom *= x[j] - x[m];
            }
        }
        let term = g[j] / denom;
        value += term;
        scale += term.abs();
    }
    (value, scale)
}

fn grid_problem(x: &[f64], g: &[f64], max_order: usize) -> Option<Verdict> {
    if x.len() < 2 * (max_order + 1) {
        return Some(Verdict::Inconclusive {
            reason: format!("{} grid points are too few for order {max_order}", x.len()),
        });
    }
    if g.iter().any(|v| !v.is_finite()) {
        return Some(Verdict::Inconclusive { reason: "witness not finite on the grid".into() });
    }
    None
}

/// Checks `(-1)^k Δ^k g ≥ -tol` for `k = 0..=max_order` (complete monotonicity).
pub fn completely_monotone(x: &[f64], g: &[f64], max_order: usize, rtol: f64) -> Verdict {
    alternating(x, g, max_order, rtol, 0)
}

/// Checks `g ≥ 0` and `(-1)^{k+1} Δ^k g ≥ -tol` for `k = 1..=max_order` (Bernstein).
pub fn bernstein(x: &[f64], g: &[f64], max_order: usize, rtol: f64) -> Verdict {
    if let Some(v) = grid_problem(x, g, max_order) {
        return v;
    }
    if let Some(i) = g.iter().position(|&v| v < 0.0) {
        return Verdict::Fail { order: 0, at: x[i] };
    }
    alternating(x, g, max_order, rtol, 1)
}

fn alternating(x: &[f64], g: &[f64], max_order: usize, rtol: f64, shift: usize) -> Verdict {
    if let Some(v) = grid_problem(x, g, max_order) {
        return v;
    }
    let start = if shift == 0 { 0 } else { 1 };
    for k in start..=max_order {
        let sign = if (k + shift).is_multiple_of(2) { 1.0 } else { -1.0 };
        for i in 0..x.len() - k {
            let (dd, scale) = divided_difference(x, g, i, k);
            if sign * dd < -rtol * scale {
                return Verdict::Fail { order: k, at: x[i] };
            }
        }
    }
    Verdict::Pass
}

/// Range part of the ME check: `η ∈ [0, 1]` on the grid.
pub fn me_range<E: Fn(f64) -> f64>(eta: E, grid: &CheckGrid) -> Verdict {
    for t in grid.points() {
        let v = eta(t);
        if !v.is_finite() {
            return Verdict::Inconclusive { reason: format!("eta not finite at {t}") };
        }
        if !(-grid.rtol..=1.0 + grid.rtol).contains(&v) {
            return Verdict::Fail { order: 0, at: t };
        }
    }
    Verdict::Pass
}

/// ME check: `η ∈ [0, 1]` on the grid and `∫_0^1 η(t)/t dt < ∞`. A divergent
/// integral is reported as a failure at `t = 0`.
pub fn me_witness<E: Fn(f64) -> f64>(eta: E, grid: &CheckGrid) -> Verdict {
    let range = me_range(&eta, grid);
    if !range.is_pass() {
        return range;
    }
    // decades [10^{-k-1}, 10^{-k}], tolerant of jumps in η
    let increments: Vec<f64> = (0..16)
        .map(|k| {
            let hi = 10f64.powi(-k);
            quad::gauss_legendre_on(32, hi / 10.0, hi).into_iter().map(|(t, w)| w * eta(t) / t).sum()
        })
        .collect();
    match quad::classify_partial_sums(&increments, 1e-10) {
        Extended::Finite(_) => Verdict::Pass,
        Extended::Infinite => Verdict::Fail { order: 0, at: 0.0 },
    }
}

/// Certificate of one class for a mixed exponent: every node and the mixed witness.
#[derive(Debug, Clone, Serialize)]
pub struct ClassCertificate {
    pub kind: ClassKind,
    pub witness: &'static str,
    pub grid: CheckGrid,
    pub nodes: Vec<(f64, Verdict)>,
    pub node_verdict: Verdict,
    pub mixed_verdict: Verdict,
}

impl ClassCertificate {
    pub fn passed(&self) -> bool {
        self.node_verdict.is_pass() && self.mixed_verdict.is_pass()
    }
}

fn check_values(kind: ClassKind, x: &[f64], g: &[f64], grid: &CheckGrid) -> Verdict {
    match kind {
        ClassKind::Cbf | ClassKind::Tbf => completely_monotone(x, g, grid.max_order, grid.rtol),
        ClassKind::Sbf => bernstein(x, g, grid.max_order, grid.rtol),
        ClassKind::Me => unreachable!("ME uses me_witness"),
    }
}

/// Witness of `kind` for `f(·, y)` at `s`, or `None` if the family has no such witness.
fn witness(kind: ClassKind, family: &Family, y: f64, s: f64) -> Option<f64> {
    match kind {
        ClassKind::Cbf => family.levy_density(s, y),
        ClassKind::Tbf => family.levy_density(s, y).map(|m| s * m),
        ClassKind::Sbf => Some(s / family.exponent(s, y)),
        ClassKind::Me => family.me_density(s, y),
    }
}

/// Certifies `kind` at every node and for the node-weighted mixed witness.
///
/// For SBF the mixed witness is `E f*(λ, Y)`, whose being Bernstein makes
/// `λ / E f*(λ, Y)` special.
pub fn class_check(kind: ClassKind, mixed: &MixedExponent, grid: &CheckGrid) -> ClassCertificate {
    let family = mixed.family();
    let x = grid.points();
    let mut nodes = Vec::with_capacity(mixed.nodes().len());
    let mut node_verdict = Verdict::Pass;
    let mut mixed_values = vec![0.0; x.len()];
    let mut available = true;
    for &(y, w) in mixed.nodes() {
        let values: Option<Vec<f64>> = x.iter().map(|&s| witness(kind, family, y, s)).collect();
        let verdict = match &values {
            None => {
                available = false;
                Verdict::Inconclusive { reason: format!("{} family has no {} witness", family.name(), kind.witness_name()) }
            }
            Some(v) => {
                for (m, vi) in mixed_values.iter_mut().zip(v) {
                    *m += w * vi;
                }
                match kind {
                    ClassKind::Me => me_witness(|t| witness(kind, family, y, t).unwrap_or(f64::NAN), grid),
                    _ => check_values(kind, &x, v, grid),
                }
            }
        };
        node_verdict = node_verdict.and(verdict.clone());
        nodes.push((y, verdict));
    }
    let mixed_verdict = if !available {
        Verdict::Inconclusive { reason: "some node has no witness".into() }
    } else {
        match kind {
            ClassKind::Me => me_witness(
                |t| mixed.nodes().iter().map(|&(y, w)| w * family.me_density(t, y).unwrap_or(f64::NAN)).sum(),
                grid,
            ),
            _ => check_values(kind, &x, &mixed_values, grid),
        }
    };
    ClassCertificate { kind, witness: kind.witness_name(), grid: *grid, nodes, node_verdict, mixed_verdict }
}

/// Certifies an arbitrary witness function for `kind` on the grid.
pub fn check_function<G: Fn(f64) -> f64>(kind: ClassKind, g: G, grid: &CheckGrid) -> Verdict {
    let x = grid.points();
    match kind {
        ClassKind::Me => me_witness(g, grid),
        _ => {
            let values: Vec<f64> = x.iter().map(|&s| g(s)).collect();
            check_values(kind, &x, &values, grid)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measure::{MeasureSpec, MixingMeasure};
    use crate::special::recip_gamma;

    fn mixed(f: Family, m: MeasureSpec) -> MixedExponent {
        MixedExponent::new(f, MixingMeasure::new(m).unwrap()).unwrap()
    }

    #[test]
    fn stable_density_is_cm() {
        let grid = CheckGrid::default();
        let v = check_function(ClassKind::Cbf, |s| 0.5 * s.powf(-1.5) * recip_gamma(0.5), &grid);
        assert_eq!(v, Verdict::Pass);
    }

    #[test]
    fn oscillating_witness_fails_low_order() {
        let v = check_function(ClassKind::Cbf, |s| s.sin() + 2.0, &CheckGrid::default());
        match v {
            Verdict::Fail { order, .. } => assert!(order <= 2, "order {order}"),
            other => panic!("{other:?}"),
        }
        // on [2, 4] sin is decreasing and concave there, so the first break is the sign of Δ²
        let grid = CheckGrid { lo: 2.0, hi: 4.0, log_spaced: false, ..CheckGrid::default() };
        let v = check_function(ClassKind::Cbf, |s| s.sin() + 2.0, &grid);
        assert!(matches!(v, Verdict::Fail { order: 2, .. }), "{v:?}");
    }

    #[test]
    fn coarse_grid_is_inconclusive() {
        let grid = CheckGrid { count: 6, ..CheckGrid::default() };
        let v = check_function(ClassKind::Cbf, |s| (-s).exp(), &grid);
        assert!(matches!(v, Verdict::Inconclusive { .. }));
    }

    #[test]
    fn exponential_is_me_type() {
        let grid = CheckGrid::default();
        assert_eq!(me_range(|s| (-s).exp(), &grid), Verdict::Pass);
        assert!(me_range(|s| 2.0 * (-s).exp(), &grid).is_fail());
        // e^{-s}/s is not integrable at 0, so the full ME condition rejects it
        assert_eq!(me_witness(|s| (-s).exp(), &grid), Verdict::Fail { order: 0, at: 0.0 });
        assert_eq!(me_witness(|s| if s > 1.0 { 1.0 } else { 0.0 }, &grid), Verdict::Pass);
    }

    #[test]
    fn gamma_mixtures_certify() {
        for m in [
            mixed(Family::gamma(), MeasureSpec::Atoms { atoms: vec![[0.5, 0.5], [2.0, 0.5]] }),
            mixed(Family::gamma(), MeasureSpec::Uniform { lo: 0.5, hi: 2.0 }),
        ] {
            for kind in [ClassKind::Cbf, ClassKind::Sbf, ClassKind::Tbf, ClassKind::Me] {
                let c = class_check(kind, &m, &CheckGrid::default());
                assert!(c.passed(), "{kind:?}: {:?} {:?}", c.node_verdict, c.mixed_verdict);
            }
        }
    }

    #[test]
    fn stable_mixture_is_cbf_and_tbf() {
        let m = mixed(Family::stable(), MeasureSpec::Uniform { lo: 0.0, hi: 1.0 });
        for kind in [ClassKind::Cbf, ClassKind::Tbf, ClassKind::Sbf] {
            let c = class_check(kind, &m, &CheckGrid::default());
            assert!(c.passed(), "{kind:?}: {:?} {:?}", c.node_verdict, c.mixed_verdict);
        }
    }

    #[test]
    fn compound_poisson_has_no_density_witness() {
        let cp = Family::CompoundPoisson { rate: crate::ParamMap::Constant { value: 1.0 }, jump: 1.0 };
        let m = mixed(cp, MeasureSpec::Dirac { y: 1.0 });
        let c = class_check(ClassKind::Cbf, &m, &CheckGrid::default());
        assert!(matches!(c.mixed_verdict, Verdict::Inconclusive { .. }));
    }
}
