//! Mixing probability measures, discretized once into weighted nodes.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quad::{self, Extended};

/// Default Gauss–Legendre nodes per continuous part.
pub const DEFAULT_NODES: usize = 64;
/// Nodes never come closer than this to a support endpoint (in the unit variable).
pub const ENDPOINT_CLIP: f64 = 1e-6;

/// Declarative description of a mixing measure, as read from configs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeasureSpec {
    Dirac {
        y: f64,
    },
    /// `[y, weight]` pairs; weights must sum to one.
    Atoms {
        atoms: Vec<[f64; 2]>,
    },
    Uniform {
        lo: f64,
        hi: f64,
    },
    /// `p(dy) = β γ^β y^{-β-1} dy` on `[γ, ∞)`.
    Pareto {
        scale: f64,
        shape: f64,
    },
    /// Piecewise-linear density through `[y, g(y)]` points, normalized on load.
    Tabulated {
        points: Vec<[f64; 2]>,
    },
}

pub const REGISTRY: &str = "dirac, atoms, uniform, pareto, tabulated";

#[derive(Debug, Clone, PartialEq)]
enum Part {
    Uniform { lo: f64, hi: f64 },
    Pareto { scale: f64, shape: f64 },
    Tabulated { points: Vec<[f64; 2]>, mass: f64 },
}

impl Part {
    /// `(y, weight)` at unit variable `u` measured from the left end.
    fn at_left(&self, u: f64) -> (f64, f64) {
        match self {
            Part::Uniform { lo, hi } => (lo + u * (hi - lo), 1.0),
            Part::Pareto { scale, shape } => (scale * u.powf(-2.0 / shape), 2.0 * u),
            Part::Tabulated { points, mass } => {
                let (lo, hi) = (points[0][0], points[points.len() - 1][0]);
                let y = lo + u * (hi - lo);
                (y, density_at(points, y) * (hi - lo) / mass)
            }
        }
    }

    /// `(y, weight)` at unit variable `1 - w`, accurate for tiny `w`.
    fn at_right(&self, w: f64) -> (f64, f64) {
        match self {
            Part::Uniform { lo, hi } => (hi - w * (hi - lo), 1.0),
            Part::Pareto { scale, shape } => (scale * (1.0 - w).powf(-2.0 / shape), 2.0 * (1.0 - w)),
            Part::Tabulated { points, mass } => {
                let (lo, hi) = (points[0][0], points[points.len() - 1][0]);
                let y = hi - w * (hi - lo);
                (y, density_at(points, y) * (hi - lo) / mass)
            }
        }
    }

    fn nodes(&self, n: usize) -> Vec<(f64, f64)> {
        match self {
            Part::Tabulated { points, mass } => {
                let per = (n / (points.len() - 1)).max(8);
                let mut out = Vec::new();
                for seg in points.windows(2) {
                    for (y, w) in quad::gauss_legendre_on(per, seg[0][0], seg[1][0]) {
                        let g = density_at(points, y);
                        if g > 0.0 {
                            out.push((y, w * g / mass));
                        }
                    }
                }
                out
            }
            _ => quad::gauss_legendre_on(n, 0.0, 1.0)
                .into_iter()
                .map(|(u, w)| {
                    let u = u.clamp(ENDPOINT_CLIP, 1.0 - ENDPOINT_CLIP);
                    let (y, g) = self.at_left(u);
                    (y, w * g)
                })
                .collect(),
        }
    }
}

fn density_at(points: &[[f64; 2]], y: f64) -> f64 {
    for seg in points.windows(2) {
        if y >= seg[0][0] && y <= seg[1][0] {
            let frac = (y - seg[0][0]) / (seg[1][0] - seg[0][0]);
            return seg[0][1] + frac * (seg[1][1] - seg[0][1]);
        }
    }
    0.0
}

/// A probability measure on the parameter space: atoms plus continuous parts,
/// with the derived node set `(y_j, ω_j)` sorted by `y`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMeasure {
    spec: MeasureSpec,
    atoms: Vec<(f64, f64)>,
    parts: Vec<Part>,
    nodes: Vec<(f64, f64)>,
}

impl MixingMeasure {
    pub fn new(spec: MeasureSpec) -> Result<Self> {
        Self::with_nodes(spec, DEFAULT_NODES)
    }

    pub fn with_nodes(spec: MeasureSpec, nodes_per_part: usize) -> Result<Self> {
        if nodes_per_part == 0 {
            return Err(Error::Config("node count must be positive".into()));
        }
        let mut atoms = Vec::new();
        let mut parts = Vec::new();
        match &spec {
            MeasureSpec::Dirac { y } => {
                if !y.is_finite() {
                    return Err(Error::Config(format!("dirac location {y} not finite")));
                }
                atoms.push((*y, 1.0));
            }
            MeasureSpec::Atoms { atoms: list } => {
                if list.is_empty() {
                    return Err(Error::Config("atoms list is empty".into()));
                }
                for &[y, w] in list {
                    if !(w > 0.0 && w.is_finite() && y.is_finite()) {
                        return Err(Error::Config(format!("atom ({y}, {w}) needs finite y and positive weight")));
                    }
                    atoms.push((y, w));
                }
                let total: f64 = atoms.iter().map(|a| a.1).sum();
                if (total - 1.0).abs() > 1e-10 {
                    return Err(Error::Config(format!("atom weights sum to {total}, not 1")));
                }
            }
            MeasureSpec::Uniform { lo, hi } => {
                if !(lo < hi && lo.is_finite() && hi.is_finite()) {
                    return Err(Error::Config(format!("uniform support [{lo}, {hi}] is empty or unbounded")));
                }
                parts.push(Part::Uniform { lo: *lo, hi: *hi });
            }
            MeasureSpec::Pareto { scale, shape } => {
                if !(*scale > 0.0 && *shape > 0.0 && scale.is_finite() && shape.is_finite()) {
                    return Err(Error::Config("pareto scale and shape must be positive".into()));
                }
                parts.push(Part::Pareto { scale: *scale, shape: *shape });
            }
            MeasureSpec::Tabulated { points } => {
                if points.len() < 2 {
                    return Err(Error::Config("tabulated density needs at least two points".into()));
                }
                if points.windows(2).any(|w| !(w[1][0] > w[0][0])) || points.iter().any(|p| !(p[1] >= 0.0)) {
                    return Err(Error::Config("tabulated density needs increasing y and nonnegative values".into()));
                }
                let mass: f64 = points.windows(2).map(|w| 0.5 * (w[1][0] - w[0][0]) * (w[0][1] + w[1][1])).sum();
                if !(mass > 0.0 && mass.is_finite()) {
                    return Err(Error::Config("tabulated density has zero mass".into()));
                }
                parts.push(Part::Tabulated { points: points.clone(), mass });
            }
        }
        let mut nodes: Vec<(f64, f64)> = atoms.clone();
        for part in &parts {
            nodes.extend(part.nodes(nodes_per_part));
        }
        nodes.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Self { spec, atoms, parts, nodes })
    }

    pub fn spec(&self) -> &MeasureSpec {
        &self.spec
    }

    /// Quadrature nodes `(y_j, ω_j)`, sorted by `y_j`.
    pub fn nodes(&self) -> &[(f64, f64)] {
        &self.nodes
    }

    pub fn total_weight(&self) -> f64 {
        self.nodes.iter().map(|n| n.1).sum()
    }

    /// `Σ ω_j g(y_j)` summed in node order.
    pub fn expect<G: Fn(f64) -> f64>(&self, g: G) -> f64 {
        self.nodes.iter().map(|&(y, w)| w * g(y)).sum()
    }

    /// `∫ g dp` for nonnegative `g`, probing the support endpoints for divergence.
    ///
    /// Each continuous part is integrated over `[δ, 1 - δ]` in its unit variable for
    /// `δ = 10^{-2}, ..., 10^{-14}` and the partial sums are classified.
    pub fn expect_extended<G: Fn(f64) -> f64>(&self, g: G) -> Extended {
        let mut total = 0.0;
        for &(y, w) in &self.atoms {
            let v = w * g(y);
            if !v.is_finite() {
                return Extended::Infinite;
            }
            total += v;
        }
        for part in &self.parts {
            for left in [true, false] {
                let h = |u: f64| {
                    let (y, wt) = if left { part.at_left(u) } else { part.at_right(u) };
                    if wt == 0.0 {
                        0.0
                    } else {
                        wt * g(y)
                    }
                };
                let mut increments = Vec::new();
                let mut upper = 0.5;
                for k in 2..=14 {
                    let delta = 10f64.powi(-k);
                    match quad::tanh_sinh(h, delta, upper, 1e-10) {
                        Ok(e) => increments.push(e.value),
                        Err(_) => return Extended::Infinite,
                    }
                    upper = delta;
                }
                match quad::classify_partial_sums(&increments, 1e-10) {
                    Extended::Finite(v) => total += v,
                    Extended::Infinite => return Extended::Infinite,
                }
            }
        }
        if total > quad::DIVERGENCE_THRESHOLD {
            Extended::Infinite
        } else {
            Extended::Finite(total)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_one() {
        let specs = [
            MeasureSpec::Dirac { y: 0.5 },
            MeasureSpec::Atoms { atoms: vec![[0.3, 0.5], [0.7, 0.5]] },
            MeasureSpec::Uniform { lo: 0.0, hi: 1.0 },
            MeasureSpec::Pareto { scale: 1.0, shape: 2.0 },
            MeasureSpec::Tabulated { points: vec![[0.1, 0.0], [0.5, 3.0], [0.9, 1.0]] },
        ];
        for s in specs {
            let m = MixingMeasure::new(s.clone()).unwrap();
            assert!((m.total_weight() - 1.0).abs() < 1e-10, "{s:?}");
            assert!(m.nodes().iter().all(|n| n.1 >= 0.0));
            assert!(m.nodes().windows(2).all(|w| w[0].0 <= w[1].0));
        }
    }

    #[test]
    fn pareto_moments() {
        // E Y = βγ/(β-1), E 1/Y = βγ^{-1}/(β+1), E 1/(1+Y) by direct quadrature in y
        let m = MixingMeasure::new(MeasureSpec::Pareto { scale: 1.0, shape: 3.0 }).unwrap();
        assert!((m.expect(|y| y) - 1.5).abs() < 1e-4);
        assert!((m.expect(|y| 1.0 / y) - 0.75).abs() < 1e-6);
        let oracle = quad::exp_sinh(|v| 3.0 * (1.0 + v).powf(-4.0) / (2.0 + v), 1e-13).unwrap().value;
        assert!((m.expect(|y| 1.0 / (1.0 + y)) - oracle).abs() < 1e-7);
    }

    #[test]
    fn uniform_nodes_stay_inside() {
        let m = MixingMeasure::new(MeasureSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        assert!(m.nodes().iter().all(|n| n.0 > 0.0 && n.0 < 1.0));
        assert!((m.expect(|y| y.exp()) - (std::f64::consts::E - 1.0)).abs() < 1e-13);
    }

    #[test]
    fn extended_expectation_detects_divergence() {
        let m = MixingMeasure::new(MeasureSpec::Uniform { lo: 0.0, hi: 1.0 }).unwrap();
        assert_eq!(m.expect_extended(|y| 1.0 / y), Extended::Infinite);
        assert_eq!(m.expect_extended(|y| 1.0 / (1.0 - y)), Extended::Infinite);
        let v = m.expect_extended(|y| y.powf(-0.5)).value();
        assert!((v - 2.0).abs() < 1e-6, "{v}");
        let v = m.expect_extended(|y| y * y).value();
        assert!((v - 1.0 / 3.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn bad_specs_rejected() {
        assert!(MixingMeasure::new(MeasureSpec::Atoms { atoms: vec![[0.3, 0.5]] }).is_err());
        assert!(MixingMeasure::new(MeasureSpec::Uniform { lo: 1.0, hi: 0.0 }).is_err());
        let err = serde_json::from_str::<MeasureSpec>(r#"{"kind":"beta"}"#).unwrap_err().to_string();
        assert!(err.contains("pareto"), "{err}");
    }
}
