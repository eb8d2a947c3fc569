//! Run configuration: one JSON document, leaf overrides by dotted path.
//!
//! ```json
//! {
//!   "family":  { "kind": "stable", "exponent": { "map": "identity" } },
//!   "measure": { "kind": "uniform", "lo": 0.2, "hi": 0.8 },
//!   "nodes_per_part": 64,
//!   "output_dir": "out",
//!   "inversion":  { "nodes": 32, "scale": 1.0 },
//!   "simulation": { "epsilon": 1e-4, "compensate_small_jumps": true, "horizon": 10.0,
//!                   "path_count": 100000, "base_seed": 0, "stream_stride": 1 },
//!   "exponent":  { "lambda": <grid>, "s": <grid> },
//!   "simulate":  { "t": 1.0, "lambda": <grid>, "path_grid": <grid>, "export_paths": 10 },
//!   "invert":    { "x": 1.0, "t": 1.0, "t_grid": <grid>, "x_grid": <grid> },
//!   "operator":  { "step": 1e-3, "count": 40001, "lambda": <grid> },
//!   "diffuse":   { "dimension": 1, "t": 1.0, "r_grid": <grid>, "msd_times": <grid> },
//!   "certify":   { "grid": { "lo": 0.01, "hi": 100, "count": 64, "log_spaced": true,
//!                            "max_order": 4, "rtol": 1e-7 },
//!                  "classes": ["CBF", "SBF", "TBF", "ME"] },
//!   "conjugate": { "lambda": <grid>, "t_grid": <grid> }
//! }
//! ```
//!
//! Only `family` and `measure` are required. A `<grid>` is either an explicit array
//! of numbers or `{ "lo": .., "hi": .., "count": .., "log": false }`.
//!
//! Families (`kind`): stable (`exponent`), gamma (`rate`), drift (`slope`),
//! killed (`rate`, optional `base` family), compound-poisson (`rate`, `jump`),
//! custom-tabulated (`rate`, `tail` as `[[s, T(s)], ...]`). Each coefficient is a
//! parameter map of `y` (`map`): identity, constant (`value`), linear (`scale`,
//! `offset`), power (`coef`, `exponent`).
//!
//! Measures (`kind`): dirac (`y`), atoms (`atoms` as `[[y, weight], ...]`),
//! uniform (`lo`, `hi`), pareto (`scale`, `shape`), tabulated (`points` as
//! `[[y, density], ...]`).

use std::path::{Path, PathBuf};

use levymix::certify::{CheckGrid, ClassKind};
use levymix::quad;
use levymix::sampler::SimulationConfig;
use levymix::transforms::InversionConfig;
use levymix::{Error, Family, MeasureSpec, Result};
use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

/// Environment variable naming the default output directory.
pub const OUT_DIR_ENV: &str = "LEVYMIX_OUT_DIR";
pub const DEFAULT_OUT_DIR: &str = "levymix-out";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Grid {
    Points(Vec<f64>),
    Range {
        lo: f64,
        hi: f64,
        count: usize,
        #[serde(default)]
        log: bool,
    },
}

impl Grid {
    fn range(lo: f64, hi: f64, count: usize, log: bool) -> Self {
        Grid::Range { lo, hi, count, log }
    }

    pub fn values(&self) -> Result<Vec<f64>> {
        match *self {
            Grid::Points(ref p) if p.is_empty() => Err(Error::Config("grid has no points".into())),
            Grid::Points(ref p) => Ok(p.clone()),
            Grid::Range { count: 0, .. } => Err(Error::Config("grid count must be positive".into())),
            Grid::Range { lo, hi, count, log } => {
                if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
                    return Err(Error::Config(format!("grid bounds [{lo}, {hi}] are invalid")));
                }
                if log && lo <= 0.0 {
                    return Err(Error::Config("log grids need a positive lower bound".into()));
                }
                Ok(if count == 1 {
                    vec![lo]
                } else if log {
                    quad::logspace(lo, hi, count)
                } else {
                    quad::linspace(lo, hi, count)
                })
            }
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExponentParams {
    pub lambda: Grid,
    pub s: Grid,
}

impl Default for ExponentParams {
    fn default() -> Self {
        Self { lambda: Grid::range(1e-2, 1e2, 41, true), s: Grid::range(1e-2, 1e2, 41, true) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimulateParams {
    pub t: f64,
    pub lambda: Grid,
    /// Operational times at which exported paths are evaluated.
    pub path_grid: Grid,
    pub export_paths: usize,
}

impl Default for SimulateParams {
    fn default() -> Self {
        Self { t: 1.0, lambda: Grid::Points(vec![1.0]), path_grid: Grid::range(0.0, 1.0, 101, false), export_paths: 10 }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct InvertParams {
    /// Operational time of `μ(·, x)`.
    pub x: f64,
    /// Time of `l(·, t)`.
    pub t: f64,
    pub t_grid: Grid,
    pub x_grid: Grid,
}

impl Default for InvertParams {
    fn default() -> Self {
        Self { x: 1.0, t: 1.0, t_grid: Grid::range(0.05, 5.0, 100, false), x_grid: Grid::range(0.02, 4.0, 200, false) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OperatorParams {
    pub step: f64,
    pub count: usize,
    pub lambda: Grid,
}

impl Default for OperatorParams {
    fn default() -> Self {
        Self { step: 1e-3, count: 40_001, lambda: Grid::Points(vec![0.5, 1.0, 2.0, 5.0]) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DiffuseParams {
    pub dimension: usize,
    pub t: f64,
    pub r_grid: Grid,
    pub msd_times: Grid,
}

impl Default for DiffuseParams {
    fn default() -> Self {
        Self { dimension: 1, t: 1.0, r_grid: Grid::range(0.0, 5.0, 101, false), msd_times: Grid::range(0.1, 100.0, 31, true) }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CertifyParams {
    pub grid: CheckGrid,
    pub classes: Vec<ClassKind>,
}

impl Default for CertifyParams {
    fn default() -> Self {
        Self { grid: CheckGrid::default(), classes: vec![ClassKind::Cbf, ClassKind::Sbf, ClassKind::Tbf, ClassKind::Me] }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConjugateParams {
    pub lambda: Grid,
    pub t_grid: Grid,
}

impl Default for ConjugateParams {
    fn default() -> Self {
        Self { lambda: Grid::range(1e-2, 1e2, 41, true), t_grid: Grid::range(0.05, 5.0, 100, false) }
    }
}

fn default_nodes() -> usize {
    levymix::measure::DEFAULT_NODES
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub family: Family,
    pub measure: MeasureSpec,
    #[serde(default = "default_nodes")]
    pub nodes_per_part: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub inversion: InversionConfig,
    #[serde(default)]
    pub simulation: SimulationConfig,
    #[serde(default)]
    pub exponent: ExponentParams,
    #[serde(default)]
    pub simulate: SimulateParams,
    #[serde(default)]
    pub invert: InvertParams,
    #[serde(default)]
    pub operator: OperatorParams,
    #[serde(default)]
    pub diffuse: DiffuseParams,
    #[serde(default)]
    pub certify: CertifyParams,
    #[serde(default)]
    pub conjugate: ConjugateParams,
}

impl RunConfig {
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read config {}: {e}", path.display())))?;
        let mut doc: Value = serde_json::from_str(&text)
            .map_err(|e| Error::Config(format!("config {} is not valid JSON: {e}", path.display())))?;
        for item in overrides {
            apply_override(&mut doc, item)?;
        }
        Self::from_value(doc)
    }

    pub fn from_value(doc: Value) -> Result<Self> {
        check_registry(&doc, "family", levymix::family::REGISTRY)?;
        check_registry(&doc, "measure", levymix::measure::REGISTRY)?;
        serde_json::from_value(doc).map_err(|e| Error::Config(e.to_string()))
    }

    /// SHA-256 of the canonical JSON form (sorted keys, defaults filled in), without
    /// the output directory.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.output_dir = None;
        let value = serde_json::to_value(&canonical).expect("config serializes");
        let digest = Sha256::digest(value.to_string().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    /// Flag, then config field, then the environment, then the default.
    pub fn output_dir(&self, flag: Option<&Path>) -> PathBuf {
        flag.map(Path::to_path_buf)
            .or_else(|| self.output_dir.clone())
            .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR))
    }
}

/// Rejects unknown `kind`s with the registry in the message, before serde sees them.
fn check_registry(doc: &Value, key: &str, registry: &str) -> Result<()> {
    let Some(section) = doc.get(key) else {
        return Err(Error::Config(format!("missing `{key}` section")));
    };
    match section.get("kind").and_then(Value::as_str) {
        Some(kind) if registry.split(", ").any(|k| k == kind) => Ok(()),
        Some(kind) => Err(Error::Config(format!("unknown {key} kind `{kind}`; registry: {registry}"))),
        None => Err(Error::Config(format!("`{key}.kind` must be one of: {registry}"))),
    }
}

/// `a.b.c=value`; the value is parsed as JSON and kept as a string otherwise.
pub fn apply_override(doc: &mut Value, item: &str) -> Result<()> {
    let (path, raw) = item
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override `{item}` must look like a.b=value")))?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    let keys: Vec<&str> = path.split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(Error::Config(format!("override path `{path}` has an empty segment")));
    }
    let mut node = doc;
    for key in &keys[..keys.len() - 1] {
        if !node.is_object() {
            return Err(Error::Config(format!("override `{path}`: `{key}` is not inside an object")));
        }
        node = node
            .as_object_mut()
            .expect("checked")
            .entry(key.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    let last = keys[keys.len() - 1];
    node.as_object_mut()
        .ok_or_else(|| Error::Config(format!("override `{path}`: parent is not an object")))?
        .insert(last.to_string(), value);
    Ok(())
}
