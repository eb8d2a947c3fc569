//! One runner per subcommand. Each writes its CSV tables and a `<command>.json`
//! summary into the output directory.
//!
//! CSV columns:
//!
//! | command     | file            | columns                                                   |
//! |-------------|-----------------|-----------------------------------------------------------|
//! | `exponent`  | `exponent.csv`  | `lambda, mixed_f`                                         |
//! |             | `tail.csv`      | `s, mixed_tail, cumulative_tail`                          |
//! | `simulate`  | `paths.csv`     | `path, s, sigma_of_s`                                     |
//! |             | `laplace.csv`   | `lambda, t, estimate, se, n_paths, epsilon`               |
//! | `invert`    | `mu.csv`        | `t, mu`                                                   |
//! |             | `l.csv`         | `x, l`                                                    |
//! |             | `renewal.csv`   | `t, u`                                                    |
//! | `operator`  | `kernel.csv`    | `k, s_lo, s_hi, weight, moment`                           |
//! |             | `symbol.csv`    | `lambda, rl_residual, regularized_residual`               |
//! | `diffuse`   | `q.csv`         | `r, t, q`                                                 |
//! |             | `msd.csv`       | `t, msd, asymptote`                                       |
//! | `conjugate` | `conjugate.csv` | `lambda, mixed_f, mixed_f_star, inverse_local_time_exponent` |
//! |             | `potential.csv` | `t, potential_density, potential_cumulative`              |

use std::path::PathBuf;

use clap::ValueEnum;
use levymix::certify::class_check;
use levymix::conjugate::MixedConjugate;
use levymix::diffusion;
use levymix::export::{write_csv_file, write_json_file};
use levymix::operators::{apply_rl, build_kernel, symbol_check, TimeGrid};
use levymix::quad::Extended;
use levymix::sampler::{estimate_laplace, sample_path};
use levymix::transforms::{inverse_density, renewal_function, subordinator_density};
use levymix::{Error, MixedExponent, MixingMeasure, Result, TOOL_VERSION};
use serde::Serialize;
use serde_json::{json, Value};

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    /// Tabulate `E f(λ, Y)` and the kernel `E ν̄(s, Y)`.
    Exponent,
    /// Sample paths and estimate `E exp(-λ σ(t))`.
    Simulate,
    /// Densities of `σ(x)` and `L(t)` and the renewal function.
    Invert,
    /// Kernel weights and Laplace-symbol residuals of the operators.
    Operator,
    /// Fundamental solution, mean square displacement, index and diffusivity limit.
    Diffuse,
    /// CBF/SBF/TBF/ME certificates.
    Certify,
    /// Conjugate exponent and potential measure.
    Conjugate,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Exponent => "exponent",
            Command::Simulate => "simulate",
            Command::Invert => "invert",
            Command::Operator => "operator",
            Command::Diffuse => "diffuse",
            Command::Certify => "certify",
            Command::Conjugate => "conjugate",
        }
    }
}

struct Run {
    cfg: RunConfig,
    mixed: MixedExponent,
    out: PathBuf,
    hash: String,
    command: Command,
}

impl Run {
    fn file(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }

    /// `<command>.json`, stamped with the tool version and config hash.
    fn summary<T: Serialize>(&self, payload: &T) -> Result<()> {
        let mut doc = match serde_json::to_value(payload)? {
            Value::Object(map) => map,
            other => [("result".to_string(), other)].into_iter().collect(),
        };
        doc.insert("tool_version".into(), json!(TOOL_VERSION));
        doc.insert("config_hash".into(), json!(self.hash));
        doc.insert("command".into(), json!(self.command.name()));
        write_json_file(&self.file(&format!("{}.json", self.command.name())), &Value::Object(doc))
    }
}

fn extended(v: f64) -> Extended {
    if v.is_finite() {
        Extended::Finite(v)
    } else {
        Extended::Infinite
    }
}

pub fn run(command: Command, cfg: RunConfig, out: PathBuf) -> Result<PathBuf> {
    let measure = MixingMeasure::with_nodes(cfg.measure.clone(), cfg.nodes_per_part)?;
    let mixed = MixedExponent::new(cfg.family.clone(), measure)?;
    std::fs::create_dir_all(&out)
        .map_err(|e| Error::Config(format!("output directory {} is not writable: {e}", out.display())))?;
    let hash = cfg.hash();
    let run = Run { cfg, mixed, out, hash, command };
    match command {
        Command::Exponent => exponent(&run),
        Command::Simulate => simulate(&run),
        Command::Invert => invert(&run),
        Command::Operator => operator(&run),
        Command::Diffuse => diffuse(&run),
        Command::Certify => certify(&run),
        Command::Conjugate => conjugate(&run),
    }?;
    Ok(run.out)
}

fn exponent(run: &Run) -> Result<()> {
    let m = &run.mixed;
    let lambdas = run.cfg.exponent.lambda.values()?;
    write_csv_file(&run.file("exponent.csv"), &["lambda", "mixed_f"], lambdas.iter().map(|&l| vec![l, m.mixed_f(l)]))?;
    let s = run.cfg.exponent.s.values()?;
    write_csv_file(
        &run.file("tail.csv"),
        &["s", "mixed_tail", "cumulative_tail"],
        s.iter().map(|&s| vec![s, m.mixed_tail(s), m.mixed_cumulative_tail(s)]),
    )?;
    run.summary(&json!({
        "family": m.family().name(),
        "assumptions": m.report(),
        "mixed_kill": m.mixed_kill(),
        "mixed_drift": m.mixed_drift(),
        "total_mass": extended(m.total_mass()),
        "mean_jump": extended(m.mean_jump()),
        "nodes": m.nodes().len(),
    }))
}

fn simulate(run: &Run) -> Result<()> {
    let p = &run.cfg.simulate;
    let sim = &run.cfg.simulation;
    sim.validate()?;
    let grid = p.path_grid.values()?;
    if grid.iter().any(|&s| !(0.0..=sim.horizon).contains(&s)) {
        return Err(Error::Config(format!("path_grid must lie in [0, horizon = {}]", sim.horizon)));
    }
    let mut rows = Vec::new();
    for i in 0..p.export_paths.min(sim.path_count) {
        let path = sample_path(&run.mixed, sim, i)?;
        rows.extend(grid.iter().map(|&s| vec![i as f64, s, path.eval(s)]));
    }
    write_csv_file(&run.file("paths.csv"), &["path", "s", "sigma_of_s"], rows)?;
    let estimates = p
        .lambda
        .values()?
        .into_iter()
        .map(|lam| estimate_laplace(&run.mixed, lam, p.t, sim))
        .collect::<Result<Vec<_>>>()?;
    write_csv_file(
        &run.file("laplace.csv"),
        &["lambda", "t", "estimate", "se", "n_paths", "epsilon"],
        estimates.iter().map(|e| vec![e.lambda, e.t, e.estimate, e.se, e.n_paths as f64, e.epsilon]),
    )?;
    let exact: Vec<f64> = estimates.iter().map(|e| (-e.t * run.mixed.mixed_f(e.lambda)).exp()).collect();
    run.summary(&json!({ "estimates": estimates, "exact": exact, "simulation": sim }))
}

fn invert(run: &Run) -> Result<()> {
    let p = &run.cfg.invert;
    let cfg = &run.cfg.inversion;
    cfg.validate()?;
    let t_grid = p.t_grid.values()?;
    let u = renewal_function(&run.mixed, &t_grid, cfg)?;
    write_csv_file(&run.file("renewal.csv"), &["t", "u"], u.points.iter().zip(&u.values).map(|(&t, &v)| vec![t, v]))?;
    let mut summary = json!({ "u": { "clipped": u.clipped, "nondecreasing": u.is_nondecreasing() } });
    if run.mixed.total_mass().is_finite() {
        summary["skipped"] = json!("mu and l: finite activity, sigma(x) has an atom at every x");
    } else {
        let mu = subordinator_density(&run.mixed, p.x, &t_grid, cfg)?;
        write_csv_file(&run.file("mu.csv"), &["t", "mu"], mu.points.iter().zip(&mu.values).map(|(&t, &v)| vec![t, v]))?;
        let l = inverse_density(&run.mixed, &p.x_grid.values()?, p.t, cfg)?;
        write_csv_file(&run.file("l.csv"), &["x", "l"], l.points.iter().zip(&l.values).map(|(&x, &v)| vec![x, v]))?;
        summary["mu"] = json!({ "x": p.x, "clipped": mu.clipped, "mass_on_grid": mu.mass() });
        summary["l"] = json!({ "t": p.t, "clipped": l.clipped, "mass_on_grid": l.mass(), "first_moment_on_grid": l.first_moment() });
    }
    run.summary(&summary)
}

fn operator(run: &Run) -> Result<()> {
    let p = &run.cfg.operator;
    let grid = TimeGrid::new(p.step, p.count)?;
    let kernel = build_kernel(&run.mixed, grid)?;
    kernel.write_csv(&run.file("kernel.csv"))?;
    let u = grid.sample(|t| (-t).exp());
    let report = symbol_check(&u, &run.mixed, &p.lambda.values()?, grid)?;
    write_csv_file(
        &run.file("symbol.csv"),
        &["lambda", "rl_residual", "regularized_residual"],
        (0..report.lambdas.len()).map(|i| vec![report.lambdas[i], report.rl_residuals[i], report.regularized_residuals[i]]),
    )?;
    // u ≡ 1 must reproduce the kernel
    let ones = apply_rl(&vec![1.0; grid.count], &kernel)?;
    let constant_gap = ones
        .points
        .iter()
        .zip(&ones.values)
        .zip(&kernel.weights)
        .map(|((_, &v), &w)| (v - w / p.step).abs())
        .fold(0.0, f64::max);
    run.summary(&json!({ "step": p.step, "count": p.count, "test_function": "exp(-t)", "symbol": report, "constant_input_gap": constant_gap }))
}

fn diffuse(run: &Run) -> Result<()> {
    let p = &run.cfg.diffuse;
    let cfg = &run.cfg.inversion;
    cfg.validate()?;
    let field = diffusion::fundamental_solution(&run.mixed, &p.r_grid.values()?, p.t, p.dimension, cfg)?;
    field.write_csv(&run.file("q.csv"))?;
    let times = p.msd_times.values()?;
    let curve = diffusion::msd(&run.mixed, &times, p.dimension, cfg)?;
    curve.write_csv(&run.file("msd.csv"))?;
    let last = *times.last().expect("grid is nonempty");
    run.summary(&json!({
        "dimension": p.dimension,
        "t": p.t,
        "mass_on_grid": field.mass(),
        "regular_variation": diffusion::regular_variation_index(&run.mixed),
        "msd_asymptotic_ratio": { "t": last, "ratio": diffusion::msd_asymptotic_ratio(&run.mixed, last, cfg)? },
        "diffusivity_limit": diffusion::diffusivity_limit(&run.mixed)?,
    }))
}

fn certify(run: &Run) -> Result<()> {
    let p = &run.cfg.certify;
    let certificates: Vec<_> = p.classes.iter().map(|&k| class_check(k, &run.mixed, &p.grid)).collect();
    let passed: serde_json::Map<String, Value> =
        certificates.iter().map(|c| (serde_json::to_value(c.kind).expect("kind").as_str().unwrap_or("?").to_string(), json!(c.passed()))).collect();
    run.summary(&json!({ "passed": passed, "certificates": certificates }))
}

fn conjugate(run: &Run) -> Result<()> {
    let p = &run.cfg.conjugate;
    let cfg = &run.cfg.inversion;
    cfg.validate()?;
    let conj = MixedConjugate::new(&run.mixed, cfg)?;
    let lambdas = p.lambda.values()?;
    write_csv_file(
        &run.file("conjugate.csv"),
        &["lambda", "mixed_f", "mixed_f_star", "inverse_local_time_exponent"],
        lambdas
            .iter()
            .map(|&l| vec![l, run.mixed.mixed_f(l), conj.mixed_f_star(l), conj.inverse_local_time_exponent(l)]),
    )?;
    let rows = p
        .t_grid
        .values()?
        .into_iter()
        .map(|t| Ok(vec![t, conj.potential_density(t)?, conj.potential_cumulative(t)?]))
        .collect::<Result<Vec<_>>>()?;
    write_csv_file(&run.file("potential.csv"), &["t", "potential_density", "potential_cumulative"], rows)?;
    let nodes: Vec<_> = (0..run.mixed.nodes().len()).map(|j| conj.node(j).clone()).collect();
    run.summary(&json!({ "potential_atom": conj.potential_atom(), "nodes": nodes }))
}
