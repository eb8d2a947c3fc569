//! Simulation of distributed-order subordinators, their inverses and delayed
//! Brownian motion, with Monte-Carlo estimators.
//!
//! Jumps below `ε` are dropped and replaced by their mean drift
//! `∫_0^ε s E ν(ds, Y)` when compensation is on; the remaining bias is of order
//! `∫_0^ε s² E ν(ds, Y)`.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Exp, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::family::Family;
use crate::mixing::MixedExponent;
use crate::quad;

/// Number of horizon doublings tried before a first passage is declared out of reach.
pub const HORIZON_DOUBLINGS: u32 = 6;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimulationConfig {
    /// Jump-size floor.
    pub epsilon: f64,
    pub compensate_small_jumps: bool,
    /// Operational-time horizon of sampled paths.
    pub horizon: f64,
    pub path_count: usize,
    pub base_seed: u64,
    pub stream_stride: u64,
}

impl Default for SimulationConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-4,
            compensate_small_jumps: true,
            horizon: 10.0,
            path_count: 100_000,
            base_seed: 0,
            stream_stride: 1,
        }
    }
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Config(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if self.path_count == 0 {
            return Err(Error::Config("path_count must be at least 1".into()));
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(Error::Config(format!("horizon must be positive, got {}", self.horizon)));
        }
        if self.stream_stride == 0 {
            return Err(Error::Config("stream_stride must be at least 1".into()));
        }
        Ok(())
    }

    /// Independent stream for path `index`.
    pub fn rng(&self, index: usize) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.base_seed);
        rng.set_stream(index as u64 * self.stream_stride);
        rng
    }
}

/// Compound-Poisson approximation of the mixed subordinator: jumps above `ε` at
/// total rate `Λ(ε) = E ν((ε, ∞), Y)`, node `j` chosen with probability
/// `ω_j ν((ε, ∞), y_j) / Λ(ε)`.
#[derive(Debug, Clone)]
pub struct JumpSampler {
    family: Family,
    epsilon: f64,
    nodes: Vec<f64>,
    index: Option<WeightedIndex<f64>>,
    /// `Λ(ε)`.
    pub total_rate: f64,
    /// `E a(Y)`.
    pub kill_rate: f64,
    /// `E b(Y)`.
    pub drift_rate: f64,
    /// Mean of the dropped jumps per unit time (zero when compensation is off).
    pub compensation_rate: f64,
}

pub fn build_jump_sampler(mixed: &MixedExponent, epsilon: f64, compensate: bool) -> Result<JumpSampler> {
    if !(epsilon > 0.0) {
        return Err(Error::Config(format!("epsilon must be positive, got {epsilon}")));
    }
    let family = mixed.family().clone();
    let weights: Vec<f64> = mixed.nodes().iter().map(|&(y, w)| w * family.jump_tail(epsilon, y)).collect();
    let total_rate = quad::pairwise_sum(&weights);
    if !total_rate.is_finite() {
        return Err(Error::Config(format!("jump rate above epsilon = {epsilon} is infinite; increase epsilon")));
    }
    let index = if total_rate > 0.0 {
        Some(WeightedIndex::new(&weights).map_err(|e| Error::Config(format!("node weights: {e}")))?)
    } else {
        None
    };
    Ok(JumpSampler {
        family,
        epsilon,
        nodes: mixed.nodes().iter().map(|n| n.0).collect(),
        index,
        total_rate,
        kill_rate: mixed.mixed_kill(),
        drift_rate: mixed.mixed_drift(),
        compensation_rate: if compensate { mixed.small_jump_mean(epsilon) } else { 0.0 },
    })
}

impl JumpSampler {
    /// Slope of the path between jumps.
    pub fn slope(&self) -> f64 {
        self.drift_rate + self.compensation_rate
    }

    pub fn sample_jump<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        match &self.index {
            Some(index) => {
                let y = self.nodes[index.sample(rng)];
                self.family.sample_jump(y, self.epsilon, rng)
            }
            None => 0.0,
        }
    }

    fn kill_time<R: Rng + ?Sized>(&self, rng: &mut R) -> Option<f64> {
        (self.kill_rate > 0.0).then(|| Exp::new(self.kill_rate).expect("positive rate").sample(rng))
    }

    fn next_gap<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        if self.total_rate > 0.0 {
            Exp::new(self.total_rate).expect("positive rate").sample(rng)
        } else {
            f64::INFINITY
        }
    }

    /// Path on `[0, horizon]`.
    pub fn sample_path<R: Rng + ?Sized>(&self, horizon: f64, rng: &mut R) -> SubordinatorPath {
        let kill_time = self.kill_time(rng);
        let mut path = SubordinatorPath {
            jump_times: Vec::new(),
            jump_sizes: Vec::new(),
            cumulative: Vec::new(),
            drift_rate: self.drift_rate,
            compensation_rate: self.compensation_rate,
            kill_time,
            horizon: 0.0,
            next_arrival: 0.0,
        };
        path.next_arrival = self.next_gap(rng);
        self.extend(&mut path, horizon, rng);
        path
    }

    /// Continues a path from its horizon to `horizon`, using the same stream.
    pub fn extend<R: Rng + ?Sized>(&self, path: &mut SubordinatorPath, horizon: f64, rng: &mut R) {
        while path.next_arrival <= horizon {
            let size = self.sample_jump(rng);
            let total = path.cumulative.last().copied().unwrap_or(0.0) + size;
            path.jump_times.push(path.next_arrival);
            path.jump_sizes.push(size);
            path.cumulative.push(total);
            path.next_arrival += self.next_gap(rng);
        }
        path.horizon = path.horizon.max(horizon);
    }

    /// `σ(s)` at one operational time, without storing the path; `∞` once killed.
    pub fn sample_sigma<R: Rng + ?Sized>(&self, s: f64, rng: &mut R) -> f64 {
        if let Some(k) = self.kill_time(rng) {
            if k <= s {
                return f64::INFINITY;
            }
        }
        let mut level = self.slope() * s;
        let mut clock = self.next_gap(rng);
        while clock <= s {
            level += self.sample_jump(rng);
            clock += self.next_gap(rng);
        }
        level
    }

    /// `L(t) = inf{s ≥ 0 : σ(s) > t}`, simulated until passage; the horizon is
    /// doubled up to [`HORIZON_DOUBLINGS`] times.
    pub fn first_passage<R: Rng + ?Sized>(&self, t: f64, horizon: f64, rng: &mut R) -> Result<f64> {
        let limit = horizon * 2f64.powi(HORIZON_DOUBLINGS as i32);
        let kill = self.kill_time(rng).unwrap_or(f64::INFINITY);
        let slope = self.slope();
        let mut level = 0.0;
        let mut clock = 0.0;
        loop {
            let next = clock + self.next_gap(rng);
            let stop = next.min(kill).min(limit);
            if slope > 0.0 && level + slope * (stop - clock) > t {
                return Ok(clock + (t - level) / slope);
            }
            if stop == kill {
                return Ok(kill);
            }
            if stop == limit {
                return Err(Error::Horizon { horizon: limit, t });
            }
            level += slope * (next - clock) + self.sample_jump(rng);
            clock = next;
            if level > t {
                return Ok(clock);
            }
        }
    }
}

/// Piecewise-linear nondecreasing path of the truncated subordinator.
#[derive(Debug, Clone, PartialEq)]
pub struct SubordinatorPath {
    pub jump_times: Vec<f64>,
    pub jump_sizes: Vec<f64>,
    cumulative: Vec<f64>,
    pub drift_rate: f64,
    pub compensation_rate: f64,
    pub kill_time: Option<f64>,
    pub horizon: f64,
    next_arrival: f64,
}

impl SubordinatorPath {
    pub fn slope(&self) -> f64 {
        self.drift_rate + self.compensation_rate
    }

    /// `σ(s)`; infinite from the kill time on.
    pub fn eval(&self, s: f64) -> f64 {
        if self.kill_time.is_some_and(|k| s >= k) {
            return f64::INFINITY;
        }
        let n = self.jump_times.partition_point(|&tau| tau <= s);
        let jumps = if n == 0 { 0.0 } else { self.cumulative[n - 1] };
        self.slope() * s + jumps
    }

    /// `inf{s ≥ 0 : σ(s) > t}` within the simulated horizon.
    pub fn inverse(&self, t: f64) -> Result<f64> {
        let slope = self.slope();
        let kill = self.kill_time.unwrap_or(f64::INFINITY);
        let mut before = 0.0;
        let mut clock = 0.0;
        for (&tau, &total) in self.jump_times.iter().zip(&self.cumulative) {
            let stop = tau.min(kill);
            if slope > 0.0 && before + slope * stop > t {
                return Ok((t - before) / slope);
            }
            if stop == kill {
                return Ok(kill);
            }
            if slope * tau + total > t {
                return Ok(tau);
            }
            before = total;
            clock = tau;
        }
        let stop = self.horizon.min(kill);
        if slope > 0.0 && before + slope * stop > t {
            return Ok((t - before) / slope);
        }
        if kill <= self.horizon && kill >= clock {
            return Ok(kill);
        }
        Err(Error::Horizon { horizon: self.horizon, t })
    }
}

/// Monte-Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub mean: f64,
    pub se: f64,
    pub n_paths: usize,
}

/// Mean and standard error with deterministic pairwise reductions.
pub fn summarize(values: &[f64]) -> McEstimate {
    let n = values.len();
    let mean = quad::pairwise_sum(values) / n as f64;
    let sq: Vec<f64> = values.iter().map(|v| (v - mean) * (v - mean)).collect();
    let var = if n > 1 { quad::pairwise_sum(&sq) / (n - 1) as f64 } else { 0.0 };
    McEstimate { mean, se: (var / n as f64).sqrt(), n_paths: n }
}

/// Estimator record for `E exp(-λ σ(t))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LaplaceEstimate {
    pub lambda: f64,
    pub t: f64,
    pub estimate: f64,
    pub se: f64,
    pub n_paths: usize,
    pub epsilon: f64,
}

fn per_path<F>(cfg: &SimulationConfig, f: F) -> Result<Vec<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    (0..cfg.path_count)
        .into_par_iter()
        .map(|i| f(&mut cfg.rng(i)))
        .collect()
}

/// Sampled path `index` on `[0, cfg.horizon]`.
pub fn sample_path(mixed: &MixedExponent, cfg: &SimulationConfig, index: usize) -> Result<SubordinatorPath> {
    cfg.validate()?;
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    Ok(sampler.sample_path(cfg.horizon, &mut cfg.rng(index)))
}

/// `E exp(-λ σ(t))`; killed paths contribute zero.
pub fn estimate_laplace(mixed: &MixedExponent, lambda: f64, t: f64, cfg: &SimulationConfig) -> Result<LaplaceEstimate> {
    cfg.validate()?;
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    let values = per_path(cfg, |rng| Ok((-lambda * sampler.sample_sigma(t, rng)).exp()))?;
    let s = summarize(&values);
    Ok(LaplaceEstimate { lambda, t, estimate: s.mean, se: s.se, n_paths: s.n_paths, epsilon: cfg.epsilon })
}

/// Draws of `L(t)`, one per path.
pub fn sample_inverse(mixed: &MixedExponent, t: f64, cfg: &SimulationConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    per_path(cfg, |rng| sampler.first_passage(t, cfg.horizon, rng))
}

/// Delayed Brownian motion `B(L(t))` in `n` dimensions for path `index`, with
/// per-coordinate variance `2 L(t)`.
pub fn sample_delayed_bm(mixed: &MixedExponent, t: f64, n: usize, cfg: &SimulationConfig, index: usize) -> Result<Vec<f64>> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::Config("dimension must be at least 1".into()));
    }
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    let mut rng = cfg.rng(index);
    let l = sampler.first_passage(t, cfg.horizon, &mut rng)?;
    Ok(delayed_point(l, n, &mut rng))
}

fn delayed_point<R: Rng + ?Sized>(l: f64, n: usize, rng: &mut R) -> Vec<f64> {
    let sd = (2.0 * l).sqrt();
    (0..n).map(|_| sd * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Monte-Carlo `E |B(L(t))|²`.
pub fn estimate_msd(mixed: &MixedExponent, t: f64, n: usize, cfg: &SimulationConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    let values = per_path(cfg, |rng| {
        let l = sampler.first_passage(t, cfg.horizon, rng)?;
        Ok(delayed_point(l, n, rng).iter().map(|x| x * x).sum())
    })?;
    Ok(summarize(&values))
}

/// Gaussian-kernel density estimate of `B(L(t))` at the origin with bandwidth `h`,
/// conditioned on `L` (the kernel convolved with the conditional law in closed form).
pub fn kde_at_origin(mixed: &MixedExponent, t: f64, n: usize, bandwidth: f64, cfg: &SimulationConfig) -> Result<McEstimate> {
    cfg.validate()?;
    let sampler = build_jump_sampler(mixed, cfg.epsilon, cfg.compensate_small_jumps)?;
    let values = per_path(cfg, |rng| {
        let l = sampler.first_passage(t, cfg.horizon, rng)?;
        let var = 2.0 * l + bandwidth * bandwidth;
        Ok((2.0 * std::f64::consts::PI * var).powf(-(n as f64) / 2.0))
    })?;
    Ok(summarize(&values))
}
