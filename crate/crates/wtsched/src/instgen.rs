//! Seeded benchmark-instance generator and instance statistics.
//!
//! Processing times are `round(b_j * a_jm + noise)` with `b_j, a_jm ~ U[1,10]`
//! and `noise ~ U[0,10]`; setups are either `round(alpha_ijm * p_jm)` with
//! `alpha` drawn per (pred, job, machine) from a configured range, or
//! `round(U(5,25))`. Weights are integers from `{1..10}` and deadlines are
//! drawn from the window `C_max * (1 - tau -+ R/2)`, clamped at zero. All real
//! draws are rounded to the nearest integer (half away from zero).
//!
//! Randomness comes from ChaCha8 keyed by the config seed, with one stream
//! per matrix (fixed stream ids below), so the same config reproduces the
//! same instance bit for bit on every platform.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{GenEcho, Instance, InstanceMeta, Time};

/// ChaCha stream ids, one per generated matrix.
mod stream {
    pub const B: u64 = 1;
    pub const A: u64 = 2;
    pub const NOISE: u64 = 3;
    pub const SETUP: u64 = 4;
    pub const WEIGHT: u64 = 5;
    pub const DEADLINE: u64 = 6;
}

/// How setup times are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SetupMode {
    /// `alpha_ijm ~ U[0.1, 0.5]` applied to the successor's processing time.
    AlphaLow,
    /// `alpha_ijm ~ U[0.5, 1.0]`.
    AlphaHigh,
    /// `s_ijm ~ U(5, 25)`, independent of processing times.
    Uniform,
}

impl SetupMode {
    pub fn as_str(self) -> &'static str {
        match self {
            SetupMode::AlphaLow => "alo",
            SetupMode::AlphaHigh => "ahi",
            SetupMode::Uniform => "u525",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "alo" | "alpha_low" => Ok(SetupMode::AlphaLow),
            "ahi" | "alpha_high" => Ok(SetupMode::AlphaHigh),
            "u525" | "uniform" => Ok(SetupMode::Uniform),
            other => Err(Error::InvalidArgument(format!("unknown setup mode '{other}'"))),
        }
    }
}

/// Number of setup resources relative to the machine count.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WrMode {
    /// `WR = ceil(|M| / 2)`.
    Half,
    /// `WR = |M|` (the resource constraint never binds).
    Full,
}

impl WrMode {
    pub fn as_str(self) -> &'static str {
        match self {
            WrMode::Half => "half",
            WrMode::Full => "full",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "half" => Ok(WrMode::Half),
            "full" => Ok(WrMode::Full),
            other => Err(Error::InvalidArgument(format!("unknown WR mode '{other}'"))),
        }
    }

    pub fn resources(self, machines: usize) -> usize {
        match self {
            WrMode::Half => machines.div_ceil(2),
            WrMode::Full => machines,
        }
    }
}

/// Generator configuration. The benchmark grid uses
/// `machines in {2,5,10,15,20}` and `jobs_multiplier in {5,10}`; the library
/// accepts any `machines >= 2`, `jobs_multiplier >= 1` so smaller instances
/// can be produced for testing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub machines: usize,
    pub jobs_multiplier: u32,
    pub setup_mode: SetupMode,
    /// Due-date tightness factor.
    pub tau: f64,
    /// Due-date range factor.
    pub due_range: f64,
    pub wr_mode: WrMode,
    pub seed: u64,
}

impl GenConfig {
    pub fn check(&self) -> Result<()> {
        if self.machines < 2 {
            return Err(Error::InvalidArgument("machines must be >= 2".into()));
        }
        if self.jobs_multiplier < 1 {
            return Err(Error::InvalidArgument("jobs multiplier must be >= 1".into()));
        }
        if !self.tau.is_finite() || !self.due_range.is_finite() || self.due_range < 0.0 {
            return Err(Error::InvalidArgument("tau and due range must be finite, R >= 0".into()));
        }
        Ok(())
    }

    pub fn jobs(&self) -> usize {
        self.machines * self.jobs_multiplier as usize
    }
}

/// Observed due-date factors and mean durations of an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceStats {
    pub tau_real: f64,
    pub range_real: f64,
    pub cmax_estimate: Time,
    pub mean_p: f64,
    pub mean_s: f64,
}

fn round_nearest(x: f64) -> Time {
    x.round() as Time
}

fn stream_rng(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Makespan estimate used by deadline generation:
/// `ceil((sum_j min_m p_jm + S1) / |M|)`, where `S1` sums the smallest
/// `|J| - |M|` of the per-job minimum setup times (the first job of each
/// machine pays no setup). `S1 = 0` when `|J| <= |M|`.
pub fn estimate_cmax(inst: &Instance) -> Time {
    cmax_from_parts(inst.jobs, inst.machines, &inst.p, &inst.s)
}

fn cmax_from_parts(jobs: usize, machines: usize, p: &[Vec<Time>], s: &[Vec<Vec<Time>>]) -> Time {
    let p_min: Time = (0..jobs).map(|j| *p[j].iter().min().unwrap()).sum();
    let s1: Time = if jobs <= machines {
        0
    } else {
        let mut s_min: Vec<Time> = (0..jobs)
            .map(|j| {
                (0..jobs)
                    .filter(|&i| i != j)
                    .flat_map(|i| s[i][j].iter().copied())
                    .min()
                    .unwrap()
            })
            .collect();
        s_min.sort_unstable();
        s_min.iter().take(jobs - machines).sum()
    };
    let m = machines as Time;
    (p_min + s1 + m - 1) / m
}

/// Generates a benchmark instance. The same config (including the seed)
/// yields a bit-identical instance.
pub fn generate(config: &GenConfig) -> Result<Instance> {
    config.check()?;
    let n = config.jobs();
    let m = config.machines;

    let mut rng_b = stream_rng(config.seed, stream::B);
    let b: Vec<f64> = (0..n).map(|_| rng_b.random_range(1.0..=10.0)).collect();

    let mut rng_a = stream_rng(config.seed, stream::A);
    let mut rng_noise = stream_rng(config.seed, stream::NOISE);
    let mut p = vec![vec![0; m]; n];
    for (j, row) in p.iter_mut().enumerate() {
        for cell in row.iter_mut() {
            let a: f64 = rng_a.random_range(1.0..=10.0);
            let noise: f64 = rng_noise.random_range(0.0..=10.0);
            *cell = round_nearest(b[j] * a + noise);
        }
    }

    let mut rng_setup = stream_rng(config.seed, stream::SETUP);
    let mut s = vec![vec![vec![0; m]; n]; n];
    for (i, pred_block) in s.iter_mut().enumerate() {
        for (j, row) in pred_block.iter_mut().enumerate() {
            if i == j {
                continue;
            }
            for (mm, cell) in row.iter_mut().enumerate() {
                *cell = match config.setup_mode {
                    SetupMode::AlphaLow => {
                        round_nearest(rng_setup.random_range(0.1..=0.5) * p[j][mm] as f64)
                    }
                    SetupMode::AlphaHigh => {
                        round_nearest(rng_setup.random_range(0.5..=1.0) * p[j][mm] as f64)
                    }
                    SetupMode::Uniform => round_nearest(rng_setup.random_range(5.0..=25.0)),
                };
            }
        }
    }

    let mut rng_w = stream_rng(config.seed, stream::WEIGHT);
    let w: Vec<i64> = (0..n).map(|_| rng_w.random_range(1..=10)).collect();

    let cmax = cmax_from_parts(n, m, &p, &s) as f64;
    let lo = cmax * (1.0 - config.tau - config.due_range / 2.0);
    let hi = cmax * (1.0 - config.tau + config.due_range / 2.0);
    let mut rng_d = stream_rng(config.seed, stream::DEADLINE);
    let d: Vec<Time> = (0..n)
        .map(|_| round_nearest(rng_d.random_range(lo..=hi)).max(0))
        .collect();

    let wr = config.wr_mode.resources(m);
    let mut inst = Instance::new(n, m, p, s, 0, d, w, wr)?;
    inst.meta = Some(InstanceMeta {
        generator: Some(GenEcho {
            machines: m,
            jobs_multiplier: config.jobs_multiplier,
            setup_mode: config.setup_mode.as_str().to_string(),
            tau: config.tau,
            due_range: config.due_range,
            wr_mode: config.wr_mode.as_str().to_string(),
            seed: config.seed,
            rounding: "nearest, half away from zero".to_string(),
        }),
        annotations: Vec::new(),
    });
    Ok(inst)
}

/// Observed due-date factors: `tau = 1 - mean(d) / C_max` and
/// `R = (max d - min d) / C_max`, with `C_max` from [`estimate_cmax`].
pub fn stats(inst: &Instance) -> Result<InstanceStats> {
    let cmax = estimate_cmax(inst);
    if cmax == 0 {
        return Err(Error::UndefinedStats);
    }
    let n = inst.jobs;
    let mean_d = inst.d.iter().sum::<Time>() as f64 / n as f64;
    let d_max = *inst.d.iter().max().unwrap();
    let d_min = *inst.d.iter().min().unwrap();
    let mean_p =
        inst.p.iter().flatten().sum::<Time>() as f64 / (n * inst.machines) as f64;
    let setup_count = n * n.saturating_sub(1) * inst.machines;
    let mean_s = if setup_count == 0 {
        0.0
    } else {
        let total: Time = inst
            .s
            .iter()
            .enumerate()
            .flat_map(|(i, a)| {
                a.iter()
                    .enumerate()
                    .filter(move |(j, _)| *j != i)
                    .flat_map(|(_, row)| row.iter().copied())
            })
            .sum();
        total as f64 / setup_count as f64
    };
    Ok(InstanceStats {
        tau_real: 1.0 - mean_d / cmax as f64,
        range_real: (d_max - d_min) as f64 / cmax as f64,
        cmax_estimate: cmax,
        mean_p,
        mean_s,
    })
}
