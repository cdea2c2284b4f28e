//! Benchmark harness: Gap/Err quality metrics, cross-product experiment
//! suites over generated instances, CSV/text reporting, and what-if
//! scenarios that re-solve an instance under more resources or machines.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::heuristics::{
    atcs_run, ga_run_with_stats, sa_run_with_stats, GaParams, SaParams,
};
use crate::instgen::{generate, GenConfig, SetupMode, WrMode};
use crate::model::{Instance, TimedSchedule};
use crate::par;
use crate::relaxation::{mip_primal, solve_tiny_exact_with_caps, TinyCaps};
use crate::resalloc::AllocLimits;
use crate::seeding::derive_seed;

/// Worst-case optimality gap `(alg_sol - lower_bound) / alg_sol`; zero when
/// the solution value is zero. A solution below its lower bound signals a
/// bug upstream and is an error.
pub fn gap(alg_sol: i64, lower_bound: i64) -> Result<f64> {
    if alg_sol < lower_bound {
        return Err(Error::BoundViolation { solution: alg_sol, bound: lower_bound });
    }
    if alg_sol == 0 {
        return Ok(0.0);
    }
    Ok((alg_sol - lower_bound) as f64 / alg_sol as f64)
}

/// Relative error against the best known solution,
/// `(alg_sol - best_sol) / alg_sol`; zero when the solution value is zero.
pub fn err(alg_sol: i64, best_sol: i64) -> Result<f64> {
    if best_sol > alg_sol {
        return Err(Error::BoundViolation { solution: alg_sol, bound: best_sol });
    }
    if alg_sol == 0 {
        return Ok(0.0);
    }
    Ok((alg_sol - best_sol) as f64 / alg_sol as f64)
}

/// Solution methods the harness can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlgoKind {
    Atcs,
    Ga,
    SaAtcs,
    SaGa,
    Mip,
}

impl AlgoKind {
    pub fn as_str(self) -> &'static str {
        match self {
            AlgoKind::Atcs => "atcs",
            AlgoKind::Ga => "ga",
            AlgoKind::SaAtcs => "sa-atcs",
            AlgoKind::SaGa => "sa-ga",
            AlgoKind::Mip => "mip",
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        match text {
            "atcs" => Ok(AlgoKind::Atcs),
            "ga" => Ok(AlgoKind::Ga),
            "sa-atcs" => Ok(AlgoKind::SaAtcs),
            "sa-ga" => Ok(AlgoKind::SaGa),
            "mip" => Ok(AlgoKind::Mip),
            other => Err(Error::InvalidArgument(format!("unknown algorithm '{other}'"))),
        }
    }
}

/// GA knobs as stored in suite files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaKnobs {
    pub pop_size: usize,
    pub generations: usize,
    pub crossover_threshold: f64,
    pub mutation_rate: f64,
}

impl Default for GaKnobs {
    fn default() -> Self {
        let d = GaParams::default();
        GaKnobs {
            pop_size: d.pop_size,
            generations: d.generations,
            crossover_threshold: d.crossover_threshold,
            mutation_rate: d.mutation_rate,
        }
    }
}

/// SA knobs as stored in suite files.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SaKnobs {
    pub t0: f64,
    pub t_cry: f64,
    pub cooling: f64,
    pub iters_per_temp: usize,
}

impl Default for SaKnobs {
    fn default() -> Self {
        let d = SaParams::default();
        SaKnobs { t0: d.t0, t_cry: d.t_cry, cooling: d.cooling, iters_per_temp: d.iters_per_temp }
    }
}

/// Shared algorithm configuration for suite runs and what-if scenarios.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AlgoConfig {
    pub ga: GaKnobs,
    pub sa: SaKnobs,
    /// Instances within these caps get an exact relaxation bound (and can
    /// run the `mip` method).
    pub lb_max_jobs: usize,
    pub lb_max_machines: usize,
    pub time_limit_s: Option<u64>,
    pub alloc_node_cap: u64,
    pub alloc_time_cap_s: u64,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        let alloc = AllocLimits::default();
        let tiny = TinyCaps::default();
        AlgoConfig {
            ga: GaKnobs::default(),
            sa: SaKnobs::default(),
            lb_max_jobs: tiny.max_jobs,
            lb_max_machines: tiny.max_machines,
            time_limit_s: None,
            alloc_node_cap: alloc.node_cap,
            alloc_time_cap_s: alloc.time_cap.as_secs(),
        }
    }
}

impl AlgoConfig {
    pub fn alloc_limits(&self) -> AllocLimits {
        AllocLimits {
            node_cap: self.alloc_node_cap,
            time_cap: std::time::Duration::from_secs(self.alloc_time_cap_s),
        }
    }

    fn ga_params(&self, seed: u64) -> GaParams {
        GaParams {
            pop_size: self.ga.pop_size,
            generations: self.ga.generations,
            crossover_threshold: self.ga.crossover_threshold,
            mutation_rate: self.ga.mutation_rate,
            time_limit: self.time_limit_s.map(std::time::Duration::from_secs),
            seed,
            alloc_limits: self.alloc_limits(),
            audit_pruning: false,
        }
    }

    fn sa_params(&self, seed: u64) -> SaParams {
        SaParams {
            t0: self.sa.t0,
            t_cry: self.sa.t_cry,
            cooling: self.sa.cooling,
            iters_per_temp: self.sa.iters_per_temp,
            seed,
            alloc_limits: self.alloc_limits(),
        }
    }

    fn tiny_caps(&self) -> TinyCaps {
        TinyCaps { max_jobs: self.lb_max_jobs, max_machines: self.lb_max_machines }
    }
}

/// A declarative experiment suite: the cross product of the listed facets,
/// each instance solved by each algorithm `reps` times with derived seeds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteSpec {
    pub machines: Vec<usize>,
    pub mult: Vec<u32>,
    pub setup: Vec<SetupMode>,
    pub tau: Vec<f64>,
    pub wr: Vec<WrMode>,
    pub algos: Vec<AlgoKind>,
    pub reps: usize,
    pub base_seed: u64,
    #[serde(default = "default_due_range")]
    pub due_range: f64,
    #[serde(default)]
    pub config: AlgoConfig,
}

fn default_due_range() -> f64 {
    0.8
}

/// One `(instance, algorithm, repetition)` execution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub instance_id: String,
    pub jobs: usize,
    pub machines: usize,
    pub mult: u32,
    pub setup: String,
    pub wr_mode: String,
    pub tau: f64,
    pub wr: usize,
    pub algo: String,
    pub rep: usize,
    pub seed: u64,
    pub objective: i64,
    pub time_s: f64,
    pub lower_bound: Option<i64>,
    pub gap: Option<f64>,
    pub err: f64,
    pub optimal_alloc: bool,
    /// Exact-allocator invocations during the run (CP-equivalent calls).
    pub cp_calls: u64,
    /// Chromosomes the GA discarded on the cutoff without exact pricing.
    pub pruned: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub instance_id: String,
    pub algo: String,
    pub rep: usize,
    pub message: String,
}

/// Mean Gap/Time/Err per (facet, value, algorithm).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateRow {
    pub facet: String,
    pub value: String,
    pub algo: String,
    pub runs: usize,
    pub mean_gap: Option<f64>,
    pub mean_time_s: f64,
    pub mean_err: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchOutput {
    pub records: Vec<RunRecord>,
    pub aggregates: Vec<AggregateRow>,
    pub failures: Vec<FailureRecord>,
}

struct InstanceCell {
    id: String,
    config: GenConfig,
    instance: Instance,
    lower_bound: Option<i64>,
}

fn format_tau(tau: f64) -> String {
    format!("{tau}")
}

/// Runs the whole suite. `workers` caps the parallel cells when the
/// `parallel` feature is enabled; the records come back in deterministic
/// cell order either way.
pub fn run_suite(spec: &SuiteSpec, workers: usize) -> Result<BenchOutput> {
    if spec.reps == 0 {
        return Err(Error::InvalidArgument("reps must be at least 1".into()));
    }
    if spec.machines.is_empty()
        || spec.mult.is_empty()
        || spec.setup.is_empty()
        || spec.tau.is_empty()
        || spec.wr.is_empty()
        || spec.algos.is_empty()
    {
        return Err(Error::InvalidArgument("suite facets must be non-empty".into()));
    }

    // Instances: one per facet combination, with a seed derived from the
    // combination index so reordering facets changes nothing per cell.
    let mut cells: Vec<InstanceCell> = Vec::new();
    let mut combo = 0u64;
    for &machines in &spec.machines {
        for &mult in &spec.mult {
            for &setup in &spec.setup {
                for &tau in &spec.tau {
                    for &wr in &spec.wr {
                        let seed = derive_seed(spec.base_seed, &[1, combo]);
                        let config = GenConfig {
                            machines,
                            jobs_multiplier: mult,
                            setup_mode: setup,
                            tau,
                            due_range: spec.due_range,
                            wr_mode: wr,
                            seed,
                        };
                        let instance = generate(&config)?;
                        let lower_bound = if instance.jobs <= spec.config.lb_max_jobs
                            && instance.machines <= spec.config.lb_max_machines
                        {
                            Some(
                                solve_tiny_exact_with_caps(&instance, &spec.config.tiny_caps())?
                                    .bound,
                            )
                        } else {
                            None
                        };
                        let id = format!(
                            "{}x{}-{}-t{}-{}-s{}",
                            instance.jobs,
                            machines,
                            setup.as_str(),
                            format_tau(tau),
                            wr.as_str(),
                            seed
                        );
                        cells.push(InstanceCell { id, config, instance, lower_bound });
                        combo += 1;
                    }
                }
            }
        }
    }

    struct Task {
        cell_idx: usize,
        algo: AlgoKind,
        rep: usize,
        seed: u64,
    }
    let mut tasks: Vec<Task> = Vec::new();
    for (cell_idx, _) in cells.iter().enumerate() {
        for (algo_idx, &algo) in spec.algos.iter().enumerate() {
            for rep in 0..spec.reps {
                let seed =
                    derive_seed(spec.base_seed, &[2, cell_idx as u64, algo_idx as u64, rep as u64]);
                tasks.push(Task { cell_idx, algo, rep, seed });
            }
        }
    }

    let run_task = |task: &Task| -> std::result::Result<(i64, f64, bool, u64, u64), String> {
        let cell = &cells[task.cell_idx];
        let started = Instant::now();
        let outcome = run_algo(&cell.instance, task.algo, task.seed, &spec.config);
        let elapsed = started.elapsed().as_secs_f64();
        match outcome {
            Ok(run) => Ok((run.schedule.objective, elapsed, run.schedule.proven_optimal_allocation, run.cp_calls, run.pruned)),
            Err(e) => Err(e.to_string()),
        }
    };
    let outcomes = run_in_pool(workers, || par::map_indexed(&tasks, run_task));

    let mut records: Vec<RunRecord> = Vec::new();
    let mut failures: Vec<FailureRecord> = Vec::new();
    for (task, outcome) in tasks.iter().zip(outcomes) {
        let cell = &cells[task.cell_idx];
        match outcome {
            Ok((objective, time_s, optimal_alloc, cp_calls, pruned)) => {
                records.push(RunRecord {
                    instance_id: cell.id.clone(),
                    jobs: cell.instance.jobs,
                    machines: cell.instance.machines,
                    mult: cell.config.jobs_multiplier,
                    setup: cell.config.setup_mode.as_str().to_string(),
                    wr_mode: cell.config.wr_mode.as_str().to_string(),
                    tau: cell.config.tau,
                    wr: cell.instance.wr,
                    algo: task.algo.as_str().to_string(),
                    rep: task.rep,
                    seed: task.seed,
                    objective,
                    time_s,
                    lower_bound: cell.lower_bound,
                    gap: None,
                    err: 0.0,
                    optimal_alloc,
                    cp_calls,
                    pruned,
                });
            }
            Err(message) => failures.push(FailureRecord {
                instance_id: cell.id.clone(),
                algo: task.algo.as_str().to_string(),
                rep: task.rep,
                message,
            }),
        }
    }

    // Err is relative to the best value any method found on the instance.
    for idx in 0..records.len() {
        let best = records
            .iter()
            .filter(|r| r.instance_id == records[idx].instance_id)
            .map(|r| r.objective)
            .min()
            .unwrap();
        records[idx].err = err(records[idx].objective, best)?;
        if let Some(lb) = records[idx].lower_bound {
            records[idx].gap = Some(gap(records[idx].objective, lb)?);
        }
    }

    let aggregates = aggregate(&records, &spec.algos);
    Ok(BenchOutput { records, aggregates, failures })
}

#[cfg(feature = "parallel")]
fn run_in_pool<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 0 {
        return f();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .expect("thread pool");
    pool.install(f)
}

#[cfg(not(feature = "parallel"))]
fn run_in_pool<R>(_workers: usize, f: impl FnOnce() -> R) -> R {
    f()
}

pub struct AlgoRun {
    pub schedule: TimedSchedule,
    pub cp_calls: u64,
    pub pruned: u64,
}

/// Runs one method on one instance with one seed.
pub fn run_algo(
    inst: &Instance,
    algo: AlgoKind,
    seed: u64,
    config: &AlgoConfig,
) -> Result<AlgoRun> {
    let limits = config.alloc_limits();
    let contended = inst.wr < inst.machines;
    match algo {
        AlgoKind::Atcs => {
            let schedule = atcs_run(inst, &limits)?;
            Ok(AlgoRun { schedule, cp_calls: contended as u64, pruned: 0 })
        }
        AlgoKind::Ga => {
            let (schedule, stats) = ga_run_with_stats(inst, &config.ga_params(seed))?;
            Ok(AlgoRun {
                schedule,
                cp_calls: stats.exact_evaluations,
                pruned: stats.pruned_count,
            })
        }
        AlgoKind::SaAtcs => {
            let initial = atcs_run(inst, &limits)?;
            let (schedule, stats) =
                sa_run_with_stats(inst, &initial, &config.sa_params(derive_seed(seed, &[3])))?;
            Ok(AlgoRun { schedule, cp_calls: stats.evaluations, pruned: 0 })
        }
        AlgoKind::SaGa => {
            let (initial, ga_stats) = ga_run_with_stats(inst, &config.ga_params(seed))?;
            let (schedule, stats) =
                sa_run_with_stats(inst, &initial, &config.sa_params(derive_seed(seed, &[3])))?;
            Ok(AlgoRun {
                schedule,
                cp_calls: ga_stats.exact_evaluations + stats.evaluations,
                pruned: ga_stats.pruned_count,
            })
        }
        AlgoKind::Mip => {
            let lb = solve_tiny_exact_with_caps(inst, &config.tiny_caps())?;
            let plan = lb.plan.expect("exact solve returns a plan");
            let schedule = mip_primal(inst, &plan, &limits)?;
            Ok(AlgoRun { schedule, cp_calls: contended as u64, pruned: 0 })
        }
    }
}

fn aggregate(records: &[RunRecord], algos: &[AlgoKind]) -> Vec<AggregateRow> {
    let mut rows = Vec::new();
    type FacetKey = fn(&RunRecord) -> String;
    let facets: [(&str, FacetKey); 5] = [
        ("JxM", |r| format!("{}x{}", r.jobs, r.machines)),
        ("ratio", |r| format!("{}x|M|", r.mult)),
        ("alpha", |r| r.setup.clone()),
        ("WR", |r| r.wr_mode.clone()),
        ("tau", |r| format_tau(r.tau)),
    ];
    for (facet, key) in &facets {
        let mut values: Vec<String> = records.iter().map(key).collect();
        values.sort();
        values.dedup();
        for value in values {
            for algo in algos {
                let group: Vec<&RunRecord> = records
                    .iter()
                    .filter(|r| key(r) == value && r.algo == algo.as_str())
                    .collect();
                if group.is_empty() {
                    continue;
                }
                let runs = group.len();
                let gaps: Vec<f64> = group.iter().filter_map(|r| r.gap).collect();
                let mean_gap = if gaps.is_empty() {
                    None
                } else {
                    Some(gaps.iter().sum::<f64>() / gaps.len() as f64)
                };
                rows.push(AggregateRow {
                    facet: facet.to_string(),
                    value: value.clone(),
                    algo: algo.as_str().to_string(),
                    runs,
                    mean_gap,
                    mean_time_s: group.iter().map(|r| r.time_s).sum::<f64>() / runs as f64,
                    mean_err: group.iter().map(|r| r.err).sum::<f64>() / runs as f64,
                });
            }
        }
    }
    rows
}

/// Renders the records as CSV with a fixed column set.
pub fn records_csv(records: &[RunRecord]) -> String {
    let mut out = String::from(
        "instance_id,jobs,machines,mult,setup,wr_mode,tau,wr,algo,rep,seed,objective,time_s,lower_bound,gap,err,optimal_alloc,cp_calls,pruned\n",
    );
    for r in records {
        let lb = r.lower_bound.map_or(String::new(), |v| v.to_string());
        let gap = r.gap.map_or(String::new(), |v| format!("{v:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{:.3},{},{},{:.6},{},{},{}\n",
            r.instance_id,
            r.jobs,
            r.machines,
            r.mult,
            r.setup,
            r.wr_mode,
            format_tau(r.tau),
            r.wr,
            r.algo,
            r.rep,
            r.seed,
            r.objective,
            r.time_s,
            lb,
            gap,
            r.err,
            r.optimal_alloc,
            r.cp_calls,
            r.pruned
        ));
    }
    out
}

pub fn aggregates_csv(rows: &[AggregateRow]) -> String {
    let mut out = String::from("facet,value,algo,runs,mean_gap,mean_time_s,mean_err\n");
    for r in rows {
        let gap = r.mean_gap.map_or(String::new(), |v| format!("{v:.6}"));
        out.push_str(&format!(
            "{},{},{},{},{},{:.3},{:.6}\n",
            r.facet, r.value, r.algo, r.runs, gap, r.mean_time_s, r.mean_err
        ));
    }
    out
}

/// Human-readable summary; percentages carry two decimals.
pub fn render_summary(output: &BenchOutput) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "{} runs, {} failures\n",
        output.records.len(),
        output.failures.len()
    ));
    out.push_str("facet        value        algo      runs  gap%     time(s)  err%\n");
    for row in &output.aggregates {
        let gap = row
            .mean_gap
            .map_or("   -".to_string(), |g| format!("{:.2}", 100.0 * g));
        out.push_str(&format!(
            "{:<12} {:<12} {:<9} {:>4}  {:>6}  {:>7.2}  {:>6.2}\n",
            row.facet,
            row.value,
            row.algo,
            row.runs,
            gap,
            row.mean_time_s,
            100.0 * row.mean_err
        ));
    }
    for failure in &output.failures {
        out.push_str(&format!(
            "FAILED {} {} rep {}: {}\n",
            failure.instance_id, failure.algo, failure.rep, failure.message
        ));
    }
    out
}

/// What-if scenario: change the resource count or add machines.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum WhatIfChange {
    Wr(usize),
    AddMachines { count: usize, donor: Option<usize> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WhatIfReport {
    pub scenario: String,
    pub algo: String,
    pub base_objective: i64,
    pub new_objective: i64,
    pub absolute_change: i64,
    /// Relative change in percent; absent when the base objective is zero
    /// and the scenario is not.
    pub percent_change: Option<f64>,
}

/// Builds the overridden instance. New machines either clone a donor
/// machine's processing/setup columns or draw fresh columns from the
/// generator distributions (setup recipe from the instance meta when
/// present, otherwise uniform). The change is recorded in the instance meta.
pub fn apply_change(inst: &Instance, change: &WhatIfChange, seed: u64) -> Result<Instance> {
    use rand::{Rng, SeedableRng};
    let mut out = inst.clone();
    let note;
    match change {
        WhatIfChange::Wr(wr) => {
            out = inst.with_wr(*wr)?;
            note = format!("what-if: WR {} -> {}", inst.wr, wr);
        }
        WhatIfChange::AddMachines { count, donor } => {
            if *count == 0 {
                return Err(Error::InvalidArgument("must add at least one machine".into()));
            }
            match donor {
                Some(d) => {
                    if *d >= inst.machines {
                        return Err(Error::InvalidArgument(format!("unknown donor machine {d}")));
                    }
                    for j in 0..inst.jobs {
                        let col = out.p[j][*d];
                        out.p[j].extend(std::iter::repeat_n(col, *count));
                    }
                    for i in 0..inst.jobs {
                        for j in 0..inst.jobs {
                            let col = out.s[i][j][*d];
                            out.s[i][j].extend(std::iter::repeat_n(col, *count));
                        }
                    }
                    note = format!("what-if: +{count} machines cloned from machine {d}");
                }
                None => {
                    let setup_mode = inst
                        .meta
                        .as_ref()
                        .and_then(|m| m.generator.as_ref())
                        .map(|g| SetupMode::parse(&g.setup_mode))
                        .transpose()?
                        .unwrap_or(SetupMode::Uniform);
                    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(derive_seed(seed, &[7]));
                    for k in 0..*count {
                        let _ = k;
                        let b: Vec<f64> =
                            (0..inst.jobs).map(|_| rng.random_range(1.0..=10.0)).collect();
                        for (j, b_j) in b.iter().enumerate() {
                            let a: f64 = rng.random_range(1.0..=10.0);
                            let noise: f64 = rng.random_range(0.0..=10.0);
                            out.p[j].push((b_j * a + noise).round() as i64);
                        }
                        let new_m = out.p[0].len() - 1;
                        for i in 0..inst.jobs {
                            for j in 0..inst.jobs {
                                if i == j {
                                    out.s[i][j].push(0);
                                    continue;
                                }
                                let v = match setup_mode {
                                    SetupMode::AlphaLow => {
                                        (rng.random_range(0.1..=0.5) * out.p[j][new_m] as f64)
                                            .round() as i64
                                    }
                                    SetupMode::AlphaHigh => {
                                        (rng.random_range(0.5..=1.0) * out.p[j][new_m] as f64)
                                            .round() as i64
                                    }
                                    SetupMode::Uniform => {
                                        rng.random_range(5.0..=25.0f64).round() as i64
                                    }
                                };
                                out.s[i][j].push(v);
                            }
                        }
                    }
                    note = format!(
                        "what-if: +{count} machines drawn from the generator distributions (seed {seed})"
                    );
                }
            }
            out.machines += count;
        }
    }
    out.check()?;
    let meta = out.meta.get_or_insert_with(Default::default);
    meta.annotations.push(note);
    Ok(out)
}

/// Solves the base and the overridden instance with the same algorithm and
/// seed and reports the objective change.
pub fn whatif(
    inst: &Instance,
    change: &WhatIfChange,
    algo: AlgoKind,
    seed: u64,
    config: &AlgoConfig,
) -> Result<WhatIfReport> {
    let changed = apply_change(inst, change, seed)?;
    let base = run_algo(inst, algo, seed, config)?.schedule.objective;
    let new = run_algo(&changed, algo, seed, config)?.schedule.objective;
    let scenario = match change {
        WhatIfChange::Wr(wr) => format!("WR {} -> {}", inst.wr, wr),
        WhatIfChange::AddMachines { count, donor } => match donor {
            Some(d) => format!("|M| {} -> {} (clone machine {d})", inst.machines, inst.machines + count),
            None => format!("|M| {} -> {} (generator draw)", inst.machines, inst.machines + count),
        },
    };
    let percent_change = if base != 0 {
        Some(100.0 * (new - base) as f64 / base as f64)
    } else if new == 0 {
        Some(0.0)
    } else {
        None
    };
    Ok(WhatIfReport {
        scenario,
        algo: algo.as_str().to_string(),
        base_objective: base,
        new_objective: new,
        absolute_change: new - base,
        percent_change,
    })
}
