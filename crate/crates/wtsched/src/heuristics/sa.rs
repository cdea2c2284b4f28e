//! Simulated annealing over sequence plans.
//!
//! Neighbourhoods alternate between an external (inter-machine) and an
//! internal (intra-machine) swap, both picked deterministically from the
//! per-machine weighted-tardiness profile of the current schedule; the only
//! randomness is the Metropolis acceptance draw. Every candidate is
//! evaluated in full (sequential timing, then exact allocation when
//! resources bind): worse solutions can be accepted, so no cutoff rule can
//! skip the allocator here.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::model::{
    extract_plan, weighted_tardiness, Instance, JobId, MachineId, SequencePlan, TimedSchedule,
};
use crate::relaxation::mip_primal;
use crate::resalloc::AllocLimits;

#[derive(Debug, Clone)]
pub struct SaParams {
    /// Initial temperature.
    pub t0: f64,
    /// Freezing temperature; the walk stops once the temperature is at or
    /// below it.
    pub t_cry: f64,
    /// Geometric cooling factor.
    pub cooling: f64,
    /// Iterations per temperature level.
    pub iters_per_temp: usize,
    pub seed: u64,
    pub alloc_limits: AllocLimits,
}

impl Default for SaParams {
    fn default() -> Self {
        SaParams {
            t0: 500.0,
            t_cry: 1.0,
            cooling: 0.9,
            iters_per_temp: 50,
            seed: 0,
            alloc_limits: AllocLimits::default(),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct SaStats {
    /// Number of candidate plans evaluated (one per iteration).
    pub evaluations: u64,
    /// Best objective after each evaluation; never increases.
    pub best_history: Vec<i64>,
}

/// Metropolis acceptance probability `exp(-delta / t)`.
pub fn acceptance_probability(delta: i64, temperature: f64) -> f64 {
    (-(delta as f64) / temperature).exp()
}

fn job_tardiness(inst: &Instance, sched: &TimedSchedule, job: JobId) -> i64 {
    weighted_tardiness(sched.jobs[job].completion, inst.d[job], inst.w[job])
}

fn machine_tardiness(inst: &Instance, plan: &SequencePlan, sched: &TimedSchedule) -> Vec<i64> {
    plan.seq
        .iter()
        .map(|list| list.iter().map(|&j| job_tardiness(inst, sched, j)).sum())
        .collect()
}

fn argmax_machine(totals: &[i64]) -> MachineId {
    let mut best = 0;
    for (m, &v) in totals.iter().enumerate() {
        if v > totals[best] {
            best = m;
        }
    }
    best
}

fn argmin_machine(totals: &[i64]) -> MachineId {
    let mut best = 0;
    for (m, &v) in totals.iter().enumerate() {
        if v < totals[best] {
            best = m;
        }
    }
    best
}

/// Inter-machine swap: the most weighted-tardy job of the worst machine goes
/// first on the best machine, whose least weighted-tardy job goes last on
/// the worst machine. Returns `None` (no-op) when both machines coincide or
/// either is empty.
pub fn sa_external_swap(
    inst: &Instance,
    plan: &SequencePlan,
    sched: &TimedSchedule,
) -> Option<SequencePlan> {
    let totals = machine_tardiness(inst, plan, sched);
    let worst = argmax_machine(&totals);
    let best = argmin_machine(&totals);
    if worst == best || plan.seq[worst].is_empty() || plan.seq[best].is_empty() {
        return None;
    }
    let moving_out = *plan.seq[worst]
        .iter()
        .max_by_key(|&&j| (job_tardiness(inst, sched, j), std::cmp::Reverse(j)))
        .unwrap();
    let moving_in = *plan.seq[best]
        .iter()
        .min_by_key(|&&j| (job_tardiness(inst, sched, j), j))
        .unwrap();
    let mut seq = plan.seq.clone();
    seq[worst].retain(|&j| j != moving_out);
    seq[best].retain(|&j| j != moving_in);
    seq[best].insert(0, moving_out);
    seq[worst].push(moving_in);
    Some(SequencePlan::new(seq))
}

/// Intra-machine swap on the most weighted-tardy machine: exchange the
/// positions of its most and least weighted-tardy jobs. When every job there
/// is equally tardy the smallest and largest job ids swap. `None` when the
/// machine holds fewer than two jobs.
pub fn sa_internal_swap(
    inst: &Instance,
    plan: &SequencePlan,
    sched: &TimedSchedule,
) -> Option<SequencePlan> {
    let totals = machine_tardiness(inst, plan, sched);
    let target = argmax_machine(&totals);
    let list = &plan.seq[target];
    if list.len() < 2 {
        return None;
    }
    let mut most = *list
        .iter()
        .max_by_key(|&&j| (job_tardiness(inst, sched, j), std::cmp::Reverse(j)))
        .unwrap();
    let mut least = *list
        .iter()
        .min_by_key(|&&j| (job_tardiness(inst, sched, j), j))
        .unwrap();
    if most == least {
        most = *list.iter().min().unwrap();
        least = *list.iter().max().unwrap();
    }
    let mut seq = plan.seq.clone();
    let pos_most = seq[target].iter().position(|&j| j == most).unwrap();
    let pos_least = seq[target].iter().position(|&j| j == least).unwrap();
    seq[target].swap(pos_most, pos_least);
    Some(SequencePlan::new(seq))
}

/// Runs simulated annealing from `initial` (an ATCS or GA schedule) and
/// returns the best schedule seen.
pub fn sa_run(inst: &Instance, initial: &TimedSchedule, params: &SaParams) -> Result<TimedSchedule> {
    sa_run_with_stats(inst, initial, params).map(|(sched, _)| sched)
}

pub fn sa_run_with_stats(
    inst: &Instance,
    initial: &TimedSchedule,
    params: &SaParams,
) -> Result<(TimedSchedule, SaStats)> {
    let plan = extract_plan(inst, initial)?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut stats = SaStats::default();

    let mut current = (plan, initial.clone());
    let mut best = current.clone();
    let mut temperature = params.t0;
    let mut external = true;

    while params.t_cry < temperature {
        for _ in 0..params.iters_per_temp {
            let swapped = if external {
                sa_external_swap(inst, &current.0, &current.1)
            } else {
                sa_internal_swap(inst, &current.0, &current.1)
            };
            external = !external;
            // A no-op swap re-evaluates the unchanged plan; the iteration
            // still counts one candidate evaluation.
            let plan = swapped.unwrap_or_else(|| current.0.clone());
            let sched = mip_primal(inst, &plan, &params.alloc_limits)?;
            stats.evaluations += 1;

            if sched.objective < best.1.objective {
                best = (plan.clone(), sched.clone());
                current = (plan, sched);
            } else {
                let delta = sched.objective - current.1.objective;
                let draw: f64 = rng.random();
                if draw < acceptance_probability(delta, temperature) {
                    current = (plan, sched);
                }
            }
            stats.best_history.push(best.1.objective);
        }
        temperature *= params.cooling;
    }
    Ok((best.1, stats))
}

/// Number of temperature levels a geometric cooling schedule visits:
/// `ceil(log_cooling(t_cry / t0))`, i.e. the smallest `k` with
/// `t0 * cooling^k <= t_cry`.
pub fn cooling_steps(t0: f64, t_cry: f64, cooling: f64) -> u64 {
    if t_cry >= t0 {
        return 0;
    }
    ((t_cry / t0).ln() / cooling.ln()).ceil() as u64
}
