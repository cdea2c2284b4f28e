//! Exact optimal resource allocation for fixed per-machine sequences, plus a
//! fast greedy allocator used to seed the search.
//!
//! Given a plan, the only freedom left is when each setup acquires one of the
//! `WR` resource units; processing is glued to the end of its setup and each
//! machine's chain order is fixed. For a regular objective some optimal
//! schedule is *active*: ordering its setups by start time gives a
//! chain-consistent acquisition order, and replaying any such order with
//! greedy unit assignment (place each setup at the earliest time its chain
//! predecessor has finished and the earliest-free unit is available) yields
//! start times no later than the original, component by component. The space
//! of chain-consistent acquisition orders therefore contains an optimal
//! schedule, and enumerating it is exact. [`allocate_exact`] searches this
//! space depth first, pruning with the resource-free relaxation of the
//! remaining suffix; [`allocate_brute_force`] enumerates it exhaustively and
//! serves as the reference implementation for tests.
//!
//! Zero-length setups occupy no time instant, consume no unit, and are placed
//! at their chain-ready time as forced moves.

use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::model::{
    evaluate_sequential, total_weighted_tardiness, weighted_tardiness, Instance, JobId,
    JobTiming, SequencePlan, Time, TimedSchedule,
};

/// Search budget for [`allocate_exact`].
#[derive(Debug, Clone, Copy)]
pub struct AllocLimits {
    /// Maximum number of branch-and-bound nodes.
    pub node_cap: u64,
    /// Wall-clock cap per call.
    pub time_cap: Duration,
}

impl Default for AllocLimits {
    fn default() -> Self {
        AllocLimits { node_cap: 5_000_000, time_cap: Duration::from_secs(10) }
    }
}

/// Most setups [`allocate_brute_force`] will enumerate orders for.
const BRUTE_FORCE_SETUP_CAP: usize = 10;

#[derive(Debug, Clone, Copy)]
struct ChainTask {
    job: JobId,
    size: Time,
    proc: Time,
    weight: i64,
    deadline: Time,
}

fn build_chains(inst: &Instance, plan: &SequencePlan) -> Vec<Vec<ChainTask>> {
    plan.seq
        .iter()
        .enumerate()
        .map(|(m, list)| {
            let mut prev = None;
            list.iter()
                .map(|&j| {
                    let task = ChainTask {
                        job: j,
                        size: inst.setup_after(prev, j, m),
                        proc: inst.p[j][m],
                        weight: inst.w[j],
                        deadline: inst.d[j],
                    };
                    prev = Some(j);
                    task
                })
                .collect()
        })
        .collect()
}

fn schedule_from_starts(
    inst: &Instance,
    chains: &[Vec<ChainTask>],
    starts: &[Vec<Time>],
    proven: bool,
) -> TimedSchedule {
    let mut jobs = vec![JobTiming { machine: 0, setup_start: 0, setup_end: 0, completion: 0 };
        inst.jobs];
    for (m, chain) in chains.iter().enumerate() {
        for (k, task) in chain.iter().enumerate() {
            let setup_start = starts[m][k];
            let setup_end = setup_start + task.size;
            jobs[task.job] = JobTiming {
                machine: m,
                setup_start,
                setup_end,
                completion: setup_end + task.proc,
            };
        }
    }
    let objective = total_weighted_tardiness(inst, &jobs);
    TimedSchedule { jobs, objective, proven_optimal_allocation: proven }
}

/// Mutable search state: per-machine chain position and ready time, unit
/// free times, accumulated objective and the chosen setup starts.
struct AllocState {
    pos: Vec<usize>,
    ready: Vec<Time>,
    units: Vec<Time>,
    obj: i64,
    starts: Vec<Vec<Time>>,
}

struct Placement {
    machine: usize,
    unit: Option<usize>,
    prev_unit_free: Time,
    prev_ready: Time,
    obj_delta: i64,
}

impl AllocState {
    fn new(chains: &[Vec<ChainTask>], wr: usize) -> Self {
        AllocState {
            pos: vec![0; chains.len()],
            ready: vec![0; chains.len()],
            units: vec![0; wr],
            obj: 0,
            starts: chains.iter().map(|c| vec![0; c.len()]).collect(),
        }
    }

    // Lowest-index unit on ties, so equal-cost searches stay deterministic.
    fn min_unit(&self) -> usize {
        let mut best = 0;
        for (u, &t) in self.units.iter().enumerate() {
            if t < self.units[best] {
                best = u;
            }
        }
        best
    }

    fn place(&mut self, chains: &[Vec<ChainTask>], m: usize) -> Placement {
        let k = self.pos[m];
        let task = &chains[m][k];
        let prev_ready = self.ready[m];
        let (unit, prev_unit_free, start) = if task.size == 0 {
            (None, 0, prev_ready)
        } else {
            let u = self.min_unit();
            let free = self.units[u];
            let start = free.max(prev_ready);
            self.units[u] = start + task.size;
            (Some(u), free, start)
        };
        let completion = start + task.size + task.proc;
        let obj_delta = weighted_tardiness(completion, task.deadline, task.weight);
        self.obj += obj_delta;
        self.ready[m] = completion;
        self.starts[m][k] = start;
        self.pos[m] += 1;
        Placement { machine: m, unit, prev_unit_free, prev_ready, obj_delta }
    }

    fn undo(&mut self, p: Placement) {
        self.pos[p.machine] -= 1;
        self.ready[p.machine] = p.prev_ready;
        if let Some(u) = p.unit {
            self.units[u] = p.prev_unit_free;
        }
        self.obj -= p.obj_delta;
    }

    /// Places every zero-length setup that is next in its chain; these are
    /// forced moves that never touch the unit pool.
    fn place_pending_zeros(&mut self, chains: &[Vec<ChainTask>]) -> Vec<Placement> {
        let mut placed = Vec::new();
        for m in 0..chains.len() {
            while self.pos[m] < chains[m].len() && chains[m][self.pos[m]].size == 0 {
                placed.push(self.place(chains, m));
            }
        }
        placed
    }

    /// Relaxed cost of the unplaced suffix: every remaining setup starts no
    /// earlier than its chain-ready time and no earlier than the earliest
    /// unit-free time, ignoring future contention.
    fn suffix_lower_bound(&self, chains: &[Vec<ChainTask>]) -> i64 {
        let u_min = *self.units.iter().min().unwrap();
        let mut acc = 0;
        for (m, chain) in chains.iter().enumerate() {
            let mut t = self.ready[m];
            for task in &chain[self.pos[m]..] {
                if task.size > 0 {
                    t = t.max(u_min) + task.size;
                }
                t += task.proc;
                acc += weighted_tardiness(t, task.deadline, task.weight);
            }
        }
        acc
    }
}

/// Dispatch score used by [`allocate_greedy`]: `w / (slack + 1)` with
/// `slack = d - t - size - p`. A just-in-time setup scores +inf; late jobs
/// score negative.
fn dispatch_priority(weight: i64, slack: i64) -> f64 {
    weight as f64 / (slack + 1) as f64
}

fn run_greedy(chains: &[Vec<ChainTask>], wr: usize) -> AllocState {
    let mut st = AllocState::new(chains, wr);
    loop {
        st.place_pending_zeros(chains);
        let u_min = *st.units.iter().min().unwrap();
        let mut next_time: Option<Time> = None;
        for (m, chain) in chains.iter().enumerate() {
            if st.pos[m] < chain.len() {
                let est = st.ready[m].max(u_min);
                next_time = Some(next_time.map_or(est, |t: Time| t.min(est)));
            }
        }
        let Some(t) = next_time else { break };
        let mut pick: Option<(f64, JobId, usize)> = None;
        for (m, chain) in chains.iter().enumerate() {
            if st.pos[m] >= chain.len() || st.ready[m].max(u_min) != t {
                continue;
            }
            let task = &chain[st.pos[m]];
            let slack = task.deadline - t - task.size - task.proc;
            let pr = dispatch_priority(task.weight, slack);
            let better = match pick {
                None => true,
                Some((bp, bj, _)) => pr > bp || (pr == bp && task.job < bj),
            };
            if better {
                pick = Some((pr, task.job, m));
            }
        }
        st.place(chains, pick.expect("eligible machine exists").2);
    }
    st
}

struct Search<'a> {
    chains: &'a [Vec<ChainTask>],
    incumbent_obj: i64,
    incumbent_starts: Vec<Vec<Time>>,
    nodes: u64,
    node_cap: u64,
    deadline: Instant,
    truncated: bool,
}

impl Search<'_> {
    fn dfs(&mut self, st: &mut AllocState) {
        self.nodes += 1;
        if self.nodes > self.node_cap
            || (self.nodes.is_multiple_of(4096) && Instant::now() >= self.deadline)
        {
            self.truncated = true;
            return;
        }
        let zeros = st.place_pending_zeros(self.chains);

        let mut candidates: Vec<(Time, usize)> = Vec::new();
        let u_min = *st.units.iter().min().unwrap();
        for (m, chain) in self.chains.iter().enumerate() {
            if st.pos[m] < chain.len() {
                candidates.push((st.ready[m].max(u_min), m));
            }
        }

        if candidates.is_empty() {
            if st.obj < self.incumbent_obj {
                self.incumbent_obj = st.obj;
                self.incumbent_starts = st.starts.clone();
            }
        } else if st.obj + st.suffix_lower_bound(self.chains) < self.incumbent_obj {
            candidates.sort_unstable();
            for &(_, m) in &candidates {
                let placement = st.place(self.chains, m);
                self.dfs(st);
                st.undo(placement);
                if self.truncated {
                    break;
                }
            }
        }

        for placement in zeros.into_iter().rev() {
            st.undo(placement);
        }
    }
}

/// Minimizes total weighted tardiness over all resource-feasible allocations
/// of the plan's setups: depth-first branch-and-bound over chain-consistent
/// acquisition orders, seeded with the greedy allocation and pruned by the
/// resource-free suffix relaxation. `proven_optimal_allocation` is true iff
/// the search finished within `limits`; otherwise the best incumbent is
/// returned with the flag false.
pub fn allocate_exact(
    inst: &Instance,
    plan: &SequencePlan,
    limits: &AllocLimits,
) -> Result<TimedSchedule> {
    plan.check(inst)?;
    if limits.node_cap == 0 || limits.time_cap.is_zero() {
        return Err(Error::InvalidArgument("allocation limits must be positive".into()));
    }
    // With a unit per busy machine the capacity never binds and the
    // back-to-back timing is optimal outright.
    if inst.wr >= plan.nonempty_machines() {
        let mut sched = evaluate_sequential(inst, plan)?;
        sched.proven_optimal_allocation = true;
        return Ok(sched);
    }

    let chains = build_chains(inst, plan);
    let seed = run_greedy(&chains, inst.wr);
    let mut search = Search {
        chains: &chains,
        incumbent_obj: seed.obj,
        incumbent_starts: seed.starts,
        nodes: 0,
        node_cap: limits.node_cap,
        deadline: Instant::now() + limits.time_cap,
        truncated: false,
    };
    let mut st = AllocState::new(&chains, inst.wr);
    search.dfs(&mut st);
    Ok(schedule_from_starts(inst, &chains, &search.incumbent_starts, !search.truncated))
}

/// Event-driven list scheduling: whenever a unit frees and setups are ready,
/// start the ready setup with the highest dispatch score (ties to the
/// smallest job id). Always resource-feasible; used as the incumbent seed
/// for [`allocate_exact`].
pub fn allocate_greedy(inst: &Instance, plan: &SequencePlan) -> Result<TimedSchedule> {
    plan.check(inst)?;
    let chains = build_chains(inst, plan);
    let st = run_greedy(&chains, inst.wr);
    let proven = inst.wr >= plan.nonempty_machines();
    Ok(schedule_from_starts(inst, &chains, &st.starts, proven))
}

#[derive(Clone)]
struct BruteState {
    pos: Vec<usize>,
    ready: Vec<Time>,
    units: Vec<Time>,
    obj: i64,
    starts: Vec<Vec<Time>>,
}

/// Exhaustive enumeration over all chain-consistent resource-acquisition
/// orders. Exponential; capped at ten setups. This is the reference the
/// branch-and-bound is tested against, so it deliberately shares none of its
/// search machinery.
pub fn allocate_brute_force(inst: &Instance, plan: &SequencePlan) -> Result<TimedSchedule> {
    plan.check(inst)?;
    let chains = build_chains(inst, plan);
    let mut remaining: Vec<usize> = chains
        .iter()
        .map(|c| c.iter().filter(|t| t.size > 0).count())
        .collect();
    let total: usize = remaining.iter().sum();
    if total > BRUTE_FORCE_SETUP_CAP {
        return Err(Error::SizeCap(format!(
            "{total} non-zero setups exceed the brute-force cap of {BRUTE_FORCE_SETUP_CAP}"
        )));
    }

    fn flush_zeros(st: &mut BruteState, chains: &[Vec<ChainTask>], m: usize) {
        while st.pos[m] < chains[m].len() && chains[m][st.pos[m]].size == 0 {
            let k = st.pos[m];
            let task = &chains[m][k];
            let completion = st.ready[m] + task.proc;
            st.starts[m][k] = st.ready[m];
            st.obj += weighted_tardiness(completion, task.deadline, task.weight);
            st.ready[m] = completion;
            st.pos[m] += 1;
        }
    }

    fn advance(st: &mut BruteState, chains: &[Vec<ChainTask>], m: usize) {
        flush_zeros(st, chains, m);
        let k = st.pos[m];
        let task = &chains[m][k];
        let mut u = 0;
        for (i, &t) in st.units.iter().enumerate() {
            if t < st.units[u] {
                u = i;
            }
        }
        let start = st.units[u].max(st.ready[m]);
        st.units[u] = start + task.size;
        let completion = start + task.size + task.proc;
        st.starts[m][k] = start;
        st.obj += weighted_tardiness(completion, task.deadline, task.weight);
        st.ready[m] = completion;
        st.pos[m] += 1;
    }

    fn enumerate(
        st: &BruteState,
        chains: &[Vec<ChainTask>],
        remaining: &mut [usize],
        best: &mut Option<(i64, Vec<Vec<Time>>)>,
    ) {
        if remaining.iter().all(|&r| r == 0) {
            let mut leaf = st.clone();
            for m in 0..chains.len() {
                flush_zeros(&mut leaf, chains, m);
            }
            if best.as_ref().is_none_or(|(obj, _)| leaf.obj < *obj) {
                *best = Some((leaf.obj, leaf.starts));
            }
            return;
        }
        for m in 0..chains.len() {
            if remaining[m] == 0 {
                continue;
            }
            let mut child = st.clone();
            advance(&mut child, chains, m);
            remaining[m] -= 1;
            enumerate(&child, chains, remaining, best);
            remaining[m] += 1;
        }
    }

    let st = BruteState {
        pos: vec![0; chains.len()],
        ready: vec![0; chains.len()],
        units: vec![0; inst.wr],
        obj: 0,
        starts: chains.iter().map(|c| vec![0; c.len()]).collect(),
    };
    let mut best = None;
    enumerate(&st, &chains, &mut remaining, &mut best);
    let (_, starts) = best.expect("enumeration visits at least one order");
    Ok(schedule_from_starts(inst, &chains, &starts, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::validate;

    /// Two machines, WR = 1: jobs 0 and 2 on machine 0, jobs 1 and 3 on
    /// machine 1. Both second setups are ready at t = 4 and contend for the
    /// single unit; serving job 3 first costs 5, the other order costs 10.
    fn contention_instance() -> (Instance, SequencePlan) {
        let n = 4;
        let s = vec![vec![vec![5, 5]; n]; n];
        let inst = Instance::new(
            n,
            2,
            vec![vec![4, 4], vec![4, 4], vec![3, 3], vec![3, 3]],
            s,
            0,
            vec![100, 100, 12, 12],
            vec![1, 1, 1, 2],
            1,
        )
        .unwrap();
        let plan = SequencePlan::new(vec![vec![0, 2], vec![1, 3]]);
        (inst, plan)
    }

    #[test]
    fn contended_pair_is_resolved_optimally() {
        let (inst, plan) = contention_instance();
        let exact = allocate_exact(&inst, &plan, &AllocLimits::default()).unwrap();
        assert_eq!(exact.objective, 5);
        assert!(exact.proven_optimal_allocation);
        // Job 3's setup won the unit at t = 4; job 2 follows at t = 9.
        assert_eq!(exact.jobs[3].setup_start, 4);
        assert_eq!(exact.jobs[3].completion, 12);
        assert_eq!(exact.jobs[2].setup_start, 9);
        assert_eq!(exact.jobs[2].completion, 17);
        assert!(validate(&inst, &exact).feasible);

        let brute = allocate_brute_force(&inst, &plan).unwrap();
        assert_eq!(brute.objective, 5);

        let greedy = allocate_greedy(&inst, &plan).unwrap();
        assert!(greedy.objective == 5 || greedy.objective == 10);
        assert!(exact.objective <= greedy.objective);
        assert!(validate(&inst, &greedy).feasible);
    }

    #[test]
    fn full_resources_match_sequential_evaluation() {
        let (inst, plan) = contention_instance();
        let relaxed = inst.with_wr(2).unwrap();
        let exact = allocate_exact(&relaxed, &plan, &AllocLimits::default()).unwrap();
        let seq = evaluate_sequential(&relaxed, &plan).unwrap();
        assert_eq!(exact.jobs, seq.jobs);
        assert_eq!(exact.objective, seq.objective);
        assert!(exact.proven_optimal_allocation);

        let greedy = allocate_greedy(&relaxed, &plan).unwrap();
        assert_eq!(greedy.jobs, seq.jobs);
    }

    #[test]
    fn single_machine_is_sequential_for_any_wr() {
        let inst = Instance::new(
            3,
            1,
            vec![vec![2], vec![3], vec![4]],
            vec![vec![vec![0], vec![2], vec![3]]; 3],
            1,
            vec![4, 4, 4],
            vec![2, 1, 1],
            1,
        )
        .unwrap();
        let plan = SequencePlan::new(vec![vec![2, 0, 1]]);
        let exact = allocate_exact(&inst, &plan, &AllocLimits::default()).unwrap();
        let seq = evaluate_sequential(&inst, &plan).unwrap();
        assert_eq!(exact.jobs, seq.jobs);
        assert!(exact.proven_optimal_allocation);
    }

    #[test]
    fn loose_deadlines_cost_nothing() {
        let (inst, plan) = contention_instance();
        let mut loose = inst.clone();
        loose.d = vec![1000; 4];
        let greedy = allocate_greedy(&loose, &plan).unwrap();
        assert_eq!(greedy.objective, 0);
    }

    #[test]
    fn exhausted_budget_returns_greedy_incumbent_unproven() {
        let (inst, plan) = contention_instance();
        let limits = AllocLimits { node_cap: 1, time_cap: Duration::from_secs(10) };
        let capped = allocate_exact(&inst, &plan, &limits).unwrap();
        assert!(!capped.proven_optimal_allocation);
        let greedy = allocate_greedy(&inst, &plan).unwrap();
        assert_eq!(capped.objective, greedy.objective);
        assert!(validate(&inst, &capped).feasible);
    }

    fn seeded_cases(count: usize) -> Vec<(Instance, SequencePlan)> {
        use crate::instgen::{generate, GenConfig, SetupMode, WrMode};
        use rand::seq::SliceRandom;
        use rand::{Rng, SeedableRng};
        let mut out = Vec::new();
        for seed in 0..count as u64 {
            let config = GenConfig {
                machines: 2 + (seed % 2) as usize,
                jobs_multiplier: 2,
                setup_mode: if seed % 2 == 0 { SetupMode::AlphaHigh } else { SetupMode::Uniform },
                tau: if seed % 3 == 0 { 0.8 } else { 0.5 },
                due_range: 0.8,
                wr_mode: WrMode::Half,
                seed,
            };
            let inst = generate(&config).unwrap();
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed ^ 0xACC0);
            let mut jobs: Vec<usize> = (0..inst.jobs).collect();
            jobs.shuffle(&mut rng);
            let mut seq = vec![Vec::new(); inst.machines];
            for j in jobs {
                let m = rng.random_range(0..inst.machines);
                seq[m].push(j);
            }
            out.push((inst, SequencePlan::new(seq)));
        }
        out
    }

    #[test]
    fn exact_matches_brute_force_and_dominates_greedy() {
        for (inst, plan) in seeded_cases(40) {
            let exact = allocate_exact(&inst, &plan, &AllocLimits::default()).unwrap();
            let brute = allocate_brute_force(&inst, &plan).unwrap();
            let greedy = allocate_greedy(&inst, &plan).unwrap();
            assert_eq!(exact.objective, brute.objective, "plan {:?}", plan);
            assert!(exact.objective <= greedy.objective);
            assert!(exact.proven_optimal_allocation);
            for sched in [&exact, &brute, &greedy] {
                let report = validate(&inst, sched);
                assert!(report.feasible, "{:?}", report.violations);
            }
        }
    }

    #[test]
    fn more_resources_never_hurt() {
        for (inst, plan) in seeded_cases(20) {
            let mut prev = None;
            for wr in 1..=inst.machines {
                let variant = inst.with_wr(wr).unwrap();
                let obj =
                    allocate_exact(&variant, &plan, &AllocLimits::default()).unwrap().objective;
                if let Some(p) = prev {
                    assert!(obj <= p, "objective grew from {p} to {obj} at WR {wr}");
                }
                prev = Some(obj);
            }
        }
    }

    #[test]
    fn sequential_lower_bounds_any_allocation() {
        for (inst, plan) in seeded_cases(20) {
            let seq = evaluate_sequential(&inst, &plan).unwrap();
            let exact = allocate_exact(&inst, &plan, &AllocLimits::default()).unwrap();
            assert!(seq.objective <= exact.objective);
        }
    }

    #[test]
    fn exactness_holds_at_the_brute_force_cap() {
        use crate::instgen::{generate, GenConfig, SetupMode, WrMode};
        // 12 jobs on 2 machines leave exactly 10 non-zero setups (s0 = 0).
        let config = GenConfig {
            machines: 2,
            jobs_multiplier: 6,
            setup_mode: SetupMode::AlphaHigh,
            tau: 0.8,
            due_range: 0.8,
            wr_mode: WrMode::Half,
            seed: 8,
        };
        let inst = generate(&config).unwrap();
        let plan = SequencePlan::new(vec![(0..6).collect(), (6..12).collect()]);
        let exact = allocate_exact(&inst, &plan, &AllocLimits::default()).unwrap();
        let brute = allocate_brute_force(&inst, &plan).unwrap();
        assert_eq!(exact.objective, brute.objective);
        assert!(exact.proven_optimal_allocation);
    }

    #[test]
    fn brute_force_cap_is_enforced() {
        use crate::instgen::{generate, GenConfig, SetupMode, WrMode};
        let config = GenConfig {
            machines: 2,
            jobs_multiplier: 7,
            setup_mode: SetupMode::Uniform,
            tau: 0.5,
            due_range: 0.8,
            wr_mode: WrMode::Half,
            seed: 3,
        };
        // s0 = 0 on generated instances, so 14 jobs leave 12 non-zero setups.
        let inst = generate(&config).unwrap();
        let plan = SequencePlan::new(vec![(0..7).collect(), (7..14).collect()]);
        assert!(matches!(allocate_brute_force(&inst, &plan), Err(Error::SizeCap(_))));
    }
}
