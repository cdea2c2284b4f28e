//! Brute-force exact solver for the full problem at tiny scale.
//!
//! Every job-to-machine assignment and every per-machine order is
//! enumerated; each plan is priced by the exhaustive resource-allocation
//! enumeration. No pruning anywhere: this module's only virtue is obvious
//! correctness, and it is the ground truth the bounds and heuristics are
//! checked against.

use crate::error::{Error, Result};
use crate::model::{evaluate_sequential, Instance, SequencePlan, TimedSchedule};
use crate::par;
use crate::resalloc::allocate_brute_force;

/// Size caps keeping the enumeration around a second per instance.
#[derive(Debug, Clone, Copy)]
pub struct OracleCaps {
    pub max_jobs: usize,
    pub max_machines: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps { max_jobs: 6, max_machines: 3 }
    }
}

/// Exact optimum with default caps.
pub fn solve_exact_tiny(inst: &Instance) -> Result<TimedSchedule> {
    solve_exact_tiny_with_caps(inst, &OracleCaps::default())
}

pub fn solve_exact_tiny_with_caps(inst: &Instance, caps: &OracleCaps) -> Result<TimedSchedule> {
    if inst.jobs > caps.max_jobs || inst.machines > caps.max_machines {
        return Err(Error::SizeCap(format!(
            "{} jobs x {} machines exceeds the oracle cap of {} x {}",
            inst.jobs, inst.machines, caps.max_jobs, caps.max_machines
        )));
    }

    // Assignment vectors are indexed 0..machines^jobs, low job varies last,
    // so ascending index order is lexicographic in the vector.
    let combos = (inst.machines as u64).pow(inst.jobs as u32) as usize;
    let per_assignment: Vec<Option<(i64, SequencePlan)>> = par::map_range(combos, |idx| {
        let mut assignment = vec![0usize; inst.jobs];
        let mut rest = idx;
        for j in (0..inst.jobs).rev() {
            assignment[j] = rest % inst.machines;
            rest /= inst.machines;
        }
        best_over_orders(inst, &assignment)
    });

    let mut best: Option<(i64, SequencePlan)> = None;
    for candidate in per_assignment.into_iter().flatten() {
        let better = match &best {
            None => true,
            Some((obj, plan)) => (candidate.0, &candidate.1) < (*obj, plan),
        };
        if better {
            best = Some(candidate);
        }
    }
    let (_, plan) = best.expect("at least one plan exists");
    price_plan(inst, &plan)
}

/// Minimum objective over all orderings of a fixed assignment, with the
/// lexicographically smallest optimal plan.
fn best_over_orders(inst: &Instance, assignment: &[usize]) -> Option<(i64, SequencePlan)> {
    let mut groups: Vec<Vec<usize>> = vec![Vec::new(); inst.machines];
    for (j, &m) in assignment.iter().enumerate() {
        groups[m].push(j); // ascending ids: the first permutation is lex-min
    }
    let mut best: Option<(i64, SequencePlan)> = None;
    let mut seq: Vec<Vec<usize>> = vec![Vec::new(); inst.machines];
    permute_machines(inst, &mut groups, 0, &mut seq, &mut best);
    best
}

/// Recursively extends `seq` with every permutation of each machine's group,
/// in lexicographic order, pricing complete plans.
fn permute_machines(
    inst: &Instance,
    groups: &mut [Vec<usize>],
    machine: usize,
    seq: &mut Vec<Vec<usize>>,
    best: &mut Option<(i64, SequencePlan)>,
) {
    if machine == groups.len() {
        let plan = SequencePlan::new(seq.clone());
        let Ok(priced) = price_plan(inst, &plan) else { return };
        let better = match best {
            None => true,
            Some((obj, bplan)) => (priced.objective, &plan) < (*obj, bplan),
        };
        if better {
            *best = Some((priced.objective, plan));
        }
        return;
    }
    let items = groups[machine].clone();
    let mut order: Vec<usize> = Vec::with_capacity(items.len());
    let mut used = vec![false; items.len()];
    permute_one(inst, groups, machine, &items, &mut used, &mut order, seq, best);
}

#[allow(clippy::too_many_arguments)]
fn permute_one(
    inst: &Instance,
    groups: &mut [Vec<usize>],
    machine: usize,
    items: &[usize],
    used: &mut [bool],
    order: &mut Vec<usize>,
    seq: &mut Vec<Vec<usize>>,
    best: &mut Option<(i64, SequencePlan)>,
) {
    if order.len() == items.len() {
        seq[machine] = order.clone();
        permute_machines(inst, groups, machine + 1, seq, best);
        seq[machine].clear();
        return;
    }
    for k in 0..items.len() {
        if used[k] {
            continue;
        }
        used[k] = true;
        order.push(items[k]);
        permute_one(inst, groups, machine, items, used, order, seq, best);
        order.pop();
        used[k] = false;
    }
}

fn price_plan(inst: &Instance, plan: &SequencePlan) -> Result<TimedSchedule> {
    if inst.wr >= plan.nonempty_machines() {
        let mut sched = evaluate_sequential(inst, plan)?;
        sched.proven_optimal_allocation = true;
        Ok(sched)
    } else {
        allocate_brute_force(inst, plan)
    }
}
