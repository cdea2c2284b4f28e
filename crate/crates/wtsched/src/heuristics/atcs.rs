//! Apparent-Tardiness-Cost-with-Setups dispatching.
//!
//! Jobs are scheduled one at a time: pick the least-loaded machine, score
//! every unscheduled job against it with a three-factor priority (weight per
//! processing unit, exponential slack decay scaled by `k1 * p_bar`,
//! exponential setup decay scaled by `k2 * s_bar`), then place the winner on
//! the machine where it completes earliest. The rule is deterministic: ties
//! break to the smallest job and machine ids and no randomness is involved.

use crate::error::Result;
use crate::instgen::stats;
use crate::model::{Instance, JobId, MachineId, SequencePlan, Time, TimedSchedule};
use crate::relaxation::mip_primal;
use crate::resalloc::AllocLimits;

/// Smallest scaling value; keeps the exponents finite when the due-date
/// factors degenerate (real data can have tau far below zero).
const K_FLOOR: f64 = 0.05;

/// Scaling constants of the priority index.
#[derive(Debug, Clone, PartialEq)]
pub struct AtcsScaling {
    /// Jobs per machine.
    pub mu: f64,
    /// Mean setup over mean processing time.
    pub eta: f64,
    pub a2: f64,
    pub k1: f64,
    pub k2: f64,
    pub p_bar: f64,
    pub s_bar: f64,
}

/// `k1`, `k2` and `A2` from the aggregate factors: `k1 = 1.2 ln(mu) - R`,
/// lowered by 0.5 when `tau < 0.5` and again when `eta < 0.5, mu > 5`;
/// `k2 = tau / (A2 sqrt(eta))` with `A2 = 1.8` below `tau = 0.8`, else 2.0.
/// Both are floored at 0.05.
pub(crate) fn k_values(mu: f64, eta: f64, tau: f64, due_range: f64) -> (f64, f64, f64) {
    let a2 = if tau < 0.8 { 1.8 } else { 2.0 };
    let mut k1 = 1.2 * mu.ln() - due_range;
    if tau < 0.5 {
        k1 -= 0.5;
    }
    if eta < 0.5 && mu > 5.0 {
        k1 -= 0.5;
    }
    k1 = k1.max(K_FLOOR);
    let mut k2 = tau / (a2 * eta.sqrt());
    if tau <= 0.0 {
        k2 = K_FLOOR;
    }
    (k1, k2, a2)
}

/// Computes the scaling constants from instance aggregates. `p_bar` averages
/// all processing times; `s_bar` averages all sequence-dependent setups
/// (excluding the first-job setup `s0`).
pub fn atcs_scaling(inst: &Instance, tau: f64, due_range: f64) -> AtcsScaling {
    let n = inst.jobs;
    let m = inst.machines;
    let p_bar = inst.p.iter().flatten().sum::<Time>() as f64 / (n * m) as f64;
    let setup_count = n * n.saturating_sub(1) * m;
    let s_bar = if setup_count == 0 {
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
    let mu = n as f64 / m as f64;
    let eta = if p_bar > 0.0 { s_bar / p_bar } else { 0.0 };
    let (k1, k2, a2) = k_values(mu, eta, tau, due_range);
    AtcsScaling { mu, eta, a2, k1, k2, p_bar, s_bar }
}

/// Priority of scheduling `job` next on `machine` after `last`:
/// `w/p * exp(-max(d - p, 0) / (k1 p_bar)) * exp(-s / (k2 s_bar))`.
/// An empty machine pays the first-job setup `s0`; a zero setup contributes
/// a factor of one.
pub fn atcs_priority(
    inst: &Instance,
    scaling: &AtcsScaling,
    job: JobId,
    machine: MachineId,
    last: Option<JobId>,
) -> f64 {
    let p = inst.p[job][machine];
    let urgency = inst.w[job] as f64 / p as f64;
    let slack = (inst.d[job] - p).max(0);
    let slack_factor = (-(slack as f64) / (scaling.k1 * scaling.p_bar)).exp();
    let s = inst.setup_after(last, job, machine);
    let setup_factor = if s == 0 {
        1.0
    } else {
        (-(s as f64) / (scaling.k2 * scaling.s_bar)).exp()
    };
    urgency * slack_factor * setup_factor
}

/// Due-date factors fed to the scaling: the generator's nominal values when
/// the instance carries them, otherwise the observed statistics.
fn due_factors(inst: &Instance) -> Result<(f64, f64)> {
    if let Some(gen) = inst.meta.as_ref().and_then(|m| m.generator.as_ref()) {
        return Ok((gen.tau, gen.due_range));
    }
    let st = stats(inst)?;
    Ok((st.tau_real, st.range_real))
}

/// Runs the dispatching loop and returns the per-machine sequences, without
/// allocating resources.
pub fn atcs_sequence(inst: &Instance) -> Result<SequencePlan> {
    let (tau, due_range) = due_factors(inst)?;
    let scaling = atcs_scaling(inst, tau, due_range);
    let mut loads: Vec<Time> = vec![0; inst.machines];
    let mut last: Vec<Option<JobId>> = vec![None; inst.machines];
    let mut seq: Vec<Vec<JobId>> = vec![Vec::new(); inst.machines];
    let mut unscheduled: Vec<bool> = vec![true; inst.jobs];

    for _ in 0..inst.jobs {
        let mut m_star = 0;
        for m in 1..inst.machines {
            if loads[m] < loads[m_star] {
                m_star = m;
            }
        }
        let mut j_star: Option<(f64, JobId)> = None;
        for (j, &open) in unscheduled.iter().enumerate() {
            if !open {
                continue;
            }
            let pr = atcs_priority(inst, &scaling, j, m_star, last[m_star]);
            if j_star.is_none_or(|(best, _)| pr > best) {
                j_star = Some((pr, j));
            }
        }
        let (_, j) = j_star.expect("unscheduled job exists");
        let mut target: Option<(Time, MachineId)> = None;
        for m in 0..inst.machines {
            let completion = loads[m] + inst.setup_after(last[m], j, m) + inst.p[j][m];
            if target.is_none_or(|(best, _)| completion < best) {
                target = Some((completion, m));
            }
        }
        let (completion, m) = target.unwrap();
        loads[m] = completion;
        last[m] = Some(j);
        seq[m].push(j);
        unscheduled[j] = false;
    }
    Ok(SequencePlan::new(seq))
}

/// Full ATCS: dispatch every job, then allocate setup resources exactly.
pub fn atcs_run(inst: &Instance, limits: &AllocLimits) -> Result<TimedSchedule> {
    let plan = atcs_sequence(inst)?;
    mip_primal(inst, &plan, limits)
}
