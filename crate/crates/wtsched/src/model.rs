//! Domain model: problem instances, per-machine sequences, timed schedules
//! and the feasibility checker every other module relies on.
//!
//! Times are non-negative integers. A job occupies its machine for the whole
//! `[setup_start, completion)` window: the setup runs `[setup_start, setup_end)`
//! and processing follows immediately, so `completion = setup_end + p`.
//! Only setups draw from the shared pool of `WR` renewable resource units;
//! zero-length setups occupy no time instant and never consume a unit.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Time = i64;
pub type JobId = usize;
pub type MachineId = usize;

/// Echo of the generator configuration that produced an instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenEcho {
    pub machines: usize,
    pub jobs_multiplier: u32,
    pub setup_mode: String,
    pub tau: f64,
    pub due_range: f64,
    pub wr_mode: String,
    pub seed: u64,
    /// Rounding rule applied to all real draws.
    pub rounding: String,
}

/// Optional self-describing metadata carried inside instance files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct InstanceMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GenEcho>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub annotations: Vec<String>,
}

/// A scheduling instance: unrelated machines, sequence- and machine-dependent
/// setup times, per-job weights and deadlines, and `WR` renewable setup
/// resources. Jobs and machines are identified by the indices `0..jobs` and
/// `0..machines`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub jobs: usize,
    pub machines: usize,
    /// Processing times, `p[job][machine]`.
    pub p: Vec<Vec<Time>>,
    /// Setup times, `s[pred][job][machine]`, defined for `pred != job`.
    /// Diagonal entries are stored as zero and never read.
    pub s: Vec<Vec<Vec<Time>>>,
    /// Setup time of the first job on any machine.
    pub s0: Time,
    /// Deadlines per job.
    pub d: Vec<Time>,
    /// Positive integer weights per job.
    pub w: Vec<i64>,
    /// Number of renewable setup resources, `1 <= WR <= machines`.
    #[serde(rename = "WR")]
    pub wr: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub meta: Option<InstanceMeta>,
}

impl Instance {
    /// Builds an instance and checks all domain invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        jobs: usize,
        machines: usize,
        p: Vec<Vec<Time>>,
        s: Vec<Vec<Vec<Time>>>,
        s0: Time,
        d: Vec<Time>,
        w: Vec<i64>,
        wr: usize,
    ) -> Result<Self> {
        let inst = Instance { jobs, machines, p, s, s0, d, w, wr, meta: None };
        inst.check()?;
        Ok(inst)
    }

    /// Checks shape and value invariants, returning the first violation found.
    pub fn check(&self) -> Result<()> {
        let fail = |msg: String| Err(Error::InvalidInstance(msg));
        if self.jobs == 0 {
            return fail("instance has no jobs".into());
        }
        if self.machines == 0 {
            return fail("instance has no machines".into());
        }
        if self.wr < 1 || self.wr > self.machines {
            return fail(format!("WR = {} outside 1..={}", self.wr, self.machines));
        }
        if self.s0 < 0 {
            return fail(format!("s0 = {} is negative", self.s0));
        }
        if self.p.len() != self.jobs || self.p.iter().any(|row| row.len() != self.machines) {
            return fail("p must be a jobs x machines matrix".into());
        }
        if self.s.len() != self.jobs
            || self
                .s
                .iter()
                .any(|a| a.len() != self.jobs || a.iter().any(|row| row.len() != self.machines))
        {
            return fail("s must be a jobs x jobs x machines tensor".into());
        }
        if self.d.len() != self.jobs || self.w.len() != self.jobs {
            return fail("d and w must have one entry per job".into());
        }
        if let Some(v) = self.p.iter().flatten().find(|&&v| v < 0) {
            return fail(format!("negative processing time {v}"));
        }
        for (i, a) in self.s.iter().enumerate() {
            for (j, row) in a.iter().enumerate() {
                if i == j {
                    continue;
                }
                if let Some(v) = row.iter().find(|&&v| v < 0) {
                    return fail(format!("negative setup time {v} at ({i},{j})"));
                }
            }
        }
        if let Some(v) = self.d.iter().find(|&&v| v < 0) {
            return fail(format!("negative deadline {v}"));
        }
        if let Some(v) = self.w.iter().find(|&&v| v < 1) {
            return fail(format!("non-positive weight {v}"));
        }
        Ok(())
    }

    /// Setup duration of `job` on `machine` when it follows `pred`
    /// (`None` means the job opens the machine and pays `s0`).
    pub fn setup_after(&self, pred: Option<JobId>, job: JobId, machine: MachineId) -> Time {
        match pred {
            None => self.s0,
            Some(i) => self.s[i][job][machine],
        }
    }

    /// Copy of the instance with a different resource count.
    pub fn with_wr(&self, wr: usize) -> Result<Self> {
        let mut inst = self.clone();
        inst.wr = wr;
        inst.check()?;
        Ok(inst)
    }
}

/// Ordered job sequences, one per machine. Together the sequences partition
/// the instance's job set.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct SequencePlan {
    pub seq: Vec<Vec<JobId>>,
}

impl SequencePlan {
    pub fn new(seq: Vec<Vec<JobId>>) -> Self {
        SequencePlan { seq }
    }

    /// Verifies the plan is a partition of the instance's jobs.
    pub fn check(&self, inst: &Instance) -> Result<()> {
        if self.seq.len() != inst.machines {
            return Err(Error::InvalidPlan(format!(
                "plan has {} machine lists, instance has {} machines",
                self.seq.len(),
                inst.machines
            )));
        }
        let mut seen = vec![false; inst.jobs];
        for list in &self.seq {
            for &j in list {
                if j >= inst.jobs {
                    return Err(Error::InvalidPlan(format!("unknown job id {j}")));
                }
                if seen[j] {
                    return Err(Error::InvalidPlan(format!("job {j} appears twice")));
                }
                seen[j] = true;
            }
        }
        if let Some(j) = seen.iter().position(|&b| !b) {
            return Err(Error::InvalidPlan(format!("job {j} missing from plan")));
        }
        Ok(())
    }

    /// Number of machines with at least one job.
    pub fn nonempty_machines(&self) -> usize {
        self.seq.iter().filter(|l| !l.is_empty()).count()
    }
}

/// Timing of one job inside a schedule.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct JobTiming {
    pub machine: MachineId,
    pub setup_start: Time,
    pub setup_end: Time,
    pub completion: Time,
}

/// A fully timed schedule: per-job setup intervals and completions, the
/// total weighted tardiness, and whether the resource allocation is proven
/// optimal for its sequences.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TimedSchedule {
    /// Indexed by job id.
    pub jobs: Vec<JobTiming>,
    pub objective: i64,
    pub proven_optimal_allocation: bool,
}

/// Kinds of constraint violations reported by [`validate`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ViolationKind {
    /// Schedule does not reference the instance's jobs/machines correctly.
    Shape,
    NegativeTime,
    SetupDuration,
    CompletionLink,
    Precedence,
    ResourceCapacity,
    ObjectiveMismatch,
}

impl std::fmt::Display for ViolationKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ViolationKind::Shape => "shape",
            ViolationKind::NegativeTime => "negative-time",
            ViolationKind::SetupDuration => "setup-duration",
            ViolationKind::CompletionLink => "completion-link",
            ViolationKind::Precedence => "precedence",
            ViolationKind::ResourceCapacity => "resource-capacity",
            ViolationKind::ObjectiveMismatch => "objective-mismatch",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub kind: ViolationKind,
    pub detail: String,
}

/// Outcome of checking a schedule against the defining constraints.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub feasible: bool,
    pub violations: Vec<Violation>,
}

/// Weighted tardiness of a single job: `weight * max(0, completion - deadline)`.
pub fn weighted_tardiness(completion: Time, deadline: Time, weight: i64) -> i64 {
    weight * 0.max(completion - deadline)
}

/// Per-job timings when every machine runs its sequence back to back:
/// the first setup starts at 0 with duration `s0`, each later setup starts
/// exactly at the predecessor's completion. Ignores the resource limit, so
/// for each job this is the earliest completion any feasible allocation of
/// the same plan can reach.
pub(crate) fn sequential_timings(inst: &Instance, plan: &SequencePlan) -> Vec<JobTiming> {
    let mut timings = vec![
        JobTiming { machine: 0, setup_start: 0, setup_end: 0, completion: 0 };
        inst.jobs
    ];
    for (m, list) in plan.seq.iter().enumerate() {
        let mut clock: Time = 0;
        let mut prev: Option<JobId> = None;
        for &j in list {
            let dur = inst.setup_after(prev, j, m);
            let setup_start = clock;
            let setup_end = setup_start + dur;
            let completion = setup_end + inst.p[j][m];
            timings[j] = JobTiming { machine: m, setup_start, setup_end, completion };
            clock = completion;
            prev = Some(j);
        }
    }
    timings
}

pub(crate) fn total_weighted_tardiness(inst: &Instance, timings: &[JobTiming]) -> i64 {
    timings
        .iter()
        .enumerate()
        .map(|(j, t)| weighted_tardiness(t.completion, inst.d[j], inst.w[j]))
        .sum()
}

/// Evaluates a plan without resource contention (the `WR = |M|` timing used
/// by the dispatching and decoding heuristics). The allocation is proven
/// optimal exactly when `WR = |M|`; otherwise the objective is only a lower
/// bound on what a resource-feasible allocation of the same plan can achieve.
pub fn evaluate_sequential(inst: &Instance, plan: &SequencePlan) -> Result<TimedSchedule> {
    plan.check(inst)?;
    let timings = sequential_timings(inst, plan);
    let objective = total_weighted_tardiness(inst, &timings);
    Ok(TimedSchedule {
        jobs: timings,
        objective,
        proven_optimal_allocation: inst.wr == inst.machines,
    })
}

/// Recovers the per-machine job sequences of a schedule, ordering each
/// machine's jobs by setup start (then setup end, completion and id, which
/// only matters for zero-length intervals).
pub fn extract_plan(inst: &Instance, sched: &TimedSchedule) -> Result<SequencePlan> {
    if sched.jobs.len() != inst.jobs {
        return Err(Error::InvalidSchedule(format!(
            "schedule has {} job records, instance has {} jobs",
            sched.jobs.len(),
            inst.jobs
        )));
    }
    let mut per_machine: Vec<Vec<JobId>> = vec![Vec::new(); inst.machines];
    for (j, t) in sched.jobs.iter().enumerate() {
        if t.machine >= inst.machines {
            return Err(Error::InvalidSchedule(format!("unknown machine {}", t.machine)));
        }
        per_machine[t.machine].push(j);
    }
    for list in &mut per_machine {
        list.sort_by_key(|&j| {
            let t = &sched.jobs[j];
            (t.setup_start, t.setup_end, t.completion, j)
        });
    }
    let plan = SequencePlan::new(per_machine);
    plan.check(inst)?;
    Ok(plan)
}

/// Checks a schedule against the defining constraints: machine assignment
/// and per-machine chaining, setup durations, precedence, the `WR` capacity
/// on simultaneous setups, and the stored objective. Violations are
/// collected, never thrown.
pub fn validate(inst: &Instance, sched: &TimedSchedule) -> ValidationReport {
    let mut violations = Vec::new();
    let mut push = |kind: ViolationKind, detail: String| violations.push(Violation { kind, detail });

    if sched.jobs.len() != inst.jobs {
        push(
            ViolationKind::Shape,
            format!("{} job records for {} jobs", sched.jobs.len(), inst.jobs),
        );
        return ValidationReport { feasible: false, violations };
    }

    let mut per_machine: Vec<Vec<JobId>> = vec![Vec::new(); inst.machines];
    for (j, t) in sched.jobs.iter().enumerate() {
        if t.machine >= inst.machines {
            push(ViolationKind::Shape, format!("job {j} on unknown machine {}", t.machine));
            return ValidationReport { feasible: false, violations };
        }
        if t.setup_start < 0 {
            push(ViolationKind::NegativeTime, format!("job {j} setup starts at {}", t.setup_start));
        }
        if t.setup_end < t.setup_start {
            push(
                ViolationKind::NegativeTime,
                format!("job {j} setup ends at {} before start {}", t.setup_end, t.setup_start),
            );
        }
        if t.completion != t.setup_end + inst.p[j][t.machine] {
            push(
                ViolationKind::CompletionLink,
                format!(
                    "job {j}: completion {} != setup end {} + p {}",
                    t.completion,
                    t.setup_end,
                    inst.p[j][t.machine]
                ),
            );
        }
        per_machine[t.machine].push(j);
    }

    // Per-machine chain: the sequence is recovered by setup start; the first
    // job pays s0 and every later setup starts no earlier than the
    // predecessor's completion.
    for (m, list) in per_machine.iter_mut().enumerate() {
        list.sort_by_key(|&j| {
            let t = &sched.jobs[j];
            (t.setup_start, t.setup_end, t.completion, j)
        });
        let mut prev: Option<JobId> = None;
        for &j in list.iter() {
            let t = &sched.jobs[j];
            let expected = inst.setup_after(prev, j, m);
            if t.setup_end - t.setup_start != expected {
                push(
                    ViolationKind::SetupDuration,
                    format!(
                        "job {j} on machine {m}: setup length {} != {expected}",
                        t.setup_end - t.setup_start
                    ),
                );
            }
            if let Some(i) = prev {
                if t.setup_start < sched.jobs[i].completion {
                    push(
                        ViolationKind::Precedence,
                        format!(
                            "job {j} setup starts at {} before job {i} completes at {}",
                            t.setup_start, sched.jobs[i].completion
                        ),
                    );
                }
            }
            prev = Some(j);
        }
    }

    // Resource capacity: sweep start/end events of non-empty setup intervals.
    // Intervals are half-open, so an end and a start at the same instant do
    // not overlap.
    let mut events: Vec<(Time, i32)> = Vec::new();
    for t in &sched.jobs {
        if t.setup_end > t.setup_start {
            events.push((t.setup_start, 1));
            events.push((t.setup_end, -1));
        }
    }
    events.sort_by_key(|&(t, delta)| (t, delta));
    let mut active = 0;
    for (time, delta) in events {
        active += delta;
        if active > inst.wr as i32 {
            push(
                ViolationKind::ResourceCapacity,
                format!("{} setups active at time {time}, WR = {}", active, inst.wr),
            );
            break;
        }
    }

    let recomputed = total_weighted_tardiness(inst, &sched.jobs);
    if recomputed != sched.objective {
        push(
            ViolationKind::ObjectiveMismatch,
            format!("stored objective {} != recomputed {recomputed}", sched.objective),
        );
    }

    ValidationReport { feasible: violations.is_empty(), violations }
}
