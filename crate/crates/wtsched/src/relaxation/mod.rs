//! Lower bounds through a relaxed MILP.
//!
//! The relaxation replaces every sequence-dependent setup `s_ijm` with the
//! per-(job, machine) minimum `s<=_jm` over all predecessors and drops the
//! resource limit, so any feasible schedule of the original problem remains
//! feasible here and the relaxed optimum is a valid dual (lower) bound.
//!
//! The model assigns jobs to machine *slots*: occupied slots form a
//! contiguous suffix per machine, the first occupied slot pays no setup, and
//! completion times chain along slots. Weighted tardiness is charged through
//! time-indexed binaries `W_ijmt` ("slot i of machine m, occupied by job j,
//! is t time units late"), which is what makes the dual bound competitive.
//!
//! The module builds that model in canonical row/column form, exports it as
//! neutral MPS text for any external MILP solver, imports solution files
//! back into plans, solves tiny instances exactly in process (the model's
//! feasible set collapses to assignment + order enumeration once resources
//! are dropped), and fixes a relaxed plan back into a true schedule
//! ([`mip_primal`]).

mod mps;

pub use mps::{export_model, parse_mps, MpsSummary};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{evaluate_sequential, Instance, SequencePlan, Time, TimedSchedule};
use crate::resalloc::{allocate_exact, AllocLimits};

/// Variable kinds of the relaxation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarKind {
    Binary,
    Continuous,
}

/// Dense variable index table. Block layout, in order: assignment `x_ijm`,
/// machine choice `y_jm`, first-slot markers `f_im`, tardiness indicators
/// `W_ijmt`, then the continuous slot variables `P, S, C, D, T` per
/// (slot, machine).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VarTable {
    pub jobs: usize,
    pub machines: usize,
    pub t_max: usize,
    off_y: usize,
    off_f: usize,
    off_w: usize,
    off_p: usize,
    off_s: usize,
    off_c: usize,
    off_d: usize,
    off_t: usize,
    total: usize,
}

impl VarTable {
    fn new(jobs: usize, machines: usize, t_max: usize) -> Self {
        let nm = jobs * machines;
        let off_y = jobs * nm;
        let off_f = off_y + nm;
        let off_w = off_f + nm;
        let off_p = off_w + jobs * nm * (t_max + 1);
        let off_s = off_p + nm;
        let off_c = off_s + nm;
        let off_d = off_c + nm;
        let off_t = off_d + nm;
        VarTable {
            jobs,
            machines,
            t_max,
            off_y,
            off_f,
            off_w,
            off_p,
            off_s,
            off_c,
            off_d,
            off_t,
            total: off_t + nm,
        }
    }

    pub fn len(&self) -> usize {
        self.total
    }

    pub fn is_empty(&self) -> bool {
        self.total == 0
    }

    pub fn x(&self, slot: usize, job: usize, machine: usize) -> usize {
        (slot * self.jobs + job) * self.machines + machine
    }

    pub fn y(&self, job: usize, machine: usize) -> usize {
        self.off_y + job * self.machines + machine
    }

    pub fn f(&self, slot: usize, machine: usize) -> usize {
        self.off_f + slot * self.machines + machine
    }

    pub fn w(&self, slot: usize, job: usize, machine: usize, t: usize) -> usize {
        self.off_w + ((slot * self.jobs + job) * self.machines + machine) * (self.t_max + 1) + t
    }

    pub fn p_slot(&self, slot: usize, machine: usize) -> usize {
        self.off_p + slot * self.machines + machine
    }

    pub fn s_slot(&self, slot: usize, machine: usize) -> usize {
        self.off_s + slot * self.machines + machine
    }

    pub fn c_slot(&self, slot: usize, machine: usize) -> usize {
        self.off_c + slot * self.machines + machine
    }

    pub fn d_slot(&self, slot: usize, machine: usize) -> usize {
        self.off_d + slot * self.machines + machine
    }

    pub fn t_slot(&self, slot: usize, machine: usize) -> usize {
        self.off_t + slot * self.machines + machine
    }

    pub fn kind(&self, idx: usize) -> VarKind {
        if idx < self.off_p {
            VarKind::Binary
        } else {
            VarKind::Continuous
        }
    }

    /// Canonical variable name, invertible by [`VarTable::parse_name`].
    pub fn name(&self, idx: usize) -> String {
        let m = self.machines;
        let n = self.jobs;
        if idx < self.off_y {
            let (rest, mm) = (idx / m, idx % m);
            format!("x_{}_{}_{}", rest / n, rest % n, mm)
        } else if idx < self.off_f {
            let k = idx - self.off_y;
            format!("y_{}_{}", k / m, k % m)
        } else if idx < self.off_w {
            let k = idx - self.off_f;
            format!("f_{}_{}", k / m, k % m)
        } else if idx < self.off_p {
            let k = idx - self.off_w;
            let (rest, t) = (k / (self.t_max + 1), k % (self.t_max + 1));
            let (rest, mm) = (rest / m, rest % m);
            format!("W_{}_{}_{}_{}", rest / n, rest % n, mm, t)
        } else {
            let (prefix, base) = if idx < self.off_s {
                ("P", self.off_p)
            } else if idx < self.off_c {
                ("S", self.off_s)
            } else if idx < self.off_d {
                ("C", self.off_c)
            } else if idx < self.off_t {
                ("D", self.off_d)
            } else {
                ("T", self.off_t)
            };
            let k = idx - base;
            format!("{}_{}_{}", prefix, k / m, k % m)
        }
    }

    /// Parses a canonical variable name back to its index.
    pub fn parse_name(&self, name: &str) -> Option<usize> {
        let mut parts = name.split('_');
        let head = parts.next()?;
        let nums: Vec<usize> = parts.map(|p| p.parse().ok()).collect::<Option<_>>()?;
        let slot_ok = |i: usize| i < self.jobs;
        let mach_ok = |mm: usize| mm < self.machines;
        match (head, nums.as_slice()) {
            ("x", &[i, j, m]) if slot_ok(i) && slot_ok(j) && mach_ok(m) => Some(self.x(i, j, m)),
            ("y", &[j, m]) if slot_ok(j) && mach_ok(m) => Some(self.y(j, m)),
            ("f", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.f(i, m)),
            ("W", &[i, j, m, t]) if slot_ok(i) && slot_ok(j) && mach_ok(m) && t <= self.t_max => {
                Some(self.w(i, j, m, t))
            }
            ("P", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.p_slot(i, m)),
            ("S", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.s_slot(i, m)),
            ("C", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.c_slot(i, m)),
            ("D", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.d_slot(i, m)),
            ("T", &[i, m]) if slot_ok(i) && mach_ok(m) => Some(self.t_slot(i, m)),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Eq,
    Le,
    Ge,
}

/// One constraint row in canonical `(coefficients, sense, rhs)` form.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub coefs: Vec<(usize, f64)>,
    pub sense: Sense,
    pub rhs: f64,
}

/// The relaxed MILP in canonical form.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedModel {
    pub jobs: usize,
    pub machines: usize,
    pub t_max: usize,
    /// `s<=_jm`: minimum setup of job `j` on machine `m` over predecessors.
    pub s_leq: Vec<Vec<Time>>,
    /// Big constant deactivating the first-slot setup row; the smallest
    /// sufficient value, `max s<=`.
    pub big_v: Time,
    pub vars: VarTable,
    /// Objective coefficients (minimize), sparse.
    pub objective: Vec<(usize, f64)>,
    pub rows: Vec<Row>,
}

/// Solver status of a lower-bound computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LbStatus {
    Optimal,
    BoundOnly,
    InfeasibleModel,
}

/// A valid dual bound for the full problem, with the relaxed plan when one
/// is available.
#[derive(Debug, Clone, PartialEq)]
pub struct LowerBoundResult {
    pub bound: i64,
    pub status: LbStatus,
    pub plan: Option<SequencePlan>,
}

/// Size caps for the in-process exact solver.
#[derive(Debug, Clone, Copy)]
pub struct TinyCaps {
    pub max_jobs: usize,
    pub max_machines: usize,
}

impl Default for TinyCaps {
    fn default() -> Self {
        TinyCaps { max_jobs: 8, max_machines: 3 }
    }
}

/// Per-(job, machine) minimum setup over predecessors. With a single job
/// there is no predecessor and the matrix is zero (the first-slot setup is
/// relaxed to zero anyway).
pub fn compute_s_leq(inst: &Instance) -> Vec<Vec<Time>> {
    (0..inst.jobs)
        .map(|j| {
            (0..inst.machines)
                .map(|m| {
                    (0..inst.jobs)
                        .filter(|&i| i != j)
                        .map(|i| inst.s[i][j][m])
                        .min()
                        .unwrap_or(0)
                })
                .collect()
        })
        .collect()
}

/// Tardiness horizon from a primal upper bound: in any solution with
/// objective at most `primal_ub`, job `j` is at most `primal_ub / w_j` late,
/// so `t_max = max_j floor(primal_ub / w_j)` truncates nothing.
pub fn compute_tmax(inst: &Instance, primal_ub: i64) -> Result<i64> {
    if primal_ub < 0 {
        return Err(Error::InvalidArgument(format!(
            "primal upper bound must be non-negative, got {primal_ub}"
        )));
    }
    Ok((0..inst.jobs).map(|j| primal_ub / inst.w[j]).max().unwrap_or(0))
}

/// Builds the relaxation in canonical form. Resources are dropped (treated
/// as unlimited); the first occupied slot of each machine pays no setup.
/// Beyond the slot-chaining equalities the base row
/// `C_0m >= P_0m + S_0m` is added per machine: true schedules satisfy it, so
/// the relaxation stays valid while the bound tightens.
#[allow(clippy::needless_range_loop)] // index loops mirror the row algebra
pub fn build_relaxation(inst: &Instance, t_max: i64) -> Result<RelaxedModel> {
    if t_max < 0 {
        return Err(Error::InvalidArgument("t_max must be non-negative".into()));
    }
    let n = inst.jobs;
    let m = inst.machines;
    let t_max = t_max as usize;
    let s_leq = compute_s_leq(inst);
    let big_v = s_leq.iter().flatten().copied().max().unwrap_or(0);
    let vars = VarTable::new(n, m, t_max);

    let mut objective = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for mm in 0..m {
                for t in 1..=t_max {
                    objective.push((vars.w(i, j, mm, t), (inst.w[j] * t as i64) as f64));
                }
            }
        }
    }

    let mut rows = Vec::new();
    let mut row = |name: String, coefs: Vec<(usize, f64)>, sense: Sense, rhs: f64| {
        rows.push(Row { name, coefs, sense, rhs });
    };

    // Each job on exactly one machine.
    for j in 0..n {
        let coefs = (0..m).map(|mm| (vars.y(j, mm), 1.0)).collect();
        row(format!("ASG_{j}"), coefs, Sense::Eq, 1.0);
    }
    // A job assigned to a machine occupies exactly one of its slots.
    for j in 0..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = (0..n).map(|i| (vars.x(i, j, mm), 1.0)).collect();
            coefs.push((vars.y(j, mm), -1.0));
            row(format!("LNK_{j}_{mm}"), coefs, Sense::Eq, 0.0);
        }
    }
    // At most one job per slot.
    for i in 0..n {
        for mm in 0..m {
            let coefs = (0..n).map(|j| (vars.x(i, j, mm), 1.0)).collect();
            row(format!("CAP_{i}_{mm}"), coefs, Sense::Le, 1.0);
        }
    }
    // Exactly one first occupied slot per machine.
    for mm in 0..m {
        let coefs = (0..n).map(|i| (vars.f(i, mm), 1.0)).collect();
        row(format!("FST_{mm}"), coefs, Sense::Eq, 1.0);
    }
    // Occupancy never decreases along slots (occupied slots form a suffix).
    for i in 1..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = (0..n).map(|j| (vars.x(i, j, mm), 1.0)).collect();
            coefs.extend((0..n).map(|j| (vars.x(i - 1, j, mm), -1.0)));
            row(format!("CTG_{i}_{mm}"), coefs, Sense::Ge, 0.0);
        }
    }
    // A slot following an occupied slot cannot be the first occupied one.
    for i in 1..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = (0..n).map(|j| (vars.x(i - 1, j, mm), 1.0)).collect();
            coefs.push((vars.f(i, mm), 1.0));
            row(format!("FEX_{i}_{mm}"), coefs, Sense::Le, 1.0);
        }
    }
    // Completion chain with its base case.
    for mm in 0..m {
        let coefs = vec![
            (vars.c_slot(0, mm), 1.0),
            (vars.p_slot(0, mm), -1.0),
            (vars.s_slot(0, mm), -1.0),
        ];
        row(format!("CHB_{mm}"), coefs, Sense::Ge, 0.0);
    }
    for i in 1..n {
        for mm in 0..m {
            let coefs = vec![
                (vars.c_slot(i, mm), 1.0),
                (vars.c_slot(i - 1, mm), -1.0),
                (vars.p_slot(i, mm), -1.0),
                (vars.s_slot(i, mm), -1.0),
            ];
            row(format!("CHN_{i}_{mm}"), coefs, Sense::Eq, 0.0);
        }
    }
    // Slot deadline, tardiness, processing and setup definitions.
    for i in 0..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = vec![(vars.d_slot(i, mm), 1.0)];
            coefs.extend((0..n).map(|j| (vars.x(i, j, mm), -(inst.d[j] as f64))));
            row(format!("DDL_{i}_{mm}"), coefs, Sense::Eq, 0.0);
        }
    }
    for i in 0..n {
        for mm in 0..m {
            let coefs = vec![
                (vars.t_slot(i, mm), 1.0),
                (vars.c_slot(i, mm), -1.0),
                (vars.d_slot(i, mm), 1.0),
            ];
            row(format!("TRD_{i}_{mm}"), coefs, Sense::Ge, 0.0);
        }
    }
    for i in 0..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = vec![(vars.p_slot(i, mm), 1.0)];
            coefs.extend((0..n).map(|j| (vars.x(i, j, mm), -(inst.p[j][mm] as f64))));
            row(format!("PRC_{i}_{mm}"), coefs, Sense::Eq, 0.0);
        }
    }
    for i in 0..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = vec![(vars.s_slot(i, mm), 1.0)];
            coefs.extend(
                (0..n)
                    .filter(|&j| s_leq[j][mm] != 0)
                    .map(|j| (vars.x(i, j, mm), -(s_leq[j][mm] as f64))),
            );
            if big_v != 0 {
                coefs.push((vars.f(i, mm), big_v as f64));
            }
            row(format!("STP_{i}_{mm}"), coefs, Sense::Ge, 0.0);
        }
    }
    // Every occupied (slot, job, machine) carries exactly one delay value...
    for i in 0..n {
        for j in 0..n {
            for mm in 0..m {
                let mut coefs: Vec<_> = (0..=t_max).map(|t| (vars.w(i, j, mm, t), 1.0)).collect();
                coefs.push((vars.x(i, j, mm), -1.0));
                row(format!("WLK_{i}_{j}_{mm}"), coefs, Sense::Eq, 0.0);
            }
        }
    }
    // ...and that value covers the slot tardiness.
    for i in 0..n {
        for mm in 0..m {
            let mut coefs: Vec<_> = Vec::new();
            for j in 0..n {
                for t in 1..=t_max {
                    coefs.push((vars.w(i, j, mm, t), t as f64));
                }
            }
            coefs.push((vars.t_slot(i, mm), -1.0));
            row(format!("WTD_{i}_{mm}"), coefs, Sense::Ge, 0.0);
        }
    }

    Ok(RelaxedModel { jobs: n, machines: m, t_max, s_leq, big_v, vars, objective, rows })
}

/// Imports an external solver's solution file. The format is line oriented:
/// `OBJ value` and `BOUND value` headers, optionally `STATUS optimal|
/// bound_only|infeasible`, then one `NAME VALUE` line per nonzero variable.
/// The plan is recovered from the `x` assignments (slot order ascending);
/// assignments violating the slot structure are rejected.
pub fn import_solution(model: &RelaxedModel, text: &str) -> Result<LowerBoundResult> {
    let mut obj: Option<f64> = None;
    let mut bound: Option<f64> = None;
    let mut status_override: Option<LbStatus> = None;
    let mut occupancy: Vec<Vec<Option<usize>>> = vec![vec![None; model.jobs]; model.machines];
    let mut assigned: Vec<bool> = vec![false; model.jobs];

    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') || line.starts_with('*') {
            continue;
        }
        let mut it = line.split_whitespace();
        let name = it.next().unwrap();
        let value = it
            .next()
            .ok_or_else(|| Error::Parse(format!("line {}: missing value", lineno + 1)))?;
        match name {
            "OBJ" => {
                obj = Some(parse_float(value, lineno)?);
            }
            "BOUND" => {
                bound = Some(parse_float(value, lineno)?);
            }
            "STATUS" => {
                status_override = Some(match value {
                    "optimal" => LbStatus::Optimal,
                    "bound_only" => LbStatus::BoundOnly,
                    "infeasible" => LbStatus::InfeasibleModel,
                    other => {
                        return Err(Error::Parse(format!(
                            "line {}: unknown status '{other}'",
                            lineno + 1
                        )))
                    }
                });
            }
            _ => {
                let idx = model.vars.parse_name(name).ok_or_else(|| {
                    Error::Parse(format!("line {}: unknown variable '{name}'", lineno + 1))
                })?;
                let value = parse_float(value, lineno)?;
                // Only assignment variables shape the plan.
                if idx < model.jobs * model.jobs * model.machines && value > 0.5 {
                    let mm = idx % model.machines;
                    let rest = idx / model.machines;
                    let (slot, job) = (rest / model.jobs, rest % model.jobs);
                    if occupancy[mm][slot].is_some() {
                        return Err(Error::MalformedSolution(format!(
                            "slot {slot} of machine {mm} is occupied twice"
                        )));
                    }
                    if assigned[job] {
                        return Err(Error::MalformedSolution(format!(
                            "job {job} is assigned more than once"
                        )));
                    }
                    occupancy[mm][slot] = Some(job);
                    assigned[job] = true;
                }
            }
        }
    }

    if let Some(LbStatus::InfeasibleModel) = status_override {
        return Ok(LowerBoundResult { bound: 0, status: LbStatus::InfeasibleModel, plan: None });
    }
    let bound = bound.ok_or_else(|| Error::Parse("missing BOUND header line".into()))?;
    // With integer data the relaxed optimum is integral, so any dual bound
    // rounds up; the epsilon absorbs solver-side float noise.
    let bound_int = (bound - 1e-6).ceil() as i64;

    let any_assignment = assigned.iter().any(|&b| b);
    let plan = if any_assignment {
        if let Some(job) = assigned.iter().position(|&b| !b) {
            return Err(Error::MalformedSolution(format!("job {job} is unassigned")));
        }
        // Occupied slots must form a contiguous suffix on each machine.
        for (mm, slots) in occupancy.iter().enumerate() {
            if let Some(first) = slots.iter().position(|s| s.is_some()) {
                if slots[first..].iter().any(|s| s.is_none()) {
                    return Err(Error::MalformedSolution(format!(
                        "machine {mm}: occupied slots do not form a contiguous suffix"
                    )));
                }
            }
        }
        Some(SequencePlan::new(
            occupancy.iter().map(|slots| slots.iter().filter_map(|s| *s).collect()).collect(),
        ))
    } else {
        None
    };

    let status = status_override.unwrap_or_else(|| match obj {
        Some(o) if (o - bound).abs() <= 1e-6 => LbStatus::Optimal,
        _ => LbStatus::BoundOnly,
    });
    Ok(LowerBoundResult { bound: bound_int, status, plan })
}

fn parse_float(text: &str, lineno: usize) -> Result<f64> {
    text.parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {}: bad number '{text}'", lineno + 1)))
}

/// Serializes a relaxed plan as a solution file accepted by
/// [`import_solution`]; jobs occupy the trailing slots of their machine.
pub fn solution_text(model: &RelaxedModel, plan: &SequencePlan, obj: i64, bound: i64) -> String {
    let mut out = String::new();
    out.push_str(&format!("OBJ {obj}\nBOUND {bound}\n"));
    for (mm, list) in plan.seq.iter().enumerate() {
        let first_slot = model.jobs - list.len();
        for (k, &j) in list.iter().enumerate() {
            let slot = first_slot + k;
            out.push_str(&format!("{} 1\n", model.vars.name(model.vars.x(slot, j, mm))));
            if k == 0 {
                out.push_str(&format!("{} 1\n", model.vars.name(model.vars.f(slot, mm))));
            }
        }
    }
    out
}

/// Solves the relaxation exactly by enumerating job-to-machine assignments
/// and per-machine orders (the model's feasible set once resources are
/// dropped): the first job of a machine pays no setup, later jobs pay
/// `s<=`. Depth-first search over plans in lexicographic order, pruned with
/// a per-job relaxed completion bound; ties break to the lexicographically
/// smallest assignment vector. The enumeration carries no tardiness
/// horizon, so it matches the model at any sufficient `t_max`; raising
/// `t_max` never changes this value.
pub fn solve_tiny_exact(inst: &Instance) -> Result<LowerBoundResult> {
    solve_tiny_exact_with_caps(inst, &TinyCaps::default())
}

pub fn solve_tiny_exact_with_caps(inst: &Instance, caps: &TinyCaps) -> Result<LowerBoundResult> {
    if inst.jobs > caps.max_jobs || inst.machines > caps.max_machines {
        return Err(Error::SizeCap(format!(
            "{} jobs x {} machines exceeds the exact-solver cap of {} x {}",
            inst.jobs, inst.machines, caps.max_jobs, caps.max_machines
        )));
    }
    let s_leq = compute_s_leq(inst);
    // minp_from[j][m0] = min processing time of j over machines >= m0.
    let mut minp_from = vec![vec![Time::MAX; inst.machines + 1]; inst.jobs];
    for (j, row) in minp_from.iter_mut().enumerate() {
        for m in (0..inst.machines).rev() {
            row[m] = row[m + 1].min(inst.p[j][m]);
        }
    }

    struct Dfs<'a> {
        inst: &'a Instance,
        s_leq: &'a [Vec<Time>],
        minp_from: &'a [Vec<Time>],
        plan: Vec<Vec<usize>>,
        used: Vec<bool>,
        unused: usize,
        load: Time,
        obj: i64,
        best: Option<(i64, Vec<usize>, Vec<Vec<usize>>)>,
    }

    impl Dfs<'_> {
        fn assignment_of(&self) -> Vec<usize> {
            let mut a = vec![0; self.inst.jobs];
            for (m, list) in self.plan.iter().enumerate() {
                for &j in list {
                    a[j] = m;
                }
            }
            a
        }

        fn remaining_bound(&self, mc: usize) -> i64 {
            let mut acc = 0;
            for j in 0..self.inst.jobs {
                if self.used[j] {
                    continue;
                }
                let on_current = self.load
                    + if self.plan[mc].is_empty() { 0 } else { self.s_leq[j][mc] }
                    + self.inst.p[j][mc];
                let completion = on_current.min(self.minp_from[j][mc + 1]);
                acc +=
                    crate::model::weighted_tardiness(completion, self.inst.d[j], self.inst.w[j]);
            }
            acc
        }

        fn dfs(&mut self, mc: usize) {
            if self.unused == 0 {
                let candidate = (self.obj, self.assignment_of(), self.plan.clone());
                let better = match &self.best {
                    None => true,
                    Some(b) => (candidate.0, &candidate.1, &candidate.2) < (b.0, &b.1, &b.2),
                };
                if better {
                    self.best = Some(candidate);
                }
                return;
            }
            if let Some((best_obj, _, _)) = &self.best {
                // Strictly-greater pruning keeps every tie reachable for the
                // assignment-vector tie-break.
                if self.obj + self.remaining_bound(mc) > *best_obj {
                    return;
                }
            }
            if mc + 1 < self.inst.machines {
                let saved = self.load;
                self.load = 0;
                self.dfs(mc + 1);
                self.load = saved;
            }
            for j in 0..self.inst.jobs {
                if self.used[j] {
                    continue;
                }
                let setup = if self.plan[mc].is_empty() { 0 } else { self.s_leq[j][mc] };
                let completion = self.load + setup + self.inst.p[j][mc];
                let delta =
                    crate::model::weighted_tardiness(completion, self.inst.d[j], self.inst.w[j]);
                let saved = self.load;
                self.plan[mc].push(j);
                self.used[j] = true;
                self.unused -= 1;
                self.load = completion;
                self.obj += delta;
                self.dfs(mc);
                self.obj -= delta;
                self.load = saved;
                self.unused += 1;
                self.used[j] = false;
                self.plan[mc].pop();
            }
        }
    }

    let mut dfs = Dfs {
        inst,
        s_leq: &s_leq,
        minp_from: &minp_from,
        plan: vec![Vec::new(); inst.machines],
        used: vec![false; inst.jobs],
        unused: inst.jobs,
        load: 0,
        obj: 0,
        best: Some(greedy_relaxed_seed(inst, &s_leq)),
    };
    dfs.dfs(0);
    let (bound, _, plan) = dfs.best.expect("at least one plan exists");
    Ok(LowerBoundResult { bound, status: LbStatus::Optimal, plan: Some(SequencePlan::new(plan)) })
}

/// Earliest-deadline list construction under relaxed timing; only used to
/// seed the exact search with an incumbent. The seed is itself a member of
/// the search space, so the argmin and its tie-breaks are unaffected.
fn greedy_relaxed_seed(
    inst: &Instance,
    s_leq: &[Vec<Time>],
) -> (i64, Vec<usize>, Vec<Vec<usize>>) {
    let mut order: Vec<usize> = (0..inst.jobs).collect();
    order.sort_by_key(|&j| (inst.d[j], j));
    let mut loads: Vec<Time> = vec![0; inst.machines];
    let mut plan: Vec<Vec<usize>> = vec![Vec::new(); inst.machines];
    let mut obj = 0;
    for j in order {
        let mut best: Option<(Time, usize)> = None;
        for m in 0..inst.machines {
            let setup = if plan[m].is_empty() { 0 } else { s_leq[j][m] };
            let completion = loads[m] + setup + inst.p[j][m];
            if best.is_none_or(|(c, _)| completion < c) {
                best = Some((completion, m));
            }
        }
        let (completion, m) = best.unwrap();
        loads[m] = completion;
        plan[m].push(j);
        obj += crate::model::weighted_tardiness(completion, inst.d[j], inst.w[j]);
    }
    let mut assignment = vec![0; inst.jobs];
    for (m, list) in plan.iter().enumerate() {
        for &j in list {
            assignment[j] = m;
        }
    }
    (obj, assignment, plan)
}

/// Fixes a relaxed plan back into the true problem: restore the actual
/// sequence-dependent setups and, when resources bind, allocate them
/// optimally. This is the primal repair applied to plans produced by the
/// relaxation.
pub fn mip_primal(
    inst: &Instance,
    plan: &SequencePlan,
    limits: &AllocLimits,
) -> Result<TimedSchedule> {
    if inst.wr == inst.machines {
        evaluate_sequential(inst, plan)
    } else {
        allocate_exact(inst, plan, limits)
    }
}
