//! Line-oriented JSON file formats for instances, plans and schedules.
//!
//! All writers emit pretty-printed JSON with a fixed field order, so equal
//! values serialize to identical bytes; a golden example pair lives under
//! `docs/formats/` at the repository root.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{Instance, JobTiming, SequencePlan, TimedSchedule};

/// Per-job record inside a schedule file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleRecord {
    pub job: usize,
    pub machine: usize,
    pub setup_start: i64,
    pub setup_end: i64,
    pub completion: i64,
}

/// On-disk shape of a [`TimedSchedule`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScheduleFile {
    pub jobs: Vec<ScheduleRecord>,
    pub objective: i64,
    pub proven_optimal_allocation: bool,
}

impl ScheduleFile {
    pub fn from_schedule(sched: &TimedSchedule) -> Self {
        ScheduleFile {
            jobs: sched
                .jobs
                .iter()
                .enumerate()
                .map(|(job, t)| ScheduleRecord {
                    job,
                    machine: t.machine,
                    setup_start: t.setup_start,
                    setup_end: t.setup_end,
                    completion: t.completion,
                })
                .collect(),
            objective: sched.objective,
            proven_optimal_allocation: sched.proven_optimal_allocation,
        }
    }

    pub fn into_schedule(self, n_jobs: usize) -> Result<TimedSchedule> {
        let mut jobs =
            vec![None::<JobTiming>; n_jobs];
        for rec in &self.jobs {
            if rec.job >= n_jobs {
                return Err(Error::InvalidSchedule(format!("unknown job id {}", rec.job)));
            }
            if jobs[rec.job].is_some() {
                return Err(Error::InvalidSchedule(format!("duplicate record for job {}", rec.job)));
            }
            jobs[rec.job] = Some(JobTiming {
                machine: rec.machine,
                setup_start: rec.setup_start,
                setup_end: rec.setup_end,
                completion: rec.completion,
            });
        }
        let jobs = jobs
            .into_iter()
            .enumerate()
            .map(|(j, t)| t.ok_or_else(|| Error::InvalidSchedule(format!("job {j} missing"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(TimedSchedule {
            jobs,
            objective: self.objective,
            proven_optimal_allocation: self.proven_optimal_allocation,
        })
    }
}

fn pretty<T: Serialize>(value: &T) -> Result<String> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    Ok(text)
}

pub fn instance_to_string(inst: &Instance) -> Result<String> {
    pretty(inst)
}

pub fn instance_from_str(text: &str) -> Result<Instance> {
    let inst: Instance = serde_json::from_str(text)?;
    inst.check()?;
    Ok(inst)
}

pub fn write_instance(path: &Path, inst: &Instance) -> Result<()> {
    fs::write(path, instance_to_string(inst)?)?;
    Ok(())
}

pub fn read_instance(path: &Path) -> Result<Instance> {
    instance_from_str(&fs::read_to_string(path)?)
}

pub fn schedule_to_string(sched: &TimedSchedule) -> Result<String> {
    pretty(&ScheduleFile::from_schedule(sched))
}

pub fn schedule_from_str(text: &str, inst: &Instance) -> Result<TimedSchedule> {
    let file: ScheduleFile = serde_json::from_str(text)?;
    file.into_schedule(inst.jobs)
}

pub fn write_schedule(path: &Path, sched: &TimedSchedule) -> Result<()> {
    fs::write(path, schedule_to_string(sched)?)?;
    Ok(())
}

pub fn read_schedule(path: &Path, inst: &Instance) -> Result<TimedSchedule> {
    schedule_from_str(&fs::read_to_string(path)?, inst)
}

pub fn plan_to_string(plan: &SequencePlan) -> Result<String> {
    pretty(plan)
}

pub fn plan_from_str(text: &str, inst: &Instance) -> Result<SequencePlan> {
    let plan: SequencePlan = serde_json::from_str(text)?;
    plan.check(inst)?;
    Ok(plan)
}

pub fn write_plan(path: &Path, plan: &SequencePlan) -> Result<()> {
    fs::write(path, plan_to_string(plan)?)?;
    Ok(())
}

pub fn read_plan(path: &Path, inst: &Instance) -> Result<SequencePlan> {
    plan_from_str(&fs::read_to_string(path)?, inst)
}
