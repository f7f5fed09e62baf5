//! JSON documents for instances and schedules.
//!
//! ```json
//! {"m": 2, "d": 4, "jobs": [3, 3, 2, 1]}
//! ```
//!
//! A schedule document lists the machine of every job (position = job
//! index), the machine loads, the total early work, the producing algorithm
//! and its integer parameters.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::instance::{evaluate, Instance, Schedule, Time};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceDoc {
    pub m: usize,
    pub d: Time,
    pub jobs: Vec<Time>,
}

impl From<&Instance> for InstanceDoc {
    fn from(i: &Instance) -> Self {
        Self {
            m: i.machine_count(),
            d: i.due_date(),
            jobs: i.jobs().to_vec(),
        }
    }
}

impl TryFrom<InstanceDoc> for Instance {
    type Error = crate::Error;

    fn try_from(doc: InstanceDoc) -> Result<Self> {
        Instance::new(doc.jobs, doc.m, doc.d)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScheduleDoc {
    pub assignment: Vec<usize>,
    pub loads: Vec<Time>,
    pub early_work_total: Time,
    pub algorithm: String,
    #[serde(default)]
    pub parameters: BTreeMap<String, u64>,
}

impl ScheduleDoc {
    pub fn new(schedule: &Schedule, algorithm: &str, parameters: BTreeMap<String, u64>) -> Self {
        Self {
            assignment: schedule.assignment.clone(),
            loads: schedule.machine_loads.clone(),
            early_work_total: schedule.early_work_total,
            algorithm: algorithm.to_string(),
            parameters,
        }
    }
}

pub fn parse_instance(text: &str) -> Result<Instance> {
    let doc: InstanceDoc =
        serde_json::from_str(text).map_err(|e| validation(format!("instance document: {e}")))?;
    doc.try_into()
}

pub fn render_instance(instance: &Instance) -> String {
    let mut s = serde_json::to_string(&InstanceDoc::from(instance)).expect("plain integers");
    s.push('\n');
    s
}

pub fn parse_schedule(text: &str) -> Result<ScheduleDoc> {
    serde_json::from_str(text).map_err(|e| validation(format!("schedule document: {e}")))
}

pub fn render_schedule(doc: &ScheduleDoc) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("plain integers");
    s.push('\n');
    s
}

/// Recomputes loads and early work of `doc` and rejects any mismatch.
pub fn verify(instance: &Instance, doc: &ScheduleDoc) -> Result<Schedule> {
    let schedule = evaluate(instance, &doc.assignment)?;
    if schedule.machine_loads != doc.loads {
        return Err(validation(format!(
            "stated loads {:?} differ from recomputed {:?}",
            doc.loads, schedule.machine_loads
        )));
    }
    if schedule.early_work_total != doc.early_work_total {
        return Err(validation(format!(
            "stated early work {} differs from recomputed {}",
            doc.early_work_total, schedule.early_work_total
        )));
    }
    Ok(schedule)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn instance_document() {
        let i = parse_instance(r#"{"m": 2, "d": 4, "jobs": [3, 3, 2, 1]}"#).unwrap();
        assert_eq!(i.jobs(), &[3, 3, 2, 1]);
        assert_eq!(
            render_instance(&i),
            "{\"m\":2,\"d\":4,\"jobs\":[3,3,2,1]}\n"
        );
        assert!(parse_instance(r#"{"m": 0, "d": 4, "jobs": []}"#).is_err());
        assert!(parse_instance(r#"{"m": 1, "d": 4, "jobs": [1.5]}"#).is_err());
        assert!(parse_instance(r#"{"m": 1, "d": 4, "jobs": [1], "x": 1}"#).is_err());
    }

    #[test]
    fn verify_catches_mismatch() {
        let i = Instance::new(vec![3, 3, 2, 1], 2, 4).unwrap();
        let s = evaluate(&i, &[0, 1, 0, 1]).unwrap();
        let mut doc = ScheduleDoc::new(&s, "bf", BTreeMap::new());
        assert!(verify(&i, &doc).is_ok());
        doc.early_work_total = 9;
        assert!(verify(&i, &doc).is_err());
        doc.early_work_total = 8;
        doc.loads = vec![4, 5];
        assert!(verify(&i, &doc).is_err());
        doc.loads = s.machine_loads.clone();
        doc.assignment = vec![0, 1, 0];
        assert!(verify(&i, &doc).is_err());
    }
}
