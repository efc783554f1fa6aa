use serde::{Deserialize, Serialize};
use std::fmt;

/// Identity of a job; unique within one matrix or workload.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct JobId(pub u64);

impl fmt::Display for JobId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// A unit of work: arrives at `arrival` and occupies a machine for
/// `service_time` ticks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Job {
    pub id: JobId,
    pub arrival: u64,
    pub service_time: u32,
}

impl Job {
    pub fn new(id: u64, arrival: u64, service_time: u32) -> Self {
        Job {
            id: JobId(id),
            arrival,
            service_time,
        }
    }
}
