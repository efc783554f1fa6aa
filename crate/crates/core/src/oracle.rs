//! Exhaustive ground truth for small static instances.
//!
//! Instead of all `2^(J·k)` matrices the search runs over assignments
//! job → machine or drop; the order of jobs inside a column does not change
//! the objective, so nothing is lost.

use serde::Serialize;

use crate::matrix::ScheduleMatrix;
use crate::scheduler::{schedule_fitness, SchedulerFitnessConfig};
use crate::{Error, JobId, Result};

/// Largest raw assignment space `(k + 1)^J` the oracle will walk.
pub const ENUMERATION_BUDGET: u64 = 10_000_000;

/// Machine per job; `None` means the job is dropped.
pub type Assignment = Vec<Option<usize>>;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OracleResult {
    pub optimum: f64,
    pub witness: Assignment,
    /// How many assignments attain the optimum.
    pub optimal_count: u64,
}

/// Iterator over every capacity-respecting assignment, in lexicographic
/// order with job 0 most significant and machines before drop.
#[derive(Clone, Debug)]
pub struct Assignments {
    machines: usize,
    capacity: usize,
    // digit value `machines` encodes a drop
    digits: Vec<usize>,
    loads: Vec<usize>,
    done: bool,
}

impl Assignments {
    fn fits(&self) -> bool {
        self.loads.iter().all(|&l| l <= self.capacity)
    }

    fn set(&mut self, i: usize, value: usize) {
        let old = self.digits[i];
        if old < self.machines {
            self.loads[old] -= 1;
        }
        if value < self.machines {
            self.loads[value] += 1;
        }
        self.digits[i] = value;
    }

    /// Advances the odometer; false once it wraps around.
    fn advance(&mut self) -> bool {
        for i in (0..self.digits.len()).rev() {
            if self.digits[i] < self.machines {
                let next = self.digits[i] + 1;
                self.set(i, next);
                return true;
            }
            self.set(i, 0);
        }
        false
    }
}

impl Iterator for Assignments {
    type Item = Assignment;

    fn next(&mut self) -> Option<Assignment> {
        while !self.done {
            let current = self.fits().then(|| {
                self.digits
                    .iter()
                    .map(|&d| (d < self.machines).then_some(d))
                    .collect()
            });
            if !self.advance() {
                self.done = true;
            }
            if current.is_some() {
                return current;
            }
        }
        None
    }
}

fn check_budget(jobs: usize, machines: usize) -> Result<()> {
    let size = (machines as u128 + 1)
        .checked_pow(jobs as u32)
        .unwrap_or(u128::MAX);
    if size > ENUMERATION_BUDGET as u128 {
        return Err(Error::Size {
            size,
            budget: ENUMERATION_BUDGET,
        });
    }
    Ok(())
}

/// Every mapping of `jobs` jobs onto `{machine 0..machines, drop}` that puts
/// at most `capacity` jobs on any machine.
pub fn enumerate_assignments(jobs: usize, machines: usize, capacity: usize) -> Result<Assignments> {
    if machines == 0 {
        return Err(Error::Argument("machine count must be at least 1".into()));
    }
    check_budget(jobs, machines)?;
    let mut loads = vec![0; machines];
    if jobs > 0 {
        loads[0] = jobs;
    }
    Ok(Assignments {
        machines,
        capacity,
        digits: vec![0; jobs],
        loads,
        done: false,
    })
}

/// Matrix with one body row per job (job `i` labelled `i`) holding the
/// assignment.
pub fn materialize(assignment: &[Option<usize>], machines: usize) -> Result<ScheduleMatrix> {
    let mut m = ScheduleMatrix::new(assignment.len().max(1), machines)?;
    for (i, slot) in assignment.iter().enumerate() {
        m.set_label(i + 1, Some(JobId(i as u64)));
        if let Some(j) = *slot {
            if j >= machines {
                return Err(Error::Argument(format!(
                    "job {i} assigned to missing machine {j}"
                )));
            }
            m.set(i + 1, j, true);
        }
    }
    Ok(m)
}

/// Minimum of [`schedule_fitness`] over all assignments, one witness (the
/// first in enumeration order) and the number of optimal assignments.
pub fn brute_force_best(
    jobs: usize,
    machines: usize,
    capacity: usize,
    cfg: &SchedulerFitnessConfig,
) -> Result<OracleResult> {
    let mut best: Option<OracleResult> = None;
    for assignment in enumerate_assignments(jobs, machines, capacity)? {
        let value = schedule_fitness(&materialize(&assignment, machines)?, cfg);
        match &mut best {
            Some(b) if value == b.optimum => b.optimal_count += 1,
            Some(b) if value > b.optimum => {}
            _ => {
                best = Some(OracleResult {
                    optimum: value,
                    witness: assignment,
                    optimal_count: 1,
                })
            }
        }
    }
    Ok(best.expect("the all-drop assignment always exists"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::OverloadConfig;

    fn cfg(w: usize, delta: usize) -> SchedulerFitnessConfig {
        SchedulerFitnessConfig {
            overload: OverloadConfig { w, delta },
            ..Default::default()
        }
    }

    #[test]
    fn one_job_places_or_drops() {
        let all: Vec<_> = enumerate_assignments(1, 1, 1).unwrap().collect();
        assert_eq!(all, vec![vec![Some(0)], vec![None]]);
    }

    #[test]
    fn two_jobs_two_machines_capacity_one() {
        // raw count by direct nested loops over {0, 1, drop}
        let mut direct = 0;
        for a in 0..3 {
            for b in 0..3 {
                if !(a == b && a < 2) {
                    direct += 1;
                }
            }
        }
        assert_eq!(direct, 7);
        assert_eq!(enumerate_assignments(2, 2, 1).unwrap().count(), direct);
    }

    #[test]
    fn zero_jobs_is_one_empty_assignment() {
        let all: Vec<_> = enumerate_assignments(0, 3, 2).unwrap().collect();
        assert_eq!(all, vec![Vec::<Option<usize>>::new()]);
    }

    #[test]
    fn budget_is_enforced() {
        assert!(matches!(
            enumerate_assignments(12, 3, 3),
            Err(Error::Size { .. })
        ));
        assert!(enumerate_assignments(11, 3, 3).is_ok());
    }

    #[test]
    fn five_jobs_need_one_drop() {
        let r = brute_force_best(5, 2, 2, &cfg(2, 0)).unwrap();
        assert_eq!(r.optimum, 100.0);
    }

    #[test]
    fn six_jobs_balance() {
        let r = brute_force_best(6, 3, 3, &cfg(2, 0)).unwrap();
        assert_eq!(r.optimum, 0.0);
        // 6! / (2! 2! 2!) ways to split six labelled jobs 2/2/2
        assert_eq!(r.optimal_count, 90);
    }

    #[test]
    fn seven_jobs_one_overload() {
        let r = brute_force_best(7, 3, 3, &cfg(2, 0)).unwrap();
        assert_eq!(r.optimum, 1.0);
        let witness = materialize(&r.witness, 3).unwrap();
        assert_eq!(schedule_fitness(&witness, &cfg(2, 0)), r.optimum);
    }
}
