//! Binary schedule matrix.
//!
//! Row 0 is the head row: the job at the front of the line. Rows `1..=depth`
//! form the body, the waiting slots. Column `j` stands for machine `j`
//! (zero-based). A `1` at `(row, j)` in the body means the job in that row
//! waits for machine `j`; a labelled row with no `1` is a job whose send
//! failed. The label column maps each row to the job it holds and moves in
//! lockstep with the bits.
//!
//! All operations are pure: they return a new matrix and leave the input
//! untouched.

mod ops;
mod snapshot;

use serde::{Deserialize, Serialize};

use crate::{Error, JobId, Result};

pub use ops::{HeadCompletion, Rebalance};

/// Overload thresholds: a machine whose waiting load exceeds `w` is
/// overloaded, and a schedule tolerates at most `delta` overloaded machines.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OverloadConfig {
    pub w: usize,
    pub delta: usize,
}

impl Default for OverloadConfig {
    fn default() -> Self {
        OverloadConfig { w: 2, delta: 0 }
    }
}

impl OverloadConfig {
    pub fn validate(&self, depth: usize, machines: usize) -> Result<()> {
        if self.w > depth {
            return Err(Error::config(
                "w",
                format!("{} exceeds the queue depth {depth}", self.w),
            ));
        }
        if self.delta > machines {
            return Err(Error::config(
                "delta",
                format!("{} exceeds the machine count {machines}", self.delta),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ScheduleMatrix {
    depth: usize,
    machines: usize,
    labels: Vec<Option<JobId>>,
    cells: Vec<bool>,
}

impl ScheduleMatrix {
    /// Empty matrix with `depth` body rows and `machines` columns.
    pub fn new(depth: usize, machines: usize) -> Result<Self> {
        if depth == 0 {
            return Err(Error::Argument("queue depth must be at least 1".into()));
        }
        if machines == 0 {
            return Err(Error::Argument("machine count must be at least 1".into()));
        }
        Ok(ScheduleMatrix {
            depth,
            machines,
            labels: vec![None; depth + 1],
            cells: vec![false; (depth + 1) * machines],
        })
    }

    /// Builds a matrix from `0`/`1` rows (head first) and a label per row.
    pub fn from_rows(rows: &[Vec<u8>], labels: &[Option<u64>]) -> Result<Self> {
        if rows.len() < 2 {
            return Err(Error::Argument(
                "need a head row and at least one body row".into(),
            ));
        }
        let machines = rows[0].len();
        let mut m = ScheduleMatrix::new(rows.len() - 1, machines)?;
        if labels.len() != rows.len() {
            return Err(Error::Dimension {
                expected: rows.len(),
                found: labels.len(),
            });
        }
        for (r, row) in rows.iter().enumerate() {
            if row.len() != machines {
                return Err(Error::Dimension {
                    expected: machines,
                    found: row.len(),
                });
            }
            for (c, &b) in row.iter().enumerate() {
                match b {
                    0 => {}
                    1 => m.cells[r * machines + c] = true,
                    other => return Err(Error::Argument(format!("cell ({r}, {c}) is {other}"))),
                }
            }
        }
        m.labels = labels.iter().map(|l| l.map(JobId)).collect();
        Ok(m)
    }

    /// Body rows given as `0`/`1` slices; every non-zero row gets label
    /// `row index - 1`, empty rows stay unlabelled, the head is empty.
    pub fn from_body(body: &[&[u8]]) -> Result<Self> {
        let machines = body.first().map_or(0, |r| r.len());
        let mut rows = vec![vec![0; machines]];
        rows.extend(body.iter().map(|r| r.to_vec()));
        let mut labels = vec![None];
        labels.extend(
            body.iter()
                .enumerate()
                .map(|(i, r)| r.iter().any(|&b| b != 0).then_some(i as u64)),
        );
        ScheduleMatrix::from_rows(&rows, &labels)
    }

    /// Queue depth: number of body rows.
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn machines(&self) -> usize {
        self.machines
    }

    /// Total rows including the head row.
    pub fn rows(&self) -> usize {
        self.depth + 1
    }

    pub fn get(&self, row: usize, machine: usize) -> bool {
        self.cells[self.index(row, machine)]
    }

    pub fn set(&mut self, row: usize, machine: usize, value: bool) {
        let i = self.index(row, machine);
        self.cells[i] = value;
    }

    pub fn row(&self, row: usize) -> &[bool] {
        assert!(row <= self.depth, "row {row} out of range");
        &self.cells[row * self.machines..(row + 1) * self.machines]
    }

    pub fn head(&self) -> &[bool] {
        self.row(0)
    }

    pub fn label(&self, row: usize) -> Option<JobId> {
        self.labels[row]
    }

    pub fn labels(&self) -> &[Option<JobId>] {
        &self.labels
    }

    pub fn set_label(&mut self, row: usize, job: Option<JobId>) {
        self.labels[row] = job;
    }

    pub fn row_sum(&self, row: usize) -> usize {
        self.row(row).iter().filter(|&&b| b).count()
    }

    /// Column holding the row's `1`, if any (leftmost when several).
    pub fn row_machine(&self, row: usize) -> Option<usize> {
        self.row(row).iter().position(|&b| b)
    }

    /// Number of set bits in the body.
    pub fn body_popcount(&self) -> usize {
        self.cells[self.machines..].iter().filter(|&&b| b).count()
    }

    /// Body rows that carry a job but no `1`: failed sends awaiting repair
    /// or recall.
    pub fn dropped_rows(&self) -> Vec<usize> {
        (1..=self.depth)
            .filter(|&r| self.labels[r].is_some() && self.row_sum(r) == 0)
            .collect()
    }

    /// `Σ_rows max(0, rowsum − 1)` over all rows.
    pub fn row_violations(&self) -> usize {
        (0..self.rows())
            .map(|r| self.row_sum(r).saturating_sub(1))
            .sum()
    }

    pub fn is_row_feasible(&self) -> bool {
        (0..self.rows()).all(|r| self.row_sum(r) <= 1)
    }

    /// Rows holding a job, head included.
    pub fn job_count(&self) -> usize {
        self.labels.iter().filter(|l| l.is_some()).count()
    }

    fn index(&self, row: usize, machine: usize) -> usize {
        assert!(
            row <= self.depth && machine < self.machines,
            "cell ({row}, {machine}) out of range"
        );
        row * self.machines + machine
    }
}
