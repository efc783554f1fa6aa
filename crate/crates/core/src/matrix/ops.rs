use rand::Rng;
use std::collections::BTreeSet;

use super::{OverloadConfig, ScheduleMatrix};
use crate::ga::Genome;
use crate::{Error, JobId, Result};

/// Output of [`ScheduleMatrix::complete_heads`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HeadCompletion {
    pub matrix: ScheduleMatrix,
    /// Head jobs whose row had a `1`: done, never to be called again.
    pub completed: Vec<JobId>,
    /// Head jobs whose row was all zero: to be put back at the end of the line.
    pub to_recall: Vec<JobId>,
}

/// Output of [`ScheduleMatrix::rebalance_crossover`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rebalance {
    pub matrix: ScheduleMatrix,
    /// Overloaded-column count after rebalancing.
    pub overloaded: usize,
    /// Whether `overloaded <= delta`.
    pub feasible: bool,
    /// Number of single-job moves performed.
    pub moves: usize,
}

impl ScheduleMatrix {
    /// Advances the line by one slot: body row `i` moves to row `i - 1`, the
    /// first body row becomes the head and the last body row is cleared.
    ///
    /// On the body this is left multiplication by the nilpotent
    /// superdiagonal matrix, so `depth` consecutive shifts empty it. The head
    /// must be empty (run [`complete_heads`](Self::complete_heads) first).
    pub fn shift_up(&self) -> Result<Self> {
        if self.head().iter().any(|&b| b) || self.labels[0].is_some() {
            return Err(Error::State(
                "head row must be cleared before shifting".into(),
            ));
        }
        let mut out = self.clone();
        let k = self.machines;
        out.cells.copy_within(k.., 0);
        let last = self.depth * k;
        out.cells[last..].fill(false);
        out.labels.rotate_left(1);
        out.labels[self.depth] = None;
        Ok(out)
    }

    /// Retires the head row. A head job with a `1` has been computed and is
    /// reported as completed; one whose head row is all zero is handed back
    /// for recall. The head row is empty afterwards.
    pub fn complete_heads(&self) -> HeadCompletion {
        let mut matrix = self.clone();
        let done = self.head().iter().any(|&b| b);
        let (mut completed, mut to_recall) = (Vec::new(), Vec::new());
        if let Some(job) = self.labels[0] {
            if done {
                completed.push(job);
            } else {
                to_recall.push(job);
            }
        }
        matrix.cells[..self.machines].fill(false);
        matrix.labels[0] = None;
        HeadCompletion {
            matrix,
            completed,
            to_recall,
        }
    }

    /// Puts `job` back in the last body row with a single `1` on the
    /// least-loaded machine (ties to the lowest index).
    pub fn recall_job(&self, job: JobId) -> Result<Self> {
        self.check_recall(job)?;
        let loads = self.column_loads();
        let target = argmin(&loads);
        Ok(self.place_last(job, target))
    }

    /// Like [`recall_job`](Self::recall_job) but picks the machine uniformly
    /// at random.
    pub fn recall_job_random<R: Rng + ?Sized>(&self, job: JobId, rng: &mut R) -> Result<Self> {
        self.check_recall(job)?;
        let target = rng.gen_range(0..self.machines);
        Ok(self.place_last(job, target))
    }

    fn check_recall(&self, job: JobId) -> Result<()> {
        let last = self.depth;
        if self.labels[last].is_some() || self.row_sum(last) > 0 {
            return Err(Error::Capacity(format!(
                "last row is occupied, cannot recall job {job}"
            )));
        }
        if self.labels.contains(&Some(job)) {
            return Err(Error::Argument(format!(
                "job {job} is already in the matrix"
            )));
        }
        Ok(())
    }

    fn place_last(&self, job: JobId, machine: usize) -> Self {
        let mut out = self.clone();
        out.set(self.depth, machine, true);
        out.labels[self.depth] = Some(job);
        out
    }

    /// Enforces `Σ_j b_ij <= 1` on every row by keeping only the leftmost
    /// `1`. Feasible rows are untouched.
    pub fn repair_rows(&self) -> Self {
        let mut out = self.clone();
        for r in 0..self.rows() {
            let row = &mut out.cells[r * self.machines..(r + 1) * self.machines];
            if let Some(first) = row.iter().position(|&b| b) {
                row[first + 1..].fill(false);
            }
        }
        out
    }

    /// Number of `1`s in body column `machine` (head row excluded).
    pub fn column_load(&self, machine: usize) -> Result<usize> {
        if machine >= self.machines {
            return Err(Error::Argument(format!(
                "machine {machine} out of range (k = {})",
                self.machines
            )));
        }
        Ok((1..=self.depth).filter(|&r| self.get(r, machine)).count())
    }

    pub fn column_loads(&self) -> Vec<usize> {
        let mut loads = vec![0; self.machines];
        for r in 1..=self.depth {
            for (j, load) in loads.iter_mut().enumerate() {
                *load += self.get(r, j) as usize;
            }
        }
        loads
    }

    /// Inverse selection: the machines whose waiting load exceeds `w`.
    pub fn inverse_select(&self, cfg: &OverloadConfig) -> BTreeSet<usize> {
        self.column_loads()
            .into_iter()
            .enumerate()
            .filter(|&(_, load)| load > cfg.w)
            .map(|(j, _)| j)
            .collect()
    }

    pub fn overloaded_count(&self, w: usize) -> usize {
        self.column_loads().into_iter().filter(|&l| l > w).count()
    }

    /// Moves waiting jobs between machines to minimize the number of
    /// columns with load above `w`.
    ///
    /// Jobs keep their slot and only change machine, so no job is created or
    /// lost and untouched entries keep their order. Two kinds of move are
    /// applied until neither is possible: the deepest job of the most loaded
    /// overloaded column goes to the least loaded column still below `w`;
    /// once no such column exists, the smallest overloaded column is emptied
    /// down to `w` into the other overloaded columns when they have room for
    /// its whole excess. The result reaches the minimum overloaded count
    /// attainable by redistributing the waiting jobs. `feasible` reports
    /// whether that minimum is within `delta`.
    ///
    /// Requires a row-feasible matrix.
    pub fn rebalance_crossover(&self, cfg: &OverloadConfig) -> Result<Rebalance> {
        self.rebalance_with_capacity(cfg, self.depth)
    }

    /// [`rebalance_crossover`](Self::rebalance_crossover) with at most
    /// `capacity` jobs per machine.
    pub fn rebalance_with_capacity(
        &self,
        cfg: &OverloadConfig,
        capacity: usize,
    ) -> Result<Rebalance> {
        if !self.is_row_feasible() {
            return Err(Error::State(
                "rebalancing needs a row-feasible matrix".into(),
            ));
        }
        let w = cfg.w;
        let mut out = self.clone();
        let mut loads = self.column_loads();
        let mut moves = 0;
        loop {
            let src = (0..self.machines)
                .filter(|&j| loads[j] > w)
                .min_by_key(|&j| (std::cmp::Reverse(loads[j]), j));
            let dst = (0..self.machines)
                .filter(|&j| loads[j] < w && loads[j] < capacity)
                .min_by_key(|&j| (loads[j], j));
            if let (Some(src), Some(dst)) = (src, dst) {
                out.move_deepest(src, dst, &mut loads);
                moves += 1;
                continue;
            }

            let over: Vec<usize> = (0..self.machines).filter(|&j| loads[j] > w).collect();
            let Some(&smallest) = over
                .iter()
                .min_by_key(|&&j| (loads[j], std::cmp::Reverse(j)))
            else {
                break;
            };
            let excess = loads[smallest] - w;
            let room: usize = over
                .iter()
                .filter(|&&j| j != smallest)
                .map(|&j| capacity.saturating_sub(loads[j]))
                .sum();
            if over.len() < 2 || room < excess {
                break;
            }
            for _ in 0..excess {
                let dst = over
                    .iter()
                    .copied()
                    .filter(|&j| j != smallest && loads[j] < capacity)
                    .min_by_key(|&j| (std::cmp::Reverse(loads[j]), j))
                    .expect("room was counted");
                out.move_deepest(smallest, dst, &mut loads);
                moves += 1;
            }
        }
        let overloaded = loads.iter().filter(|&&l| l > w).count();
        Ok(Rebalance {
            matrix: out,
            overloaded,
            feasible: overloaded <= cfg.delta,
            moves,
        })
    }

    fn move_deepest(&mut self, from: usize, to: usize, loads: &mut [usize]) {
        let row = (1..=self.depth)
            .rev()
            .find(|&r| self.get(r, from))
            .expect("source column has a job");
        self.set(row, from, false);
        self.set(row, to, true);
        loads[from] -= 1;
        loads[to] += 1;
    }

    /// Gives every labelled all-zero body row exactly one `1` in a uniformly
    /// random column, so no job stays dropped.
    pub fn mutate_dropped_rows<R: Rng + ?Sized>(&self, rng: &mut R) -> Self {
        self.mutate_dropped_rows_bounded(self.depth, rng)
    }

    /// [`mutate_dropped_rows`](Self::mutate_dropped_rows) restricted to
    /// machines holding fewer than `capacity` jobs; rows for which no machine
    /// has room stay dropped.
    pub fn mutate_dropped_rows_bounded<R: Rng + ?Sized>(
        &self,
        capacity: usize,
        rng: &mut R,
    ) -> Self {
        let mut out = self.clone();
        let mut loads = self.column_loads();
        for r in self.dropped_rows() {
            let open: Vec<usize> = (0..self.machines)
                .filter(|&j| loads[j] < capacity)
                .collect();
            if open.is_empty() {
                continue;
            }
            let j = open[rng.gen_range(0..open.len())];
            out.set(r, j, true);
            loads[j] += 1;
        }
        out
    }

    /// Keeps, in each column, only the first `capacity` body `1`s (top
    /// down); the rest are cleared and their rows become dropped.
    pub fn enforce_capacity(&self, capacity: usize) -> Self {
        let mut out = self.clone();
        for j in 0..self.machines {
            let mut seen = 0;
            for r in 1..=self.depth {
                if out.get(r, j) {
                    seen += 1;
                    if seen > capacity {
                        out.set(r, j, false);
                    }
                }
            }
        }
        out
    }

    /// Row-major flattening of the body (head row excluded).
    pub fn to_genome(&self) -> Genome {
        Genome::from_vec_unchecked(self.cells[self.machines..].to_vec())
    }

    /// Inverse of [`to_genome`](Self::to_genome). The head row is empty and
    /// the result is passed through [`repair_rows`](Self::repair_rows), so it
    /// is always row-feasible.
    pub fn from_genome(
        bits: &Genome,
        depth: usize,
        machines: usize,
        labels: &[Option<JobId>],
    ) -> Result<Self> {
        let mut out = ScheduleMatrix::new(depth, machines)?;
        if bits.len() != depth * machines {
            return Err(Error::Dimension {
                expected: depth * machines,
                found: bits.len(),
            });
        }
        if labels.len() != depth + 1 {
            return Err(Error::Dimension {
                expected: depth + 1,
                found: labels.len(),
            });
        }
        out.cells[machines..].copy_from_slice(bits.bits());
        out.labels.copy_from_slice(labels);
        Ok(out.repair_rows())
    }

    /// Overwrites the body with `bits` (row-major), clears rows that hold no
    /// job and repairs the row constraint. Head row and labels are kept.
    pub(crate) fn with_body_bits(&self, bits: &[bool]) -> Self {
        debug_assert_eq!(bits.len(), self.depth * self.machines);
        let mut out = self.clone();
        out.cells[self.machines..].copy_from_slice(bits);
        for r in 1..=self.depth {
            if out.labels[r].is_none() {
                out.cells[r * self.machines..(r + 1) * self.machines].fill(false);
            }
        }
        out.repair_rows()
    }
}

fn argmin(values: &[usize]) -> usize {
    (0..values.len())
        .min_by_key(|&j| (values[j], j))
        .expect("at least one machine")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng;

    fn body(rows: &[&[u8]]) -> ScheduleMatrix {
        ScheduleMatrix::from_body(rows).unwrap()
    }

    /// Body with the given column loads stacked top down, one job per row.
    fn with_loads(loads: &[usize], depth: usize) -> ScheduleMatrix {
        let k = loads.len();
        let mut m = ScheduleMatrix::new(depth, k).unwrap();
        let mut r = 1;
        for (j, &l) in loads.iter().enumerate() {
            for _ in 0..l {
                m.set(r, j, true);
                m.set_label(r, Some(JobId(r as u64)));
                r += 1;
            }
        }
        m
    }

    #[test]
    fn shift_moves_single_entry_with_label() {
        let m = ScheduleMatrix::from_rows(&[vec![0], vec![0], vec![1]], &[None, None, Some(9)])
            .unwrap();
        let s = m.shift_up().unwrap();
        assert_eq!(s.row(1), &[true]);
        assert_eq!(s.row(2), &[false]);
        assert_eq!(s.label(1), Some(JobId(9)));
        assert_eq!(s.label(2), None);
    }

    #[test]
    fn shift_of_zero_is_zero() {
        let m = ScheduleMatrix::new(4, 3).unwrap();
        assert_eq!(m.shift_up().unwrap(), m);
    }

    #[test]
    fn shift_requires_cleared_head() {
        let m = ScheduleMatrix::from_rows(&[vec![1, 0], vec![0, 0]], &[Some(1), None]).unwrap();
        assert!(matches!(m.shift_up(), Err(Error::State(_))));
    }

    #[test]
    fn completed_head_leaves_for_good() {
        let m = ScheduleMatrix::from_rows(&[vec![1, 0, 0], vec![0, 1, 0]], &[Some(7), Some(8)])
            .unwrap();
        let out = m.complete_heads();
        assert_eq!(out.completed, vec![JobId(7)]);
        assert!(out.to_recall.is_empty());
        assert_eq!(out.matrix.head(), &[false; 3]);
        assert_eq!(out.matrix.label(0), None);
        assert_eq!(out.matrix.label(1), Some(JobId(8)));
    }

    #[test]
    fn zero_head_is_recalled() {
        let m =
            ScheduleMatrix::from_rows(&[vec![0, 0, 0], vec![0, 0, 0]], &[Some(3), None]).unwrap();
        let out = m.complete_heads();
        assert!(out.completed.is_empty());
        assert_eq!(out.to_recall, vec![JobId(3)]);
    }

    #[test]
    fn empty_head_yields_nothing() {
        let out = ScheduleMatrix::new(2, 2).unwrap().complete_heads();
        assert!(out.completed.is_empty() && out.to_recall.is_empty());
    }

    #[test]
    fn recall_targets_least_loaded() {
        let m = with_loads(&[2, 0, 1], 4);
        let out = m.recall_job(JobId(99)).unwrap();
        assert_eq!(out.row(4), &[false, true, false]);
        assert_eq!(out.label(4), Some(JobId(99)));
    }

    #[test]
    fn recall_tie_goes_to_lowest_column() {
        let out = with_loads(&[1, 1, 1], 4).recall_job(JobId(99)).unwrap();
        assert_eq!(out.row(4), &[true, false, false]);
    }

    #[test]
    fn recall_into_occupied_last_row_fails() {
        let m = with_loads(&[1, 1], 2);
        assert!(matches!(m.recall_job(JobId(50)), Err(Error::Capacity(_))));
    }

    #[test]
    fn recall_random_places_one_bit() {
        let m = with_loads(&[1, 0, 0, 2], 5);
        let out = m.recall_job_random(JobId(42), &mut rng::seeded(1)).unwrap();
        assert_eq!(out.row_sum(5), 1);
    }

    #[test]
    fn repair_keeps_leftmost() {
        let m = body(&[&[1, 1, 0], &[0, 1, 1], &[0, 0, 1]]);
        let r = m.repair_rows();
        assert_eq!(r.row(1), &[true, false, false]);
        assert_eq!(r.row(2), &[false, true, false]);
        assert_eq!(r.row(3), &[false, false, true]);
        assert_eq!(r.repair_rows(), r);
    }

    #[test]
    fn column_load_counts_body_only() {
        let mut m = body(&[&[1, 0], &[1, 0], &[1, 0], &[0, 0]]);
        m.set(0, 0, true);
        assert_eq!(m.column_load(0).unwrap(), 3);
        assert_eq!(m.column_load(1).unwrap(), 0);
        assert!(matches!(m.column_load(2), Err(Error::Argument(_))));
    }

    #[test]
    fn inverse_selection_compares_with_w() {
        let m = with_loads(&[3, 1, 0], 4);
        assert_eq!(
            m.inverse_select(&OverloadConfig { w: 2, delta: 0 }),
            BTreeSet::from([0])
        );
        assert!(m
            .inverse_select(&OverloadConfig { w: 4, delta: 0 })
            .is_empty());
    }

    #[test]
    fn rebalance_splits_four_over_two() {
        let m = with_loads(&[4, 0], 4);
        let out = m
            .rebalance_crossover(&OverloadConfig { w: 2, delta: 0 })
            .unwrap();
        assert_eq!(out.matrix.column_loads(), vec![2, 2]);
        assert_eq!(out.overloaded, 0);
        assert!(out.feasible);
    }

    #[test]
    fn rebalance_leaves_balanced_matrix_alone() {
        let m = with_loads(&[1, 1, 1], 3);
        let out = m
            .rebalance_crossover(&OverloadConfig { w: 2, delta: 0 })
            .unwrap();
        assert_eq!(out.matrix, m);
        assert_eq!(out.moves, 0);
    }

    #[test]
    fn rebalance_consolidates_overloads() {
        // five jobs, w = 1, capacity 3: (2, 2, 1) has two overloaded
        // columns but (3, 1, 1) has one
        let m = with_loads(&[2, 2, 1], 5);
        let out = m
            .rebalance_with_capacity(&OverloadConfig { w: 1, delta: 0 }, 3)
            .unwrap();
        assert_eq!(out.overloaded, 1);
        assert!(!out.feasible);
        assert_eq!(out.matrix.body_popcount(), 5);
    }

    #[test]
    fn rebalance_moves_deepest_job() {
        let m = with_loads(&[3, 0], 3);
        let out = m
            .rebalance_crossover(&OverloadConfig { w: 2, delta: 0 })
            .unwrap();
        assert_eq!(out.matrix.row(3), &[false, true]);
        assert_eq!(out.matrix.row(1), &[true, false]);
        assert_eq!(out.matrix.labels(), m.labels());
    }

    #[test]
    fn rebalance_rejects_infeasible_rows() {
        let m = body(&[&[1, 1]]);
        assert!(matches!(
            m.rebalance_crossover(&OverloadConfig { w: 0, delta: 0 }),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn dropped_row_gets_one_bit() {
        let m = ScheduleMatrix::from_rows(
            &[vec![0, 0, 0], vec![0, 0, 0], vec![0, 1, 0]],
            &[None, Some(5), Some(6)],
        )
        .unwrap();
        let out = m.mutate_dropped_rows(&mut rng::seeded(0));
        assert_eq!(out.row_sum(1), 1);
        assert_eq!(out.row(2), m.row(2));
        assert!(out.dropped_rows().is_empty());
    }

    #[test]
    fn no_dropped_rows_no_change() {
        let m = with_loads(&[1, 2], 4);
        assert_eq!(m.mutate_dropped_rows(&mut rng::seeded(0)), m);
    }

    #[test]
    fn bounded_mutation_respects_capacity() {
        let mut m = with_loads(&[2, 1], 5);
        m.set_label(4, Some(JobId(40)));
        m.set_label(5, Some(JobId(50)));
        let out = m.mutate_dropped_rows_bounded(2, &mut rng::seeded(3));
        assert_eq!(out.column_loads(), vec![2, 2]);
        assert_eq!(out.dropped_rows().len(), 1);
    }

    #[test]
    fn capacity_drops_the_deepest_jobs() {
        let m = body(&[&[1, 0], &[1, 0], &[1, 0], &[0, 1]]);
        let out = m.enforce_capacity(2);
        assert_eq!(out.column_loads(), vec![2, 1]);
        assert_eq!(out.dropped_rows(), vec![3]);
    }

    #[test]
    fn genome_round_trip() {
        let one = body(&[&[1]]);
        assert_eq!(one.to_genome().to_u8(), vec![1]);
        let m = body(&[&[1, 0], &[0, 1]]);
        let g = m.to_genome();
        assert_eq!(g.to_u8(), vec![1, 0, 0, 1]);
        assert_eq!(
            ScheduleMatrix::from_genome(&g, 2, 2, m.labels()).unwrap(),
            m
        );
    }

    #[test]
    fn from_genome_checks_length_and_repairs() {
        let g = Genome::from_bits(&[1, 1, 0]).unwrap();
        assert!(matches!(
            ScheduleMatrix::from_genome(&g, 2, 2, &[None; 3]),
            Err(Error::Dimension {
                expected: 4,
                found: 3
            })
        ));
        let g = Genome::from_bits(&[1, 1, 0, 1]).unwrap();
        let m =
            ScheduleMatrix::from_genome(&g, 2, 2, &[None, Some(JobId(0)), Some(JobId(1))]).unwrap();
        assert!(m.is_row_feasible());
        assert_eq!(m.row(1), &[true, false]);
    }
}
