//! Schedule-matrix operators on a three-machine line: head retirement,
//! shift, recall, repair, inverse selection and rebalancing.
//!
//! `cargo run --example matrix_ops`

use gasched::matrix::{OverloadConfig, ScheduleMatrix};
use gasched::JobId;

fn main() -> gasched::Result<()> {
    // head job 0 finished on machine 1; job 3 lost its send
    let m = ScheduleMatrix::from_rows(
        &[
            vec![0, 1, 0],
            vec![1, 0, 0],
            vec![1, 0, 0],
            vec![0, 0, 0],
            vec![1, 1, 0],
            vec![0, 0, 0],
        ],
        &[Some(0), Some(1), Some(2), Some(3), Some(4), None],
    )?;
    println!("start\n{m}");

    let fixed = m.repair_rows();
    println!(
        "row violations {} -> {}",
        m.row_violations(),
        fixed.row_violations()
    );

    let done = fixed.complete_heads();
    println!(
        "completed {:?}, to recall {:?}",
        done.completed, done.to_recall
    );
    let shifted = done.matrix.shift_up()?;
    let recalled = shifted.recall_job(JobId(9))?;
    println!("after shift and recall of job 9\n{recalled}");

    let cfg = OverloadConfig { w: 1, delta: 0 };
    println!(
        "loads {:?}, overloaded {:?}",
        recalled.column_loads(),
        recalled.inverse_select(&cfg)
    );
    let balanced = recalled.rebalance_crossover(&cfg)?;
    println!(
        "rebalanced with {} moves: loads {:?}, feasible {}",
        balanced.moves,
        balanced.matrix.column_loads(),
        balanced.feasible
    );
    Ok(())
}
