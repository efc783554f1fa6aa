//! Queue simulation from a workload text, with unreliable dispatch and a
//! snapshot of the line halfway through.
//!
//! `cargo run --example simulate`

use gasched::sim::{parse_workload, run_sim_traced, SimConfig, SimState};

const WORKLOAD: &str = "\
# id arrival service
0 0 2
1 0 1
2 1 3
3 2 1
4 4 2
5 5 1
6 5 1
7 9 2
";

fn main() -> gasched::Result<()> {
    let jobs = parse_workload(WORKLOAD)?;
    let cfg = SimConfig {
        machines: 2,
        queue_depth: 4,
        send_failure_prob: 0.25,
        horizon: 30,
        seed: 7,
        ..SimConfig::default()
    };

    let mut state = SimState::new(cfg.clone())?;
    for t in 0..6 {
        let arrivals: Vec<_> = jobs.iter().filter(|j| j.arrival == t).cloned().collect();
        state.dispatch(&arrivals);
        state.tick()?;
    }
    println!("line after 6 ticks:\n{}", state.matrix().to_snapshot());
    println!("census {:?}", state.census());

    let report = run_sim_traced(&cfg, &jobs)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&report.metrics).expect("metrics serialize")
    );
    print!(
        "{}",
        report
            .trace_csv()
            .lines()
            .take(8)
            .collect::<Vec<_>>()
            .join("\n")
    );
    println!();
    Ok(())
}
