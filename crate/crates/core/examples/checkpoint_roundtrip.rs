// Run, checkpoint, restart and compare with an uninterrupted run.

use tt_flock::experiments::run::run_from;
use tt_flock::experiments::{read_checkpoint, run_in_memory, write_checkpoint, ExperimentConfig};

fn main() {
    let dir = std::env::temp_dir().join(format!("ttflock-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n = 16;
    cfg.stepper.dt = Some(0.01);
    cfg.stepper.t_end = 1.0;
    let whole = run_in_memory(&cfg).unwrap();

    cfg.stepper.t_end = 0.5;
    let first = run_in_memory(&cfg).unwrap();
    let path = dir.join("half.ttlb");
    write_checkpoint(&path, &first.final_state).unwrap();
    let restart = read_checkpoint(&path).unwrap();
    cfg.stepper.t_end = 1.0;
    let second = run_from(&cfg, restart).unwrap();

    let diff = second
        .final_state
        .fields
        .max_abs_diff(&whole.final_state.fields);
    println!("restart vs uninterrupted: max coefficient difference {diff:.2e}");
    std::fs::remove_dir_all(&dir).ok();
}
