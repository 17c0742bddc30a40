// Small-data PPTT run: the H3 energy decreases at every output.

use tt_flock::experiments::{run_in_memory, ExperimentConfig};
use tt_flock::models::ModelKind;

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.model.kind = ModelKind::Pptt;
    cfg.grid.n = 32;
    cfg.stepper.t_end = 5.0;
    cfg.output.every = 20;
    let out = run_in_memory(&cfg).unwrap();
    for r in &out.records {
        println!(
            "t = {:6.3}  H3 = {:.6e}  Ḣ^-s = {:.6e}",
            r.t, r.h3, r.hdot_minus_s
        );
    }
    let monotone = out.records.windows(2).all(|w| w[1].h3 <= w[0].h3);
    println!("monotone: {monotone}");
}
