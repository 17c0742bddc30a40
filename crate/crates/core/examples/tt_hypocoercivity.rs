// TT has no density diffusion; the cross term of the modified functional restores decay.

use tt_flock::diagnostics::hypocoercivity_cross;
use tt_flock::experiments::{run_in_memory, ExperimentConfig};
use tt_flock::models::ModelKind;

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.model.kind = ModelKind::Tt;
    cfg.grid.n = 32;
    cfg.stepper.t_end = 5.0;
    cfg.output.every = 20;
    cfg.diagnostics.delta0 = 0.1;
    let out = run_in_memory(&cfg).unwrap();
    for r in &out.records {
        println!(
            "t = {:6.3}  functional = {:.6e}  ratio to H3² = {:.4}",
            r.t,
            r.hypo,
            r.hypo / (r.hm * r.hm)
        );
    }
    let cross = hypocoercivity_cross(&out.final_state.fields, cfg.diagnostics.m);
    println!("final cross term = {cross:.3e}");
}
