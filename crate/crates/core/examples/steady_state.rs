// The ordered steady state of both models stays fixed under the primitive equations.

use tt_flock::experiments::commands::steady_drift;
use tt_flock::experiments::ExperimentConfig;
use tt_flock::models::ModelKind;

fn main() {
    let mut cfg = ExperimentConfig::default();
    cfg.grid.n = 16;
    cfg.checks.steady_steps = 200;
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let drift = steady_drift(&cfg, kind).unwrap();
        println!(
            "{}: H3 drift after {} steps = {drift:.2e}",
            kind.name(),
            cfg.checks.steady_steps
        );
    }
}
