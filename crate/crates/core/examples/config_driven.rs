// Configuration from TOML text with command-line style overrides.

use tt_flock::experiments::{run_in_memory, ExperimentConfig};

const CONFIG: &str = r#"
[model]
kind = "tt"

[grid]
n = 16

[stepper]
scheme = "imex-rk3"
t_end = 1.0

[init]
kind = "low-freq-bump"
epsilon = 1e-3
k0 = 2.0
"#;

fn main() {
    let cfg = ExperimentConfig::from_toml_str(CONFIG, &["output.every=5".into()]).unwrap();
    println!(
        "theorem hypothesis holds: {}",
        cfg.meets_theorem_hypothesis()
    );
    let out = run_in_memory(&cfg).unwrap();
    println!(
        "dt = {:.4}, {} records, final H3 = {:.4e}",
        out.dt_used,
        out.records.len(),
        out.records.last().unwrap().h3
    );
}
