// Per-mode linear operators: the linearized energy never grows in any mode.

use tt_flock::models::{ModeMatrix, ModelKind};

fn main() {
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let mut worst = f64::NEG_INFINITY;
        for i in 1..=40 {
            for j in 0..=40 {
                let k = [0.1 * i as f64, 0.1 * j as f64];
                let m = ModeMatrix::perturbation(&k, kind);
                worst = worst.max(m.hermitian_part_max_eigenvalue());
            }
        }
        println!(
            "{}: largest eigenvalue of (M + M*)/2 over the sampled modes: {worst:.6}",
            kind.name()
        );
    }
}
