// Random-field ratios for the functional inequalities behind the energy estimates.

use std::f64::consts::TAU;

use tt_flock::inequality_lab::{run_ensemble, standard_items, Ensemble};
use tt_flock::spectral::Spectrum;

fn main() {
    let ens = Ensemble {
        d: 2,
        n: 16,
        box_length: TAU,
        spectrum: Spectrum::Flat,
        cutoff: 6,
        trials: 50,
        seed: 0,
    };
    for item in standard_items(2) {
        let r = run_ensemble(&item, &ens).unwrap();
        println!(
            "{:<28} max ratio {:.4}  stable {}",
            r.name, r.max_ratio, r.stable
        );
    }
}
