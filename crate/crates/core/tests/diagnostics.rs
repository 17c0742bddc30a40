use std::f64::consts::TAU;

use tt_flock::diagnostics::{
    beta_exponent, envelope_bounded, fit_decay, hm_norm_fields, hypocoercivity_functional,
    linear_decay_quadrature, linear_decay_slope,
};
use tt_flock::experiments::{make_initial_data, run_in_memory, ExperimentConfig, InitSpec};
use tt_flock::models::{Form, ModelKind};
use tt_flock::spectral::{make_grid, Dealias};

#[test]
fn beta_vanishes_only_in_the_critical_case() {
    assert_eq!(beta_exponent(3, 3).unwrap(), 0.0);
    assert!(beta_exponent(2, 3).unwrap() < 0.0);
    assert!(beta_exponent(3, 4).unwrap() < 0.0);
}

#[test]
fn functional_is_equivalent_to_the_energy() {
    let g = make_grid(2, 32, TAU, Dealias::OneHalf).unwrap();
    for seed in 0..8 {
        let s = make_initial_data(
            &g,
            &InitSpec::RandomSmall {
                epsilon: 1.0,
                k0: 6.0,
                seed,
            },
            None,
        )
        .unwrap();
        let e = hm_norm_fields(&s.fields, 3).unwrap().powi(2);
        let phi = hypocoercivity_functional(&s.fields, 3, 0.1).unwrap();
        assert!(phi >= 0.9 * e && phi <= 1.1 * e, "{phi} vs {e}");
        assert_eq!(hypocoercivity_functional(&s.fields, 3, 0.0).unwrap(), e);
    }
}

#[test]
fn fit_rejects_short_windows() {
    let t = [0.0, 1.0, 50.0];
    let v = [1.0, 0.5, 0.1];
    assert!(fit_decay(&t, &v, (10.0, 100.0), -0.5, 0.1).is_err());
}

#[test]
fn envelope_check_uses_the_first_sample() {
    let t: Vec<f64> = (0..=100).map(f64::from).collect();
    let v: Vec<f64> = t.iter().map(|x| 1.0 + 0.01 * x).collect();
    let (ok, worst) = envelope_bounded(&t, &v, (10.0, 100.0), 2.0).unwrap();
    assert!(ok);
    assert!((worst - 2.0 / 1.1).abs() < 1e-12);
}

#[test]
fn quadrature_reproduces_heat_like_rates() {
    // Higher derivatives decay one half-power faster per order.
    let s0 = linear_decay_slope(ModelKind::Pptt, 2, -0.4, 1.0, 0.0, (10.0, 100.0)).unwrap();
    let s1 = linear_decay_slope(ModelKind::Pptt, 2, -0.4, 1.0, 1.0, (10.0, 100.0)).unwrap();
    assert!((s0 + 0.3).abs() < 0.05, "{s0}");
    assert!((s1 - s0 + 0.5).abs() < 0.05, "{s1}");
    let v = linear_decay_quadrature(ModelKind::Tt, 3, -0.9, 1.0, 0.0, &[0.0, 1.0, 10.0]).unwrap();
    assert!(v[0] > v[1] && v[1] > v[2]);
}

fn ledger_residual(dt: f64) -> f64 {
    let mut c = ExperimentConfig::default();
    c.model.kind = ModelKind::Pptt;
    c.model.form = Form::Perturbation;
    c.grid.n = 16;
    c.stepper.dt = Some(dt);
    c.stepper.t_end = 0.2;
    c.init = InitSpec::RandomSmall {
        epsilon: 0.3,
        k0: 3.0,
        seed: 5,
    };
    c.diagnostics.ledger_orders = vec![0, 1, 2];
    let out = run_in_memory(&c).unwrap();
    let r = &out.records;
    let mid = &r[r.len() / 2];
    (0..=2)
        .map(|k| {
            let res = mid.ledger[&format!("ledger.k{k}.residual")].abs();
            let scale = mid.ledger[&format!("ledger.k{k}.rate")].abs();
            res / scale
        })
        .fold(0.0, f64::max)
}

#[test]
fn energy_ledger_closes_as_the_step_shrinks() {
    let a = ledger_residual(0.01);
    let b = ledger_residual(0.005);
    // Centered differences and the second-order scheme: residual ~ dt^2.
    assert!(a < 1e-2, "{a}");
    assert!(b < a / 3.5, "{a} -> {b}");
}
