use tt_flock::diagnostics::{hm_norm_fields, hypocoercivity_functional};
use tt_flock::models::{steady_state, Fields, Form, Model, ModelKind, ModelParams, State};
use tt_flock::spectral::{
    make_grid, random_field, rng_from_seed, Dealias, Grid, SpectralVector, Spectrum,
};
use tt_flock::timestepper::{
    exact_linear_propagator, imex_step, integrate, uniform_steps, LinearPropagator, Scheme, Stepper,
};
use tt_flock::Error;

fn smooth_state(g: &Grid, seed: u64, amp: f64) -> State {
    let mut rng = rng_from_seed(seed);
    let sp = Spectrum::Gaussian {
        width: 2.0 * g.fundamental(),
    };
    let comps = (0..g.d())
        .map(|_| random_field(g, sp, g.n(), &mut rng))
        .collect();
    let mut f = Fields::new(
        SpectralVector::from_components(comps).unwrap(),
        random_field(g, sp, g.n(), &mut rng),
    )
    .unwrap();
    let h = hm_norm_fields(&f, 3).unwrap();
    f.scale(amp / h);
    State::new(f, 0.0, Form::Perturbation)
}

#[test]
fn uniform_step_count() {
    assert_eq!(uniform_steps(1.0, 0.3).unwrap(), (4, 0.25));
    assert_eq!(uniform_steps(1.0, 0.25).unwrap().0, 4);
    assert!(uniform_steps(1.0, 0.0).is_err());
}

#[test]
fn linear_order_against_exact_propagator() {
    let g = make_grid(2, 16, 2.0 * std::f64::consts::PI, Dealias::OneHalf).unwrap();
    let s0 = smooth_state(&g, 1, 1.0);
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let model = Model::perturbation(kind);
        let exact = exact_linear_propagator(&s0, 0.5, &model).unwrap();
        for scheme in [Scheme::ImexEuler, Scheme::ImexRk2, Scheme::ImexRk3] {
            let mut errs = Vec::new();
            for dt in [0.01, 0.005] {
                let mut s = s0.clone();
                integrate(&s0, 0.5, dt, scheme, &model, 1000, true, |x| {
                    s = x.clone();
                    Ok(())
                })
                .unwrap();
                errs.push(s.fields.max_abs_diff(&exact.fields));
            }
            let p = (errs[0] / errs[1]).log2();
            let want = scheme.order() as f64;
            assert!((p - want).abs() < 0.3, "{kind:?} {scheme:?}: order {p}");
        }
    }
}

#[test]
fn linear_steps_contract_every_mode() {
    let g = make_grid(2, 16, 3.0, Dealias::OneHalf).unwrap();
    let s0 = smooth_state(&g, 4, 1.0);
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let model = Model::perturbation(kind);
        for scheme in [Scheme::ImexEuler, Scheme::ImexRk2, Scheme::ImexRk3] {
            let st = Stepper::new(model, scheme, &g, 5.0)
                .unwrap()
                .linear_only(true);
            let s1 = st.step(&s0).unwrap();
            let a = hm_norm_fields(&s0.fields, 0).unwrap();
            let b = hm_norm_fields(&s1.fields, 0).unwrap();
            assert!(b <= a * (1.0 + 1e-12), "{kind:?} {scheme:?}");
        }
    }
}

#[test]
fn steady_state_is_preserved() {
    let g = make_grid(2, 8, 4.0, Dealias::OneHalf).unwrap();
    let p = ModelParams {
        alpha: 1.5,
        beta: 0.5,
        direction: [0.0, 1.0, 0.0],
        ..Default::default()
    };
    let s = steady_state(&g, &p).unwrap();
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let model = Model::primitive(kind, p);
        for scheme in [Scheme::ImexEuler, Scheme::ImexRk2, Scheme::ImexRk3] {
            let mut cur = s.clone();
            for _ in 0..50 {
                cur = imex_step(&cur, 0.05, scheme, &model).unwrap();
            }
            assert!(
                cur.fields.max_abs_diff(&s.fields) < 1e-13,
                "{kind:?} {scheme:?}"
            );
        }
    }
}

#[test]
fn singular_implicit_solve_is_reported() {
    let g = make_grid(2, 8, 4.0, Dealias::OneHalf).unwrap();
    let p = ModelParams {
        alpha: 2.0,
        ..Default::default()
    };
    let model = Model::primitive(ModelKind::Pptt, p);
    // γ dt α = 1 at the zero mode for implicit Euler
    let err = Stepper::new(model, Scheme::ImexEuler, &g, 0.5)
        .err()
        .unwrap();
    assert!(matches!(err, Error::SolveSingular { mode: 0, .. }));
}

#[test]
fn propagator_preserves_symmetry_and_composes() {
    let g = make_grid(3, 8, 5.0, Dealias::OneHalf).unwrap();
    let s0 = smooth_state(&g, 9, 1.0);
    let model = Model::perturbation(ModelKind::Tt);
    let once = exact_linear_propagator(&s0, 0.8, &model).unwrap();
    let p = LinearPropagator::new(&model, &g, 0.4).unwrap();
    let twice = p.advance(&p.advance(&s0));
    assert!(once.fields.max_abs_diff(&twice.fields) < 1e-13);
    assert!(once.fields.hermitian_defect() < 1e-15);
    assert_eq!(
        exact_linear_propagator(&s0, 0.0, &model)
            .unwrap()
            .fields
            .max_abs_diff(&s0.fields),
        0.0
    );
}

#[test]
fn small_data_is_dissipated() {
    let g = make_grid(2, 32, 2.0 * std::f64::consts::PI, Dealias::OneHalf).unwrap();
    let s0 = smooth_state(&g, 12, 1e-2);
    let model = Model::perturbation(ModelKind::Tt);
    let mut phi = Vec::new();
    integrate(&s0, 2.0, 0.01, Scheme::ImexRk2, &model, 10, false, |s| {
        phi.push(hypocoercivity_functional(&s.fields, 3, 0.1)?);
        Ok(())
    })
    .unwrap();
    assert!(phi.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn blow_up_is_detected() {
    let g = make_grid(2, 8, 2.0 * std::f64::consts::PI, Dealias::OneHalf).unwrap();
    let p = ModelParams::default();
    let mut s = steady_state(&g, &p).unwrap();
    // primitive form with v = 0: the αv instability grows exponentially
    for c in s.fields.velocity.components_mut() {
        c.coeffs_mut()[0] = Default::default();
    }
    s.fields.velocity.components_mut()[0].coeffs_mut()[0] = num_complex::Complex64::new(1e-3, 0.0);
    let model = Model::primitive(ModelKind::Pptt, p);
    let r = integrate(&s, 50.0, 0.01, Scheme::ImexRk2, &model, 100, true, |_| {
        Ok(())
    });
    assert!(matches!(r, Err(Error::BlowUp { .. })));
}
