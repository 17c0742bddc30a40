//! Acceptance suite: one PASS/FAIL line per criterion, all tolerances pinned here.

use std::f64::consts::{PI, TAU};
use std::time::Instant;

use tt_flock::diagnostics::{beta_exponent, envelope_bounded, hm_norm_fields};
use tt_flock::experiments::commands::{fits_report, interpolation_suite, steady_drift};
use tt_flock::experiments::oracle::oracle_smallgrid;
use tt_flock::experiments::{
    make_initial_data, run_in_memory, ExperimentConfig, InitSpec, TimeSeriesRecord,
};
use tt_flock::models::{Form, Model, ModelKind};
use tt_flock::spectral::{make_grid, Dealias};
use tt_flock::timestepper::{exact_linear_propagator, uniform_steps, Scheme, Stepper};

const ORACLE_TOL: f64 = 1e-10;
const ORACLE_SECONDS: f64 = 1.0;
const STEADY_STEPS: usize = 1000;
const STEADY_DT: f64 = 0.01;
const STEADY_TOL: f64 = 1e-10;
const BETA_TOL: f64 = 1e-12;
const INTERP_TRIALS: usize = 1000;
const INTERP_SECONDS: f64 = 10.0;
const MONOTONE_SLACK: f64 = 1e-12;
const DELTA0: f64 = 0.1;
const DECAY_TOL: f64 = 0.15;
const NOMINAL_SLOPES: [f64; 2] = [-0.30, -0.80];
const ENVELOPE_FACTOR: f64 = 2.0;
const ORDER_BAND: (f64, f64) = (0.2, 0.3);
const MEAN_TOL: f64 = 1e-12;

struct Report {
    failures: Vec<String>,
}

impl Report {
    fn line(&mut self, id: u32, name: &str, pass: bool, detail: String) {
        let tag = if pass { "PASS" } else { "FAIL" };
        println!("[{tag}] criterion {id:>2} {name}: {detail}");
        if !pass {
            self.failures.push(format!("{id} {name}"));
        }
    }
}

fn max_rel_increase(v: &[f64]) -> f64 {
    v.windows(2)
        .map(|w| (w[1] - w[0]) / w[0].abs().max(f64::MIN_POSITIVE))
        .fold(f64::NEG_INFINITY, f64::max)
}

fn mean_drift(records: &[TimeSeriesRecord]) -> f64 {
    let m0 = records[0].mean_eta;
    records
        .iter()
        .map(|r| (r.mean_eta - m0).abs())
        .fold(0.0, f64::max)
}

fn small_run(kind: ModelKind) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.model.kind = kind;
    c.model.form = Form::Perturbation;
    c.grid.d = 2;
    c.grid.n = 64;
    c.stepper.t_end = 50.0;
    c.init.set_epsilon(1e-3);
    c.diagnostics.m = 3;
    c.diagnostics.delta0 = DELTA0;
    c
}

fn decay_run(kind: ModelKind, linear: bool) -> ExperimentConfig {
    let mut c = ExperimentConfig::default();
    c.model.kind = kind;
    c.model.form = Form::Perturbation;
    c.grid.d = 2;
    c.grid.n = 512;
    c.grid.box_length = 400.0 * PI;
    c.stepper.scheme = Scheme::ImexRk2;
    c.stepper.dt = Some(0.5);
    c.stepper.t_end = 100.0;
    c.stepper.linear = linear;
    c.init = InitSpec::PowerProfile {
        epsilon: 1e-3,
        a: 0.5 - 1.0 + 0.1,
        k0: 1.0,
        seed: 1,
    };
    c.diagnostics.s = 0.5;
    c.diagnostics.l = vec![0.0, 1.0];
    c.diagnostics.fit_window = [10.0, 100.0];
    c.diagnostics.fit_tol = DECAY_TOL;
    c.output.every = 2;
    c
}

fn ls_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[test]
fn acceptance() {
    let mut rep = Report {
        failures: Vec::new(),
    };
    let mut mean_drifts: Vec<(String, f64)> = Vec::new();

    // 1
    let t0 = Instant::now();
    let o = oracle_smallgrid(2, 8, 0, Dealias::OneHalf).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let worst = o.terms.iter().map(|t| t.error).fold(0.0, f64::max);
    rep.line(
        1,
        "oracle equivalence",
        worst <= ORACLE_TOL && secs < ORACLE_SECONDS,
        format!(
            "{} terms, max rel error {worst:.2e} (tol {ORACLE_TOL:.0e}), {secs:.3} s",
            o.terms.len()
        ),
    );

    // 2
    let mut cfg = ExperimentConfig::default();
    cfg.model.form = Form::Primitive;
    cfg.grid.n = 32;
    cfg.checks.steady_steps = STEADY_STEPS;
    cfg.checks.steady_dt = STEADY_DT;
    let t0 = Instant::now();
    let dt = steady_drift(&cfg, ModelKind::Tt).unwrap();
    let dp = steady_drift(&cfg, ModelKind::Pptt).unwrap();
    rep.line(
        2,
        "steady-state fixedness",
        dt.max(dp) <= STEADY_TOL,
        format!("H3 drift tt {dt:.2e}, pptt {dp:.2e} after {STEADY_STEPS} steps (tol {STEADY_TOL:.0e}), {:.2} s", t0.elapsed().as_secs_f64()),
    );

    // 3
    let closed = |d: f64, m: f64| {
        let a = d / 2.0 + m - 1.0;
        (a - (a * a + 8.0 * m - 2.0 * d * m - 2.0 * d).sqrt()) / 2.0
    };
    let b33 = beta_exponent(3, 3).unwrap();
    let e23 = (beta_exponent(2, 3).unwrap() - closed(2.0, 3.0)).abs();
    let e34 = (beta_exponent(3, 4).unwrap() - closed(3.0, 4.0)).abs();
    rep.line(
        3,
        "beta exponent",
        b33 == 0.0 && e23 <= BETA_TOL && e34 <= BETA_TOL,
        format!(
            "beta(3,3) = {b33}, |beta(2,3) - closed| = {e23:.1e}, |beta(3,4) - closed| = {e34:.1e}"
        ),
    );

    // 4
    let mut cfg = ExperimentConfig::default();
    cfg.lab.trials = INTERP_TRIALS;
    let t0 = Instant::now();
    let (reports, single, pass) = interpolation_suite(&cfg).unwrap();
    let secs = t0.elapsed().as_secs_f64();
    let worst = reports.iter().map(|r| r.max_ratio).fold(0.0, f64::max);
    let dev = single
        .iter()
        .map(|v| v["max_deviation"].as_f64().unwrap())
        .fold(0.0, f64::max);
    rep.line(
        4,
        "interpolation suite",
        pass && secs < INTERP_SECONDS,
        format!("max ratio {worst:.12} over {INTERP_TRIALS} trials x 3 triples, single-mode deviation {dev:.1e}, {secs:.2} s"),
    );

    // 5
    let t0 = Instant::now();
    let out = run_in_memory(&small_run(ModelKind::Pptt)).unwrap();
    assert!(out.abort.is_none());
    let h3: Vec<f64> = out.records.iter().map(|r| r.h3).collect();
    let inc = max_rel_increase(&h3);
    mean_drifts.push(("pptt energy run".into(), mean_drift(&out.records)));
    rep.line(
        5,
        "PPTT energy monotonicity",
        inc <= MONOTONE_SLACK,
        format!(
            "{} outputs, H3 {:.3e} -> {:.3e}, max relative increase {inc:.2e} (slack {MONOTONE_SLACK:.0e}), {:.1} s",
            h3.len(),
            h3[0],
            h3[h3.len() - 1],
            t0.elapsed().as_secs_f64()
        ),
    );

    // 6
    let t0 = Instant::now();
    let out = run_in_memory(&small_run(ModelKind::Tt)).unwrap();
    assert!(out.abort.is_none());
    let phi: Vec<f64> = out.records.iter().map(|r| r.hypo).collect();
    let inc = max_rel_increase(&phi);
    let (lo, hi) = out
        .records
        .iter()
        .map(|r| r.hypo / (r.hm * r.hm))
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), q| {
            (a.min(q), b.max(q))
        });
    mean_drifts.push(("tt hypocoercivity run".into(), mean_drift(&out.records)));
    rep.line(
        6,
        "TT hypocoercivity functional",
        inc <= MONOTONE_SLACK && lo >= 1.0 - DELTA0 && hi <= 1.0 + DELTA0,
        format!(
            "max relative increase {inc:.2e}, functional / H3^2 in [{lo:.4}, {hi:.4}] (bounds [{}, {}]), {:.1} s",
            1.0 - DELTA0,
            1.0 + DELTA0,
            t0.elapsed().as_secs_f64()
        ),
    );

    // 7
    let t0 = Instant::now();
    let cfg = decay_run(ModelKind::Pptt, true);
    let out = run_in_memory(&cfg).unwrap();
    let (fits, _) = fits_report(&cfg, &out.records).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (f, nominal) in fits.iter().zip(NOMINAL_SLOPES) {
        let slope = f["sharp"]["slope"].as_f64().unwrap();
        let target = f["sharp"]["expected"].as_f64().unwrap();
        let ok = (slope - target).abs() <= DECAY_TOL * target.abs()
            && (slope - nominal).abs() <= DECAY_TOL * nominal.abs();
        pass &= ok;
        detail.push(format!(
            "l = {}: slope {slope:.4}, quadrature {target:.4}, nominal {nominal}",
            f["l"]
        ));
    }
    mean_drifts.push(("pptt linear decay run".into(), mean_drift(&out.records)));
    rep.line(
        7,
        "linear decay rate",
        pass,
        format!("{}; {:.1} s", detail.join("; "), t0.elapsed().as_secs_f64()),
    );

    // 8
    let mut pass = true;
    let mut detail = Vec::new();
    let t0 = Instant::now();
    for kind in [ModelKind::Pptt, ModelKind::Tt] {
        let cfg = decay_run(kind, false);
        let out = run_in_memory(&cfg).unwrap();
        let ok_run = out.abort.is_none();
        pass &= ok_run;
        let times: Vec<f64> = out.records.iter().map(|r| r.t).collect();
        for (i, l) in cfg.diagnostics.l.iter().enumerate() {
            let env: Vec<f64> = out.records.iter().map(|r| r.envelope[i]).collect();
            let (ok, worst) =
                envelope_bounded(&times, &env, (10.0, 100.0), ENVELOPE_FACTOR).unwrap();
            pass &= ok;
            detail.push(format!("{} l = {l}: max/at-10 {worst:.3}", kind.name()));
        }
        mean_drifts.push((
            format!("{} nonlinear decay run", kind.name()),
            mean_drift(&out.records),
        ));
    }
    rep.line(
        8,
        "nonlinear decay envelope",
        pass,
        format!(
            "{} (factor {ENVELOPE_FACTOR}); {:.1} s",
            detail.join(", "),
            t0.elapsed().as_secs_f64()
        ),
    );

    // 9
    let g = make_grid(2, 16, TAU, Dealias::OneHalf).unwrap();
    let s0 = make_initial_data(
        &g,
        &InitSpec::RandomSmall {
            epsilon: 1.0,
            k0: 4.0,
            seed: 3,
        },
        None,
    )
    .unwrap();
    let dts = [1e-2, 5e-3, 2.5e-3];
    let t_end = 1.0;
    let mut pass = true;
    let mut detail = Vec::new();
    for kind in [ModelKind::Pptt, ModelKind::Tt] {
        let model = Model::perturbation(kind);
        let exact = exact_linear_propagator(&s0, t_end, &model).unwrap();
        for scheme in [Scheme::ImexEuler, Scheme::ImexRk2] {
            let mut errs = Vec::new();
            for dt in dts {
                let st = Stepper::new(model, scheme, &g, dt)
                    .unwrap()
                    .linear_only(true);
                let (n, _) = uniform_steps(t_end, dt).unwrap();
                let mut s = s0.clone();
                let m0 = s.fields.density.mean();
                for _ in 0..n {
                    s = st.step(&s).unwrap();
                }
                mean_drifts.push((
                    format!("{} {} dt = {dt}", kind.name(), scheme.name()),
                    (s.fields.density.mean() - m0).abs(),
                ));
                let mut d = s.fields.clone();
                d.axpy(-1.0, &exact.fields);
                errs.push(hm_norm_fields(&d, 0).unwrap());
            }
            let x: Vec<f64> = dts.iter().map(|h: &f64| h.ln()).collect();
            let y: Vec<f64> = errs.iter().map(|e| e.ln()).collect();
            let order = ls_slope(&x, &y);
            let p = scheme.order() as f64;
            pass &= order >= p - ORDER_BAND.0 && order <= p + ORDER_BAND.1;
            detail.push(format!("{} {} {order:.3}", kind.name(), scheme.name()));
        }
    }
    rep.line(9, "scheme order", pass, detail.join(", "));

    // 10
    for kind in [ModelKind::Pptt, ModelKind::Tt] {
        let mut cfg = small_run(kind);
        cfg.grid.n = 32;
        cfg.stepper.dt = Some(0.01);
        cfg.stepper.t_end = 10.0;
        cfg.output.every = 50;
        let out = run_in_memory(&cfg).unwrap();
        assert_eq!(uniform_steps(10.0, 0.01).unwrap().0, 1000);
        mean_drifts.push((
            format!("{} 1000-step run", kind.name()),
            mean_drift(&out.records),
        ));
    }
    let (who, worst) = mean_drifts
        .iter()
        .cloned()
        .fold(
            (String::new(), 0.0),
            |acc, (n, v)| if v >= acc.1 { (n, v) } else { acc },
        );
    rep.line(
        10,
        "mean conservation",
        worst <= MEAN_TOL,
        format!(
            "{} runs, max |mean eta drift| {worst:.2e} ({who}), tol {MEAN_TOL:.0e}",
            mean_drifts.len()
        ),
    );

    assert!(
        rep.failures.is_empty(),
        "failed criteria: {:?}",
        rep.failures
    );
}
