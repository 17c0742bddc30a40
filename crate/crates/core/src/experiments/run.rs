use std::path::PathBuf;

use super::config::ExperimentConfig;
use super::config::InitSpec;
use super::init::make_initial_data;
use super::io::{write_checkpoint, write_series, TimeSeriesRecord};
use crate::diagnostics::{
    energy_ledger, envelope, fill_ledger_rates, fit_decay, hdot_norm_fields, hdot_norm_mean_free,
    hm_norm_fields, hypocoercivity_functional, linear_decay_slope, ubar_l2, DecayFitResult,
    OrderLedger,
};
use crate::error::{Error, Result};
use crate::models::{steady_state, Fields, Form, Model, State};
use crate::spectral::{make_grid, transform_inverse, Grid};
use crate::timestepper::{integrate, uniform_steps, LinearPropagator};

pub struct RunOutcome {
    pub records: Vec<TimeSeriesRecord>,
    pub final_state: State,
    pub dt_used: f64,
    /// Numerical abort, if the run stopped early.
    pub abort: Option<Error>,
}

pub struct RunSummary {
    pub records: Vec<TimeSeriesRecord>,
    pub final_state: State,
    pub dt_used: f64,
    pub meets_theorem_hypothesis: bool,
    pub series_path: PathBuf,
    pub checkpoint_path: Option<PathBuf>,
}

pub fn build_grid(cfg: &ExperimentConfig) -> Result<Grid> {
    make_grid(
        cfg.grid.d,
        cfg.grid.n,
        cfg.grid.box_length,
        cfg.grid.dealias,
    )
}

/// Step from the advective estimate `cfl / (speed k_max)`, unless fixed in the config.
pub fn choose_dt(cfg: &ExperimentConfig, state: &State) -> Result<f64> {
    if let Some(dt) = cfg.stepper.dt {
        return Ok(dt);
    }
    let g = state.grid();
    let mut sup = 0.0f64;
    for c in state.fields.velocity.components() {
        let v = transform_inverse(c)?;
        sup = sup.max(v.iter().map(|x| x.abs()).fold(0.0, f64::max));
    }
    let speed = match state.form {
        Form::Perturbation => 1.0 + sup,
        Form::Primitive => sup.max(1e-300),
    };
    let kmax = g.retained_max() as f64 * g.fundamental();
    Ok(cfg.stepper.cfl / (speed * kmax))
}

/// Initial state: perturbation data, or the steady state plus that perturbation
/// (scaled by the steady speed) in primitive form.
pub fn initial_state(cfg: &ExperimentConfig, grid: &Grid) -> Result<State> {
    let pert = make_initial_data(grid, &cfg.init, Some(cfg.diagnostics.s))?;
    match cfg.model.form {
        Form::Perturbation => Ok(pert),
        Form::Primitive => {
            let mut s = steady_state(grid, &cfg.model.params())?;
            let speed = cfg.model.params().speed();
            s.fields.velocity.axpy(speed, &pert.fields.velocity);
            s.fields
                .density
                .axpy(cfg.model.params().density, &pert.fields.density);
            Ok(s)
        }
    }
}

fn deviation(cfg: &ExperimentConfig, state: &State) -> Result<Fields> {
    match state.form {
        Form::Perturbation => Ok(state.fields.clone()),
        Form::Primitive => {
            let s = steady_state(state.grid(), &cfg.model.params())?;
            let mut f = state.fields.clone();
            f.axpy(-1.0, &s.fields);
            Ok(f)
        }
    }
}

pub fn make_record(
    cfg: &ExperimentConfig,
    model: &Model,
    state: &State,
) -> Result<(TimeSeriesRecord, Vec<OrderLedger>)> {
    let dg = &cfg.diagnostics;
    let f = deviation(cfg, state)?;
    let t = state.t;
    let hdot_l: Vec<f64> =
        dg.l.iter()
            .map(|&l| hdot_norm_fields(&f, l))
            .collect::<Result<_>>()?;
    let env =
        dg.l.iter()
            .zip(&hdot_l)
            .map(|(&l, &v)| envelope(v, t, dg.s, l))
            .collect();
    let ledger = if !dg.ledger_orders.is_empty() && model.form == Form::Perturbation {
        energy_ledger(model, &f, &dg.ledger_orders)?
    } else {
        Vec::new()
    };
    let rec = TimeSeriesRecord {
        t,
        h3: hm_norm_fields(&f, 3)?,
        hm: hm_norm_fields(&f, dg.m)?,
        hdot_minus_s: hdot_norm_mean_free(&f, -dg.s)?,
        hdot_l,
        ubar_l2: ubar_l2(&f)?,
        hypo: hypocoercivity_functional(&f, dg.m, dg.delta0)?,
        envelope: env,
        mean_eta: state.fields.density.mean(),
        ledger: Default::default(),
    };
    Ok((rec, ledger))
}

/// Run the configured experiment without touching the filesystem.
pub fn run_in_memory(cfg: &ExperimentConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let grid = build_grid(cfg)?;
    let state = initial_state(cfg, &grid)?;
    run_from(cfg, state)
}

pub fn run_from(cfg: &ExperimentConfig, state: State) -> Result<RunOutcome> {
    let model = cfg.model.model();
    let dt = choose_dt(cfg, &state)?;
    let (nsteps, dt_used) = uniform_steps(cfg.stepper.t_end - state.t, dt)?;
    let mut records = Vec::new();
    let mut ledgers = Vec::new();
    let mut last = state.clone();
    let every = cfg.output.every;
    let mut observe = |s: &State| -> Result<()> {
        let (r, l) = make_record(cfg, &model, s)?;
        records.push(r);
        ledgers.push(l);
        last = s.clone();
        Ok(())
    };
    let abort = if cfg.stepper.linear {
        linear_run(&model, &state, nsteps, dt_used, every, &mut observe).err()
    } else {
        integrate(
            &state,
            cfg.stepper.t_end,
            dt,
            cfg.stepper.scheme,
            &model,
            every,
            false,
            &mut observe,
        )
        .err()
    };
    if let Some(e) = &abort {
        if !matches!(
            e,
            Error::BlowUp { .. } | Error::SolveSingular { .. } | Error::NotReal(_)
        ) {
            return Err(abort.unwrap());
        }
    }
    if !ledgers.is_empty() && !ledgers[0].is_empty() {
        let times: Vec<f64> = records.iter().map(|r| r.t).collect();
        fill_ledger_rates(&times, &mut ledgers);
        for (r, l) in records.iter_mut().zip(&ledgers) {
            for o in l {
                r.ledger.extend(o.entries());
            }
        }
    }
    Ok(RunOutcome {
        records,
        final_state: last,
        dt_used,
        abort,
    })
}

fn linear_run(
    model: &Model,
    state: &State,
    nsteps: usize,
    dt: f64,
    every: usize,
    observe: &mut impl FnMut(&State) -> Result<()>,
) -> Result<()> {
    observe(state)?;
    if nsteps == 0 {
        return Ok(());
    }
    let t0 = state.t;
    let full = LinearPropagator::new(model, state.grid(), dt * every as f64)?;
    let mut cur = state.clone();
    let mut done = 0usize;
    while done + every <= nsteps {
        cur = full.advance(&cur);
        done += every;
        cur.t = t0 + done as f64 * dt;
        observe(&cur)?;
    }
    if done < nsteps {
        let rest = LinearPropagator::new(model, state.grid(), dt * (nsteps - done) as f64)?;
        cur = rest.advance(&cur);
        cur.t = t0 + nsteps as f64 * dt;
        observe(&cur)?;
    }
    Ok(())
}

pub fn series_header(cfg: &ExperimentConfig, dt_used: f64) -> serde_json::Value {
    serde_json::json!({
        "format": "tt-flock series",
        "version": 1,
        "config": cfg,
        "dt_used": dt_used,
        "meets_theorem_hypothesis": cfg.meets_theorem_hypothesis(),
    })
}

/// Run and write the series (always) and the final checkpoint (on success).
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let out = run_in_memory(cfg)?;
    let dir = &cfg.output.dir;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let series_path = dir.join(&cfg.output.series);
    write_series(&series_path, &series_header(cfg, out.dt_used), &out.records)?;
    if let Some(e) = out.abort {
        return Err(e);
    }
    let checkpoint_path = match &cfg.output.checkpoint {
        Some(name) if out.final_state.form == Form::Perturbation => {
            let p = dir.join(name);
            write_checkpoint(&p, &out.final_state)?;
            Some(p)
        }
        _ => None,
    };
    Ok(RunSummary {
        records: out.records,
        final_state: out.final_state,
        dt_used: out.dt_used,
        meets_theorem_hypothesis: cfg.meets_theorem_hypothesis(),
        series_path,
        checkpoint_path,
    })
}

/// Fit `‖Λ^l (u,η)‖` from a series against the predicted rate `-(s+l)/2`.
pub fn fit_series(
    records: &[TimeSeriesRecord],
    l_index: usize,
    s: f64,
    l: f64,
    window: (f64, f64),
    tol: f64,
) -> Result<DecayFitResult> {
    fit_series_against(records, l_index, -(s + l) / 2.0, window, tol)
}

/// Linear decay slope of `‖Λ^l (u,η)‖` for power-profile data, by quadrature.
/// `None` for other initial data, where no sharp rate is available.
pub fn sharp_target(cfg: &ExperimentConfig, l: f64) -> Result<Option<f64>> {
    match cfg.init {
        InitSpec::PowerProfile { a, k0, .. } => {
            let w = (cfg.diagnostics.fit_window[0], cfg.diagnostics.fit_window[1]);
            linear_decay_slope(cfg.model.kind, cfg.grid.d, a, k0, l, w).map(Some)
        }
        _ => Ok(None),
    }
}

pub fn fit_series_against(
    records: &[TimeSeriesRecord],
    l_index: usize,
    expected: f64,
    window: (f64, f64),
    tol: f64,
) -> Result<DecayFitResult> {
    let t: Vec<f64> = records.iter().map(|r| r.t).collect();
    let v: Vec<f64> = records
        .iter()
        .map(|r| {
            r.hdot_l.get(l_index).copied().ok_or_else(|| {
                Error::Fit(format!("record at t = {} has no l index {l_index}", r.t))
            })
        })
        .collect::<Result<_>>()?;
    fit_decay(&t, &v, window, expected, tol)
}
