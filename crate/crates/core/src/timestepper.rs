//! IMEX Runge-Kutta integration and the exact linear propagator.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics::hm_norm_fields;
use crate::error::{Error, Result};
use crate::models::{Fields, ModeMatrix, Model, State};
use crate::spectral::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    ImexEuler,
    ImexRk2,
    ImexRk3,
}

impl Scheme {
    pub fn order(self) -> u32 {
        match self {
            Scheme::ImexEuler => 1,
            Scheme::ImexRk2 => 2,
            Scheme::ImexRk3 => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Scheme::ImexEuler => "imex-euler",
            Scheme::ImexRk2 => "imex-rk2",
            Scheme::ImexRk3 => "imex-rk3",
        }
    }
}

impl std::str::FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "imex-euler" => Ok(Scheme::ImexEuler),
            "imex-rk2" => Ok(Scheme::ImexRk2),
            "imex-rk3" => Ok(Scheme::ImexRk3),
            other => Err(Error::InvalidParameter(format!("unknown scheme {other:?}"))),
        }
    }
}

/// Butcher pair with an explicit first stage and a constant implicit diagonal.
#[derive(Debug, Clone)]
pub struct Tableau {
    pub implicit: Vec<Vec<f64>>,
    pub explicit: Vec<Vec<f64>>,
    pub b_implicit: Vec<f64>,
    pub b_explicit: Vec<f64>,
    pub diagonal: f64,
}

impl Tableau {
    pub fn of(scheme: Scheme) -> Self {
        match scheme {
            Scheme::ImexEuler => Self {
                implicit: vec![vec![0.0, 0.0], vec![0.0, 1.0]],
                explicit: vec![vec![0.0, 0.0], vec![1.0, 0.0]],
                b_implicit: vec![0.0, 1.0],
                b_explicit: vec![1.0, 0.0],
                diagonal: 1.0,
            },
            Scheme::ImexRk2 => {
                let g = 1.0 - 0.5f64.sqrt();
                let dl = 1.0 - 1.0 / (2.0 * g);
                Self {
                    implicit: vec![
                        vec![0.0, 0.0, 0.0],
                        vec![0.0, g, 0.0],
                        vec![0.0, 1.0 - g, g],
                    ],
                    explicit: vec![
                        vec![0.0, 0.0, 0.0],
                        vec![g, 0.0, 0.0],
                        vec![dl, 1.0 - dl, 0.0],
                    ],
                    b_implicit: vec![0.0, 1.0 - g, g],
                    b_explicit: vec![dl, 1.0 - dl, 0.0],
                    diagonal: g,
                }
            }
            Scheme::ImexRk3 => {
                let g = 0.435_866_521_508_459;
                let b1 = -1.5 * g * g + 4.0 * g - 0.25;
                let b2 = 1.5 * g * g - 5.0 * g + 1.25;
                let a31 = 0.321_278_886_0;
                let a32 = 0.5 * (1.0 + g) - a31;
                let a42 = 0.552_929_147_9;
                let a41 = 1.0 - 2.0 * a42;
                Self {
                    implicit: vec![
                        vec![0.0; 4],
                        vec![0.0, g, 0.0, 0.0],
                        vec![0.0, 0.5 * (1.0 - g), g, 0.0],
                        vec![0.0, b1, b2, g],
                    ],
                    explicit: vec![
                        vec![0.0; 4],
                        vec![g, 0.0, 0.0, 0.0],
                        vec![a31, a32, 0.0, 0.0],
                        vec![a41, a42, a42, 0.0],
                    ],
                    b_implicit: vec![0.0, b1, b2, g],
                    b_explicit: vec![0.0, b1, b2, g],
                    diagonal: g,
                }
            }
        }
    }

    pub fn stages(&self) -> usize {
        self.b_implicit.len()
    }

    fn stiffly_accurate(&self) -> bool {
        let s = self.stages();
        self.implicit[s - 1] == self.b_implicit && self.explicit[s - 1] == self.b_explicit
    }
}

const SINGULAR_TOL: f64 = 1e-12;

/// Fixed-step IMEX integrator with implicit inverses cached for one `dt`.
pub struct Stepper {
    model: Model,
    grid: Grid,
    tableau: Tableau,
    dt: f64,
    inverses: Vec<ModeMatrix>,
    matrices: Vec<ModeMatrix>,
    nyquist: Vec<bool>,
    linear_only: bool,
}

fn gather(f: &Fields, i: usize, x: &mut [Complex64]) {
    for (c, slot) in x.iter_mut().enumerate() {
        *slot = f.component(c).coeffs()[i];
    }
}

fn scatter(f: &mut Fields, i: usize, x: &[Complex64]) {
    for (c, v) in x.iter().enumerate() {
        f.component_mut(c).coeffs_mut()[i] = *v;
    }
}

impl Stepper {
    pub fn new(model: Model, scheme: Scheme, grid: &Grid, dt: f64) -> Result<Self> {
        if !(dt.is_finite() && dt > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "time step {dt} must be positive"
            )));
        }
        let tableau = Tableau::of(scheme);
        let a = tableau.diagonal * dt;
        let mut inverses = Vec::with_capacity(grid.len());
        let matrices: Vec<ModeMatrix> = (0..grid.len())
            .map(|i| model.mode_matrix(grid, i))
            .collect();
        for (i, mm) in matrices.iter().enumerate() {
            let m = mm.shifted_identity(a);
            match m.inverse(SINGULAR_TOL) {
                Some(inv) => inverses.push(inv),
                None => {
                    return Err(Error::SolveSingular {
                        mode: i,
                        pivot: m.min_pivot(),
                    })
                }
            }
        }
        Ok(Self {
            model,
            grid: grid.clone(),
            tableau,
            dt,
            inverses,
            matrices,
            nyquist: (0..grid.len()).map(|i| grid.is_nyquist(i)).collect(),
            linear_only: false,
        })
    }

    /// Drop the nonlinear tendency, integrating only the linear part.
    pub fn linear_only(mut self, yes: bool) -> Self {
        self.linear_only = yes;
        self
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn model(&self) -> &Model {
        &self.model
    }

    fn apply_linear(&self, f: &Fields) -> Fields {
        let w = f.width();
        let mut out = Fields::zeros(&self.grid);
        let mut x = [Complex64::default(); 4];
        let mut y = [Complex64::default(); 4];
        for i in 0..self.grid.len() {
            gather(f, i, &mut x[..w]);
            self.matrices[i].apply(&x[..w], &mut y[..w]);
            scatter(&mut out, i, &y[..w]);
        }
        out
    }

    fn nonlinear(&self, f: &Fields) -> Result<Fields> {
        if self.linear_only {
            Ok(Fields::zeros(&self.grid))
        } else {
            self.model.nonlinear(f)
        }
    }

    pub fn step_fields(&self, y: &Fields) -> Result<Fields> {
        let tab = &self.tableau;
        let s = tab.stages();
        let dt = self.dt;
        let w = y.width();
        let mut ys: Vec<Fields> = Vec::with_capacity(s);
        let mut ly: Vec<Option<Fields>> = Vec::with_capacity(s);
        let mut ny: Vec<Option<Fields>> = Vec::with_capacity(s);
        let mut y0 = y.clone();
        for i in 0..self.grid.len() {
            if self.nyquist[i] {
                scatter(&mut y0, i, &[Complex64::default(); 4][..w]);
            }
        }
        ys.push(y0);
        let stiff = tab.stiffly_accurate();
        let needs_l = |j: usize| {
            (j + 1..s).any(|i| tab.implicit[i][j] != 0.0) || (!stiff && tab.b_implicit[j] != 0.0)
        };
        let needs_n = |j: usize| {
            (j + 1..s).any(|i| tab.explicit[i][j] != 0.0) || (!stiff && tab.b_explicit[j] != 0.0)
        };
        let mut x = [Complex64::default(); 4];
        let mut t = [Complex64::default(); 4];
        let mut r = [Complex64::default(); 4];
        for st in 0..s {
            if st > 0 {
                let mut next = Fields::zeros(&self.grid);
                for i in 0..self.grid.len() {
                    if self.nyquist[i] {
                        continue;
                    }
                    gather(y, i, &mut r[..w]);
                    for j in 0..st {
                        let (a, ah) = (tab.implicit[st][j], tab.explicit[st][j]);
                        if a != 0.0 {
                            gather(ly[j].as_ref().unwrap(), i, &mut t[..w]);
                            for c in 0..w {
                                r[c] += dt * a * t[c];
                            }
                        }
                        if ah != 0.0 {
                            gather(ny[j].as_ref().unwrap(), i, &mut t[..w]);
                            for c in 0..w {
                                r[c] += dt * ah * t[c];
                            }
                        }
                    }
                    self.inverses[i].apply(&r[..w], &mut x[..w]);
                    scatter(&mut next, i, &x[..w]);
                }
                ys.push(next);
            }
            let cur = &ys[st];
            ly.push(needs_l(st).then(|| self.apply_linear(cur)));
            ny.push(if needs_n(st) {
                Some(self.nonlinear(cur)?)
            } else {
                None
            });
        }
        if stiff {
            return Ok(ys.pop().unwrap());
        }
        let mut out = y.clone();
        for j in 0..s {
            if tab.b_implicit[j] != 0.0 {
                out.axpy(dt * tab.b_implicit[j], ly[j].as_ref().unwrap());
            }
            if tab.b_explicit[j] != 0.0 {
                out.axpy(dt * tab.b_explicit[j], ny[j].as_ref().unwrap());
            }
        }
        Ok(out)
    }

    pub fn step(&self, state: &State) -> Result<State> {
        Ok(State {
            fields: self.step_fields(&state.fields)?,
            t: state.t + self.dt,
            form: state.form,
        })
    }
}

/// One IMEX step of size `dt`.
pub fn imex_step(state: &State, dt: f64, scheme: Scheme, model: &Model) -> Result<State> {
    Stepper::new(*model, scheme, state.grid(), dt)?.step(state)
}

/// Number of uniform steps covering `t_end` with steps no longer than `dt`.
pub fn uniform_steps(t_end: f64, dt: f64) -> Result<(usize, f64)> {
    if !(t_end.is_finite() && t_end >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "end time {t_end} must be non-negative"
        )));
    }
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "time step {dt} must be positive"
        )));
    }
    if t_end == 0.0 {
        return Ok((0, dt));
    }
    let n = ((t_end / dt) * (1.0 - 1e-12)).ceil().max(1.0) as usize;
    Ok((n, t_end / n as f64))
}

/// Growth factor over the initial H^3 norm that counts as blow-up.
pub const BLOWUP_FACTOR: f64 = 1e3;

/// Integrate to `t_end`, calling `observer` at step 0, every `output_every`
/// steps and at the final step.
pub fn integrate<F>(
    state: &State,
    t_end: f64,
    dt: f64,
    scheme: Scheme,
    model: &Model,
    output_every: usize,
    linear_only: bool,
    mut observer: F,
) -> Result<State>
where
    F: FnMut(&State) -> Result<()>,
{
    if output_every == 0 {
        return Err(Error::InvalidParameter(
            "output_every must be at least 1".into(),
        ));
    }
    let (nsteps, dt_used) = uniform_steps(t_end - state.t, dt)?;
    let mut cur = state.clone();
    observer(&cur)?;
    if nsteps == 0 {
        return Ok(cur);
    }
    let stepper = Stepper::new(*model, scheme, state.grid(), dt_used)?.linear_only(linear_only);
    let h0 = hm_norm_fields(&cur.fields, 3)?;
    let ceiling = if h0 > 0.0 {
        BLOWUP_FACTOR * h0
    } else {
        f64::INFINITY
    };
    let t0 = state.t;
    for step in 1..=nsteps {
        let mut next = stepper.step(&cur)?;
        next.t = t0 + step as f64 * dt_used;
        let h = hm_norm_fields(&next.fields, 3)?;
        if !h.is_finite() || h > ceiling {
            return Err(Error::BlowUp {
                t: next.t,
                norm: h,
                ceiling,
            });
        }
        cur = next;
        if step % output_every == 0 || step == nsteps {
            observer(&cur)?;
        }
    }
    Ok(cur)
}

/// Per-mode `exp(dt M(k))` for repeated application at a fixed interval.
pub struct LinearPropagator {
    grid: Grid,
    dt: f64,
    matrices: Vec<Option<ModeMatrix>>,
}

impl LinearPropagator {
    pub fn new(model: &Model, grid: &Grid, dt: f64) -> Result<Self> {
        if !dt.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "propagation time {dt} is not finite"
            )));
        }
        let mut matrices = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            let c = grid.conj_index(i);
            if grid.is_nyquist(i) || c < i {
                matrices.push(None);
            } else {
                matrices.push(Some(model.mode_matrix(grid, i).exp(dt)));
            }
        }
        Ok(Self {
            grid: grid.clone(),
            dt,
            matrices,
        })
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn apply(&self, f: &Fields) -> Fields {
        let w = f.width();
        let mut out = Fields::zeros(&self.grid);
        let mut x = [Complex64::default(); 4];
        let mut y = [Complex64::default(); 4];
        for i in 0..self.grid.len() {
            let Some(p) = &self.matrices[i] else { continue };
            gather(f, i, &mut x[..w]);
            p.apply(&x[..w], &mut y[..w]);
            scatter(&mut out, i, &y[..w]);
            let c = self.grid.conj_index(i);
            if c != i {
                gather(f, c, &mut x[..w]);
                p.conj().apply(&x[..w], &mut y[..w]);
                scatter(&mut out, c, &y[..w]);
            }
        }
        out
    }

    pub fn advance(&self, state: &State) -> State {
        State {
            fields: self.apply(&state.fields),
            t: state.t + self.dt,
            form: state.form,
        }
    }
}

/// Exact solution of the linearized equations after time `t`.
pub fn exact_linear_propagator(state: &State, t: f64, model: &Model) -> Result<State> {
    if t == 0.0 {
        return Ok(state.clone());
    }
    Ok(LinearPropagator::new(model, state.grid(), t)?.advance(state))
}
