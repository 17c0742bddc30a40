//! Toner-Tu (TT) and parabolic-parabolic Toner-Tu (PPTT) right-hand sides.

mod fields;
mod linear;
mod terms;

pub use fields::{Fields, State};
pub use linear::ModeMatrix;
pub use terms::NonlinearTerms;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::spectral::{
    divergence, gradient, laplacian, partial_derivative, Grid, SpectralScalar, SpectralVector,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Tt,
    Pptt,
}

impl ModelKind {
    pub fn name(self) -> &'static str {
        match self {
            ModelKind::Tt => "tt",
            ModelKind::Pptt => "pptt",
        }
    }
}

/// Whether the fields are the perturbation `(u, η)` about the normalized
/// steady state or the original `(v, ρ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Form {
    Perturbation,
    Primitive,
}

/// Coefficients of the primitive equations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ModelParams {
    pub alpha: f64,
    pub beta: f64,
    pub pressure: f64,
    pub density: f64,
    pub direction: [f64; 3],
}

impl Default for ModelParams {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            beta: 1.0,
            pressure: 1.0,
            density: 1.0,
            direction: [1.0, 0.0, 0.0],
        }
    }
}

impl ModelParams {
    pub fn validate(&self, d: usize) -> Result<()> {
        if !(self.alpha > 0.0 && self.beta > 0.0) {
            return Err(Error::InvalidParameter(
                "alpha and beta must be positive".into(),
            ));
        }
        if !(self.pressure > 0.0 && self.density > 0.0) {
            return Err(Error::InvalidParameter(
                "pressure and density must be positive".into(),
            ));
        }
        let norm: f64 = self.direction[..d]
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        if (norm - 1.0).abs() > 1e-12 || self.direction[d..].iter().any(|&x| x != 0.0) {
            return Err(Error::InvalidParameter(
                "direction must be a unit vector in R^d".into(),
            ));
        }
        Ok(())
    }

    pub fn speed(&self) -> f64 {
        (self.alpha / self.beta).sqrt()
    }
}

/// A model together with the form its fields are written in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Model {
    pub kind: ModelKind,
    pub form: Form,
    pub params: ModelParams,
}

impl Model {
    pub fn perturbation(kind: ModelKind) -> Self {
        Self {
            kind,
            form: Form::Perturbation,
            params: ModelParams::default(),
        }
    }

    pub fn primitive(kind: ModelKind, params: ModelParams) -> Self {
        Self {
            kind,
            form: Form::Primitive,
            params,
        }
    }

    /// Linear constant-coefficient part at the mode `flat`.
    pub fn mode_matrix(&self, grid: &Grid, flat: usize) -> ModeMatrix {
        let k = grid.kvec(flat);
        match self.form {
            Form::Perturbation => ModeMatrix::perturbation(&k[..grid.d()], self.kind),
            Form::Primitive => ModeMatrix::primitive(&k[..grid.d()], self.kind, &self.params),
        }
    }

    pub fn terms(&self, f: &Fields) -> Result<NonlinearTerms> {
        terms::nonlinear_terms(self, f)
    }

    /// Nonlinear remainder `rhs - L x`.
    pub fn nonlinear(&self, f: &Fields) -> Result<Fields> {
        terms::fused_nonlinear(self, f)
    }

    /// Full tendency, with the linear part assembled from differential operators.
    pub fn rhs(&self, f: &Fields) -> Result<Fields> {
        let mut out = self.nonlinear(f)?;
        let lin = self.linear_operator(f)?;
        out.axpy(1.0, &lin);
        Ok(out)
    }

    fn linear_operator(&self, f: &Fields) -> Result<Fields> {
        let g = f.grid().clone();
        let d = g.d();
        let u = &f.velocity;
        let eta = &f.density;
        let grad_div = gradient(&divergence(u)?)?;
        let grad_eta = gradient(eta)?;
        let mut comps = Vec::with_capacity(d);
        for i in 0..d {
            let ui = u.component(i);
            let mut c = laplacian(ui);
            c.axpy(1.0, grad_div.component(i));
            match self.form {
                Form::Perturbation => {
                    c.axpy(-1.0, grad_eta.component(i));
                    c.axpy(-1.0, &partial_derivative(ui, 0)?);
                    if i == 0 {
                        c.axpy(-2.0, ui);
                    }
                    if self.kind == ModelKind::Tt {
                        c.axpy(1.0, &partial_derivative(&partial_derivative(ui, 0)?, 0)?);
                    }
                }
                Form::Primitive => {
                    c.axpy(-self.params.pressure, grad_eta.component(i));
                    c.axpy(self.params.alpha, ui);
                }
            }
            comps.push(c);
        }
        let mut rho = SpectralScalar::zeros(&g);
        match self.form {
            Form::Perturbation => {
                rho.axpy(-1.0, &divergence(u)?);
                rho.axpy(-1.0, &partial_derivative(eta, 0)?);
                if self.kind == ModelKind::Pptt {
                    rho.axpy(1.0, &laplacian(eta));
                }
            }
            Form::Primitive => {
                if self.kind == ModelKind::Pptt {
                    rho.axpy(1.0, &laplacian(eta));
                }
            }
        }
        Ok(Fields {
            velocity: SpectralVector::from_components(comps)?,
            density: rho,
        })
    }

    pub fn rhs_state(&self, s: &State) -> Result<Fields> {
        if s.form != self.form {
            return Err(Error::InvalidParameter(format!(
                "{:?} state given to a {:?} model",
                s.form, self.form
            )));
        }
        self.rhs(&s.fields)
    }
}

pub fn rhs_tt_perturbed(s: &State) -> Result<Fields> {
    Model::perturbation(ModelKind::Tt).rhs_state(s)
}

pub fn rhs_pptt_perturbed(s: &State) -> Result<Fields> {
    Model::perturbation(ModelKind::Pptt).rhs_state(s)
}

pub fn rhs_primitive(s: &State, kind: ModelKind, params: &ModelParams) -> Result<Fields> {
    params.validate(s.fields.grid().d())?;
    Model::primitive(kind, *params).rhs_state(s)
}

/// Mode matrix of the perturbation equations at wavevector `k`.
pub fn mode_matrix(k: &[f64], kind: ModelKind) -> ModeMatrix {
    ModeMatrix::perturbation(k, kind)
}

/// Constant steady state `(ρ_s, sqrt(α/β) e)` in primitive form.
pub fn steady_state(grid: &Grid, params: &ModelParams) -> Result<State> {
    params.validate(grid.d())?;
    let mut f = Fields::zeros(grid);
    let speed = params.speed();
    for i in 0..grid.d() {
        f.velocity.components_mut()[i].coeffs_mut()[0].re = speed * params.direction[i];
    }
    f.density.coeffs_mut()[0].re = params.density;
    Ok(State {
        fields: f,
        t: 0.0,
        form: Form::Primitive,
    })
}
