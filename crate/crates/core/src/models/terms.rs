use super::{Fields, Form, Model, ModelKind};
use crate::error::Result;
use crate::spectral::{
    divergence, partial_derivative, ProductGrid, SpectralScalar, SpectralVector,
};

/// Individual nonlinear terms, each evaluated as the plain expression
/// (signs and coefficients are applied when assembling the tendency).
#[derive(Debug, Clone)]
pub struct NonlinearTerms {
    /// `u·∇u`
    pub advection: SpectralVector,
    /// `|u|^2 u`
    pub cubic: SpectralVector,
    /// `|u|^2`
    pub speed_sq: SpectralScalar,
    /// `(e1·u) u`
    pub ubar_u: SpectralVector,
    /// `η u`
    pub flux: SpectralVector,
    /// `∇·(η u)`
    pub density_flux: SpectralScalar,
    /// `u·∇(u·∇u)`
    pub nested: Option<SpectralVector>,
    /// `u·∇(∂1 u)`
    pub cross_a: Option<SpectralVector>,
    /// `∂1(u·∇u)`
    pub cross_b: Option<SpectralVector>,
}

struct Physical {
    advection: Vec<Vec<f64>>,
    cubic: Vec<Vec<f64>>,
    speed_sq: Vec<f64>,
    ubar_u: Vec<Vec<f64>>,
    flux: Vec<Vec<f64>>,
    nested: Option<Vec<Vec<f64>>>,
    cross_a: Option<Vec<Vec<f64>>>,
    cross_b: Option<Vec<Vec<f64>>>,
}

fn has_nested(model: &Model) -> bool {
    model.kind == ModelKind::Tt
}

fn has_cross(model: &Model) -> bool {
    model.kind == ModelKind::Tt && model.form == Form::Perturbation
}

fn physical(model: &Model, f: &Fields, pg: &ProductGrid) -> Result<Physical> {
    let d = f.grid().d();
    let u = &f.velocity;
    let mut spectral: Vec<SpectralScalar> = Vec::new();
    for i in 0..d {
        spectral.push(u.component(i).clone());
    }
    for i in 0..d {
        for j in 0..d {
            spectral.push(partial_derivative(u.component(i), j)?);
        }
    }
    spectral.push(f.density.clone());
    if has_cross(model) {
        for i in 0..d {
            let d1 = partial_derivative(u.component(i), 0)?;
            for j in 0..d {
                spectral.push(partial_derivative(&d1, j)?);
            }
        }
    }
    let refs: Vec<&SpectralScalar> = spectral.iter().collect();
    let mut phys = pg.to_physical(&refs).into_iter();
    let uu: Vec<Vec<f64>> = (0..d).map(|_| phys.next().unwrap()).collect();
    let du: Vec<Vec<f64>> = (0..d * d).map(|_| phys.next().unwrap()).collect();
    let eta = phys.next().unwrap();
    let dd1: Vec<Vec<f64>> = phys.collect();

    let np = pg.len();
    let mut advection = vec![vec![0.0; np]; d];
    let mut cubic = vec![vec![0.0; np]; d];
    let mut speed_sq = vec![0.0; np];
    let mut ubar_u = vec![vec![0.0; np]; d];
    let mut flux = vec![vec![0.0; np]; d];
    for p in 0..np {
        let mut s = 0.0;
        for c in uu.iter() {
            s += c[p] * c[p];
        }
        speed_sq[p] = s;
        for i in 0..d {
            let mut a = 0.0;
            for j in 0..d {
                a += uu[j][p] * du[i * d + j][p];
            }
            advection[i][p] = a;
            cubic[i][p] = s * uu[i][p];
            ubar_u[i][p] = uu[0][p] * uu[i][p];
            flux[i][p] = eta[p] * uu[i][p];
        }
    }

    let (mut nested, mut cross_a, mut cross_b) = (None, None, None);
    if has_nested(model) {
        // ∇w for w = u·∇u is taken spectrally on the product grid, two components per transform.
        let mut grad_w = vec![vec![Vec::new(); d]; d];
        for i0 in (0..d).step_by(2) {
            let second = (i0 + 1 < d).then(|| advection[i0 + 1].as_slice());
            let spec = pg.padded_spectrum(&advection[i0], second);
            for (j, gw) in (0..d).map(|j| (j, pg.derivative_samples(&spec, j))) {
                grad_w[i0][j] = gw.0;
                if i0 + 1 < d {
                    grad_w[i0 + 1][j] = gw.1;
                }
            }
        }
        let mut nst = vec![vec![0.0; np]; d];
        for i in 0..d {
            for p in 0..np {
                let mut a = 0.0;
                for j in 0..d {
                    a += uu[j][p] * grad_w[i][j][p];
                }
                nst[i][p] = a;
            }
        }
        nested = Some(nst);
        if has_cross(model) {
            let mut ca = vec![vec![0.0; np]; d];
            for i in 0..d {
                for p in 0..np {
                    let mut a = 0.0;
                    for j in 0..d {
                        a += uu[j][p] * dd1[i * d + j][p];
                    }
                    ca[i][p] = a;
                }
            }
            cross_a = Some(ca);
            cross_b = Some((0..d).map(|i| std::mem::take(&mut grad_w[i][0])).collect());
        }
    }
    Ok(Physical {
        advection,
        cubic,
        speed_sq,
        ubar_u,
        flux,
        nested,
        cross_a,
        cross_b,
    })
}

fn forward_vec(pg: &ProductGrid, v: &[Vec<f64>]) -> Result<SpectralVector> {
    let refs: Vec<&[f64]> = v.iter().map(|x| x.as_slice()).collect();
    SpectralVector::from_components(pg.from_physical(&refs))
}

pub(super) fn nonlinear_terms(model: &Model, f: &Fields) -> Result<NonlinearTerms> {
    let pg = ProductGrid::new(f.grid(), 3);
    let ph = physical(model, f, &pg)?;
    let flux = forward_vec(&pg, &ph.flux)?;
    let density_flux = divergence(&flux)?;
    Ok(NonlinearTerms {
        advection: forward_vec(&pg, &ph.advection)?,
        cubic: forward_vec(&pg, &ph.cubic)?,
        speed_sq: pg.from_physical(&[&ph.speed_sq]).remove(0),
        ubar_u: forward_vec(&pg, &ph.ubar_u)?,
        flux,
        density_flux,
        nested: ph
            .nested
            .as_ref()
            .map(|v| forward_vec(&pg, v))
            .transpose()?,
        cross_a: ph
            .cross_a
            .as_ref()
            .map(|v| forward_vec(&pg, v))
            .transpose()?,
        cross_b: ph
            .cross_b
            .as_ref()
            .map(|v| forward_vec(&pg, v))
            .transpose()?,
    })
}

impl NonlinearTerms {
    /// Combine terms into the nonlinear tendency of `model`.
    pub fn assemble(&self, model: &Model) -> Result<Fields> {
        let mut u = self.advection.clone();
        u.scale(-1.0);
        match model.form {
            Form::Perturbation => {
                u.axpy(-1.0, &self.cubic);
                u.components_mut()[0].axpy(-1.0, &self.speed_sq);
                u.axpy(-2.0, &self.ubar_u);
                for t in [&self.nested, &self.cross_a, &self.cross_b]
                    .into_iter()
                    .flatten()
                {
                    u.axpy(1.0, t);
                }
            }
            Form::Primitive => {
                u.axpy(-model.params.beta, &self.cubic);
                if let Some(t) = &self.nested {
                    u.axpy(1.0, t);
                }
            }
        }
        Fields::new(u, self.density_flux.scaled(-1.0))
    }
}

pub(super) fn fused_nonlinear(model: &Model, f: &Fields) -> Result<Fields> {
    let d = f.grid().d();
    let pg = ProductGrid::new(f.grid(), 3);
    let mut ph = physical(model, f, &pg)?;
    let np = pg.len();
    let beta = model.params.beta;
    let mut out = std::mem::take(&mut ph.advection);
    for i in 0..d {
        let o = &mut out[i];
        let cubic = &ph.cubic[i];
        match model.form {
            Form::Perturbation => {
                let ub = &ph.ubar_u[i];
                for p in 0..np {
                    o[p] = -o[p] - cubic[p] - 2.0 * ub[p];
                }
                if i == 0 {
                    for p in 0..np {
                        o[p] -= ph.speed_sq[p];
                    }
                }
                for t in [&ph.nested, &ph.cross_a, &ph.cross_b].into_iter().flatten() {
                    for p in 0..np {
                        o[p] += t[i][p];
                    }
                }
            }
            Form::Primitive => {
                for p in 0..np {
                    o[p] = -o[p] - beta * cubic[p];
                }
                if let Some(t) = &ph.nested {
                    for p in 0..np {
                        o[p] += t[i][p];
                    }
                }
            }
        }
    }
    let mut all: Vec<&[f64]> = out.iter().map(|v| v.as_slice()).collect();
    all.extend(ph.flux.iter().map(|v| v.as_slice()));
    let mut spec = pg.from_physical(&all);
    let flux = SpectralVector::from_components(spec.split_off(d))?;
    let u = SpectralVector::from_components(spec)?;
    Fields::new(u, divergence(&flux)?.scaled(-1.0))
}
