use super::Form;
use crate::error::Result;
use crate::spectral::{Grid, SpectralScalar, SpectralVector};

/// Velocity and density coefficients, also used for tendencies.
#[derive(Debug, Clone)]
pub struct Fields {
    pub velocity: SpectralVector,
    pub density: SpectralScalar,
}

impl Fields {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            velocity: SpectralVector::zeros(grid),
            density: SpectralScalar::zeros(grid),
        }
    }

    pub fn new(velocity: SpectralVector, density: SpectralScalar) -> Result<Self> {
        velocity.grid().check_same(density.grid())?;
        Ok(Self { velocity, density })
    }

    pub fn grid(&self) -> &Grid {
        self.density.grid()
    }

    /// Number of scalar components, `d + 1`.
    pub fn width(&self) -> usize {
        self.velocity.components().len() + 1
    }

    pub fn component(&self, i: usize) -> &SpectralScalar {
        let d = self.velocity.components().len();
        if i < d {
            self.velocity.component(i)
        } else {
            &self.density
        }
    }

    pub fn component_mut(&mut self, i: usize) -> &mut SpectralScalar {
        let d = self.velocity.components().len();
        if i < d {
            &mut self.velocity.components_mut()[i]
        } else {
            &mut self.density
        }
    }

    pub fn scalars(&self) -> impl Iterator<Item = &SpectralScalar> {
        self.velocity
            .components()
            .iter()
            .chain(std::iter::once(&self.density))
    }

    pub fn scale(&mut self, a: f64) {
        self.velocity.scale(a);
        self.density.scale(a);
    }

    pub fn axpy(&mut self, a: f64, x: &Fields) {
        self.velocity.axpy(a, &x.velocity);
        self.density.axpy(a, &x.density);
    }

    pub fn max_abs_diff(&self, other: &Fields) -> f64 {
        self.velocity
            .max_abs_diff(&other.velocity)
            .max(self.density.max_abs_diff(&other.density))
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.scalars()
            .map(|s| s.hermitian_defect())
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.scalars().all(|s| {
            s.coeffs()
                .iter()
                .all(|c| c.re.is_finite() && c.im.is_finite())
        })
    }
}

#[derive(Debug, Clone)]
pub struct State {
    pub fields: Fields,
    pub t: f64,
    pub form: Form,
}

impl State {
    pub fn new(fields: Fields, t: f64, form: Form) -> Self {
        Self { fields, t, form }
    }

    pub fn zeros(grid: &Grid, form: Form) -> Self {
        Self::new(Fields::zeros(grid), 0.0, form)
    }

    pub fn grid(&self) -> &Grid {
        self.fields.grid()
    }
}
