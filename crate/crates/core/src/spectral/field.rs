use num_complex::Complex64;

use super::fft::{fft_nd, Direction};
use super::grid::{signed_index, Grid};
use crate::error::{Error, Result};

/// Fourier coefficients of a real scalar field; the zero coefficient is the mean.
#[derive(Debug, Clone)]
pub struct SpectralScalar {
    grid: Grid,
    coeffs: Vec<Complex64>,
}

impl SpectralScalar {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            grid: grid.clone(),
            coeffs: vec![Complex64::default(); grid.len()],
        }
    }

    pub fn from_coeffs(grid: &Grid, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.len() != grid.len() {
            return Err(Error::GridMismatch(format!(
                "{} coefficients for a grid of {}",
                coeffs.len(),
                grid.len()
            )));
        }
        Ok(Self {
            grid: grid.clone(),
            coeffs,
        })
    }

    /// Single real Fourier mode `amp * cos(k.x + phase)` at signed index `m`.
    pub fn single_mode(grid: &Grid, m: &[i64], amp: f64, phase: f64) -> Result<Self> {
        let mut f = Self::zeros(grid);
        let p = grid
            .flat_of(m)
            .ok_or_else(|| Error::InvalidParameter(format!("mode {m:?} is off the grid")))?;
        let c = grid.conj_index(p);
        if p == c {
            f.coeffs[p] = Complex64::new(amp * phase.cos(), 0.0);
        } else {
            f.coeffs[p] = Complex64::from_polar(0.5 * amp, phase);
            f.coeffs[c] = f.coeffs[p].conj();
        }
        Ok(f)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Complex64> {
        self.coeffs
    }

    pub fn mean(&self) -> f64 {
        self.coeffs[0].re
    }

    /// `sqrt(sum |c_k|^2)`, i.e. the L2 norm divided by `L^{d/2}`.
    pub fn coeff_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Largest `|c_k - conj(c_{-k})|` over non-Nyquist modes.
    pub fn hermitian_defect(&self) -> f64 {
        let g = &self.grid;
        (0..g.len())
            .filter(|&i| !g.is_nyquist(i))
            .map(|i| (self.coeffs[i] - self.coeffs[g.conj_index(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn scale(&mut self, a: f64) {
        self.coeffs.iter_mut().for_each(|c| *c *= a);
    }

    pub fn scaled(&self, a: f64) -> Self {
        let mut out = self.clone();
        out.scale(a);
        out
    }

    /// `self += a * x`
    pub fn axpy(&mut self, a: f64, x: &SpectralScalar) {
        debug_assert_eq!(self.coeffs.len(), x.coeffs.len());
        for (c, v) in self.coeffs.iter_mut().zip(&x.coeffs) {
            *c += a * v;
        }
    }

    pub fn max_abs_diff(&self, other: &SpectralScalar) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn map_modes(&mut self, mut f: impl FnMut(usize, Complex64) -> Complex64) {
        for (i, c) in self.coeffs.iter_mut().enumerate() {
            *c = f(i, *c);
        }
    }

    pub fn zero_nyquist(&mut self) {
        let g = self.grid.clone();
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                self.coeffs[i] = Complex64::default();
            }
        }
    }
}

/// A `d`-component vector field sharing one grid.
#[derive(Debug, Clone)]
pub struct SpectralVector {
    comps: Vec<SpectralScalar>,
}

impl SpectralVector {
    pub fn zeros(grid: &Grid) -> Self {
        Self {
            comps: (0..grid.d()).map(|_| SpectralScalar::zeros(grid)).collect(),
        }
    }

    pub fn from_components(comps: Vec<SpectralScalar>) -> Result<Self> {
        let first = comps
            .first()
            .ok_or_else(|| Error::InvalidParameter("empty vector field".into()))?;
        let g = first.grid().clone();
        if comps.len() != g.d() {
            return Err(Error::GridMismatch(format!(
                "{} components on a {}-dimensional grid",
                comps.len(),
                g.d()
            )));
        }
        for c in &comps {
            c.grid().check_same(&g)?;
        }
        Ok(Self { comps })
    }

    pub fn grid(&self) -> &Grid {
        self.comps[0].grid()
    }

    pub fn components(&self) -> &[SpectralScalar] {
        &self.comps
    }

    pub fn components_mut(&mut self) -> &mut [SpectralScalar] {
        &mut self.comps
    }

    pub fn component(&self, i: usize) -> &SpectralScalar {
        &self.comps[i]
    }

    pub fn scale(&mut self, a: f64) {
        self.comps.iter_mut().for_each(|c| c.scale(a));
    }

    pub fn axpy(&mut self, a: f64, x: &SpectralVector) {
        for (c, v) in self.comps.iter_mut().zip(&x.comps) {
            c.axpy(a, v);
        }
    }

    pub fn max_abs_diff(&self, other: &SpectralVector) -> f64 {
        self.comps
            .iter()
            .zip(&other.comps)
            .map(|(a, b)| a.max_abs_diff(b))
            .fold(0.0, f64::max)
    }
}

/// Real samples on the `n^d` collocation grid to normalized coefficients.
pub fn transform_forward(grid: &Grid, samples: &[f64]) -> Result<SpectralScalar> {
    if samples.len() != grid.len() {
        return Err(Error::GridMismatch(format!(
            "{} samples for a grid of {}",
            samples.len(),
            grid.len()
        )));
    }
    let mut data: Vec<Complex64> = samples.iter().map(|&x| Complex64::new(x, 0.0)).collect();
    fft_nd(&mut data, grid.n(), grid.d(), Direction::Forward);
    let s = 1.0 / grid.len() as f64;
    data.iter_mut().for_each(|c| *c *= s);
    SpectralScalar::from_coeffs(grid, data)
}

/// Coefficients back to real collocation samples; fails if the result is not real.
pub fn transform_inverse(f: &SpectralScalar) -> Result<Vec<f64>> {
    let g = f.grid();
    let mut data = f.coeffs().to_vec();
    fft_nd(&mut data, g.n(), g.d(), Direction::Inverse);
    let scale = data.iter().map(|c| c.re.abs()).fold(0.0, f64::max);
    let imag = data.iter().map(|c| c.im.abs()).fold(0.0, f64::max);
    if imag > 1e-9 * scale.max(f64::MIN_POSITIVE) && imag > 1e-300 {
        return Err(Error::NotReal(imag));
    }
    Ok(data.into_iter().map(|c| c.re).collect())
}

/// Zero-padded product grid used to evaluate nonlinear terms.
pub struct ProductGrid {
    grid: Grid,
    m: usize,
    map: Vec<(usize, usize)>,
}

impl ProductGrid {
    pub fn new(grid: &Grid, order: usize) -> Self {
        Self::with_size(grid, grid.padded_size(order))
    }

    pub fn with_size(grid: &Grid, m: usize) -> Self {
        let n = grid.n();
        let d = grid.d();
        let mut map = Vec::with_capacity(grid.len());
        for i in 0..grid.len() {
            if grid.is_nyquist(i) {
                continue;
            }
            let mut p = 0usize;
            for a in 0..d {
                let s = signed_index(grid.axis_index(i, a), n);
                p = p * m + s.rem_euclid(m as i64) as usize;
            }
            map.push((i, p));
        }
        Self {
            grid: grid.clone(),
            m,
            map,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.m.pow(self.grid.d() as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    fn embed(&self, a: &SpectralScalar, b: Option<&SpectralScalar>) -> Vec<Complex64> {
        let mut data = vec![Complex64::default(); self.len()];
        let i = Complex64::new(0.0, 1.0);
        for &(src, dst) in &self.map {
            let mut v = a.coeffs()[src];
            if let Some(b) = b {
                v += i * b.coeffs()[src];
            }
            data[dst] = v;
        }
        data
    }

    /// Samples of each field on the product grid, two fields per complex transform.
    pub fn to_physical(&self, fields: &[&SpectralScalar]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(fields.len());
        for pair in fields.chunks(2) {
            let mut data = self.embed(pair[0], pair.get(1).copied());
            fft_nd(&mut data, self.m, self.grid.d(), Direction::Inverse);
            out.push(data.iter().map(|c| c.re).collect());
            if pair.len() == 2 {
                out.push(data.iter().map(|c| c.im).collect());
            }
        }
        out
    }

    /// Normalized spectrum on the product grid of `a + i b`.
    pub fn padded_spectrum(&self, a: &[f64], b: Option<&[f64]>) -> Vec<Complex64> {
        let mut data: Vec<Complex64> = match b {
            Some(b) => a
                .iter()
                .zip(b)
                .map(|(&x, &y)| Complex64::new(x, y))
                .collect(),
            None => a.iter().map(|&x| Complex64::new(x, 0.0)).collect(),
        };
        fft_nd(&mut data, self.m, self.grid.d(), Direction::Forward);
        let s = 1.0 / self.len() as f64;
        data.iter_mut().for_each(|c| *c *= s);
        data
    }

    /// Derivative along `axis` of a packed padded spectrum, returned as the (re, im) sample pair.
    pub fn derivative_samples(&self, spec: &[Complex64], axis: usize) -> (Vec<f64>, Vec<f64>) {
        let d = self.grid.d();
        let m = self.m;
        let stride = m.pow((d - 1 - axis) as u32);
        let kf = self.grid.fundamental();
        let mut data: Vec<Complex64> = spec
            .iter()
            .enumerate()
            .map(|(p, c)| {
                let j = (p / stride) % m;
                if j == m / 2 {
                    Complex64::default()
                } else {
                    c * Complex64::new(0.0, kf * signed_index(j, m) as f64)
                }
            })
            .collect();
        fft_nd(&mut data, m, d, Direction::Inverse);
        (
            data.iter().map(|c| c.re).collect(),
            data.iter().map(|c| c.im).collect(),
        )
    }

    /// Truncate product-grid samples back to retained modes of the base grid.
    pub fn from_physical(&self, values: &[&[f64]]) -> Vec<SpectralScalar> {
        let mut out = Vec::with_capacity(values.len());
        let g = &self.grid;
        for pair in values.chunks(2) {
            let spec = self.padded_spectrum(pair[0], pair.get(1).copied());
            let mut a = SpectralScalar::zeros(g);
            if pair.len() == 1 {
                for &(src, dst) in &self.map {
                    a.coeffs[src] = spec[dst];
                }
                out.push(a);
                continue;
            }
            let mut b = SpectralScalar::zeros(g);
            let d = g.d();
            for &(src, dst) in &self.map {
                let mut neg = 0usize;
                for ax in 0..d {
                    let stride = self.m.pow((d - 1 - ax) as u32);
                    let j = (dst / stride) % self.m;
                    neg = neg * self.m + (self.m - j) % self.m;
                }
                let z = spec[dst];
                let zc = spec[neg].conj();
                a.coeffs[src] = 0.5 * (z + zc);
                b.coeffs[src] = Complex64::new(0.0, -0.5) * (z - zc);
            }
            out.push(a);
            out.push(b);
        }
        out
    }
}
