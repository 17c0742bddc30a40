//! Brute-force Fourier convolution reference for small grids.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::Result;
use crate::models::{Fields, Form, Model, ModelKind, ModelParams, NonlinearTerms};
use crate::spectral::{
    make_grid, random_field, rng_from_seed, Dealias, Grid, SpectralScalar, SpectralVector, Spectrum,
};
use crate::timestepper::{LinearPropagator, Scheme, Stepper};

/// Coefficients on the full band `[-bound, bound]^d`, with no truncation.
#[derive(Debug, Clone)]
pub struct DenseSpectrum {
    d: usize,
    bound: i64,
    kscale: f64,
    data: Vec<Complex64>,
}

impl DenseSpectrum {
    fn zeros(d: usize, bound: i64, kscale: f64) -> Self {
        let side = (2 * bound + 1) as usize;
        Self {
            d,
            bound,
            kscale,
            data: vec![Complex64::default(); side.pow(d as u32)],
        }
    }

    fn side(&self) -> usize {
        (2 * self.bound + 1) as usize
    }

    fn modes(&self) -> impl Iterator<Item = (usize, [i64; 3])> + '_ {
        let side = self.side();
        let d = self.d;
        let b = self.bound;
        (0..self.data.len()).map(move |p| {
            let mut m = [0i64; 3];
            let mut rest = p;
            for a in (0..d).rev() {
                m[a] = (rest % side) as i64 - b;
                rest /= side;
            }
            (p, m)
        })
    }

    fn index(&self, m: &[i64; 3]) -> Option<usize> {
        let side = self.side();
        let mut p = 0usize;
        for &mi in m.iter().take(self.d) {
            if mi.abs() > self.bound {
                return None;
            }
            p = p * side + (mi + self.bound) as usize;
        }
        Some(p)
    }

    pub fn from_scalar(f: &SpectralScalar) -> Self {
        let g = f.grid();
        let b = g.retained_max() as i64;
        let mut out = Self::zeros(g.d(), b, g.fundamental());
        for i in 0..g.len() {
            if g.is_nyquist(i) {
                continue;
            }
            let m = g.multi_index(i);
            let p = out.index(&m).unwrap();
            out.data[p] = f.coeffs()[i];
        }
        out
    }

    pub fn mul(&self, other: &DenseSpectrum) -> DenseSpectrum {
        let mut out = Self::zeros(self.d, self.bound + other.bound, self.kscale);
        let b: Vec<(usize, [i64; 3])> = other
            .modes()
            .filter(|(p, _)| other.data[*p] != Complex64::default())
            .collect();
        for (pa, ma) in self.modes() {
            let ca = self.data[pa];
            if ca == Complex64::default() {
                continue;
            }
            for (pb, mb) in &b {
                let m = [ma[0] + mb[0], ma[1] + mb[1], ma[2] + mb[2]];
                let p = out.index(&m).unwrap();
                out.data[p] += ca * other.data[*pb];
            }
        }
        out
    }

    pub fn derivative(&self, axis: usize) -> DenseSpectrum {
        let mut out = self.clone();
        let modes: Vec<_> = self.modes().collect();
        for (p, m) in modes {
            out.data[p] *= Complex64::new(0.0, self.kscale * m[axis] as f64);
        }
        out
    }

    pub fn add_scaled(&self, a: f64, other: &DenseSpectrum) -> DenseSpectrum {
        let bound = self.bound.max(other.bound);
        let mut out = Self::zeros(self.d, bound, self.kscale);
        for src in [(1.0, self), (a, other)] {
            for (p, m) in src.1.modes() {
                let q = out.index(&m).unwrap();
                out.data[q] += src.0 * src.1.data[p];
            }
        }
        out
    }

    /// Keep modes with every `|m_i| <= n/2 - 1`.
    pub fn truncate(&self, grid: &Grid) -> SpectralScalar {
        let mut f = SpectralScalar::zeros(grid);
        let r = grid.retained_max() as i64;
        for (p, m) in self.modes() {
            if m.iter().take(self.d).all(|x| x.abs() <= r) {
                let i = grid.flat_of(&m[..self.d]).unwrap();
                f.coeffs_mut()[i] = self.data[p];
            }
        }
        f
    }
}

fn dense_vec(v: &SpectralVector) -> Vec<DenseSpectrum> {
    v.components()
        .iter()
        .map(DenseSpectrum::from_scalar)
        .collect()
}

fn dot_grad(u: &[DenseSpectrum], w: &DenseSpectrum) -> DenseSpectrum {
    let mut acc: Option<DenseSpectrum> = None;
    for (j, uj) in u.iter().enumerate() {
        let t = uj.mul(&w.derivative(j));
        acc = Some(match acc {
            None => t,
            Some(a) => a.add_scaled(1.0, &t),
        });
    }
    acc.unwrap()
}

fn truncate_vec(v: &[DenseSpectrum], grid: &Grid) -> Result<SpectralVector> {
    SpectralVector::from_components(v.iter().map(|x| x.truncate(grid)).collect())
}

/// Reference nonlinear terms by direct convolution.
pub fn oracle_terms(model: &Model, f: &Fields) -> Result<NonlinearTerms> {
    let g = f.grid().clone();
    let d = g.d();
    let u = dense_vec(&f.velocity);
    let eta = DenseSpectrum::from_scalar(&f.density);
    let adv: Vec<DenseSpectrum> = (0..d).map(|i| dot_grad(&u, &u[i])).collect();
    let mut speed = u[0].mul(&u[0]);
    for c in u.iter().skip(1) {
        speed = speed.add_scaled(1.0, &c.mul(c));
    }
    let cubic: Vec<DenseSpectrum> = u.iter().map(|c| speed.mul(c)).collect();
    let ubar_u: Vec<DenseSpectrum> = u.iter().map(|c| u[0].mul(c)).collect();
    let flux: Vec<DenseSpectrum> = u.iter().map(|c| eta.mul(c)).collect();
    let mut div = flux[0].derivative(0);
    for (j, c) in flux.iter().enumerate().skip(1) {
        div = div.add_scaled(1.0, &c.derivative(j));
    }
    let tt = model.kind == ModelKind::Tt;
    let pert = model.form == crate::models::Form::Perturbation;
    let nested = if tt {
        let v: Vec<DenseSpectrum> = (0..d).map(|i| dot_grad(&u, &adv[i])).collect();
        Some(truncate_vec(&v, &g)?)
    } else {
        None
    };
    let (cross_a, cross_b) = if tt && pert {
        let a: Vec<DenseSpectrum> = (0..d).map(|i| dot_grad(&u, &u[i].derivative(0))).collect();
        let b: Vec<DenseSpectrum> = adv.iter().map(|w| w.derivative(0)).collect();
        (Some(truncate_vec(&a, &g)?), Some(truncate_vec(&b, &g)?))
    } else {
        (None, None)
    };
    Ok(NonlinearTerms {
        advection: truncate_vec(&adv, &g)?,
        cubic: truncate_vec(&cubic, &g)?,
        speed_sq: speed.truncate(&g),
        ubar_u: truncate_vec(&ubar_u, &g)?,
        flux: truncate_vec(&flux, &g)?,
        density_flux: div.truncate(&g),
        nested,
        cross_a,
        cross_b,
    })
}

/// Per-term maximum coefficient error relative to the largest reference coefficient.
#[derive(Debug, Clone, Serialize)]
pub struct TermError {
    pub name: String,
    pub error: f64,
}

fn max_coeff(v: &SpectralVector) -> f64 {
    v.components()
        .iter()
        .flat_map(|c| c.coeffs().iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
}

pub fn compare_terms(a: &NonlinearTerms, reference: &NonlinearTerms) -> Vec<TermError> {
    let rel = |diff: f64, scale: f64| diff / scale.max(1e-300);
    let vecs = |name: &str, x: &SpectralVector, y: &SpectralVector| TermError {
        name: name.into(),
        error: rel(x.max_abs_diff(y), max_coeff(y)),
    };
    let scal = |name: &str, x: &SpectralScalar, y: &SpectralScalar| TermError {
        name: name.into(),
        error: rel(
            x.max_abs_diff(y),
            y.coeffs().iter().map(|z| z.norm()).fold(0.0, f64::max),
        ),
    };
    let mut out = vec![
        vecs("advection", &a.advection, &reference.advection),
        vecs("cubic", &a.cubic, &reference.cubic),
        scal("speed_sq", &a.speed_sq, &reference.speed_sq),
        vecs("ubar_u", &a.ubar_u, &reference.ubar_u),
        vecs("flux", &a.flux, &reference.flux),
        scal("density_flux", &a.density_flux, &reference.density_flux),
    ];
    for (name, x, y) in [
        ("nested", &a.nested, &reference.nested),
        ("cross_a", &a.cross_a, &reference.cross_a),
        ("cross_b", &a.cross_b, &reference.cross_b),
    ] {
        if let (Some(x), Some(y)) = (x, y) {
            out.push(vecs(name, x, y));
        }
    }
    out
}

/// Reference `[∂^γ, u·∇] v` for every `|γ| = k` by direct convolution.
pub fn oracle_commutators(
    u: &SpectralVector,
    v: &SpectralScalar,
    k: u32,
) -> Result<Vec<SpectralScalar>> {
    let g = v.grid().clone();
    let ud = dense_vec(u);
    let vd = DenseSpectrum::from_scalar(v);
    let uv = dot_grad(&ud, &vd);
    let mut out = Vec::new();
    for gamma in crate::inequality_lab::multi_indices_of(g.d(), k) {
        let deriv = |x: &DenseSpectrum| {
            let mut y = x.clone();
            for (axis, &p) in gamma.iter().enumerate() {
                for _ in 0..p {
                    y = y.derivative(axis);
                }
            }
            y
        };
        let c = deriv(&uv).add_scaled(-1.0, &dot_grad(&ud, &deriv(&vd)));
        out.push(c.truncate(&g));
    }
    Ok(out)
}

/// Observed local order of one IMEX scheme against an exponential-integrator reference.
#[derive(Debug, Clone, Serialize)]
pub struct ImexOrderCheck {
    pub model: String,
    pub scheme: String,
    pub dts: Vec<f64>,
    pub linear_errors: Vec<f64>,
    pub full_errors: Vec<f64>,
    pub linear_order: f64,
    pub full_order: f64,
    pub expected_order: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleReport {
    pub d: usize,
    pub n: usize,
    pub seed: u64,
    pub dealias: String,
    pub terms: Vec<TermError>,
    pub commutator_error: f64,
    pub imex: Vec<ImexOrderCheck>,
    pub max_term_error: f64,
    pub tolerance: f64,
    pub order_slack: f64,
    pub pass: bool,
    pub elapsed_s: f64,
}

/// Integrating-factor RK4 with the exact linear exponential, run with `sub` substeps.
fn lawson_rk4(model: &Model, y: &Fields, dt: f64, sub: usize, with_n: bool) -> Result<Fields> {
    let g = y.grid().clone();
    let h = dt / sub as f64;
    let half = LinearPropagator::new(model, &g, 0.5 * h)?;
    let full = LinearPropagator::new(model, &g, h)?;
    let n = |f: &Fields| -> Result<Fields> {
        if with_n {
            model.nonlinear(f)
        } else {
            Ok(Fields::zeros(&g))
        }
    };
    let mut y = y.clone();
    for _ in 0..sub {
        let k1 = n(&y)?;
        let mut t = y.clone();
        t.axpy(0.5 * h, &k1);
        let k2 = n(&half.apply(&t))?;
        let mut t = half.apply(&y);
        t.axpy(0.5 * h, &k2);
        let k3 = n(&t)?;
        let mut t = full.apply(&y);
        t.axpy(h, &half.apply(&k3));
        let k4 = n(&t)?;
        let mut inc = full.apply(&k1);
        let mut mid = k2;
        mid.axpy(1.0, &k3);
        inc.axpy(2.0, &half.apply(&mid));
        inc.axpy(1.0, &k4);
        y = full.apply(&y);
        y.axpy(h / 6.0, &inc);
    }
    Ok(y)
}

fn norm_inf(f: &Fields) -> f64 {
    f.scalars()
        .flat_map(|s| s.coeffs().iter().map(|z| z.norm()))
        .fold(0.0, f64::max)
}

fn random_fields(grid: &Grid, seed: u64, spectrum: Spectrum, amp: f64) -> Result<Fields> {
    let mut rng = rng_from_seed(seed);
    let comps = (0..grid.d())
        .map(|_| random_field(grid, spectrum, grid.n(), &mut rng))
        .collect();
    let mut f = Fields::new(
        SpectralVector::from_components(comps)?,
        random_field(grid, spectrum, grid.n(), &mut rng),
    )?;
    let m = norm_inf(&f);
    if m > 0.0 {
        f.scale(amp / m);
    }
    Ok(f)
}

pub const ORACLE_TOLERANCE: f64 = 1e-10;
/// Slack on the one-step error order `p + 1` of each scheme.
pub const ORACLE_ORDER_SLACK: f64 = 0.3;
const REFERENCE_SUBSTEPS: usize = 8;

/// Compare every pseudospectral nonlinear term, the commutators and the IMEX
/// local error on a small grid against brute-force references.
pub fn oracle_smallgrid(d: usize, n: usize, seed: u64, dealias: Dealias) -> Result<OracleReport> {
    let start = std::time::Instant::now();
    let grid = make_grid(d, n, 2.0 * std::f64::consts::PI, dealias)?;
    let fields = random_fields(&grid, seed, Spectrum::Flat, 1.0)?;
    let mut terms = Vec::new();
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        for model in [
            Model::perturbation(kind),
            Model::primitive(kind, ModelParams::default()),
        ] {
            let a = model.terms(&fields)?;
            let b = oracle_terms(&model, &fields)?;
            let form = match model.form {
                Form::Perturbation => "perturbation",
                Form::Primitive => "primitive",
            };
            for e in compare_terms(&a, &b) {
                terms.push(TermError {
                    name: format!("{}.{form}.{}", kind.name(), e.name),
                    error: e.error,
                });
            }
        }
    }
    let mut commutator_error = 0.0f64;
    for k in 1..=2u32 {
        let ps = crate::inequality_lab::commutators(&fields.velocity, &fields.density, k)?;
        let rs = oracle_commutators(&fields.velocity, &fields.density, k)?;
        for ((_, _, p), r) in ps.iter().zip(&rs) {
            let scale = r
                .coeffs()
                .iter()
                .map(|z| z.norm())
                .fold(0.0, f64::max)
                .max(1e-300);
            commutator_error = commutator_error.max(p.max_abs_diff(r) / scale);
        }
    }
    let smooth = random_fields(&grid, seed ^ 0x5eed, Spectrum::Gaussian { width: 1.5 }, 0.5)?;
    let dts = vec![4e-3, 2e-3, 1e-3];
    let mut imex = Vec::new();
    for kind in [ModelKind::Tt, ModelKind::Pptt] {
        let model = Model::perturbation(kind);
        for scheme in [Scheme::ImexEuler, Scheme::ImexRk2, Scheme::ImexRk3] {
            let mut lin = Vec::new();
            let mut full = Vec::new();
            for &dt in &dts {
                let st = Stepper::new(model, scheme, &grid, dt)?;
                let a = st.step_fields(&smooth)?;
                let mut diff = a;
                diff.axpy(
                    -1.0,
                    &lawson_rk4(&model, &smooth, dt, REFERENCE_SUBSTEPS, true)?,
                );
                full.push(norm_inf(&diff));
                let st = st.linear_only(true);
                let mut diff = st.step_fields(&smooth)?;
                diff.axpy(-1.0, &lawson_rk4(&model, &smooth, dt, 1, false)?);
                lin.push(norm_inf(&diff));
            }
            let order = |e: &[f64]| {
                let k = e.len() - 1;
                (e[k - 1] / e[k]).ln() / (dts[k - 1] / dts[k]).ln()
            };
            imex.push(ImexOrderCheck {
                model: kind.name().into(),
                scheme: scheme.name().into(),
                dts: dts.clone(),
                linear_order: order(&lin),
                full_order: order(&full),
                linear_errors: lin,
                full_errors: full,
                expected_order: scheme.order() as f64 + 1.0,
            });
        }
    }
    let max_term_error = terms
        .iter()
        .map(|t| t.error)
        .fold(commutator_error, f64::max);
    let orders_ok = imex.iter().all(|c| {
        c.linear_order >= c.expected_order - ORACLE_ORDER_SLACK
            && c.full_order >= c.expected_order - ORACLE_ORDER_SLACK
    });
    Ok(OracleReport {
        d,
        n,
        seed,
        dealias: dealias.name().into(),
        terms,
        commutator_error,
        imex,
        max_term_error,
        tolerance: ORACLE_TOLERANCE,
        order_slack: ORACLE_ORDER_SLACK,
        pass: max_term_error <= ORACLE_TOLERANCE && orders_ok,
        elapsed_s: start.elapsed().as_secs_f64(),
    })
}
