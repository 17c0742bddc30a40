//! Norms, the hypocoercivity functional, the energy ledger and decay fits.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::models::{Fields, Form, ModeMatrix, Model, ModelKind};
use crate::spectral::{hdot_sq, SpectralScalar, SpectralVector};

/// `L^d Σ |k|^{2s} Re(a conj b)`; the zero mode only counts when `s == 0`.
pub fn weighted_inner(a: &SpectralScalar, b: &SpectralScalar, s: f64) -> f64 {
    let g = a.grid();
    let ksq = g.ksq_table();
    let (x, y) = (a.coeffs(), b.coeffs());
    let mut acc = if s == 0.0 {
        (x[0] * y[0].conj()).re
    } else {
        0.0
    };
    let si = s as i32;
    for i in 1..x.len() {
        let w = if s == 0.0 {
            1.0
        } else if s == si as f64 {
            ksq[i].powi(si)
        } else {
            ksq[i].powf(s)
        };
        acc += w * (x[i] * y[i].conj()).re;
    }
    acc * g.volume()
}

fn weighted_inner_vec(a: &SpectralVector, b: &SpectralVector, s: f64) -> f64 {
    a.components()
        .iter()
        .zip(b.components())
        .map(|(x, y)| weighted_inner(x, y, s))
        .sum()
}

/// `‖f‖^2_{H^σ}`: `Σ_{j ≤ σ} ‖Λ^j f‖^2`, plus `‖Λ^σ f‖^2` when `σ` is fractional.
pub fn hs_sq(f: &SpectralScalar, sigma: f64) -> Result<f64> {
    if sigma < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "H^{sigma} with negative order"
        )));
    }
    let whole = sigma.floor() as u32;
    let mut acc = 0.0;
    for j in 0..=whole {
        acc += hdot_sq(f, j as f64)?;
    }
    if sigma.fract() != 0.0 {
        acc += hdot_sq(f, sigma)?;
    }
    Ok(acc)
}

pub fn hm_norm(f: &SpectralScalar, m: u32) -> Result<f64> {
    Ok(hs_sq(f, m as f64)?.sqrt())
}

/// `‖(u, η)‖_{H^m}` with `H^m = Σ_{k ≤ m} ‖Λ^k ·‖^2`.
pub fn hm_norm_fields(f: &Fields, m: u32) -> Result<f64> {
    let mut acc = 0.0;
    for c in f.scalars() {
        acc += hs_sq(c, m as f64)?;
    }
    Ok(acc.sqrt())
}

pub fn hs_norm_fields(f: &Fields, sigma: f64) -> Result<f64> {
    let mut acc = 0.0;
    for c in f.scalars() {
        acc += hs_sq(c, sigma)?;
    }
    Ok(acc.sqrt())
}

/// `‖Λ^s (u, η)‖`; negative `s` needs mean-zero components.
pub fn hdot_norm_fields(f: &Fields, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for c in f.scalars() {
        acc += hdot_sq(c, s)?;
    }
    Ok(acc.sqrt())
}

/// `‖Λ^s (u, η)‖` with the spatial means removed first.
pub fn hdot_norm_mean_free(f: &Fields, s: f64) -> Result<f64> {
    let mut acc = 0.0;
    for c in f.scalars() {
        let mut c = c.clone();
        c.coeffs_mut()[0] = Default::default();
        acc += hdot_sq(&c, s)?;
    }
    Ok(acc.sqrt())
}

/// `‖e1·u‖_{L^2}`.
pub fn ubar_l2(f: &Fields) -> Result<f64> {
    Ok(hdot_sq(f.velocity.component(0), 0.0)?.sqrt())
}

/// `‖(u,η)‖^2_{H^m} + δ0 Σ_{k<m} ∫ ∂^k u · ∂^k ∇η`.
pub fn hypocoercivity_functional(f: &Fields, m: u32, delta0: f64) -> Result<f64> {
    let base = hm_norm_fields(f, m)?.powi(2);
    Ok(base + delta0 * hypocoercivity_cross(f, m))
}

/// `Σ_{k<m} ∫ ∂^k u · ∂^k ∇η`, bounded in size by `½‖(u,η)‖^2_{H^m}`.
pub fn hypocoercivity_cross(f: &Fields, m: u32) -> f64 {
    let g = f.grid();
    let d = g.d();
    let mut acc = 0.0;
    let eta = f.density.coeffs();
    for i in 1..g.len() {
        if g.is_nyquist(i) {
            continue;
        }
        let k = g.kvec(i);
        let ksq = g.ksq(i);
        let w: f64 = (0..m).map(|j| ksq.powi(j as i32)).sum();
        let grad = num_complex::Complex64::new(0.0, 1.0) * eta[i];
        let mut dot = 0.0;
        for a in 0..d {
            dot += (f.velocity.component(a).coeffs()[i] * (k[a] * grad).conj()).re;
        }
        acc += w * dot;
    }
    acc * g.volume()
}

/// Energy budget of `½‖∂^k(u,η)‖^2` for the perturbation equations:
/// `rate + Σ dissipation = Σ flux` up to time-discretization error.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OrderLedger {
    pub order: u32,
    pub energy: f64,
    pub diss_grad_u: f64,
    pub diss_grad_eta: f64,
    pub diss_div_u: f64,
    pub diss_ubar: f64,
    pub diss_quartic: f64,
    pub flux: [f64; 6],
    pub rate: Option<f64>,
    pub residual: Option<f64>,
}

impl OrderLedger {
    pub fn dissipation(&self) -> f64 {
        self.diss_grad_u + self.diss_grad_eta + self.diss_div_u + self.diss_ubar + self.diss_quartic
    }

    pub fn flux_total(&self) -> f64 {
        self.flux.iter().sum()
    }

    pub fn set_rate(&mut self, rate: f64) {
        self.rate = Some(rate);
        self.residual = Some(rate + self.dissipation() - self.flux_total());
    }

    pub fn entries(&self) -> BTreeMap<String, f64> {
        const ROMAN: [&str; 6] = ["I", "II", "III", "IV", "V", "VI"];
        let k = self.order;
        let mut out = BTreeMap::new();
        let mut put = |name: &str, v: f64| {
            out.insert(format!("ledger.k{k}.{name}"), v);
        };
        put("energy", self.energy);
        put("diss_grad_u", self.diss_grad_u);
        put("diss_grad_eta", self.diss_grad_eta);
        put("diss_div_u", self.diss_div_u);
        put("diss_ubar", self.diss_ubar);
        put("diss_quartic", self.diss_quartic);
        for (r, v) in ROMAN.iter().zip(self.flux) {
            put(&format!("flux_{r}"), v);
        }
        if let Some(r) = self.rate {
            put("rate", r);
        }
        if let Some(r) = self.residual {
            put("residual", r);
        }
        out
    }
}

pub fn energy_ledger(model: &Model, f: &Fields, orders: &[u32]) -> Result<Vec<OrderLedger>> {
    if model.form != Form::Perturbation {
        return Err(Error::InvalidParameter(
            "the energy ledger is defined for the perturbation form".into(),
        ));
    }
    let terms = model.terms(f)?;
    let u = &f.velocity;
    let eta = &f.density;
    let ubar = u.component(0);
    let div = crate::spectral::divergence(u)?;
    let tt = model.kind == ModelKind::Tt;
    let transport = if tt {
        let mut v = terms.nested.clone().unwrap();
        v.axpy(1.0, terms.cross_a.as_ref().unwrap());
        v.axpy(1.0, terms.cross_b.as_ref().unwrap());
        let g = f.grid().clone();
        for c in v.components_mut().iter_mut().zip(u.components()) {
            let (dst, src) = c;
            let mut lin = src.clone();
            lin.map_modes(|i, z| {
                let k1 = g.kvec(i)[0];
                if g.is_nyquist(i) {
                    Default::default()
                } else {
                    -k1 * k1 * z
                }
            });
            dst.axpy(1.0, &lin);
        }
        Some(v)
    } else {
        None
    };
    let mut out = Vec::with_capacity(orders.len());
    for &k in orders {
        let s = k as f64;
        let energy = 0.5 * (weighted_inner_vec(u, u, s) + weighted_inner(eta, eta, s));
        let quartic = if k == 0 {
            weighted_inner_vec(&terms.cubic, u, 0.0)
        } else {
            0.0
        };
        let flux = [
            -weighted_inner_vec(&terms.advection, u, s),
            if k == 0 {
                0.0
            } else {
                -weighted_inner_vec(&terms.cubic, u, s)
            },
            -weighted_inner(&terms.speed_sq, ubar, s),
            -2.0 * weighted_inner_vec(&terms.ubar_u, u, s),
            -weighted_inner(&terms.density_flux, eta, s),
            transport
                .as_ref()
                .map(|v| weighted_inner_vec(v, u, s))
                .unwrap_or(0.0),
        ];
        out.push(OrderLedger {
            order: k,
            energy,
            diss_grad_u: weighted_inner_vec(u, u, s + 1.0),
            diss_grad_eta: if tt {
                0.0
            } else {
                weighted_inner(eta, eta, s + 1.0)
            },
            diss_div_u: weighted_inner(&div, &div, s),
            diss_ubar: 2.0 * weighted_inner(ubar, ubar, s),
            diss_quartic: quartic,
            flux,
            rate: None,
            residual: None,
        });
    }
    Ok(out)
}

/// Fill `rate` and `residual` from centered differences of the energies
/// (one-sided at the ends) along a trajectory.
pub fn fill_ledger_rates(times: &[f64], ledgers: &mut [Vec<OrderLedger>]) {
    let n = times.len();
    if n < 2 {
        return;
    }
    let orders = ledgers[0].len();
    for j in 0..n {
        let (a, b) = if j == 0 {
            (0, 1)
        } else if j == n - 1 {
            (n - 2, n - 1)
        } else {
            (j - 1, j + 1)
        };
        for o in 0..orders {
            let rate = (ledgers[b][o].energy - ledgers[a][o].energy) / (times[b] - times[a]);
            ledgers[j][o].set_rate(rate);
        }
    }
}

/// Exponent `β(d, m)` of the negative-Sobolev interpolation.
pub fn beta_exponent(d: usize, m: u32) -> Result<f64> {
    let (df, mf) = (d as f64, m as f64);
    let a = df / 2.0 + mf - 1.0;
    let disc = a * a + 8.0 * mf - 2.0 * df * mf - 2.0 * df;
    if disc < 0.0 {
        return Err(Error::UnsupportedExponents(format!(
            "β(d={d}, m={m}) has a negative discriminant"
        )));
    }
    Ok((a - disc.sqrt()) / 2.0)
}

/// `‖Λ^l w(t)‖ (1+t)^{(s+l)/2}`.
pub fn envelope(value: f64, t: f64, s: f64, l: f64) -> f64 {
    value * (1.0 + t).powf(0.5 * (s + l))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayFitResult {
    pub slope: f64,
    pub intercept: f64,
    pub stderr: f64,
    pub window: (f64, f64),
    pub points: usize,
    pub expected: f64,
    pub tol: f64,
    /// `slope <= expected + tol |expected|`: decay at least as fast as predicted.
    pub pass: bool,
    /// `|slope - expected| <= tol |expected|`.
    pub sharp_pass: bool,
}

/// Least-squares slope of `log value` against `log(1+t)` on the window.
pub fn fit_decay(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    expected: f64,
    tol: f64,
) -> Result<DecayFitResult> {
    if times.len() != values.len() {
        return Err(Error::Fit("times and values differ in length".into()));
    }
    if !(window.0 < window.1) {
        return Err(Error::Fit(format!("empty window {window:?}")));
    }
    let eps = 1e-9 * window.1.abs().max(1.0);
    let pts: Vec<(f64, f64)> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 - eps && **t <= window.1 + eps)
        .map(|(t, v)| ((1.0 + t).ln(), *v))
        .collect();
    if pts.iter().any(|(_, v)| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Fit(
            "non-positive or non-finite value in window".into(),
        ));
    }
    let n = pts.len();
    if n < 3 {
        return Err(Error::Fit(format!("{n} points in window, need at least 3")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = pts.iter().map(|p| p.1.ln()).collect();
    let nf = n as f64;
    let mx = xs.iter().sum::<f64>() / nf;
    let my = ys.iter().sum::<f64>() / nf;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("degenerate time window".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let sse: f64 = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (y - intercept - slope * x).powi(2))
        .sum();
    let stderr = (sse / (nf - 2.0) / sxx).sqrt();
    let band = tol * expected.abs();
    Ok(DecayFitResult {
        slope,
        intercept,
        stderr,
        window,
        points: n,
        expected,
        tol,
        pass: slope <= expected + band,
        sharp_pass: (slope - expected).abs() <= band,
    })
}

/// True when every value in the window stays below `factor` times the first one.
pub fn envelope_bounded(
    times: &[f64],
    values: &[f64],
    window: (f64, f64),
    factor: f64,
) -> Result<(bool, f64)> {
    let eps = 1e-9 * window.1.abs().max(1.0);
    let inside: Vec<f64> = times
        .iter()
        .zip(values)
        .filter(|(t, _)| **t >= window.0 - eps && **t <= window.1 + eps)
        .map(|(_, v)| *v)
        .collect();
    let first = *inside
        .first()
        .ok_or_else(|| Error::Fit(format!("no samples in window {window:?}")))?;
    let worst = inside.iter().cloned().fold(0.0, f64::max) / first;
    Ok((worst <= factor, worst))
}

/// `‖Λ^l w(t)‖` of exact linear perturbation dynamics for data with spectral
/// amplitude `|k|^a` on `|k| <= k0` and independent uniform phases, computed as a
/// continuum integral over wavevectors (radial times angular quadrature).
pub fn linear_decay_quadrature(
    kind: ModelKind,
    d: usize,
    a: f64,
    k0: f64,
    l: f64,
    times: &[f64],
) -> Result<Vec<f64>> {
    if !(2..=3).contains(&d) || !(k0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quadrature needs d ∈ {{2,3}} and k0 > 0, got d = {d}, k0 = {k0}"
        )));
    }
    // The Frobenius norm of exp(tM(k)) is invariant under rotations about the
    // flock direction, so in 3-d a polar angle suffices.
    const NR: usize = 160;
    const NA: usize = 24;
    let xmax = 1e5f64.ln();
    let hx = xmax / NR as f64;
    let ha = if d == 2 {
        std::f64::consts::TAU
    } else {
        std::f64::consts::PI
    } / NA as f64;
    let mut acc = vec![0.0; times.len()];
    for ir in 0..NR {
        let r = k0 * (-(ir as f64 + 0.5) * hx).exp();
        let radial = r.powf(d as f64 + 2.0 * a + 2.0 * l) * hx;
        for ia in 0..NA {
            let th = (ia as f64 + 0.5) * ha;
            let (k, w) = if d == 2 {
                (vec![r * th.cos(), r * th.sin()], ha)
            } else {
                (
                    vec![r * th.cos(), r * th.sin(), 0.0],
                    std::f64::consts::TAU * th.sin() * ha,
                )
            };
            let m = ModeMatrix::perturbation(&k, kind);
            for (ti, &t) in times.iter().enumerate() {
                let e = m.exp(t);
                let mut fro = 0.0;
                for i in 0..e.dim() {
                    for j in 0..e.dim() {
                        fro += e.get(i, j).norm_sqr();
                    }
                }
                acc[ti] += radial * w * fro;
            }
        }
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

/// Log-log slope of [`linear_decay_quadrature`] on `window`, from 32 log-spaced times.
pub fn linear_decay_slope(
    kind: ModelKind,
    d: usize,
    a: f64,
    k0: f64,
    l: f64,
    window: (f64, f64),
) -> Result<f64> {
    let (lo, hi) = ((1.0 + window.0).ln(), (1.0 + window.1).ln());
    let times: Vec<f64> = (0..32)
        .map(|i| (lo + (hi - lo) * i as f64 / 31.0).exp() - 1.0)
        .collect();
    let v = linear_decay_quadrature(kind, d, a, k0, l, &times)?;
    Ok(fit_decay(&times, &v, window, -1.0, 0.0)?.slope)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn beta_values() {
        assert_eq!(beta_exponent(3, 3).unwrap(), 0.0);
        assert!((beta_exponent(2, 3).unwrap() - (3.0 - 17f64.sqrt()) / 2.0).abs() < 1e-15);
    }

    #[test]
    fn fit_recovers_power_law() {
        let t: Vec<f64> = (0..=100).map(|i| i as f64).collect();
        let v: Vec<f64> = t.iter().map(|t| 3.0 * (1.0 + t).powf(-0.8)).collect();
        let r = fit_decay(&t, &v, (10.0, 100.0), -0.8, 0.15).unwrap();
        assert!((r.slope + 0.8).abs() < 1e-12);
        assert!(r.pass && r.sharp_pass);
        assert!(fit_decay(&t, &v, (10.0, 11.0), -0.8, 0.15).is_err());
        let fast = fit_decay(&t, &v, (10.0, 100.0), -0.3, 0.15).unwrap();
        assert!(fast.pass && !fast.sharp_pass);
    }
}
