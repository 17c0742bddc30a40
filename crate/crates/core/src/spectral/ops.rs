use num_complex::Complex64;

use super::field::{transform_inverse, ProductGrid, SpectralScalar, SpectralVector};
use crate::error::{Error, Result};

/// Spectral derivative along `axis`; Nyquist modes are dropped.
pub fn partial_derivative(f: &SpectralScalar, axis: usize) -> Result<SpectralScalar> {
    let g = f.grid().clone();
    if axis >= g.d() {
        return Err(Error::InvalidParameter(format!(
            "axis {axis} on a {}-dimensional grid",
            g.d()
        )));
    }
    let mut out = f.clone();
    out.map_modes(|i, c| {
        let j = g.axis_index(i, axis);
        if j == g.n() / 2 {
            Complex64::default()
        } else {
            c * Complex64::new(0.0, g.wavenumber(j))
        }
    });
    Ok(out)
}

/// Mixed derivative `∂^γ` for a multi-index `γ`.
pub fn multi_derivative(f: &SpectralScalar, gamma: &[u32]) -> Result<SpectralScalar> {
    let mut out = f.clone();
    for (axis, &p) in gamma.iter().enumerate() {
        for _ in 0..p {
            out = partial_derivative(&out, axis)?;
        }
    }
    Ok(out)
}

const MEAN_TOL: f64 = 1e-13;

/// Fourier multiplier `|k|^s`. Negative orders require a mean-zero field.
pub fn apply_lambda(f: &SpectralScalar, s: f64) -> Result<SpectralScalar> {
    if s == 0.0 {
        return Ok(f.clone());
    }
    if s < 0.0 {
        let m = f.coeffs()[0].norm();
        if m > MEAN_TOL * f.coeff_norm() {
            return Err(Error::NegativeOrderOnNonzeroMean(m));
        }
    }
    let g = f.grid().clone();
    let mut out = f.clone();
    out.map_modes(|i, c| {
        if i == 0 {
            if s > 0.0 {
                Complex64::default()
            } else {
                c
            }
        } else {
            c * g.ksq(i).powf(0.5 * s)
        }
    });
    Ok(out)
}

/// `∫ f g dx` over the box, from coefficients.
pub fn inner_product_l2(f: &SpectralScalar, g: &SpectralScalar) -> Result<f64> {
    f.grid().check_same(g.grid())?;
    let s: f64 = f
        .coeffs()
        .iter()
        .zip(g.coeffs())
        .map(|(a, b)| (a * b.conj()).re)
        .sum();
    Ok(s * f.grid().volume())
}

pub fn inner_product_vec(f: &SpectralVector, g: &SpectralVector) -> Result<f64> {
    let mut s = 0.0;
    for (a, b) in f.components().iter().zip(g.components()) {
        s += inner_product_l2(a, b)?;
    }
    Ok(s)
}

/// Weighted `L^d Σ |k|^{2s} |c_k|^2` without forming the multiplied field.
pub fn hdot_sq(f: &SpectralScalar, s: f64) -> Result<f64> {
    if s < 0.0 {
        let m = f.coeffs()[0].norm();
        if m > MEAN_TOL * f.coeff_norm() {
            return Err(Error::NegativeOrderOnNonzeroMean(m));
        }
    }
    let g = f.grid();
    let ksq = g.ksq_table();
    let c = f.coeffs();
    let mut acc = if s == 0.0 { c[0].norm_sqr() } else { 0.0 };
    let si = s as i32;
    if s == 0.0 {
        acc += c[1..].iter().map(|z| z.norm_sqr()).sum::<f64>();
    } else if s == si as f64 {
        for i in 1..c.len() {
            acc += ksq[i].powi(si) * c[i].norm_sqr();
        }
    } else {
        for i in 1..c.len() {
            acc += ksq[i].powf(s) * c[i].norm_sqr();
        }
    }
    Ok(acc * g.volume())
}

pub fn gradient(f: &SpectralScalar) -> Result<SpectralVector> {
    let comps = (0..f.grid().d())
        .map(|a| partial_derivative(f, a))
        .collect::<Result<Vec<_>>>()?;
    SpectralVector::from_components(comps)
}

pub fn divergence(v: &SpectralVector) -> Result<SpectralScalar> {
    let mut out = SpectralScalar::zeros(v.grid());
    for (a, c) in v.components().iter().enumerate() {
        out.axpy(1.0, &partial_derivative(c, a)?);
    }
    Ok(out)
}

pub fn laplacian(f: &SpectralScalar) -> SpectralScalar {
    let g = f.grid().clone();
    let mut out = f.clone();
    out.map_modes(|i, c| -g.ksq(i) * c);
    out
}

/// Dealiased product of two fields.
pub fn pointwise_product(f: &SpectralScalar, g: &SpectralScalar) -> Result<SpectralScalar> {
    f.grid().check_same(g.grid())?;
    let pg = ProductGrid::new(f.grid(), 2);
    let phys = pg.to_physical(&[f, g]);
    let prod: Vec<f64> = phys[0].iter().zip(&phys[1]).map(|(a, b)| a * b).collect();
    Ok(pg.from_physical(&[&prod]).remove(0))
}

/// `(∫ |f|^p)^{1/p}` by collocation quadrature; `p = inf` gives the max norm.
pub fn lp_norm(f: &SpectralScalar, p: f64) -> Result<f64> {
    let v = transform_inverse(f)?;
    Ok(lp_of_samples(&v, p, f.grid().cell_volume()))
}

pub fn lp_of_samples(v: &[f64], p: f64, cell: f64) -> f64 {
    if p.is_infinite() {
        return v.iter().map(|x| x.abs()).fold(0.0, f64::max);
    }
    (v.iter().map(|x| x.abs().powf(p)).sum::<f64>() * cell).powf(1.0 / p)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::transform_forward;
    use crate::spectral::grid::{make_grid, Dealias};
    use std::f64::consts::PI;

    #[test]
    fn derivative_of_sine() {
        let g = make_grid(2, 16, 2.0 * PI, Dealias::OneHalf).unwrap();
        let n = g.n();
        let h = g.box_length() / n as f64;
        let s: Vec<f64> = (0..g.len())
            .map(|i| (3.0 * (i / n) as f64 * h).sin())
            .collect();
        let f = transform_forward(&g, &s).unwrap();
        let df = transform_inverse(&partial_derivative(&f, 0).unwrap()).unwrap();
        for (i, v) in df.iter().enumerate() {
            assert!((v - 3.0 * (3.0 * (i / n) as f64 * h).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn lambda_needs_mean_zero() {
        let g = make_grid(2, 8, 1.0, Dealias::OneHalf).unwrap();
        let mut f = SpectralScalar::single_mode(&g, &[1, 0], 1.0, 0.0).unwrap();
        assert!(apply_lambda(&f, -0.5).is_ok());
        f.coeffs_mut()[0] = Complex64::new(0.1, 0.0);
        assert!(matches!(
            apply_lambda(&f, -0.5),
            Err(Error::NegativeOrderOnNonzeroMean(_))
        ));
        assert!(apply_lambda(&f, 0.0).unwrap().max_abs_diff(&f) == 0.0);
    }

    #[test]
    fn product_of_modes_is_exact() {
        let g = make_grid(2, 8, 2.0 * PI, Dealias::OneHalf).unwrap();
        let a = SpectralScalar::single_mode(&g, &[2, 1], 1.0, 0.0).unwrap();
        let b = SpectralScalar::single_mode(&g, &[1, 1], 1.0, 0.0).unwrap();
        let p = pointwise_product(&a, &b).unwrap();
        // cos(A)cos(B) = (cos(A+B) + cos(A-B)) / 2
        let mut e = SpectralScalar::single_mode(&g, &[3, 2], 0.5, 0.0).unwrap();
        e.axpy(
            1.0,
            &SpectralScalar::single_mode(&g, &[1, 0], 0.5, 0.0).unwrap(),
        );
        assert!(p.max_abs_diff(&e) < 1e-15);
    }

    #[test]
    fn inner_product_is_integral() {
        let g = make_grid(2, 8, 3.0, Dealias::OneHalf).unwrap();
        let a = SpectralScalar::single_mode(&g, &[1, 2], 2.0, 0.3).unwrap();
        // ∫ (2 cos)^2 = 4 * L^2 / 2
        let v = inner_product_l2(&a, &a).unwrap();
        assert!((v - 2.0 * 9.0).abs() < 1e-12);
    }
}
