use num_complex::Complex64;
use rand::Rng;

use super::config::InitSpec;
use crate::diagnostics::hm_norm_fields;
use crate::error::{Error, Result};
use crate::models::{Fields, Form, State};
use crate::spectral::{
    random_field, rng_from_seed, Grid, SpectralScalar, SpectralVector, Spectrum,
};

/// Regularity index of the smallness norm `‖(u0, η0)‖_{H^{max(3, d-2)}}`.
pub fn smallness_index(d: usize) -> u32 {
    3u32.max(d.saturating_sub(2) as u32)
}

fn in_band(grid: &Grid, i: usize, k0: f64) -> bool {
    i != 0 && !grid.is_nyquist(i) && grid.ksq(i) <= k0 * k0 * (1.0 + 1e-12)
}

fn bump(grid: &Grid, k0: f64) -> SpectralScalar {
    let mut f = SpectralScalar::zeros(grid);
    let xc = 0.5 * grid.box_length();
    for i in 0..grid.len() {
        if i == 0 || grid.is_nyquist(i) {
            continue;
        }
        let k = grid.kvec(i);
        let phase = -(k[0] + k[1] + k[2]) * xc;
        let amp = (-0.5 * grid.ksq(i) / (k0 * k0)).exp();
        f.coeffs_mut()[i] = Complex64::from_polar(amp, phase);
    }
    f
}

fn power(grid: &Grid, a: f64, k0: f64, rng: &mut rand_chacha::ChaCha8Rng) -> SpectralScalar {
    let mut f = SpectralScalar::zeros(grid);
    for i in 0..grid.len() {
        let c = grid.conj_index(i);
        if c <= i || !in_band(grid, i, k0) {
            continue;
        }
        let phase = rng.random::<f64>() * std::f64::consts::TAU;
        let z = Complex64::from_polar(grid.ksq(i).powf(0.5 * a), phase);
        f.coeffs_mut()[i] = z;
        f.coeffs_mut()[c] = z.conj();
    }
    f
}

/// Real, mean-zero perturbation data scaled so that the smallness norm equals `epsilon`.
///
/// `decay_s` is the negative Sobolev index the data must have finite norm in.
pub fn make_initial_data(grid: &Grid, spec: &InitSpec, decay_s: Option<f64>) -> Result<State> {
    let d = grid.d();
    let k0 = spec.k0();
    if !(k0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "k0 = {k0} must be positive"
        )));
    }
    let eps = spec.epsilon();
    if !(eps >= 0.0 && eps.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "epsilon = {eps} must be non-negative"
        )));
    }
    let mut rng = rng_from_seed(spec.seed());
    let scalars: Vec<SpectralScalar> = match *spec {
        InitSpec::LowFreqBump { .. } => {
            let b = bump(grid, k0);
            (0..=d)
                .map(|_| b.scaled(rng.random_range(-1.0..1.0)))
                .collect()
        }
        InitSpec::PowerProfile { a, .. } => {
            if let Some(s) = decay_s {
                if a - s <= -(d as f64) / 2.0 {
                    return Err(Error::InvalidParameter(format!(
                        "profile exponent {a} gives infinite Ḣ^-s norm for s = {s}"
                    )));
                }
            }
            (0..=d).map(|_| power(grid, a, k0, &mut rng)).collect()
        }
        InitSpec::RandomSmall { .. } => {
            let cutoff = (k0 / grid.fundamental()).floor() as usize;
            (0..=d)
                .map(|_| {
                    let mut f = random_field(grid, Spectrum::Flat, cutoff, &mut rng);
                    let ksq = grid.ksq_table().to_vec();
                    f.map_modes(|i, z| {
                        if ksq[i] <= k0 * k0 {
                            z
                        } else {
                            Complex64::default()
                        }
                    });
                    f
                })
                .collect()
        }
    };
    let mut it = scalars.into_iter();
    let comps: Vec<SpectralScalar> = (0..d).map(|_| it.next().unwrap()).collect();
    let mut fields = Fields::new(SpectralVector::from_components(comps)?, it.next().unwrap())?;
    let norm = hm_norm_fields(&fields, smallness_index(d))?;
    if eps == 0.0 {
        fields = Fields::zeros(grid);
    } else if norm == 0.0 {
        return Err(Error::InvalidParameter(
            "initial band contains no modes; increase k0".into(),
        ));
    } else {
        fields.scale(eps / norm);
    }
    Ok(State::new(fields, 0.0, Form::Perturbation))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{make_grid, Dealias};

    #[test]
    fn data_is_normalized_real_and_mean_zero() {
        let g = make_grid(2, 32, 20.0, Dealias::OneHalf).unwrap();
        for spec in [
            InitSpec::LowFreqBump {
                epsilon: 1e-3,
                k0: 1.0,
                seed: 1,
            },
            InitSpec::PowerProfile {
                epsilon: 1e-3,
                a: -0.4,
                k0: 2.0,
                seed: 2,
            },
            InitSpec::RandomSmall {
                epsilon: 1e-3,
                k0: 2.0,
                seed: 3,
            },
        ] {
            let s = make_initial_data(&g, &spec, Some(0.5)).unwrap();
            let h = hm_norm_fields(&s.fields, 3).unwrap();
            assert!((h - 1e-3).abs() < 1e-15, "{spec:?}");
            assert!(s.fields.hermitian_defect() < 1e-18);
            assert!(s.fields.scalars().all(|c| c.coeffs()[0].norm() == 0.0));
        }
        let zero = make_initial_data(
            &g,
            &InitSpec::RandomSmall {
                epsilon: 0.0,
                k0: 2.0,
                seed: 0,
            },
            None,
        )
        .unwrap();
        assert_eq!(hm_norm_fields(&zero.fields, 3).unwrap(), 0.0);
        assert!(make_initial_data(
            &g,
            &InitSpec::PowerProfile {
                epsilon: 1e-3,
                a: -1.6,
                k0: 2.0,
                seed: 0
            },
            Some(0.5)
        )
        .is_err());
    }
}
