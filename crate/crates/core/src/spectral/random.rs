use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::field::SpectralScalar;
use super::grid::Grid;

/// Amplitude profile of random band-limited fields as a function of `|k|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Spectrum {
    Flat,
    Power { a: f64 },
    Gaussian { width: f64 },
}

impl Spectrum {
    pub fn amplitude(&self, k: f64) -> f64 {
        match *self {
            Spectrum::Flat => 1.0,
            Spectrum::Power { a } => k.powf(a),
            Spectrum::Gaussian { width } => (-0.5 * (k / width).powi(2)).exp(),
        }
    }
}

/// Mean-zero real field with complex Gaussian coefficients scaled by `spectrum`,
/// supported on modes with `0 < |m|_inf <= cutoff`.
pub fn random_field(
    grid: &Grid,
    spectrum: Spectrum,
    cutoff: usize,
    rng: &mut ChaCha8Rng,
) -> SpectralScalar {
    let mut f = SpectralScalar::zeros(grid);
    let cutoff = cutoff.min(grid.retained_max()) as i64;
    for i in 1..grid.len() {
        let c = grid.conj_index(i);
        if c <= i || grid.is_nyquist(i) {
            continue;
        }
        let m = grid.multi_index(i);
        if m.iter().any(|x| x.abs() > cutoff) {
            continue;
        }
        let amp = spectrum.amplitude(grid.ksq(i).sqrt());
        let z = Complex64::new(normal(rng), normal(rng)) * (amp / std::f64::consts::SQRT_2);
        f.coeffs_mut()[i] = z;
        f.coeffs_mut()[c] = z.conj();
    }
    f
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}
