use std::f64::consts::TAU;

use proptest::prelude::*;
use tt_flock::spectral::{
    apply_lambda, divergence, gradient, hdot_sq, inner_product_l2, laplacian, make_grid,
    partial_derivative, pointwise_product, random_field, rng_from_seed, transform_forward,
    transform_inverse, Dealias, SpectralScalar, Spectrum,
};

fn field(d: usize, n: usize, seed: u64, cutoff: usize) -> SpectralScalar {
    let g = make_grid(d, n, TAU, Dealias::OneHalf).unwrap();
    random_field(&g, Spectrum::Flat, cutoff, &mut rng_from_seed(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn transform_roundtrip(seed in any::<u64>(), d in 2usize..=3) {
        let n = if d == 2 { 16 } else { 8 };
        let f = field(d, n, seed, n / 2 - 1);
        let x = transform_inverse(&f).unwrap();
        let back = transform_forward(f.grid(), &x).unwrap();
        prop_assert!(back.max_abs_diff(&f) <= 1e-13 * f.coeff_norm().max(1.0));
    }

    #[test]
    fn random_fields_are_real_and_mean_free(seed in any::<u64>()) {
        let f = field(2, 16, seed, 5);
        prop_assert!(f.hermitian_defect() <= 1e-15);
        prop_assert_eq!(f.mean(), 0.0);
    }

    #[test]
    fn derivatives_preserve_reality(seed in any::<u64>(), axis in 0usize..2) {
        let f = field(2, 16, seed, 7);
        let df = partial_derivative(&f, axis).unwrap();
        prop_assert!(df.hermitian_defect() <= 1e-13 * f.coeff_norm().max(1.0));
        let p = pointwise_product(&f, &df).unwrap();
        prop_assert!(p.hermitian_defect() <= 1e-12 * f.coeff_norm().powi(2).max(1.0));
    }

    #[test]
    fn lambda_is_a_group(seed in any::<u64>(), s in -2.0f64..2.0, t in -2.0f64..2.0) {
        let f = field(2, 16, seed, 6);
        let a = apply_lambda(&apply_lambda(&f, s).unwrap(), t).unwrap();
        let b = apply_lambda(&f, s + t).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-10 * b.coeff_norm().max(1e-300));
    }

    #[test]
    fn parseval_matches_samples(seed in any::<u64>()) {
        let f = field(2, 16, seed, 7);
        let x = transform_inverse(&f).unwrap();
        let cell = (TAU / 16.0).powi(2);
        let physical: f64 = x.iter().map(|v| v * v).sum::<f64>() * cell;
        let spectral = inner_product_l2(&f, &f).unwrap();
        prop_assert!((physical - spectral).abs() <= 1e-12 * spectral.max(1e-300));
        prop_assert!((hdot_sq(&f, 0.0).unwrap() - spectral).abs() <= 1e-12 * spectral.max(1e-300));
    }
}

#[test]
fn divergence_of_gradient_is_laplacian() {
    let f = field(3, 8, 11, 3);
    let a = divergence(&gradient(&f).unwrap()).unwrap();
    let b = laplacian(&f);
    assert!(a.max_abs_diff(&b) <= 1e-12 * b.coeff_norm());
}

#[test]
fn negative_order_needs_zero_mean() {
    let g = make_grid(2, 8, TAU, Dealias::OneHalf).unwrap();
    let f = SpectralScalar::single_mode(&g, &[0, 0], 1.0, 0.0).unwrap();
    assert!(apply_lambda(&f, -0.5).is_err());
    assert!(apply_lambda(&f, 0.5).is_ok());
}

#[test]
fn single_mode_derivative_is_exact() {
    let g = make_grid(2, 16, TAU, Dealias::TwoThirds).unwrap();
    let f = SpectralScalar::single_mode(&g, &[3, -2], 1.0, 0.3).unwrap();
    let x = transform_inverse(&partial_derivative(&f, 0).unwrap()).unwrap();
    let h = TAU / 16.0;
    for (i, v) in x.iter().enumerate() {
        let (a, b) = ((i / 16) as f64 * h, (i % 16) as f64 * h);
        let expect = -3.0 * (3.0 * a - 2.0 * b + 0.3).sin();
        assert!((v - expect).abs() <= 1e-12, "{v} vs {expect}");
    }
}

#[test]
fn mismatched_grids_are_rejected() {
    let a = field(2, 16, 1, 4);
    let b = field(2, 8, 1, 2);
    assert!(pointwise_product(&a, &b).is_err());
}
