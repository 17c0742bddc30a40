// Fourier multipliers, dealiased products and fractional norms on a periodic box.

use std::f64::consts::TAU;

use tt_flock::spectral::{
    apply_lambda, hdot_sq, make_grid, partial_derivative, pointwise_product, Dealias,
    SpectralScalar,
};

fn main() {
    let g = make_grid(2, 32, TAU, Dealias::OneHalf).unwrap();
    let a = SpectralScalar::single_mode(&g, &[3, 0], 1.0, 0.0).unwrap();
    let b = SpectralScalar::single_mode(&g, &[0, 4], 1.0, 0.0).unwrap();

    // Λ^s of a single mode scales it by |k|^s.
    let half = apply_lambda(&a, 0.5).unwrap();
    println!(
        "|Λ^0.5 cos 3x| / |cos 3x| = {:.6}",
        (hdot_sq(&half, 0.0).unwrap() / hdot_sq(&a, 0.0).unwrap()).sqrt()
    );

    let da = partial_derivative(&a, 0).unwrap();
    println!(
        "‖∂x cos 3x‖² / ‖cos 3x‖² = {:.6}",
        hdot_sq(&da, 0.0).unwrap() / hdot_sq(&a, 0.0).unwrap()
    );

    // cos 3x cos 4y has four modes of amplitude 1/4, all resolved.
    let p = pointwise_product(&a, &b).unwrap();
    let m = g.flat_of(&[3, 4]).unwrap();
    println!("product coefficient at (3,4): {:.6}", p.coeffs()[m].re);
}
