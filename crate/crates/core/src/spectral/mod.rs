//! Periodic grids, FFT transforms and spectral operators.

mod fft;
mod field;
mod grid;
mod ops;
mod random;

pub use field::{
    transform_forward, transform_inverse, ProductGrid, SpectralScalar, SpectralVector,
};
pub use grid::{make_grid, padded_size, Dealias, Grid, GridSpec};
pub use ops::{
    apply_lambda, divergence, gradient, hdot_sq, inner_product_l2, inner_product_vec, laplacian,
    lp_norm, lp_of_samples, multi_derivative, partial_derivative, pointwise_product,
};
pub use random::{random_field, rng_from_seed, Spectrum};
