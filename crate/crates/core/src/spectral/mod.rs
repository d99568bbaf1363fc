//! Fourier fields on the unit torus `T^d`, the grid encoder `D`, the pseudo-spectral
//! reconstruction `P`, Sobolev norms and a random-field ensemble.
//!
//! Sobolev norms use the weight `(1 + 4 pi^2 |k|^2)^s`.

mod field;
mod grid;
mod io;
mod norms;
mod sampler;

pub use field::{derivative_symbol, norm_sq, FourierField, ModeGrid};
pub use grid::{
    discrete_inner, discrete_inner_complex, encode_d, grid_point, grid_size, mode_samples, project,
    reconstruct_p, GridSample,
};
pub use io::{field_from_text, field_to_text, grid_from_csv, grid_to_csv};
pub use norms::{
    lipschitz_const_p, sobolev_norm, sobolev_seminorm, sobolev_weight, wninf_norm_estimate,
};
pub use sampler::{sample_random_field, Ensemble};
