//! Trunk construction: bumps and their cover boxes, exact ReQU gadgets, local polynomial
//! coefficient functionals and the assembled local approximant.
//!
//! The raw bumps `s_m` are realizable exactly by ReQU networks but do not sum to one where
//! cells overlap (the sum reaches 1.5 at `x = 7/16` for two cells). Approximation
//! experiments use the normalized family `s_m / sum s_m'`, which is a partition of unity
//! but not itself a ReQU network.

mod bump;
mod circuit;
mod gadgets;
mod local_poly;
mod poly;
mod vk;

pub use bump::{
    pu_axis_triple, pu_normalized, pu_normalized_derivative, pu_raw_sum, s_m, s_m_derivative,
    s_m_scalar, s_m_triple, s_scalar, s_triple, CoverBox, KNOTS,
};
pub use circuit::{Circuit, Expr, Gate};
pub use gadgets::{
    bump_net, formula_budget, monomial_net, product_net, trunk_basis, trunk_element_net,
    BasisElement, TrunkBasis,
};
pub use local_poly::{averaged_taylor_coeffs, c2_constant, local_poly_coeffs_ls, LocalPoly};
pub use poly::{Polynomial, SmoothFunction};
pub use vk::{assemble_vk, h2_error, Assembled, CoeffMode};
