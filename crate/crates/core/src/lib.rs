//! Operator learning with DeepONet under Sobolev (physics-informed) training.
//!
//! The crate is organised bottom-up:
//!
//! - [`nn`]: feedforward ReLU / ReQU networks, exact forward evaluation, second-order
//!   input jets and parameter gradients (including gradients *through* the jets).
//! - [`spectral`]: Fourier fields on the torus, the grid encoder and the pseudo-spectral
//!   reconstruction, Sobolev norms and a Gaussian random-field ensemble.
//! - [`pde`]: the ground-truth solution operator of `-Δu + cu = f` on the torus.
//! - [`trunk`]: partition-of-unity bumps, exact ReQU gadgets and local polynomial
//!   approximants used to build trunk networks.
//! - [`model`]: the generalized DeepONet `Σ_k B_k(D f) T_k(y)` and branch depth regimes.
//! - [`train`]: residual losses, the clipped gradient-descent trainer, generalization-gap
//!   estimation and the generalization envelope.
//!
//! Data-parallel loops (loss and gradient evaluation over sample pairs) go through
//! [`exec::Exec`], which uses rayon when the `parallel` feature is enabled and falls back
//! to a sequential loop otherwise. Reductions always run in a fixed order, so both paths
//! produce bit-identical results.

pub mod error;
pub mod exec;
pub mod model;
pub mod multi_index;
pub mod nn;
pub mod pde;
pub mod quadrature;
pub mod spectral;
pub mod train;
pub mod trunk;

pub use error::{Error, Result};
pub use exec::Exec;
