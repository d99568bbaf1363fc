//! Sobolev losses, the clipped gradient-descent trainer, generalization-gap estimates and
//! the envelope formula they are compared against.

mod envelope;
mod gap;
mod loss;
mod sample;
mod trainer;

pub use envelope::{theoretical_envelope, BoundEnvelope};
pub use gap::{generalization_gap, relative_errors, GapReport, RelativeErrors};
pub use loss::{
    loss_and_grad, loss_and_grad_with, loss_ld, loss_lm, loss_ls, midpoint_points,
    trunk_operator_values, LossEstimate,
};
pub use sample::{uniform_points, Sample, SampleSet};
pub use trainer::{sharpness, train, TrainConfig};
