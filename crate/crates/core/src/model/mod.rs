//! Branch/trunk operator networks and the branch shape regimes.

mod checkpoint;
mod deeponet;
mod regime;

pub use checkpoint::{model_from_text, model_to_text};
pub(crate) use deeponet::combine_jets;
pub use deeponet::{BranchLayout, Component, DeepONet, ModelConfig, Role, TrunkMode};
pub use regime::{regime_shapes, BranchRegime};
