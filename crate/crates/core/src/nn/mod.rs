//! Feedforward networks with ReLU (`sigma1`) and ReQU (`sigma2`) activations.
//!
//! A network is described by a [`NetworkSpec`] and a flat [`ParameterVector`]. Evaluation
//! comes in three flavours:
//!
//! - [`forward`]: plain outputs,
//! - [`forward_jet`]: value, input gradient and Hessian (or only its trace) of every
//!   output, by forward-mode second-order Taylor arithmetic,
//! - [`backprop_value`] / [`backprop_jet`]: parameter gradients of a weighted combination
//!   of output values, or of output jets (reverse mode through the forward jet).
//!
//! Derivatives at activation kinks use the indicator `[z > 0]`, so `sigma1'(0) = 0` and
//! `sigma2''(0) = 0`.

mod activation;
mod backprop;
mod eval;
mod jet;
mod spec;
pub(crate) mod text;

pub use activation::Activation;
pub use backprop::{accumulate_jet_grad, accumulate_value_grad, backprop_jet, backprop_value};
pub use eval::{forward, forward_jet};
pub use jet::{Jet2, JetMode, JetSeed, SecondOrder};
pub use spec::{InitScheme, Layer, NetworkSpec, ParamSlot, ParameterVector};
pub use text::{network_from_text, network_to_text};

use crate::Result;

/// A spec bundled with its parameters.
#[derive(Clone, Debug, PartialEq)]
pub struct Network {
    pub spec: NetworkSpec,
    pub params: ParameterVector,
}

impl Network {
    pub fn new(spec: NetworkSpec, params: ParameterVector) -> Result<Self> {
        params.check(&spec)?;
        Ok(Network { spec, params })
    }

    pub fn init(spec: NetworkSpec, seed: u64, scheme: &InitScheme) -> Result<Self> {
        let params = ParameterVector::init(&spec, seed, scheme)?;
        Ok(Network { spec, params })
    }

    pub fn forward(&self, x: &[f64]) -> Result<Vec<f64>> {
        forward(&self.spec, self.params.as_slice(), x)
    }

    /// First output only.
    pub fn eval(&self, x: &[f64]) -> Result<f64> {
        Ok(self.forward(x)?[0])
    }

    pub fn jet(&self, x: &[f64], mode: JetMode) -> Result<Vec<Jet2>> {
        forward_jet(&self.spec, self.params.as_slice(), x, mode)
    }

    pub fn depth(&self) -> usize {
        self.spec.depth()
    }

    pub fn width(&self) -> usize {
        self.spec.width()
    }
}
