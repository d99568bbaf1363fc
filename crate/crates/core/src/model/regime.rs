use crate::nn::{Activation, NetworkSpec};
use crate::{Error, Result};

/// Branch shape family at a fixed parameter budget `q`. `lambda = 1` is shallow and wide,
/// `lambda = 2` deep and narrow with width `W0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BranchRegime {
    pub lambda: f64,
    pub budget: usize,
    pub base_width: usize,
    pub base_depth: usize,
}

impl BranchRegime {
    pub fn new(lambda: f64, budget: usize, base_width: usize, base_depth: usize) -> Result<Self> {
        if !(1.0..=2.0).contains(&lambda) {
            return Err(Error::OutOfRegime(format!(
                "lambda {lambda} outside [1, 2]"
            )));
        }
        if budget == 0 || base_width == 0 || base_depth == 0 {
            return Err(Error::OutOfRegime(
                "budget, base width and base depth must be positive".into(),
            ));
        }
        Ok(BranchRegime {
            lambda,
            budget,
            base_width,
            base_depth,
        })
    }

    /// `(width, depth)` for a net with `input_dim` inputs and `output_dim` outputs.
    pub fn shape(&self, input_dim: usize, output_dim: usize) -> (usize, usize) {
        regime_shapes(
            self.budget,
            self.lambda,
            self.base_width,
            self.base_depth,
            input_dim,
            output_dim,
        )
    }

    pub fn spec(&self, input_dim: usize, output_dim: usize) -> Result<NetworkSpec> {
        let (w, l) = self.shape(input_dim, output_dim);
        NetworkSpec::uniform(input_dim, &vec![w; l], Activation::Sigma1, output_dim)
    }
}

fn stack_params(input_dim: usize, width: usize, depth: usize, output_dim: usize) -> usize {
    if depth == 0 {
        return input_dim * output_dim + output_dim;
    }
    (input_dim + 1) * width + (depth - 1) * (width + 1) * width + (width + 1) * output_dim
}

/// Width `max(W0, round(q^{(2 - lambda)/2}))`; depth is the `L >= L0` whose parameter count
/// for the given input and output dims is closest to `q` on a log scale.
pub fn regime_shapes(
    q: usize,
    lambda: f64,
    base_width: usize,
    base_depth: usize,
    input_dim: usize,
    output_dim: usize,
) -> (usize, usize) {
    let width = base_width.max((q as f64).powf((2.0 - lambda) / 2.0).round() as usize);
    let miss = |l: usize| {
        (stack_params(input_dim, width, l, output_dim) as f64 / q as f64)
            .ln()
            .abs()
    };
    let mut depth = base_depth.max(1);
    while miss(depth + 1) < miss(depth) {
        depth += 1;
    }
    (width, depth)
}
