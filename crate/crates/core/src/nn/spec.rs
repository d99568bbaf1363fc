use std::str::FromStr;

use rand::distr::{Distribution, Uniform};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::Activation;
use crate::{Error, Result};

/// A hidden layer: width plus activation.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Layer {
    pub width: usize,
    pub activation: Activation,
}

/// Layer structure of a fully connected network. The output layer is always affine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NetworkSpec {
    pub input_dim: usize,
    pub layers: Vec<Layer>,
    pub output_dim: usize,
}

/// Address of a single parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ParamSlot {
    Weight { map: usize, row: usize, col: usize },
    Bias { map: usize, row: usize },
}

impl NetworkSpec {
    pub fn new(input_dim: usize, layers: Vec<Layer>, output_dim: usize) -> Result<Self> {
        let spec = NetworkSpec {
            input_dim,
            layers,
            output_dim,
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Hidden layers of one activation, given by their widths.
    pub fn uniform(
        input_dim: usize,
        widths: &[usize],
        activation: Activation,
        output_dim: usize,
    ) -> Result<Self> {
        let layers = widths
            .iter()
            .map(|&width| Layer { width, activation })
            .collect();
        Self::new(input_dim, layers, output_dim)
    }

    pub fn validate(&self) -> Result<()> {
        if self.input_dim == 0 || self.output_dim == 0 {
            return Err(Error::InvalidSpec(
                "input and output dims must be positive".into(),
            ));
        }
        if self.layers.iter().any(|l| l.width == 0) {
            return Err(Error::InvalidSpec("hidden widths must be positive".into()));
        }
        Ok(())
    }

    /// Number of hidden layers.
    pub fn depth(&self) -> usize {
        self.layers.len()
    }

    /// Largest hidden width (0 for an affine network).
    pub fn width(&self) -> usize {
        self.layers.iter().map(|l| l.width).max().unwrap_or(0)
    }

    /// `[input, hidden..., output]`
    pub fn dims(&self) -> Vec<usize> {
        let mut dims = Vec::with_capacity(self.layers.len() + 2);
        dims.push(self.input_dim);
        dims.extend(self.layers.iter().map(|l| l.width));
        dims.push(self.output_dim);
        dims
    }

    pub fn n_maps(&self) -> usize {
        self.layers.len() + 1
    }

    /// Activation applied after affine map `i`.
    pub fn activation_after(&self, map: usize) -> Activation {
        self.layers
            .get(map)
            .map(|l| l.activation)
            .unwrap_or(Activation::Identity)
    }

    pub fn count_params(&self) -> usize {
        self.dims().windows(2).map(|w| w[1] * w[0] + w[1]).sum()
    }

    /// Start offset of each affine map's block. A block stores the weight matrix row-major,
    /// followed by the bias.
    pub fn offsets(&self) -> Vec<usize> {
        let mut acc = 0;
        self.dims()
            .windows(2)
            .map(|w| {
                let start = acc;
                acc += w[1] * w[0] + w[1];
                start
            })
            .collect()
    }

    pub fn slot_index(&self, slot: ParamSlot) -> Result<usize> {
        let dims = self.dims();
        let offsets = self.offsets();
        let (map, row, col) = match slot {
            ParamSlot::Weight { map, row, col } => (map, row, Some(col)),
            ParamSlot::Bias { map, row } => (map, row, None),
        };
        if map >= offsets.len() || row >= dims[map + 1] {
            return Err(Error::invalid(format!("slot {slot:?} out of range")));
        }
        let (fan_in, fan_out) = (dims[map], dims[map + 1]);
        match col {
            Some(c) if c >= fan_in => Err(Error::invalid(format!("slot {slot:?} out of range"))),
            Some(c) => Ok(offsets[map] + row * fan_in + c),
            None => Ok(offsets[map] + fan_out * fan_in + row),
        }
    }

    /// Inverse of [`slot_index`](Self::slot_index).
    pub fn slot_of(&self, index: usize) -> Option<ParamSlot> {
        let dims = self.dims();
        for (map, &start) in self.offsets().iter().enumerate() {
            let (fan_in, fan_out) = (dims[map], dims[map + 1]);
            let size = fan_out * fan_in + fan_out;
            if index < start + size {
                let local = index - start;
                return Some(if local < fan_out * fan_in {
                    ParamSlot::Weight {
                        map,
                        row: local / fan_in,
                        col: local % fan_in,
                    }
                } else {
                    ParamSlot::Bias {
                        map,
                        row: local - fan_out * fan_in,
                    }
                });
            }
        }
        None
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum InitScheme {
    /// Weights uniform on `[-sqrt(6/fan_in), sqrt(6/fan_in)]`, biases zero.
    UniformHe,
    Zero,
    Explicit(Vec<f64>),
}

impl FromStr for InitScheme {
    type Err = Error;

    /// `explicit` parses to an empty vector; fill it before use.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform-he" => Ok(InitScheme::UniformHe),
            "zero" => Ok(InitScheme::Zero),
            "explicit" => Ok(InitScheme::Explicit(Vec::new())),
            other => Err(Error::UnknownScheme(other.to_string())),
        }
    }
}

/// Flat parameter storage following [`NetworkSpec::offsets`].
#[derive(Clone, Debug, PartialEq, Default)]
pub struct ParameterVector {
    data: Vec<f64>,
}

impl ParameterVector {
    pub fn zeros(spec: &NetworkSpec) -> Self {
        ParameterVector {
            data: vec![0.0; spec.count_params()],
        }
    }

    pub fn from_vec(spec: &NetworkSpec, data: Vec<f64>) -> Result<Self> {
        let pv = ParameterVector { data };
        pv.check(spec)?;
        Ok(pv)
    }

    pub fn init(spec: &NetworkSpec, seed: u64, scheme: &InitScheme) -> Result<Self> {
        spec.validate()?;
        match scheme {
            InitScheme::Zero => Ok(Self::zeros(spec)),
            InitScheme::Explicit(values) => Self::from_vec(spec, values.clone()),
            InitScheme::UniformHe => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut data = Vec::with_capacity(spec.count_params());
                for w in spec.dims().windows(2) {
                    let (fan_in, fan_out) = (w[0], w[1]);
                    let bound = (6.0 / fan_in as f64).sqrt();
                    let law = Uniform::new_inclusive(-bound, bound)
                        .map_err(|e| Error::invalid(e.to_string()))?;
                    data.extend((0..fan_in * fan_out).map(|_| law.sample(&mut rng)));
                    data.extend(std::iter::repeat_n(0.0, fan_out));
                }
                Ok(ParameterVector { data })
            }
        }
    }

    pub fn check(&self, spec: &NetworkSpec) -> Result<()> {
        let expected = spec.count_params();
        if self.data.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                got: self.data.len(),
            });
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn get(&self, spec: &NetworkSpec, slot: ParamSlot) -> Result<f64> {
        Ok(self.data[spec.slot_index(slot)?])
    }

    pub fn set(&mut self, spec: &NetworkSpec, slot: ParamSlot, value: f64) -> Result<()> {
        let i = spec.slot_index(slot)?;
        self.data[i] = value;
        Ok(())
    }

    /// Projects onto `[-bound, bound]^d`.
    pub fn clip(&mut self, bound: f64) {
        for v in &mut self.data {
            *v = v.clamp(-bound, bound);
        }
    }
}
