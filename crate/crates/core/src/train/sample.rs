use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral::{encode_d, Ensemble, FourierField, GridSample};
use crate::Result;

/// An input function together with its encoder samples.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub field: FourierField,
    pub grid: GridSample,
}

impl Sample {
    pub fn new(field: FourierField, n_grid: usize) -> Self {
        let grid = encode_d(&field, n_grid);
        Sample { field, grid }
    }
}

/// `M` input functions and `P` collocation points, with `f_i(y_j)` cached.
#[derive(Clone, Debug)]
pub struct SampleSet {
    pub samples: Vec<Sample>,
    pub points: Vec<Vec<f64>>,
    /// Row-major `M x P`.
    pub rhs: Vec<f64>,
}

impl SampleSet {
    pub fn new(samples: Vec<Sample>, points: Vec<Vec<f64>>) -> Self {
        let rhs = samples
            .iter()
            .flat_map(|s| points.iter().map(move |y| s.field.evaluate(y)))
            .collect();
        SampleSet {
            samples,
            points,
            rhs,
        }
    }

    /// `M` ensemble draws and `P` uniform points; draw `i` uses seed `seed + i`, the points
    /// use their own stream.
    pub fn draw(ensemble: &Ensemble, n_grid: usize, m: usize, p: usize, seed: u64) -> Result<Self> {
        let samples = (0..m)
            .map(|i| Sample::new(ensemble.draw(seed.wrapping_add(i as u64)), n_grid))
            .collect();
        let points = uniform_points(ensemble.dim, p, seed ^ 0x5E_ED0F_9017);
        Ok(Self::new(samples, points))
    }

    pub fn m(&self) -> usize {
        self.samples.len()
    }

    pub fn p(&self) -> usize {
        self.points.len()
    }
}

/// `n` i.i.d. uniform points in `[0,1]^d`.
pub fn uniform_points(dim: usize, n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| (0..dim).map(|_| rng.random::<f64>()).collect())
        .collect()
}
