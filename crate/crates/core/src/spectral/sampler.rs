use std::f64::consts::PI;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::field::{norm_sq, FourierField, ModeGrid};
use super::norms::{sobolev_norm, sobolev_weight};
use crate::{Error, Result};

const DECAY_MARGIN: f64 = 0.5;

/// Gaussian spectral-decay ensemble with a hard cap on the `H^s` norm.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Ensemble {
    pub dim: usize,
    /// Smoothness `s`.
    pub smoothness: f64,
    /// Band limit `K_f`.
    pub max_mode: usize,
    /// Cap `M_bound` on `||f||_{H^s}`; infinite disables clipping.
    pub bound: f64,
}

impl Ensemble {
    pub fn new(dim: usize, smoothness: f64, max_mode: usize, bound: f64) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("dimension must be positive"));
        }
        if !(smoothness > 0.0) {
            return Err(Error::invalid("smoothness must be positive"));
        }
        if max_mode < 1 {
            return Err(Error::invalid("band limit must be at least 1"));
        }
        if !(bound >= 0.0) {
            return Err(Error::invalid("norm bound must be nonnegative"));
        }
        Ok(Ensemble {
            dim,
            smoothness,
            max_mode,
            bound,
        })
    }

    /// Standard deviation of `|c_k|`: `(1 + 4 pi^2 |k|^2)^{-(s + d/2 + 1/2)/2}`.
    pub fn sigma(&self, k: &[i64]) -> f64 {
        let e = self.smoothness + self.dim as f64 / 2.0 + DECAY_MARGIN;
        (1.0 + 4.0 * PI * PI * norm_sq(k)).powf(-e / 2.0)
    }

    /// Draw before clipping.
    pub fn draw_unclipped(&self, seed: u64) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let grid = ModeGrid {
            dim: self.dim,
            max_mode: self.max_mode,
        };
        let mut f = FourierField::zeros(self.dim, self.max_mode);
        let center = grid.len() / 2;
        for i in center..grid.len() {
            let k = grid.mode(i);
            let sigma = self.sigma(&k);
            let g1: f64 = StandardNormal.sample(&mut rng);
            let c = if i == center {
                Complex64::new(sigma * g1, 0.0)
            } else {
                let g2: f64 = StandardNormal.sample(&mut rng);
                Complex64::new(g1, g2) * (sigma / 2f64.sqrt())
            };
            f.set_pair(&k, c).expect("mode inside band");
        }
        f
    }

    pub fn draw(&self, seed: u64) -> FourierField {
        let f = self.draw_unclipped(seed);
        let norm = sobolev_norm(&f, self.smoothness);
        if norm > self.bound {
            f.scale(self.bound / norm)
        } else {
            f
        }
    }

    /// `E ||f||_{H^r}^2` of the unclipped ensemble.
    pub fn second_moment(&self, r: f64) -> f64 {
        ModeGrid {
            dim: self.dim,
            max_mode: self.max_mode,
        }
        .modes()
        .map(|k| sobolev_weight(&k, r) * self.sigma(&k).powi(2))
        .sum()
    }
}

/// One draw from [`Ensemble`].
pub fn sample_random_field(
    seed: u64,
    dim: usize,
    smoothness: f64,
    max_mode: usize,
    bound: f64,
) -> Result<FourierField> {
    Ok(Ensemble::new(dim, smoothness, max_mode, bound)?.draw(seed))
}
