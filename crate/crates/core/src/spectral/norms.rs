use std::f64::consts::PI;

use super::field::{norm_sq, FourierField, ModeGrid};
use crate::multi_index;
use crate::{Error, Result};

/// `(1 + 4 pi^2 |k|^2)^s`
pub fn sobolev_weight(k: &[i64], s: f64) -> f64 {
    (1.0 + 4.0 * PI * PI * norm_sq(k)).powf(s)
}

/// `(sum_k (1 + 4 pi^2 |k|^2)^s |c_k|^2)^(1/2)`
pub fn sobolev_norm(f: &FourierField, s: f64) -> f64 {
    f.modes()
        .modes()
        .zip(f.coeffs())
        .map(|(k, c)| sobolev_weight(&k, s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// `(sum_k |k|^{2s} |c_k|^2)^(1/2)` with `|0|^0 = 1`.
pub fn sobolev_seminorm(f: &FourierField, s: f64) -> f64 {
    f.modes()
        .modes()
        .zip(f.coeffs())
        .map(|(k, c)| norm_sq(&k).powf(s) * c.norm_sqr())
        .sum::<f64>()
        .sqrt()
}

/// Lower estimate of `max_{|alpha| <= n} ||D^alpha f||_inf` from a uniform grid with
/// `grid_res` points per axis.
pub fn wninf_norm_estimate(f: &FourierField, n: usize, grid_res: usize) -> Result<f64> {
    let required = 2 * f.max_mode() + 1;
    if grid_res < required {
        return Err(Error::Undersampled { grid_res, required });
    }
    let mut best = 0.0f64;
    for alpha in multi_index::up_to_degree(f.dim(), n) {
        let g = f.derivative_field(&alpha);
        let m = g
            .sample_uniform(grid_res)
            .iter()
            .fold(0.0f64, |acc, v| acc.max(v.abs()));
        best = best.max(m);
    }
    Ok(best)
}

/// `sqrt(sum_{|k|_inf <= N} |k|^{2 s'} / (2N+1)^d)`
pub fn lipschitz_const_p(n: usize, d: usize, s_prime: f64) -> f64 {
    let grid = ModeGrid {
        dim: d,
        max_mode: n,
    };
    let total: f64 = grid
        .modes()
        .map(|k| {
            let r2 = norm_sq(&k);
            if r2 == 0.0 {
                0.0
            } else {
                r2.powf(s_prime)
            }
        })
        .sum();
    (total / grid.len() as f64).sqrt()
}
