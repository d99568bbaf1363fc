//! The assembled approximant `v_K = sum_m q_m psi_m` with normalized bumps `psi_m`.

use super::bump::{pu_normalized_derivative, CoverBox};
use super::local_poly::{averaged_taylor_coeffs, local_poly_coeffs_ls, LocalPoly};
use super::poly::SmoothFunction;
use crate::multi_index;
use crate::quadrature::{composite_gauss, TensorRule};
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum CoeffMode {
    #[default]
    LeastSquares,
    AveragedTaylor,
}

#[derive(Clone, Debug)]
pub struct Assembled {
    pub cells: usize,
    pub order: usize,
    pub polys: Vec<LocalPoly>,
}

pub fn assemble_vk(
    v: &impl SmoothFunction,
    cells: usize,
    n: usize,
    mode: CoeffMode,
    quad_res: usize,
) -> Result<Assembled> {
    let polys = CoverBox::enumerate(cells, v.dim())
        .iter()
        .map(|cell| match mode {
            CoeffMode::LeastSquares => local_poly_coeffs_ls(v, cell, n, quad_res),
            CoeffMode::AveragedTaylor => averaged_taylor_coeffs(v, cell, n, quad_res),
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Assembled {
        cells,
        order: n,
        polys,
    })
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

impl Assembled {
    /// `D^alpha v_K` by the Leibniz rule; each `alpha_j <= 2`.
    fn leibniz(&self, alpha: &[usize], x: &[f64]) -> f64 {
        let lower: Vec<Vec<usize>> = {
            let mut out = vec![Vec::new()];
            for &a in alpha {
                out = out
                    .into_iter()
                    .flat_map(|p| {
                        (0..=a).map(move |b| {
                            let mut q = p.clone();
                            q.push(b);
                            q
                        })
                    })
                    .collect();
            }
            out
        };
        let mut total = 0.0;
        for q in &self.polys {
            let box_ok = q.m.iter().zip(x).all(|(&mj, &xj)| {
                let k = self.cells as f64;
                let lo = (mj as f64 - 1.0) / k - 0.25 / k;
                let hi = mj as f64 / k + 0.25 / k;
                lo < xj && xj < hi
            });
            if !box_ok {
                continue;
            }
            for beta in &lower {
                let rest: Vec<usize> = alpha.iter().zip(beta).map(|(a, b)| a - b).collect();
                let c: f64 = alpha.iter().zip(beta).map(|(&a, &b)| binom(a, b)).product();
                let psi = pu_normalized_derivative(x, self.cells, &q.m, &rest);
                if psi != 0.0 {
                    total += c * q.derivative(beta, x) * psi;
                }
            }
        }
        total
    }
}

impl SmoothFunction for Assembled {
    fn dim(&self) -> usize {
        self.polys.first().map(|p| p.dim()).unwrap_or(0)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.leibniz(&vec![0; x.len()], x)
    }

    /// Supports `alpha_j <= 2`.
    fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64 {
        assert!(
            alpha.iter().all(|&a| a <= 2),
            "normalized bumps are C^1 with bounded second derivative"
        );
        self.leibniz(alpha, x)
    }
}

/// `||v - w||_{H^2([0,1]^d)}` with the derivative-sum norm `sum_{|alpha| <= 2} ||D^alpha e||^2`,
/// by composite Gauss-Legendre on subintervals of width `1/(8K)` (aligned with every
/// bump breakpoint) with `points` nodes each.
pub fn h2_error(
    v: &impl SmoothFunction,
    w: &impl SmoothFunction,
    cells: usize,
    points: usize,
) -> Result<f64> {
    let d = v.dim();
    if d != w.dim() {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: w.dim(),
        });
    }
    let axis = composite_gauss(points, 0.0, 1.0, 8 * cells);
    let rule = TensorRule::uniform(&axis, d);
    let alphas = multi_index::up_to_degree(d, 2);
    let total: f64 = rule
        .points
        .iter()
        .zip(&rule.weights)
        .map(|(x, wt)| {
            alphas
                .iter()
                .map(|a| (v.derivative(a, x) - w.derivative(a, x)).powi(2))
                .sum::<f64>()
                * wt
        })
        .sum();
    Ok(total.sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::FourierField;
    use crate::trunk::poly::Polynomial;

    #[test]
    fn reproduces_global_polynomials() {
        let p = Polynomial::dense(1, 3, &[0.2, -1.0, 0.5, 2.0]);
        for k in [1, 2, 5] {
            let vk = assemble_vk(&p, k, 4, CoeffMode::LeastSquares, 6).unwrap();
            for i in 0..=200 {
                let x = [i as f64 / 200.0];
                assert!((vk.value(&x) - p.value(&x)).abs() < 1e-8);
                assert!((vk.derivative(&[2], &x) - p.derivative(&[2], &x)).abs() < 1e-6);
            }
        }
        let p2 = Polynomial::dense(2, 1, &[1.0, 2.0, -0.5]);
        let vk = assemble_vk(&p2, 3, 2, CoeffMode::LeastSquares, 4).unwrap();
        assert!((vk.value(&[0.31, 0.77]) - p2.value(&[0.31, 0.77])).abs() < 1e-8);
        let z = assemble_vk(&FourierField::zeros(1, 1), 3, 3, CoeffMode::LeastSquares, 4).unwrap();
        assert_eq!(z.value(&[0.4]), 0.0);
    }

    #[test]
    fn h2_error_of_identical_functions_is_zero() {
        let f = FourierField::cosine(&[1], 1.0);
        assert_eq!(h2_error(&f, &f, 2, 4).unwrap(), 0.0);
    }

    #[test]
    fn vk_derivatives_match_fd() {
        let f = FourierField::cosine(&[2], 1.0);
        let vk = assemble_vk(&f, 3, 4, CoeffMode::LeastSquares, 8).unwrap();
        let h = 1e-5;
        for i in 1..50 {
            let x = i as f64 / 50.0;
            let fd = (vk.value(&[x + h]) - vk.value(&[x - h])) / (2.0 * h);
            assert!((vk.derivative(&[1], &[x]) - fd).abs() < 1e-5);
            let fd2 = (vk.derivative(&[1], &[x + h]) - vk.derivative(&[1], &[x - h])) / (2.0 * h);
            assert!((vk.derivative(&[2], &[x]) - fd2).abs() < 1e-3);
        }
    }
}
