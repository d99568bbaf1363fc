//! Coefficient functionals producing a local polynomial `q_m` on each cover box.

use nalgebra::{DMatrix, DVector};

use super::bump::CoverBox;
use super::poly::{monomial_derivative, SmoothFunction};
use crate::multi_index::{self, MultiIndex};
use crate::quadrature::{gauss_legendre, mapped, TensorRule};
use crate::{Error, Result};

const TAYLOR_TOL: f64 = 1e-6;

/// Degree `n-1` polynomial attached to one cover box.
///
/// `coeffs` are the coefficients on the global monomials `x^alpha`. `local` holds the
/// same polynomial in box coordinates `t = (x - center) / half`, which evaluates without
/// cancellation on small boxes.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalPoly {
    pub m: Vec<usize>,
    pub coeffs: Vec<(MultiIndex, f64)>,
    pub center: Vec<f64>,
    pub half: Vec<f64>,
    pub local: Vec<f64>,
}

impl LocalPoly {
    fn from_local(cell: &CoverBox, alphas: Vec<MultiIndex>, local: Vec<f64>) -> Self {
        let center = cell.center();
        let half = cell.half_widths();
        let coeffs = to_global(&alphas, &local, &center, &half);
        LocalPoly {
            m: cell.m.clone(),
            coeffs,
            center,
            half,
            local,
        }
    }

    fn from_global(cell: &CoverBox, coeffs: Vec<(MultiIndex, f64)>) -> Self {
        let center = cell.center();
        let half = cell.half_widths();
        let alphas: Vec<MultiIndex> = coeffs.iter().map(|(a, _)| a.clone()).collect();
        // x = center + half t, so the same binomial expansion with inverted scaling
        let inv_half: Vec<f64> = half.iter().map(|h| 1.0 / h).collect();
        let neg: Vec<f64> = center.iter().zip(&half).map(|(c, h)| -c / h).collect();
        let vals: Vec<f64> = coeffs.iter().map(|(_, c)| *c).collect();
        let local = to_global(&alphas, &vals, &neg, &inv_half)
            .into_iter()
            .map(|(_, c)| c)
            .collect();
        LocalPoly {
            m: cell.m.clone(),
            coeffs,
            center,
            half,
            local,
        }
    }

    pub fn dim(&self) -> usize {
        self.center.len()
    }

    fn local_point(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.center.iter().zip(&self.half))
            .map(|(xj, (c, h))| (xj - c) / h)
            .collect()
    }
}

impl SmoothFunction for LocalPoly {
    fn dim(&self) -> usize {
        self.center.len()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let t = self.local_point(x);
        self.coeffs
            .iter()
            .zip(&self.local)
            .map(|((a, _), c)| c * multi_index::power(&t, a))
            .sum()
    }

    fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64 {
        let t = self.local_point(x);
        let scale: f64 = self
            .half
            .iter()
            .zip(alpha)
            .map(|(h, &a)| h.powi(-(a as i32)))
            .product();
        scale
            * self
                .coeffs
                .iter()
                .zip(&self.local)
                .map(|((b, _), c)| c * monomial_derivative(&t, b, alpha))
                .sum::<f64>()
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Rewrites `sum_alpha a_alpha ((x - c)/h)^alpha` as `sum_beta b_beta x^beta` on the same
/// multi-index set (closed under lowering).
fn to_global(alphas: &[MultiIndex], local: &[f64], c: &[f64], h: &[f64]) -> Vec<(MultiIndex, f64)> {
    alphas
        .iter()
        .map(|beta| {
            let mut acc = 0.0;
            for (alpha, a) in alphas.iter().zip(local) {
                if alpha.iter().zip(beta).any(|(x, y)| x < y) {
                    continue;
                }
                let mut term = *a;
                for j in 0..beta.len() {
                    let (aj, bj) = (alpha[j], beta[j]);
                    term *=
                        binomial(aj, bj) * (-c[j]).powi((aj - bj) as i32) / h[j].powi(aj as i32);
                }
                acc += term;
            }
            (beta.clone(), acc)
        })
        .collect()
}

/// L^2 projection of `v` onto polynomials of degree `n-1` on the cover box, by tensor
/// Gauss-Legendre quadrature with `quad_res` points per axis.
pub fn local_poly_coeffs_ls(
    v: &impl SmoothFunction,
    cell: &CoverBox,
    n: usize,
    quad_res: usize,
) -> Result<LocalPoly> {
    if n == 0 {
        return Err(Error::invalid("polynomial order must be positive"));
    }
    if quad_res < n {
        return Err(Error::SingularGram);
    }
    let d = cell.dim();
    let alphas = multi_index::up_to_degree(d, n - 1);
    let rule = TensorRule::uniform(&gauss_legendre(quad_res), d);
    let center = cell.center();
    let half = cell.half_widths();
    let p = alphas.len();
    let mut gram = DMatrix::<f64>::zeros(p, p);
    let mut rhs = DVector::<f64>::zeros(p);
    let mut phi = vec![0.0; p];
    let mut x = vec![0.0; d];
    for (t, w) in rule.points.iter().zip(&rule.weights) {
        for j in 0..d {
            x[j] = center[j] + half[j] * t[j];
        }
        let fv = v.value(&x);
        for (ph, a) in phi.iter_mut().zip(&alphas) {
            *ph = multi_index::power(t, a);
        }
        for i in 0..p {
            rhs[i] += w * phi[i] * fv;
            for j in 0..=i {
                gram[(i, j)] += w * phi[i] * phi[j];
            }
        }
    }
    for i in 0..p {
        for j in 0..i {
            gram[(j, i)] = gram[(i, j)];
        }
    }
    let chol = gram.cholesky().ok_or(Error::SingularGram)?;
    let sol = chol.solve(&rhs);
    Ok(LocalPoly::from_local(
        cell,
        alphas,
        sol.iter().copied().collect(),
    ))
}

/// `C_2(n, d) = sum_{|alpha + beta| <= n-1} 1/(alpha! beta!)`
pub fn c2_constant(n: usize, d: usize) -> f64 {
    let all = multi_index::up_to_degree(d, n.saturating_sub(1));
    let mut acc = 0.0;
    for a in &all {
        for b in &all {
            if multi_index::degree(a) + multi_index::degree(b) < n {
                acc += 1.0 / (multi_index::factorial(a) * multi_index::factorial(b));
            }
        }
    }
    acc
}

fn taylor_once(
    v: &impl SmoothFunction,
    cell: &CoverBox,
    n: usize,
    quad_res: usize,
) -> Vec<(MultiIndex, f64)> {
    let d = cell.dim();
    let center = cell.center();
    let r = 0.5
        * cell
            .half_widths()
            .iter()
            .fold(f64::INFINITY, |a, &h| a.min(2.0 * h));
    let axis = mapped(&gauss_legendre(quad_res), -r, r);
    let rule = TensorRule::uniform(&axis, d);
    let alphas = multi_index::up_to_degree(d, n - 1);

    let mut norm = 0.0;
    let mut acc = vec![0.0; alphas.len()];
    let mut y = vec![0.0; d];
    let derivs: Vec<MultiIndex> = alphas.clone();
    let mut dv = vec![0.0; derivs.len()];
    for (off, w) in rule.points.iter().zip(&rule.weights) {
        let rho2: f64 = off.iter().map(|o| o * o).sum::<f64>() / (r * r);
        if rho2 >= 1.0 {
            continue;
        }
        let b = (-1.0 / (1.0 - rho2)).exp() * w;
        if b == 0.0 {
            continue;
        }
        norm += b;
        for j in 0..d {
            y[j] = center[j] + off[j];
        }
        for (slot, beta) in dv.iter_mut().zip(&derivs) {
            *slot = v.derivative(beta, &y);
        }
        let neg_y: Vec<f64> = y.iter().map(|t| -t).collect();
        for (ai, alpha) in alphas.iter().enumerate() {
            let fa = multi_index::factorial(alpha);
            let mut s = 0.0;
            for gamma in &alphas {
                if multi_index::degree(alpha) + multi_index::degree(gamma) >= n {
                    continue;
                }
                let sum: Vec<usize> = alpha.iter().zip(gamma).map(|(a, g)| a + g).collect();
                let idx = derivs
                    .iter()
                    .position(|x| *x == sum)
                    .expect("sum of indices stays within degree n-1");
                s += dv[idx] * multi_index::power(&neg_y, gamma)
                    / (fa * multi_index::factorial(gamma));
            }
            acc[ai] += b * s;
        }
    }
    alphas
        .into_iter()
        .zip(acc)
        .map(|(a, c)| (a, c / norm))
        .collect()
}

/// Averaged Taylor polynomial of order `n` over the ball inscribed in the cover box, with
/// the normalized weight `exp(-1 / (1 - |y - x0|^2 / r^2))`. Runs the quadrature at
/// `quad_res` and `2 quad_res` points per axis and refuses if they disagree.
pub fn averaged_taylor_coeffs(
    v: &impl SmoothFunction,
    cell: &CoverBox,
    n: usize,
    quad_res: usize,
) -> Result<LocalPoly> {
    if n == 0 || quad_res == 0 {
        return Err(Error::invalid(
            "order and quadrature resolution must be positive",
        ));
    }
    let coarse = taylor_once(v, cell, n, quad_res);
    let fine = taylor_once(v, cell, n, 2 * quad_res);
    let delta = coarse
        .iter()
        .zip(&fine)
        .map(|((_, a), (_, b))| (a - b).abs())
        .fold(0.0, f64::max);
    if delta > TAYLOR_TOL {
        return Err(Error::QuadratureNonconvergence { delta });
    }
    Ok(LocalPoly::from_global(cell, fine))
}
