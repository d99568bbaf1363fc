use crate::multi_index::{self, MultiIndex};
use crate::spectral::FourierField;

/// A function on `R^d` (or the unit cube) with point values and partial derivatives.
pub trait SmoothFunction {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64;
}

impl SmoothFunction for FourierField {
    fn dim(&self) -> usize {
        FourierField::dim(self)
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.evaluate(x)
    }

    fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64 {
        FourierField::derivative(self, alpha, x)
    }
}

/// `d/dx^a x^p` evaluated at `x`.
pub(crate) fn power_derivative(x: f64, p: usize, a: usize) -> f64 {
    if a > p {
        return 0.0;
    }
    let falling: f64 = (p - a + 1..=p).map(|i| i as f64).product();
    falling * x.powi((p - a) as i32)
}

/// `D^alpha x^beta`
pub(crate) fn monomial_derivative(x: &[f64], beta: &[usize], alpha: &[usize]) -> f64 {
    x.iter()
        .zip(beta.iter().zip(alpha))
        .map(|(&xj, (&bj, &aj))| power_derivative(xj, bj, aj))
        .product()
}

/// `sum_alpha c_alpha x^alpha`
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    pub dim: usize,
    pub terms: Vec<(MultiIndex, f64)>,
}

impl Polynomial {
    pub fn new(dim: usize, terms: Vec<(MultiIndex, f64)>) -> Self {
        debug_assert!(terms.iter().all(|(a, _)| a.len() == dim));
        Polynomial { dim, terms }
    }

    /// Coefficients in graded-lex order of all `|alpha| <= degree`.
    pub fn dense(dim: usize, degree: usize, coeffs: &[f64]) -> Self {
        let alphas = multi_index::up_to_degree(dim, degree);
        assert_eq!(
            alphas.len(),
            coeffs.len(),
            "one coefficient per multi-index"
        );
        Polynomial::new(
            dim,
            alphas.into_iter().zip(coeffs.iter().copied()).collect(),
        )
    }

    pub fn degree(&self) -> usize {
        self.terms
            .iter()
            .filter(|(_, c)| *c != 0.0)
            .map(|(a, _)| multi_index::degree(a))
            .max()
            .unwrap_or(0)
    }
}

impl SmoothFunction for Polynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(a, c)| c * multi_index::power(x, a))
            .sum()
    }

    fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|(b, c)| c * monomial_derivative(x, b, alpha))
            .sum()
    }
}
