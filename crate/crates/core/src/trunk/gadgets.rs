//! Exact ReQU realizations of products, monomials, bumps and the trunk basis
//! `y^alpha s_m(y)`.

use std::fmt::Write as _;

use super::bump::CoverBox;
use super::circuit::{pair_leaves, product_tree, Circuit, Expr, Gate};
use crate::multi_index::{self, MultiIndex};
use crate::nn::Network;
use crate::{Error, Result};

/// `(x, y) -> xy` with one hidden layer of four neurons.
pub fn product_net() -> Network {
    Circuit {
        input_dim: 2,
        stages: vec![vec![Gate::Product(Expr::var(0), Expr::var(1))]],
        output: Expr::var(0),
    }
    .compile()
    .expect("fixed circuit compiles")
}

/// Leaves `x_j` repeated `alpha_j` times.
fn monomial_leaves(alpha: &[usize]) -> Vec<Expr> {
    alpha
        .iter()
        .enumerate()
        .flat_map(|(j, &a)| std::iter::repeat_n(Expr::var(j), a))
        .collect()
}

/// `x -> x^alpha` on all of `R^d`. Degree 0 and 1 give affine networks.
pub fn monomial_net(alpha: &[usize], d: usize) -> Result<Network> {
    if alpha.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: alpha.len(),
        });
    }
    let leaves = monomial_leaves(alpha);
    let circuit = match leaves.len() {
        0 => Circuit {
            input_dim: d,
            stages: Vec::new(),
            output: Expr::constant(1.0),
        },
        1 => Circuit {
            input_dim: d,
            stages: Vec::new(),
            output: leaves[0].clone(),
        },
        _ => product_tree(d, pair_leaves(&leaves)),
    };
    circuit.compile()
}

fn bump_gates(k: usize, m: &[usize]) -> Vec<Gate> {
    let a = 4.0 * k as f64;
    m.iter()
        .enumerate()
        .map(|(j, &mj)| Gate::Bump(Expr::affine(j, a, 5.0 - 4.0 * mj as f64)))
        .collect()
}

/// The raw tensor bump `s_m` with `K` cells per axis.
pub fn bump_net(k: usize, m: &[usize], d: usize) -> Result<Network> {
    CoverBox::new(k, m.to_vec())?;
    if m.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.len(),
        });
    }
    product_tree(d, bump_gates(k, m)).compile()
}

/// `y^alpha s_m(y)`: the first stage evaluates the `d` bumps and the pairwise products of
/// the monomial factors, then a product tree multiplies everything.
pub fn trunk_element_net(alpha: &[usize], k: usize, m: &[usize]) -> Result<Network> {
    let d = m.len();
    CoverBox::new(k, m.to_vec())?;
    if alpha.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: alpha.len(),
        });
    }
    let mut first = bump_gates(k, m);
    first.extend(pair_leaves(&monomial_leaves(alpha)));
    product_tree(d, first).compile()
}

/// Depth and width allowance `3 + log2 d - 1 + log2 n - 1`, `4n - 4 + 6d`, with the
/// logarithms rounded up and the depth clamped to at least one.
pub fn formula_budget(n: usize, d: usize) -> (usize, usize) {
    let lg = |x: usize| (x as f64).log2().ceil() as i64;
    let depth = (3 + lg(d) - 1 + lg(n) - 1).max(1) as usize;
    let width = 4 * n - 4 + 6 * d;
    (depth, width)
}

#[derive(Clone, Debug)]
pub struct BasisElement {
    pub index: usize,
    pub alpha: MultiIndex,
    pub m: Vec<usize>,
    pub net: Network,
}

impl BasisElement {
    /// `y^alpha s_m(y)` evaluated directly.
    pub fn target(&self, y: &[f64], k: usize) -> f64 {
        multi_index::power(y, &self.alpha) * super::bump::s_m(y, k, &self.m)
    }
}

/// All `C(n-1+d, d) K^d` elements `y^alpha s_m(y)`, cells first then `|alpha| <= n-1` in
/// graded-lex order.
#[derive(Clone, Debug)]
pub struct TrunkBasis {
    pub cells: usize,
    pub order: usize,
    pub dim: usize,
    pub elements: Vec<BasisElement>,
}

impl TrunkBasis {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn max_depth(&self) -> usize {
        self.elements
            .iter()
            .map(|e| e.net.depth())
            .max()
            .unwrap_or(0)
    }

    pub fn max_width(&self) -> usize {
        self.elements
            .iter()
            .map(|e| e.net.width())
            .max()
            .unwrap_or(0)
    }

    /// One record per element: index, alpha, m, width, depth.
    pub fn manifest(&self) -> String {
        let (bd, bw) = formula_budget(self.order, self.dim);
        let mut out = String::new();
        let _ = writeln!(out, "{{");
        let _ = writeln!(
            out,
            "  \"cells\": {}, \"order\": {}, \"dim\": {}, \"p\": {},",
            self.cells,
            self.order,
            self.dim,
            self.len()
        );
        let _ = writeln!(
            out,
            "  \"achieved\": {{\"depth\": {}, \"width\": {}}}, \"budget\": {{\"depth\": {bd}, \"width\": {bw}}},",
            self.max_depth(),
            self.max_width()
        );
        let _ = writeln!(out, "  \"elements\": [");
        for (i, e) in self.elements.iter().enumerate() {
            let sep = if i + 1 == self.len() { "" } else { "," };
            let _ = writeln!(
                out,
                "    {{\"index\": {}, \"alpha\": {:?}, \"m\": {:?}, \"width\": {}, \"depth\": {}}}{sep}",
                e.index,
                e.alpha,
                e.m,
                e.net.width(),
                e.net.depth()
            );
        }
        let _ = writeln!(out, "  ]");
        let _ = writeln!(out, "}}");
        out
    }
}

pub fn trunk_basis(k: usize, n: usize, d: usize) -> Result<TrunkBasis> {
    if k == 0 || n == 0 || d == 0 {
        return Err(Error::invalid(
            "cells, order and dimension must be positive",
        ));
    }
    let alphas = multi_index::up_to_degree(d, n - 1);
    let mut elements = Vec::with_capacity(alphas.len() * k.pow(d as u32));
    for cell in CoverBox::enumerate(k, d) {
        for alpha in &alphas {
            elements.push(BasisElement {
                index: elements.len(),
                alpha: alpha.clone(),
                m: cell.m.clone(),
                net: trunk_element_net(alpha, k, &cell.m)?,
            });
        }
    }
    Ok(TrunkBasis {
        cells: k,
        order: n,
        dim: d,
        elements,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::trunk::bump::s_m;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn product_exact() {
        let net = product_net();
        assert_eq!(net.eval(&[3.0, 4.0]).unwrap(), 12.0);
        assert_eq!((net.depth(), net.width()), (1, 4));
        let mut worst = 0.0f64;
        for i in 0..101 {
            let x = -10.0 + 0.2 * i as f64;
            assert_eq!(net.eval(&[x, 0.0]).unwrap(), 0.0);
            for j in 0..101 {
                let y = -10.0 + 0.2 * j as f64;
                worst = worst.max((net.eval(&[x, y]).unwrap() - x * y).abs());
            }
        }
        assert!(worst <= 1e-12, "{worst}");
    }

    #[test]
    fn monomials_exact() {
        let net = monomial_net(&[2, 1], 2).unwrap();
        assert!((net.eval(&[2.0, 3.0]).unwrap() - 12.0).abs() < 1e-12);
        let one = monomial_net(&[0, 0, 0], 3).unwrap();
        assert_eq!(one.eval(&[5.0, -1.0, 2.0]).unwrap(), 1.0);
        assert_eq!(one.depth(), 0);
        let cube = monomial_net(&[3], 1).unwrap();
        for i in 0..51 {
            let x = -2.0 + 4.0 * i as f64 / 50.0;
            assert!((cube.eval(&[x]).unwrap() - x.powi(3)).abs() <= 1e-12);
        }
        assert!(monomial_net(&[1], 2).is_err());
    }

    #[test]
    fn bumps_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let net = bump_net(3, &[2], 1).unwrap();
        for _ in 0..10_000 {
            let x: f64 = rng.random_range(-0.5..1.5);
            assert!((net.eval(&[x]).unwrap() - s_m(&[x], 3, &[2])).abs() <= 1e-12);
        }
        assert!(net.eval(&[0.95]).unwrap().abs() < 1e-12);
        let net2 = bump_net(2, &[1, 2], 2).unwrap();
        for _ in 0..1000 {
            let x = [rng.random_range(0.0..1.0), rng.random_range(0.0..1.0)];
            let want = s_m(&[x[0]], 2, &[1]) * s_m(&[x[1]], 2, &[2]);
            assert!((net2.eval(&x).unwrap() - want).abs() <= 1e-12);
        }
    }

    #[test]
    fn small_basis_values() {
        let b = trunk_basis(1, 2, 1).unwrap();
        assert_eq!(b.len(), 2);
        assert!((b.elements[0].net.eval(&[0.5]).unwrap() - 1.0).abs() < 1e-12);
        assert!((b.elements[1].net.eval(&[0.5]).unwrap() - 0.5).abs() < 1e-12);
    }

    #[test]
    fn basis_exact_and_within_budget() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for (k, n, d) in [(2, 3, 1), (1, 8, 1), (2, 3, 2), (1, 2, 3)] {
            let b = trunk_basis(k, n, d).unwrap();
            assert_eq!(
                b.len(),
                multi_index::count_up_to(d, n - 1) * k.pow(d as u32)
            );
            for e in &b.elements {
                for _ in 0..200 {
                    let y: Vec<f64> = (0..d).map(|_| rng.random_range(0.0..1.0)).collect();
                    let got = e.net.eval(&y).unwrap();
                    assert!((got - e.target(&y, k)).abs() <= 1e-11);
                }
            }
            let (bd, bw) = formula_budget(n, d);
            assert!(
                b.max_depth() <= 2 * bd && b.max_width() <= 2 * bw,
                "{k} {n} {d}"
            );
            assert!(b.manifest().contains("\"index\": 0"));
        }
    }
}
