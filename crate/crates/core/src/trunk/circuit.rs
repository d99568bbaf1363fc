//! Compiles layered ReQU circuits into networks.
//!
//! Each stage is a set of gates whose inputs are affine expressions of the previous
//! stage's outputs (stage 0 outputs are the network inputs). A gate owns a few `sigma2`
//! neurons and exposes one output, a fixed linear combination of those neurons. Because
//! gate outputs are linear in the neurons, stage `s` weights are `R_s C_{s-1}` where `R_s`
//! reads expressions and `C_{s-1}` forms the previous outputs.

use super::bump::KNOTS;
use crate::nn::{Activation, Network, NetworkSpec, ParameterVector};
use crate::Result;

/// `sum_i coef_i * value_i + constant` over the previous stage.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct Expr {
    pub terms: Vec<(usize, f64)>,
    pub constant: f64,
}

impl Expr {
    pub fn var(i: usize) -> Self {
        Expr {
            terms: vec![(i, 1.0)],
            constant: 0.0,
        }
    }

    pub fn constant(c: f64) -> Self {
        Expr {
            terms: Vec::new(),
            constant: c,
        }
    }

    pub fn affine(i: usize, scale: f64, shift: f64) -> Self {
        Expr {
            terms: vec![(i, scale)],
            constant: shift,
        }
    }

    fn combine(&self, other: &Expr, sign: f64) -> Expr {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().map(|&(i, c)| (i, sign * c)));
        Expr {
            terms,
            constant: self.constant + sign * other.constant,
        }
    }

    fn neg(&self) -> Expr {
        Expr::constant(0.0).combine(self, -1.0)
    }

    fn shifted(&self, by: f64) -> Expr {
        Expr {
            terms: self.terms.clone(),
            constant: self.constant + by,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Gate {
    /// `a * b = ((a+b)^2 - (a-b)^2) / 4` with four neurons.
    Product(Expr, Expr),
    /// `a` carried through one layer, as `a * 1`.
    Pass(Expr),
    /// `s(t)` with six neurons at the bump knots.
    Bump(Expr),
}

impl Gate {
    /// Neuron pre-activations and output coefficients.
    fn neurons(&self) -> Vec<(Expr, f64)> {
        match self {
            Gate::Product(a, b) => {
                let (sum, diff) = (a.combine(b, 1.0), a.combine(b, -1.0));
                vec![
                    (sum.clone(), 0.25),
                    (sum.neg(), 0.25),
                    (diff.clone(), -0.25),
                    (diff.neg(), -0.25),
                ]
            }
            Gate::Pass(a) => Gate::Product(a.clone(), Expr::constant(1.0)).neurons(),
            Gate::Bump(t) => KNOTS.iter().map(|&(ti, c)| (t.shifted(-ti), c)).collect(),
        }
    }

    pub fn width(&self) -> usize {
        match self {
            Gate::Product(..) | Gate::Pass(_) => 4,
            Gate::Bump(_) => 6,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    pub input_dim: usize,
    pub stages: Vec<Vec<Gate>>,
    /// Affine readout of the last stage (or of the inputs when there are no stages).
    pub output: Expr,
}

impl Circuit {
    pub fn compile(&self) -> Result<Network> {
        let widths: Vec<usize> = self
            .stages
            .iter()
            .map(|st| st.iter().map(Gate::width).sum())
            .collect();
        let spec = NetworkSpec::uniform(self.input_dim, &widths, Activation::Sigma2, 1)?;
        let mut data = Vec::with_capacity(spec.count_params());

        // value_v = sum_n basis[v][n] * h_n of the previous layer
        let mut basis: Vec<Vec<f64>> = (0..self.input_dim)
            .map(|i| {
                let mut row = vec![0.0; self.input_dim];
                row[i] = 1.0;
                row
            })
            .collect();
        let mut prev_width = self.input_dim;

        let read = |e: &Expr, basis: &[Vec<f64>], width: usize| -> (Vec<f64>, f64) {
            let mut row = vec![0.0; width];
            for &(v, c) in &e.terms {
                for (r, b) in row.iter_mut().zip(&basis[v]) {
                    *r += c * b;
                }
            }
            (row, e.constant)
        };

        for (stage, &width) in self.stages.iter().zip(&widths) {
            let mut weights = Vec::with_capacity(width * prev_width);
            let mut biases = Vec::with_capacity(width);
            let mut next_basis = Vec::with_capacity(stage.len());
            let mut n = 0;
            for gate in stage {
                let mut out_row = vec![0.0; width];
                for (e, coef) in gate.neurons() {
                    let (row, b) = read(&e, &basis, prev_width);
                    weights.extend(row);
                    biases.push(b);
                    out_row[n] = coef;
                    n += 1;
                }
                next_basis.push(out_row);
            }
            data.extend(weights);
            data.extend(biases);
            basis = next_basis;
            prev_width = width;
        }
        let (row, b) = read(&self.output, &basis, prev_width);
        data.extend(row);
        data.push(b);
        Network::new(spec.clone(), ParameterVector::from_vec(&spec, data)?)
    }
}

/// Stages that multiply all `leaves` (expressions of the inputs) pairwise in a binary
/// tree. With a single leaf no stage is produced.
pub fn product_tree(input_dim: usize, first: Vec<Gate>) -> Circuit {
    let mut stages = Vec::new();
    let mut count = first.len();
    if count > 0 {
        stages.push(first);
    }
    while count > 1 {
        let mut gates = Vec::with_capacity(count.div_ceil(2));
        let mut i = 0;
        while i + 1 < count {
            gates.push(Gate::Product(Expr::var(i), Expr::var(i + 1)));
            i += 2;
        }
        if i < count {
            gates.push(Gate::Pass(Expr::var(i)));
        }
        count = gates.len();
        stages.push(gates);
    }
    Circuit {
        input_dim,
        stages,
        output: Expr::var(0),
    }
}

/// Pairs up leaf expressions into first-stage product gates; an odd leaf is passed through.
pub fn pair_leaves(leaves: &[Expr]) -> Vec<Gate> {
    leaves
        .chunks(2)
        .map(|c| match c {
            [a, b] => Gate::Product(a.clone(), b.clone()),
            [a] => Gate::Pass(a.clone()),
            _ => unreachable!(),
        })
        .collect()
}
