//! One-dimensional Gauss-Legendre and midpoint rules, composite versions, and their
//! tensor products over boxes.

use std::f64::consts::PI;

/// Nodes and weights of a 1-d rule.
#[derive(Clone, Debug, PartialEq)]
pub struct Rule1d {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl Rule1d {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, w)| w * f(x))
            .sum()
    }
}

/// `n`-point Gauss-Legendre rule on `[-1, 1]`, by Newton iteration on `P_n`.
pub fn gauss_legendre(n: usize) -> Rule1d {
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre(n, x);
            dp = d;
            let step = p / d;
            x -= step;
            if step.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre(n, x);
        if d != 0.0 {
            dp = d;
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    Rule1d { nodes, weights }
}

/// `(P_n(x), P_n'(x))`
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Affine image of a rule on `[-1, 1]` onto `[a, b]`.
pub fn mapped(rule: &Rule1d, a: f64, b: f64) -> Rule1d {
    let (c, h) = (0.5 * (a + b), 0.5 * (b - a));
    Rule1d {
        nodes: rule.nodes.iter().map(|t| c + h * t).collect(),
        weights: rule.weights.iter().map(|w| w * h).collect(),
    }
}

/// `pieces` equal subintervals of `[a, b]`, each with an `n`-point Gauss rule.
pub fn composite_gauss(n: usize, a: f64, b: f64, pieces: usize) -> Rule1d {
    let base = gauss_legendre(n);
    let mut out = Rule1d {
        nodes: Vec::with_capacity(n * pieces),
        weights: Vec::with_capacity(n * pieces),
    };
    let h = (b - a) / pieces as f64;
    for k in 0..pieces {
        let sub = mapped(&base, a + k as f64 * h, a + (k + 1) as f64 * h);
        out.nodes.extend(sub.nodes);
        out.weights.extend(sub.weights);
    }
    out
}

/// Midpoint rule with `n` cells on `[a, b]`.
pub fn midpoint(n: usize, a: f64, b: f64) -> Rule1d {
    let h = (b - a) / n as f64;
    Rule1d {
        nodes: (0..n).map(|i| a + (i as f64 + 0.5) * h).collect(),
        weights: vec![h; n],
    }
}

/// Tensor product of per-axis rules; points are enumerated with the last axis fastest.
#[derive(Clone, Debug)]
pub struct TensorRule {
    pub points: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl TensorRule {
    pub fn new(axes: &[Rule1d]) -> Self {
        let mut points = vec![Vec::with_capacity(axes.len())];
        let mut weights = vec![1.0];
        for axis in axes {
            let mut np = Vec::with_capacity(points.len() * axis.len());
            let mut nw = Vec::with_capacity(points.len() * axis.len());
            for (p, w) in points.iter().zip(&weights) {
                for (x, wx) in axis.nodes.iter().zip(&axis.weights) {
                    let mut q = p.clone();
                    q.push(*x);
                    np.push(q);
                    nw.push(w * wx);
                }
            }
            points = np;
            weights = nw;
        }
        TensorRule { points, weights }
    }

    /// Same 1-d rule on every axis.
    pub fn uniform(axis: &Rule1d, d: usize) -> Self {
        Self::new(&vec![axis.clone(); d])
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn integrate(&self, f: impl Fn(&[f64]) -> f64) -> f64 {
        self.points
            .iter()
            .zip(&self.weights)
            .map(|(p, w)| w * f(p))
            .sum()
    }
}
