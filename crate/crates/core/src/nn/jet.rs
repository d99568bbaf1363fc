/// Which second-order information a jet carries.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum JetMode {
    /// Full Hessian; only for input dimension at most 3.
    Hessian,
    /// Only the trace, `d + 2` scalars per node.
    #[default]
    Laplacian,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SecondOrder {
    /// Row-major `d x d`.
    Hessian(Vec<f64>),
    Laplacian(f64),
}

/// Value, input gradient and second-order part of a scalar function at a point.
#[derive(Clone, Debug, PartialEq)]
pub struct Jet2 {
    pub value: f64,
    pub gradient: Vec<f64>,
    pub second: SecondOrder,
}

impl Jet2 {
    pub fn laplacian(&self) -> f64 {
        match &self.second {
            SecondOrder::Laplacian(l) => *l,
            SecondOrder::Hessian(h) => {
                let d = self.gradient.len();
                (0..d).map(|i| h[i * d + i]).sum()
            }
        }
    }

    pub fn hessian(&self) -> Option<&[f64]> {
        match &self.second {
            SecondOrder::Hessian(h) => Some(h),
            SecondOrder::Laplacian(_) => None,
        }
    }
}

/// Cotangent on one output jet: the scalar being differentiated is
/// `value * v + gradient . g + laplacian * l`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct JetSeed {
    pub value: f64,
    /// Empty means zero.
    pub gradient: Vec<f64>,
    pub laplacian: f64,
}

impl JetSeed {
    pub fn value(w: f64) -> Self {
        JetSeed {
            value: w,
            ..Default::default()
        }
    }

    pub fn new(value: f64, laplacian: f64) -> Self {
        JetSeed {
            value,
            gradient: Vec::new(),
            laplacian,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0.0 && self.laplacian == 0.0 && self.gradient.iter().all(|&g| g == 0.0)
    }
}
