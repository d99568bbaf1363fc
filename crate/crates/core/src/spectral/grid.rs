use std::f64::consts::PI;

use num_complex::Complex64;

use super::field::{FourierField, ModeGrid};
use crate::{Error, Result};

/// Point values on the `(2N+1)^d` grid `x_nu = nu / (2N+1)`, last axis fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct GridSample {
    pub dim: usize,
    pub n: usize,
    pub values: Vec<f64>,
}

impl GridSample {
    pub fn new(dim: usize, n: usize, values: Vec<f64>) -> Result<Self> {
        let m = grid_size(dim, n);
        if values.len() != m {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: values.len(),
            });
        }
        Ok(GridSample { dim, n, values })
    }

    /// `m = (2N+1)^d`
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn side(&self) -> usize {
        2 * self.n + 1
    }

    pub fn point(&self, index: usize) -> Vec<f64> {
        grid_point(self.dim, self.n, index)
    }
}

pub fn grid_size(dim: usize, n: usize) -> usize {
    (2 * n + 1).pow(dim as u32)
}

pub fn grid_point(dim: usize, n: usize, mut index: usize) -> Vec<f64> {
    let side = 2 * n + 1;
    let mut x = vec![0.0; dim];
    for j in (0..dim).rev() {
        x[j] = (index % side) as f64 / side as f64;
        index /= side;
    }
    x
}

/// Applies `mat` (`rows x shape[axis]`, row-major) along `axis` of a tensor with `shape`.
fn transform_axis(
    data: &[Complex64],
    shape: &mut [usize],
    axis: usize,
    mat: &[Complex64],
    rows: usize,
) -> Vec<Complex64> {
    let cols = shape[axis];
    let outer: usize = shape[..axis].iter().product();
    let inner: usize = shape[axis + 1..].iter().product();
    let mut out = vec![Complex64::new(0.0, 0.0); outer * rows * inner];
    for o in 0..outer {
        for r in 0..rows {
            let mrow = &mat[r * cols..(r + 1) * cols];
            let dst = &mut out[(o * rows + r) * inner..(o * rows + r + 1) * inner];
            for (c, &w) in mrow.iter().enumerate() {
                let src = &data[(o * cols + c) * inner..(o * cols + c + 1) * inner];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += w * s;
                }
            }
        }
    }
    shape[axis] = rows;
    out
}

impl FourierField {
    /// Values on the tensor grid `axes[0] x ... x axes[d-1]`, last axis fastest.
    pub fn sample_tensor(&self, axes: &[Vec<f64>]) -> Vec<Complex64> {
        self.sample_tensor_of(self.coeffs(), axes)
    }

    pub(crate) fn sample_tensor_of(
        &self,
        coeffs: &[Complex64],
        axes: &[Vec<f64>],
    ) -> Vec<Complex64> {
        assert_eq!(axes.len(), self.dim(), "one axis per dimension");
        let big = self.max_mode() as i64;
        let side = self.modes().side();
        let mut shape = vec![side; self.dim()];
        let mut data = coeffs.to_vec();
        for (j, axis) in axes.iter().enumerate() {
            let mat: Vec<Complex64> = axis
                .iter()
                .flat_map(|&x| {
                    (-big..=big).map(move |k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * x))
                })
                .collect();
            data = transform_axis(&data, &mut shape, j, &mat, axis.len());
        }
        data
    }

    /// Real values on the uniform grid `i / res`, `i = 0..res`, per axis.
    pub fn sample_uniform(&self, res: usize) -> Vec<f64> {
        let axis: Vec<f64> = (0..res).map(|i| i as f64 / res as f64).collect();
        self.sample_tensor(&vec![axis; self.dim()])
            .into_iter()
            .map(|c| c.re)
            .collect()
    }
}

/// The encoder `D`: point samples on the `(2N+1)^d` grid.
pub fn encode_d(f: &FourierField, n: usize) -> GridSample {
    let values = f.sample_uniform(2 * n + 1);
    GridSample {
        dim: f.dim(),
        n,
        values,
    }
}

/// The pseudo-spectral reconstruction `P`: discrete Fourier coefficients of the grid
/// values on the modes `|k|_inf <= N`, i.e. the trigonometric interpolant.
pub fn reconstruct_p(g: &GridSample) -> FourierField {
    let side = g.side();
    let big = g.n as i64;
    let twiddle: Vec<Complex64> = (0..side)
        .map(|r| Complex64::from_polar(1.0, -2.0 * PI * r as f64 / side as f64))
        .collect();
    let mat: Vec<Complex64> = (-big..=big)
        .flat_map(|k| {
            let tw = &twiddle;
            (0..side).map(move |nu| tw[((k * nu as i64).rem_euclid(side as i64)) as usize])
        })
        .collect();
    let mut shape = vec![side; g.dim];
    let mut data: Vec<Complex64> = g.values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    for axis in 0..g.dim {
        data = transform_axis(&data, &mut shape, axis, &mat, side);
    }
    let scale = 1.0 / g.len() as f64;
    let grid = ModeGrid {
        dim: g.dim,
        max_mode: g.n,
    };
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    for i in 0..grid.len() {
        let j = grid.mirror(i);
        coeffs[i] = (data[i] + data[j].conj()) * (0.5 * scale);
    }
    FourierField::from_coeffs_unchecked(grid, coeffs)
}

/// `P(D f)`
pub fn project(f: &FourierField, n: usize) -> FourierField {
    reconstruct_p(&encode_d(f, n))
}

/// `(a, b)_N = (1/m) sum_nu a_nu conj(b_nu)` on complex grid values.
pub fn discrete_inner_complex(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    assert_eq!(a.len(), b.len(), "grid sizes differ");
    let s: Complex64 = a.iter().zip(b).map(|(x, y)| x * y.conj()).sum();
    s / a.len() as f64
}

pub fn discrete_inner(a: &GridSample, b: &GridSample) -> Result<Complex64> {
    if a.dim != b.dim || a.n != b.n {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let s: f64 = a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum();
    Ok(Complex64::new(s / a.len() as f64, 0.0))
}

/// `phi_k` sampled on the grid.
pub fn mode_samples(k: &[i64], n: usize) -> Vec<Complex64> {
    let d = k.len();
    (0..grid_size(d, n))
        .map(|i| {
            let x = grid_point(d, n, i);
            let arg: f64 = k.iter().zip(&x).map(|(&kj, xj)| kj as f64 * xj).sum();
            Complex64::from_polar(1.0, 2.0 * PI * arg)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::field::norm_sq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_field(seed: u64, d: usize, k: usize) -> FourierField {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut f = FourierField::zeros(d, k);
        let g = f.modes();
        for i in 0..g.len() {
            if i <= g.mirror(i) {
                let c = Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                f.set_pair(&g.mode(i), c).unwrap();
            }
        }
        f
    }

    fn max_diff(a: &FourierField, b: &FourierField) -> f64 {
        (a - b).max_abs()
    }

    #[test]
    fn encode_constant_and_cosine() {
        let g = encode_d(&FourierField::constant(2, 1.25), 2);
        assert_eq!(g.len(), 25);
        assert!(g.values.iter().all(|&v| (v - 1.25).abs() < 1e-15));
        let c = encode_d(&FourierField::cosine(&[1], 1.0), 1);
        for (v, w) in c.values.iter().zip([1.0, -0.5, -0.5]) {
            assert!((v - w).abs() < 1e-15);
        }
    }

    #[test]
    fn separable_sampling_is_outer_product() {
        let fx = random_field(1, 1, 2);
        let gy = random_field(2, 1, 2);
        // product field f(x) g(y) built from coefficient outer product
        let mut prod = FourierField::zeros(2, 2);
        let grid = prod.modes();
        let coeffs: Vec<Complex64> = grid
            .modes()
            .map(|k| fx.coeff(&[k[0]]) * gy.coeff(&[k[1]]))
            .collect();
        prod = FourierField::from_coeffs(2, 2, coeffs).unwrap();
        let n = 3;
        let a = encode_d(&fx, n).values;
        let b = encode_d(&gy, n).values;
        let ab = encode_d(&prod, n).values;
        let side = 2 * n + 1;
        for i in 0..side {
            for j in 0..side {
                assert!((ab[i * side + j] - a[i] * b[j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constant_grid_reconstructs_constant() {
        let g = GridSample::new(2, 2, vec![3.0; 25]).unwrap();
        let f = reconstruct_p(&g);
        for k in f.modes().modes() {
            let c = f.coeff(&k);
            let want = if norm_sq(&k) == 0.0 { 3.0 } else { 0.0 };
            assert!((c.re - want).abs() < 1e-13 && c.im.abs() < 1e-13);
        }
    }

    #[test]
    fn band_limited_reproduction() {
        for d in 1..=2 {
            let f = random_field(4 + d as u64, d, 3);
            for n in [3, 5] {
                let r = project(&f, n);
                assert!(max_diff(&r, &f) < 1e-12, "d={d} n={n}");
                assert!(r.asymmetry() == 0.0);
            }
        }
    }

    #[test]
    fn aliasing_lands_on_mode_zero() {
        for n in 0..4usize {
            let k = 2 * n as i64 + 1;
            let f = FourierField::cosine(&[k], 2.0);
            let r = project(&f, n);
            // brute-force DFT of the samples
            let g = encode_d(&f, n);
            let side = 2 * n + 1;
            for kk in -(n as i64)..=(n as i64) {
                let mut brute = Complex64::new(0.0, 0.0);
                for nu in 0..side {
                    let arg = -2.0 * PI * kk as f64 * nu as f64 / side as f64;
                    brute += g.values[nu] * Complex64::from_polar(1.0, arg);
                }
                brute /= side as f64;
                assert!((r.coeff(&[kk]) - brute).norm() < 1e-12);
            }
            assert!((r.coeff(&[0]).re - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn discrete_orthogonality() {
        let n = 2;
        let g = ModeGrid {
            dim: 2,
            max_mode: n,
        };
        let one = GridSample::new(2, n, vec![1.0; 25]).unwrap();
        assert!((discrete_inner(&one, &one).unwrap().re - 1.0).abs() < 1e-15);
        for i in (0..g.len()).step_by(3) {
            for j in (0..g.len()).step_by(2) {
                let a = mode_samples(&g.mode(i), n);
                let b = mode_samples(&g.mode(j), n);
                let ip = discrete_inner_complex(&a, &b);
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((ip - Complex64::new(want, 0.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn discrete_inner_matches_naive() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let a: Vec<f64> = (0..49).map(|_| rng.random()).collect();
        let b: Vec<f64> = (0..49).map(|_| rng.random()).collect();
        let ga = GridSample::new(2, 3, a.clone()).unwrap();
        let gb = GridSample::new(2, 3, b.clone()).unwrap();
        let mut naive = 0.0;
        for i in 0..7 {
            for j in 0..7 {
                naive += a[i * 7 + j] * b[i * 7 + j];
            }
        }
        assert!((discrete_inner(&ga, &gb).unwrap().re - naive / 49.0).abs() < 1e-14);
    }

    proptest! {
        #[test]
        fn projection_is_idempotent(seed in 0u64..1000, n in 0usize..5, d in 1usize..3) {
            let f = random_field(seed, d, 6);
            let once = project(&f, n);
            let twice = project(&once, n);
            prop_assert!(max_diff(&once, &twice) < 1e-12);
        }
    }
}
