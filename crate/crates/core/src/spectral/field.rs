use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

/// Mode multi-indices `k` with `|k|_inf <= max_mode`, last axis fastest.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModeGrid {
    pub dim: usize,
    pub max_mode: usize,
}

impl ModeGrid {
    pub fn side(&self) -> usize {
        2 * self.max_mode + 1
    }

    pub fn len(&self) -> usize {
        self.side().pow(self.dim as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn mode(&self, mut index: usize) -> Vec<i64> {
        let side = self.side();
        let mut k = vec![0i64; self.dim];
        for j in (0..self.dim).rev() {
            k[j] = (index % side) as i64 - self.max_mode as i64;
            index /= side;
        }
        k
    }

    pub fn index(&self, k: &[i64]) -> Option<usize> {
        let side = self.side() as i64;
        let big = self.max_mode as i64;
        let mut idx = 0i64;
        for &kj in k {
            if kj.abs() > big {
                return None;
            }
            idx = idx * side + kj + big;
        }
        Some(idx as usize)
    }

    /// Index of `-k` given the index of `k`.
    pub fn mirror(&self, index: usize) -> usize {
        self.len() - 1 - index
    }

    pub fn modes(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        (0..self.len()).map(|i| self.mode(i))
    }
}

pub fn norm_sq(k: &[i64]) -> f64 {
    k.iter().map(|&x| (x * x) as f64).sum()
}

/// A real function on the unit torus stored by its Fourier coefficients
/// `f(x) = sum_k c_k exp(i 2 pi k.x)` with `c_{-k} = conj(c_k)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FourierField {
    grid: ModeGrid,
    coeffs: Vec<Complex64>,
}

impl FourierField {
    pub fn zeros(dim: usize, max_mode: usize) -> Self {
        let grid = ModeGrid { dim, max_mode };
        FourierField {
            grid,
            coeffs: vec![Complex64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        let mut f = Self::zeros(dim, 0);
        f.coeffs[0] = Complex64::new(c, 0.0);
        f
    }

    /// `amplitude * cos(2 pi k.x)`, stored as `amplitude/2` on `k` and `-k`.
    pub fn cosine(k: &[i64], amplitude: f64) -> Self {
        let max_mode = k
            .iter()
            .map(|x| x.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut f = Self::zeros(k.len(), max_mode);
        if k.iter().all(|&x| x == 0) {
            f.coeffs[f.grid.index(k).unwrap()] = Complex64::new(amplitude, 0.0);
        } else {
            f.set_pair(k, Complex64::new(0.5 * amplitude, 0.0)).unwrap();
        }
        f
    }

    /// `amplitude * sin(2 pi k.x)`
    pub fn sine(k: &[i64], amplitude: f64) -> Self {
        let max_mode = k
            .iter()
            .map(|x| x.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        let mut f = Self::zeros(k.len(), max_mode);
        if k.iter().any(|&x| x != 0) {
            f.set_pair(k, Complex64::new(0.0, -0.5 * amplitude))
                .unwrap();
        }
        f
    }

    /// Takes ownership of a dense coefficient array; checks conjugate symmetry.
    pub fn from_coeffs(dim: usize, max_mode: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        let grid = ModeGrid { dim, max_mode };
        if coeffs.len() != grid.len() {
            return Err(Error::DimensionMismatch {
                expected: grid.len(),
                got: coeffs.len(),
            });
        }
        let f = FourierField { grid, coeffs };
        let asym = f.asymmetry();
        if asym > 1e-12 * (1.0 + f.max_abs()) {
            return Err(Error::invalid(format!(
                "coefficients are not conjugate symmetric (defect {asym:e})"
            )));
        }
        Ok(f)
    }

    pub(crate) fn from_coeffs_unchecked(grid: ModeGrid, coeffs: Vec<Complex64>) -> Self {
        debug_assert_eq!(coeffs.len(), grid.len());
        FourierField { grid, coeffs }
    }

    pub fn dim(&self) -> usize {
        self.grid.dim
    }

    pub fn max_mode(&self) -> usize {
        self.grid.max_mode
    }

    pub fn modes(&self) -> ModeGrid {
        self.grid
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Zero outside the stored band.
    pub fn coeff(&self, k: &[i64]) -> Complex64 {
        if k.len() != self.dim() {
            return Complex64::new(0.0, 0.0);
        }
        self.grid
            .index(k)
            .map(|i| self.coeffs[i])
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Sets `c_k = c` and `c_{-k} = conj(c)`. For `k = 0` only the real part is kept.
    pub fn set_pair(&mut self, k: &[i64], c: Complex64) -> Result<()> {
        let i = self
            .grid
            .index(k)
            .ok_or_else(|| Error::invalid(format!("mode {k:?} outside band")))?;
        let j = self.grid.mirror(i);
        if i == j {
            self.coeffs[i] = Complex64::new(c.re, 0.0);
        } else {
            self.coeffs[i] = c;
            self.coeffs[j] = c.conj();
        }
        Ok(())
    }

    pub fn max_abs(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// `max_k |c_k - conj(c_{-k})|`
    pub fn asymmetry(&self) -> f64 {
        (0..self.coeffs.len())
            .map(|i| (self.coeffs[i] - self.coeffs[self.grid.mirror(i)].conj()).norm())
            .fold(0.0, f64::max)
    }

    /// Same field on a different band, truncating or zero padding.
    pub fn with_max_mode(&self, max_mode: usize) -> FourierField {
        let mut out = FourierField::zeros(self.dim(), max_mode);
        let target = out.grid;
        for (i, k) in self.grid.modes().enumerate() {
            if let Some(j) = target.index(&k) {
                out.coeffs[j] = self.coeffs[i];
            }
        }
        out
    }

    /// Applies a real Fourier multiplier `c_k <- w(k) c_k`.
    pub fn multiply(&self, w: impl Fn(&[i64]) -> f64) -> FourierField {
        let coeffs = self
            .grid
            .modes()
            .zip(&self.coeffs)
            .map(|(k, c)| c * w(&k))
            .collect();
        FourierField::from_coeffs_unchecked(self.grid, coeffs)
    }

    pub fn scale(&self, a: f64) -> FourierField {
        self.multiply(|_| a)
    }

    /// Coefficients of `D^alpha f`.
    pub fn derivative_field(&self, alpha: &[usize]) -> FourierField {
        let coeffs = self
            .grid
            .modes()
            .zip(&self.coeffs)
            .map(|(k, c)| c * derivative_symbol(&k, alpha))
            .collect();
        FourierField::from_coeffs_unchecked(self.grid, coeffs)
    }

    /// Per-axis tables `exp(i 2 pi k x_j)` for `k = -K..=K`.
    fn phases(&self, x: &[f64]) -> Vec<Vec<Complex64>> {
        let big = self.max_mode() as i64;
        x.iter()
            .map(|&xj| {
                (-big..=big)
                    .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 * xj))
                    .collect()
            })
            .collect()
    }

    fn sum_with_phases(&self, phases: &[Vec<Complex64>]) -> Complex64 {
        let side = self.grid.side();
        let d = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        let mut digits = vec![0usize; d];
        for c in &self.coeffs {
            let mut e = Complex64::new(1.0, 0.0);
            for j in 0..d {
                e *= phases[j][digits[j]];
            }
            acc += c * e;
            for j in (0..d).rev() {
                digits[j] += 1;
                if digits[j] < side {
                    break;
                }
                digits[j] = 0;
            }
        }
        acc
    }

    /// Complex point value; the imaginary part is rounding noise for a symmetric field.
    pub fn evaluate_complex(&self, x: &[f64]) -> Complex64 {
        self.sum_with_phases(&self.phases(x))
    }

    pub fn evaluate(&self, x: &[f64]) -> f64 {
        self.evaluate_complex(x).re
    }

    /// `D^alpha f(x)` by exact spectral differentiation.
    pub fn derivative(&self, alpha: &[usize], x: &[f64]) -> f64 {
        self.derivative_field(alpha).evaluate(x)
    }

    /// `<f, g>` in L^2 of the torus (real fields).
    pub fn l2_inner(&self, other: &FourierField) -> f64 {
        let big = self.max_mode().max(other.max_mode());
        let (a, b) = (self.with_max_mode(big), other.with_max_mode(big));
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| (x * y.conj()).re)
            .sum()
    }

    fn combine(&self, other: &FourierField, sign: f64) -> FourierField {
        assert_eq!(self.dim(), other.dim(), "field dimensions differ");
        let big = self.max_mode().max(other.max_mode());
        let mut a = self.with_max_mode(big);
        let b = other.with_max_mode(big);
        for (x, y) in a.coeffs.iter_mut().zip(&b.coeffs) {
            *x += y * sign;
        }
        a
    }
}

/// `prod_j (i 2 pi k_j)^{alpha_j}`
pub fn derivative_symbol(k: &[i64], alpha: &[usize]) -> Complex64 {
    let mut s = Complex64::new(1.0, 0.0);
    for (&kj, &aj) in k.iter().zip(alpha) {
        s *= Complex64::new(0.0, 2.0 * PI * kj as f64).powu(aj as u32);
    }
    s
}

impl Add for &FourierField {
    type Output = FourierField;
    fn add(self, rhs: &FourierField) -> FourierField {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &FourierField {
    type Output = FourierField;
    fn sub(self, rhs: &FourierField) -> FourierField {
        self.combine(rhs, -1.0)
    }
}

impl Mul<&FourierField> for f64 {
    type Output = FourierField;
    fn mul(self, rhs: &FourierField) -> FourierField {
        rhs.scale(self)
    }
}
