use crate::{Error, Result};

/// `(value, first, second)` derivative triple of a 1-d function.
pub type Triple = [f64; 3];

/// Knots of the piecewise quadratic bump and half the jumps of its second derivative there:
/// `s(t) = sum_i c_i sigma2(t - t_i)`.
pub const KNOTS: [(f64, f64); 6] = [
    (0.0, 2.0),
    (0.5, -4.0),
    (1.0, 2.0),
    (5.0, -2.0),
    (5.5, 4.0),
    (6.0, -2.0),
];

/// The C^1 bump: rises on `[0, 1]`, equals 1 on `[1, 5]`, falls on `[5, 6]`.
pub fn s_scalar(t: f64) -> f64 {
    s_triple(t)[0]
}

pub fn s_triple(t: f64) -> Triple {
    if t <= 0.0 || t >= 6.0 {
        [0.0, 0.0, 0.0]
    } else if t <= 0.5 {
        [2.0 * t * t, 4.0 * t, 4.0]
    } else if t <= 1.0 {
        let u = t - 1.0;
        [1.0 - 2.0 * u * u, -4.0 * u, -4.0]
    } else if t <= 5.0 {
        [1.0, 0.0, 0.0]
    } else if t <= 5.5 {
        let u = t - 5.0;
        [1.0 - 2.0 * u * u, -4.0 * u, -4.0]
    } else {
        let u = t - 6.0;
        [2.0 * u * u, 4.0 * u, 4.0]
    }
}

/// `s_m(x) = s(4Kx + 5 - 4m)` for `m` in `1..=K`.
pub fn s_m_scalar(x: f64, k: usize, m: usize) -> f64 {
    s_m_triple(x, k, m)[0]
}

pub fn s_m_triple(x: f64, k: usize, m: usize) -> Triple {
    let a = 4.0 * k as f64;
    let [v, d1, d2] = s_triple(a * x + 5.0 - 4.0 * m as f64);
    [v, a * d1, a * a * d2]
}

/// Tensor bump `prod_j s_{m_j}(x_j)`.
pub fn s_m(x: &[f64], k: usize, m: &[usize]) -> f64 {
    x.iter()
        .zip(m)
        .map(|(&xj, &mj)| s_m_scalar(xj, k, mj))
        .product()
}

/// Support box of `s_m` clipped to the unit cube.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverBox {
    pub cells: usize,
    /// 1-based cell index per axis.
    pub m: Vec<usize>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
}

impl CoverBox {
    pub fn new(cells: usize, m: Vec<usize>) -> Result<Self> {
        if cells == 0 || m.iter().any(|&mj| mj == 0 || mj > cells) {
            return Err(Error::invalid(format!("cell {m:?} outside [1, {cells}]^d")));
        }
        let k = cells as f64;
        let lo = m
            .iter()
            .map(|&mj| ((mj as f64 - 1.0) / k - 0.25 / k).max(0.0))
            .collect();
        let hi = m
            .iter()
            .map(|&mj| (mj as f64 / k + 0.25 / k).min(1.0))
            .collect();
        Ok(CoverBox { cells, m, lo, hi })
    }

    /// All `K^d` boxes, last axis fastest.
    pub fn enumerate(cells: usize, d: usize) -> Vec<CoverBox> {
        let total = cells.pow(d as u32);
        (0..total)
            .map(|mut i| {
                let mut m = vec![0; d];
                for j in (0..d).rev() {
                    m[j] = i % cells + 1;
                    i /= cells;
                }
                CoverBox::new(cells, m).expect("index in range")
            })
            .collect()
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn center(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (a + b))
            .collect()
    }

    pub fn half_widths(&self) -> Vec<f64> {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(a, b)| 0.5 * (b - a))
            .collect()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(xj, (a, b))| a <= xj && xj <= b)
    }
}

pub(crate) fn check_unit_cube(x: &[f64]) -> Result<()> {
    if x.iter().all(|v| (0.0..=1.0).contains(v)) {
        Ok(())
    } else {
        Err(Error::OutsideDomain(x.to_vec()))
    }
}

/// `sum_m s_m(x)` over all `K^d` cells. It factorizes into per-axis sums.
pub fn pu_raw_sum(x: &[f64], k: usize) -> Result<f64> {
    check_unit_cube(x)?;
    Ok(x.iter().map(|&xj| axis_sum(xj, k)[0]).product())
}

fn axis_sum(x: f64, k: usize) -> Triple {
    let mut acc = [0.0; 3];
    for m in 1..=k {
        let t = s_m_triple(x, k, m);
        for i in 0..3 {
            acc[i] += t[i];
        }
    }
    acc
}

/// 1-d normalized bump `s_m / sum_m' s_m'` with its first two derivatives.
pub fn pu_axis_triple(x: f64, k: usize, m: usize) -> Triple {
    let [s, s1, s2] = s_m_triple(x, k, m);
    if s == 0.0 && s1 == 0.0 && s2 == 0.0 {
        return [0.0; 3];
    }
    let [q, q1, q2] = axis_sum(x, k);
    let v = s / q;
    let d1 = (s1 * q - s * q1) / (q * q);
    let d2 = (s2 - 2.0 * d1 * q1 - v * q2) / q;
    [v, d1, d2]
}

/// `s_m(x) / sum_m' s_m'(x)`, summing to one over the cells.
pub fn pu_normalized(x: &[f64], k: usize, m: &[usize]) -> Result<f64> {
    check_unit_cube(x)?;
    Ok(x.iter()
        .zip(m)
        .map(|(&xj, &mj)| pu_axis_triple(xj, k, mj)[0])
        .product())
}

/// `D^alpha` of the normalized bump for `alpha_j <= 2`.
pub fn pu_normalized_derivative(x: &[f64], k: usize, m: &[usize], alpha: &[usize]) -> f64 {
    x.iter()
        .zip(m)
        .zip(alpha)
        .map(|((&xj, &mj), &aj)| pu_axis_triple(xj, k, mj)[aj])
        .product()
}

/// `D^alpha` of the raw bump for `alpha_j <= 2`.
pub fn s_m_derivative(x: &[f64], k: usize, m: &[usize], alpha: &[usize]) -> f64 {
    x.iter()
        .zip(m)
        .zip(alpha)
        .map(|((&xj, &mj), &aj)| s_m_triple(xj, k, mj)[aj])
        .product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn s_pieces() {
        assert_eq!(s_scalar(0.5), 0.5);
        assert_eq!(s_scalar(3.0), 1.0);
        assert_eq!(s_scalar(6.0), 0.0);
        assert_eq!(s_scalar(-1.0), 0.0);
        assert_eq!(s_scalar(5.5), 0.5);
    }

    #[test]
    fn knot_representation_is_exact() {
        for i in 0..=700 {
            let t = -0.5 + i as f64 * 0.01;
            let r: f64 = KNOTS
                .iter()
                .map(|(ti, c)| c * (t - ti).max(0.0).powi(2))
                .sum();
            assert!((r - s_scalar(t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn s_is_c1() {
        for &t in &[0.0, 0.5, 1.0, 5.0, 5.5, 6.0] {
            let (a, b) = (s_triple(t - 1e-9), s_triple(t + 1e-9));
            assert!((a[0] - b[0]).abs() < 1e-8 && (a[1] - b[1]).abs() < 1e-7);
        }
    }

    #[test]
    fn single_cell_is_one() {
        for i in 0..=100 {
            assert_eq!(s_m_scalar(i as f64 / 100.0, 1, 1), 1.0);
        }
        for k in 1..6 {
            for m in 1..=k {
                assert_eq!(s_m_scalar(m as f64 / k as f64, k, m), 1.0);
            }
        }
    }

    #[test]
    fn support_matches_cover_box() {
        for k in [1, 2, 3, 5] {
            for m in 1..=k {
                let b = CoverBox::new(k, vec![m]).unwrap();
                let (kf, mf) = (k as f64, m as f64);
                let lo = (mf - 1.0) / kf - 0.25 / kf;
                let hi = mf / kf + 0.25 / kf;
                assert!(s_m_scalar(lo, k, m).abs() < 1e-12 && s_m_scalar(hi, k, m).abs() < 1e-12);
                assert!(s_m_scalar(lo + 1e-6, k, m) > 0.0 && s_m_scalar(hi - 1e-6, k, m) > 0.0);
                assert!((b.lo[0] - lo.max(0.0)).abs() < 1e-12);
                assert!((b.hi[0] - hi.min(1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn raw_sum_counterexample() {
        assert_eq!(pu_raw_sum(&[7.0 / 16.0], 2).unwrap(), 1.5);
        assert_eq!(pu_raw_sum(&[0.3], 1).unwrap(), 1.0);
        assert!(matches!(
            pu_raw_sum(&[1.2], 2),
            Err(Error::OutsideDomain(_))
        ));
    }

    #[test]
    fn normalized_sums_to_one() {
        for k in [1, 2, 3, 4] {
            for i in 0..=2000 {
                let x = i as f64 / 2000.0;
                let total: f64 = (1..=k).map(|m| pu_normalized(&[x], k, &[m]).unwrap()).sum();
                assert!((total - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn normalized_derivatives_match_fd() {
        let (k, m, h) = (3, 2, 1e-5);
        for i in 0..200 {
            let x = (i as f64 + 0.37) / 200.0;
            let t = pu_axis_triple(x, k, m);
            let fd1 = (pu_axis_triple(x + h, k, m)[0] - pu_axis_triple(x - h, k, m)[0]) / (2.0 * h);
            let fd2 = (pu_axis_triple(x + h, k, m)[1] - pu_axis_triple(x - h, k, m)[1]) / (2.0 * h);
            assert!((t[1] - fd1).abs() < 1e-4 * (1.0 + t[1].abs()));
            assert!((t[2] - fd2).abs() < 1e-3 * (1.0 + t[2].abs()));
        }
    }

    proptest! {
        #[test]
        fn normalized_partition_2d(x in 0.0f64..=1.0, y in 0.0f64..=1.0, k in 1usize..5) {
            let mut total = 0.0;
            for b in CoverBox::enumerate(k, 2) {
                let v = pu_normalized(&[x, y], k, &b.m).unwrap();
                prop_assert!((0.0..=1.0 + 1e-15).contains(&v));
                if v > 0.0 {
                    prop_assert!(b.contains(&[x, y]));
                }
                total += v;
            }
            prop_assert!((total - 1.0).abs() < 1e-12);
        }
    }
}
