use crate::error::{HarnessError, Result};

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RateFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n_points: usize,
}

pub fn fit_rate(pairs: &[(f64, f64)]) -> Result<RateFit> {
    if pairs.len() < 3 {
        return Err(HarnessError::param(
            "fit",
            "a rate fit needs at least 3 points",
        ));
    }
    if pairs.iter().any(|&(x, y)| !(x > 0.0 && y > 0.0)) {
        return Err(HarnessError::param(
            "fit",
            "rate fits need positive x and y",
        ));
    }
    let n = pairs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = pairs.iter().map(|&(x, y)| (x.ln(), y.ln())).unzip();
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    if sxx == 0.0 {
        return Err(HarnessError::param("fit", "all x values coincide"));
    }
    let slope = sxy / sxx;
    let r_squared = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Ok(RateFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        n_points: pairs.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_power_laws() {
        let sq: Vec<_> = (1..6).map(|i| (i as f64, (i * i) as f64)).collect();
        let f = fit_rate(&sq).unwrap();
        assert!((f.slope - 2.0).abs() < 1e-12);
        assert!((f.r_squared - 1.0).abs() < 1e-12);
        let pl: Vec<_> = [1.0, 2.0, 4.0, 8.0]
            .iter()
            .map(|&x: &f64| (x, 3.0 * x.powf(-1.5)))
            .collect();
        let f = fit_rate(&pl).unwrap();
        assert!((f.slope + 1.5).abs() < 1e-12);
        assert!((f.intercept - 3f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn rejects_degenerate_input() {
        assert!(fit_rate(&[(1.0, 1.0), (2.0, 2.0)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (2.0, -2.0), (3.0, 1.0)]).is_err());
        assert!(fit_rate(&[(1.0, 1.0), (1.0, 2.0), (1.0, 3.0)]).is_err());
    }

    /// Normal equations in raw sums, solved by Cramer's rule.
    #[test]
    fn noisy_data_matches_normal_equations() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let pairs: Vec<(f64, f64)> = (1..=12)
            .map(|i| {
                let x = 1.5f64.powi(i);
                (x, 0.7 * x.powf(-0.8) * rng.random_range(0.5..2.0))
            })
            .collect();
        let f = fit_rate(&pairs).unwrap();
        let (mut s1, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for &(x, y) in &pairs {
            let (u, v) = (x.ln(), y.ln());
            s1 += 1.0;
            sx += u;
            sy += v;
            sxx += u * u;
            sxy += u * v;
        }
        let det = s1 * sxx - sx * sx;
        let slope = (s1 * sxy - sx * sy) / det;
        let intercept = (sxx * sy - sx * sxy) / det;
        assert!((f.slope - slope).abs() <= 1e-10);
        assert!((f.intercept - intercept).abs() <= 1e-10);
        assert!(f.r_squared > 0.0 && f.r_squared < 1.0);
    }
}
