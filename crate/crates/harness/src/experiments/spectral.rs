use num_complex::Complex64;
use onet_core::spectral::{encode_d, lipschitz_const_p, reconstruct_p, sobolev_norm, FourierField};

use super::{within, Check, Report};
use crate::config::{ExperimentConfig, Params};
use crate::error::{HarnessError, Result};
use crate::fit::fit_rate;
use crate::output::CsvTable;

pub const SPECTRAL_RATE_KEYS: &[&str] = &[
    "smoothness",
    "s_prime",
    "n_values",
    "band_limit",
    "tolerance",
];

/// Cosine series with `|c_k| = (1 + |k|)^{-(s + 1)}` for `|k| <= band_limit`, which sits in
/// every `H^r` with `r < s + 1/2`.
pub fn algebraic_field(smoothness: f64, band_limit: usize) -> Result<FourierField> {
    let coeffs: Vec<Complex64> = (-(band_limit as i64)..=band_limit as i64)
        .map(|k| Complex64::new((1.0 + k.abs() as f64).powf(-(smoothness + 1.0)), 0.0))
        .collect();
    Ok(FourierField::from_coeffs(1, band_limit, coeffs)?)
}

/// `|| f - P(D f) ||_{H^s'}` computed on the coefficients of both fields.
pub fn reconstruction_error(f: &FourierField, n: usize, s_prime: f64) -> f64 {
    let rec = reconstruct_p(&encode_d(f, n)).with_max_mode(f.max_mode());
    sobolev_norm(&(f - &rec), s_prime)
}

pub fn spectral_rate(_cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let s = p.positive("smoothness", 4.0)?;
    let s_prime = p.f64("s_prime", 2.0)?;
    let ns = p.usize_list("n_values", &[4, 8, 16, 32, 64])?;
    let band = p.usize("band_limit", 8192)?;
    let tol = p.positive("tolerance", 0.4)?;
    if s_prime >= s {
        return Err(HarnessError::param(
            "s_prime",
            "must be below the smoothness",
        ));
    }
    if ns.iter().any(|&n| n >= band) {
        return Err(HarnessError::param(
            "n_values",
            "every N must be below band_limit",
        ));
    }
    let f = algebraic_field(s, band)?;
    let mut table = CsvTable::new(&["N", "error", "slope_so_far"]);
    let mut pairs = Vec::new();
    for &n in &ns {
        let err = reconstruction_error(&f, n, s_prime);
        pairs.push((n as f64, err));
        let so_far = if pairs.len() >= 3 {
            fit_rate(&pairs)?.slope
        } else {
            f64::NAN
        };
        table.push(vec![n.into(), err.into(), so_far.into()]);
    }
    let fit = fit_rate(&pairs)?;
    let target = s_prime - s;
    let mut report = Report::new("spectral-rate");
    report.metrics.insert("slope".into(), fit.slope);
    report.metrics.insert("r_squared".into(), fit.r_squared);
    report.checks.push(Check::new(
        "slope",
        within(fit.slope, target, tol),
        format!("slope {:.3} vs {target} +- {tol}", fit.slope),
    ));
    report.tables.push(("spectral_rate".into(), table));
    report.plot("spectral_rate", "N", &["error"]);
    Ok(report)
}

pub const LIPSCHITZ_KEYS: &[&str] = &["dim", "s_prime", "n_values", "tolerance"];

pub fn lipschitz_p(_cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let d = p.usize("dim", 1)?;
    let s_prime = p.positive("s_prime", 2.0)?;
    let ns = p.usize_list("n_values", &[4, 8, 16, 32, 64])?;
    let tol = p.positive("tolerance", 0.2)?;
    if d == 0 {
        return Err(HarnessError::param("dim", "must be positive"));
    }
    let mut table = CsvTable::new(&["N", "constant", "slope_so_far"]);
    let mut pairs = Vec::new();
    for &n in &ns {
        let c = lipschitz_const_p(n, d, s_prime);
        pairs.push((n as f64, c));
        let so_far = if pairs.len() >= 3 {
            fit_rate(&pairs)?.slope
        } else {
            f64::NAN
        };
        table.push(vec![n.into(), c.into(), so_far.into()]);
    }
    let fit = fit_rate(&pairs)?;
    let mut report = Report::new("lipschitz-P");
    report.metrics.insert("slope".into(), fit.slope);
    report.checks.push(Check::new(
        "slope",
        within(fit.slope, s_prime, tol),
        format!("slope {:.3} vs {s_prime} +- {tol}", fit.slope),
    ));
    report.tables.push(("lipschitz_p".into(), table));
    report.plot("lipschitz_p", "N", &["constant"]);
    Ok(report)
}
