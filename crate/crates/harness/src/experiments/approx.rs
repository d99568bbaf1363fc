use onet_core::multi_index::{self, power};
use onet_core::spectral::Ensemble;
use onet_core::trunk::{
    assemble_vk, bump_net, h2_error, monomial_net, product_net, pu_normalized, pu_raw_sum,
    s_m_derivative, trunk_basis, CoeffMode, CoverBox,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{within, Check, Report};
use crate::config::{ExperimentConfig, Params};
use crate::error::{HarnessError, Result};
use crate::fit::fit_rate;
use crate::output::CsvTable;

pub const PU_KEYS: &[&str] = &["cells", "dim", "grid_res", "slack"];

fn grid_points(d: usize, res: usize) -> Vec<Vec<f64>> {
    let total = (res + 1).pow(d as u32);
    (0..total)
        .map(|mut idx| {
            let mut x = vec![0.0; d];
            for a in (0..d).rev() {
                x[a] = (idx % (res + 1)) as f64 / res as f64;
                idx /= res + 1;
            }
            x
        })
        .collect()
}

/// Sup of `|D^alpha s_m|` over the grid, maximized over cells and `|alpha| = order`.
fn bump_sup(k: usize, d: usize, order: usize, points: &[Vec<f64>]) -> f64 {
    let alphas = multi_index::of_degree(d, order);
    let mut best = 0.0f64;
    for cell in CoverBox::enumerate(k, d) {
        for alpha in &alphas {
            for x in points {
                best = best.max(s_m_derivative(x, k, &cell.m, alpha).abs());
            }
        }
    }
    best
}

pub fn pu_properties(_cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let cells = p.usize_list("cells", &[1, 2, 4, 8])?;
    let d = p.usize("dim", 1)?;
    let res = p.usize("grid_res", 2048)?;
    let slack = p.f64("slack", 1e-6)?;
    if d == 0 || res == 0 {
        return Err(HarnessError::param(
            "dim",
            "dim and grid_res must be positive",
        ));
    }
    // grid_res counts points along one axis; keep the total manageable in higher d
    let res = if d > 1 { res.min(64) } else { res };
    let points = grid_points(d, res);
    let mut table = CsvTable::new(&[
        "K",
        "sup_value",
        "sup_first",
        "bound_first",
        "sup_second",
        "bound_second",
        "raw_sum_max",
        "normalized_dev",
    ]);
    let mut report = Report::new("pu-properties");
    let mut all_ok = true;
    for &k in &cells {
        let kf = k as f64;
        let sup0 = bump_sup(k, d, 0, &points);
        let sup1 = bump_sup(k, d, 1, &points);
        let sup2 = bump_sup(k, d, 2, &points);
        let mut raw_max = 0.0f64;
        let mut dev = 0.0f64;
        for x in &points {
            raw_max = raw_max.max(pu_raw_sum(x, k)?);
            let total: f64 = CoverBox::enumerate(k, d)
                .iter()
                .map(|c| pu_normalized(x, k, &c.m))
                .sum::<onet_core::Result<f64>>()?;
            dev = dev.max((total - 1.0).abs());
        }
        let ok = sup0 <= 1.0 + slack
            && sup1 <= 8.0 * kf * (1.0 + slack)
            && sup2 <= 64.0 * kf * kf * (1.0 + slack)
            && dev <= 1e-12;
        all_ok &= ok;
        table.push(vec![
            k.into(),
            sup0.into(),
            sup1.into(),
            (8.0 * kf).into(),
            sup2.into(),
            (64.0 * kf * kf).into(),
            raw_max.into(),
            dev.into(),
        ]);
        report.metrics.insert(format!("normalized_dev_k{k}"), dev);
        report.metrics.insert(format!("sup_value_k{k}"), sup0);
        report
            .metrics
            .insert(format!("sup_first_ratio_k{k}"), sup1 / (8.0 * kf));
        report
            .metrics
            .insert(format!("sup_second_ratio_k{k}"), sup2 / (64.0 * kf * kf));
    }
    let counter = pu_raw_sum(&[7.0 / 16.0], 2)?;
    report
        .metrics
        .insert("raw_sum_counterexample".into(), counter);
    report.checks.push(Check::new(
        "bounds",
        all_ok,
        "sup <= 1, W1 <= 8K, W2 <= 64K^2, normalized sum 1",
    ));
    report.checks.push(Check::new(
        "raw_sum_counterexample",
        counter == 1.5,
        format!("raw sum at K=2 x=7/16 is {counter}"),
    ));
    report.tables.push(("pu_properties".into(), table));
    Ok(report)
}

pub const EXACTNESS_KEYS: &[&str] = &["n_points", "order", "cells", "dim", "tolerance"];

fn random_points(rng: &mut ChaCha8Rng, d: usize, n: usize, lo: f64, hi: f64) -> Vec<Vec<f64>> {
    (0..n)
        .map(|_| (0..d).map(|_| rng.random_range(lo..=hi)).collect())
        .collect()
}

pub fn trunk_exactness(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let n_points = p.usize("n_points", 1000)?;
    let n = p.usize("order", 4)?;
    let k = p.usize("cells", 2)?;
    let d = p.usize("dim", 2)?;
    let tol = p.positive("tolerance", 1e-11)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seeds[0]);
    let mut table = CsvTable::new(&["network", "points", "max_abs_error", "depth", "width"]);
    let mut worst_all = 0.0f64;

    let prod = product_net();
    let mut worst = 0.0f64;
    for x in random_points(&mut rng, 2, n_points, -1.0, 1.0) {
        worst = worst.max((prod.eval(&x)? - x[0] * x[1]).abs());
    }
    worst_all = worst_all.max(worst);
    table.push(vec![
        "product".into(),
        n_points.into(),
        worst.into(),
        prod.depth().into(),
        prod.width().into(),
    ]);

    let pts = random_points(&mut rng, d, n_points, 0.0, 1.0);
    for alpha in multi_index::up_to_degree(d, n) {
        let net = monomial_net(&alpha, d)?;
        let mut worst = 0.0f64;
        for x in &pts {
            worst = worst.max((net.eval(x)? - power(x, &alpha)).abs());
        }
        worst_all = worst_all.max(worst);
        table.push(vec![
            format!("monomial{alpha:?}").replace(", ", " ").into(),
            n_points.into(),
            worst.into(),
            net.depth().into(),
            net.width().into(),
        ]);
    }

    for cell in CoverBox::enumerate(k, d) {
        let net = bump_net(k, &cell.m, d)?;
        let mut worst = 0.0f64;
        for x in &pts {
            worst = worst.max((net.eval(x)? - onet_core::trunk::s_m(x, k, &cell.m)).abs());
        }
        worst_all = worst_all.max(worst);
        table.push(vec![
            format!("bump{:?}", cell.m).replace(", ", " ").into(),
            n_points.into(),
            worst.into(),
            net.depth().into(),
            net.width().into(),
        ]);
    }

    let basis = trunk_basis(k, n, d)?;
    let mut worst = 0.0f64;
    for el in &basis.elements {
        for x in &pts {
            worst = worst.max((el.net.eval(x)? - el.target(x, k)).abs());
        }
    }
    worst_all = worst_all.max(worst);
    table.push(vec![
        "trunk_basis".into(),
        (n_points * basis.len()).into(),
        worst.into(),
        basis.max_depth().into(),
        basis.max_width().into(),
    ]);

    let mut report = Report::new("trunk-exactness");
    report.metrics.insert("max_abs_error".into(), worst_all);
    report.checks.push(Check::new(
        "exact",
        worst_all <= tol,
        format!("max error {worst_all:.3e} vs {tol:.0e}"),
    ));
    report.tables.push(("trunk_exactness".into(), table));
    Ok(report)
}

pub const LOCAL_RATE_KEYS: &[&str] = &[
    "order",
    "cells",
    "smoothness",
    "band_limit",
    "quad_res",
    "h2_points",
    "coefficients",
    "tolerance",
    "min_r_squared",
];

pub fn local_approx_rate(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let n = p.usize("order", 4)?;
    let cells = p.usize_list("cells", &[2, 4, 8, 16])?;
    let s = p.positive("smoothness", 4.0)?;
    let band = p.usize("band_limit", 3)?;
    let quad_res = p.usize("quad_res", 8)?;
    let h2_points = p.usize("h2_points", 6)?;
    let tol = p.positive("tolerance", 0.5)?;
    let min_r2 = p.f64("min_r_squared", 0.9)?;
    let mode = match cfg.params.get("coefficients") {
        None => CoeffMode::LeastSquares,
        Some(crate::config::Value::Str(s)) if s == "least-squares" => CoeffMode::LeastSquares,
        Some(crate::config::Value::Str(s)) if s == "averaged-taylor" => CoeffMode::AveragedTaylor,
        Some(_) => {
            return Err(HarnessError::param(
                "coefficients",
                "expected \"least-squares\" or \"averaged-taylor\"",
            ))
        }
    };
    if n < 3 {
        return Err(HarnessError::param(
            "order",
            "the H^2 rate needs order >= 3",
        ));
    }
    let ensemble = Ensemble::new(1, s, band, f64::INFINITY)?;
    let fields: Vec<_> = cfg.seeds.iter().map(|&seed| ensemble.draw(seed)).collect();
    let mut table = CsvTable::new(&["K", "p", "error", "slope_so_far"]);
    let mut pairs = Vec::new();
    for &k in &cells {
        // geometric mean over the input draws
        let mut log_sum = 0.0;
        for f in &fields {
            let vk = assemble_vk(f, k, n, mode, quad_res)?;
            log_sum += h2_error(&vk, f, k, h2_points)?.ln();
        }
        let err = (log_sum / fields.len() as f64).exp();
        pairs.push((k as f64, err));
        let so_far = if pairs.len() >= 3 {
            fit_rate(&pairs)?.slope
        } else {
            f64::NAN
        };
        table.push(vec![k.into(), (k * n).into(), err.into(), so_far.into()]);
    }
    let fit = fit_rate(&pairs)?;
    let target = -(n as f64 - 2.0);
    let mut report = Report::new("local-approx-rate");
    report.metrics.insert("slope".into(), fit.slope);
    report.metrics.insert("r_squared".into(), fit.r_squared);
    report.checks.push(Check::new(
        "slope",
        within(fit.slope, target, tol) && fit.r_squared >= min_r2,
        format!(
            "slope {:.3} vs {target} +- {tol}, R^2 {:.3}",
            fit.slope, fit.r_squared
        ),
    ));
    report.tables.push(("local_approx_rate".into(), table));
    report.plot("local_approx_rate", "K", &["error"]);
    Ok(report)
}
