use onet_core::train::{generalization_gap, train, GapReport};

use super::setup::{block, Defaults, Setup, EVAL_STREAM};
use super::{exec, median, Check, Report};
use crate::config::{ExperimentConfig, Params};
use crate::error::{HarnessError, Result};
use crate::fit::fit_rate;
use crate::output::CsvTable;

const SHARED_KEYS: &[&str] = &[
    "dim",
    "n_grid",
    "cells",
    "order",
    "c",
    "smoothness",
    "band_limit",
    "norm_bound",
    "budget",
    "lambda",
    "base_width",
    "base_depth",
    "layout",
    "zero_readout",
    "steps",
    "step_size",
    "momentum",
    "clip",
    "n_fresh",
    "quad_res",
];

pub const GAP_M_KEYS: &[&str] = &[
    "dim",
    "n_grid",
    "cells",
    "order",
    "c",
    "smoothness",
    "band_limit",
    "norm_bound",
    "budget",
    "lambda",
    "base_width",
    "base_depth",
    "layout",
    "zero_readout",
    "steps",
    "step_size",
    "momentum",
    "clip",
    "n_fresh",
    "quad_res",
    "m_values",
    "p_points",
    "target_slope",
    "tolerance",
];

pub const GAP_P_KEYS: &[&str] = &[
    "dim",
    "n_grid",
    "cells",
    "order",
    "c",
    "smoothness",
    "band_limit",
    "norm_bound",
    "budget",
    "lambda",
    "base_width",
    "base_depth",
    "layout",
    "zero_readout",
    "steps",
    "step_size",
    "momentum",
    "clip",
    "n_fresh",
    "quad_res",
    "p_values",
    "m_samples",
];

const _: () = assert!(GAP_M_KEYS.len() == SHARED_KEYS.len() + 4);
const _: () = assert!(GAP_P_KEYS.len() == SHARED_KEYS.len() + 2);

/// Trains one model per seed at sample sizes `(m, p)` and measures its gap. Fresh draws use
/// the same stream for every size, so differences between sizes are not eval noise.
fn gaps_at(
    setup: &Setup,
    seeds: &[u64],
    m: usize,
    p: usize,
    n_fresh: usize,
    quad_res: usize,
) -> Result<Vec<GapReport>> {
    seeds
        .iter()
        .map(|&seed| {
            let mut model = setup.model(seed)?;
            let set = setup.data(m, p, seed)?;
            train(&mut model, &set, &setup.train)?;
            Ok(generalization_gap(
                &model,
                &set,
                &setup.ensemble,
                &setup.op,
                n_fresh,
                quad_res,
                block(EVAL_STREAM, seed),
                setup.train.exec,
            )?)
        })
        .collect()
}

struct Sweep {
    trials: CsvTable,
    summary: CsvTable,
    medians: Vec<(f64, f64)>,
}

fn sweep(
    cfg: &ExperimentConfig,
    p: &Params,
    setup: &Setup,
    label: &str,
    sizes: &[(usize, usize)],
) -> Result<Sweep> {
    let n_fresh = p.usize("n_fresh", 512)?;
    let quad_res = p.usize("quad_res", 64)?;
    if n_fresh == 0 || quad_res == 0 {
        return Err(HarnessError::param(
            "n_fresh",
            "n_fresh and quad_res must be positive",
        ));
    }
    let mut trials = CsvTable::new(&["trial", label, "seed", "ls", "ld", "value", "stderr"]);
    let mut summary = CsvTable::new(&[label, "median_gap", "mean_gap", "stderr"]);
    let mut medians = Vec::new();
    let mut trial = 0usize;
    for &(m, pts) in sizes {
        let x = if label == "M" { m } else { pts };
        let reports = gaps_at(setup, &cfg.seeds, m, pts, n_fresh, quad_res)?;
        for (r, &seed) in reports.iter().zip(&cfg.seeds) {
            trials.push(vec![
                trial.into(),
                x.into(),
                seed.into(),
                r.ls.into(),
                r.ld.into(),
                r.gap.into(),
                r.stderr.into(),
            ]);
            trial += 1;
        }
        let gaps: Vec<f64> = reports.iter().map(|r| r.gap).collect();
        let n = gaps.len() as f64;
        let mean = gaps.iter().sum::<f64>() / n;
        let spread = if gaps.len() > 1 {
            (gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
        } else {
            f64::NAN
        };
        let med = median(&gaps);
        summary.push(vec![x.into(), med.into(), mean.into(), spread.into()]);
        medians.push((x as f64, med));
    }
    Ok(Sweep {
        trials,
        summary,
        medians,
    })
}

/// Frozen single-cell degree-7 trunk on smooth inputs: the gap is set by the branch fit.
pub fn gap_vs_m(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let def = Defaults {
        steps: 500,
        ..Defaults::default()
    };
    let setup = Setup::parse(p, def, exec(p)?)?;
    let ms = p.usize_list("m_values", &[8, 16, 32, 64, 128])?;
    let pts = p.usize("p_points", 4096)?;
    let target = p.f64("target_slope", -0.5)?;
    let tol = p.positive("tolerance", 0.3)?;
    let sizes: Vec<_> = ms.iter().map(|&m| (m, pts)).collect();
    let sw = sweep(cfg, p, &setup, "M", &sizes)?;
    let mut report = Report::new("gap-vs-M");
    let fit = fit_rate(&sw.medians)
        .map_err(|e| HarnessError::param("m_values", format!("median gaps not fittable: {e}")));
    match fit {
        Ok(fit) => {
            report.metrics.insert("slope".into(), fit.slope);
            report.metrics.insert("r_squared".into(), fit.r_squared);
            report.checks.push(Check::new(
                "slope",
                (fit.slope - target).abs() <= tol,
                format!("median gap slope {:.3} vs {target} +- {tol}", fit.slope),
            ));
        }
        Err(e) => report
            .checks
            .push(Check::new("slope", false, e.to_string())),
    }
    report.tables.push(("gap_vs_m".into(), sw.summary));
    report.tables.push(("gap_vs_m_trials".into(), sw.trials));
    report.plot("gap_vs_m", "M", &["median_gap"]);
    Ok(report)
}

/// Eight piecewise-constant trunk cells on rough inputs, so the trunk resolves the point
/// cloud and more points visibly help.
pub fn gap_vs_p(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let def = Defaults {
        cells: 8,
        order: 1,
        smoothness: 0.1,
        steps: 1000,
        step_size: 1e-9,
        ..Defaults::default()
    };
    let setup = Setup::parse(p, def, exec(p)?)?;
    let ps = p.usize_list("p_values", &[64, 128, 256, 512, 1024, 2048, 4096])?;
    let m = p.usize("m_samples", 64)?;
    let sizes: Vec<_> = ps.iter().map(|&pts| (m, pts)).collect();
    let sw = sweep(cfg, p, &setup, "P", &sizes)?;
    let mut report = Report::new("gap-vs-P");
    let monotone = sw.medians.windows(2).all(|w| w[1].1 < w[0].1);
    let first = sw.medians.first().map_or(f64::NAN, |m| m.1);
    let last = sw.medians.last().map_or(f64::NAN, |m| m.1);
    report.metrics.insert("first_median".into(), first);
    report.metrics.insert("last_median".into(), last);
    report.checks.push(Check::new(
        "monotone",
        monotone,
        format!("median gap {first:.3e} at the smallest P, {last:.3e} at the largest"),
    ));
    report.tables.push(("gap_vs_p".into(), sw.summary));
    report.tables.push(("gap_vs_p_trials".into(), sw.trials));
    report.plot("gap_vs_p", "P", &["median_gap"]);
    Ok(report)
}
