use onet_core::model::{model_to_text, BranchRegime};
use onet_core::train::{relative_errors, sharpness, train, Sample, TrainConfig};

use super::setup::{block, Defaults, Setup, EVAL_STREAM, TRAINING_KEYS};
use super::{exec, median, Check, Report};
use crate::config::{ExperimentConfig, Params};
use crate::error::{HarnessError, Result};
use crate::output::CsvTable;

pub const E2E_KEYS: &[&str] = &[
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
    "m_samples",
    "p_points",
    "steps",
    "step_size",
    "momentum",
    "clip",
    "held_out",
    "quad_res",
    "threshold",
    "min_pass_fraction",
    "checkpoints",
];

const _: () = assert!(E2E_KEYS.len() == TRAINING_KEYS.len() + 5);

fn trace_table(trace: &[f64]) -> CsvTable {
    let mut t = CsvTable::new(&["step", "value", "stderr"]);
    for (i, v) in trace.iter().enumerate() {
        t.push(vec![i.into(), (*v).into(), f64::NAN.into()]);
    }
    t
}

pub fn end_to_end(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let def = Defaults {
        steps: 3000,
        ..Defaults::default()
    };
    let setup = Setup::parse(p, def, exec(p)?)?;
    let held_out = p.usize("held_out", 16)?;
    let quad_res = p.usize("quad_res", 64)?;
    let threshold = p.positive("threshold", 0.2)?;
    let min_fraction = p.f64("min_pass_fraction", 0.7)?;
    let checkpoints = p.bool("checkpoints", true)?;
    if held_out == 0 || quad_res == 0 {
        return Err(HarnessError::param(
            "held_out",
            "held_out and quad_res must be positive",
        ));
    }
    let mut report = Report::new("end-to-end-poisson");
    let mut table = CsvTable::new(&[
        "seed",
        "d_theta",
        "initial_loss",
        "final_loss",
        "relative_h1",
        "relative_h2",
    ]);
    let mut errors = Vec::new();
    let mut errors_h2 = Vec::new();
    for &seed in &cfg.seeds {
        let mut model = setup.model(seed)?;
        let set = setup.data(setup.m_samples, setup.p_points, seed)?;
        let trace = train(&mut model, &set, &setup.train)?;
        let test: Vec<Sample> = (0..held_out as u64)
            .map(|i| {
                Sample::new(
                    setup.ensemble.draw(block(EVAL_STREAM, seed) + i),
                    setup.n_grid,
                )
            })
            .collect();
        let err = relative_errors(&model, &test, &setup.op, quad_res, setup.train.exec)?;
        errors.push(err.h1);
        errors_h2.push(err.h2);
        table.push(vec![
            seed.into(),
            model.d_theta().into(),
            trace[0].into(),
            trace[trace.len() - 1].into(),
            err.h1.into(),
            err.h2.into(),
        ]);
        report
            .tables
            .push((format!("trace_seed{seed}"), trace_table(&trace)));
        if checkpoints {
            report
                .files
                .push((format!("model_seed{seed}.txt"), model_to_text(&model)));
        }
    }
    let passing = errors.iter().filter(|&&e| e < threshold).count();
    let fraction = passing as f64 / errors.len() as f64;
    report.metrics.insert("pass_fraction".into(), fraction);
    report
        .metrics
        .insert("median_relative_h1".into(), median(&errors));
    report
        .metrics
        .insert("median_relative_h2".into(), median(&errors_h2));
    report.checks.push(Check::new(
        "relative_h1",
        fraction >= min_fraction,
        format!(
            "{passing} of {} seeds below {threshold} (need {:.0}%)",
            errors.len(),
            100.0 * min_fraction
        ),
    ));
    report.tables.insert(0, ("end_to_end".into(), table));
    Ok(report)
}

pub const DEPTH_KEYS: &[&str] = &[
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
    "m_samples",
    "p_points",
    "steps",
    "step_size",
    "momentum",
    "clip",
    "budgets",
    "lambdas",
    "step_fraction",
];

pub fn branch_depth_study(cfg: &ExperimentConfig, p: &Params) -> Result<Report> {
    let def = Defaults {
        steps: 5000,
        ..Defaults::default()
    };
    let setup = Setup::parse(p, def, exec(p)?)?;
    let budgets = p.usize_list("budgets", &[1000, 4000])?;
    let lambdas = p.f64_list("lambdas", &[1.0, 1.5, 2.0])?;
    // Step size as a fraction of 1 / (largest Hessian eigenvalue at init), so every shape
    // trains at the same relative speed. Zero means the fixed `step_size`.
    let fraction = p.f64("step_fraction", 1.0)?;
    if fraction < 0.0 {
        return Err(HarnessError::param("step_fraction", "must be nonnegative"));
    }
    let mut runs = CsvTable::new(&[
        "budget",
        "lambda",
        "seed",
        "width",
        "depth",
        "d_branch",
        "step_size",
        "final_loss",
    ]);
    let mut summary = CsvTable::new(&[
        "budget",
        "lambda",
        "width",
        "depth",
        "median_loss",
        "min_loss",
        "max_loss",
    ]);
    let mut report = Report::new("branch-depth-study");
    let mut any_win = false;
    for &q in &budgets {
        let mut medians = Vec::new();
        for &lambda in &lambdas {
            let regime =
                BranchRegime::new(lambda, q, setup.regime.base_width, setup.regime.base_depth)
                    .map_err(|e| HarnessError::param("lambdas", e.to_string()))?;
            let m = onet_core::spectral::grid_size(setup.dim, setup.n_grid);
            let (width, depth) = regime.shape(m, setup.p());
            let mut losses = Vec::new();
            for &seed in &cfg.seeds {
                let mut model = setup.model_with(seed, regime)?;
                let set = setup.data(setup.m_samples, setup.p_points, seed)?;
                let mut cfg_run: TrainConfig = setup.train.clone();
                if fraction > 0.0 {
                    let h = sharpness(&model, &set, &setup.op, 20, seed, setup.train.exec)?;
                    cfg_run.step_size = fraction / h;
                }
                let trace = train(&mut model, &set, &cfg_run)?;
                let last = trace[trace.len() - 1];
                losses.push(last);
                runs.push(vec![
                    q.into(),
                    lambda.into(),
                    seed.into(),
                    width.into(),
                    depth.into(),
                    model.branch_len().into(),
                    cfg_run.step_size.into(),
                    last.into(),
                ]);
            }
            let med = median(&losses);
            medians.push((lambda, med));
            let lo = losses.iter().copied().fold(f64::INFINITY, f64::min);
            let hi = losses.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            summary.push(vec![
                q.into(),
                lambda.into(),
                width.into(),
                depth.into(),
                med.into(),
                lo.into(),
                hi.into(),
            ]);
            report
                .metrics
                .insert(format!("median_q{q}_lambda{lambda}"), med);
        }
        let shallow = medians.iter().find(|(l, _)| *l == 1.0).map(|m| m.1);
        let deep = medians.iter().find(|(l, _)| *l == 2.0).map(|m| m.1);
        if let (Some(s), Some(d)) = (shallow, deep) {
            any_win |= d <= s;
            report
                .metrics
                .insert(format!("deep_over_shallow_q{q}"), d / s);
        }
    }
    report.checks.push(Check::new(
        "non_inferiority",
        any_win,
        "median loss at lambda = 2 <= lambda = 1 for at least one budget",
    ));
    report.tables.push(("branch_depth_summary".into(), summary));
    report.tables.push(("branch_depth_runs".into(), runs));
    Ok(report)
}
