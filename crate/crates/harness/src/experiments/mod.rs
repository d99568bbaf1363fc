//! The experiment registry. Each experiment is a pure function of its config and returns
//! tables plus pass/fail checks against its predicted rate band.

mod approx;
mod gap;
mod setup;
mod spectral;
mod training;

use std::collections::BTreeMap;
use std::path::Path;

use crate::config::{ExperimentConfig, Params};
use crate::error::{HarnessError, Result};
use crate::output::{loglog_svg, write_atomic, CsvTable};

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: &str, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.to_string(),
            passed,
            detail: detail.into(),
        }
    }
}

/// A log-log chart request: series names with `(x column, y column)` of a table.
#[derive(Clone, Debug, PartialEq)]
pub struct Plot {
    pub table: String,
    pub x: String,
    pub ys: Vec<String>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub experiment: String,
    /// File stem and table; written as `<stem>.csv`.
    pub tables: Vec<(String, CsvTable)>,
    pub plots: Vec<Plot>,
    /// Other artifacts written verbatim, by file name.
    pub files: Vec<(String, String)>,
    pub checks: Vec<Check>,
    pub metrics: BTreeMap<String, f64>,
}

impl Report {
    pub fn new(experiment: &str) -> Self {
        Report {
            experiment: experiment.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn metric(&self, key: &str) -> f64 {
        self.metrics.get(key).copied().unwrap_or(f64::NAN)
    }

    pub fn table(&self, stem: &str) -> Option<&CsvTable> {
        self.tables.iter().find(|(s, _)| s == stem).map(|(_, t)| t)
    }

    fn plot(&mut self, table: &str, x: &str, ys: &[&str]) {
        self.plots.push(Plot {
            table: table.to_string(),
            x: x.to_string(),
            ys: ys.iter().map(|s| s.to_string()).collect(),
        });
    }

    /// Writes every table as CSV and, if asked, every plot as SVG.
    pub fn write(&self, dir: &Path, svg: bool) -> Result<()> {
        for (stem, table) in &self.tables {
            write_atomic(&dir.join(format!("{stem}.csv")), &table.to_csv())?;
        }
        for (name, contents) in &self.files {
            write_atomic(&dir.join(name), contents)?;
        }
        if svg {
            for plot in &self.plots {
                let Some(table) = self.table(&plot.table) else {
                    continue;
                };
                let xs = table.column(&plot.x).unwrap_or_default();
                let series: Vec<(&str, Vec<(f64, f64)>)> = plot
                    .ys
                    .iter()
                    .filter_map(|y| {
                        let ys = table.column(y)?;
                        Some((y.as_str(), xs.iter().copied().zip(ys).collect()))
                    })
                    .collect();
                let svg = loglog_svg(&self.experiment, &plot.x, "value", &series);
                write_atomic(&dir.join(format!("{}.svg", plot.table)), &svg)?;
            }
        }
        let mut summary = CsvTable::new(&["check", "passed", "detail"]);
        for c in &self.checks {
            summary.push(vec![
                c.name.as_str().into(),
                if c.passed { "true" } else { "false" }.into(),
                c.detail.replace(',', ";").into(),
            ]);
        }
        write_atomic(&dir.join("checks.csv"), &summary.to_csv())
    }
}

pub struct Experiment {
    pub name: &'static str,
    pub about: &'static str,
    pub keys: &'static [&'static str],
    run: fn(&ExperimentConfig, &Params) -> Result<Report>,
}

/// Keys every experiment accepts.
pub const COMMON_KEYS: &[&str] = &["svg", "parallel"];

pub fn registry() -> &'static [Experiment] {
    &[
        Experiment {
            name: "spectral-rate",
            about: "H^s' error of the pseudo-spectral reconstruction P(D f) versus N",
            keys: spectral::SPECTRAL_RATE_KEYS,
            run: spectral::spectral_rate,
        },
        Experiment {
            name: "lipschitz-P",
            about: "Lipschitz constant of P from grid values into H^s' versus N",
            keys: spectral::LIPSCHITZ_KEYS,
            run: spectral::lipschitz_p,
        },
        Experiment {
            name: "pu-properties",
            about: "bump sup and derivative bounds, raw-sum violation, normalized identity",
            keys: approx::PU_KEYS,
            run: approx::pu_properties,
        },
        Experiment {
            name: "trunk-exactness",
            about: "product, monomial, bump and trunk-basis networks against closed forms",
            keys: approx::EXACTNESS_KEYS,
            run: approx::trunk_exactness,
        },
        Experiment {
            name: "local-approx-rate",
            about: "H^2 error of the partition-of-unity local polynomial approximant versus K",
            keys: approx::LOCAL_RATE_KEYS,
            run: approx::local_approx_rate,
        },
        Experiment {
            name: "branch-depth-study",
            about: "trained loss of shallow versus deep branches at a fixed parameter budget",
            keys: training::DEPTH_KEYS,
            run: training::branch_depth_study,
        },
        Experiment {
            name: "gap-vs-M",
            about: "generalization gap versus the number of input functions",
            keys: gap::GAP_M_KEYS,
            run: gap::gap_vs_m,
        },
        Experiment {
            name: "gap-vs-P",
            about: "generalization gap versus the number of collocation points",
            keys: gap::GAP_P_KEYS,
            run: gap::gap_vs_p,
        },
        Experiment {
            name: "end-to-end-poisson",
            about: "train on the screened Poisson operator, relative H^1 error on held-out inputs",
            keys: training::E2E_KEYS,
            run: training::end_to_end,
        },
    ]
}

pub fn find(name: &str) -> Result<&'static Experiment> {
    registry()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| HarnessError::UnknownExperiment(name.to_string()))
}

/// Validates keys and runs the named experiment.
pub fn run(cfg: &ExperimentConfig) -> Result<Report> {
    let exp = find(&cfg.experiment)?;
    let allowed: Vec<&str> = exp.keys.iter().chain(COMMON_KEYS).copied().collect();
    cfg.check_keys(&allowed)?;
    if cfg.seeds.is_empty() {
        return Err(HarnessError::param(
            "seeds",
            "at least one seed is required",
        ));
    }
    let params = Params::new(cfg);
    (exp.run)(cfg, &params)
}

pub(crate) fn exec(params: &Params) -> Result<onet_core::Exec> {
    Ok(if params.bool("parallel", true)? {
        onet_core::Exec::Parallel
    } else {
        onet_core::Exec::Sequential
    })
}

/// `target - tol <= value <= target + tol`, also false for NaN.
pub(crate) fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v: Vec<f64> = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
