//! Parameters shared by the experiments that train models.

use onet_core::model::{BranchLayout, BranchRegime, DeepONet, ModelConfig, TrunkMode};
use onet_core::pde::OperatorSpec;
use onet_core::spectral::Ensemble;
use onet_core::train::{SampleSet, TrainConfig};

use crate::config::{Params, Value};
use crate::error::{HarnessError, Result};

pub const TRAINING_KEYS: &[&str] = &[
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
];

/// Defaults that differ between experiments.
#[derive(Clone, Copy, Debug)]
pub struct Defaults {
    pub cells: usize,
    pub order: usize,
    pub c: f64,
    pub smoothness: f64,
    pub budget: usize,
    pub m_samples: usize,
    pub p_points: usize,
    pub steps: usize,
    pub step_size: f64,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            cells: 1,
            order: 8,
            c: 300.0,
            smoothness: 1.5,
            budget: 2000,
            m_samples: 64,
            p_points: 256,
            steps: 2000,
            step_size: 1e-7,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Setup {
    pub dim: usize,
    pub n_grid: usize,
    pub cells: usize,
    pub order: usize,
    pub op: OperatorSpec,
    pub ensemble: Ensemble,
    pub regime: BranchRegime,
    pub layout: BranchLayout,
    pub zero_readout: bool,
    pub m_samples: usize,
    pub p_points: usize,
    pub train: TrainConfig,
}

/// Stream offsets keep model, data and evaluation randomness apart for one seed.
pub const DATA_STREAM: u64 = 1 << 60;
pub const EVAL_STREAM: u64 = 2 << 60;

/// Base seed of a block of `2^20` consecutive draws owned by `seed` within `stream`, so
/// different seeds never share input functions.
pub fn block(stream: u64, seed: u64) -> u64 {
    stream.wrapping_add(seed << 20)
}

impl Setup {
    pub fn parse(p: &Params, def: Defaults, exec: onet_core::Exec) -> Result<Self> {
        let dim = p.usize("dim", 1)?;
        let c = p.positive("c", def.c)?;
        let layout = match p.raw("layout") {
            None => BranchLayout::Shared,
            Some(Value::Str(s)) if s == "shared" => BranchLayout::Shared,
            Some(Value::Str(s)) if s == "per-output" => BranchLayout::PerOutput,
            Some(_) => {
                return Err(HarnessError::param(
                    "layout",
                    "expected \"shared\" or \"per-output\"",
                ))
            }
        };
        let regime = BranchRegime::new(
            p.f64("lambda", 1.0)?,
            p.usize("budget", def.budget)?,
            p.usize("base_width", 16)?,
            p.usize("base_depth", 1)?,
        )
        .map_err(|e| HarnessError::param("lambda", e.to_string()))?;
        let ensemble = Ensemble::new(
            dim,
            p.positive("smoothness", def.smoothness)?,
            p.usize("band_limit", 2)?,
            p.positive("norm_bound", 10.0)?,
        )
        .map_err(|e| HarnessError::param("smoothness", e.to_string()))?;
        let train = TrainConfig {
            steps: p.usize("steps", def.steps)?,
            step_size: p.positive("step_size", def.step_size)?,
            momentum: p.f64("momentum", 0.9)?,
            clip: p.positive("clip", 10.0)?,
            operator: OperatorSpec::new(c, dim)?,
            exec,
        };
        train
            .validate()
            .map_err(|e| HarnessError::param("steps", e.to_string()))?;
        let setup = Setup {
            dim,
            n_grid: p.usize("n_grid", 2)?,
            cells: p.usize("cells", def.cells)?,
            order: p.usize("order", def.order)?,
            op: OperatorSpec::new(c, dim)?,
            ensemble,
            regime,
            layout,
            zero_readout: p.bool("zero_readout", true)?,
            m_samples: p.usize("m_samples", def.m_samples)?,
            p_points: p.usize("p_points", def.p_points)?,
            train,
        };
        if setup.cells == 0 || setup.order == 0 || setup.m_samples == 0 || setup.p_points == 0 {
            return Err(HarnessError::param(
                "cells",
                "cells, order, m_samples and p_points must be positive",
            ));
        }
        Ok(setup)
    }

    /// Number of trunk functions of the constructed basis.
    pub fn p(&self) -> usize {
        self.cells.pow(self.dim as u32)
            * onet_core::multi_index::count_up_to(self.dim, self.order - 1)
    }

    pub fn model(&self, seed: u64) -> Result<DeepONet> {
        self.model_with(seed, self.regime)
    }

    pub fn model_with(&self, seed: u64, regime: BranchRegime) -> Result<DeepONet> {
        Ok(DeepONet::build(&ModelConfig {
            dim: self.dim,
            n_grid: self.n_grid,
            p: self.p(),
            regime,
            layout: self.layout,
            trunk: TrunkMode::Constructed {
                cells: self.cells,
                order: self.order,
            },
            seed,
            zero_readout: self.zero_readout,
        })?)
    }

    pub fn data(&self, m: usize, p: usize, seed: u64) -> Result<SampleSet> {
        Ok(SampleSet::draw(
            &self.ensemble,
            self.n_grid,
            m,
            p,
            block(DATA_STREAM, seed),
        )?)
    }
}
