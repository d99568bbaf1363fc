use std::fmt;
use std::ops::Range;

use super::regime::BranchRegime;
use crate::nn::{
    self, Activation, InitScheme, Jet2, JetMode, JetSeed, Layer, NetworkSpec, ParameterVector,
    SecondOrder,
};
use crate::spectral::{grid_size, GridSample};
use crate::trunk::trunk_basis;
use crate::{Error, Result};

/// How the trunk networks are obtained.
#[derive(Clone, Debug, PartialEq)]
pub enum TrunkMode {
    /// The exact basis `y^alpha s_m(y)`, frozen during training.
    Constructed { cells: usize, order: usize },
    /// One ReQU network with `p` outputs, trained with the branch.
    Trainable { width: usize, depth: usize },
    /// One ReLU neuron per output, `sigma1(w.y + b)`.
    Classical,
}

impl fmt::Display for TrunkMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrunkMode::Constructed { cells, order } => {
                write!(f, "constructed cells={cells} order={order}")
            }
            TrunkMode::Trainable { width, depth } => {
                write!(f, "trainable width={width} depth={depth}")
            }
            TrunkMode::Classical => f.write_str("classical"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BranchLayout {
    /// One network with `p` outputs.
    #[default]
    Shared,
    /// `p` independent single-output networks.
    PerOutput,
}

impl fmt::Display for BranchLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BranchLayout::Shared => "shared",
            BranchLayout::PerOutput => "per-output",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Role {
    Branch,
    Trunk,
}

/// One network inside the flat parameter vector, producing outputs
/// `first_output .. first_output + spec.output_dim`.
#[derive(Clone, Debug, PartialEq)]
pub struct Component {
    pub role: Role,
    pub spec: NetworkSpec,
    pub offset: usize,
    pub first_output: usize,
}

impl Component {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.spec.count_params()
    }

    fn outputs(&self) -> Range<usize> {
        self.first_output..self.first_output + self.spec.output_dim
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelConfig {
    pub dim: usize,
    /// Encoder resolution `N`; the branch sees `m = (2N+1)^d` values.
    pub n_grid: usize,
    pub p: usize,
    pub regime: BranchRegime,
    pub layout: BranchLayout,
    pub trunk: TrunkMode,
    pub seed: u64,
    /// Start the branch readout layer at zero, so the untrained model is `G = 0`.
    pub zero_readout: bool,
}

/// `G(f)(y) = sum_k B_k(D f) T_k(y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct DeepONet {
    pub dim: usize,
    pub n_grid: usize,
    pub p: usize,
    pub layout: BranchLayout,
    pub trunk_mode: TrunkMode,
    pub regime: Option<BranchRegime>,
    pub components: Vec<Component>,
    /// All parameters; branch components come first.
    pub theta: Vec<f64>,
}

fn seed_for(seed: u64, stream: u64) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(stream)
}

impl DeepONet {
    pub fn m(&self) -> usize {
        grid_size(self.dim, self.n_grid)
    }

    pub fn d_theta(&self) -> usize {
        self.theta.len()
    }

    pub fn trunk_frozen(&self) -> bool {
        matches!(self.trunk_mode, TrunkMode::Constructed { .. })
    }

    /// Parameters updated by training.
    pub fn trainable_range(&self) -> Range<usize> {
        if self.trunk_frozen() {
            0..self.branch_len()
        } else {
            0..self.theta.len()
        }
    }

    pub fn branch_len(&self) -> usize {
        self.components
            .iter()
            .filter(|c| c.role == Role::Branch)
            .map(|c| c.spec.count_params())
            .sum()
    }

    pub fn branch_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.role == Role::Branch)
    }

    pub fn trunk_components(&self) -> impl Iterator<Item = &Component> {
        self.components.iter().filter(|c| c.role == Role::Trunk)
    }

    /// Assembles a model from explicit networks. Branch networks read `m` values and
    /// trunk networks read `d` values; each side must produce `p` outputs in total.
    pub fn from_parts(
        dim: usize,
        n_grid: usize,
        trunk_mode: TrunkMode,
        layout: BranchLayout,
        regime: Option<BranchRegime>,
        branch: Vec<(NetworkSpec, ParameterVector)>,
        trunk: Vec<(NetworkSpec, ParameterVector)>,
    ) -> Result<Self> {
        let m = grid_size(dim, n_grid);
        let mut components = Vec::new();
        let mut theta = Vec::new();
        let mut p_sides = [0usize; 2];
        for (role, side, nets) in [(Role::Branch, 0, branch), (Role::Trunk, 1, trunk)] {
            let input = if role == Role::Branch { m } else { dim };
            for (spec, params) in nets {
                if spec.input_dim != input {
                    return Err(Error::DimensionMismatch {
                        expected: input,
                        got: spec.input_dim,
                    });
                }
                params.check(&spec)?;
                components.push(Component {
                    role,
                    offset: theta.len(),
                    first_output: p_sides[side],
                    spec: spec.clone(),
                });
                p_sides[side] += spec.output_dim;
                theta.extend_from_slice(params.as_slice());
            }
        }
        if p_sides[0] != p_sides[1] || p_sides[0] == 0 {
            return Err(Error::invalid(format!(
                "branch gives {} outputs, trunk {}",
                p_sides[0], p_sides[1]
            )));
        }
        Ok(DeepONet {
            dim,
            n_grid,
            p: p_sides[0],
            layout,
            trunk_mode,
            regime,
            components,
            theta,
        })
    }

    pub fn build(cfg: &ModelConfig) -> Result<Self> {
        if cfg.p == 0 || cfg.dim == 0 {
            return Err(Error::invalid("p and d must be positive"));
        }
        let m = grid_size(cfg.dim, cfg.n_grid);
        let trunk: Vec<(NetworkSpec, ParameterVector)> = match &cfg.trunk {
            TrunkMode::Constructed { cells, order } => {
                let basis = trunk_basis(*cells, *order, cfg.dim)?;
                if basis.len() != cfg.p {
                    return Err(Error::invalid(format!(
                        "constructed trunk has {} elements, p = {}",
                        basis.len(),
                        cfg.p
                    )));
                }
                basis
                    .elements
                    .into_iter()
                    .map(|e| (e.net.spec, e.net.params))
                    .collect()
            }
            TrunkMode::Trainable { width, depth } => {
                let spec = NetworkSpec::uniform(
                    cfg.dim,
                    &vec![*width; *depth],
                    Activation::Sigma2,
                    cfg.p,
                )?;
                let params =
                    ParameterVector::init(&spec, seed_for(cfg.seed, 1), &InitScheme::UniformHe)?;
                vec![(spec, params)]
            }
            TrunkMode::Classical => (0..cfg.p)
                .map(|k| classical_trunk(cfg.dim, seed_for(cfg.seed, 100 + k as u64)))
                .collect::<Result<_>>()?,
        };
        let branch = match cfg.layout {
            BranchLayout::Shared => {
                let spec = cfg.regime.spec(m, cfg.p)?;
                let params =
                    ParameterVector::init(&spec, seed_for(cfg.seed, 0), &InitScheme::UniformHe)?;
                vec![(spec, params)]
            }
            BranchLayout::PerOutput => (0..cfg.p)
                .map(|k| {
                    let spec = cfg.regime.spec(m, 1)?;
                    let params = ParameterVector::init(
                        &spec,
                        seed_for(cfg.seed, 1000 + k as u64),
                        &InitScheme::UniformHe,
                    )?;
                    Ok((spec, params))
                })
                .collect::<Result<_>>()?,
        };
        let branch = if cfg.zero_readout {
            branch
                .into_iter()
                .map(|(spec, p)| zero_last_map(spec, p))
                .collect()
        } else {
            branch
        };
        Self::from_parts(
            cfg.dim,
            cfg.n_grid,
            cfg.trunk.clone(),
            cfg.layout,
            Some(cfg.regime),
            branch,
            trunk,
        )
    }

    /// The one-hidden-layer form: per output `k`, a ReLU branch of width `q_branch` with a
    /// bias-free readout, times a single ReLU trunk neuron.
    pub fn classical_preset(
        dim: usize,
        n_grid: usize,
        q_branch: usize,
        p: usize,
        seed: u64,
    ) -> Result<Self> {
        if p == 0 || q_branch == 0 {
            return Err(Error::invalid("classical preset needs p >= 1 and q >= 1"));
        }
        let m = grid_size(dim, n_grid);
        let branch = (0..p)
            .map(|k| {
                let spec = NetworkSpec::uniform(m, &[q_branch], Activation::Sigma1, 1)?;
                let mut params = ParameterVector::init(
                    &spec,
                    seed_for(seed, 1000 + k as u64),
                    &InitScheme::UniformHe,
                )?;
                let last = params.len() - 1;
                params.as_mut_slice()[last] = 0.0;
                Ok((spec, params))
            })
            .collect::<Result<_>>()?;
        let trunk = (0..p)
            .map(|k| classical_trunk(dim, seed_for(seed, 100 + k as u64)))
            .collect::<Result<_>>()?;
        Self::from_parts(
            dim,
            n_grid,
            TrunkMode::Classical,
            BranchLayout::PerOutput,
            None,
            branch,
            trunk,
        )
    }

    fn check_grid(&self, g: &[f64]) -> Result<()> {
        if g.len() != self.m() {
            return Err(Error::DimensionMismatch {
                expected: self.m(),
                got: g.len(),
            });
        }
        Ok(())
    }

    fn params_of(&self, c: &Component) -> &[f64] {
        &self.theta[c.range()]
    }

    /// `B_k(g)` for all `k`.
    pub fn branch_outputs(&self, g: &[f64]) -> Result<Vec<f64>> {
        self.check_grid(g)?;
        let mut out = vec![0.0; self.p];
        for c in self.branch_components() {
            let v = nn::forward(&c.spec, self.params_of(c), g)?;
            out[c.outputs()].copy_from_slice(&v);
        }
        Ok(out)
    }

    /// `T_k(y)` for all `k`.
    pub fn trunk_values(&self, y: &[f64]) -> Result<Vec<f64>> {
        let mut out = vec![0.0; self.p];
        for c in self.trunk_components() {
            let v = nn::forward(&c.spec, self.params_of(c), y)?;
            out[c.outputs()].copy_from_slice(&v);
        }
        Ok(out)
    }

    /// Laplacian-mode jets of every `T_k` at `y`.
    pub fn trunk_jets(&self, y: &[f64]) -> Result<Vec<Jet2>> {
        let mut out = Vec::with_capacity(self.p);
        for c in self.trunk_components() {
            out.extend(nn::forward_jet(
                &c.spec,
                self.params_of(c),
                y,
                JetMode::Laplacian,
            )?);
        }
        Ok(out)
    }

    pub fn eval(&self, g: &GridSample, y: &[f64]) -> Result<f64> {
        let b = self.branch_outputs(&g.values)?;
        let t = self.trunk_values(y)?;
        Ok(b.iter().zip(&t).map(|(x, z)| x * z).sum())
    }

    /// Jet in `y` of `sum_k b_k T_k(y)`.
    pub fn eval_jet(&self, g: &GridSample, y: &[f64]) -> Result<Jet2> {
        let b = self.branch_outputs(&g.values)?;
        let jets = self.trunk_jets(y)?;
        Ok(combine_jets(&b, &jets, self.dim))
    }

    /// Adds `d/dtheta sum_k seed_k B_k(g)` into `grad` (length `d_theta`).
    pub fn accumulate_branch_grad(&self, g: &[f64], seed: &[f64], grad: &mut [f64]) -> Result<()> {
        for c in self.branch_components() {
            let r = c.range();
            nn::accumulate_value_grad(
                &c.spec,
                &self.theta[r.clone()],
                g,
                &seed[c.outputs()],
                &mut grad[r],
            )?;
        }
        Ok(())
    }

    /// Adds `d/dtheta sum_k <seeds_k, jet of T_k(y)>` into `grad`.
    pub fn accumulate_trunk_grad(
        &self,
        y: &[f64],
        seeds: &[JetSeed],
        grad: &mut [f64],
    ) -> Result<()> {
        for c in self.trunk_components() {
            let s = &seeds[c.outputs()];
            if s.iter().all(JetSeed::is_zero) {
                continue;
            }
            let r = c.range();
            nn::accumulate_jet_grad(&c.spec, &self.theta[r.clone()], y, s, &mut grad[r])?;
        }
        Ok(())
    }
}

fn zero_last_map(spec: NetworkSpec, mut params: ParameterVector) -> (NetworkSpec, ParameterVector) {
    let dims = spec.dims();
    let tail = dims[dims.len() - 1] * (dims[dims.len() - 2] + 1);
    let n = params.len();
    params.as_mut_slice()[n - tail..]
        .iter_mut()
        .for_each(|v| *v = 0.0);
    (spec, params)
}

fn classical_trunk(dim: usize, seed: u64) -> Result<(NetworkSpec, ParameterVector)> {
    let spec = NetworkSpec::new(
        dim,
        vec![Layer {
            width: 1,
            activation: Activation::Sigma1,
        }],
        1,
    )?;
    let mut params = ParameterVector::init(&spec, seed, &InitScheme::UniformHe)?;
    let n = params.len();
    // readout weight 1, bias 0: the trunk is the neuron itself
    params.as_mut_slice()[n - 2] = 1.0;
    params.as_mut_slice()[n - 1] = 0.0;
    Ok((spec, params))
}

pub(crate) fn combine_jets(b: &[f64], jets: &[Jet2], dim: usize) -> Jet2 {
    let mut value = 0.0;
    let mut gradient = vec![0.0; dim];
    let mut lap = 0.0;
    for (bk, j) in b.iter().zip(jets) {
        value += bk * j.value;
        for (g, jg) in gradient.iter_mut().zip(&j.gradient) {
            *g += bk * jg;
        }
        lap += bk * j.laplacian();
    }
    Jet2 {
        value,
        gradient,
        second: SecondOrder::Laplacian(lap),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::{encode_d, Ensemble};
    use crate::trunk::monomial_net;

    fn regime() -> BranchRegime {
        BranchRegime::new(1.0, 200, 8, 1).unwrap()
    }

    fn cfg(trunk: TrunkMode, p: usize, layout: BranchLayout, seed: u64) -> ModelConfig {
        ModelConfig {
            dim: 1,
            n_grid: 2,
            p,
            regime: regime(),
            layout,
            trunk,
            seed,
            zero_readout: false,
        }
    }

    #[test]
    fn constant_model() {
        let mut model = DeepONet::build(&cfg(
            TrunkMode::Constructed { cells: 1, order: 1 },
            1,
            BranchLayout::Shared,
            0,
        ))
        .unwrap();
        let r = model.branch_components().next().unwrap().range();
        model.theta[r.clone()].iter_mut().for_each(|v| *v = 0.0);
        model.theta[r.end - 1] = 1.0;
        let f = Ensemble::new(1, 2.0, 3, 2.0).unwrap().draw(1);
        let g = encode_d(&f, 2);
        for y in [0.0, 0.3, 1.0] {
            assert!((model.eval(&g, &[y]).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn bookkeeping_and_seeds() {
        for layout in [BranchLayout::Shared, BranchLayout::PerOutput] {
            let a = DeepONet::build(&cfg(
                TrunkMode::Trainable { width: 6, depth: 2 },
                3,
                layout,
                1,
            ))
            .unwrap();
            let total: usize = a.components.iter().map(|c| c.spec.count_params()).sum();
            assert_eq!(a.d_theta(), total);
            let b = DeepONet::build(&cfg(
                TrunkMode::Trainable { width: 6, depth: 2 },
                3,
                layout,
                2,
            ))
            .unwrap();
            assert_ne!(a.theta, b.theta);
            assert_eq!(a.components, b.components);
            let c = DeepONet::build(&cfg(
                TrunkMode::Trainable { width: 6, depth: 2 },
                3,
                layout,
                1,
            ))
            .unwrap();
            assert_eq!(a, c);
        }
        assert!(DeepONet::build(&cfg(
            TrunkMode::Constructed { cells: 2, order: 2 },
            3,
            BranchLayout::Shared,
            0
        ))
        .is_err());
    }

    #[test]
    fn zero_readout_starts_at_zero() {
        let mut c = cfg(
            TrunkMode::Trainable { width: 4, depth: 1 },
            3,
            BranchLayout::PerOutput,
            2,
        );
        c.zero_readout = true;
        let model = DeepONet::build(&c).unwrap();
        let g = GridSample::new(1, 2, vec![0.3, -1.0, 2.0, 0.1, 0.5]).unwrap();
        assert_eq!(model.branch_outputs(&g.values).unwrap(), vec![0.0; 3]);
        let first = model.branch_components().next().unwrap();
        assert!(model.theta[first.range()].iter().any(|v| *v != 0.0));
    }

    #[test]
    fn zero_branch_gives_zero() {
        let mut model = DeepONet::build(&cfg(
            TrunkMode::Constructed { cells: 2, order: 2 },
            4,
            BranchLayout::Shared,
            3,
        ))
        .unwrap();
        let r = model.trainable_range();
        model.theta[r].iter_mut().for_each(|v| *v = 0.0);
        let g = GridSample::new(1, 2, vec![0.3, -1.0, 2.0, 0.1, 0.5]).unwrap();
        assert_eq!(model.eval(&g, &[0.4]).unwrap(), 0.0);
    }

    #[test]
    fn square_trunk_has_laplacian_two() {
        let sq = monomial_net(&[2], 1).unwrap();
        let branch = NetworkSpec::new(5, vec![], 1).unwrap();
        let mut bp = vec![0.0; 6];
        bp[5] = 1.0;
        let model = DeepONet::from_parts(
            1,
            2,
            TrunkMode::Constructed { cells: 1, order: 3 },
            BranchLayout::Shared,
            None,
            vec![(
                branch.clone(),
                ParameterVector::from_vec(&branch, bp).unwrap(),
            )],
            vec![(sq.spec, sq.params)],
        )
        .unwrap();
        let g = GridSample::new(1, 2, vec![0.0; 5]).unwrap();
        for y in [0.1, 0.5, 0.9] {
            let j = model.eval_jet(&g, &[y]).unwrap();
            assert!((j.laplacian() - 2.0).abs() < 1e-12);
            assert!((j.value - y * y).abs() < 1e-12);
        }
    }

    #[test]
    fn classical_matches_direct_formula() {
        let model = DeepONet::classical_preset(1, 2, 6, 3, 9).unwrap();
        assert_eq!(model.p, 3);
        let g = GridSample::new(1, 2, vec![0.3, -1.0, 2.0, 0.1, 0.5]).unwrap();
        let y = [0.37];
        let mut direct = 0.0;
        for k in 0..3 {
            let b = &model.components[k];
            let t = &model.components[3 + k];
            let th = &model.theta[b.range()];
            // hidden: 6 x 5 weights, 6 biases, then readout 6 weights and a zero bias
            let mut bk = 0.0;
            for i in 0..6 {
                let z: f64 = (0..5).map(|j| th[i * 5 + j] * g.values[j]).sum::<f64>() + th[30 + i];
                bk += th[36 + i] * z.max(0.0);
            }
            assert_eq!(th[42], 0.0);
            let tt = &model.theta[t.range()];
            let tk = (tt[0] * y[0] + tt[1]).max(0.0);
            direct += bk * tk;
        }
        assert!((model.eval(&g, &y).unwrap() - direct).abs() < 1e-12);
        assert!(matches!(model.eval_jet(&g, &y), Err(Error::NonsmoothTrunk)));
        assert!(DeepONet::classical_preset(1, 2, 6, 0, 9).is_err());
    }

    #[test]
    fn linear_in_branch_outputs() {
        let model = DeepONet::build(&cfg(
            TrunkMode::Trainable { width: 5, depth: 2 },
            4,
            BranchLayout::PerOutput,
            5,
        ))
        .unwrap();
        let g = GridSample::new(1, 2, vec![0.3, -1.0, 2.0, 0.1, 0.5]).unwrap();
        let b = model.branch_outputs(&g.values).unwrap();
        let t = model.trunk_values(&[0.6]).unwrap();
        let base: f64 = b.iter().zip(&t).map(|(x, y)| x * y).sum();
        let scaled: f64 = b.iter().zip(&t).map(|(x, y)| 2.5 * x * y).sum();
        assert!((scaled - 2.5 * base).abs() < 1e-12);
        assert!((model.eval(&g, &[0.6]).unwrap() - base).abs() < 1e-12);
        let j = model.eval_jet(&g, &[0.6]).unwrap();
        assert!((j.value - base).abs() < 1e-12);
    }
}
