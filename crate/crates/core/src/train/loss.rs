use super::sample::{Sample, SampleSet};
use crate::model::DeepONet;
use crate::nn::JetSeed;
use crate::pde::OperatorSpec;
use crate::spectral::Ensemble;
use crate::{Error, Exec, Result};

/// Mean with its standard error.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LossEstimate {
    pub mean: f64,
    pub stderr: f64,
}

struct Cache {
    /// `B_k(D f_i)`, row-major `M x p`.
    branch: Vec<f64>,
    /// `(L T_k)(y_j)`, row-major `P x p`.
    trunk: Vec<f64>,
}

/// `(L T_k)(y_j)` for every point, row-major `P x p`. Fixed for a frozen trunk, so the
/// trainer computes it once.
pub fn trunk_operator_values(
    model: &DeepONet,
    points: &[Vec<f64>],
    op: &OperatorSpec,
    exec: Exec,
) -> Result<Vec<f64>> {
    let (c, lap_w) = op.jet_weights();
    Ok(exec
        .map(points, |y| {
            model.trunk_jets(y).map(|js| {
                js.iter()
                    .map(|j| c * j.value + lap_w * j.laplacian())
                    .collect::<Vec<_>>()
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .concat())
}

fn cache(
    model: &DeepONet,
    set: &SampleSet,
    op: &OperatorSpec,
    exec: Exec,
    trunk: Option<&[f64]>,
) -> Result<Cache> {
    let branch = exec
        .map(&set.samples, |s| model.branch_outputs(&s.grid.values))
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .concat();
    let trunk = match trunk {
        Some(t) if t.len() == set.p() * model.p => t.to_vec(),
        Some(t) => {
            return Err(Error::DimensionMismatch {
                expected: set.p() * model.p,
                got: t.len(),
            })
        }
        None => trunk_operator_values(model, &set.points, op, exec)?,
    };
    Ok(Cache { branch, trunk })
}

/// Residuals `r_ij = (L G(f_i))(y_j) - f_i(y_j)`, row-major `M x P`.
fn residuals(model: &DeepONet, set: &SampleSet, cache: &Cache, exec: Exec) -> Vec<f64> {
    let p = model.p;
    let n_pts = set.p();
    exec.map_range(set.m(), |i| {
        let b = &cache.branch[i * p..(i + 1) * p];
        (0..n_pts)
            .map(|j| {
                let t = &cache.trunk[j * p..(j + 1) * p];
                let lg: f64 = b.iter().zip(t).map(|(x, y)| x * y).sum();
                lg - set.rhs[i * n_pts + j]
            })
            .collect::<Vec<_>>()
    })
    .concat()
}

fn mean_square(r: &[f64]) -> f64 {
    r.iter().map(|v| v * v).sum::<f64>() / r.len() as f64
}

/// `(1/MP) sum_ij |L G(f_i)(y_j) - f_i(y_j)|^2` with `L = c - Laplacian`.
pub fn loss_ls(model: &DeepONet, set: &SampleSet, op: &OperatorSpec, exec: Exec) -> Result<f64> {
    let cache = cache(model, set, op, exec, None)?;
    Ok(mean_square(&residuals(model, set, &cache, exec)))
}

/// `loss_ls` and its gradient over all of `theta` (zero on a frozen trunk).
pub fn loss_and_grad(
    model: &DeepONet,
    set: &SampleSet,
    op: &OperatorSpec,
    exec: Exec,
) -> Result<(f64, Vec<f64>)> {
    loss_and_grad_with(model, set, op, exec, None)
}

/// [`loss_and_grad`] reusing precomputed [`trunk_operator_values`]; only valid while the
/// trunk parameters are unchanged.
pub fn loss_and_grad_with(
    model: &DeepONet,
    set: &SampleSet,
    op: &OperatorSpec,
    exec: Exec,
    trunk: Option<&[f64]>,
) -> Result<(f64, Vec<f64>)> {
    let cache = cache(model, set, op, exec, trunk)?;
    let r = residuals(model, set, &cache, exec);
    let loss = mean_square(&r);
    let (m, n_pts, p) = (set.m(), set.p(), model.p);
    let scale = 2.0 / (m * n_pts) as f64;
    let dim = model.d_theta();

    // one error slot per chunk; chunked_sum needs infallible closures
    let failure = std::sync::Mutex::new(None);
    let mut grad = exec.chunked_sum(m, dim, |range, acc| {
        for i in range {
            let seed: Vec<f64> = (0..p)
                .map(|k| {
                    scale
                        * (0..n_pts)
                            .map(|j| r[i * n_pts + j] * cache.trunk[j * p + k])
                            .sum::<f64>()
                })
                .collect();
            if let Err(e) = model.accumulate_branch_grad(&set.samples[i].grid.values, &seed, acc) {
                failure.lock().unwrap().get_or_insert(e);
            }
        }
    });
    if !model.trunk_frozen() {
        let (c, lap_w) = op.jet_weights();
        let trunk_grad = exec.chunked_sum(n_pts, dim, |range, acc| {
            for j in range {
                let seeds: Vec<JetSeed> = (0..p)
                    .map(|k| {
                        let rho = scale
                            * (0..m)
                                .map(|i| r[i * n_pts + j] * cache.branch[i * p + k])
                                .sum::<f64>();
                        JetSeed::new(c * rho, lap_w * rho)
                    })
                    .collect();
                if let Err(e) = model.accumulate_trunk_grad(&set.points[j], &seeds, acc) {
                    failure.lock().unwrap().get_or_insert(e);
                }
            }
        });
        for (g, t) in grad.iter_mut().zip(&trunk_grad) {
            *g += t;
        }
    }
    if let Some(e) = failure.into_inner().unwrap() {
        return Err(e);
    }
    Ok((loss, grad))
}

/// Cell midpoints of the uniform `res^d` grid, last axis fastest.
pub fn midpoint_points(dim: usize, res: usize) -> Vec<Vec<f64>> {
    let total = res.pow(dim as u32);
    (0..total)
        .map(|mut idx| {
            let mut y = vec![0.0; dim];
            for a in (0..dim).rev() {
                y[a] = ((idx % res) as f64 + 0.5) / res as f64;
                idx /= res;
            }
            y
        })
        .collect()
}

/// `(1/M) sum_i int |L G(f_i) - f_i|^2` by the tensor midpoint rule.
pub fn loss_lm(
    model: &DeepONet,
    samples: &[Sample],
    op: &OperatorSpec,
    quad_res: usize,
    exec: Exec,
) -> Result<f64> {
    let set = SampleSet::new(samples.to_vec(), midpoint_points(model.dim, quad_res));
    loss_ls(model, &set, op, exec)
}

/// Population loss over the ensemble, estimated from `n_fresh` independent draws.
pub fn loss_ld(
    model: &DeepONet,
    ensemble: &Ensemble,
    op: &OperatorSpec,
    n_fresh: usize,
    quad_res: usize,
    seed: u64,
    exec: Exec,
) -> Result<LossEstimate> {
    if n_fresh == 0 {
        return Err(Error::invalid("n_fresh must be at least 1"));
    }
    let points = midpoint_points(model.dim, quad_res);
    let trunk = trunk_operator_values(model, &points, op, exec)?;
    let samples: Vec<Sample> = (0..n_fresh)
        .map(|i| Sample::new(ensemble.draw(seed.wrapping_add(i as u64)), model.n_grid))
        .collect();
    let set = SampleSet::new(samples, points);
    let cache = cache(model, &set, op, exec, Some(&trunk))?;
    let r = residuals(model, &set, &cache, exec);
    let per_draw: Vec<f64> = r.chunks(set.p()).map(mean_square).collect();
    Ok(mean_and_stderr(&per_draw))
}

pub(crate) fn mean_and_stderr(xs: &[f64]) -> LossEstimate {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let stderr = if xs.len() > 1 {
        (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    LossEstimate { mean, stderr }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BranchLayout, BranchRegime, ModelConfig, TrunkMode};
    use crate::spectral::FourierField;

    fn op() -> OperatorSpec {
        OperatorSpec::new(3.0, 1).unwrap()
    }

    fn model(trunk: TrunkMode, p: usize, seed: u64) -> DeepONet {
        DeepONet::build(&ModelConfig {
            dim: 1,
            n_grid: 2,
            p,
            regime: BranchRegime::new(1.5, 120, 6, 1).unwrap(),
            layout: BranchLayout::Shared,
            trunk,
            seed,
            zero_readout: false,
        })
        .unwrap()
    }

    fn set(m: usize, p: usize, seed: u64) -> SampleSet {
        let e = Ensemble::new(1, 1.5, 3, 50.0).unwrap();
        SampleSet::draw(&e, 2, m, p, seed).unwrap()
    }

    fn zeroed(mut m: DeepONet) -> DeepONet {
        let r = m.trainable_range();
        m.theta[r].iter_mut().for_each(|v| *v = 0.0);
        m
    }

    #[test]
    fn zero_model_against_unit_rhs() {
        let m = zeroed(model(TrunkMode::Constructed { cells: 2, order: 2 }, 4, 0));
        let one = vec![Sample::new(FourierField::constant(1, 1.0), 2)];
        let s = SampleSet::new(one.clone(), vec![vec![0.1], vec![0.7]]);
        assert_eq!(loss_ls(&m, &s, &op(), Exec::Sequential).unwrap(), 1.0);
        assert!((loss_lm(&m, &one, &op(), 8, Exec::Sequential).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zero_residual_gives_zero_loss() {
        let m = model(TrunkMode::Trainable { width: 5, depth: 2 }, 3, 1);
        let mut s = set(3, 7, 2);
        for (i, smp) in s.samples.iter().enumerate() {
            for (j, y) in s.points.iter().enumerate() {
                let jet = m.eval_jet(&smp.grid, y).unwrap();
                s.rhs[i * 7 + j] = 3.0 * jet.value - jet.laplacian();
            }
        }
        assert!(loss_ls(&m, &s, &op(), Exec::Sequential).unwrap() <= 1e-20);
    }

    #[test]
    fn matches_naive_double_loop() {
        let m = model(TrunkMode::Trainable { width: 5, depth: 2 }, 3, 3);
        let s = set(5, 9, 4);
        let mut naive = 0.0;
        for smp in &s.samples {
            for y in &s.points {
                let jet = m.eval_jet(&smp.grid, y).unwrap();
                naive += (3.0 * jet.value - jet.laplacian() - smp.field.evaluate(y)).powi(2);
            }
        }
        naive /= 45.0;
        for exec in [Exec::Sequential, Exec::Parallel] {
            let v = loss_ls(&m, &s, &op(), exec).unwrap();
            assert!((v - naive).abs() <= 1e-12 * naive.max(1.0));
            let (l, _) = loss_and_grad(&m, &s, &op(), exec).unwrap();
            assert_eq!(l, v);
        }
    }

    fn fd_check(m: &DeepONet, s: &SampleSet) {
        let (_, grad) = loss_and_grad(m, s, &op(), Exec::Sequential).unwrap();
        let h = 1e-5;
        let range = m.trainable_range();
        let mut worst = 0.0f64;
        for idx in 0..m.d_theta() {
            if !range.contains(&idx) {
                assert_eq!(grad[idx], 0.0);
                continue;
            }
            let mut a = m.clone();
            a.theta[idx] += h;
            let mut b = m.clone();
            b.theta[idx] -= h;
            let fd = (loss_ls(&a, s, &op(), Exec::Sequential).unwrap()
                - loss_ls(&b, s, &op(), Exec::Sequential).unwrap())
                / (2.0 * h);
            let scale = grad[idx].abs().max(fd.abs()).max(1e-3);
            worst = worst.max((fd - grad[idx]).abs() / scale);
        }
        assert!(worst < 1e-4, "worst relative error {worst}");
    }

    #[test]
    fn gradient_matches_finite_differences() {
        fd_check(
            &model(TrunkMode::Trainable { width: 4, depth: 2 }, 3, 5),
            &set(3, 6, 6),
        );
        fd_check(
            &model(TrunkMode::Constructed { cells: 2, order: 2 }, 4, 7),
            &set(3, 6, 8),
        );
    }

    #[test]
    fn lm_is_the_dense_limit_of_ls() {
        let m = model(TrunkMode::Trainable { width: 5, depth: 2 }, 3, 9);
        let samples = set(4, 1, 10).samples;
        let lm = loss_lm(&m, &samples, &op(), 4096, Exec::Parallel).unwrap();
        let dense = SampleSet::new(
            samples.clone(),
            crate::train::uniform_points(1, 100_000, 11),
        );
        let ls = loss_ls(&m, &dense, &op(), Exec::Parallel).unwrap();
        assert!((ls - lm).abs() < 0.01 * lm, "{ls} vs {lm}");
        let coarse = loss_lm(&m, &samples, &op(), 2048, Exec::Parallel).unwrap();
        assert!((coarse - lm).abs() < 1e-4 * lm.max(1.0));
    }

    #[test]
    fn ld_zero_model_matches_second_moment() {
        let m = zeroed(model(TrunkMode::Constructed { cells: 2, order: 2 }, 4, 0));
        let e = Ensemble::new(1, 1.5, 3, 1e6).unwrap();
        let est = loss_ld(&m, &e, &op(), 400, 16, 21, Exec::Parallel).unwrap();
        let want = e.second_moment(0.0);
        assert!(
            (est.mean - want).abs() < 3.0 * est.stderr,
            "{est:?} vs {want}"
        );
        assert_eq!(
            est,
            loss_ld(&m, &e, &op(), 400, 16, 21, Exec::Sequential).unwrap()
        );
    }

    #[test]
    fn ld_single_draw_is_lm() {
        let m = model(TrunkMode::Trainable { width: 4, depth: 1 }, 2, 2);
        let e = Ensemble::new(1, 1.5, 3, 50.0).unwrap();
        let est = loss_ld(&m, &e, &op(), 1, 12, 33, Exec::Sequential).unwrap();
        let s = Sample::new(e.draw(33), 2);
        assert_eq!(
            est.mean,
            loss_lm(&m, &[s], &op(), 12, Exec::Sequential).unwrap()
        );
        assert_eq!(est.stderr, 0.0);
    }
}
