use super::loss::{loss_ld, loss_ls, midpoint_points};
use super::sample::{Sample, SampleSet};
use crate::model::DeepONet;
use crate::pde::{solve_truth, OperatorSpec};
use crate::spectral::Ensemble;
use crate::{Exec, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GapReport {
    pub ls: f64,
    pub ld: f64,
    pub gap: f64,
    /// Standard error of `ld`, which is the only random part given the training set.
    pub stderr: f64,
}

/// `L_D(theta) - L_S(theta)`, with `L_D` from `n_fresh` draws not in `set`.
#[allow(clippy::too_many_arguments)]
pub fn generalization_gap(
    model: &DeepONet,
    set: &SampleSet,
    ensemble: &Ensemble,
    op: &OperatorSpec,
    n_fresh: usize,
    quad_res: usize,
    seed: u64,
    exec: Exec,
) -> Result<GapReport> {
    let ls = loss_ls(model, set, op, exec)?;
    let ld = loss_ld(model, ensemble, op, n_fresh, quad_res, seed, exec)?;
    Ok(GapReport {
        ls,
        ld: ld.mean,
        gap: ld.mean - ls,
        stderr: ld.stderr,
    })
}

/// Pooled relative errors of a model against the exact solutions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RelativeErrors {
    /// `sqrt(sum_i |G(f_i) - u_i|^2_{H1} / sum_i |u_i|^2_{H1})`.
    pub h1: f64,
    /// Same with `|Laplacian (G - u)|^2` added to both sums. This is the `H^2` norm in one
    /// dimension; for `d > 1` it drops the mixed second derivatives.
    pub h2: f64,
}

/// Norms by the midpoint rule at `quad_res` per axis.
pub fn relative_errors(
    model: &DeepONet,
    samples: &[Sample],
    op: &OperatorSpec,
    quad_res: usize,
    exec: Exec,
) -> Result<RelativeErrors> {
    let points = midpoint_points(model.dim, quad_res);
    let d = model.dim;
    // (h1 error, h1 norm, laplacian error, laplacian norm) per sample
    let per_sample = exec
        .map(samples, |s| -> Result<[f64; 4]> {
            let u = solve_truth(&s.field, op);
            let b = model.branch_outputs(&s.grid.values)?;
            let mut acc = [0.0; 4];
            for y in &points {
                let t = model.trunk_jets(y)?;
                let g = crate::model::combine_jets(&b, &t, d);
                let uv = u.evaluate(y);
                acc[0] += (g.value - uv).powi(2);
                acc[1] += uv * uv;
                let mut lap = 0.0;
                for a in 0..d {
                    let mut alpha = vec![0; d];
                    alpha[a] = 1;
                    let ug = u.derivative(&alpha, y);
                    acc[0] += (g.gradient[a] - ug).powi(2);
                    acc[1] += ug * ug;
                    alpha[a] = 2;
                    lap += u.derivative(&alpha, y);
                }
                acc[2] += (g.laplacian() - lap).powi(2);
                acc[3] += lap * lap;
            }
            Ok(acc)
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    let mut total = [0.0; 4];
    for a in &per_sample {
        for (t, v) in total.iter_mut().zip(a) {
            *t += v;
        }
    }
    Ok(RelativeErrors {
        h1: (total[0] / total[1]).sqrt(),
        h2: ((total[0] + total[2]) / (total[1] + total[3])).sqrt(),
    })
}
