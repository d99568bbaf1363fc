use super::loss::{loss_and_grad_with, trunk_operator_values};
use super::sample::SampleSet;
use crate::model::DeepONet;
use crate::pde::OperatorSpec;
use crate::{Error, Exec, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[derive(Clone, Debug, PartialEq)]
pub struct TrainConfig {
    pub steps: usize,
    pub step_size: f64,
    /// 0 for plain gradient descent.
    pub momentum: f64,
    /// Every trainable parameter is clipped to `[-clip, clip]` after each step.
    pub clip: f64,
    pub operator: OperatorSpec,
    pub exec: Exec,
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.steps == 0 {
            return Err(Error::invalid("steps must be at least 1"));
        }
        if !(self.step_size > 0.0) || !(self.clip > 0.0) {
            return Err(Error::invalid("step size and clip bound must be positive"));
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::invalid("momentum must lie in [0, 1)"));
        }
        Ok(())
    }
}

/// Full-batch gradient descent on `loss_ls`. Returns the loss before every step and after
/// the last one (`steps + 1` values). The frozen trunk is never touched.
pub fn train(model: &mut DeepONet, set: &SampleSet, cfg: &TrainConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let range = model.trainable_range();
    let mut velocity = vec![0.0; range.len()];
    let mut trace = Vec::with_capacity(cfg.steps + 1);
    let frozen = if model.trunk_frozen() {
        Some(trunk_operator_values(
            model,
            &set.points,
            &cfg.operator,
            cfg.exec,
        )?)
    } else {
        None
    };
    for step in 0..=cfg.steps {
        let (loss, grad) =
            loss_and_grad_with(model, set, &cfg.operator, cfg.exec, frozen.as_deref())?;
        trace.push(loss);
        if !loss.is_finite() || grad.iter().any(|g| !g.is_finite()) {
            return Err(Error::NonFiniteLoss { step, trace });
        }
        if step == cfg.steps {
            break;
        }
        let theta = &mut model.theta[range.clone()];
        for ((t, v), g) in theta
            .iter_mut()
            .zip(&mut velocity)
            .zip(&grad[range.clone()])
        {
            *v = cfg.momentum * *v - cfg.step_size * g;
            *t = (*t + *v).clamp(-cfg.clip, cfg.clip);
        }
    }
    Ok(trace)
}

/// Largest Hessian eigenvalue of `loss_ls` over the trainable parameters, by power
/// iteration on central differences of the gradient.
pub fn sharpness(
    model: &DeepONet,
    set: &SampleSet,
    op: &OperatorSpec,
    iters: usize,
    seed: u64,
    exec: Exec,
) -> Result<f64> {
    const EPS: f64 = 1e-4;
    let range = model.trainable_range();
    let frozen = if model.trunk_frozen() {
        Some(trunk_operator_values(model, &set.points, op, exec)?)
    } else {
        None
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<f64> = (0..range.len())
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    let mut probe = model.clone();
    let mut estimate = 0.0;
    for _ in 0..iters.max(1) {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v.iter_mut().for_each(|x| *x /= norm);
        let mut grad_at = |sign: f64| -> Result<Vec<f64>> {
            for ((t, t0), dv) in probe.theta[range.clone()]
                .iter_mut()
                .zip(&model.theta[range.clone()])
                .zip(&v)
            {
                *t = t0 + sign * EPS * dv;
            }
            Ok(loss_and_grad_with(&probe, set, op, exec, frozen.as_deref())?.1)
        };
        let plus = grad_at(1.0)?;
        let minus = grad_at(-1.0)?;
        let hv: Vec<f64> = plus[range.clone()]
            .iter()
            .zip(&minus[range.clone()])
            .map(|(a, b)| (a - b) / (2.0 * EPS))
            .collect();
        estimate = hv.iter().zip(&v).map(|(a, b)| a * b).sum();
        v = hv;
    }
    Ok(estimate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{BranchLayout, TrunkMode};
    use crate::nn::{NetworkSpec, ParameterVector};
    use crate::spectral::{FourierField, GridSample};
    use crate::train::{Sample, SampleSet};
    use crate::trunk::monomial_net;

    /// One sample with a zero grid, so only the branch bias `b` matters and
    /// `L_S(b) = mean_j (b c y_j - 1)^2`.
    fn toy() -> (DeepONet, SampleSet) {
        let branch = NetworkSpec::new(5, vec![], 1).unwrap();
        let lin = monomial_net(&[1], 1).unwrap();
        let model = DeepONet::from_parts(
            1,
            2,
            TrunkMode::Constructed { cells: 1, order: 2 },
            BranchLayout::Shared,
            None,
            vec![(branch.clone(), ParameterVector::zeros(&branch))],
            vec![(lin.spec, lin.params)],
        )
        .unwrap();
        let sample = Sample {
            field: FourierField::constant(1, 1.0),
            grid: GridSample::new(1, 2, vec![0.0; 5]).unwrap(),
        };
        let points = vec![vec![0.2], vec![0.5], vec![0.9]];
        (model, SampleSet::new(vec![sample], points))
    }

    fn cfg(steps: usize, step_size: f64, momentum: f64, clip: f64) -> TrainConfig {
        TrainConfig {
            steps,
            step_size,
            momentum,
            clip,
            operator: OperatorSpec::new(2.0, 1).unwrap(),
            exec: Exec::Sequential,
        }
    }

    #[test]
    fn converges_to_closed_form() {
        let (mut model, set) = toy();
        let trunk_before = model.theta[6..].to_vec();
        let trace = train(&mut model, &set, &cfg(400, 0.2, 0.9, 10.0)).unwrap();
        assert_eq!(trace.len(), 401);
        let ys = [0.2, 0.5, 0.9];
        let best =
            ys.iter().map(|y| 2.0 * y).sum::<f64>() / ys.iter().map(|y| 4.0 * y * y).sum::<f64>();
        assert!(
            (model.theta[5] - best).abs() < 1e-6,
            "{} vs {best}",
            model.theta[5]
        );
        assert_eq!(model.theta[6..], trunk_before[..]);
    }

    #[test]
    fn small_steps_descend() {
        let (mut model, set) = toy();
        let trace = train(&mut model, &set, &cfg(50, 0.05, 0.0, 10.0)).unwrap();
        assert!(trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn clipping_holds() {
        let (mut model, set) = toy();
        train(&mut model, &set, &cfg(5, 1.0, 0.0, 0.05)).unwrap();
        assert!(model.theta[..6].iter().all(|t| t.abs() <= 0.05));
        assert_eq!(model.theta[5], 0.05);
    }

    #[test]
    fn divergence_is_reported() {
        let (mut model, set) = toy();
        let err = train(&mut model, &set, &cfg(200, 50.0, 0.0, 1e300)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteLoss { .. }));
        assert!(cfg(0, 0.1, 0.0, 1.0).validate().is_err());
    }

    #[test]
    fn sharpness_of_toy_is_closed_form() {
        // L(b) = mean_j (2 b y_j - 1)^2 has second derivative 8 mean_j y_j^2.
        let (model, set) = toy();
        let h = sharpness(
            &model,
            &set,
            &OperatorSpec::new(2.0, 1).unwrap(),
            30,
            1,
            Exec::Sequential,
        )
        .unwrap();
        let want = 8.0 * (0.04 + 0.25 + 0.81) / 3.0;
        assert!((h - want).abs() < 1e-6 * want, "{h} vs {want}");
    }
}
