use onet_core::model::{BranchLayout, BranchRegime, DeepONet, ModelConfig, TrunkMode};
use onet_core::pde::OperatorSpec;
use onet_core::spectral::Ensemble;
use onet_core::train::{generalization_gap, train, SampleSet, TrainConfig};
use onet_core::Exec;

fn model(seed: u64, zero_readout: bool) -> DeepONet {
    DeepONet::build(&ModelConfig {
        dim: 1,
        n_grid: 2,
        p: 8,
        regime: BranchRegime::new(1.0, 2000, 16, 1).unwrap(),
        layout: BranchLayout::Shared,
        trunk: TrunkMode::Constructed { cells: 1, order: 8 },
        seed,
        zero_readout,
    })
    .unwrap()
}

/// Before fitting, the training sample is just another draw, so the mean gap over
/// independent samples is zero up to its standard error.
#[test]
fn untrained_gap_is_unbiased() {
    let ensemble = Ensemble::new(1, 1.5, 2, 10.0).unwrap();
    let op = OperatorSpec::new(300.0, 1).unwrap();
    let net = model(4, false);
    let gaps: Vec<f64> = (0..20u64)
        .map(|t| {
            let set = SampleSet::draw(&ensemble, 2, 16, 128, 1000 * t).unwrap();
            generalization_gap(
                &net,
                &set,
                &ensemble,
                &op,
                64,
                32,
                500_000 + 1000 * t,
                Exec::Parallel,
            )
            .unwrap()
            .gap
        })
        .collect();
    let n = gaps.len() as f64;
    let mean = gaps.iter().sum::<f64>() / n;
    let var = gaps.iter().map(|g| (g - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let stderr = (var / n).sqrt();
    assert!(
        mean.abs() <= 3.0 * stderr,
        "mean gap {mean:e}, stderr {stderr:e}"
    );
}

#[test]
fn overfit_model_has_positive_gap() {
    let ensemble = Ensemble::new(1, 1.5, 2, 10.0).unwrap();
    let op = OperatorSpec::new(300.0, 1).unwrap();
    let cfg = TrainConfig {
        steps: 1500,
        step_size: 1e-7,
        momentum: 0.9,
        clip: 10.0,
        operator: op,
        exec: Exec::Parallel,
    };
    let positive = (0..20u64)
        .filter(|&seed| {
            let mut net = model(seed, true);
            let set = SampleSet::draw(&ensemble, 2, 2, 16, 7000 + 100 * seed).unwrap();
            train(&mut net, &set, &cfg).unwrap();
            let g = generalization_gap(
                &net,
                &set,
                &ensemble,
                &op,
                128,
                32,
                90_000 + 1000 * seed,
                Exec::Parallel,
            )
            .unwrap();
            g.gap > 0.0
        })
        .count();
    assert!(positive >= 16, "{positive} of 20 positive");
}
