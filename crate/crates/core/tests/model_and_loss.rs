use onet_core::model::{BranchLayout, BranchRegime, DeepONet, ModelConfig, TrunkMode};
use onet_core::pde::OperatorSpec;
use onet_core::spectral::Ensemble;
use onet_core::train::{loss_and_grad, loss_ls, Sample, SampleSet};
use onet_core::Exec;
use proptest::prelude::*;

fn model(dim: usize, cells: usize, order: usize, seed: u64) -> DeepONet {
    let p = cells.pow(dim as u32) * onet_core::multi_index::count_up_to(dim, order - 1);
    DeepONet::build(&ModelConfig {
        dim,
        n_grid: 2,
        p,
        regime: BranchRegime::new(1.5, 600, 8, 1).unwrap(),
        layout: BranchLayout::Shared,
        trunk: TrunkMode::Constructed { cells, order },
        seed,
        zero_readout: false,
    })
    .unwrap()
}

#[test]
fn model_jet_matches_finite_differences() {
    let net = model(2, 2, 3, 5);
    let field = Ensemble::new(2, 1.5, 2, 10.0).unwrap().draw(1);
    let s = Sample::new(field, 2);
    let h = 1e-5;
    for y in [[0.31, 0.62], [0.77, 0.13], [0.52, 0.41]] {
        let jet = net.eval_jet(&s.grid, &y).unwrap();
        assert_eq!(jet.value, net.eval(&s.grid, &y).unwrap());
        let at = |dy: [f64; 2]| net.eval(&s.grid, &[y[0] + dy[0], y[1] + dy[1]]).unwrap();
        let mut lap = 0.0;
        for i in 0..2 {
            let mut e = [0.0; 2];
            e[i] = h;
            let fd = (at(e) - at([-e[0], -e[1]])) / (2.0 * h);
            assert!((fd - jet.gradient[i]).abs() <= 1e-5 * jet.gradient[i].abs().max(1.0));
            e[i] = 1e-3;
            lap += (at(e) - 2.0 * jet.value + at([-e[0], -e[1]])) / 1e-6;
        }
        assert!((lap - jet.laplacian()).abs() <= 1e-4 * jet.laplacian().abs().max(1.0));
    }
}

#[test]
fn sequential_and_parallel_agree_bitwise() {
    let net = model(1, 1, 4, 2);
    let ensemble = Ensemble::new(1, 1.5, 2, 10.0).unwrap();
    let set = SampleSet::draw(&ensemble, 2, 24, 64, 3).unwrap();
    let op = OperatorSpec::new(10.0, 1).unwrap();
    let a = loss_and_grad(&net, &set, &op, Exec::Sequential).unwrap();
    let b = loss_and_grad(&net, &set, &op, Exec::Parallel).unwrap();
    assert_eq!(a.0.to_bits(), b.0.to_bits());
    assert!(a
        .1
        .iter()
        .zip(&b.1)
        .all(|(x, y)| x.to_bits() == y.to_bits()));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn loss_ignores_sample_order(seed in 0u64..1000, shift in 1usize..7) {
        let net = model(1, 2, 2, seed);
        let ensemble = Ensemble::new(1, 1.0, 2, 10.0).unwrap();
        let set = SampleSet::draw(&ensemble, 2, 8, 32, seed).unwrap();
        let mut samples = set.samples.clone();
        samples.rotate_left(shift);
        let mut points = set.points.clone();
        points.reverse();
        let permuted = SampleSet::new(samples, points);
        let op = OperatorSpec::new(3.0, 1).unwrap();
        let a = loss_ls(&net, &set, &op, Exec::Sequential).unwrap();
        let b = loss_ls(&net, &permuted, &op, Exec::Sequential).unwrap();
        prop_assert!((a - b).abs() <= 1e-12 * a.abs());
    }
}
