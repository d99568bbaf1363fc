//! The fast invariant suite behind `onet check`: derivative oracles, ground-truth operator
//! identities, and the quick rate experiments at their defaults.

use onet_core::nn::{
    backprop_jet, backprop_value, forward, forward_jet, Activation, InitScheme, JetMode, JetSeed,
    NetworkSpec, ParameterVector,
};
use onet_core::pde::{apply_l_field, check_assumption_constants, solve_truth, OperatorSpec};
use onet_core::spectral::{norm_sq, sobolev_norm, Ensemble};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::experiments::{self, Check};

/// `max |a - b| / max |b|`, with an absolute floor so an all-zero oracle compares absolutely.
pub fn rel_err(a: &[f64], b: &[f64]) -> f64 {
    let diff = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let scale = b.iter().map(|y| y.abs()).fold(1e-12, f64::max);
    diff / scale
}

fn central(h: f64, f: impl Fn(f64) -> f64) -> f64 {
    (f(h) - f(-h)) / (2.0 * h)
}

/// Random ReQU network with random biases, so kinks sit away from the origin.
fn random_network(rng: &mut ChaCha8Rng) -> Result<(NetworkSpec, Vec<f64>)> {
    let d = rng.random_range(1..=3);
    let depth = rng.random_range(1..=3);
    let widths: Vec<usize> = (0..depth).map(|_| rng.random_range(2..=8)).collect();
    let out = rng.random_range(1..=3);
    let spec = NetworkSpec::uniform(d, &widths, Activation::Sigma2, out)?;
    let mut params = ParameterVector::init(&spec, rng.random(), &InitScheme::UniformHe)?.into_vec();
    for p in params.iter_mut() {
        *p += rng.random_range(-0.3..0.3);
    }
    Ok((spec, params))
}

/// Worst relative errors `(input gradient, Laplacian, parameter gradient)` over `probes`
/// points of one random network.
pub fn derivative_errors(seed: u64, probes: usize) -> Result<[f64; 3]> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (spec, params) = random_network(&mut rng)?;
    let (d, n_out) = (spec.input_dim, spec.output_dim);
    let mut worst = [0.0f64; 3];
    for _ in 0..probes {
        let x: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let jets = forward_jet(&spec, &params, &x, JetMode::Laplacian)?;
        let shifted = |i: usize, t: f64| {
            let mut y = x.clone();
            y[i] += t;
            y
        };
        for o in 0..n_out {
            let fd_grad: Vec<f64> = (0..d)
                .map(|i| {
                    central(1e-6, |t| {
                        forward(&spec, &params, &shifted(i, t)).unwrap()[o]
                    })
                })
                .collect();
            worst[0] = worst[0].max(rel_err(&jets[o].gradient, &fd_grad));
            // Laplacian as the divergence of the finite-difference-checked gradient.
            let fd_lap: f64 = (0..d)
                .map(|i| {
                    central(1e-6, |t| {
                        forward_jet(&spec, &params, &shifted(i, t), JetMode::Laplacian).unwrap()[o]
                            .gradient[i]
                    })
                })
                .sum();
            worst[1] = worst[1].max(rel_err(&[jets[o].laplacian()], &[fd_lap]));
        }
        let w: Vec<f64> = (0..n_out).map(|_| rng.random_range(-1.0..1.0)).collect();
        let seeds: Vec<JetSeed> = (0..n_out)
            .map(|_| JetSeed::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let value_grad = backprop_value(&spec, &params, &x, &w)?;
        let jet_grad = backprop_jet(&spec, &params, &x, &seeds)?;
        let mut perturbed = params.clone();
        let mut fd_value = vec![0.0; params.len()];
        let mut fd_jet = vec![0.0; params.len()];
        for j in 0..params.len() {
            let mut at = |t: f64| {
                perturbed[j] = params[j] + t;
                let v = forward(&spec, &perturbed, &x).unwrap();
                let js = forward_jet(&spec, &perturbed, &x, JetMode::Laplacian).unwrap();
                let value: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
                let jet: f64 = js
                    .iter()
                    .zip(&seeds)
                    .map(|(j, s)| s.value * j.value + s.laplacian * j.laplacian())
                    .sum();
                (value, jet)
            };
            let (vp, jp) = at(1e-6);
            let (vm, jm) = at(-1e-6);
            perturbed[j] = params[j];
            fd_value[j] = (vp - vm) / 2e-6;
            fd_jet[j] = (jp - jm) / 2e-6;
        }
        worst[2] = worst[2]
            .max(rel_err(&value_grad, &fd_value))
            .max(rel_err(&jet_grad, &fd_jet));
    }
    Ok(worst)
}

pub fn derivative_oracles(seeds: &[u64], probes: usize) -> Result<Vec<Check>> {
    let mut worst = [0.0f64; 3];
    for &seed in seeds {
        let w = derivative_errors(seed, probes)?;
        for i in 0..3 {
            worst[i] = worst[i].max(w[i]);
        }
    }
    Ok(vec![
        Check::new(
            "jet_gradient",
            worst[0] <= 1e-5,
            format!("worst relative error {:.2e}", worst[0]),
        ),
        Check::new(
            "jet_laplacian",
            worst[1] <= 1e-5,
            format!("worst relative error {:.2e}", worst[1]),
        ),
        Check::new(
            "parameter_gradient",
            worst[2] <= 1e-4,
            format!("worst relative error {:.2e}", worst[2]),
        ),
    ])
}

/// Stability and round-trip identities of the exact solution operator on random pairs.
pub fn ground_truth(c: f64, pairs: usize, seed: u64) -> Result<Vec<Check>> {
    let op = OperatorSpec::new(c, 1)?;
    let ensemble = Ensemble::new(1, 1.0, 16, 10.0)?;
    let constants = check_assumption_constants(&op);
    // For c > 1 the supremum is the limit |k| -> inf, approached like (c - 1) / (4 pi^2 k^2).
    const K_MAX: i64 = 100_000;
    let four_pi2 = 4.0 * std::f64::consts::PI.powi(2);
    let tail = (c - 1.0).max(0.0) / (four_pi2 * (K_MAX * K_MAX) as f64);
    let enumerated = (-K_MAX..=K_MAX)
        .map(|k| {
            let a = four_pi2 * norm_sq(&[k]);
            (1.0 + a) / (a + c)
        })
        .fold(0.0, f64::max);
    let mut worst_ratio = 0.0f64;
    let mut worst_trip = 0.0f64;
    for i in 0..pairs as u64 {
        let f1 = ensemble.draw(seed.wrapping_add(2 * i));
        let f2 = ensemble.draw(seed.wrapping_add(2 * i + 1));
        let du = &solve_truth(&f1, &op) - &solve_truth(&f2, &op);
        let df = sobolev_norm(&(&f1 - &f2), 0.0);
        if df > 0.0 {
            worst_ratio = worst_ratio.max(sobolev_norm(&du, 2.0) / (constants.c_stab * df));
        }
        let back = apply_l_field(&solve_truth(&f1, &op), &op);
        worst_trip = worst_trip.max((&back - &f1).max_abs() / f1.max_abs().max(1e-300));
    }
    Ok(vec![
        Check::new(
            "c_stab",
            enumerated <= constants.c_stab && constants.c_stab - enumerated <= tail + 1e-12,
            format!(
                "closed form {:.12} vs enumeration {enumerated:.12}",
                constants.c_stab
            ),
        ),
        Check::new(
            "stability",
            worst_ratio <= 1.0 + 1e-10,
            format!("worst ||du||_H2 / (C ||df||_L2) = {worst_ratio:.12}"),
        ),
        Check::new(
            "round_trip",
            worst_trip <= 1e-12,
            format!("worst relative coefficient error {worst_trip:.2e}"),
        ),
    ])
}

/// Names of registry experiments fast enough for `onet check`.
pub const FAST_EXPERIMENTS: &[&str] = &[
    "trunk-exactness",
    "spectral-rate",
    "lipschitz-P",
    "pu-properties",
    "local-approx-rate",
];

/// Every suite entry as `(group, checks)`.
pub fn run_suite() -> Result<Vec<(String, Vec<Check>)>> {
    let mut out = vec![
        (
            "derivative-oracles".to_string(),
            derivative_oracles(&(0..10).collect::<Vec<_>>(), 100)?,
        ),
        ("ground-truth".to_string(), {
            let mut checks = ground_truth(0.5, 200, 11)?;
            checks.extend(ground_truth(300.0, 200, 12)?);
            checks
        }),
    ];
    for name in FAST_EXPERIMENTS {
        let cfg = ExperimentConfig::new(name).with_seeds([0, 1, 2]);
        out.push((name.to_string(), experiments::run(&cfg)?.checks));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rel_err_floor() {
        assert_eq!(rel_err(&[0.0], &[0.0]), 0.0);
        assert!((rel_err(&[1.1, 2.0], &[1.0, 2.0]) - 0.05).abs() < 1e-12);
    }

    #[test]
    fn derivatives_of_one_network() {
        let [g, l, p] = derivative_errors(3, 5).unwrap();
        assert!(g <= 1e-5 && l <= 1e-5 && p <= 1e-4, "{g} {l} {p}");
    }

    #[test]
    fn ground_truth_small() {
        for c in ground_truth(2.0, 10, 0).unwrap() {
            assert!(c.passed, "{c:?}");
        }
    }
}
