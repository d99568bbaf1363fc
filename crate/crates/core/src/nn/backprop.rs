use super::eval::{affine, check_params, lap_tape, map_block};
use super::{Activation, JetSeed, NetworkSpec};
use crate::{Error, Result};

fn check_seed_len(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_grad_len(spec: &NetworkSpec, grad: &[f64]) -> Result<()> {
    check_seed_len(spec.count_params(), grad.len())
}

/// Gradient over parameters of `sum_o seed[o] * output[o]`.
pub fn backprop_value(
    spec: &NetworkSpec,
    params: &[f64],
    x: &[f64],
    seed: &[f64],
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.len()];
    accumulate_value_grad(spec, params, x, seed, &mut grad)?;
    Ok(grad)
}

/// Like [`backprop_value`] but adds into `grad`.
pub fn accumulate_value_grad(
    spec: &NetworkSpec,
    params: &[f64],
    x: &[f64],
    seed: &[f64],
    grad: &mut [f64],
) -> Result<()> {
    check_params(spec, params, x)?;
    check_seed_len(spec.output_dim, seed.len())?;
    check_grad_len(spec, grad)?;
    let dims = spec.dims();
    let offsets = spec.offsets();
    let n_maps = spec.n_maps();

    let mut acts = Vec::with_capacity(n_maps + 1);
    let mut pre = Vec::with_capacity(n_maps);
    acts.push(x.to_vec());
    for map in 0..n_maps {
        let (w, b) = map_block(params, offsets[map], dims[map], dims[map + 1]);
        let mut z = vec![0.0; dims[map + 1]];
        affine(w, b, &acts[map], &mut z);
        let act = spec.activation_after(map);
        let a = z.iter().map(|&zi| act.apply(zi)).collect();
        pre.push(z);
        acts.push(a);
    }

    let mut abar = seed.to_vec();
    for map in (0..n_maps).rev() {
        let (fan_in, fan_out) = (dims[map], dims[map + 1]);
        let act = spec.activation_after(map);
        let zbar: Vec<f64> = if act == Activation::Identity {
            abar
        } else {
            abar.iter()
                .zip(&pre[map])
                .map(|(a, &z)| a * act.derivative(z))
                .collect()
        };
        let off = offsets[map];
        let input = &acts[map];
        for (i, &zb) in zbar.iter().enumerate() {
            if zb == 0.0 {
                continue;
            }
            let row = &mut grad[off + i * fan_in..off + (i + 1) * fan_in];
            for (g, a) in row.iter_mut().zip(input) {
                *g += zb * a;
            }
            grad[off + fan_out * fan_in + i] += zb;
        }
        if map > 0 {
            let (w, _) = map_block(params, off, fan_in, fan_out);
            let mut prev = vec![0.0; fan_in];
            for (i, &zb) in zbar.iter().enumerate() {
                if zb == 0.0 {
                    continue;
                }
                for (p, wij) in prev.iter_mut().zip(&w[i * fan_in..(i + 1) * fan_in]) {
                    *p += wij * zb;
                }
            }
            abar = prev;
        } else {
            abar = Vec::new();
        }
    }
    Ok(())
}

/// Gradient over parameters of `sum_o <seeds[o], jet_o>`, differentiating through the
/// Laplacian-mode forward jet.
pub fn backprop_jet(
    spec: &NetworkSpec,
    params: &[f64],
    x: &[f64],
    seeds: &[JetSeed],
) -> Result<Vec<f64>> {
    let mut grad = vec![0.0; params.len()];
    accumulate_jet_grad(spec, params, x, seeds, &mut grad)?;
    Ok(grad)
}

/// Like [`backprop_jet`] but adds into `grad`.
pub fn accumulate_jet_grad(
    spec: &NetworkSpec,
    params: &[f64],
    x: &[f64],
    seeds: &[JetSeed],
    grad: &mut [f64],
) -> Result<()> {
    check_seed_len(spec.output_dim, seeds.len())?;
    check_grad_len(spec, grad)?;
    let tape = lap_tape(spec, params, x)?;
    let d = tape.d;
    let dims = spec.dims();
    let offsets = spec.offsets();
    let n_out = spec.output_dim;

    let mut bv = vec![0.0; n_out];
    let mut bg = vec![0.0; n_out * d];
    let mut bl = vec![0.0; n_out];
    for (o, s) in seeds.iter().enumerate() {
        bv[o] = s.value;
        bl[o] = s.laplacian;
        if !s.gradient.is_empty() {
            check_seed_len(d, s.gradient.len())?;
            bg[o * d..(o + 1) * d].copy_from_slice(&s.gradient);
        }
    }

    for map in (0..spec.n_maps()).rev() {
        let (fan_in, fan_out) = (dims[map], dims[map + 1]);
        let act = spec.activation_after(map);
        let z = &tape.pre[map];
        // cotangents of the pre-activation channels
        if act != Activation::Identity {
            for i in 0..fan_out {
                let zv = z.v[i];
                let d1 = act.derivative(zv);
                let d2 = act.second_derivative(zv);
                let zg = &z.g[i * d..(i + 1) * d];
                let gi = &mut bg[i * d..(i + 1) * d];
                let dot: f64 = gi.iter().zip(zg).map(|(a, b)| a * b).sum();
                let (av, al) = (bv[i], bl[i]);
                bv[i] = av * d1 + d2 * dot + al * d2 * z.l[i];
                for (g, zgk) in gi.iter_mut().zip(zg) {
                    *g = *g * d1 + al * 2.0 * d2 * zgk;
                }
                bl[i] = al * d1;
            }
        }

        let off = offsets[map];
        let a = &tape.acts[map];
        for i in 0..fan_out {
            let (zv, zl) = (bv[i], bl[i]);
            let zg = &bg[i * d..(i + 1) * d];
            if zv == 0.0 && zl == 0.0 && zg.iter().all(|&g| g == 0.0) {
                continue;
            }
            let row = &mut grad[off + i * fan_in..off + (i + 1) * fan_in];
            for (j, gw) in row.iter_mut().enumerate() {
                let ag = &a.g[j * d..(j + 1) * d];
                let dot: f64 = zg.iter().zip(ag).map(|(p, q)| p * q).sum();
                *gw += zv * a.v[j] + dot + zl * a.l[j];
            }
            grad[off + fan_out * fan_in + i] += zv;
        }

        if map == 0 {
            break;
        }
        let (w, _) = map_block(params, off, fan_in, fan_out);
        let mut pv = vec![0.0; fan_in];
        let mut pg = vec![0.0; fan_in * d];
        let mut pl = vec![0.0; fan_in];
        for i in 0..fan_out {
            let (zv, zl) = (bv[i], bl[i]);
            let zg = &bg[i * d..(i + 1) * d];
            for j in 0..fan_in {
                let wij = w[i * fan_in + j];
                if wij == 0.0 {
                    continue;
                }
                pv[j] += wij * zv;
                pl[j] += wij * zl;
                for (p, g) in pg[j * d..(j + 1) * d].iter_mut().zip(zg) {
                    *p += wij * g;
                }
            }
        }
        bv = pv;
        bg = pg;
        bl = pl;
    }
    Ok(())
}
