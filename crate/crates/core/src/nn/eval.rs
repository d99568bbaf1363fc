use super::{Activation, Jet2, JetMode, NetworkSpec, SecondOrder};
use crate::{Error, Result};

pub(crate) const MAX_HESSIAN_DIM: usize = 3;

/// Weight block and bias of affine map `map`.
#[inline]
pub(crate) fn map_block<'a>(
    params: &'a [f64],
    offset: usize,
    fan_in: usize,
    fan_out: usize,
) -> (&'a [f64], &'a [f64]) {
    let w = &params[offset..offset + fan_in * fan_out];
    let b = &params[offset + fan_in * fan_out..offset + fan_in * fan_out + fan_out];
    (w, b)
}

/// `out = W x + b`. Every value path goes through here so plain and jet evaluation agree
/// bit for bit.
#[inline]
pub(crate) fn affine(w: &[f64], b: &[f64], x: &[f64], out: &mut [f64]) {
    let n = x.len();
    for (i, o) in out.iter_mut().enumerate() {
        let row = &w[i * n..(i + 1) * n];
        let mut acc = 0.0;
        for (wij, xj) in row.iter().zip(x) {
            acc += wij * xj;
        }
        *o = acc + b[i];
    }
}

/// `out = W x` applied to `k`-wide channels stored node-major (`x[j*k + c]`).
#[inline]
pub(crate) fn linear_channels(w: &[f64], x: &[f64], k: usize, out: &mut [f64]) {
    let n = x.len() / k.max(1);
    out.iter_mut().for_each(|o| *o = 0.0);
    if k == 0 {
        return;
    }
    for (i, o) in out.chunks_mut(k).enumerate() {
        let row = &w[i * n..(i + 1) * n];
        for (j, &wij) in row.iter().enumerate() {
            if wij == 0.0 {
                continue;
            }
            let src = &x[j * k..(j + 1) * k];
            for (oc, sc) in o.iter_mut().zip(src) {
                *oc += wij * sc;
            }
        }
    }
}

pub(crate) fn check_params(spec: &NetworkSpec, params: &[f64], x: &[f64]) -> Result<()> {
    let expected = spec.count_params();
    if params.len() != expected {
        return Err(Error::DimensionMismatch {
            expected,
            got: params.len(),
        });
    }
    if x.len() != spec.input_dim {
        return Err(Error::DimensionMismatch {
            expected: spec.input_dim,
            got: x.len(),
        });
    }
    Ok(())
}

pub(crate) fn check_smooth(spec: &NetworkSpec) -> Result<()> {
    if spec
        .layers
        .iter()
        .any(|l| l.activation == Activation::Sigma1)
    {
        return Err(Error::NonsmoothTrunk);
    }
    Ok(())
}

/// All outputs of the network at `x`.
pub fn forward(spec: &NetworkSpec, params: &[f64], x: &[f64]) -> Result<Vec<f64>> {
    check_params(spec, params, x)?;
    let dims = spec.dims();
    let offsets = spec.offsets();
    let mut cur = x.to_vec();
    for map in 0..spec.n_maps() {
        let (w, b) = map_block(params, offsets[map], dims[map], dims[map + 1]);
        let mut next = vec![0.0; dims[map + 1]];
        affine(w, b, &cur, &mut next);
        let act = spec.activation_after(map);
        if act != Activation::Identity {
            next.iter_mut().for_each(|z| *z = act.apply(*z));
        }
        cur = next;
    }
    Ok(cur)
}

/// Node-major jet channels of one layer in Laplacian mode.
#[derive(Clone, Debug, Default)]
pub(crate) struct LapLayer {
    pub v: Vec<f64>,
    /// `n * d`
    pub g: Vec<f64>,
    pub l: Vec<f64>,
}

/// Forward record needed for reverse differentiation through the Laplacian jet.
#[derive(Clone, Debug)]
pub(crate) struct LapTape {
    pub d: usize,
    /// `acts[0]` is the input, `acts[i+1]` the output of map `i` after its activation.
    pub acts: Vec<LapLayer>,
    /// Pre-activations of each map.
    pub pre: Vec<LapLayer>,
}

pub(crate) fn lap_tape(spec: &NetworkSpec, params: &[f64], x: &[f64]) -> Result<LapTape> {
    check_params(spec, params, x)?;
    check_smooth(spec)?;
    let d = spec.input_dim;
    let dims = spec.dims();
    let offsets = spec.offsets();
    let mut input = LapLayer {
        v: x.to_vec(),
        g: vec![0.0; d * d],
        l: vec![0.0; d],
    };
    for i in 0..d {
        input.g[i * d + i] = 1.0;
    }
    let mut acts = vec![input];
    let mut pre = Vec::with_capacity(spec.n_maps());
    for map in 0..spec.n_maps() {
        let (fan_in, fan_out) = (dims[map], dims[map + 1]);
        let (w, b) = map_block(params, offsets[map], fan_in, fan_out);
        let a = acts.last().expect("input layer present");
        let mut z = LapLayer {
            v: vec![0.0; fan_out],
            g: vec![0.0; fan_out * d],
            l: vec![0.0; fan_out],
        };
        affine(w, b, &a.v, &mut z.v);
        linear_channels(w, &a.g, d, &mut z.g);
        linear_channels(w, &a.l, 1, &mut z.l);
        let act = spec.activation_after(map);
        let out = if act == Activation::Identity {
            z.clone()
        } else {
            let mut out = LapLayer {
                v: vec![0.0; fan_out],
                g: vec![0.0; fan_out * d],
                l: vec![0.0; fan_out],
            };
            for i in 0..fan_out {
                let zv = z.v[i];
                let d1 = act.derivative(zv);
                let d2 = act.second_derivative(zv);
                let zg = &z.g[i * d..(i + 1) * d];
                let sq: f64 = zg.iter().map(|g| g * g).sum();
                out.v[i] = act.apply(zv);
                for (og, g) in out.g[i * d..(i + 1) * d].iter_mut().zip(zg) {
                    *og = d1 * g;
                }
                out.l[i] = d1 * z.l[i] + d2 * sq;
            }
            out
        };
        pre.push(z);
        acts.push(out);
    }
    Ok(LapTape { d, acts, pre })
}

fn hessian_forward(spec: &NetworkSpec, params: &[f64], x: &[f64]) -> Result<Vec<Jet2>> {
    let d = spec.input_dim;
    let dd = d * d;
    let dims = spec.dims();
    let offsets = spec.offsets();
    let mut v = x.to_vec();
    let mut g = vec![0.0; d * d];
    for i in 0..d {
        g[i * d + i] = 1.0;
    }
    let mut h = vec![0.0; d * dd];
    for map in 0..spec.n_maps() {
        let (fan_in, fan_out) = (dims[map], dims[map + 1]);
        let (w, b) = map_block(params, offsets[map], fan_in, fan_out);
        let mut zv = vec![0.0; fan_out];
        let mut zg = vec![0.0; fan_out * d];
        let mut zh = vec![0.0; fan_out * dd];
        affine(w, b, &v, &mut zv);
        linear_channels(w, &g, d, &mut zg);
        linear_channels(w, &h, dd, &mut zh);
        let act = spec.activation_after(map);
        if act != Activation::Identity {
            for i in 0..fan_out {
                let z = zv[i];
                let d1 = act.derivative(z);
                let d2 = act.second_derivative(z);
                let gi = zg[i * d..(i + 1) * d].to_vec();
                for r in 0..d {
                    for c in 0..d {
                        let e = &mut zh[i * dd + r * d + c];
                        *e = d1 * *e + d2 * (gi[r] * gi[c]);
                    }
                }
                zg[i * d..(i + 1) * d].iter_mut().for_each(|e| *e *= d1);
                zv[i] = act.apply(z);
            }
        }
        v = zv;
        g = zg;
        h = zh;
    }
    Ok((0..spec.output_dim)
        .map(|o| Jet2 {
            value: v[o],
            gradient: g[o * d..(o + 1) * d].to_vec(),
            second: SecondOrder::Hessian(h[o * dd..(o + 1) * dd].to_vec()),
        })
        .collect())
}

/// Second-order input jet of every output.
///
/// Fails with [`Error::NonsmoothTrunk`] when a hidden layer uses `sigma1`, and with
/// [`Error::HessianDimension`] for full Hessians beyond three input dimensions.
pub fn forward_jet(
    spec: &NetworkSpec,
    params: &[f64],
    x: &[f64],
    mode: JetMode,
) -> Result<Vec<Jet2>> {
    match mode {
        JetMode::Hessian => {
            check_params(spec, params, x)?;
            check_smooth(spec)?;
            if spec.input_dim > MAX_HESSIAN_DIM {
                return Err(Error::HessianDimension(spec.input_dim));
            }
            hessian_forward(spec, params, x)
        }
        JetMode::Laplacian => {
            let tape = lap_tape(spec, params, x)?;
            let d = tape.d;
            let out = tape.acts.last().expect("output layer present");
            Ok((0..spec.output_dim)
                .map(|o| Jet2 {
                    value: out.v[o],
                    gradient: out.g[o * d..(o + 1) * d].to_vec(),
                    second: SecondOrder::Laplacian(out.l[o]),
                })
                .collect())
        }
    }
}
