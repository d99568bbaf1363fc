//! Plain-text network layout:
//!
//! ```text
//! network <input_dim> <output_dim> <hidden_layers>
//! layer <width> <activation>      (one per hidden layer)
//! params <count>
//! <value>                          (one per line, flat layout order)
//! ```
//!
//! Values use the shortest round-trip decimal form, so reading back is lossless.

use std::fmt::Write as _;

use super::{Layer, Network, NetworkSpec, ParameterVector};
use crate::{Error, Result};

pub fn network_to_text(net: &Network) -> String {
    let spec = &net.spec;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "network {} {} {}",
        spec.input_dim,
        spec.output_dim,
        spec.layers.len()
    );
    for l in &spec.layers {
        let _ = writeln!(out, "layer {} {}", l.width, l.activation);
    }
    let _ = writeln!(out, "params {}", net.params.len());
    for v in net.params.as_slice() {
        let _ = writeln!(out, "{v:?}");
    }
    out
}

/// Parses one network from the front of `lines`, advancing the iterator. `line_no` tracks
/// the 1-based line position for error messages.
pub(crate) fn read_network<'a, I>(lines: &mut I, line_no: &mut usize) -> Result<Network>
where
    I: Iterator<Item = &'a str>,
{
    let mut next = |what: &str| -> Result<(usize, &'a str)> {
        loop {
            *line_no += 1;
            match lines.next() {
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => return Ok((*line_no, l.trim())),
                None => return Err(Error::parse(*line_no, format!("expected {what}"))),
            }
        }
    };
    let (ln, header) = next("network header")?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != "network" {
        return Err(Error::parse(ln, "expected `network <in> <out> <hidden>`"));
    }
    let num = |s: &str, ln: usize| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(ln, format!("bad integer `{s}`")))
    };
    let (input_dim, output_dim, n_layers) = (
        num(fields[1], ln)?,
        num(fields[2], ln)?,
        num(fields[3], ln)?,
    );
    let mut layers = Vec::with_capacity(n_layers);
    for _ in 0..n_layers {
        let (ln, line) = next("layer line")?;
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != 3 || f[0] != "layer" {
            return Err(Error::parse(ln, "expected `layer <width> <activation>`"));
        }
        layers.push(Layer {
            width: num(f[1], ln)?,
            activation: f[2]
                .parse()
                .map_err(|e: Error| Error::parse(ln, e.to_string()))?,
        });
    }
    let spec = NetworkSpec::new(input_dim, layers, output_dim)?;
    let (ln, line) = next("params line")?;
    let f: Vec<&str> = line.split_whitespace().collect();
    if f.len() != 2 || f[0] != "params" {
        return Err(Error::parse(ln, "expected `params <count>`"));
    }
    let count = num(f[1], ln)?;
    if count != spec.count_params() {
        return Err(Error::parse(
            ln,
            format!(
                "spec needs {} params, header says {count}",
                spec.count_params()
            ),
        ));
    }
    let mut data = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, line) = next("parameter value")?;
        data.push(
            line.parse::<f64>()
                .map_err(|_| Error::parse(ln, format!("bad number `{line}`")))?,
        );
    }
    Network::new(spec.clone(), ParameterVector::from_vec(&spec, data)?)
}

pub fn network_from_text(text: &str) -> Result<Network> {
    let mut lines = text.lines();
    let mut line_no = 0;
    read_network(&mut lines, &mut line_no)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nn::{Activation, InitScheme};

    #[test]
    fn round_trip_is_lossless() {
        let spec = NetworkSpec::new(
            2,
            vec![
                Layer {
                    width: 3,
                    activation: Activation::Sigma1,
                },
                Layer {
                    width: 2,
                    activation: Activation::Sigma2,
                },
            ],
            2,
        )
        .unwrap();
        let net = Network::init(spec, 17, &InitScheme::UniformHe).unwrap();
        let text = network_to_text(&net);
        let back = network_from_text(&text).unwrap();
        assert_eq!(back, net);
        assert_eq!(network_to_text(&back), text);
    }

    #[test]
    fn bad_inputs() {
        assert!(matches!(network_from_text(""), Err(Error::Parse { .. })));
        assert!(network_from_text("network 1 1 0\nparams 3\n1\n2\n3\n").is_err());
        assert!(network_from_text("network 1 1 1\nlayer 2 tanh\nparams 7\n").is_err());
        let ok = network_from_text("network 1 1 0\nparams 2\n0.5\n-1\n").unwrap();
        assert_eq!(ok.params.as_slice(), &[0.5, -1.0]);
    }
}
