//! Checkpoint text layout:
//!
//! ```text
//! deeponet
//! p <p>
//! n_grid <N>
//! dim <d>
//! trunk_mode constructed cells=<K> order=<n> | trainable width=<w> depth=<L> | classical
//! layout shared | per-output
//! regime <lambda> <q> <W0> <L0> | regime none
//! components <count>
//! component branch | trunk
//! <network block>
//! ...
//! ```

use std::fmt::Write as _;

use super::{BranchLayout, BranchRegime, DeepONet, Role, TrunkMode};
use crate::nn::text::read_network;
use crate::nn::{network_to_text, Network, ParameterVector};
use crate::{Error, Result};

pub fn model_to_text(model: &DeepONet) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "deeponet");
    let _ = writeln!(out, "p {}", model.p);
    let _ = writeln!(out, "n_grid {}", model.n_grid);
    let _ = writeln!(out, "dim {}", model.dim);
    let _ = writeln!(out, "trunk_mode {}", model.trunk_mode);
    let _ = writeln!(out, "layout {}", model.layout);
    match &model.regime {
        Some(r) => {
            let _ = writeln!(
                out,
                "regime {:?} {} {} {}",
                r.lambda, r.budget, r.base_width, r.base_depth
            );
        }
        None => {
            let _ = writeln!(out, "regime none");
        }
    }
    let _ = writeln!(out, "components {}", model.components.len());
    for c in &model.components {
        let role = match c.role {
            Role::Branch => "branch",
            Role::Trunk => "trunk",
        };
        let _ = writeln!(out, "component {role}");
        let params = ParameterVector::from_vec(&c.spec, model.theta[c.range()].to_vec())
            .expect("component slice matches its spec");
        let net = Network {
            spec: c.spec.clone(),
            params,
        };
        out.push_str(&network_to_text(&net));
    }
    out
}

struct Lines<'a, I: Iterator<Item = &'a str>> {
    inner: I,
    line_no: usize,
}

impl<'a, I: Iterator<Item = &'a str>> Lines<'a, I> {
    fn field(&mut self, key: &str) -> Result<(usize, Vec<&'a str>)> {
        loop {
            self.line_no += 1;
            match self.inner.next() {
                Some(l) if l.trim().is_empty() => continue,
                Some(l) => {
                    let f: Vec<&str> = l.split_whitespace().collect();
                    if f[0] != key {
                        return Err(Error::parse(self.line_no, format!("expected `{key}`")));
                    }
                    return Ok((self.line_no, f[1..].to_vec()));
                }
                None => return Err(Error::parse(self.line_no, format!("expected `{key}`"))),
            }
        }
    }

    fn number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T> {
        let (ln, f) = self.field(key)?;
        single(&f, ln)?
            .parse()
            .map_err(|_| Error::parse(ln, format!("bad value for `{key}`")))
    }
}

fn single<'a>(f: &[&'a str], ln: usize) -> Result<&'a str> {
    match f {
        [v] => Ok(v),
        _ => Err(Error::parse(ln, "expected exactly one value")),
    }
}

fn keyed(token: &str, key: &str, ln: usize) -> Result<usize> {
    token
        .strip_prefix(key)
        .and_then(|v| v.strip_prefix('='))
        .and_then(|v| v.parse().ok())
        .ok_or_else(|| Error::parse(ln, format!("expected `{key}=<int>`")))
}

fn parse_trunk_mode(f: &[&str], ln: usize) -> Result<TrunkMode> {
    match f {
        ["constructed", a, b] => Ok(TrunkMode::Constructed {
            cells: keyed(a, "cells", ln)?,
            order: keyed(b, "order", ln)?,
        }),
        ["trainable", a, b] => Ok(TrunkMode::Trainable {
            width: keyed(a, "width", ln)?,
            depth: keyed(b, "depth", ln)?,
        }),
        ["classical"] => Ok(TrunkMode::Classical),
        _ => Err(Error::parse(ln, "unknown trunk mode")),
    }
}

pub fn model_from_text(text: &str) -> Result<DeepONet> {
    let mut lines = Lines {
        inner: text.lines(),
        line_no: 0,
    };
    lines.field("deeponet")?;
    let p: usize = lines.number("p")?;
    let n_grid: usize = lines.number("n_grid")?;
    let dim: usize = lines.number("dim")?;
    let (ln, f) = lines.field("trunk_mode")?;
    let trunk_mode = parse_trunk_mode(&f, ln)?;
    let (ln, f) = lines.field("layout")?;
    let layout = match single(&f, ln)? {
        "shared" => BranchLayout::Shared,
        "per-output" => BranchLayout::PerOutput,
        other => return Err(Error::parse(ln, format!("unknown layout `{other}`"))),
    };
    let (ln, f) = lines.field("regime")?;
    let regime = match f.as_slice() {
        ["none"] => None,
        [l, q, w, d] => {
            let bad = || Error::parse(ln, "bad regime fields");
            Some(
                BranchRegime::new(
                    l.parse().map_err(|_| bad())?,
                    q.parse().map_err(|_| bad())?,
                    w.parse().map_err(|_| bad())?,
                    d.parse().map_err(|_| bad())?,
                )
                .map_err(|e| Error::parse(ln, e.to_string()))?,
            )
        }
        _ => return Err(Error::parse(ln, "expected `regime none` or four fields")),
    };
    let count: usize = lines.number("components")?;
    let mut branch = Vec::new();
    let mut trunk = Vec::new();
    for _ in 0..count {
        let (ln, f) = lines.field("component")?;
        let target = match single(&f, ln)? {
            "branch" => &mut branch,
            "trunk" => &mut trunk,
            other => return Err(Error::parse(ln, format!("unknown role `{other}`"))),
        };
        let net = read_network(&mut lines.inner, &mut lines.line_no)?;
        target.push((net.spec, net.params));
    }
    let model = DeepONet::from_parts(dim, n_grid, trunk_mode, layout, regime, branch, trunk)?;
    if model.p != p {
        return Err(Error::parse(
            lines.line_no,
            format!("header says p = {p}, components give {}", model.p),
        ));
    }
    Ok(model)
}
