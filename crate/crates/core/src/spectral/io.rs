//! Text formats.
//!
//! Fields: header `d N_max`, then one line `k_1 ... k_d re im` per mode.
//! Grid samples: a `# grid d N` line, then CSV rows along the last axis.

use std::fmt::Write as _;

use num_complex::Complex64;

use super::field::{FourierField, ModeGrid};
use super::grid::GridSample;
use crate::{Error, Result};

pub fn field_to_text(f: &FourierField) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{} {}", f.dim(), f.max_mode());
    for (k, c) in f.modes().modes().zip(f.coeffs()) {
        for kj in &k {
            let _ = write!(out, "{kj} ");
        }
        let _ = writeln!(out, "{:?} {:?}", c.re, c.im);
    }
    out
}

pub fn field_from_text(text: &str) -> Result<FourierField> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 2 {
        return Err(Error::parse(ln + 1, "expected `d N_max`"));
    }
    let int = |s: &str, ln: usize| {
        s.parse::<usize>()
            .map_err(|_| Error::parse(ln + 1, format!("bad integer `{s}`")))
    };
    let (dim, max_mode) = (int(h[0], ln)?, int(h[1], ln)?);
    if dim == 0 {
        return Err(Error::parse(ln + 1, "dimension must be positive"));
    }
    let grid = ModeGrid { dim, max_mode };
    let mut coeffs = vec![Complex64::new(0.0, 0.0); grid.len()];
    let mut seen = vec![false; grid.len()];
    for (ln, line) in lines {
        let f: Vec<&str> = line.split_whitespace().collect();
        if f.len() != dim + 2 {
            return Err(Error::parse(ln + 1, format!("expected {} fields", dim + 2)));
        }
        let k = f[..dim]
            .iter()
            .map(|s| {
                s.parse::<i64>()
                    .map_err(|_| Error::parse(ln + 1, format!("bad mode `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        let num = |s: &str| {
            s.parse::<f64>()
                .map_err(|_| Error::parse(ln + 1, format!("bad number `{s}`")))
        };
        let i = grid
            .index(&k)
            .ok_or_else(|| Error::parse(ln + 1, format!("mode {k:?} outside band")))?;
        if seen[i] {
            return Err(Error::parse(ln + 1, format!("duplicate mode {k:?}")));
        }
        seen[i] = true;
        coeffs[i] = Complex64::new(num(f[dim])?, num(f[dim + 1])?);
    }
    FourierField::from_coeffs(dim, max_mode, coeffs)
}

pub fn grid_to_csv(g: &GridSample) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# grid {} {}", g.dim, g.n);
    for row in g.values.chunks(g.side()) {
        let cells: Vec<String> = row.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", cells.join(","));
    }
    out
}

pub fn grid_from_csv(text: &str) -> Result<GridSample> {
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty());
    let (ln, header) = lines
        .next()
        .ok_or_else(|| Error::parse(1, "missing header"))?;
    let h: Vec<&str> = header.split_whitespace().collect();
    if h.len() != 4 || h[0] != "#" || h[1] != "grid" {
        return Err(Error::parse(ln + 1, "expected `# grid d N`"));
    }
    let dim: usize = h[2]
        .parse()
        .map_err(|_| Error::parse(ln + 1, "bad dimension"))?;
    let n: usize = h[3].parse().map_err(|_| Error::parse(ln + 1, "bad N"))?;
    let mut values = Vec::new();
    for (ln, line) in lines {
        let row = line
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::parse(ln + 1, format!("bad number `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if row.len() != 2 * n + 1 {
            return Err(Error::parse(
                ln + 1,
                format!("expected {} columns", 2 * n + 1),
            ));
        }
        values.extend(row);
    }
    GridSample::new(dim, n, values)
}
