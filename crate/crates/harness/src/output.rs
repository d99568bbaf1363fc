use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{HarnessError, Result};

/// Cells are stored preformatted so reruns produce identical bytes.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CsvTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) if v.is_nan() => String::new(),
            Cell::Real(v) => format!("{v:.9e}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl CsvTable {
    pub fn new(header: &[&str]) -> Self {
        CsvTable {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width must match header");
        self.rows.push(row.iter().map(Cell::render).collect());
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.header.join(",");
        out.push('\n');
        for r in &self.rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        out
    }

    /// Numeric column by header name; blank cells are `NaN`.
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.header.iter().position(|h| h == name)?;
        Some(
            self.rows
                .iter()
                .map(|r| r[idx].parse().unwrap_or(f64::NAN))
                .collect(),
        )
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> HarnessError + '_ {
    move |source| HarnessError::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Writes via a temporary sibling and a rename, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    if let Some(dir) = path.parent() {
        fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let tmp: PathBuf = path.with_extension("tmp");
    fs::write(&tmp, contents).map_err(io_err(&tmp))?;
    fs::rename(&tmp, path).map_err(io_err(path))
}

/// A log-log line chart of one or more `(x, y)` series. Nonpositive points are skipped.
pub fn loglog_svg(
    title: &str,
    x_label: &str,
    y_label: &str,
    series: &[(&str, Vec<(f64, f64)>)],
) -> String {
    const W: f64 = 640.0;
    const H: f64 = 420.0;
    const PAD: f64 = 60.0;
    const COLORS: [&str; 6] = [
        "#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#17becf",
    ];
    let pts: Vec<(f64, f64)> = series
        .iter()
        .flat_map(|(_, s)| s.iter().copied())
        .filter(|&(x, y)| x > 0.0 && y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{W}" height="{H}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="20" text-anchor="middle">{title}</text>"#,
        W / 2.0
    );
    if !pts.is_empty() {
        let (mut x0, mut x1, mut y0, mut y1) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = |a: f64, b: f64| if b > a { b - a } else { 1.0 };
        let (sx, sy) = (span(x0, x1), span(y0, y1));
        let map = |x: f64, y: f64| {
            (
                PAD + (x - x0) / sx * (W - 2.0 * PAD),
                H - PAD - (y - y0) / sy * (H - 2.0 * PAD),
            )
        };
        let _ = writeln!(
            svg,
            r#"<rect x="{PAD}" y="{PAD}" width="{}" height="{}" fill="none" stroke="black"/>"#,
            W - 2.0 * PAD,
            H - 2.0 * PAD
        );
        for (i, (name, s)) in series.iter().enumerate() {
            let color = COLORS[i % COLORS.len()];
            let path: Vec<String> = s
                .iter()
                .filter(|&&(x, y)| x > 0.0 && y > 0.0)
                .map(|&(x, y)| {
                    let (px, py) = map(x.log10(), y.log10());
                    format!("{px:.1},{py:.1}")
                })
                .collect();
            let _ = writeln!(
                svg,
                r#"<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{}"/>"#,
                path.join(" ")
            );
            let _ = writeln!(
                svg,
                r#"<text x="{}" y="{}" fill="{color}">{name}</text>"#,
                W - PAD + 4.0,
                PAD + 14.0 * (i as f64 + 1.0)
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{PAD}" y="{}">10^{x0:.2}</text><text x="{}" y="{}" text-anchor="end">10^{x1:.2}</text>"#,
            H - PAD + 16.0,
            W - PAD,
            H - PAD + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">10^{y0:.2}</text><text x="{}" y="{}" text-anchor="end">10^{y1:.2}</text>"#,
            PAD - 4.0,
            H - PAD,
            PAD - 4.0,
            PAD + 10.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">{x_label} (log)</text>"#,
        W / 2.0,
        H - 15.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="15" y="{}" transform="rotate(-90 15 {})" text-anchor="middle">{y_label} (log)</text>"#,
        H / 2.0,
        H / 2.0
    );
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_columns() {
        let mut t = CsvTable::new(&["n", "error", "note"]);
        t.push(vec![4usize.into(), 0.125.into(), "a".into()]);
        t.push(vec![8usize.into(), f64::NAN.into(), "b".into()]);
        assert_eq!(t.to_csv(), "n,error,note\n4,1.250000000e-1,a\n8,,b\n");
        let err = t.column("error").unwrap();
        assert_eq!(err[0], 0.125);
        assert!(err[1].is_nan());
        assert!(t.column("missing").is_none());
    }

    #[test]
    fn atomic_write_leaves_no_temp() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sub/out.csv");
        write_atomic(&path, "x\n").unwrap();
        assert_eq!(fs::read_to_string(&path).unwrap(), "x\n");
        assert!(!path.with_extension("tmp").exists());
    }

    #[test]
    fn svg_skips_nonpositive() {
        let s = loglog_svg(
            "t",
            "x",
            "y",
            &[("a", vec![(1.0, 1.0), (2.0, 0.0), (4.0, 0.25)])],
        );
        assert!(s.starts_with("<svg"));
        assert_eq!(s.matches("polyline").count(), 1);
    }
}
