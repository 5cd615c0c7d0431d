//! Tabular text output (tidy tables with a versioned header block) and the
//! fit-input reader.
//!
//! Every emitted table starts with `#`-prefixed header lines declaring the
//! schema and the full resolved configuration, followed by a tab-separated
//! column header and one observation per row. No timestamps: identical runs
//! produce identical bytes.

use std::path::Path;

use crate::analysis::FitPoint;
use crate::error::{Error, Result};

pub const TABLE_SCHEMA_VERSION: u32 = 1;

/// Render a table with its header block.
pub fn render_table(
    name: &str,
    meta: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> String {
    let mut out = String::new();
    out.push_str(&format!("# nvnode-table {name} v{TABLE_SCHEMA_VERSION}\n"));
    for (key, value) in meta {
        out.push_str(&format!("# {key} = {value}\n"));
    }
    out.push_str(&columns.join("\t"));
    out.push('\n');
    for row in rows {
        debug_assert_eq!(row.len(), columns.len());
        out.push_str(&row.join("\t"));
        out.push('\n');
    }
    out
}

pub fn write_table(
    path: &Path,
    name: &str,
    meta: &[(String, String)],
    columns: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    std::fs::write(path, render_table(name, meta, columns, rows))?;
    Ok(())
}

/// Parse decay points from tab-separated text with columns `t_ms`, `p`,
/// `sigma` (extra columns are ignored, `#` lines and blanks skipped).
pub fn parse_fit_points(text: &str) -> Result<Vec<FitPoint>> {
    let mut lines = text
        .lines()
        .map(str::trim_end)
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'));
    let header = lines.next().ok_or_else(|| Error::Parse("no header row in fit input".into()))?;
    let columns: Vec<&str> = header.split('\t').map(str::trim).collect();
    let col = |name: &str| -> Result<usize> {
        columns
            .iter()
            .position(|c| *c == name)
            .ok_or_else(|| Error::Parse(format!("fit input missing column {name:?}")))
    };
    let (ti, pi, si) = (col("t_ms")?, col("p")?, col("sigma")?);
    let mut points = Vec::new();
    for (row_idx, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split('\t').map(str::trim).collect();
        let need = ti.max(pi).max(si);
        if fields.len() <= need {
            return Err(Error::Parse(format!(
                "fit input row {}: expected at least {} fields, got {}",
                row_idx + 1,
                need + 1,
                fields.len()
            )));
        }
        let parse = |field: &str, name: &str| -> Result<f64> {
            let v: f64 = field
                .parse()
                .map_err(|_| Error::Parse(format!("fit input row {}: bad {name} value {field:?}", row_idx + 1)))?;
            if !v.is_finite() {
                return Err(Error::Parse(format!(
                    "fit input row {}: non-finite {name}",
                    row_idx + 1
                )));
            }
            Ok(v)
        };
        let t_ms = parse(fields[ti], "t_ms")?;
        let p = parse(fields[pi], "p")?;
        let sigma = parse(fields[si], "sigma")?;
        if sigma <= 0.0 {
            return Err(Error::Parse(format!("fit input row {}: sigma must be positive", row_idx + 1)));
        }
        points.push(FitPoint { t_ms, p, sigma });
    }
    if points.is_empty() {
        return Err(Error::Parse("fit input has no data rows".into()));
    }
    Ok(points)
}

pub fn load_fit_points(path: &Path) -> Result<Vec<FitPoint>> {
    let text = std::fs::read_to_string(path)?;
    parse_fit_points(&text)
}

/// Compact, locale-independent float formatting for table cells.
pub fn fmt_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.9}")
    } else if v.is_nan() {
        "nan".to_string()
    } else if v > 0.0 {
        "inf".to_string()
    } else {
        "-inf".to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_includes_header_and_meta() {
        let table = render_table(
            "demo",
            &[("seed".into(), "42".into())],
            &["a", "b"],
            &[vec!["1".into(), "2".into()]],
        );
        assert!(table.starts_with("# nvnode-table demo v1\n# seed = 42\n"));
        assert!(table.contains("a\tb\n1\t2\n"));
    }

    #[test]
    fn fit_points_round_trip() {
        let text = "# comment\nt_ms\tp\tsigma\n0\t1.0\t0.01\n5\t0.8\t0.01\n";
        let points = parse_fit_points(text).unwrap();
        assert_eq!(points.len(), 2);
        assert_eq!(points[1].t_ms, 5.0);
    }

    #[test]
    fn fit_points_extra_columns_ignored() {
        let text = "m\tt_ms\tp\tsigma\n0\t0\t1.0\t0.01\n1\t5\t0.9\t0.02\n";
        let points = parse_fit_points(text).unwrap();
        assert_eq!(points[1].sigma, 0.02);
    }

    #[test]
    fn fit_points_errors() {
        assert!(parse_fit_points("").is_err());
        assert!(parse_fit_points("a\tb\tc\n1\t2\t3\n").is_err());
        assert!(parse_fit_points("t_ms\tp\tsigma\n1\t2\n").is_err());
        assert!(parse_fit_points("t_ms\tp\tsigma\nx\t2\t0.1\n").is_err());
        assert!(parse_fit_points("t_ms\tp\tsigma\n1\t2\t-0.1\n").is_err());
        assert!(parse_fit_points("t_ms\tp\tsigma\n1\tinf\t0.1\n").is_err());
        assert!(parse_fit_points("t_ms\tp\tsigma\n").is_err());
    }
}
