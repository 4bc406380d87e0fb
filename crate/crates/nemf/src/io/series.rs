//! CSV time-series output: one header row, one row per diagnostic record,
//! 17-significant-digit decimals (lossless f64 round trip). Column order
//! is fixed:
//!
//! ```text
//! t,E,D,A,l2_v,h1_v,h2_d,resid_d,resid_d_dual,mean_v_1..n,energy_residual,max_div_v
//! ```

use std::io::Write;
use std::path::Path;

use crate::diagnostics::DiagRecord;
use crate::error::{Error, Result};

pub fn series_header(dim: usize) -> String {
    let mut cols = vec![
        "t".to_string(),
        "E".to_string(),
        "D".to_string(),
        "A".to_string(),
        "l2_v".to_string(),
        "h1_v".to_string(),
        "h2_d".to_string(),
        "resid_d".to_string(),
        "resid_d_dual".to_string(),
    ];
    for i in 1..=dim {
        cols.push(format!("mean_v_{i}"));
    }
    cols.push("energy_residual".to_string());
    cols.push("max_div_v".to_string());
    cols.join(",")
}

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_series_to(mut w: impl Write, records: &[DiagRecord], dim: usize) -> Result<()> {
    writeln!(w, "{}", series_header(dim))?;
    for r in records {
        let mut cols = vec![
            fmt(r.t),
            fmt(r.energy),
            fmt(r.dissipation),
            fmt(r.quantity_a),
            fmt(r.l2_v),
            fmt(r.h1_v),
            fmt(r.h2_d),
            fmt(r.resid_d),
            fmt(r.resid_d_dual),
        ];
        for i in 0..dim {
            cols.push(fmt(r.mean_v.get(i).copied().unwrap_or(0.0)));
        }
        cols.push(fmt(r.energy_residual));
        cols.push(fmt(r.max_div_v));
        writeln!(w, "{}", cols.join(","))?;
    }
    Ok(())
}

pub fn write_series(records: &[DiagRecord], dim: usize, path: impl AsRef<Path>) -> Result<()> {
    let file = std::fs::File::create(path)?;
    write_series_to(std::io::BufWriter::new(file), records, dim)
}

/// Parse a series CSV back into records; returns the grid dimension
/// implied by the mean_v columns.
pub fn read_series(path: impl AsRef<Path>) -> Result<(usize, Vec<DiagRecord>)> {
    let text = std::fs::read_to_string(path)?;
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty series file".into()))?;
    let dim = header
        .split(',')
        .filter(|c| c.starts_with("mean_v_"))
        .count();
    if dim == 0 || header != series_header(dim) {
        return Err(Error::Format(format!("unrecognized header '{header}'")));
    }
    let ncols = 11 + dim;
    let mut records = Vec::new();
    for (lineno, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let vals: Vec<f64> = line
            .split(',')
            .map(|c| c.trim().parse::<f64>())
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse {
                line: lineno + 2,
                msg: e.to_string(),
            })?;
        if vals.len() != ncols {
            return Err(Error::Parse {
                line: lineno + 2,
                msg: format!("expected {ncols} columns, got {}", vals.len()),
            });
        }
        records.push(DiagRecord {
            t: vals[0],
            energy: vals[1],
            dissipation: vals[2],
            quantity_a: vals[3],
            l2_v: vals[4],
            h1_v: vals[5],
            h2_d: vals[6],
            resid_d: vals[7],
            resid_d_dual: vals[8],
            mean_v: vals[9..9 + dim].to_vec(),
            energy_residual: vals[9 + dim],
            max_div_v: vals[10 + dim],
        });
    }
    Ok((dim, records))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_trajectory_writes_header_only() {
        let mut buf = Vec::new();
        write_series_to(&mut buf, &[], 2).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().count(), 1);
        assert_eq!(text.lines().next().unwrap(), series_header(2));
    }

    #[test]
    fn series_round_trip_is_exact() {
        let dir = std::env::temp_dir().join("nemf-series-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("series.csv");
        let records: Vec<DiagRecord> = (0..5)
            .map(|i| {
                let mut r = DiagRecord::synthetic(
                    i as f64 * 0.1,
                    (1.0f64 / 3.0).powi(i + 1),
                    1e-7 * (i as f64 + 0.123456789),
                );
                r.mean_v = vec![0.3, -0.2];
                r.max_div_v = 1e-13;
                r
            })
            .collect();
        write_series(&records, 2, &path).unwrap();
        let (dim, back) = read_series(&path).unwrap();
        assert_eq!(dim, 2);
        assert_eq!(back.len(), records.len());
        for (a, b) in records.iter().zip(&back) {
            // 17 significant digits round-trip f64 exactly
            assert_eq!(a.t, b.t);
            assert_eq!(a.energy, b.energy);
            assert_eq!(a.resid_d_dual, b.resid_d_dual);
            assert_eq!(a.mean_v, b.mean_v);
        }
    }

    #[test]
    fn malformed_series_is_a_format_error() {
        let dir = std::env::temp_dir().join("nemf-series-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "nonsense\n1,2,3\n").unwrap();
        assert!(matches!(read_series(&path), Err(Error::Format(_))));
    }
}
