//! Feature CSV input and matrix CSV output.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::DMatrix;

use crate::error::{Error, Result};

/// Formats `v` with `sig` significant digits, shortest of fixed and
/// scientific notation with trailing zeros removed (C's `%.{sig}g`).
pub fn fmt_sig(v: f64, sig: usize) -> String {
    if v == 0.0 {
        return if v.is_sign_negative() { "-0".into() } else { "0".into() };
    }
    if !v.is_finite() {
        return format!("{v}");
    }
    let sig = sig.max(1);
    let sci = format!("{:.*e}", sig - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= sig as i32 {
        let mantissa = strip_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (sig as i32 - 1 - exp).max(0) as usize;
        strip_zeros(&format!("{v:.decimals$}")).to_string()
    }
}

fn strip_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

/// Parses an `N×F` CSV of decimal floats. A first row that does not parse as
/// numbers is taken as a header.
pub fn parse_features(text: &str) -> Result<DMatrix<f64>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, record) in reader.records().enumerate() {
        let record = record?;
        let line = record.position().map_or(idx as u64 + 1, |p| p.line()) as usize;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        let parsed: std::result::Result<Vec<f64>, _> = record.iter().map(str::parse::<f64>).collect();
        match parsed {
            Ok(row) => {
                if let Some(v) = row.iter().find(|v| !v.is_finite()) {
                    return Err(Error::Parse { line, msg: format!("non-finite value {v}") });
                }
                if let Some(first) = rows.first() {
                    if first.len() != row.len() {
                        return Err(Error::Parse {
                            line,
                            msg: format!("expected {} columns, found {}", first.len(), row.len()),
                        });
                    }
                }
                rows.push(row);
            }
            Err(_) if idx == 0 => continue,
            Err(e) => return Err(Error::Parse { line, msg: e.to_string() }),
        }
    }
    if rows.is_empty() {
        return Err(Error::DegenerateInput("feature file has no rows".into()));
    }
    let (n, f) = (rows.len(), rows[0].len());
    Ok(DMatrix::from_fn(n, f, |i, j| rows[i][j]))
}

pub fn load_features(path: impl AsRef<Path>) -> Result<DMatrix<f64>> {
    parse_features(&fs::read_to_string(path)?)
}

/// One CSV line per row, 12 significant digits, no header.
pub fn format_matrix(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for row in m.row_iter() {
        let cells: Vec<String> = row.iter().map(|&v| fmt_sig(v, 12)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_matrix(path: impl AsRef<Path>, m: &DMatrix<f64>) -> Result<()> {
    let mut f = fs::File::create(path)?;
    f.write_all(format_matrix(m).as_bytes())?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(fmt_sig(1.5, 12), "1.5");
        assert_eq!(fmt_sig(1.0 / 3.0, 12), "0.333333333333");
        assert_eq!(fmt_sig(-2.0, 12), "-2");
        assert_eq!(fmt_sig(1e-7, 12), "1e-07");
        assert_eq!(fmt_sig(123456789012345.0, 12), "1.23456789012e+14");
        assert_eq!(fmt_sig(0.0001, 12), "0.0001");
        assert_eq!(fmt_sig(0.0, 12), "0");
    }

    #[test]
    fn features_with_and_without_header() {
        let a = parse_features("x,y\n1,2\n3,4\n").unwrap();
        let b = parse_features("1,2\n3,4").unwrap();
        assert_eq!(a, b);
        assert_eq!(a[(1, 0)], 3.0);
        assert!(matches!(parse_features("1,2\n3"), Err(Error::Parse { line: 2, .. }) | Err(Error::Csv(_))));
        assert!(parse_features("1,2\n3,zz").is_err());
        assert!(parse_features("").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let m = DMatrix::from_row_slice(2, 2, &[0.1, -1.0 / 7.0, 1e9, 2.5e-12]);
        let back = parse_features(&format_matrix(&m)).unwrap();
        assert!((back - &m).abs().max() <= 1e-11 * m.abs().max());
    }
}
