//! Mutual-inductance matrix files.
//!
//! A `units = <unit>` header precedes one row per line of
//! whitespace-separated entries:
//!
//! ```text
//! units = pH
//! 120  6  1
//!   5 95  4
//!   1  7 118
//! ```

use mwgate::Mutuals;

use crate::config::ConfigError;

const UNITS: [(&str, f64); 4] = [("H", 1.0), ("nH", 1e-9), ("pH", 1e-12), ("Wb/A", 1.0)];

/// Reads a square matrix and converts it to webers per ampere.
pub fn parse_matrix(text: &str) -> Result<Mutuals, ConfigError> {
    let mut factor = None;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let line = k + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if factor.is_none() {
            let (key, unit) = content.split_once('=').ok_or(ConfigError::Syntax { line })?;
            if key.trim() != "units" {
                return Err(ConfigError::Invalid(format!("line {line}: the matrix must start with `units = ...`")));
            }
            let unit = unit.trim();
            let listing = UNITS.iter().map(|(u, _)| *u).collect::<Vec<_>>().join(", ");
            factor = Some(UNITS.iter().find(|(u, _)| *u == unit).map(|(_, f)| *f).ok_or_else(|| {
                ConfigError::BadUnit { line, key: "units".into(), unit: unit.into(), expected: listing }
            })?);
            continue;
        }
        let row = content
            .split_whitespace()
            .map(|t| {
                t.parse::<f64>().ok().filter(|v| v.is_finite()).ok_or_else(|| ConfigError::BadValue {
                    line,
                    key: "matrix".into(),
                    text: t.into(),
                })
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    let factor = factor.ok_or_else(|| ConfigError::Invalid("matrix file is empty".into()))?;
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(ConfigError::Invalid(format!("matrix must be square, got {n} rows of unequal or wrong length")));
    }
    let entries: Vec<f64> = rows.into_iter().flatten().map(|v| v * factor).collect();
    Mutuals::from_row_major(n, &entries).map_err(|e| ConfigError::Invalid(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reads_units_and_rows() {
        let m = parse_matrix("# synthetic\nunits = pH\n100 5\n4 90\n").unwrap();
        assert_eq!(m.size(), 2);
        assert!((m.get(0, 1) - 5e-12).abs() < 1e-24);
        assert!((m.get(1, 1) - 90e-12).abs() < 1e-24);
    }

    #[test]
    fn rejects_malformed_files() {
        assert!(parse_matrix("100 5\n4 90\n").is_err());
        assert!(parse_matrix("units = furlong\n1").is_err());
        assert!(parse_matrix("units = pH\n1 2\n3\n").is_err());
        assert!(parse_matrix("units = pH\n").is_err());
        assert!(parse_matrix("units = pH\n1 x\n3 4\n").is_err());
    }
}
