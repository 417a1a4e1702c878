//! CSV emission with a fixed header per file and 17 significant digits.

use std::fs;
use std::path::{Path, PathBuf};

use crate::error::CliError;

/// Formats a number so that it reads back to the same `f64`.
pub fn num(v: f64) -> String {
    format!("{v:.16e}")
}

/// Creates `dir` if needed and returns the path of `name` inside it.
pub fn output_path(dir: &Path, name: &str) -> Result<PathBuf, CliError> {
    fs::create_dir_all(dir)
        .map_err(|e| CliError::Computation(format!("cannot create output directory {}: {e}", dir.display())))?;
    Ok(dir.join(name))
}

/// Writes `rows` under `header` to `dir/name` and returns the path.
pub fn write_csv(dir: &Path, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<PathBuf, CliError> {
    let path = output_path(dir, name)?;
    let mut w = csv::Writer::from_path(&path)?;
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    w.flush().map_err(|e| CliError::Computation(format!("writing {}: {e}", path.display())))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_round_trip() {
        for v in [0.1, -2.0 / 3.0, 1e-300, 6.02214076e23, 0.0] {
            assert_eq!(num(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(num(0.5), "5.0000000000000000e-1");
    }
}
