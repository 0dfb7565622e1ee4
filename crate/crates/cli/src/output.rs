//! CSV tables and the run manifest.

use std::path::{Path, PathBuf};

use crate::config::RunConfig;
use crate::error::CliError;

pub const SCALAR: &[&str] = &["dimension", "peak", "residual", "method"];
pub const SCALAR_PROFILE: &[&str] = &["r", "w"];
pub const GROUND: &[&str] = &[
    "energy",
    "grad_sup",
    "nehari_residual",
    "iterations",
    "converged",
    "peak_u",
    "peak_v",
];
pub const PAIR_PROFILE: &[&str] = &["x", "u", "v"];
pub const SWEEP: &[&str] = &["kappa0", "energy", "peak_u", "peak_v", "iterations", "converged"];
pub const SPECTRUM: &[&str] = &[
    "beta0",
    "kappa0",
    "w0",
    "k_indicator",
    "verdict",
    "kernel_dim",
    "sigma_min_a",
    "sigma_min_b",
    "agrees",
];
pub const EIGENVALUES: &[&str] = &["index", "eigenvalue"];
pub const BARYCENTER: &[&str] = &["component", "xi"];
pub const GAMMA: &[&str] = &["y", "t_y", "energy", "c0", "xi"];
pub const THRESHOLD: &[&str] = &["r0", "c0", "c_tilde0", "ratio_bound", "satisfied"];
pub const COMPARE: &[&str] = &[
    "lhs01",
    "rhs01",
    "crit01",
    "crit_less2",
    "crit02",
    "crit03",
    "crit04",
    "equal_components",
    "conclusion",
];
pub const BOUND: &[&str] = &["energy", "c0", "margin", "xi", "iterations", "converged"];

/// 17 significant digits.
pub fn num(x: f64) -> String {
    format!("{x:.16e}")
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: &'static [&'static str],
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: &'static [&'static str]) -> Self {
        Self {
            file,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        let path = dir.join(self.file);
        let io_err = |source: std::io::Error| CliError::Output {
            path: path.clone(),
            source,
        };
        let mut w = csv::Writer::from_path(&path).map_err(|e| io_err(e.into()))?;
        w.write_record(self.header).map_err(|e| io_err(e.into()))?;
        for row in &self.rows {
            w.write_record(row).map_err(|e| io_err(e.into()))?;
        }
        w.flush().map_err(io_err)?;
        Ok(path)
    }
}

/// Resolved config preceded by comment lines; loadable as a config.
pub fn manifest(command: &str, config: &RunConfig) -> String {
    format!(
        "# cnls {} (cnls-core {})\n# command: {command}\n{}",
        env!("CARGO_PKG_VERSION"),
        cnls_core::VERSION,
        config.to_toml()
    )
}

pub fn write_manifest(dir: &Path, command: &str, config: &RunConfig) -> Result<PathBuf, CliError> {
    let path = dir.join("manifest.toml");
    std::fs::write(&path, manifest(command, config)).map_err(|source| CliError::Output {
        path: path.clone(),
        source,
    })?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn numbers_carry_seventeen_digits() {
        assert_eq!(num(0.1), "1.0000000000000001e-1");
        assert_eq!(num(-2.0), "-2.0000000000000000e0");
        assert_eq!(num(0.1).parse::<f64>().unwrap(), 0.1);
    }

    #[test]
    fn table_writes_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let mut t = Table::new("t.csv", EIGENVALUES);
        t.push(vec!["0".into(), num(1.0)]);
        let path = t.write(dir.path()).unwrap();
        let text = std::fs::read_to_string(path).unwrap();
        assert_eq!(text, "index,eigenvalue\n0,1.0000000000000000e0\n");
    }
}
