//! Output helpers: fixed-precision CSV emission and per-check summary lines.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};

/// 17 significant digits: round-trips every f64 exactly and, unlike
/// shortest-representation printing, never changes shape between runs.
pub fn f17(x: f64) -> String {
    format!("{x:.16e}")
}

/// An in-memory CSV with a fixed header; written with `\n` endings.
pub struct Csv {
    header: &'static str,
    columns: usize,
    lines: Vec<String>,
}

impl Csv {
    pub fn new(header: &'static str) -> Csv {
        Csv { header, columns: header.split(',').count(), lines: Vec::new() }
    }

    pub fn row(&mut self, fields: &[String]) {
        debug_assert_eq!(fields.len(), self.columns, "row width mismatch");
        self.lines.push(fields.join(","));
    }

    pub fn rows(&self) -> usize {
        self.lines.len()
    }

    pub fn write(&self, dir: &Path, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(dir)
            .with_context(|| format!("creating output directory {}", dir.display()))?;
        let mut text = String::with_capacity(32 * (self.lines.len() + 1));
        let _ = writeln!(text, "{}", self.header);
        for line in &self.lines {
            let _ = writeln!(text, "{line}");
        }
        let path = dir.join(name);
        fs::write(&path, text).with_context(|| format!("writing {}", path.display()))?;
        Ok(path)
    }
}

struct CheckLine {
    name: &'static str,
    worst: f64,
    tol: f64,
}

/// Named residual checks with one printed line each; `passed` is the AND.
pub struct CheckSet {
    lines: Vec<CheckLine>,
}

impl CheckSet {
    pub fn new() -> CheckSet {
        CheckSet { lines: Vec::new() }
    }

    pub fn add(&mut self, name: &'static str, worst: f64, tol: f64) {
        self.lines.push(CheckLine { name, worst, tol });
    }

    pub fn passed(&self) -> bool {
        self.lines.iter().all(|l| l.worst <= l.tol)
    }

    pub fn print(&self) {
        for l in &self.lines {
            let verdict = if l.worst <= l.tol { "PASS" } else { "FAIL" };
            println!(
                "{:<24} max residual {:>12.4e}  tol {:>8.1e}  {verdict}",
                l.name, l.worst, l.tol
            );
        }
    }
}
