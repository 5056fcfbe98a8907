//! Coefficient emission: the configured form's coefficients as CSV.

use std::fs;
use std::io::{BufWriter, Write as _};
use std::path::Path;

use anyhow::{Context, Result};

use crate::config::{ResolvedForm, RunConfig};
use crate::report::{f17, Csv};

/// Default truncation when the config does not set one.
const DEFAULT_N: usize = 100;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let name = cfg
        .output
        .as_ref()
        .and_then(|o| o.csv.clone())
        .unwrap_or_else(|| "coeffs.csv".to_string());
    match cfg.resolve_form(DEFAULT_N)? {
        ResolvedForm::Rank2(form) => {
            let n = cfg.n_max(DEFAULT_N);
            let mut csv = Csv::new("n,re,im");
            for k in 1..=n as i64 {
                csv.row(&[k.to_string(), f17(form.coefficient(k)), f17(0.0)]);
            }
            let path = csv.write(out, &name)?;
            println!("wrote {} coefficient rows to {}", csv.rows(), path.display());
        }
        ResolvedForm::Rank3 { table, .. } => {
            fs::create_dir_all(out)
                .with_context(|| format!("creating output directory {}", out.display()))?;
            let path = out.join(&name);
            let file = fs::File::create(&path)
                .with_context(|| format!("writing {}", path.display()))?;
            let mut w = BufWriter::new(file);
            table.to_csv(&mut w)?;
            w.flush()?;
            println!("wrote {} x {} coefficient table to {}", table.n, table.n, path.display());
        }
    }
    Ok(true)
}
