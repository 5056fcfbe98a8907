//! Run configuration: the JSON schema, load-time validation, and resolution
//! of the `form` block into library types.
//!
//! A config names either a shipped preset (`delta_gl2`, `sym2_delta_gl3`) or
//! an explicit rank-three form (spectral parameters, parities, and a
//! coefficient CSV). Every structural constraint the library enforces at
//! construction time is also checked at load, so a bad file fails before any
//! computation starts.

use std::env;
use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use num_complex::Complex64 as C64;
use serde::Deserialize;

use voronoi3::coefficients::{CoefficientTable, GL2Form, GL3Parameters};
use voronoi3::lfunctions::SmoothedOptions;
use voronoi3::presets;
use voronoi3::summation::TwistSpec;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub form: FormSpec,
    #[serde(default)]
    pub twists: Vec<TwistEntry>,
    #[serde(default)]
    pub test_function: Option<TestFunctionSpec>,
    #[serde(default)]
    pub contour: Option<ContourEntry>,
    #[serde(default)]
    pub truncation: Option<TruncationEntry>,
    #[serde(default)]
    pub tolerance: Option<f64>,
    #[serde(default)]
    pub lfe: Option<LfeEntry>,
    #[serde(default)]
    pub output: Option<OutputEntry>,
}

/// Either `preset` alone or the full explicit triple; mixing is rejected.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FormSpec {
    #[serde(default)]
    pub preset: Option<String>,
    /// Spectral parameters as (re, im) pairs.
    #[serde(default)]
    pub lambda: Option<[[f64; 2]; 3]>,
    #[serde(default)]
    pub delta: Option<[u8; 3]>,
    /// Coefficient table CSV (header `r,s,re,im`).
    #[serde(default)]
    pub coefficients: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TwistEntry {
    pub a: i64,
    pub c: i64,
    #[serde(default = "default_q")]
    pub q: u64,
}

fn default_q() -> u64 {
    1
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TestFunctionSpec {
    #[serde(default)]
    pub eta: u8,
    /// Decay exponent as an (re, im) pair.
    pub a: [f64; 2],
    /// One scale or a list; multi-scale runs repeat the twist sweep per scale.
    pub scale: ScaleSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ScaleSpec {
    One(f64),
    Many(Vec<f64>),
}

impl ScaleSpec {
    pub fn values(&self) -> Vec<f64> {
        match self {
            ScaleSpec::One(x) => vec![*x],
            ScaleSpec::Many(xs) => xs.clone(),
        }
    }
}

impl TestFunctionSpec {
    pub fn a_complex(&self) -> C64 {
        C64::new(self.a[0], self.a[1])
    }
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ContourEntry {
    pub sigma: f64,
    pub step: f64,
    pub height: f64,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TruncationEntry {
    pub n_max: usize,
}

/// Functional-equation sweep: moduli, evaluation points, series length.
#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct LfeEntry {
    #[serde(default)]
    pub q: Vec<u64>,
    /// Evaluation points as (re, im) pairs.
    #[serde(default)]
    pub s: Vec<[f64; 2]>,
    #[serde(default)]
    pub length: Option<usize>,
}

impl LfeEntry {
    pub fn moduli(&self) -> Vec<u64> {
        if self.q.is_empty() {
            vec![1]
        } else {
            self.q.clone()
        }
    }

    pub fn points(&self) -> Vec<C64> {
        if self.s.is_empty() {
            vec![C64::new(0.5, 0.0)]
        } else {
            self.s.iter().map(|p| C64::new(p[0], p[1])).collect()
        }
    }

    pub fn options(&self) -> SmoothedOptions {
        SmoothedOptions { length: self.length.unwrap_or(0), ..SmoothedOptions::default() }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputEntry {
    /// Override for the emitted CSV file name.
    #[serde(default)]
    pub csv: Option<String>,
    /// Override for the emitted plot script name (kernel-tab only).
    #[serde(default)]
    pub script: Option<String>,
}

/// A form block resolved into concrete library objects.
pub enum ResolvedForm {
    Rank2(GL2Form),
    Rank3 { params: GL3Parameters, table: CoefficientTable },
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .with_context(|| format!("parsing config {}", path.display()))?;
        cfg.validate()
            .with_context(|| format!("validating config {}", path.display()))?;
        Ok(cfg)
    }

    fn validate(&self) -> Result<()> {
        let f = &self.form;
        let explicit = f.lambda.is_some() || f.delta.is_some() || f.coefficients.is_some();
        match (&f.preset, explicit) {
            (Some(_), true) => {
                bail!("form: give either a preset or explicit lambda/delta/coefficients, not both")
            }
            (None, false) => bail!("form: needs a preset or explicit lambda/delta/coefficients"),
            (None, true) => {
                if f.lambda.is_none() || f.delta.is_none() || f.coefficients.is_none() {
                    bail!("form: an explicit form needs lambda, delta, and coefficients together");
                }
                // Constructing the parameters performs the library-side checks
                // (parity range, zero-sum spectral parameters).
                self.explicit_params()?;
            }
            (Some(name), false) => {
                if name != "delta_gl2" && name != "sym2_delta_gl3" {
                    bail!("form: unknown preset {name:?} (shipped: delta_gl2, sym2_delta_gl3)");
                }
            }
        }
        for (k, t) in self.twists.iter().enumerate() {
            TwistSpec::new(t.a, t.c, t.q)
                .map_err(|e| anyhow!("twists[{k}]: {e}"))?;
        }
        if let Some(tf) = &self.test_function {
            if tf.eta > 1 {
                bail!("test_function: eta must be 0 or 1");
            }
            let scales = tf.scale.values();
            if scales.is_empty() {
                bail!("test_function: scale list is empty");
            }
            for &x in &scales {
                if !(x.is_finite() && x > 0.0) {
                    bail!("test_function: scale {x} must be positive and finite");
                }
            }
        }
        if let Some(c) = &self.contour {
            c.spec()?;
        }
        if let Some(t) = &self.truncation {
            if t.n_max == 0 {
                bail!("truncation: n_max must be positive");
            }
        }
        if let Some(tol) = self.tolerance {
            if !(tol.is_finite() && tol > 0.0) {
                bail!("tolerance must be positive and finite");
            }
        }
        if let Some(l) = &self.lfe {
            for &q in &l.q {
                if q == 0 {
                    bail!("lfe: modulus 0 is not allowed");
                }
            }
            for p in &l.s {
                if !(p[0].is_finite() && p[1].is_finite()) {
                    bail!("lfe: evaluation point ({}, {}) is not finite", p[0], p[1]);
                }
            }
        }
        Ok(())
    }

    fn explicit_params(&self) -> Result<GL3Parameters> {
        let lam = self.form.lambda.as_ref().expect("validated");
        let del = self.form.delta.expect("validated");
        let lambda = [
            C64::new(lam[0][0], lam[0][1]),
            C64::new(lam[1][0], lam[1][1]),
            C64::new(lam[2][0], lam[2][1]),
        ];
        Ok(GL3Parameters::new(lambda, del)?)
    }

    /// Series/table truncation, falling back to the command's default.
    pub fn n_max(&self, default_n: usize) -> usize {
        self.truncation.map(|t| t.n_max).unwrap_or(default_n)
    }

    /// Builds the configured form at truncation `n_max(default_n)`.
    pub fn resolve_form(&self, default_n: usize) -> Result<ResolvedForm> {
        let n = self.n_max(default_n);
        match self.form.preset.as_deref() {
            Some("delta_gl2") => Ok(ResolvedForm::Rank2(GL2Form::discriminant_form(n)?)),
            Some("sym2_delta_gl3") => {
                let preset = cached_sym2(n)?;
                Ok(ResolvedForm::Rank3 { params: preset.params, table: preset.table })
            }
            Some(name) => bail!("unknown preset {name:?}"),
            None => {
                let params = self.explicit_params()?;
                let path = self.form.coefficients.as_ref().expect("validated");
                let file = fs::File::open(path)
                    .with_context(|| format!("opening coefficient file {}", path.display()))?;
                let table = CoefficientTable::from_csv(BufReader::new(file))?;
                if table.n < n {
                    bail!(
                        "coefficient file {} is truncated at {}, but the run needs {}",
                        path.display(),
                        table.n,
                        n
                    );
                }
                Ok(ResolvedForm::Rank3 { params, table })
            }
        }
    }
}

impl ContourEntry {
    pub fn spec(&self) -> Result<voronoi3::kernels::ContourSpec> {
        Ok(voronoi3::kernels::ContourSpec::new(self.sigma, self.step, self.height)?)
    }
}

/// Builds the symmetric-square preset, seeding the coefficient table from the
/// directory named by `VORONOI3_SEED_CACHE` when a matching file exists. The
/// archimedean validation always runs; only the lift itself is cached. Cache
/// write failures degrade to a rebuild next time rather than failing the run.
fn cached_sym2(n: usize) -> Result<presets::Gl3Preset> {
    let dir = match env::var_os("VORONOI3_SEED_CACHE") {
        Some(d) if !d.is_empty() => PathBuf::from(d),
        _ => return Ok(presets::sym2_delta_gl3(n)?),
    };
    let path = dir.join(format!("sym2_delta_{n}.csv"));
    if let Ok(file) = fs::File::open(&path) {
        let table = CoefficientTable::from_csv(BufReader::new(file))
            .with_context(|| format!("parsing cached table {}", path.display()))?;
        if table.n == n {
            let (params, scores) = presets::validate_archimedean(
                &table,
                12,
                presets::oracle_point(),
                &SmoothedOptions::default(),
            )?;
            return Ok(presets::Gl3Preset { params, table, scores });
        }
    }
    let preset = presets::sym2_delta_gl3(n)?;
    let write = || -> std::io::Result<()> {
        fs::create_dir_all(&dir)?;
        let mut buf = Vec::new();
        preset.table.to_csv(&mut buf)?;
        fs::write(&path, buf)
    };
    if let Err(e) = write() {
        eprintln!("warning: could not write seed cache {}: {e}", path.display());
    }
    Ok(preset)
}
