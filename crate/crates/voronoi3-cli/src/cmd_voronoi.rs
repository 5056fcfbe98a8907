//! Two-sided summation verification: every configured twist (times every
//! test-function scale) gets an lhs row and an rhs row in the report CSV.

use std::path::Path;

use anyhow::{anyhow, bail, Result};

use voronoi3::kernels::{make_test_function, KernelFunction, TestFunction};
use voronoi3::summation::{gl2_voronoi_with, gl3_voronoi_with, TwistSpec, VoronoiReport};

use crate::config::{ResolvedForm, RunConfig, TwistEntry};
use crate::report::{f17, Csv};

const DEFAULT_N: usize = 600;
const DEFAULT_TOL: f64 = 1e-5;

fn push_rows(csv: &mut Csv, t: &TwistEntry, rep: &VoronoiReport) {
    let res = f17(rep.residual);
    let tail = f17(rep.tail_estimate);
    csv.row(&[
        "lhs".into(),
        t.a.to_string(),
        t.c.to_string(),
        t.q.to_string(),
        f17(rep.lhs.re),
        f17(rep.lhs.im),
        res.clone(),
        tail.clone(),
        rep.lhs_terms.to_string(),
    ]);
    csv.row(&[
        "rhs".into(),
        t.a.to_string(),
        t.c.to_string(),
        t.q.to_string(),
        f17(rep.rhs.re),
        f17(rep.rhs.im),
        res,
        tail,
        rep.rhs_terms.to_string(),
    ]);
}

pub fn run(cfg: &RunConfig, out: &Path, tol_flag: Option<f64>, threads: usize) -> Result<bool> {
    let tol = tol_flag.or(cfg.tolerance).unwrap_or(DEFAULT_TOL);
    let tf = cfg
        .test_function
        .as_ref()
        .ok_or_else(|| anyhow!("voronoi-verify needs a test_function block in the config"))?;
    let scales = tf.scale.values();
    let n_max = cfg.n_max(DEFAULT_N);
    let mut csv = Csv::new("side,a,c,q,re,im,residual,tail,terms");
    let mut worst = 0.0_f64;

    match cfg.resolve_form(DEFAULT_N)? {
        ResolvedForm::Rank2(form) => {
            for &scale in &scales {
                let f: TestFunction = make_test_function(tf.eta, tf.a_complex(), scale)?;
                let kernel = match &cfg.contour {
                    Some(c) => KernelFunction::gl2(form.nu(), tf.eta, &f, &c.spec()?)?,
                    None => KernelFunction::gl2_auto(form.nu(), tf.eta, &f)?,
                };
                for t in &cfg.twists {
                    if t.q != 1 {
                        bail!(
                            "twist ({}, {}, {}): the rank-two identity has no q index; use q = 1",
                            t.a,
                            t.c,
                            t.q
                        );
                    }
                    let twist = TwistSpec::new(t.a, t.c, 1)?;
                    let rep = gl2_voronoi_with(&form, &twist, &f, &kernel, n_max, threads)?;
                    push_rows(&mut csv, t, &rep);
                    worst = worst.max(rep.residual);
                }
            }
        }
        ResolvedForm::Rank3 { params, table } => {
            for &scale in &scales {
                let f: TestFunction = make_test_function(tf.eta, tf.a_complex(), scale)?;
                let kernel = match &cfg.contour {
                    Some(c) => KernelFunction::gl3(&params, tf.eta, &f, &c.spec()?)?,
                    None => KernelFunction::gl3_auto(&params, tf.eta, &f)?,
                };
                for t in &cfg.twists {
                    let twist = TwistSpec::new(t.a, t.c, t.q)?;
                    let rep = gl3_voronoi_with(&table, &params, &twist, &f, &kernel, n_max, threads)?;
                    push_rows(&mut csv, t, &rep);
                    worst = worst.max(rep.residual);
                }
            }
        }
    }

    let name = cfg
        .output
        .as_ref()
        .and_then(|o| o.csv.clone())
        .unwrap_or_else(|| "voronoi_verify.csv".to_string());
    let path = csv.write(out, &name)?;
    let pass = worst <= tol;
    println!("wrote {} rows to {}", csv.rows(), path.display());
    println!(
        "worst residual {:.4e} against tolerance {:.1e}: {}",
        worst,
        tol,
        if pass { "PASS" } else { "FAIL" }
    );
    Ok(pass)
}
