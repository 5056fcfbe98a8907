//! Kernel tabulation: the dual-side transform F on a logarithmic grid, plus
//! a gnuplot script that renders the table.

use std::fs;
use std::path::Path;

use anyhow::{anyhow, Context, Result};

use voronoi3::kernels::{make_test_function, KernelFunction};

use crate::config::{ResolvedForm, RunConfig};
use crate::report::{f17, Csv};

/// Truncation only matters for form construction here; the kernel needs the
/// spectral data, not the coefficients.
const DEFAULT_N: usize = 64;

pub fn run(cfg: &RunConfig, out: &Path) -> Result<bool> {
    let tf = cfg
        .test_function
        .as_ref()
        .ok_or_else(|| anyhow!("kernel-tab needs a test_function block in the config"))?;
    // Multi-scale configs tabulate the first scale.
    let scale = tf.scale.values()[0];
    let f = make_test_function(tf.eta, tf.a_complex(), scale)?;
    let kernel = match cfg.resolve_form(DEFAULT_N)? {
        ResolvedForm::Rank2(form) => match &cfg.contour {
            Some(c) => KernelFunction::gl2(form.nu(), tf.eta, &f, &c.spec()?)?,
            None => KernelFunction::gl2_auto(form.nu(), tf.eta, &f)?,
        },
        ResolvedForm::Rank3 { params, .. } => match &cfg.contour {
            Some(c) => KernelFunction::gl3(&params, tf.eta, &f, &c.spec()?)?,
            None => KernelFunction::gl3_auto(&params, tf.eta, &f)?,
        },
    };

    // 81 log-spaced points covering 1e-4 .. 10.
    let mut csv = Csv::new("x,re_F,im_F,abs_err_est");
    for k in 0..=80 {
        let x = 10f64.powf(-4.0 + k as f64 / 16.0);
        let kv = kernel.eval(x);
        csv.row(&[f17(x), f17(kv.value.re), f17(kv.value.im), f17(kv.abs_err_est)]);
    }
    let csv_name = cfg
        .output
        .as_ref()
        .and_then(|o| o.csv.clone())
        .unwrap_or_else(|| "kernel_tab.csv".to_string());
    let path = csv.write(out, &csv_name)?;

    let script_name = cfg
        .output
        .as_ref()
        .and_then(|o| o.script.clone())
        .unwrap_or_else(|| "kernel_tab.gnuplot".to_string());
    let script = format!(
        "set datafile separator \",\"\n\
         set logscale x\n\
         set xlabel \"x\"\n\
         set ylabel \"F(x)\"\n\
         set key left top\n\
         plot \"{csv_name}\" every ::1 using 1:2 with lines title \"Re F\", \\\n\
              \"{csv_name}\" every ::1 using 1:3 with lines title \"Im F\"\n"
    );
    let script_path = out.join(&script_name);
    fs::write(&script_path, script)
        .with_context(|| format!("writing {}", script_path.display()))?;

    println!("wrote {} kernel samples to {}", csv.rows(), path.display());
    println!("wrote plot script to {}", script_path.display());
    Ok(true)
}
