//! Gamma-factor identity suite: five closed-form relations checked on a
//! complex grid, each reported with its worst residual.

use anyhow::{bail, Result};
use num_complex::Complex64 as C64;

use voronoi3::special::{g_delta, g_delta_integral, g_delta_ratio, gamma_c, gamma_r, log_gamma_c};
use voronoi3::util::i_pow;

use crate::report::CheckSet;

pub const IDENTITIES: [&str; 5] = [
    "duplication",
    "reflection-product",
    "closed-form-routes",
    "paired-product",
    "integral-definition",
];

/// 20 x 20 grid; real parts pushed off the integer lattice and imaginary
/// parts off the real axis, so no route touches a pole of any factor.
fn grid() -> Vec<C64> {
    let mut pts = Vec::with_capacity(400);
    for k in 0..20 {
        let re = -6.13 + 0.645 * k as f64;
        for j in 0..20 {
            let im = -4.75 + 0.5 * j as f64;
            pts.push(C64::new(re, im));
        }
    }
    pts
}

fn rel(diff: C64, reference: C64) -> f64 {
    diff.norm() / reference.norm().max(1e-300)
}

fn flip(on: bool) -> f64 {
    if on {
        -1.0
    } else {
        1.0
    }
}

/// Gamma_R(s) Gamma_R(s+1) = Gamma_C(s).
fn duplication(pts: &[C64], bug: bool) -> f64 {
    let mut worst = 0.0_f64;
    for &s in pts {
        let lhs = gamma_r(s) * gamma_r(s + C64::new(1.0, 0.0)) * flip(bug);
        let rhs = gamma_c(s);
        worst = worst.max(rel(lhs - rhs, rhs));
    }
    worst
}

/// G_d(s) G_d(1-s) = (-1)^d; the target has unit modulus, so the absolute
/// residual is the relative one.
fn reflection_product(pts: &[C64], bug: bool) -> f64 {
    let mut worst = 0.0_f64;
    for &s in pts {
        for d in 0..2u8 {
            let prod =
                g_delta(d, s).unwrap() * g_delta(d, C64::new(1.0, 0.0) - s).unwrap() * flip(bug);
            let target = C64::new(if d == 0 { 1.0 } else { -1.0 }, 0.0);
            worst = worst.max((prod - target).norm());
        }
    }
    worst
}

/// The trigonometric closed form against the gamma-ratio route.
fn closed_form_routes(pts: &[C64], bug: bool) -> f64 {
    let mut worst = 0.0_f64;
    for &s in pts {
        for d in 0..2u8 {
            let a = g_delta(d, s).unwrap();
            let b = g_delta_ratio(d, s).unwrap() * flip(bug);
            worst = worst.max(rel(a - b, a));
        }
    }
    worst
}

/// G_{d1}(s+l1) G_{d2}(s+l2) collapses to a single gamma ratio when the gap
/// m = l1 - l2 is an integer with m - 1 = d1 + d2 (mod 2).
fn paired_product(pts: &[C64], bug: bool) -> f64 {
    let cases: [(u8, u8, f64, f64); 4] = [
        (0, 0, 2.3, -0.7),
        (1, 0, 1.25, -0.75),
        (0, 1, 11.0, -11.0),
        (1, 1, 0.5, -2.5),
    ];
    let mut worst = 0.0_f64;
    for &s in pts {
        for &(d1, d2, l1, l2) in &cases {
            let m = (l1 - l2).round() as i64;
            debug_assert_eq!((m - 1).rem_euclid(2), ((d1 + d2) & 1) as i64);
            let lhs = g_delta(d1, s + C64::new(l1, 0.0)).unwrap()
                * g_delta(d2, s + C64::new(l2, 0.0)).unwrap();
            let rhs = i_pow(m + 1)
                * (log_gamma_c(s + C64::new(l1, 0.0)) - log_gamma_c(C64::new(1.0 - l2, 0.0) - s))
                    .exp()
                * flip(bug);
            worst = worst.max(rel(lhs - rhs, rhs));
        }
    }
    worst
}

/// The oscillatory-integral definition against the closed form at s = 1/2.
fn integral_definition(bug: bool) -> f64 {
    let mut worst = 0.0_f64;
    for d in 0..2u8 {
        let a = g_delta_integral(d, 0.5).unwrap() * flip(bug);
        let b = g_delta(d, C64::new(0.5, 0.0)).unwrap();
        worst = worst.max(rel(a - b, b));
    }
    worst
}

pub fn run(tol_override: Option<f64>, inject: Option<&str>) -> Result<bool> {
    if let Some(name) = inject {
        if !IDENTITIES.contains(&name) {
            bail!("--inject-sign-bug: unknown identity {name:?} (known: {})", IDENTITIES.join(", "));
        }
    }
    let bug = |name: &str| inject == Some(name);
    let pts = grid();
    let tol = |dflt: f64| tol_override.unwrap_or(dflt);

    let mut checks = CheckSet::new();
    checks.add("duplication", duplication(&pts, bug("duplication")), tol(1e-10));
    checks.add(
        "reflection-product",
        reflection_product(&pts, bug("reflection-product")),
        tol(1e-10),
    );
    checks.add(
        "closed-form-routes",
        closed_form_routes(&pts, bug("closed-form-routes")),
        tol(1e-10),
    );
    checks.add("paired-product", paired_product(&pts, bug("paired-product")), tol(1e-10));
    checks.add(
        "integral-definition",
        integral_definition(bug("integral-definition")),
        tol(1e-6),
    );
    checks.print();
    Ok(checks.passed())
}
