//! Exponential-sum identity suite: Kloosterman symmetry, the Ramanujan
//! closed form, and the Gauss-sum relations over all primitive characters.

use anyhow::Result;
use num_complex::Complex64 as C64;

use voronoi3::arithmetic::{kloosterman, ramanujan_sum_closed, DirichletGroup};
use voronoi3::util::e_of;

use crate::report::CheckSet;

/// S(n,m;c) = S(m,n;c) for n,m <= 10, c <= 50 (absolute residual; the sums
/// are O(c) phases, so round-off sits near 1e-13).
fn kloosterman_symmetry() -> f64 {
    let mut worst = 0.0_f64;
    for c in 1..=50u64 {
        for n in 1..=10i64 {
            for m in 1..=n {
                worst = worst.max((kloosterman(n, m, c) - kloosterman(m, n, c)).abs());
            }
        }
    }
    worst
}

/// S(0,k;c) equals the Moebius/divisor closed form of the Ramanujan sum.
fn ramanujan_closed_form() -> f64 {
    let mut worst = 0.0_f64;
    for c in 1..=50u64 {
        for k in -10..=10i64 {
            let literal = kloosterman(0, k, c);
            let closed = ramanujan_sum_closed(k, c) as f64;
            worst = worst.max((literal - closed).abs());
        }
    }
    worst
}

/// Conjugation relations for primitive chi: chi(-1) g_chibar = conj(g_chi)
/// and |g_chi|^2 = q.
fn gauss_conjugation(max_q: u64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for q in 1..=max_q {
        let group = DirichletGroup::new(q)?;
        for chi in group.characters()? {
            if !chi.is_primitive() {
                continue;
            }
            let g = chi.gauss_sum();
            let gbar = chi.conjugate().gauss_sum();
            worst = worst.max((chi.value(-1) * gbar - g.conj()).norm());
            worst = worst.max(((g * g.conj()).re - q as f64).abs() / q as f64);
        }
    }
    Ok(worst)
}

/// Twisted sums: sum_k chi(k) e(nk/q) = chibar(n) g_chi for every residue n.
fn gauss_twisted_sum(max_q: u64) -> Result<f64> {
    let mut worst = 0.0_f64;
    for q in 1..=max_q {
        let group = DirichletGroup::new(q)?;
        for chi in group.characters()? {
            if !chi.is_primitive() {
                continue;
            }
            let g = chi.gauss_sum();
            let chibar = chi.conjugate();
            for n in 0..q as i64 {
                let mut lhs = C64::new(0.0, 0.0);
                for k in 0..q as i64 {
                    lhs += chi.value(k) * e_of((n * k) as f64 / q as f64);
                }
                worst = worst.max((lhs - chibar.value(n) * g).norm());
            }
        }
    }
    Ok(worst)
}

pub fn run(tol_override: Option<f64>) -> Result<bool> {
    let tol = tol_override.unwrap_or(1e-10);
    let mut checks = CheckSet::new();
    checks.add("kloosterman-symmetry", kloosterman_symmetry(), tol);
    checks.add("ramanujan-closed-form", ramanujan_closed_form(), tol);
    checks.add("gauss-conjugation", gauss_conjugation(30)?, tol);
    checks.add("gauss-twisted-sum", gauss_twisted_sum(30)?, tol);
    checks.print();
    Ok(checks.passed())
}
