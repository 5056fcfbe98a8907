//! Two-sided assembly of the summation identities: an additively twisted sum
//! of coefficients against a test function on one side, a dual sum of
//! coefficients against the kernel-transformed test function on the other,
//! weighted by exponentials, Kloosterman sums, or Ramanujan sums.
//!
//! Everything here is deterministic: terms are enumerated with |n| increasing
//! and n > 0 before n < 0 (outer divisor ascending on the rank-three dual
//! side), phases are reduced in exact integer arithmetic before any floating
//! evaluation, and accumulation is pairwise. Reruns are bit-identical, also
//! across thread counts: threads only split the kernel-evaluation grid, and
//! each grid value depends on its argument alone.

use std::collections::BTreeMap;

use crate::arithmetic::{divisors, inv_mod, kloosterman, ramanujan_sum_closed};
use crate::coefficients::{CoefficientTable, GL2Form, GL3Parameters};
use crate::error::{Error, Result};
use crate::kernels::{KernelFunction, KernelValue, TestFunction};
use crate::util::{e_of, pairwise_sum};
use crate::C64;

/// Tolerance for recognizing an exponent difference as a nonnegative integer
/// in the admissibility checks.
const INT_TOL: f64 = 1e-9;

/// Additive twist data: the direct side carries phases e(-na/c), the dual
/// side phases e(n abar / c) or Kloosterman sums S(q abar, n; qc/d), and q is
/// the fixed first index of the direct-side coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TwistSpec {
    pub a: i64,
    pub c: i64,
    pub q: u64,
    pub abar: i64,
}

impl TwistSpec {
    /// Builds a twist, computing the least nonnegative inverse of a mod |c|.
    pub fn new(a: i64, c: i64, q: u64) -> Result<Self> {
        if c == 0 {
            return Err(Error::Invalid("twist modulus c must be nonzero".into()));
        }
        if q == 0 {
            return Err(Error::Invalid("twist index q must be positive".into()));
        }
        let abar = inv_mod(a, c.unsigned_abs())
            .ok_or_else(|| Error::Invalid(format!("a = {a} is not a unit mod {c}")))?;
        Ok(TwistSpec { a, c, q, abar: abar as i64 })
    }

    /// Uses a caller-chosen inverse; any abar with a·abar ≡ 1 (mod c) is
    /// accepted, and the assembled sums do not depend on the choice.
    pub fn with_abar(a: i64, c: i64, q: u64, abar: i64) -> Result<Self> {
        let base = TwistSpec::new(a, c, q)?;
        let m = c.unsigned_abs() as i128;
        if (a as i128 * abar as i128 - 1).rem_euclid(m) != 0 {
            return Err(Error::Invalid(format!(
                "abar = {abar} is not an inverse of {a} mod {c}"
            )));
        }
        Ok(TwistSpec { abar, ..base })
    }
}

/// One truncated side of an identity.
#[derive(Debug, Clone, Copy)]
pub struct SideSum {
    pub value: C64,
    /// Conservative bound on the dropped tail, from [`tail_estimate`].
    pub tail: f64,
    /// Number of enumerated terms, zero coefficients included.
    pub terms: usize,
    /// Accumulated kernel quadrature error bound (zero on the direct side).
    pub kernel_err: f64,
}

/// Two-sided comparison. `tail_estimate` is the total numerical budget:
/// both truncation tails plus the accumulated kernel quadrature bound.
#[derive(Debug, Clone, Copy)]
pub struct VoronoiReport {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    pub lhs_terms: usize,
    pub rhs_terms: usize,
    pub tail_estimate: f64,
}

fn report(lhs: SideSum, rhs: SideSum) -> VoronoiReport {
    VoronoiReport {
        lhs: lhs.value,
        rhs: rhs.value,
        residual: (lhs.value - rhs.value).norm(),
        lhs_terms: lhs.terms,
        rhs_terms: rhs.terms,
        tail_estimate: lhs.tail + rhs.tail + lhs.kernel_err + rhs.kernel_err,
    }
}

/// e(num/den), reduced exactly in integers first. The sign of den folds into
/// the numerator, so equal residues give bit-identical phases and the phase
/// is exact for shifts of the numerator by multiples of den.
fn e_frac(num: i128, den: i64) -> C64 {
    debug_assert!(den != 0);
    let m = den.unsigned_abs() as i128;
    let k = (num * den.signum() as i128).rem_euclid(m);
    e_of(k as f64 / m as f64)
}

/// Conservative tail bound from a magnitude profile in summation order.
///
/// The last two equal windows give maxima M1, M2 and a per-term decay ratio
/// r = (M2/M1)^(1/w); the bound is 4 M2 r/(1-r). For profiles whose local
/// ratio decreases (Gaussian or kernel decay), the window ratio dominates
/// every later ratio, so the geometric extrapolation bounds the true tail;
/// the factor 4 absorbs coefficient noise. A profile with no visible decay
/// gets a large penalty bound rather than a pretend-small one.
pub fn tail_estimate(magnitudes: &[f64]) -> f64 {
    let n = magnitudes.len();
    if n < 8 {
        return f64::INFINITY;
    }
    let w = (n / 4).clamp(2, 48);
    let m2 = magnitudes[n - w..].iter().cloned().fold(0.0, f64::max);
    let m1 = magnitudes[n - 2 * w..n - w].iter().cloned().fold(0.0, f64::max);
    if m2 == 0.0 {
        return 0.0;
    }
    if m1 == 0.0 {
        return m2 * 1e6;
    }
    let r = (m2 / m1).powf(1.0 / w as f64);
    if r >= 0.98 {
        return m2 * w as f64 * 50.0;
    }
    4.0 * m2 * r / (1.0 - r)
}

fn finish_side(terms: Vec<C64>, kernel_err: f64) -> SideSum {
    let mags: Vec<f64> = terms.iter().map(|t| t.norm()).collect();
    SideSum {
        value: pairwise_sum(&terms),
        tail: tail_estimate(&mags),
        terms: terms.len(),
        kernel_err,
    }
}

fn require_integer_parity(z: C64, parity: u8, what: &str) -> Result<()> {
    let k = z.re.round();
    if z.im.abs() > INT_TOL || (z.re - k).abs() > INT_TOL || k < -0.5 {
        return Err(Error::Inadmissible(format!(
            "{what} = {z} must be a nonnegative integer"
        )));
    }
    if (k as i64).rem_euclid(2) != (parity % 2) as i64 {
        return Err(Error::Inadmissible(format!(
            "{what} = {z} has the wrong parity for eta"
        )));
    }
    Ok(())
}

/// Rank-two admissibility: |x|^nu f(x) must extend to a Schwartz function,
/// i.e. a + nu is a nonnegative integer whose parity matches f's sign
/// character.
pub fn require_gl2_admissible(f: &TestFunction, nu: C64) -> Result<()> {
    require_integer_parity(f.a + nu, f.eta, "a + nu")
}

/// Rank-three admissibility: (sg x)^{delta_3} |x|^{-lambda_3} f(x) must
/// extend to a Schwartz function.
pub fn require_gl3_admissible(f: &TestFunction, params: &GL3Parameters) -> Result<()> {
    require_integer_parity(
        f.a - params.lambda[2],
        f.eta + params.delta[2],
        "a - lambda_3",
    )
}

fn require_coefficients(form: &GL2Form, n_max: usize) -> Result<()> {
    if form.coefficients.len() <= n_max {
        return Err(Error::Invalid(format!(
            "form provides coefficients up to {}, need {n_max}",
            form.coefficients.len().saturating_sub(1)
        )));
    }
    Ok(())
}

fn require_kernel_parity(kernel: &KernelFunction, f: &TestFunction) -> Result<()> {
    if kernel.eta != f.eta {
        return Err(Error::Invalid(format!(
            "kernel parity {} does not match test function parity {}",
            kernel.eta, f.eta
        )));
    }
    Ok(())
}

/// Evaluates the kernel on every distinct argument, keyed by the argument's
/// bit pattern. Threads split the grid; each value depends only on its
/// argument, so the map contents are bit-identical for every thread count.
fn kernel_grid(kernel: &KernelFunction, args: &[f64], threads: usize) -> BTreeMap<u64, KernelValue> {
    let mut distinct: Vec<f64> = Vec::with_capacity(args.len());
    {
        let mut seen = std::collections::BTreeSet::new();
        for &x in args {
            if seen.insert(x.to_bits()) {
                distinct.push(x);
            }
        }
    }
    let mut out = BTreeMap::new();
    if distinct.is_empty() {
        return out;
    }
    let t = threads.max(1).min(distinct.len());
    let chunk = distinct.len().div_ceil(t);
    std::thread::scope(|scope| {
        let handles: Vec<_> = distinct
            .chunks(chunk)
            .map(|ch| scope.spawn(move || ch.iter().map(|&x| (x.to_bits(), kernel.eval(x))).collect::<Vec<_>>()))
            .collect();
        for h in handles {
            for (k, v) in h.join().expect("kernel evaluation panicked") {
                out.insert(k, v);
            }
        }
    });
    out
}

/// Signed index stream 1, -1, 2, -2, ... up to |n| = n_max.
fn signed_indices(n_max: usize) -> impl Iterator<Item = i64> {
    (1..=n_max as i64).flat_map(|n| [n, -n])
}

/// Direct side of the rank-two identity:
/// sum over 0 < |n| <= n_max of a_n e(-na/c) f(n).
pub fn gl2_lhs(
    form: &GL2Form,
    twist: &TwistSpec,
    f: &TestFunction,
    n_max: usize,
) -> Result<SideSum> {
    require_gl2_admissible(f, form.nu())?;
    require_coefficients(form, n_max)?;
    let mut terms = Vec::with_capacity(2 * n_max);
    for sn in signed_indices(n_max) {
        let an = form.coefficient(sn);
        let term = if an == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            an * e_frac(-(sn as i128) * twist.a as i128, twist.c) * f.eval(sn as f64)
        };
        terms.push(term);
    }
    Ok(finish_side(terms, 0.0))
}

/// Dual side of the rank-two identity:
/// |c| · sum over 0 < |n| <= n_max of (a_n/|n|) e(n abar / c) F(n/c²).
/// The kernel must be built from the same test function; its parity is
/// checked against f.
pub fn gl2_rhs(
    form: &GL2Form,
    twist: &TwistSpec,
    f: &TestFunction,
    kernel: &KernelFunction,
    n_max: usize,
    threads: usize,
) -> Result<SideSum> {
    require_gl2_admissible(f, form.nu())?;
    require_kernel_parity(kernel, f)?;
    require_coefficients(form, n_max)?;
    let c2 = (twist.c as f64) * (twist.c as f64);
    let cabs = twist.c.unsigned_abs() as f64;
    let args: Vec<f64> = signed_indices(n_max)
        .filter(|&sn| form.coefficient(sn) != 0.0)
        .map(|sn| sn as f64 / c2)
        .collect();
    let grid = kernel_grid(kernel, &args, threads);
    let mut terms = Vec::with_capacity(2 * n_max);
    let mut kernel_err = 0.0;
    for sn in signed_indices(n_max) {
        let an = form.coefficient(sn);
        let term = if an == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let x = sn as f64 / c2;
            let kv = grid[&x.to_bits()];
            let weight = cabs * an / sn.unsigned_abs() as f64;
            kernel_err += weight.abs() * kv.abs_err_est;
            weight * e_frac(sn as i128 * twist.abar as i128, twist.c) * kv.value
        };
        terms.push(term);
    }
    Ok(finish_side(terms, kernel_err))
}

/// Both rank-two sides with an explicit kernel and thread count.
pub fn gl2_voronoi_with(
    form: &GL2Form,
    twist: &TwistSpec,
    f: &TestFunction,
    kernel: &KernelFunction,
    n_max: usize,
    threads: usize,
) -> Result<VoronoiReport> {
    let lhs = gl2_lhs(form, twist, f, n_max)?;
    let rhs = gl2_rhs(form, twist, f, kernel, n_max, threads)?;
    Ok(report(lhs, rhs))
}

/// Both rank-two sides; the kernel is built from the form's spectral
/// parameter and the test function on an automatically placed contour.
pub fn gl2_voronoi(
    form: &GL2Form,
    twist: &TwistSpec,
    f: &TestFunction,
    n_max: usize,
) -> Result<VoronoiReport> {
    let kernel = KernelFunction::gl2_auto(form.nu(), f.eta, f)?;
    gl2_voronoi_with(form, twist, f, &kernel, n_max, 1)
}

/// Direct side of the rank-three identity:
/// sum over 0 < |n| <= n_max of a_{q,n} e(-na/c) f(n).
pub fn gl3_lhs(
    table: &CoefficientTable,
    params: &GL3Parameters,
    twist: &TwistSpec,
    f: &TestFunction,
    n_max: usize,
) -> Result<SideSum> {
    require_gl3_admissible(f, params)?;
    if table.n < n_max || (table.n as u64) < twist.q {
        return Err(Error::Invalid(format!(
            "coefficient table truncated at {}, need {} and q = {}",
            table.n, n_max, twist.q
        )));
    }
    let mut terms = Vec::with_capacity(2 * n_max);
    for sn in signed_indices(n_max) {
        let a = table.a(twist.q as i64, sn);
        let term = if a == C64::new(0.0, 0.0) {
            a
        } else {
            a * e_frac(-(sn as i128) * twist.a as i128, twist.c) * f.eval(sn as f64)
        };
        terms.push(term);
    }
    Ok(finish_side(terms, 0.0))
}

/// Dual side of the rank-three identity:
/// sum over d | cq of |c/d| · sum over 0 < |n| <= n_max of
/// (a_{n,d}/|n|) S(q abar, n; qc/d) F(n d² / (c³ q)).
/// Divisors ascend; within a divisor the n-order matches the direct side.
pub fn gl3_rhs(
    table: &CoefficientTable,
    params: &GL3Parameters,
    twist: &TwistSpec,
    f: &TestFunction,
    kernel: &KernelFunction,
    n_max: usize,
    threads: usize,
) -> Result<SideSum> {
    require_gl3_admissible(f, params)?;
    require_kernel_parity(kernel, f)?;
    let cq = twist.c.unsigned_abs() * twist.q;
    if table.n < n_max || (table.n as u64) < cq {
        return Err(Error::Invalid(format!(
            "coefficient table truncated at {}, need {} and divisors up to {}",
            table.n, n_max, cq
        )));
    }
    let denom = (twist.c as i128).pow(3) * twist.q as i128;
    let denom_f = denom as f64;
    let divs = divisors(cq);

    let mut args = Vec::with_capacity(divs.len() * 2 * n_max);
    for &d in &divs {
        let d2 = (d * d) as f64;
        for sn in signed_indices(n_max) {
            if table.a(sn, d as i64) != C64::new(0.0, 0.0) {
                args.push(sn as f64 * d2 / denom_f);
            }
        }
    }
    let grid = kernel_grid(kernel, &args, threads);

    let mut terms = Vec::with_capacity(divs.len() * 2 * n_max);
    let mut kernel_err = 0.0;
    for &d in &divs {
        let modulus = twist.q * twist.c.unsigned_abs() / d;
        let prefactor = twist.c.unsigned_abs() as f64 / d as f64;
        let d2 = (d * d) as f64;
        for sn in signed_indices(n_max) {
            let a = table.a(sn, d as i64);
            let term = if a == C64::new(0.0, 0.0) {
                a
            } else {
                let s = kloosterman(twist.q as i64 * twist.abar, sn, modulus);
                let x = sn as f64 * d2 / denom_f;
                let kv = grid[&x.to_bits()];
                let weight = prefactor * s / sn.unsigned_abs() as f64;
                kernel_err += weight.abs() * a.norm() * kv.abs_err_est;
                weight * a * kv.value
            };
            terms.push(term);
        }
    }
    Ok(finish_side(terms, kernel_err))
}

/// Both rank-three sides with an explicit kernel and thread count.
pub fn gl3_voronoi_with(
    table: &CoefficientTable,
    params: &GL3Parameters,
    twist: &TwistSpec,
    f: &TestFunction,
    kernel: &KernelFunction,
    n_max: usize,
    threads: usize,
) -> Result<VoronoiReport> {
    let lhs = gl3_lhs(table, params, twist, f, n_max)?;
    let rhs = gl3_rhs(table, params, twist, f, kernel, n_max, threads)?;
    Ok(report(lhs, rhs))
}

/// Both rank-three sides; the kernel is built from params and the test
/// function on an automatically placed contour.
pub fn gl3_voronoi(
    table: &CoefficientTable,
    params: &GL3Parameters,
    twist: &TwistSpec,
    f: &TestFunction,
    n_max: usize,
) -> Result<VoronoiReport> {
    let kernel = KernelFunction::gl3_auto(params, f.eta, f)?;
    gl3_voronoi_with(table, params, twist, f, &kernel, n_max, 1)
}

/// Kloosterman-weighted pair: the direct assembly
/// sum of a_n f(n) S(n,k;c) and its dual
/// |c| · sum of (a_n/|n|) F(n/c²) r_c(k-n), with the Ramanujan factor from
/// the exact divisor closed form. Both sides are returned for comparison.
pub fn kloosterman_weighted_sum(
    form: &GL2Form,
    k: i64,
    c: i64,
    f: &TestFunction,
    n_max: usize,
) -> Result<(C64, C64)> {
    if c == 0 {
        return Err(Error::Invalid("modulus c must be nonzero".into()));
    }
    require_gl2_admissible(f, form.nu())?;
    require_coefficients(form, n_max)?;
    let cabs = c.unsigned_abs();
    let kernel = KernelFunction::gl2_auto(form.nu(), f.eta, f)?;
    let c2 = (c as f64) * (c as f64);

    let mut direct = Vec::with_capacity(2 * n_max);
    for sn in signed_indices(n_max) {
        let an = form.coefficient(sn);
        direct.push(if an == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            C64::new(an * f.eval(sn as f64).re, 0.0) * kloosterman(sn, k, cabs)
        });
    }

    let args: Vec<f64> = signed_indices(n_max)
        .filter(|&sn| form.coefficient(sn) != 0.0)
        .map(|sn| sn as f64 / c2)
        .collect();
    let grid = kernel_grid(&kernel, &args, 1);
    let mut dual = Vec::with_capacity(2 * n_max);
    for sn in signed_indices(n_max) {
        let an = form.coefficient(sn);
        dual.push(if an == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let r = ramanujan_sum_closed(k - sn, cabs) as f64;
            let kv = grid[&(sn as f64 / c2).to_bits()];
            (cabs as f64 * an / sn.unsigned_abs() as f64 * r) * kv.value
        });
    }
    Ok((pairwise_sum(&direct), pairwise_sum(&dual)))
}
