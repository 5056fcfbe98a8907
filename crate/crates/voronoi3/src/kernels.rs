//! Kernel transforms: the weight function on the dual side of a summation
//! formula is a vertical-line Mellin integral of a product of shifted Gamma
//! factors against the test function's Mellin transform. This module builds
//! those kernels for rank two and rank three, evaluates them with paired
//! coarse/fine node sets for running error estimates, and classifies their
//! behavior near the origin.

use crate::coefficients::GL3Parameters;
use crate::error::{Error, Result};
use crate::special::{g_delta, g_pole_zero_order, gamma_r, log_gamma};
use crate::util::{i_pow, neg_one_pow, pairwise_sum, pow_real};
use crate::C64;
use std::f64::consts::PI;

const ALIGN_TOL: f64 = 1e-9;
const GUARD_TOL: f64 = 1e-6;

/// Parity-homogeneous Gaussian test function
/// f(x) = (sg x)^eta |x|^a exp(-pi (x/scale)^2).
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub eta: u8,
    pub a: C64,
    pub scale: f64,
}

/// Builds the Gaussian family member, checking integrability at the origin.
pub fn make_test_function(eta: u8, a: C64, scale: f64) -> Result<TestFunction> {
    if a.re <= -1.0 {
        return Err(Error::Invalid(format!(
            "exponent must satisfy Re a > -1 for integrability, got {a}"
        )));
    }
    if !(scale.is_finite() && scale > 0.0) {
        return Err(Error::Invalid(format!("scale must be positive, got {scale}")));
    }
    Ok(TestFunction { eta: eta & 1, a, scale })
}

impl TestFunction {
    pub fn eval(&self, x: f64) -> C64 {
        if x == 0.0 {
            return C64::new(0.0, 0.0);
        }
        let ax = x.abs();
        let sgn = if x < 0.0 && self.eta == 1 { -1.0 } else { 1.0 };
        let gauss = (-PI * (x / self.scale) * (x / self.scale)).exp();
        pow_real(ax, self.a) * (sgn * gauss)
    }

    /// Signed Mellin transform against probe parity `eta`:
    /// scale^{s+a} GammaR(s+a) when the parity matches, zero otherwise.
    pub fn mellin(&self, eta: u8, s: C64) -> C64 {
        if (eta & 1) != self.eta {
            return C64::new(0.0, 0.0);
        }
        pow_real(self.scale, s + self.a) * gamma_r(s + self.a)
    }
}

/// Vertical line Re s = sigma discretized with trapezoid step `h` up to
/// height `t_max`.
#[derive(Debug, Clone, Copy)]
pub struct ContourSpec {
    pub sigma: f64,
    pub h: f64,
    pub t_max: f64,
}

impl ContourSpec {
    pub fn new(sigma: f64, h: f64, t_max: f64) -> Result<Self> {
        if !(h > 0.0 && t_max > 0.0 && sigma.is_finite()) {
            return Err(Error::Contour(format!(
                "need h > 0, t_max > 0, finite sigma; got sigma={sigma}, h={h}, t_max={t_max}"
            )));
        }
        Ok(ContourSpec { sigma, h, t_max })
    }

    /// Number of quadrature nodes before tail trimming.
    pub fn node_count(&self) -> usize {
        2 * (self.t_max / self.h).ceil() as usize + 1
    }
}

/// A kernel value together with a running error estimate (difference between
/// the fine and coarse quadratures).
#[derive(Debug, Clone, Copy)]
pub struct KernelValue {
    pub value: C64,
    pub abs_err_est: f64,
}

#[derive(Debug, Clone)]
struct NodeSet {
    ts: Vec<f64>,
    /// Per-node weight: (sign h / 4 pi) prod_j G_{p_j}(s_k + u_j) M_eta f(-s_k).
    w: Vec<C64>,
    /// Sum of |w|: scales the round-off floor of any phased sum of the nodes.
    abs_sum: f64,
}

/// The dual-side weight function F, realized as a trapezoid discretization of
/// its Mellin-inversion integral. Two node sets (step h and h/2, the finer one
/// slightly taller) give every evaluation an error estimate for free.
#[derive(Debug, Clone)]
pub struct KernelFunction {
    pub eta: u8,
    pub sigma: f64,
    coarse: NodeSet,
    fine: NodeSet,
}

#[allow(clippy::too_many_arguments)]
fn build_node_set(
    parities: &[u8],
    shifts: &[C64],
    sign: f64,
    f: &TestFunction,
    eta: u8,
    sigma: f64,
    h: f64,
    t_max: f64,
) -> Result<NodeSet> {
    let m = (t_max / h).ceil() as i64;
    let mut ts = Vec::with_capacity((2 * m + 1) as usize);
    let mut w = Vec::with_capacity((2 * m + 1) as usize);
    let pref = sign * h / (4.0 * PI);
    for j in -m..=m {
        let t = j as f64 * h;
        let s = C64::new(sigma, t);
        let mut acc = C64::new(pref, 0.0);
        for (&p, &u) in parities.iter().zip(shifts) {
            acc *= g_delta(p, s + u)?;
        }
        acc *= f.mellin(eta, -s);
        ts.push(t);
        w.push(acc);
    }
    // Trim negligible tails so evaluation cost tracks the actual decay.
    let peak = w.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::NoConverge("kernel node weights vanished identically".into()));
    }
    let floor = peak * 1e-18;
    let lo = w.iter().position(|z| z.norm() > floor).unwrap();
    let hi = w.len() - w.iter().rev().position(|z| z.norm() > floor).unwrap();
    let abs_sum = w[lo..hi].iter().map(|z| z.norm()).sum();
    Ok(NodeSet { ts: ts[lo..hi].to_vec(), w: w[lo..hi].to_vec(), abs_sum })
}

/// Total pole/zero order of the integrand at a candidate point: the G factors
/// contribute their lattice orders, the Mellin factor GammaR(a - s) its poles.
fn net_order_at(pos: C64, parities: &[u8], shifts: &[C64], a: C64) -> i32 {
    let mut net = 0;
    for (&p, &u) in parities.iter().zip(shifts) {
        let arg = pos + u;
        let n = arg.re.round();
        if (arg - C64::new(n, 0.0)).norm() <= ALIGN_TOL {
            net += g_pole_zero_order(p, n as i64);
        }
    }
    let arg = a - pos;
    let n = arg.re.round();
    if (arg - C64::new(n, 0.0)).norm() <= ALIGN_TOL && n <= 0.0 && (n as i64).rem_euclid(2) == 0 {
        net -= 1;
    }
    net
}

/// True when no factor's pole lattice comes within the guard tolerance of the
/// vertical line Re s = sigma.
fn sigma_clear(sigma: f64, parities: &[u8], shifts: &[C64], a: C64) -> bool {
    for (&p, &u) in parities.iter().zip(shifts) {
        // Poles of G_p(s + u) at s = -u - p - 2k, k >= 0.
        let anchor = -u.re - p as f64;
        if sigma <= anchor + GUARD_TOL {
            let k = ((anchor - sigma) / 2.0).round().max(0.0);
            if (sigma - (anchor - 2.0 * k)).abs() <= GUARD_TOL {
                return false;
            }
        }
    }
    // Poles of GammaR(a - s) at s = a + 2k, k >= 0.
    if sigma >= a.re - GUARD_TOL {
        let k = ((sigma - a.re) / 2.0).round().max(0.0);
        if (sigma - (a.re + 2.0 * k)).abs() <= GUARD_TOL {
            return false;
        }
    }
    true
}

/// Smallest safe abscissa at or right of `wish`: scans every factor's pole
/// lattice, keeps only locations where poles survive against the other
/// factors' zeros, and then nudges away from any lattice line. Cancellation of
/// every apparent pole down to `wish` is what lets small-argument evaluations
/// avoid the catastrophic cancellation of far-right contours.
fn continued_sigma(parities: &[u8], shifts: &[C64], a: C64, wish: f64) -> f64 {
    let mut floor = f64::NEG_INFINITY;
    for (&p, &u) in parities.iter().zip(shifts) {
        let mut k = 0i64;
        loop {
            let pos = -u - C64::new((p as i64 + 2 * k) as f64, 0.0);
            if pos.re < wish - 0.25 {
                break;
            }
            if net_order_at(pos, parities, shifts, a) < 0 {
                floor = floor.max(pos.re);
            }
            k += 1;
        }
    }
    let mut sigma = if floor.is_finite() { wish.max(floor + 0.4) } else { wish };
    for _ in 0..12 {
        if sigma_clear(sigma, parities, shifts, a) {
            break;
        }
        sigma += 0.1;
    }
    sigma
}

fn rank3_factors(params: &GL3Parameters, eta: u8) -> ([u8; 3], [C64; 3]) {
    let one = C64::new(1.0, 0.0);
    (
        [
            (eta + params.delta[0]) & 1,
            (eta + params.delta[1]) & 1,
            (eta + params.delta[2]) & 1,
        ],
        [one - params.lambda[0], one - params.lambda[1], one - params.lambda[2]],
    )
}

fn rank2_factors(nu: C64, eta: u8) -> ([u8; 2], [C64; 2]) {
    let one = C64::new(1.0, 0.0);
    ([eta & 1, eta & 1], [one - nu, one + nu])
}

fn reject_positive_integer_nu(nu: C64) -> Result<()> {
    let n = nu.re.round();
    if nu.im.abs() <= ALIGN_TOL && (nu.re - n).abs() <= ALIGN_TOL && n >= 1.0 {
        return Err(Error::Invalid(format!(
            "spectral parameter nu = {nu} is a positive integer, which is outside the supported family"
        )));
    }
    Ok(())
}

impl KernelFunction {
    fn assemble(
        parities: &[u8],
        shifts: &[C64],
        sign: f64,
        f: &TestFunction,
        eta: u8,
        contour: &ContourSpec,
    ) -> Result<Self> {
        if (eta & 1) != f.eta {
            return Err(Error::Invalid(format!(
                "kernel parity {} does not match test function parity {}",
                eta & 1,
                f.eta
            )));
        }
        let mut sigma = contour.sigma;
        let mut guard = 0;
        while !sigma_clear(sigma, parities, shifts, f.a) {
            sigma += 0.1;
            guard += 1;
            if guard > 12 {
                return Err(Error::Contour(format!(
                    "could not move the contour clear of poles near sigma = {}",
                    contour.sigma
                )));
            }
        }
        let coarse = build_node_set(parities, shifts, sign, f, eta, sigma, contour.h, contour.t_max)?;
        let fine = build_node_set(
            parities,
            shifts,
            sign,
            f,
            eta,
            sigma,
            contour.h / 2.0,
            contour.t_max + 10.0,
        )?;
        Ok(KernelFunction { eta: eta & 1, sigma, coarse, fine })
    }

    /// Rank-three kernel on an explicit contour. Requires
    /// sigma > max_j(Re lambda_j) - 1.
    pub fn gl3(
        params: &GL3Parameters,
        eta: u8,
        f: &TestFunction,
        contour: &ContourSpec,
    ) -> Result<Self> {
        if contour.sigma <= params.max_re_lambda() - 1.0 {
            return Err(Error::Contour(format!(
                "abscissa {} not right of max Re lambda - 1 = {}",
                contour.sigma,
                params.max_re_lambda() - 1.0
            )));
        }
        let (parities, shifts) = rank3_factors(params, eta);
        Self::assemble(&parities, &shifts, neg_one_pow(eta as i64), f, eta, contour)
    }

    /// Rank-three kernel on an automatically placed contour near abscissa
    /// `wish`, moved right only past surviving poles of the integrand. A left
    /// `wish` keeps small-argument evaluations well conditioned (the phased
    /// node sum then carries the decay instead of the |x|^{-sigma}
    /// prefactor); the default 0.5 suits arguments of moderate size.
    pub fn gl3_continued(
        params: &GL3Parameters,
        eta: u8,
        f: &TestFunction,
        wish: f64,
    ) -> Result<Self> {
        let (parities, shifts) = rank3_factors(params, eta);
        let sigma = continued_sigma(&parities, &shifts, f.a, wish);
        let contour = ContourSpec::new(sigma, 0.05, 90.0)?;
        Self::assemble(&parities, &shifts, neg_one_pow(eta as i64), f, eta, &contour)
    }

    /// Rank-three kernel with the default automatic contour.
    pub fn gl3_auto(params: &GL3Parameters, eta: u8, f: &TestFunction) -> Result<Self> {
        Self::gl3_continued(params, eta, f, 0.5)
    }

    /// Rank-two kernel on an explicit contour. Requires
    /// sigma > |Re nu| - 1; nu must not be a positive integer.
    pub fn gl2(nu: C64, eta: u8, f: &TestFunction, contour: &ContourSpec) -> Result<Self> {
        reject_positive_integer_nu(nu)?;
        if contour.sigma <= nu.re.abs() - 1.0 {
            return Err(Error::Contour(format!(
                "abscissa {} not right of |Re nu| - 1 = {}",
                contour.sigma,
                nu.re.abs() - 1.0
            )));
        }
        let (parities, shifts) = rank2_factors(nu, eta);
        Self::assemble(&parities, &shifts, 1.0, f, eta, contour)
    }

    /// Rank-two kernel on an automatically placed contour near `wish` (see
    /// [`KernelFunction::gl3_continued`] for how `wish` trades off small- vs
    /// large-argument conditioning).
    pub fn gl2_continued(nu: C64, eta: u8, f: &TestFunction, wish: f64) -> Result<Self> {
        reject_positive_integer_nu(nu)?;
        let (parities, shifts) = rank2_factors(nu, eta);
        let sigma = continued_sigma(&parities, &shifts, f.a, wish);
        let contour = ContourSpec::new(sigma, 0.05, 90.0)?;
        Self::assemble(&parities, &shifts, 1.0, f, eta, &contour)
    }

    /// Rank-two kernel with the default automatic contour.
    pub fn gl2_auto(nu: C64, eta: u8, f: &TestFunction) -> Result<Self> {
        Self::gl2_continued(nu, eta, f, 0.5)
    }

    fn node_sum(set: &NodeSet, neg_log_x: f64) -> C64 {
        let terms: Vec<C64> = set
            .ts
            .iter()
            .zip(&set.w)
            .map(|(&t, &w)| {
                let ph = t * neg_log_x;
                w * C64::new(ph.cos(), ph.sin())
            })
            .collect();
        pairwise_sum(&terms)
    }

    /// F(x) with a running error estimate; x must be nonzero.
    pub fn eval(&self, x: f64) -> KernelValue {
        assert!(x != 0.0, "kernel argument must be nonzero");
        let ax = x.abs();
        let neg_log_x = -ax.ln();
        let prefactor = ax.powf(-self.sigma)
            * if x < 0.0 && self.eta == 1 { -1.0 } else { 1.0 };
        let fine = Self::node_sum(&self.fine, neg_log_x);
        let coarse = Self::node_sum(&self.coarse, neg_log_x);
        // Quadrature disagreement plus the round-off floor of the phased sum.
        let round_off = 4.0 * f64::EPSILON * self.fine.abs_sum;
        KernelValue {
            value: fine * prefactor,
            abs_err_est: ((fine - coarse).norm() + round_off) * prefactor.abs(),
        }
    }

    pub fn eval_value(&self, x: f64) -> C64 {
        self.eval(x).value
    }

    pub fn node_counts(&self) -> (usize, usize) {
        (self.coarse.w.len(), self.fine.w.len())
    }
}

/// One-shot rank-two kernel value (convenience form of [`KernelFunction::gl2`]).
pub fn gl2_kernel(
    x: f64,
    nu: C64,
    eta: u8,
    f: &TestFunction,
    contour: &ContourSpec,
) -> Result<C64> {
    if x == 0.0 {
        return Err(Error::Invalid("kernel argument must be nonzero".into()));
    }
    Ok(KernelFunction::gl2(nu, eta, f, contour)?.eval(x).value)
}

/// One-shot rank-three kernel value (convenience form of [`KernelFunction::gl3`]).
pub fn gl3_kernel(
    x: f64,
    params: &GL3Parameters,
    eta: u8,
    f: &TestFunction,
    contour: &ContourSpec,
) -> Result<C64> {
    if x == 0.0 {
        return Err(Error::Invalid("kernel argument must be nonzero".into()));
    }
    Ok(KernelFunction::gl3(params, eta, f, contour)?.eval(x).value)
}

/// The rank-three Gamma-factor product in literal Gamma-ratio form:
/// pi^{-3/2-3s} prod_j i^{d'_j} pi^{lambda_j} Gamma((s+1-lambda_j+d'_j)/2) /
/// Gamma((-s+lambda_j+d'_j)/2), with d'_j = (eta + delta_j) mod 2. This is an
/// independent route to the same product of G factors and exists for
/// cross-checks.
pub fn gl3_gamma_ratio(params: &GL3Parameters, eta: u8, s: C64) -> C64 {
    let lnpi = PI.ln();
    let mut log_acc = C64::new(-1.5 * lnpi, 0.0) - s * (3.0 * lnpi);
    let mut phase = C64::new(1.0, 0.0);
    for j in 0..3 {
        let dp = (eta + params.delta[j]) & 1;
        let l = params.lambda[j];
        phase *= i_pow(dp as i64);
        log_acc += l * lnpi;
        log_acc += log_gamma((s + 1.0 - l + dp as f64) * 0.5);
        log_acc -= log_gamma((-s + l + dp as f64) * 0.5);
    }
    phase * log_acc.exp()
}

/// The rank-two Gamma-factor combination in literal Gamma-ratio form:
/// pi^{-2s-1} (-1)^eta Gamma((1+s+eta-nu)/2) Gamma((1+s+eta+nu)/2) /
/// (Gamma((-s+eta+nu)/2) Gamma((-s+eta-nu)/2)); an independent route to
/// G_eta(s+1-nu) G_eta(s+1+nu).
pub fn gl2_gamma_ratio(nu: C64, eta: u8, s: C64) -> C64 {
    let lnpi = PI.ln();
    let e = (eta & 1) as f64;
    let mut log_acc = C64::new(-lnpi, 0.0) - s * (2.0 * lnpi);
    log_acc += log_gamma((s + 1.0 + e - nu) * 0.5);
    log_acc += log_gamma((s + 1.0 + e + nu) * 0.5);
    log_acc -= log_gamma((-s + e + nu) * 0.5);
    log_acc -= log_gamma((-s + e - nu) * 0.5);
    log_acc.exp() * neg_one_pow(eta as i64)
}

#[allow(clippy::too_many_arguments)]
fn adaptive_simpson<F: Fn(f64) -> C64>(
    f: &F,
    a: f64,
    b: f64,
    fa: C64,
    fm: C64,
    fb: C64,
    whole: C64,
    tol: f64,
    depth: u32,
) -> Result<C64> {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (fa + flm * 4.0 + fm) * ((m - a) / 6.0);
    let right = (fm + frm * 4.0 + fb) * ((b - m) / 6.0);
    let refined = left + right;
    if (refined - whole).norm() <= 15.0 * tol {
        return Ok(refined + (refined - whole) / 15.0);
    }
    if depth == 0 {
        return Err(Error::NoConverge(format!(
            "adaptive quadrature did not converge on [{a}, {b}]"
        )));
    }
    let l = adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)?;
    let r = adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)?;
    Ok(l + r)
}

fn integrate<F: Fn(f64) -> C64>(f: &F, a: f64, b: f64, tol: f64) -> Result<C64> {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (fa + fm * 4.0 + fb) * ((b - a) / 6.0);
    adaptive_simpson(f, a, b, fa, fm, fb, whole, tol, 24)
}

/// Numeric signed Mellin transform: integral of f(x) sg(x)^eta |x|^{s-1} over
/// the real line, truncated at |x| = cutoff. The origin is handled by the
/// substitution x = u^p, which removes the |x|^{s-1} singularity for small
/// Re s; oscillatory integrands are left to the adaptive subdivision.
pub fn signed_mellin_numeric<F: Fn(f64) -> C64>(
    f: F,
    eta: u8,
    s: C64,
    cutoff: f64,
) -> Result<C64> {
    if s.re <= 0.0 {
        return Err(Error::Invalid(format!(
            "numeric Mellin transform restricted to Re s > 0, got {s}"
        )));
    }
    if cutoff.is_nan() || cutoff <= 1.0 {
        return Err(Error::Invalid("cutoff must exceed 1".into()));
    }
    let sgn = neg_one_pow(eta as i64);
    let g = |x: f64| f(x) + f(-x) * sgn;
    // Head: x in (0, 1], substituted x = u^p.
    let p = (2.5 / s.re).ceil().clamp(1.0, 12.0);
    let head_integrand = |u: f64| {
        if u <= 0.0 {
            return C64::new(0.0, 0.0);
        }
        let x = u.powf(p);
        g(x) * pow_real(u, s * p - 1.0) * p
    };
    let head = integrate(&head_integrand, 0.0, 1.0, 1e-11)?;
    // Tail: doubling panels keep the adaptive depth bounded on oscillatory
    // integrands.
    let mut tail = C64::new(0.0, 0.0);
    let mut lo = 1.0_f64;
    while lo < cutoff {
        let hi = (lo * 2.0).min(cutoff);
        let integrand = |x: f64| g(x) * pow_real(x, s - 1.0);
        tail += integrate(&integrand, lo, hi, 1e-11)?;
        lo = hi;
    }
    Ok(head + tail)
}

/// How a kernel behaves as its argument approaches zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SingularityClass {
    /// All three exponent families pairwise non-interacting: pure power terms.
    PowersOnly,
    /// Exactly one interacting pair: a single logarithm appears.
    OneLog,
    /// A full chain of interactions: the deepest term carries log squared.
    LogSquared,
}

/// One local term (sg x)^parity |x|^{exponent} (log|x|)^{log_power} (times a
/// smooth even series).
#[derive(Debug, Clone, Copy)]
pub struct SingularTerm {
    pub exponent: C64,
    pub parity: u8,
    pub log_power: u8,
}

#[derive(Debug, Clone)]
pub struct SingularityReport {
    pub class: SingularityClass,
    /// Permutation sorting the spectral shifts by ascending real part.
    pub order: [usize; 3],
    /// Terms in sorted order; exponents are 1 - lambda.
    pub terms: [SingularTerm; 3],
    /// Smallest real exponent actually present for this parity: the kernel
    /// scales like |x|^{leading_exponent} (times possible logs) as x -> 0.
    pub leading_exponent: f64,
}

/// (lambda_i, delta_i) precedes (lambda_j, delta_j) when their difference is a
/// nonnegative integer of parity delta_i + delta_j.
fn precedes(li: C64, di: u8, lj: C64, dj: u8) -> bool {
    let d = lj - li;
    if d.im.abs() > ALIGN_TOL {
        return false;
    }
    let n = d.re.round();
    if (d.re - n).abs() > ALIGN_TOL || n < -0.5 {
        return false;
    }
    (n as i64).rem_euclid(2) == ((di + dj) & 1) as i64
}

/// Predicts the origin behavior of the rank-three kernel for parity `eta`:
/// which interaction class applies, the ascending-exponent ordering, and the
/// leading exponent (with parity corrections: a family whose natural parity
/// disagrees with eta starts one power higher).
pub fn classify_singularity(params: &GL3Parameters, eta: u8) -> SingularityReport {
    let mut order = [0usize, 1, 2];
    order.sort_by(|&i, &j| {
        params.lambda[i]
            .re
            .partial_cmp(&params.lambda[j].re)
            .unwrap()
            .then(i.cmp(&j))
    });
    let mut terms = Vec::with_capacity(3);
    for (slot, &j) in order.iter().enumerate() {
        let mut log_power = 0u8;
        for (other_slot, &k) in order.iter().enumerate() {
            if k == j {
                continue;
            }
            let strictly_later = params.lambda[k].re > params.lambda[j].re + ALIGN_TOL
                || ((params.lambda[k] - params.lambda[j]).norm() <= ALIGN_TOL
                    && params.delta[k] == params.delta[j]
                    && other_slot > slot);
            // j's term picks up a log for every family that dominates it.
            if precedes(params.lambda[j], params.delta[j], params.lambda[k], params.delta[k])
                && strictly_later
            {
                log_power += 1;
            }
        }
        terms.push(SingularTerm {
            exponent: C64::new(1.0, 0.0) - params.lambda[j],
            parity: params.delta[j] & 1,
            log_power,
        });
    }
    let max_log = terms.iter().map(|t| t.log_power).max().unwrap();
    let class = match max_log {
        0 => SingularityClass::PowersOnly,
        1 => SingularityClass::OneLog,
        _ => SingularityClass::LogSquared,
    };
    let leading_exponent = (0..3)
        .map(|j| {
            let parity_shift = ((eta + params.delta[j]) & 1) as f64;
            1.0 - params.lambda[j].re + parity_shift
        })
        .fold(f64::INFINITY, f64::min);
    SingularityReport {
        class,
        order,
        terms: [terms[0], terms[1], terms[2]],
        leading_exponent,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(l: [f64; 3], d: [u8; 3]) -> GL3Parameters {
        GL3Parameters::new(
            [C64::new(l[0], 0.0), C64::new(l[1], 0.0), C64::new(l[2], 0.0)],
            d,
        )
        .unwrap()
    }

    #[test]
    fn test_function_parity_and_mellin_anchor() {
        let f = make_test_function(1, C64::new(1.0, 0.0), 1.0).unwrap();
        assert!((f.eval(1.5) + f.eval(-1.5)).norm() < 1e-15);
        // eta mismatch kills the transform.
        assert_eq!(f.mellin(0, C64::new(2.0, 0.0)), C64::new(0.0, 0.0));
        let g = make_test_function(0, C64::new(0.0, 0.0), 1.0).unwrap();
        // At s = 1 the closed form is GammaR(1) = 1.
        assert!((g.mellin(0, C64::new(1.0, 0.0)) - C64::new(1.0, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn signed_mellin_matches_closed_form() {
        let f = make_test_function(1, C64::new(1.0, 0.0), 1.0).unwrap();
        let s = C64::new(2.5, 0.0);
        let numeric = signed_mellin_numeric(|x| f.eval(x), 1, s, 12.0).unwrap();
        let closed = f.mellin(1, s);
        assert!((numeric - closed).norm() <= 1e-9, "{numeric} vs {closed}");
        // Odd integrand against even parity integrates to zero.
        let zero = signed_mellin_numeric(|x| f.eval(x), 0, s, 12.0).unwrap();
        assert!(zero.norm() < 1e-12);
    }

    #[test]
    fn positive_integer_nu_rejected() {
        let f = make_test_function(0, C64::new(3.0, 0.0), 1.0).unwrap();
        let c = ContourSpec::new(2.5, 0.05, 60.0).unwrap();
        assert!(KernelFunction::gl2(C64::new(3.0, 0.0), 0, &f, &c).is_err());
        assert!(KernelFunction::gl2(C64::new(-3.0, 0.0), 0, &f, &c).is_ok());
    }

    #[test]
    fn kernel_parity_invariant() {
        let params = p([0.2, -0.1, -0.1], [0, 0, 0]);
        for eta in [0u8, 1] {
            let a = C64::new(0.1 + eta as f64 + 2.0, 0.0); // admissible-ish, parity matched below
            let f = TestFunction { eta, a, scale: 1.0 };
            let k = KernelFunction::gl3_auto(&params, eta, &f).unwrap();
            for &x in &[0.3, 1.0, 2.7] {
                let plus = k.eval(x).value;
                let minus = k.eval(-x).value;
                let expect = if eta == 1 { -plus } else { plus };
                assert!((minus - expect).norm() <= 1e-12 * plus.norm().max(1e-30));
            }
        }
    }

    #[test]
    fn gamma_ratio_routes_match_g_products() {
        let params = p([0.4, 0.0, -0.4], [1, 0, 1]);
        for eta in [0u8, 1] {
            for &s in &[C64::new(0.7, 0.3), C64::new(1.4, -2.0), C64::new(0.2, 5.0)] {
                let (parities, shifts) = rank3_factors(&params, eta);
                let direct = crate::special::g_product(&parities, &shifts, s).unwrap();
                let ratio = gl3_gamma_ratio(&params, eta, s);
                assert!(
                    (direct - ratio).norm() <= 1e-10 * direct.norm(),
                    "eta={eta} s={s}: {direct} vs {ratio}"
                );
            }
        }
        let nu = C64::new(-5.5, 0.0);
        for eta in [0u8, 1] {
            for &s in &[C64::new(5.0, 1.0), C64::new(0.6, -3.0)] {
                let (parities, shifts) = rank2_factors(nu, eta);
                let direct = crate::special::g_product(&parities, &shifts, s).unwrap();
                let ratio = gl2_gamma_ratio(nu, eta, s);
                assert!(
                    (direct - ratio).norm() <= 1e-10 * direct.norm(),
                    "eta={eta} s={s}: {direct} vs {ratio}"
                );
            }
        }
    }

    #[test]
    fn classification_cases() {
        // Pairwise non-comparable: pure powers.
        let r = classify_singularity(&p([0.3, 0.05, -0.35], [0, 0, 0]), 0);
        assert_eq!(r.class, SingularityClass::PowersOnly);
        assert!(r.terms.iter().all(|t| t.log_power == 0));
        // Full chain with even gaps: log squared on the deepest term.
        let r = classify_singularity(&p([2.0, 0.0, -2.0], [0, 0, 0]), 0);
        assert_eq!(r.class, SingularityClass::LogSquared);
        assert_eq!(r.terms[0].log_power, 2);
        assert_eq!(r.terms[1].log_power, 1);
        assert_eq!(r.terms[2].log_power, 0);
        // Degenerate equal shifts: same shape as the chain.
        let r = classify_singularity(&p([0.0, 0.0, 0.0], [0, 0, 0]), 0);
        assert_eq!(r.class, SingularityClass::LogSquared);
        assert_eq!(
            [r.terms[0].log_power, r.terms[1].log_power, r.terms[2].log_power],
            [2, 1, 0]
        );
        // One comparable pair (gap 2, matching parity), third offset by a
        // non-integer: single log.
        let r = classify_singularity(&p([1.1, -0.9, -0.2], [0, 0, 0]), 0);
        assert_eq!(r.class, SingularityClass::OneLog);
        // Leading exponent with parity corrections.
        let r = classify_singularity(&p([0.4, 0.0, -0.4], [0, 0, 0]), 0);
        assert!((r.leading_exponent - 0.6).abs() < 1e-12);
        let r = classify_singularity(&p([0.4, 0.0, -0.4], [0, 0, 0]), 1);
        assert!((r.leading_exponent - 1.6).abs() < 1e-12);
    }
}
