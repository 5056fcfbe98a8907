//! Smoothed evaluation of twisted L-series and functional-equation residuals.
//!
//! The Dirichlet series attached to a coefficient table converges only in a
//! right half-plane; everything here continues it across the critical strip
//! with a balanced smoothed pair built from the same Mellin-Barnes machinery
//! and gamma-factor convention as the kernel transforms:
//!
//!   L(s0) = sum_n b_n chi(n) n^{-s0} V(n/X)
//!         - (-1)^eps g^3 q^{-3 s0} sum_n b~_n chibar(n) n^{s0-1} W(X n / q^3)
//!
//! where V and W are the two halves of the contour integral
//! (1/2 pi i) Int L(s0+u) exp(u^2/A) X^u du/u pulled right and left of the
//! simple pole at u = 0. The right half collapses onto the direct terms with
//! the closed-form cutoff V(y) = erfc((sqrt(A)/2) ln y)/2; the left half,
//! after the functional equation replaces L by its dual series, leaves one
//! contour weight W per dual term with the G-factor product cached on the
//! quadrature nodes. The contour is placed by scanning for the offset that
//! maximizes the distance from every G-pole lattice, which keeps the
//! trapezoid rule spectrally accurate.
//!
//! On top of the evaluator sit the residual of the twisted functional
//! equation L(1-s, dual x chibar) = q^{3s} g^{-3} prod_j G_{eps+delta_j}(s +
//! lambda_j) L(s, standard x chi) and the equivalent Fourier-side identity
//! checked at the level of its two Mellin-transformed halves.

use crate::arithmetic::DirichletCharacter;
use crate::coefficients::{CoefficientTable, GL3Parameters};
use crate::error::{Error, Result};
use crate::special::{erfc, g_delta, g_near_pole};
use crate::util::{pairwise_sum, pow_real};
use crate::C64;

/// Pole guard for functional-equation evaluation points, looser than the
/// evaluation guard inside `g_delta` so callers get a clean error well before
/// the gamma factors blow up.
pub const FE_POLE_GUARD: f64 = 1e-6;

/// Which of the two mutually dual series a value refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// b_n = a_{1,n}.
    Standard,
    /// b_n = a_{n,1}, archimedean data replaced by its dual.
    Contragredient,
}

/// A twisted Dirichlet series b_n chi(n) n^{-s} read off a coefficient table.
#[derive(Debug, Clone)]
pub struct LSeries {
    /// b_n at index n; entry 0 is unused and zero.
    pub coefficients: Vec<C64>,
    pub character: Option<DirichletCharacter>,
    pub direction: Direction,
    /// Tracked polynomial growth exponent: max over n >= 2 of ln|b_n|/ln n,
    /// clamped at zero. Tail bounds and contour placement key off this.
    pub growth: f64,
}

fn growth_exponent(b: &[C64]) -> f64 {
    let mut g: f64 = 0.0;
    for (n, z) in b.iter().enumerate().skip(2) {
        let m = z.norm();
        if m > 1.0 {
            g = g.max(m.ln() / (n as f64).ln());
        }
    }
    g
}

impl LSeries {
    /// The series of the chosen direction, with an optional character twist.
    pub fn from_table(
        table: &CoefficientTable,
        character: Option<DirichletCharacter>,
        direction: Direction,
    ) -> LSeries {
        let coefficients = match direction {
            Direction::Standard => table.first_row(),
            Direction::Contragredient => table.first_col(),
        };
        let growth = growth_exponent(&coefficients);
        LSeries {
            coefficients,
            character,
            direction,
            growth,
        }
    }

    /// Largest index carried by the series.
    pub fn len(&self) -> usize {
        self.coefficients.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn chi(&self, n: usize) -> C64 {
        match &self.character {
            None => C64::new(1.0, 0.0),
            Some(chi) => chi.value(n as i64),
        }
    }

    /// b_n chi(n) n^{-s}.
    pub fn term(&self, n: usize, s: C64) -> C64 {
        self.coefficients[n] * self.chi(n) * pow_real(n as f64, -s)
    }
}

/// Raw partial sum of the first `n_max` terms (clamped to the table length).
/// Meaningful as an L-value only where the series converges; also serves as
/// the overlap oracle for the smoothed evaluator.
pub fn l_partial(series: &LSeries, s: C64, n_max: usize) -> C64 {
    let top = n_max.min(series.len());
    let terms: Vec<C64> = (1..=top).map(|n| series.term(n, s)).collect();
    pairwise_sum(&terms)
}

/// Tuning knobs for the smoothed evaluator. The defaults are sized so the
/// quadrature error sits far below the 1e-8 overlap tolerance for moduli up
/// to about 10.
#[derive(Debug, Clone, Copy)]
pub struct SmoothedOptions {
    /// Direct/dual split point X; 0 picks max(4, 0.75 q^3).
    pub cut: f64,
    /// Gaussian window width A in exp(u^2/A).
    pub width: f64,
    /// Quadrature step along the dual contour.
    pub step: f64,
    /// Quadrature height; the Gaussian window has decayed to ~1e-27 at the
    /// default cutoff.
    pub height: f64,
    /// Series truncation; 0 uses the full table.
    pub length: usize,
}

impl Default for SmoothedOptions {
    fn default() -> Self {
        SmoothedOptions {
            cut: 0.0,
            width: 40.0,
            step: 0.05,
            height: 50.0,
            length: 0,
        }
    }
}

/// A continued L-value with its accounting.
#[derive(Debug, Clone, Copy)]
pub struct LValue {
    pub value: C64,
    /// Round-off floor plus the scaled dual truncation window.
    pub err_est: f64,
    pub direct_terms: usize,
    pub dual_terms: usize,
}

/// Distance from x to the nearest nonpositive integer of the given parity
/// (the pole lattice of G_parity).
fn lattice_distance(x: f64, parity: u8) -> f64 {
    let p = (parity & 1) as f64;
    let cap = if parity & 1 == 0 { 0.0 } else { -1.0 };
    let rounded = 2.0 * ((x - p) / 2.0).round() + p;
    (x - rounded.min(cap)).abs()
}

fn sign_pow(p: u8) -> f64 {
    if p & 1 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// G_delta with the wider functional-equation pole guard applied first.
fn guarded_g(parity: u8, arg: C64) -> Result<C64> {
    if let Some(at) = g_near_pole(parity, arg, FE_POLE_GUARD) {
        return Err(Error::NearPole {
            at: format!("G_{}({at})", parity & 1),
            tol: FE_POLE_GUARD,
        });
    }
    g_delta(parity, arg)
}

/// Archimedean data of the contragredient: reversed order, negated lambda,
/// reversed parities.
fn dual_archimedean(params: &GL3Parameters) -> ([C64; 3], [u8; 3]) {
    let l = &params.lambda;
    let d = &params.delta;
    ([-l[2], -l[1], -l[0]], [d[2], d[1], d[0]])
}

struct SeriesPair {
    /// Coefficients of the series being evaluated, index n.
    main: Vec<C64>,
    /// Coefficients of its functional-equation partner.
    dual: Vec<C64>,
    lambda: [C64; 3],
    delta: [u8; 3],
}

fn series_pair(
    table: &CoefficientTable,
    params: &GL3Parameters,
    direction: Direction,
) -> SeriesPair {
    match direction {
        Direction::Standard => SeriesPair {
            main: table.first_row(),
            dual: table.first_col(),
            lambda: params.lambda,
            delta: params.delta,
        },
        Direction::Contragredient => {
            let (lambda, delta) = dual_archimedean(params);
            SeriesPair {
                main: table.first_col(),
                dual: table.first_row(),
                lambda,
                delta,
            }
        }
    }
}

/// Value of the analytically continued twisted series at any s, by the
/// smoothed pair described in the module docs. The character must be
/// primitive (or absent, meaning modulus one) because the dual side invokes
/// the functional equation.
pub fn l_smoothed(
    table: &CoefficientTable,
    params: &GL3Parameters,
    chi: Option<&DirichletCharacter>,
    direction: Direction,
    s: C64,
    opts: &SmoothedOptions,
) -> Result<LValue> {
    if let Some(chi) = chi {
        if !chi.is_primitive() {
            return Err(Error::Invalid(
                "smoothed continuation needs a primitive character".into(),
            ));
        }
    }
    if !(opts.width > 0.0 && opts.step > 0.0 && opts.height > opts.step) {
        return Err(Error::Invalid(
            "smoothed-evaluator window and quadrature parameters must be positive".into(),
        ));
    }
    let length = if opts.length == 0 {
        table.n
    } else {
        opts.length
    };
    if length > table.n {
        return Err(Error::Invalid(format!(
            "requested length {length} exceeds the table truncation {}",
            table.n
        )));
    }
    if length < 64 {
        return Err(Error::Invalid(
            "smoothed continuation needs at least 64 coefficients".into(),
        ));
    }

    let pair = series_pair(table, params, direction);
    let q = chi.map_or(1, |c| c.q);
    let eps = chi.map_or(0, |c| c.parity) & 1;
    let gauss = chi.map_or(C64::new(1.0, 0.0), |c| c.gauss_sum());
    let chibar = chi.map(|c| c.conjugate());
    let qf = q as f64;

    let a_width = opts.width;
    let x_cut = if opts.cut > 0.0 {
        opts.cut
    } else {
        (0.75 * qf.powi(3)).max(4.0)
    };

    // Direct side: V(y) = erfc((sqrt(A)/2) ln y) / 2.
    let cutoff = |y: f64| 0.5 * erfc(0.5 * a_width.sqrt() * y.ln());
    if cutoff((length + 1) as f64 / x_cut) > 1e-16 {
        return Err(Error::Invalid(format!(
            "table truncation {length} too short for the direct cutoff at X = {x_cut}"
        )));
    }
    let mut direct_terms: Vec<C64> = Vec::new();
    let mut direct_abs = 0.0;
    for n in 1..=length {
        let v = cutoff(n as f64 / x_cut);
        if v < 1e-18 {
            break;
        }
        let chi_n = match chi {
            None => C64::new(1.0, 0.0),
            Some(c) => c.value(n as i64),
        };
        let term = pair.main[n] * chi_n * pow_real(n as f64, -s) * v;
        direct_abs += term.norm();
        direct_terms.push(term);
    }
    let direct_count = direct_terms.len();
    let direct_sum = pairwise_sum(&direct_terms);

    // Dual contour: scan the abscissa for the offset that keeps every
    // G-argument lattice at distance, then freeze the node weights
    // (h / 2 pi) G-product exp(u^2/A) / u.
    let kappa = growth_exponent(&pair.main).max(growth_exponent(&pair.dual));
    let c_min = (kappa + 1.2 - s.re.min(1.0 - s.re)).max(0.7);
    let parities = [
        (eps + pair.delta[0]) & 1,
        (eps + pair.delta[1]) & 1,
        (eps + pair.delta[2]) & 1,
    ];
    let score = |c: f64| {
        (0..3)
            .map(|j| lattice_distance(1.0 - s.re + c - pair.lambda[j].re, parities[j]))
            .fold(f64::INFINITY, f64::min)
    };
    let mut c_abscissa = None;
    let mut best = (f64::NEG_INFINITY, c_min);
    for k in 0..40 {
        let c = c_min + 0.05 * k as f64;
        let sc = score(c);
        if sc >= 0.75 {
            c_abscissa = Some(c);
            break;
        }
        if sc > best.0 {
            best = (sc, c);
        }
    }
    let c_abscissa = match c_abscissa {
        Some(c) => c,
        None if best.0 >= 0.3 => best.1,
        None => {
            return Err(Error::Contour(format!(
                "no dual contour abscissa clears the gamma poles near s = {s}"
            )))
        }
    };

    let steps = (opts.height / opts.step).ceil() as i64;
    let node_scale = opts.step / std::f64::consts::TAU;
    let mut nodes: Vec<(C64, C64)> = Vec::with_capacity(2 * steps as usize + 1);
    for k in -steps..=steps {
        let u = C64::new(-c_abscissa, k as f64 * opts.step);
        let mut g_prod = C64::new(1.0, 0.0);
        for (&d, &l) in parities.iter().zip(pair.lambda.iter()) {
            g_prod *= g_delta(d, C64::new(1.0, 0.0) - s - l - u)?;
        }
        let w = g_prod * (u * u / a_width).exp() * node_scale / u;
        nodes.push((u, w));
    }

    // Dual side: one cached-contour weight per term, swept over the full
    // requested length so truncation is visible in the trailing window.
    let sign = sign_pow(eps);
    let dual_const = gauss * gauss * gauss * pow_real(qf, -3.0 * s) * sign;
    let ln_cut = x_cut.ln() - 3.0 * qf.ln();
    let mut dual_terms: Vec<C64> = Vec::with_capacity(length);
    let mut dual_mags: Vec<f64> = Vec::with_capacity(length);
    let mut dual_abs = 0.0;
    let mut scratch: Vec<C64> = Vec::with_capacity(nodes.len());
    for n in 1..=length {
        let chi_n = match &chibar {
            None => C64::new(1.0, 0.0),
            Some(c) => c.value(n as i64),
        };
        let b = pair.dual[n] * chi_n;
        let term = if b.norm_sqr() == 0.0 {
            C64::new(0.0, 0.0)
        } else {
            let ln_y = ln_cut + (n as f64).ln();
            scratch.clear();
            scratch.extend(nodes.iter().map(|&(u, w)| w * (u * ln_y).exp()));
            let weight = pairwise_sum(&scratch);
            b * pow_real(n as f64, s - C64::new(1.0, 0.0)) * weight
        };
        dual_abs += term.norm();
        dual_mags.push(term.norm());
        dual_terms.push(term);
    }
    let dual_sum = pairwise_sum(&dual_terms);

    let value = direct_sum - dual_const * dual_sum;
    let window = (length / 16).max(16).min(length);
    let window_max = dual_mags[length - window..]
        .iter()
        .fold(0.0_f64, |m, &v| m.max(v));
    let scaled_tail = dual_const.norm() * window_max;
    if scaled_tail > 1e-9 * (1.0 + value.norm()) {
        return Err(Error::NoConverge(format!(
            "dual series tail {scaled_tail:.3e} at truncation {length} has not converged"
        )));
    }
    let err_est = 4.0 * f64::EPSILON * (direct_abs + dual_const.norm() * dual_abs) + scaled_tail;

    Ok(LValue {
        value,
        err_est,
        direct_terms: direct_count,
        dual_terms: length,
    })
}

/// Both sides of the twisted functional equation at one evaluation point.
#[derive(Debug, Clone, Copy)]
pub struct FeReport {
    /// L(1-s) on the contragredient-conjugate side.
    pub lhs: C64,
    /// q^{3s} g^{-3} prod G times L(s) on the standard side.
    pub rhs: C64,
    /// |lhs - rhs|.
    pub residual: f64,
}

/// Residual of L(1-s, dual x chibar) = q^{3s} g^{-3} prod_j
/// G_{eps+delta_j}(s+lambda_j) L(s, standard x chi), both L-values by the
/// smoothed evaluator. chi absent means modulus one; otherwise it must be
/// primitive.
pub fn functional_equation_residual(
    table: &CoefficientTable,
    params: &GL3Parameters,
    chi: Option<&DirichletCharacter>,
    s: C64,
    opts: &SmoothedOptions,
) -> Result<FeReport> {
    if let Some(chi) = chi {
        if !chi.is_primitive() {
            return Err(Error::Invalid(
                "functional equation requires a primitive character".into(),
            ));
        }
    }
    let q = chi.map_or(1, |c| c.q) as f64;
    let eps = chi.map_or(0, |c| c.parity) & 1;
    let gauss = chi.map_or(C64::new(1.0, 0.0), |c| c.gauss_sum());

    let mut g_prod = C64::new(1.0, 0.0);
    for j in 0..3 {
        g_prod *= guarded_g((eps + params.delta[j]) & 1, s + params.lambda[j])?;
    }

    let chibar = chi.map(|c| c.conjugate());
    let one = C64::new(1.0, 0.0);
    let lhs = l_smoothed(
        table,
        params,
        chibar.as_ref(),
        Direction::Contragredient,
        one - s,
        opts,
    )?
    .value;
    let l_s = l_smoothed(table, params, chi, Direction::Standard, s, opts)?.value;
    let rhs = pow_real(q, 3.0 * s) / (gauss * gauss * gauss) * g_prod * l_s;
    Ok(FeReport {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
    })
}

/// Residual of the Fourier-side identity that encodes the functional
/// equation at the level of its two Mellin-transformed halves:
///
///   2 (-1)^eps g_chibar q^{2s+lambda_2+lambda_3-1} G_{eps+delta_3}(s+lambda_3) L(s, tau x chi)
///     = (-1)^{eps+delta_2} g_chi q^{s+lambda_2-1} G_{eps+delta_2}(1-s-lambda_2)
///       * 2 (-1)^{eps+delta_1} g_chi q^{1-2s-lambda_1-lambda_2} G_{eps+delta_1}(1-s-lambda_1)
///         L(1-s, dual x chibar),
///
/// normalized by the modulus of the shared bookkeeping factor
/// 2 g^2 q^{-s-lambda_1} G_{eps+delta_2}(1-s-lambda_2) G_{eps+delta_1}(1-s-lambda_1)
/// so the result is directly comparable to `functional_equation_residual`.
pub fn sigma_rho_fourier_check(
    table: &CoefficientTable,
    params: &GL3Parameters,
    chi: Option<&DirichletCharacter>,
    q: u64,
    n_max: usize,
    s: C64,
    opts: &SmoothedOptions,
) -> Result<f64> {
    match chi {
        Some(chi) => {
            if chi.q != q {
                return Err(Error::Invalid(format!(
                    "character modulus {} does not match q = {q}",
                    chi.q
                )));
            }
            if !chi.is_primitive() {
                return Err(Error::Invalid(
                    "Fourier-side check requires a primitive character".into(),
                ));
            }
        }
        None => {
            if q != 1 {
                return Err(Error::Invalid(
                    "q > 1 needs an explicit primitive character".into(),
                ));
            }
        }
    }
    let local = SmoothedOptions {
        length: n_max,
        ..*opts
    };
    let eps = chi.map_or(0, |c| c.parity) & 1;
    let gauss = chi.map_or(C64::new(1.0, 0.0), |c| c.gauss_sum());
    let chibar = chi.map(|c| c.conjugate());
    let gauss_bar = chibar
        .as_ref()
        .map_or(C64::new(1.0, 0.0), |c| c.gauss_sum());
    let qf = q as f64;
    let one = C64::new(1.0, 0.0);
    let [l1, l2, l3] = params.lambda;
    let [d1, d2, d3] = params.delta;

    let g3 = guarded_g((eps + d3) & 1, s + l3)?;
    let g2 = guarded_g((eps + d2) & 1, one - s - l2)?;
    let g1 = guarded_g((eps + d1) & 1, one - s - l1)?;

    let l_s = l_smoothed(table, params, chi, Direction::Standard, s, &local)?.value;
    let l_dual = l_smoothed(
        table,
        params,
        chibar.as_ref(),
        Direction::Contragredient,
        one - s,
        &local,
    )?
    .value;

    let lhs = 2.0 * sign_pow(eps) * gauss_bar * pow_real(qf, 2.0 * s + l2 + l3 - one) * g3 * l_s;
    let inner = 2.0
        * sign_pow(eps + d1)
        * gauss
        * pow_real(qf, one - 2.0 * s - l1 - l2)
        * g1
        * l_dual;
    let rhs = sign_pow(eps + d2) * gauss * pow_real(qf, s + l2 - one) * g2 * inner;
    let scale = 2.0 * gauss.norm_sqr() * pow_real(qf, -s - l1).norm() * g2.norm() * g1.norm();
    Ok((lhs - rhs).norm() / scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trivial_table(n: usize) -> CoefficientTable {
        let mut edge = vec![C64::new(0.0, 0.0); n + 1];
        edge[1] = C64::new(1.0, 0.0);
        crate::coefficients::build_table(&edge, &edge, n).unwrap()
    }

    #[test]
    fn partial_sum_of_trivial_table_is_one() {
        let t = trivial_table(40);
        let series = LSeries::from_table(&t, None, Direction::Standard);
        for s in [C64::new(2.0, 0.0), C64::new(0.5, 7.0), C64::new(-3.0, 1.0)] {
            assert_eq!(l_partial(&series, s, 40), C64::new(1.0, 0.0));
        }
    }

    #[test]
    fn character_twist_skips_non_coprime_terms() {
        use crate::arithmetic::DirichletGroup;
        let group = DirichletGroup::new(3).unwrap();
        let odd = group
            .characters()
            .unwrap()
            .into_iter()
            .find(|c| !c.is_even())
            .expect("the nontrivial character mod 3 is odd");
        let edge = vec![C64::new(1.0, 0.0); 13];
        let t = crate::coefficients::build_table(&edge, &edge, 12).unwrap();
        let series = LSeries::from_table(&t, Some(odd.clone()), Direction::Standard);
        let s = C64::new(6.0, 0.0);
        let direct = l_partial(&series, s, 12);
        let mut manual = C64::new(0.0, 0.0);
        for n in 1..=12u32 {
            if n % 3 != 0 {
                manual += odd.value(n as i64) * pow_real(n as f64, -s);
            }
        }
        assert!((direct - manual).norm() < 1e-14);
    }

    #[test]
    fn growth_exponent_tracks_polynomial_size() {
        let flat = vec![C64::new(1.0, 0.0); 50];
        assert_eq!(growth_exponent(&flat), 0.0);
        let mut quad = vec![C64::new(0.0, 0.0); 50];
        for (n, z) in quad.iter_mut().enumerate() {
            *z = C64::new((n * n) as f64, 0.0);
        }
        let g = growth_exponent(&quad);
        assert!((g - 2.0).abs() < 1e-12, "got {g}");
    }

    #[test]
    fn pole_lattice_distances() {
        // G_0 poles at 0, -2, -4, ...; G_1 poles at -1, -3, ...
        assert!((lattice_distance(0.0, 0) - 0.0).abs() < 1e-15);
        assert!((lattice_distance(-1.0, 0) - 1.0).abs() < 1e-15);
        assert!((lattice_distance(-9.0, 1) - 0.0).abs() < 1e-15);
        assert!((lattice_distance(-10.0, 1) - 1.0).abs() < 1e-15);
        assert!((lattice_distance(2.3, 0) - 2.3).abs() < 1e-15);
        assert!((lattice_distance(0.4, 1) - 1.4).abs() < 1e-15);
    }

    #[test]
    fn direct_cutoff_is_half_at_the_split() {
        let a: f64 = 40.0;
        let v = 0.5 * erfc(0.5 * a.sqrt() * 1.0_f64.ln());
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn contragredient_reverses_archimedean_data() {
        let p = GL3Parameters::new(
            [C64::new(2.0, 1.0), C64::new(-0.5, 0.0), C64::new(-1.5, -1.0)],
            [1, 1, 0],
        )
        .unwrap();
        let (lambda, delta) = dual_archimedean(&p);
        assert_eq!(lambda[0], C64::new(1.5, 1.0));
        assert_eq!(lambda[2], C64::new(-2.0, -1.0));
        assert_eq!(delta, [0, 1, 1]);
    }
}
