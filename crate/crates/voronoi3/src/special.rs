//! Complex special functions: principal-branch log-gamma, the normalized gamma
//! factors, and the signed gamma-ratio factors `G_delta` together with their
//! pole/zero bookkeeping and an oscillatory-integral cross-check.

use crate::error::{Error, Result};
use crate::util::i_pow;
use crate::C64;
use std::f64::consts::{FRAC_PI_2, LN_2, PI};

/// Guard distance below which gamma-factor evaluation refuses to proceed.
pub const POLE_TOL: f64 = 1e-9;

const LN_PI: f64 = 1.144_729_885_849_400_2_f64;
const LN_2PI: f64 = 1.837_877_066_409_345_6_f64;

/// Stirling coefficients B_{2k} / (2k (2k-1)) for k = 1..=8.
const STIRLING: [f64; 8] = [
    1.0 / 12.0,
    -1.0 / 360.0,
    1.0 / 1260.0,
    -1.0 / 1680.0,
    1.0 / 1188.0,
    -691.0 / 360_360.0,
    1.0 / 156.0,
    -3617.0 / 122_400.0,
];

/// Principal-branch log-gamma, analytic on the plane cut along the nonpositive
/// real axis and real on (0, inf). Real arguments on the cut are treated as
/// limits from the upper half plane. Returns re = +inf at the poles.
pub fn log_gamma(z: C64) -> C64 {
    if z.im == 0.0 && z.re <= 0.5 && z.re == z.re.round() {
        return C64::new(f64::INFINITY, 0.0);
    }
    if z.re >= 0.5 {
        return lg_shift_stirling(z);
    }
    if z.im >= 0.0 {
        // Reflection; the unwound log-sin keeps the branch consistent with the
        // Stirling region across the whole upper half plane.
        C64::new(LN_PI, 0.0) - log_sin(PI * z) - lg_shift_stirling(1.0 - z)
    } else {
        log_gamma(z.conj()).conj()
    }
}

/// Recurrence shift into Re >= 10, then the Stirling series. Valid for Re z >= 0.5.
fn lg_shift_stirling(z: C64) -> C64 {
    let mut shift = C64::new(0.0, 0.0);
    let mut w = z;
    while w.re < 10.0 {
        shift -= w.ln();
        w += 1.0;
    }
    let r = 1.0 / w;
    let r2 = r * r;
    let mut series = C64::new(STIRLING[7], 0.0);
    for k in (0..7).rev() {
        series = series * r2 + STIRLING[k];
    }
    (w - 0.5) * w.ln() - w + 0.5 * LN_2PI + series * r + shift
}

/// log sin w, analytic continuation agreeing with the real logarithm on (0, pi).
/// Intended for use under exp(); the imaginary part is not reduced mod 2 pi.
pub fn log_sin(w: C64) -> C64 {
    if w.im >= 0.0 {
        let q = (C64::new(0.0, 2.0) * w).exp();
        C64::new(0.0, -1.0) * w + C64::new(-LN_2, FRAC_PI_2) + (C64::new(1.0, 0.0) - q).ln()
    } else {
        log_sin(w.conj()).conj()
    }
}

/// log cos w, analytic continuation agreeing with the real logarithm on (-pi/2, pi/2).
pub fn log_cos(w: C64) -> C64 {
    if w.im >= 0.0 {
        let q = (C64::new(0.0, 2.0) * w).exp();
        C64::new(0.0, -1.0) * w - LN_2 + (C64::new(1.0, 0.0) + q).ln()
    } else {
        log_cos(w.conj()).conj()
    }
}

/// log of Gamma_R(s) = pi^{-s/2} Gamma(s/2).
pub fn log_gamma_r(s: C64) -> C64 {
    -0.5 * LN_PI * s + log_gamma(0.5 * s)
}

/// Gamma_R(s) = pi^{-s/2} Gamma(s/2).
pub fn gamma_r(s: C64) -> C64 {
    log_gamma_r(s).exp()
}

/// log of Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
pub fn log_gamma_c(s: C64) -> C64 {
    C64::new(LN_2, 0.0) - LN_2PI * s + log_gamma(s)
}

/// Gamma_C(s) = 2 (2 pi)^{-s} Gamma(s).
pub fn gamma_c(s: C64) -> C64 {
    log_gamma_c(s).exp()
}

/// Location of the nearest pole of G_delta if s lies within `tol` of one.
/// Poles are the nonpositive integers of parity delta.
pub fn g_near_pole(delta: u8, s: C64, tol: f64) -> Option<f64> {
    let n = s.re.round();
    if n <= 0.0 && (s - C64::new(n, 0.0)).norm() <= tol && parity_of(n) == (delta & 1) {
        Some(n)
    } else {
        None
    }
}

fn parity_of(n: f64) -> u8 {
    n.rem_euclid(2.0) as u8
}

/// Order of G_delta at the integer n: -1 for a (simple) pole, +1 for a (simple)
/// zero, 0 otherwise. Poles sit at nonpositive integers of parity delta, zeros
/// at positive integers of the opposite parity.
pub fn g_pole_zero_order(delta: u8, n: i64) -> i32 {
    let p = (n.rem_euclid(2)) as u8;
    if n <= 0 && p == (delta & 1) {
        -1
    } else if n >= 1 && p != (delta & 1) {
        1
    } else {
        0
    }
}

/// G_0(s) = Gamma_C(s) cos(pi s / 2), G_1(s) = i Gamma_C(s) sin(pi s / 2),
/// computed in log space so the gamma growth and the trig decay cancel stably.
pub fn g_delta(delta: u8, s: C64) -> Result<C64> {
    if let Some(n) = g_near_pole(delta, s, POLE_TOL) {
        return Err(Error::NearPole {
            at: format!("G_{}({})", delta & 1, n),
            tol: POLE_TOL,
        });
    }
    let lg = log_gamma_c(s);
    let half = C64::new(FRAC_PI_2, 0.0) * s;
    let v = if delta & 1 == 0 {
        (lg + log_cos(half)).exp()
    } else {
        C64::new(0.0, 1.0) * (lg + log_sin(half)).exp()
    };
    Ok(v)
}

/// Same function through its other closed form, i^delta Gamma_R(s + delta) /
/// Gamma_R(1 - s + delta). Kept as an independent route for cross-checks.
pub fn g_delta_ratio(delta: u8, s: C64) -> Result<C64> {
    if let Some(n) = g_near_pole(delta, s, POLE_TOL) {
        return Err(Error::NearPole {
            at: format!("G_{}({})", delta & 1, n),
            tol: POLE_TOL,
        });
    }
    let d = (delta & 1) as f64;
    let num = log_gamma_r(s + d);
    let den = log_gamma_r(C64::new(1.0 + d, 0.0) - s);
    Ok(i_pow((delta & 1) as i64) * (num - den).exp())
}

/// Product of G factors Prod_j G_{parities[j]}(s + shifts[j]) with the shared
/// pole guard applied to every factor.
pub fn g_product(parities: &[u8], shifts: &[C64], s: C64) -> Result<C64> {
    assert_eq!(parities.len(), shifts.len());
    let mut acc = C64::new(1.0, 0.0);
    for (&p, &sh) in parities.iter().zip(shifts) {
        acc *= g_delta(p, s + sh)?;
    }
    Ok(acc)
}

/// The three-factor product prod_j G_{eps+delta_j}(s + lambda_j) attached to a
/// rank-three parameter set and a twist parity eps.
pub fn gamma_product(
    s: C64,
    params: &crate::coefficients::GL3Parameters,
    eps: u8,
) -> Result<C64> {
    let parities = [
        (eps + params.delta[0]) & 1,
        (eps + params.delta[1]) & 1,
        (eps + params.delta[2]) & 1,
    ];
    g_product(&parities, &params.lambda, s)
}

/// Smooth step: 1 on u <= 0, 0 on u >= 1, infinitely differentiable between.
pub(crate) fn smooth_step(u: f64) -> f64 {
    if u <= 0.0 {
        return 1.0;
    }
    if u >= 1.0 {
        return 0.0;
    }
    let f = |t: f64| (-1.0 / t).exp();
    f(1.0 - u) / (f(1.0 - u) + f(u))
}

/// Oscillatory-integral route to G_delta for real s in (0, 1): the Fourier
/// integral of |x|^{s-1} sgn(x)^delta against e(x). The head x in [0, 1] is
/// integrated exactly by the termwise-integrated trig series; the tail is
/// integrated in the variable v = sqrt(x) (smooth for v >= 1) with a smooth
/// damping window on [cut, 2 cut].
///
/// This is deliberately independent of the gamma machinery above; it exists to
/// pin the normalization (the 2 pi convention and the i^delta sign) to the
/// defining integral.
pub fn g_delta_integral(delta: u8, s: f64) -> Result<C64> {
    if !(0.0..1.0).contains(&s) || s == 0.0 {
        return Err(Error::Invalid(format!(
            "oscillatory route needs 0 < s < 1, got {s}"
        )));
    }
    // Head: integral over [0, 1] of trig(2 pi x) x^{s-1} dx, termwise.
    let two_pi = 2.0 * PI;
    let mut head = 0.0_f64;
    let mut term_pow = if delta & 1 == 0 { 1.0 } else { two_pi };
    let mut fact = 1.0_f64;
    let mut k = 0u32;
    loop {
        let m = if delta & 1 == 0 { 2 * k } else { 2 * k + 1 };
        let term = term_pow / fact / (s + m as f64);
        head += if k.is_multiple_of(2) { term } else { -term };
        if term.abs() < 1e-18 && m as f64 > two_pi {
            break;
        }
        term_pow *= two_pi * two_pi;
        fact *= ((m + 1) * (m + 2)) as f64;
        k += 1;
    }
    // Tail: x in [1, 2 cut], substituted x = v^2.
    let cut = 24.0_f64;
    let vmax = (2.0 * cut).sqrt();
    let h = 0.002;
    let n = (((vmax - 1.0) / h).ceil() as usize + 1) & !1usize; // even interval count
    let h = (vmax - 1.0) / n as f64;
    let expo = 2.0 * s - 1.0;
    let eval = |v: f64| -> f64 {
        let x = v * v;
        let w = smooth_step((x - cut) / cut);
        if w == 0.0 {
            return 0.0;
        }
        let osc = if delta & 1 == 0 {
            (two_pi * x).cos()
        } else {
            (two_pi * x).sin()
        };
        osc * v.powf(expo) * w
    };
    let mut acc = eval(1.0) + eval(vmax);
    for j in 1..n {
        let c = if j % 2 == 1 { 4.0 } else { 2.0 };
        acc += c * eval(1.0 + j as f64 * h);
    }
    let tail = 2.0 * acc * h / 3.0;
    let v = 2.0 * (head + tail);
    Ok(if delta & 1 == 0 {
        C64::new(v, 0.0)
    } else {
        C64::new(0.0, v)
    })
}

/// Real complementary error function, used by the smoothed partial sums.
pub fn erfc(x: f64) -> f64 {
    statrs::function::erf::erfc(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: C64, b: C64, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn log_gamma_half_integer_anchors() {
        // Gamma(1/2) = sqrt(pi), Gamma(1) = 1, Gamma(5) = 24.
        assert!(close(
            log_gamma(C64::new(0.5, 0.0)),
            C64::new(0.5 * LN_PI, 0.0),
            1e-14
        ));
        assert!(log_gamma(C64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(close(
            log_gamma(C64::new(5.0, 0.0)),
            C64::new(24.0_f64.ln(), 0.0),
            1e-14
        ));
    }

    #[test]
    fn log_gamma_recurrence_holds_left_of_the_strip() {
        // ln Gamma(z) = ln Gamma(z+1) - Ln z away from the cut.
        for &z in &[
            C64::new(-3.3, 0.7),
            C64::new(-7.25, -2.0),
            C64::new(-0.5, 0.0),
            C64::new(0.25, 14.0),
        ] {
            let lhs = log_gamma(z);
            let rhs = log_gamma(z + 1.0) - z.ln();
            assert!((lhs - rhs).norm() < 1e-11, "z={z} lhs={lhs} rhs={rhs}");
        }
    }

    #[test]
    fn duplication_identity() {
        // Gamma_C(s) = Gamma_R(s) Gamma_R(s+1).
        for &s in &[
            C64::new(0.3, 0.0),
            C64::new(1.7, -4.0),
            C64::new(-2.3, 0.4),
            C64::new(5.0, 19.0),
        ] {
            let lhs = log_gamma_c(s);
            let rhs = log_gamma_r(s) + log_gamma_r(s + 1.0);
            // Compare values, not logs: branches may differ by 2 pi i.
            assert!(close(lhs.exp(), rhs.exp(), 1e-12), "s={s}");
        }
    }

    #[test]
    fn g_routes_agree() {
        for delta in 0..2u8 {
            for &s in &[
                C64::new(0.5, 0.0),
                C64::new(0.5, 2.0),
                C64::new(-0.75, -3.0),
                C64::new(2.5, 0.25),
                C64::new(-5.5, 1.0),
            ] {
                let a = g_delta(delta, s).unwrap();
                let b = g_delta_ratio(delta, s).unwrap();
                assert!(close(a, b, 1e-11), "delta={delta} s={s} a={a} b={b}");
            }
        }
    }

    #[test]
    fn g_reflection_product_is_unit() {
        // G_delta(s) G_delta(1-s) = (-1)^delta.
        for delta in 0..2u8 {
            for &s in &[C64::new(0.3, 1.0), C64::new(-1.2, -0.5), C64::new(0.5, 7.0)] {
                let p = g_delta(delta, s).unwrap() * g_delta(delta, C64::new(1.0, 0.0) - s).unwrap();
                let want = C64::new(if delta == 0 { 1.0 } else { -1.0 }, 0.0);
                assert!((p - want).norm() < 1e-11, "delta={delta} s={s} p={p}");
            }
        }
    }

    #[test]
    fn g_pole_guard_fires() {
        assert!(g_delta(0, C64::new(0.0, 0.0)).is_err());
        assert!(g_delta(0, C64::new(-2.0, 5e-10)).is_err());
        assert!(g_delta(1, C64::new(-3.0, 0.0)).is_err());
        // Opposite parity at the same point is regular.
        assert!(g_delta(1, C64::new(-2.0, 0.0)).is_ok());
        assert!(g_delta(0, C64::new(-3.0, 0.0)).is_ok());
    }

    #[test]
    fn g_zero_locations() {
        // Zeros at positive integers of opposite parity.
        let z0 = g_delta(0, C64::new(3.0, 0.0)).unwrap();
        let z1 = g_delta(1, C64::new(4.0, 0.0)).unwrap();
        assert!(z0.norm() < 1e-12, "{z0}");
        assert!(z1.norm() < 1e-12, "{z1}");
        assert_eq!(g_pole_zero_order(0, 3), 1);
        assert_eq!(g_pole_zero_order(1, 4), 1);
        assert_eq!(g_pole_zero_order(0, 0), -1);
        assert_eq!(g_pole_zero_order(1, -3), -1);
        assert_eq!(g_pole_zero_order(0, -3), 0);
        assert_eq!(g_pole_zero_order(1, 2), 1);
        assert_eq!(g_pole_zero_order(1, 1), 0);
    }
}
