//! Small numeric helpers: deterministic summation and exact integer powers of i.

use crate::C64;

/// Pairwise (tree) summation. Deterministic for a fixed input order and more
/// accurate than naive left-to-right accumulation on long alternating sums.
pub fn pairwise_sum(xs: &[C64]) -> C64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut acc = C64::new(0.0, 0.0);
        for x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Real-valued pairwise summation, same contract as [`pairwise_sum`].
pub fn pairwise_sum_f64(xs: &[f64]) -> f64 {
    const BASE: usize = 32;
    if xs.len() <= BASE {
        let mut acc = 0.0;
        for x in xs {
            acc += x;
        }
        return acc;
    }
    let mid = xs.len() / 2;
    pairwise_sum_f64(&xs[..mid]) + pairwise_sum_f64(&xs[mid..])
}

/// Exact i^k for integer k (any sign), avoiding `powc` roundoff.
pub fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}

/// Exact (-1)^k for integer k.
pub fn neg_one_pow(k: i64) -> f64 {
    if k.rem_euclid(2) == 0 {
        1.0
    } else {
        -1.0
    }
}

/// e(t) = exp(2 pi i t).
pub fn e_of(t: f64) -> C64 {
    let a = 2.0 * std::f64::consts::PI * t;
    C64::new(a.cos(), a.sin())
}

/// base^expo for real base > 0 and complex exponent, via the principal log.
pub fn pow_real(base: f64, expo: C64) -> C64 {
    debug_assert!(base > 0.0, "pow_real needs a positive base, got {base}");
    (expo * base.ln()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairwise_matches_naive_on_short_input() {
        let xs: Vec<C64> = (0..100).map(|k| C64::new(k as f64, -(k as f64) / 3.0)).collect();
        let naive: C64 = xs.iter().sum();
        let tree = pairwise_sum(&xs);
        assert!((naive - tree).norm() < 1e-12);
    }

    #[test]
    fn i_pow_cycle() {
        assert_eq!(i_pow(0), C64::new(1.0, 0.0));
        assert_eq!(i_pow(1), C64::new(0.0, 1.0));
        assert_eq!(i_pow(2), C64::new(-1.0, 0.0));
        assert_eq!(i_pow(3), C64::new(0.0, -1.0));
        assert_eq!(i_pow(-1), C64::new(0.0, -1.0));
        assert_eq!(i_pow(-13), C64::new(0.0, -1.0));
    }
}
