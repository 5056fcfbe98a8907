//! Integration tests for the coefficient engine: independent oracles for the
//! symmetric-square lift, double Dirichlet series cross-checks, and structural
//! properties of tables built from random local data.

use num_complex::Complex64 as C64;
use std::collections::BTreeMap;
use voronoi3::coefficients::{
    build_table, double_dirichlet_check, euler_series, four_term_check, sym_square_lift,
    tau_ramanujan, CoefficientTable, GL2Form, SeriesSide,
};

fn lift_table(n: usize) -> CoefficientTable {
    let f = GL2Form::discriminant_form(n).unwrap();
    sym_square_lift(&f, n).unwrap().1
}

/// Divisor-sum oracle for the lift's Dirichlet coefficients: the row series is
/// zeta(2s) times the series of lambda(n^2), so a_{1,n} is the sum of
/// lambda((n/d^2)^2) over square divisors d^2 | n. Computed straight from the
/// integer tau table, with no shared code with the lift's local recursions.
#[test]
fn lift_first_row_matches_divisor_sum_oracle() {
    let n = 200usize;
    let table = lift_table(n);
    let tau = tau_ramanujan(n * n).unwrap();
    let lam_sq = |k: usize| -> f64 {
        // lambda(k^2) = tau(k^2) / k^11 under Hecke normalization.
        tau[k * k] as f64 / (k as f64).powi(11)
    };
    for m in 1..=n {
        let mut oracle = 0.0;
        let mut d = 1usize;
        while d * d <= m {
            if m % (d * d) == 0 {
                oracle += lam_sq(m / (d * d));
            }
            d += 1;
        }
        let got = table.a(1, m as i64);
        assert!(
            (got - C64::new(oracle, 0.0)).norm() <= 1e-10 * oracle.abs().max(1.0),
            "m={m}: lift {got}, oracle {oracle}"
        );
    }
}

#[test]
fn lift_table_is_self_dual_and_real() {
    let n = 120usize;
    let table = lift_table(n);
    for r in 1..=n as i64 {
        for s in 1..=n as i64 {
            let a = table.a(r, s);
            assert!(a.im.abs() < 1e-14, "entry ({r},{s}) not real: {a}");
            assert!(
                (a - table.a(s, r)).norm() < 1e-12,
                "asymmetry at ({r},{s})"
            );
        }
    }
}

#[test]
fn four_term_bound_at_full_truncation() {
    let n = 1000usize;
    let table = lift_table(n);
    let worst = four_term_check(&table);
    let bound = 1e-10 * table.max_abs();
    assert!(worst <= bound, "four-term violation {worst} > {bound}");
}

#[test]
fn double_dirichlet_factorization_example() {
    let n = 200usize;
    let table = lift_table(n);
    let s = C64::new(6.0, 0.0);
    let rep = double_dirichlet_check(&table, s, s, n).unwrap();
    assert!(rep.residual <= 1e-8, "residual {}", rep.residual);
    assert!(rep.tail_estimate.is_finite() && rep.tail_estimate > 0.0);
}

#[test]
fn double_dirichlet_tail_estimate_decreases() {
    let table = lift_table(200);
    let s = C64::new(6.0, 0.0);
    let mut last = f64::INFINITY;
    for n in [50usize, 100, 150, 200] {
        let rep = double_dirichlet_check(&table, s, s, n).unwrap();
        assert!(
            rep.tail_estimate < last,
            "tail estimate not decreasing at n={n}: {} >= {last}",
            rep.tail_estimate
        );
        last = rep.tail_estimate;
    }
}

#[test]
fn double_dirichlet_detects_single_entry_perturbation() {
    let n = 100usize;
    let mut table = lift_table(n);
    let s = C64::new(6.0, 0.0);
    let clean = double_dirichlet_check(&table, s, s, n).unwrap().residual;
    table.set(2, 3, table.a(2, 3) + C64::new(1e-3, 0.0));
    let dirty = double_dirichlet_check(&table, s, s, n).unwrap().residual;
    // The bump feeds the left side only, at scale 1e-3 * 6^-6.
    let expected = 1e-3 / 6f64.powi(6);
    assert!(clean < 0.01 * expected, "clean residual too big: {clean}");
    assert!(
        (dirty - expected).abs() < 0.1 * expected,
        "perturbation not detected: {dirty} vs {expected}"
    );
}

#[test]
fn double_dirichlet_rejects_divergent_region() {
    let table = lift_table(20);
    let err = double_dirichlet_check(&table, C64::new(1.2, 0.0), C64::new(6.0, 0.0), 20);
    assert!(err.is_err());
}

/// With the delta row and column (a_{1,1} = 1, everything else zero) the table
/// collapses to mu on the diagonal and both sides equal a truncated 1/zeta.
#[test]
fn moebius_delta_table_gives_truncated_inverse_zeta() {
    let n = 80usize;
    let mut row = vec![C64::new(0.0, 0.0); n + 1];
    row[1] = C64::new(1.0, 0.0);
    let table = build_table(&row, &row, n).unwrap();
    let s = C64::new(6.0, 0.0);
    let rep = double_dirichlet_check(&table, s, s, n).unwrap();
    let mut inv_zeta = C64::new(0.0, 0.0);
    for j in 1..=n as u64 {
        let mu = voronoi3::arithmetic::moebius(j);
        if mu != 0 {
            inv_zeta += C64::new(mu as f64, 0.0) * C64::new(j as f64, 0.0).powc(-(s + s));
        }
    }
    assert!((rep.lhs - inv_zeta).norm() < 1e-13, "lhs {}", rep.lhs);
    assert!((rep.rhs - inv_zeta).norm() < 1e-13, "rhs {}", rep.rhs);
}

#[test]
fn csv_round_trip_is_bit_exact() {
    let table = lift_table(40);
    let mut buf: Vec<u8> = Vec::new();
    table.to_csv(&mut buf).unwrap();
    let back = CoefficientTable::from_csv(&buf[..]).unwrap();
    assert_eq!(back.n, table.n);
    for r in 1..=40i64 {
        for s in 1..=40i64 {
            let a = table.a(r, s);
            let b = back.a(r, s);
            assert!(
                a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits(),
                "round trip not exact at ({r},{s})"
            );
        }
    }
    let mut again: Vec<u8> = Vec::new();
    back.to_csv(&mut again).unwrap();
    assert_eq!(buf, again, "serialized bytes differ after round trip");
}

mod properties {
    use super::*;
    use proptest::prelude::*;

    fn primes_to(n: usize) -> Vec<usize> {
        (2..=n).filter(|&k| (2..k).all(|d| k % d != 0)).collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        /// Dual-route structural check: a table built by Moebius assembly from a
        /// row/column pair that share degree-three local data always satisfies
        /// the four-term relations, for random complex local coefficients.
        #[test]
        fn random_local_data_tables_pass_four_term(seed_re in proptest::collection::vec(-1.5f64..1.5, 18),
                                                   seed_im in proptest::collection::vec(-1.5f64..1.5, 18)) {
            let n = 60usize;
            let primes = primes_to(n);
            let mut a_1p = BTreeMap::new();
            let mut a_p1 = BTreeMap::new();
            for (k, &p) in primes.iter().enumerate() {
                let c1 = C64::new(seed_re[k % seed_re.len()], seed_im[k % seed_im.len()]);
                let c2 = C64::new(seed_im[(k + 7) % seed_im.len()], seed_re[(k + 3) % seed_re.len()]);
                a_1p.insert(p as u64, c1);
                a_p1.insert(p as u64, c2);
            }
            let row = euler_series(&a_1p, &a_p1, SeriesSide::Row, n).unwrap();
            let col = euler_series(&a_1p, &a_p1, SeriesSide::Column, n).unwrap();
            let table = build_table(&row, &col, n).unwrap();
            let worst = four_term_check(&table);
            let bound = 1e-11 * table.max_abs().max(1.0);
            prop_assert!(worst <= bound, "violation {} > {}", worst, bound);
        }
    }
}
