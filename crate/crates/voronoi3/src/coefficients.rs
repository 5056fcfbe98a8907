//! Hecke coefficient engine: builds the full two-index coefficient table from its
//! first row and column, verifies the multiplicative identities the table must
//! satisfy, and supplies the two concrete coefficient sources shipped with the
//! crate (the discriminant cusp form and its symmetric-square lift).

use crate::arithmetic::{divisors, moebius};
use crate::error::{Error, Result};
use crate::util::{pairwise_sum, pow_real};
use crate::C64;
use std::collections::BTreeMap;
use std::io::{BufRead, Write};

/// Archimedean data of a rank-three representation: spectral shifts and parities.
#[derive(Debug, Clone, PartialEq)]
pub struct GL3Parameters {
    pub lambda: [C64; 3],
    pub delta: [u8; 3],
}

impl GL3Parameters {
    /// Checks the defining constraints: the shifts sum to zero and the parities
    /// sum to zero mod 2.
    pub fn new(lambda: [C64; 3], delta: [u8; 3]) -> Result<Self> {
        let sum: C64 = lambda.iter().sum();
        if sum.norm() > 1e-12 {
            return Err(Error::Invalid(format!(
                "spectral shifts must sum to zero, got {sum}"
            )));
        }
        if delta.iter().any(|&d| d > 1) {
            return Err(Error::Invalid("parities must be 0 or 1".into()));
        }
        if !(delta[0] + delta[1] + delta[2]).is_multiple_of(2) {
            return Err(Error::Invalid("parities must sum to zero mod 2".into()));
        }
        Ok(GL3Parameters { lambda, delta })
    }

    pub fn max_re_lambda(&self) -> f64 {
        self.lambda.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Dense table of normalized coefficients a_{r,s} for 1 <= r, s <= N, extended
/// by zero at index 0 and symmetrically to negative indices.
#[derive(Debug, Clone)]
pub struct CoefficientTable {
    pub n: usize,
    /// Row-major, (n+1) x (n+1); row and column 0 are identically zero.
    a: Vec<C64>,
    pub normalized: bool,
}

impl CoefficientTable {
    /// Coefficient at signed indices: a_{r,s} = a_{|r|,|s|}, zero when either
    /// index is zero. Indices beyond the truncation are an error in the caller.
    pub fn a(&self, r: i64, s: i64) -> C64 {
        if r == 0 || s == 0 {
            return C64::new(0.0, 0.0);
        }
        let (ru, su) = (r.unsigned_abs() as usize, s.unsigned_abs() as usize);
        assert!(
            ru <= self.n && su <= self.n,
            "coefficient index ({r},{s}) beyond table truncation {}",
            self.n
        );
        self.a[ru * (self.n + 1) + su]
    }

    pub fn set(&mut self, r: usize, s: usize, v: C64) {
        assert!(r >= 1 && s >= 1 && r <= self.n && s <= self.n);
        self.a[r * (self.n + 1) + s] = v;
    }

    /// First row a_{1,s}, index s (entry 0 is zero).
    pub fn first_row(&self) -> Vec<C64> {
        (0..=self.n).map(|s| self.a[self.n + 1 + s]).collect()
    }

    /// First column a_{r,1}, index r (entry 0 is zero).
    pub fn first_col(&self) -> Vec<C64> {
        (0..=self.n).map(|r| self.a[r * (self.n + 1) + 1]).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.a.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// CSV serialization: header `r,s,re,im`, rows in (r, s) lexicographic order,
    /// 17-significant-digit floats so the round trip is exact.
    pub fn to_csv<W: Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "r,s,re,im")?;
        for r in 1..=self.n {
            for s in 1..=self.n {
                let v = self.a[r * (self.n + 1) + s];
                writeln!(w, "{r},{s},{:.16e},{:.16e}", v.re, v.im)?;
            }
        }
        Ok(())
    }

    pub fn from_csv<R: BufRead>(reader: R) -> Result<Self> {
        let mut entries: Vec<(usize, usize, C64)> = Vec::new();
        let mut n = 0usize;
        for (k, line) in reader.lines().enumerate() {
            let line = line.map_err(|e| Error::Invalid(format!("csv read: {e}")))?;
            if k == 0 {
                if line.trim() != "r,s,re,im" {
                    return Err(Error::Invalid(format!("bad csv header: {line}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let mut it = line.split(',');
            let mut next = || {
                it.next()
                    .ok_or_else(|| Error::Invalid(format!("short csv row: {line}")))
            };
            let r: usize = next()?.trim().parse().map_err(|e| Error::Invalid(format!("{e}")))?;
            let s: usize = next()?.trim().parse().map_err(|e| Error::Invalid(format!("{e}")))?;
            let re: f64 = next()?.trim().parse().map_err(|e| Error::Invalid(format!("{e}")))?;
            let im: f64 = next()?.trim().parse().map_err(|e| Error::Invalid(format!("{e}")))?;
            n = n.max(r).max(s);
            entries.push((r, s, C64::new(re, im)));
        }
        let mut a = vec![C64::new(0.0, 0.0); (n + 1) * (n + 1)];
        for (r, s, v) in entries {
            a[r * (n + 1) + s] = v;
        }
        let normalized = (a[n + 2] - C64::new(1.0, 0.0)).norm() < 1e-12;
        Ok(CoefficientTable { n, a, normalized })
    }
}

/// Builds the full table from its first row and column through the Moebius
/// recursion a_{r,s} = sum over d | (r,s) of mu(d) a_{r/d,1} a_{1,s/d}.
///
/// `first_row[k]` is a_{1,k} and `first_col[k]` is a_{k,1}; entry 0 is ignored.
/// Both slices must have length n + 1 and agree on a_{1,1} = 1.
pub fn build_table(first_row: &[C64], first_col: &[C64], n: usize) -> Result<CoefficientTable> {
    if first_row.len() != n + 1 || first_col.len() != n + 1 {
        return Err(Error::Invalid(format!(
            "row/col length must be n+1 = {}, got {} and {}",
            n + 1,
            first_row.len(),
            first_col.len()
        )));
    }
    let one = C64::new(1.0, 0.0);
    if (first_row[1] - one).norm() > 1e-12 || (first_col[1] - one).norm() > 1e-12 {
        return Err(Error::Invalid(
            "table must be normalized: a_{1,1} = 1 in both row and column".into(),
        ));
    }
    let mut a = vec![C64::new(0.0, 0.0); (n + 1) * (n + 1)];
    for r in 1..=n {
        for s in 1..=n {
            let g = crate::arithmetic::gcd(r as i64, s as i64) as u64;
            let mut acc = C64::new(0.0, 0.0);
            for d in divisors(g) {
                let mu = moebius(d);
                if mu == 0 {
                    continue;
                }
                let term = first_col[r / d as usize] * first_row[s / d as usize];
                acc += if mu > 0 { term } else { -term };
            }
            a[r * (n + 1) + s] = acc;
        }
    }
    Ok(CoefficientTable { n, a, normalized: true })
}

fn primes_up_to(n: usize) -> Vec<usize> {
    if n < 2 {
        return vec![];
    }
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut p = 2;
    while p * p <= n {
        if sieve[p] {
            let mut k = p * p;
            while k <= n {
                sieve[k] = false;
                k += p;
            }
        }
        p += 1;
    }
    (2..=n).filter(|&k| sieve[k]).collect()
}

/// Maximum absolute violation of the two four-term relations at one prime,
/// over all (r, s) with rp <= N and sp <= N; omitted-index convention applies.
pub fn hecke_action_check(t: &CoefficientTable, p: usize) -> f64 {
    let n = t.n;
    if p < 2 || p > n {
        return 0.0;
    }
    let at = |r: usize, s: usize| t.a(r as i64, s as i64);
    let a1p = at(1, p);
    let ap1 = at(p, 1);
    let mut worst = 0.0_f64;
    let bound = n / p;
    for r in 1..=bound {
        for s in 1..=bound {
            let ars = at(r, s);
            let mut rhs1 = at(r, s * p);
            if r % p == 0 {
                rhs1 += at(r / p, s);
            }
            if s % p == 0 {
                rhs1 += at(r * p, s / p);
            }
            worst = worst.max((a1p * ars - rhs1).norm());
            let mut rhs2 = at(r * p, s);
            if s % p == 0 {
                rhs2 += at(r, s / p);
            }
            if r % p == 0 {
                rhs2 += at(r / p, s * p);
            }
            worst = worst.max((ap1 * ars - rhs2).norm());
        }
    }
    worst
}

/// Maximum four-term violation over all primes p <= N.
pub fn four_term_check(t: &CoefficientTable) -> f64 {
    let mut worst = 0.0_f64;
    for p in primes_up_to(t.n) {
        worst = worst.max(hecke_action_check(t, p));
    }
    worst
}

/// Which one-index series of the table an Euler product expands.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesSide {
    Row,
    Column,
}

/// Expands the degree-three Euler product with local factors
/// (1 - c1 p^{-s} + c2 p^{-2s} - p^{-3s})^{-1} into Dirichlet coefficients up
/// to index n, where (c1, c2) = (a_{1,p}, a_{p,1}) for the row series and the
/// swap for the column series.
pub fn euler_series(
    a_1p: &BTreeMap<u64, C64>,
    a_p1: &BTreeMap<u64, C64>,
    which: SeriesSide,
    n: usize,
) -> Result<Vec<C64>> {
    let mut out = vec![C64::new(0.0, 0.0); n + 1];
    if n == 0 {
        return Ok(out);
    }
    out[1] = C64::new(1.0, 0.0);
    let primes = primes_up_to(n);
    let mut local: BTreeMap<usize, Vec<C64>> = BTreeMap::new();
    for &p in &primes {
        let c1 = *a_1p
            .get(&(p as u64))
            .ok_or_else(|| Error::Invalid(format!("missing a_(1,p) for p={p}")))?;
        let c2 = *a_p1
            .get(&(p as u64))
            .ok_or_else(|| Error::Invalid(format!("missing a_(p,1) for p={p}")))?;
        let (c1, c2) = match which {
            SeriesSide::Row => (c1, c2),
            SeriesSide::Column => (c2, c1),
        };
        // Local power-series inversion: b_k = c1 b_{k-1} - c2 b_{k-2} + b_{k-3}.
        let kmax = n.ilog(p) as usize;
        let mut b = vec![C64::new(1.0, 0.0); kmax + 1];
        for k in 1..=kmax {
            let mut v = c1 * b[k - 1];
            if k >= 2 {
                v -= c2 * b[k - 2];
            }
            if k >= 3 {
                v += b[k - 3];
            }
            b[k] = v;
        }
        local.insert(p, b);
    }
    let mut spf = vec![0usize; n + 1];
    for &p in &primes {
        let mut m = p;
        while m <= n {
            if spf[m] == 0 {
                spf[m] = p;
            }
            m += p;
        }
    }
    // Multiplicative fill: strip the smallest prime factor, reuse the cofactor.
    for m in 2..=n {
        let p = spf[m];
        let mut k = 0usize;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        out[m] = out[rest] * local[&p][k];
    }
    Ok(out)
}

/// Result of the double Dirichlet series comparison.
#[derive(Debug, Clone)]
pub struct DoubleDirichletReport {
    pub lhs: C64,
    pub rhs: C64,
    pub residual: f64,
    /// Bound on the discarded tail of the double series, from a polynomial
    /// growth fit of the table entries.
    pub tail_estimate: f64,
}

/// Compares the double Dirichlet series of the table against the product of its
/// row series, column series and inverse zeta, all three truncated with matched
/// cutoff semantics (every retained product term has both combined indices <= n).
pub fn double_dirichlet_check(
    t: &CoefficientTable,
    s1: C64,
    s2: C64,
    n: usize,
) -> Result<DoubleDirichletReport> {
    if n > t.n {
        return Err(Error::Invalid(format!("n={n} exceeds table truncation {}", t.n)));
    }
    if s1.re < 2.0 || s2.re < 2.0 {
        return Err(Error::Contour(format!(
            "double series compared at Re s1 = {}, Re s2 = {}; need both >= 2",
            s1.re, s2.re
        )));
    }
    // LHS: straight double sum.
    let mut terms = Vec::with_capacity(n * n);
    for r in 1..=n {
        let rp = pow_real(r as f64, -s1);
        for s in 1..=n {
            terms.push(t.a(r as i64, s as i64) * rp * pow_real(s as f64, -s2));
        }
    }
    let lhs = pairwise_sum(&terms);
    // RHS: sum over j of mu(j) j^{-s1-s2} L_{<=n/j}(s2) Ltilde_{<=n/j}(s1).
    let row = t.first_row();
    let col = t.first_col();
    let mut rhs_terms = Vec::new();
    for j in 1..=n {
        let mu = moebius(j as u64);
        if mu == 0 {
            continue;
        }
        let cap = n / j;
        if cap == 0 {
            break;
        }
        let lt: Vec<C64> = (1..=cap).map(|m| col[m] * pow_real(m as f64, -s1)).collect();
        let l: Vec<C64> = (1..=cap).map(|k| row[k] * pow_real(k as f64, -s2)).collect();
        let factor = pairwise_sum(&lt) * pairwise_sum(&l);
        let zeta_term = pow_real(j as f64, -(s1 + s2)) * mu as f64;
        rhs_terms.push(zeta_term * factor);
    }
    let rhs = pairwise_sum(&rhs_terms);
    // Tail bound: |a_{r,s}| <= c (r s)^theta with theta = 0.6 (comfortable for
    // normalized cuspidal tables); tail of a double zeta beyond n.
    let theta = 0.6;
    let mut c = 0.0_f64;
    for r in 1..=n {
        for s in 1..=n {
            let v = t.a(r as i64, s as i64).norm() / ((r * s) as f64).powf(theta);
            c = c.max(v);
        }
    }
    let b1 = s1.re - theta;
    let b2 = s2.re - theta;
    let zeta_full = |b: f64| 1.0 + 1.0 / (b - 1.0);
    let zeta_tail = |b: f64| (n as f64).powf(1.0 - b) / (b - 1.0);
    let tail_estimate = c * (zeta_tail(b1) * zeta_full(b2) + zeta_full(b1) * zeta_tail(b2));
    Ok(DoubleDirichletReport {
        lhs,
        rhs,
        residual: (lhs - rhs).norm(),
        tail_estimate,
    })
}

/// Coefficients of the weight-12 discriminant cusp form: tau(n) for n <= n_max,
/// exact integers, computed from the 24th power of the eta-product using the
/// sparse pentagonal-type expansion of the cube.
///
/// tau[0] is 0; the vector has length n_max + 1.
pub fn tau_ramanujan(n_max: usize) -> Result<Vec<i128>> {
    if n_max > 100_000 {
        return Err(Error::Invalid(format!(
            "tau table capped at 100000, asked for {n_max}"
        )));
    }
    let mut out = vec![0i128; n_max + 1];
    if n_max == 0 {
        return Ok(out);
    }
    let deg = n_max - 1;
    // Cube of the eta-like product: sum_m (-1)^m (2m+1) x^{m(m+1)/2}.
    let mut sparse: Vec<(usize, i128)> = Vec::new();
    let mut m = 0usize;
    loop {
        let e = m * (m + 1) / 2;
        if e > deg {
            break;
        }
        let c = (2 * m + 1) as i128;
        sparse.push((e, if m.is_multiple_of(2) { c } else { -c }));
        m += 1;
    }
    let mut acc = vec![0i128; deg + 1];
    for &(e, c) in &sparse {
        acc[e] = c;
    }
    // Seven further multiplications give the 8th power, i.e. the 24th power of
    // the product itself.
    for _ in 0..7 {
        let mut next = vec![0i128; deg + 1];
        for (i, &ai) in acc.iter().enumerate() {
            if ai == 0 {
                continue;
            }
            for &(e, c) in &sparse {
                if i + e > deg {
                    break;
                }
                next[i + e] += ai * c;
            }
        }
        acc = next;
    }
    out[1..=n_max].copy_from_slice(&acc[..n_max]);
    Ok(out)
}

/// A rank-two cusp form presented through its Hecke-normalized coefficients.
#[derive(Debug, Clone)]
pub struct GL2Form {
    pub kind: GL2FormKind,
    /// a_n at index n (entry 0 unused); Hecke-normalized, a_1 = 1.
    pub coefficients: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum GL2FormKind {
    Holomorphic { weight: u32 },
    Maass { nu: C64 },
}

impl GL2Form {
    /// Spectral parameter: nu = -(k-1)/2 in the holomorphic case.
    pub fn nu(&self) -> C64 {
        match &self.kind {
            GL2FormKind::Holomorphic { weight } => C64::new(-((*weight as f64) - 1.0) / 2.0, 0.0),
            GL2FormKind::Maass { nu } => *nu,
        }
    }

    /// Signed coefficient: zero for n <= 0 in the holomorphic case.
    pub fn coefficient(&self, n: i64) -> f64 {
        if n == 0 {
            return 0.0;
        }
        if n < 0 {
            return match self.kind {
                GL2FormKind::Holomorphic { .. } => 0.0,
                // Even Maass convention: a_{-n} = a_n.
                GL2FormKind::Maass { .. } => self.coefficient(-n),
            };
        }
        let nu = n as usize;
        assert!(nu < self.coefficients.len(), "coefficient {n} beyond table");
        self.coefficients[nu]
    }

    /// The discriminant cusp form, Hecke-normalized: a_n = tau(n) / n^{11/2}.
    pub fn discriminant_form(n_max: usize) -> Result<GL2Form> {
        let tau = tau_ramanujan(n_max)?;
        let mut coefficients = vec![0.0; n_max + 1];
        for n in 1..=n_max {
            coefficients[n] = tau[n] as f64 / (n as f64).powf(5.5);
        }
        Ok(GL2Form {
            kind: GL2FormKind::Holomorphic { weight: 12 },
            coefficients,
        })
    }
}

/// Archimedean preset for the symmetric-square lift of the discriminant form.
/// The shift magnitude is the form's weight minus one; the parity triple is the
/// first candidate validated by the functional-equation search (module presets).
pub fn sym2_discriminant_parameters() -> GL3Parameters {
    GL3Parameters::new(
        [C64::new(11.0, 0.0), C64::new(0.0, 0.0), C64::new(-11.0, 0.0)],
        [1, 1, 0],
    )
    .expect("constant preset is valid")
}

/// Symmetric-square lift of a level-one Hecke-normalized rank-two form:
/// a_{1,p^k} is the complete homogeneous symmetric polynomial h_k evaluated at
/// (alpha_p^2, 1, alpha_p^{-2}), extended multiplicatively; the table is
/// self-dual. Returns the archimedean preset alongside the table.
pub fn sym_square_lift(f: &GL2Form, n: usize) -> Result<(GL3Parameters, CoefficientTable)> {
    if f.coefficients.len() <= n.min(1) || (f.coefficients[1] - 1.0).abs() > 1e-12 {
        return Err(Error::Invalid(
            "lift input must be Hecke-normalized with a_1 = 1".into(),
        ));
    }
    if f.coefficients.len() < n + 1 {
        return Err(Error::Invalid(format!(
            "need rank-two coefficients up to {n}, have {}",
            f.coefficients.len() - 1
        )));
    }
    // h_k(alpha^2, 1, alpha^{-2}) satisfies h_k = e1 h_{k-1} - e2 h_{k-2} + h_{k-3}
    // with e1 = e2 = lambda_p^2 - 1 (lambda_p = alpha + alpha^{-1}), e3 = 1.
    let mut row = vec![C64::new(0.0, 0.0); n + 1];
    row[1] = C64::new(1.0, 0.0);
    let primes = primes_up_to(n);
    let mut local: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &p in &primes {
        let lam = f.coefficients[p];
        let e = lam * lam - 1.0;
        let kmax = n.ilog(p) as usize;
        let mut h = vec![0.0_f64; kmax + 1];
        h[0] = 1.0;
        for k in 1..=kmax {
            let mut v = e * h[k - 1];
            if k >= 2 {
                v -= e * h[k - 2];
            }
            if k >= 3 {
                v += h[k - 3];
            }
            h[k] = v;
        }
        local.insert(p, h);
    }
    let mut spf = vec![0usize; n + 1];
    for &p in &primes {
        let mut m = p;
        while m <= n {
            if spf[m] == 0 {
                spf[m] = p;
            }
            m += p;
        }
    }
    for m in 2..=n {
        let p = spf[m];
        let mut k = 0usize;
        let mut rest = m;
        while rest % p == 0 {
            rest /= p;
            k += 1;
        }
        row[m] = row[rest] * local[&p][k];
    }
    let table = build_table(&row, &row, n)?;
    Ok((sym2_discriminant_parameters(), table))
}

/// Rescales raw boundary coefficients into normalized ones:
/// a_{r,s} = c_{r,s} r^{lambda_1} s^{-lambda_3} on positive indices.
pub fn renormalize(c_table: &CoefficientTable, params: &GL3Parameters) -> CoefficientTable {
    let mut out = c_table.clone();
    for r in 1..=c_table.n {
        for s in 1..=c_table.n {
            let factor = pow_real(r as f64, params.lambda[0]) * pow_real(s as f64, -params.lambda[2]);
            out.set(r, s, c_table.a(r as i64, s as i64) * factor);
        }
    }
    out
}

/// Inverse of [`renormalize`]; the round trip is the identity to working precision.
pub fn renormalize_inverse(a_table: &CoefficientTable, params: &GL3Parameters) -> CoefficientTable {
    let mut out = a_table.clone();
    for r in 1..=a_table.n {
        for s in 1..=a_table.n {
            let factor = pow_real(r as f64, -params.lambda[0]) * pow_real(s as f64, params.lambda[2]);
            out.set(r, s, a_table.a(r as i64, s as i64) * factor);
        }
    }
    out
}
