//! Exact arithmetic over residue classes: gcd machinery, Kloosterman / Ramanujan /
//! Gauss sums, Dirichlet characters built from exact roots of unity, and a plain
//! finite Fourier transform.
//!
//! Character values are stored as integer exponents of a fixed root of unity, so
//! every identity that is exact in the algebra stays exact here up to one final
//! cos/sin evaluation per term.

use crate::error::{Error, Result};
use crate::util::e_of;
use crate::C64;

/// Extended gcd: returns (g, x, y) with a x + b y = g = gcd(a, b), g >= 0.
pub fn egcd(a: i64, b: i64) -> (i64, i64, i64) {
    if b == 0 {
        if a < 0 {
            (-a, -1, 0)
        } else {
            (a, 1, 0)
        }
    } else {
        let (g, x, y) = egcd(b, a.rem_euclid(b));
        (g, y, x - (a.div_euclid(b)) * y)
    }
}

pub fn gcd(a: i64, b: i64) -> i64 {
    egcd(a, b).0
}

/// Inverse of a modulo c, if it exists. c >= 1.
pub fn inv_mod(a: i64, c: u64) -> Option<u64> {
    if c == 1 {
        return Some(0);
    }
    let (g, x, _) = egcd(a.rem_euclid(c as i64), c as i64);
    if g != 1 {
        None
    } else {
        Some(x.rem_euclid(c as i64) as u64)
    }
}

/// Trial-division factorization, smallest prime first.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= n {
        if n.is_multiple_of(p) {
            let mut e = 0u32;
            while n.is_multiple_of(p) {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Sorted list of positive divisors.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let base = out.clone();
        let mut pk = 1u64;
        for _ in 0..e {
            pk *= p;
            out.extend(base.iter().map(|d| d * pk));
        }
    }
    out.sort_unstable();
    out
}

/// Moebius function.
pub fn moebius(n: u64) -> i64 {
    let f = factorize(n);
    if f.iter().any(|&(_, e)| e > 1) {
        0
    } else if f.len().is_multiple_of(2) {
        1
    } else {
        -1
    }
}

pub fn euler_phi(n: u64) -> u64 {
    let mut out = n;
    for (p, _) in factorize(n) {
        out = out / p * (p - 1);
    }
    out
}

/// Kloosterman sum S(n, m; c) = sum over units x mod c of e((n x + m x^{-1}) / c).
/// The sum is real (pair x with -x); it is accumulated in a fixed order and the
/// imaginary part is checked to vanish.
pub fn kloosterman(n: i64, m: i64, c: u64) -> f64 {
    assert!(c >= 1);
    if c == 1 {
        return 1.0;
    }
    let cm = c as i64;
    let nr = n.rem_euclid(cm);
    let mr = m.rem_euclid(cm);
    let mut re = 0.0_f64;
    let mut im = 0.0_f64;
    for x in 1..c {
        if let Some(xinv) = inv_mod(x as i64, c) {
            let arg = (nr * x as i64 + mr * xinv as i64).rem_euclid(cm);
            let z = e_of(arg as f64 / c as f64);
            re += z.re;
            im += z.im;
        }
    }
    debug_assert!(im.abs() < 1e-9 * re.abs().max(1.0), "S imag part {im}");
    re
}

/// Ramanujan sum r_c(k) as the literal sum over units of e(k x / c).
pub fn ramanujan_sum(k: i64, c: u64) -> f64 {
    assert!(c >= 1);
    if c == 1 {
        return 1.0;
    }
    let kr = k.rem_euclid(c as i64);
    let mut re = 0.0_f64;
    for x in 1..c {
        if gcd(x as i64, c as i64) == 1 {
            re += e_of((kr * x as i64).rem_euclid(c as i64) as f64 / c as f64).re;
        }
    }
    re
}

/// Ramanujan sum through the divisor closed form:
/// r_c(k) = sum over d | gcd(|k|, c) of d * mu(c / d). Exact integer.
pub fn ramanujan_sum_closed(k: i64, c: u64) -> i64 {
    let g = if k == 0 { c } else { gcd(k, c as i64) as u64 };
    let mut acc = 0i64;
    for d in divisors(c) {
        if g % d == 0 {
            acc += d as i64 * moebius(c / d);
        }
    }
    acc
}

/// One cyclic component of (Z/q)^*: a prime-power factor with its generator
/// orders and tabulated discrete logs. Generators are -1 and 5 for 2^a (a >= 3),
/// 3 for 4, none for 2, and the smallest primitive root for odd prime powers.
#[derive(Debug, Clone)]
struct Component {
    /// Prime power q_i dividing q.
    pm: u64,
    /// Orders of the generators.
    orders: Vec<u64>,
    /// Discrete logs: dlog[x mod pm] = exponents of x in the generator basis,
    /// None for non-units.
    dlog: Vec<Option<Vec<u64>>>,
}

fn pow_mod(mut b: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    b %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc
}

fn primitive_root_odd_prime_power(p: u64, e: u32) -> u64 {
    let phi_p = p - 1;
    let prime_factors: Vec<u64> = factorize(phi_p).into_iter().map(|(q, _)| q).collect();
    let mut g = 2u64;
    loop {
        if prime_factors.iter().all(|&q| pow_mod(g, phi_p / q, p) != 1) {
            break;
        }
        g += 1;
    }
    if e == 1 {
        return g;
    }
    // Lift: g is primitive mod p^e unless g^{p-1} = 1 mod p^2.
    let p2 = p * p;
    if pow_mod(g, p - 1, p2) == 1 {
        g + p
    } else {
        g
    }
}

fn build_component(p: u64, e: u32) -> Component {
    let pm = p.pow(e);
    let (gens, orders): (Vec<u64>, Vec<u64>) = if p == 2 {
        match e {
            1 => (vec![], vec![]),
            2 => (vec![3], vec![2]),
            _ => (vec![pm - 1, 5], vec![2, pm / 4]),
        }
    } else {
        let phi = pm / p * (p - 1);
        (vec![primitive_root_odd_prime_power(p, e)], vec![phi])
    };
    // Enumerate the group once to tabulate discrete logs.
    let mut dlog: Vec<Option<Vec<u64>>> = vec![None; pm as usize];
    let k = gens.len();
    let total: u64 = orders.iter().product();
    let mut exps = vec![0u64; k];
    for _ in 0..total {
        let mut x = 1u64;
        for (g, &t) in gens.iter().zip(&exps) {
            x = x * pow_mod(*g, t, pm) % pm;
        }
        debug_assert!(dlog[x as usize].is_none(), "generators not independent");
        dlog[x as usize] = Some(exps.clone());
        for j in 0..k {
            exps[j] += 1;
            if exps[j] < orders[j] {
                break;
            }
            exps[j] = 0;
        }
    }
    Component { pm, orders, dlog }
}

/// The group of Dirichlet characters mod q with a frozen enumeration order:
/// components are the 2-part first (if any), then odd prime powers in ascending
/// order of p; within the enumeration, exponents of later components vary fastest.
#[derive(Debug, Clone)]
pub struct DirichletGroup {
    pub q: u64,
    comps: Vec<Component>,
    /// lcm of all generator orders; character values are e(k / m).
    m: u64,
    /// Flattened generator orders, in enumeration order.
    flat_orders: Vec<u64>,
}

fn lcm(a: u64, b: u64) -> u64 {
    if a == 0 || b == 0 {
        return a.max(b).max(1);
    }
    a / gcd(a as i64, b as i64) as u64 * b
}

impl DirichletGroup {
    pub fn new(q: u64) -> Result<Self> {
        if q == 0 {
            return Err(Error::Invalid("modulus must be >= 1".into()));
        }
        let mut comps = Vec::new();
        let mut fact = factorize(q);
        fact.sort_unstable();
        for (p, e) in fact {
            comps.push(build_component(p, e));
        }
        let mut m = 1u64;
        let mut flat_orders = Vec::new();
        for comp in &comps {
            for &o in &comp.orders {
                m = lcm(m, o);
                flat_orders.push(o);
            }
        }
        Ok(DirichletGroup { q, comps, m, flat_orders })
    }

    /// Number of characters, phi(q).
    pub fn len(&self) -> usize {
        self.flat_orders.iter().product::<u64>() as usize
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Character at the given enumeration index.
    pub fn character(&self, index: usize) -> Result<DirichletCharacter> {
        if index >= self.len() {
            return Err(Error::Invalid(format!(
                "character index {index} out of range for modulus {} ({} characters)",
                self.q,
                self.len()
            )));
        }
        // Mixed-radix digits, last component fastest.
        let mut digits = vec![0u64; self.flat_orders.len()];
        let mut rest = index as u64;
        for (j, &o) in self.flat_orders.iter().enumerate().rev() {
            digits[j] = rest % o;
            rest /= o;
        }
        self.character_from_digits(index, &digits)
    }

    fn character_from_digits(&self, index: usize, digits: &[u64]) -> Result<DirichletCharacter> {
        let q = self.q;
        let m = self.m;
        // Exponent of e(1/m) at each residue, None on non-units.
        let mut vals: Vec<Option<u64>> = vec![None; q as usize];
        if q == 1 {
            vals[0] = Some(0);
        } else {
            for x in 0..q {
                if gcd(x as i64, q as i64) != 1 {
                    continue;
                }
                let mut acc = 0u64;
                let mut pos = 0usize;
                let mut ok = true;
                for comp in &self.comps {
                    let xi = (x % comp.pm) as usize;
                    match &comp.dlog[xi] {
                        Some(t) => {
                            for (j, &tj) in t.iter().enumerate() {
                                let o = comp.orders[j];
                                acc = (acc + digits[pos + j] % o * tj % m * (m / o)) % m;
                            }
                        }
                        None => ok = false,
                    }
                    pos += comp.orders.len();
                }
                if ok {
                    vals[x as usize] = Some(acc);
                }
            }
        }
        let parity = if q <= 2 {
            0
        } else {
            match vals[(q - 1) as usize] {
                Some(0) => 0,
                Some(e) if 2 * e == m => 1,
                other => {
                    return Err(Error::Invalid(format!(
                        "character value at -1 is not a sign: exponent {other:?} of modulus {m}"
                    )))
                }
            }
        };
        let conductor = conductor_of(q, &vals);
        Ok(DirichletCharacter { q, m, index, vals, parity, conductor })
    }

    /// All characters in enumeration order.
    pub fn characters(&self) -> Result<Vec<DirichletCharacter>> {
        (0..self.len()).map(|i| self.character(i)).collect()
    }
}

fn conductor_of(q: u64, vals: &[Option<u64>]) -> u64 {
    if q == 1 {
        return 1;
    }
    'outer: for d in divisors(q) {
        // chi factors through modulus d iff chi(n) = 1 whenever n = 1 mod d and
        // n is a unit mod q.
        let mut n = 1u64;
        loop {
            n += d;
            if n >= q {
                break;
            }
            if let Some(e) = vals[n as usize] {
                if e != 0 {
                    continue 'outer;
                }
            }
        }
        return d;
    }
    q
}

/// A Dirichlet character mod q with exact root-of-unity values.
#[derive(Debug, Clone)]
pub struct DirichletCharacter {
    pub q: u64,
    /// Common denominator of the value exponents.
    m: u64,
    /// Position in the frozen enumeration of the full character group.
    pub index: usize,
    vals: Vec<Option<u64>>,
    /// 0 if chi(-1) = 1, 1 if chi(-1) = -1.
    pub parity: u8,
    pub conductor: u64,
}

impl DirichletCharacter {
    /// chi(n) for any integer n.
    pub fn value(&self, n: i64) -> C64 {
        let r = n.rem_euclid(self.q as i64) as usize;
        match self.vals[r] {
            None => C64::new(0.0, 0.0),
            Some(0) => C64::new(1.0, 0.0),
            Some(e) => e_of(e as f64 / self.m as f64),
        }
    }

    /// Exact exponent k with chi(n) = e(k/m), if chi(n) != 0.
    pub fn exponent(&self, n: i64) -> Option<(u64, u64)> {
        let r = n.rem_euclid(self.q as i64) as usize;
        self.vals[r].map(|e| (e, self.m))
    }

    pub fn is_principal(&self) -> bool {
        self.vals.iter().all(|v| matches!(v, None | Some(0)))
    }

    pub fn is_primitive(&self) -> bool {
        self.conductor == self.q
    }

    pub fn is_even(&self) -> bool {
        self.parity == 0
    }

    /// The complex-conjugate character.
    pub fn conjugate(&self) -> DirichletCharacter {
        let vals = self
            .vals
            .iter()
            .map(|v| v.map(|e| if e == 0 { 0 } else { self.m - e }))
            .collect();
        DirichletCharacter {
            q: self.q,
            m: self.m,
            // The conjugate sits elsewhere in the enumeration; the index is not
            // recomputed here because callers only use it for reporting.
            index: self.index,
            vals,
            parity: self.parity,
            conductor: self.conductor,
        }
    }

    /// Gauss sum: sum over k mod q of chi(k) e(k/q).
    pub fn gauss_sum(&self) -> C64 {
        let mut acc = C64::new(0.0, 0.0);
        for k in 0..self.q {
            if let Some(e) = self.vals[k as usize] {
                // chi(k) e(k/q) = e(e/m + k/q), combined exactly over lcm.
                let t = e as f64 / self.m as f64 + k as f64 / self.q as f64;
                acc += e_of(t.fract());
            }
        }
        acc
    }
}

/// Unnormalized finite Fourier transform: out[k] = sum_l e(k l / n) a[l].
pub fn finite_fourier(a: &[C64]) -> Vec<C64> {
    let n = a.len();
    let mut out = Vec::with_capacity(n);
    for k in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for (l, &al) in a.iter().enumerate() {
            let t = (k * l % n) as f64 / n as f64;
            acc += e_of(t) * al;
        }
        out.push(acc);
    }
    out
}
