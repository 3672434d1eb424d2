//! Exact integer number theory.
//!
//! Kloosterman sums are accumulated as cosines: pairing `x` with `-x` shows
//! `S(m, n; c)` is real, so the imaginary part is never formed.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::sum::NeumaierSum;
use crate::{domain, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn mod_inverse(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let (mut r0, mut r1) = (m as i128, (a % m) as i128);
    let (mut t0, mut t1) = (0i128, 1i128);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    if r0 != 1 {
        return None;
    }
    Some(t0.rem_euclid(m as i128) as u64)
}

/// Reduce a signed integer into `[0, c)`.
pub fn reduce(m: i64, c: u64) -> u64 {
    (m as i128).rem_euclid(c as i128) as u64
}

/// Prime factorization by trial division, ascending primes.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    if n < 2 {
        return out;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
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

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n).first() == Some(&(n, 1))
}

/// The primes up to `limit`, from a sieve of Eratosthenes.
#[derive(Debug, Clone)]
pub struct PrimeTable {
    limit: u64,
    primes: Vec<u64>,
}

impl PrimeTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut composite = vec![false; n + 1];
        let mut primes = Vec::new();
        for i in 2..=n {
            if composite[i] {
                continue;
            }
            primes.push(i as u64);
            let mut j = i.saturating_mul(i);
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
        Self { limit, primes }
    }

    pub fn limit(&self) -> u64 {
        self.limit
    }

    pub fn primes(&self) -> &[u64] {
        &self.primes
    }

    pub fn contains(&self, n: u64) -> bool {
        n <= self.limit && self.primes.binary_search(&n).is_ok()
    }

    /// Primes `p <= x`.
    pub fn up_to(&self, x: u64) -> &[u64] {
        let end = self.primes.partition_point(|&p| p <= x);
        &self.primes[..end]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Multiplicative {
    pub mu: i32,
    pub phi: u64,
    pub tau: u64,
}

pub fn multiplicative_suite(n: u64) -> Result<Multiplicative> {
    if n == 0 {
        return domain("n", "must be positive");
    }
    let f = factorize(n);
    let mut mu = if f.iter().all(|&(_, e)| e == 1) {
        1
    } else {
        0
    };
    if mu != 0 && f.len() % 2 == 1 {
        mu = -1;
    }
    let phi = f
        .iter()
        .map(|&(p, e)| (p - 1) * p.pow(e - 1))
        .product::<u64>();
    let tau = f.iter().map(|&(_, e)| e as u64 + 1).product::<u64>();
    Ok(Multiplicative { mu, phi, tau })
}

pub fn mobius(n: u64) -> i32 {
    multiplicative_suite(n).map(|m| m.mu).unwrap_or(0)
}

pub fn euler_phi(n: u64) -> u64 {
    multiplicative_suite(n).map(|m| m.phi).unwrap_or(0)
}

pub fn divisor_count(n: u64) -> u64 {
    multiplicative_suite(n).map(|m| m.tau).unwrap_or(0)
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// `cos(2 pi r / c)` for every residue `r`: exact values every 64 steps,
/// rotations in between.
fn cos_table(c: u64) -> Vec<f64> {
    let step = TAU / c as f64;
    let (s1, c1) = step.sin_cos();
    let mut out = Vec::with_capacity(c as usize);
    let (mut re, mut im) = (1.0f64, 0.0f64);
    for r in 0..c {
        if r % 64 == 0 {
            (im, re) = (step * r as f64).sin_cos();
        }
        out.push(re);
        (re, im) = (re * c1 - im * s1, re * s1 + im * c1);
    }
    out
}

/// The units mod `c` paired with their inverses.
fn units_with_inverses(c: u64) -> Vec<(u64, u64)> {
    (1..=c)
        .filter_map(|x| {
            let x = x % c;
            mod_inverse(x, c).map(|xi| (x, xi))
        })
        .filter(|&(x, _)| c == 1 || gcd(x, c) == 1)
        .collect()
}

/// Kloosterman sum `S(m, n; c)`.
pub fn kloosterman(m: i64, n: i64, c: u64) -> Result<f64> {
    if c == 0 {
        return domain("c", "modulus must be at least 1");
    }
    if c == 1 {
        return Ok(1.0);
    }
    let (m, n) = (reduce(m, c), reduce(n, c));
    let cc = c as u128;
    let mut acc = NeumaierSum::new();
    // x and c - x contribute equal cosines; only c = 2 has x = c - x.
    for x in 1..=c / 2 {
        if gcd(x, c) != 1 {
            continue;
        }
        let xi = mod_inverse(x, c).expect("unit");
        let r = ((m as u128 * x as u128 + n as u128 * xi as u128) % cc) as f64;
        let w = if 2 * x == c { 1.0 } else { 2.0 };
        acc.add(w * (TAU * r / c as f64).cos());
    }
    Ok(acc.value())
}

/// `S(m, a; c)` for every residue `a` mod `c`, reusing one inverse table.
pub fn kloosterman_row(m: i64, c: u64) -> Result<Vec<f64>> {
    if c == 0 {
        return domain("c", "modulus must be at least 1");
    }
    if c == 1 {
        return Ok(vec![1.0]);
    }
    let m = reduce(m, c);
    let cos = cos_table(c);
    let units = units_with_inverses(c);
    let row = (0..c)
        .map(|a| {
            let mut acc = NeumaierSum::new();
            for &(x, xi) in &units {
                acc.add(cos[((m as u128 * x as u128 + a as u128 * xi as u128) % c as u128) as usize]);
            }
            acc.value()
        })
        .collect();
    Ok(row)
}

/// Inverses of `1..p` modulo a prime `p`, with `inv[0] = 0`.
fn prime_inverse_table(p: u64) -> Vec<u64> {
    let mut inv = vec![0u64; p as usize];
    if p > 1 {
        inv[1] = 1;
    }
    for i in 2..p {
        inv[i as usize] = (p - (p / i) * inv[(p % i) as usize] % p) % p;
    }
    inv
}

/// `S(a, b; p)` for a prime `p` from precomputed tables.
///
/// For `a` a unit, `S(a, b; p) = S(1, ab; p)` and `t / x = inv[x / t]`, so
/// the loop walks `x / t` by repeated addition and needs no divisions.
fn kloosterman_prime(a: u64, b: u64, p: u64, inv: &[u64], cos: &[f64]) -> f64 {
    if a == 0 || b == 0 {
        let other = a + b;
        return if other == 0 { (p - 1) as f64 } else { -1.0 };
    }
    if p == 2 {
        return cos[((a + b) % 2) as usize];
    }
    let t = ((a as u128 * b as u128) % p as u128) as u64;
    let tinv = inv[t as usize];
    let mut z = 0u64;
    let mut acc = 0.0;
    for x in 1..=p / 2 {
        z += tinv;
        if z >= p {
            z -= p;
        }
        let mut u = x + inv[z as usize];
        if u >= p {
            u -= p;
        }
        acc += cos[u as usize];
    }
    2.0 * acc
}

/// `S(m, n; c)` for every `c <= cmax` divisible by `step`, as `(c, S)` pairs.
///
/// Uses twisted multiplicativity: for `c = q r` with `(q, r) = 1`,
/// `S(m, n; c) = S(m r', n r'; q) S(m q', n q'; r)` where `r r' = 1 mod q`
/// and `q q' = 1 mod r`. Prime moduli share one inverse and cosine table
/// across all `c`; higher prime powers are summed directly.
pub fn kloosterman_progression(m: i64, n: i64, step: u64, cmax: u64) -> Result<Vec<(u64, f64)>> {
    if step == 0 {
        return domain("step", "must be at least 1");
    }
    let count = (cmax / step) as usize;
    let mut vals = vec![1.0f64; count + 1];
    let primes = PrimeTable::new((cmax / step).max(2));
    let mut plist: Vec<u64> = primes.primes().to_vec();
    for (p, _) in factorize(step) {
        if !plist.contains(&p) {
            plist.push(p);
        }
    }
    for p in plist {
        let mut tables: Option<(Vec<u64>, Vec<f64>)> = None;
        // j ranges over indices with p | j * step.
        let jstep = if step % p == 0 { 1 } else { p as usize };
        for j in (jstep..=count).step_by(jstep) {
            let c = j as u64 * step;
            let mut q = 1u64;
            let mut r = c;
            while r % p == 0 {
                r /= p;
                q *= p;
            }
            let rinv = mod_inverse(r % q, q).expect("coprime");
            let a = ((reduce(m, q) as u128 * rinv as u128) % q as u128) as u64;
            let b = ((reduce(n, q) as u128 * rinv as u128) % q as u128) as u64;
            let s = if q == p {
                let (inv, cos) = tables.get_or_insert_with(|| (prime_inverse_table(p), cos_table(p)));
                kloosterman_prime(a, b, p, inv, cos)
            } else {
                kloosterman(a as i64, b as i64, q)?
            };
            vals[j] *= s;
        }
    }
    Ok((1..=count).map(|j| (j as u64 * step, vals[j])).collect())
}

/// Weil's bound `(m, n, c)^{1/2} tau(c) c^{1/2}`.
pub fn weil_bound(m: i64, n: i64, c: u64) -> f64 {
    let g = gcd(gcd(m.unsigned_abs(), n.unsigned_abs()), c);
    (g as f64).sqrt() * divisor_count(c) as f64 * (c as f64).sqrt()
}

/// Ramanujan sum `c_c(n) = sum_{d | (n, c)} mu(c/d) d`.
pub fn ramanujan_sum(n: i64, c: u64) -> i64 {
    let g = gcd(n.unsigned_abs(), c);
    let g = if n == 0 { c } else { g };
    divisors(g)
        .into_iter()
        .map(|d| mobius(c / d) as i64 * d as i64)
        .sum()
}

/// `S_n(c)` evaluated both ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TwistedSum {
    pub n: u64,
    pub c: u64,
    pub enumerated: f64,
    pub closed_form: i64,
}

impl TwistedSum {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.enumerated - self.closed_form as f64).abs() <= tol * (1.0 + self.closed_form.abs() as f64)
    }
}

/// `S_n(c) = sum_{a mod c}^* S(n^2, a^2; c) e(2na/c)` by direct enumeration.
pub fn twisted_sum_enumerated(n: u64, c: u64) -> Result<f64> {
    if n == 0 {
        return domain("n", "must be positive");
    }
    if c == 0 {
        return domain("c", "modulus must be at least 1");
    }
    if c == 1 {
        return Ok(1.0);
    }
    let cos = cos_table(c);
    let units = units_with_inverses(c);
    let cm = c as u128;
    let n2 = (n as u128 * n as u128) % cm;
    let mut total = NeumaierSum::new();
    for &(a, _) in &units {
        let a2 = (a as u128 * a as u128) % cm;
        let mut s = NeumaierSum::new();
        for &(x, xi) in &units {
            s.add(cos[((n2 * x as u128 + a2 * xi as u128) % cm) as usize]);
        }
        // S(n^2, a^2; c) is real and the a -> -a symmetry kills the sine part.
        total.add(s.value() * cos[((2 * n as u128 * a as u128) % cm) as usize]);
    }
    Ok(total.value())
}

/// `S_n(c)` from its multiplicative closed form on prime powers.
pub fn twisted_sum_closed_form(n: u64, c: u64) -> Result<i64> {
    if n == 0 {
        return domain("n", "must be positive");
    }
    if c == 0 {
        return domain("c", "modulus must be at least 1");
    }
    let mut out: i64 = 1;
    for (p, r) in factorize(c) {
        let local: i64 = if n % p != 0 {
            match r {
                1 => 1,
                r if r % 2 == 1 => 0,
                r => ((p - 1) * p.pow(r - 1) * p.pow(r / 2)) as i64,
            }
        } else if r == 1 {
            -((p - 1) as i64)
        } else {
            0
        };
        out *= local;
    }
    Ok(out)
}

pub fn twisted_sum(n: u64, c: u64) -> Result<TwistedSum> {
    Ok(TwistedSum {
        n,
        c,
        enumerated: twisted_sum_enumerated(n, c)?,
        closed_form: twisted_sum_closed_form(n, c)?,
    })
}

/// Both sides of `S(N n^2, p; lN) = mu(N) S(n^2, N^{-1} p; l)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelFactor {
    pub lhs: f64,
    pub rhs: f64,
}

impl LevelFactor {
    pub fn agrees(&self, tol: f64) -> bool {
        (self.lhs - self.rhs).abs() <= tol * (1.0 + self.lhs.abs())
    }
}

/// The level factorization of a Kloosterman sum to modulus `lN`.
///
/// Requires `N` prime, `(l, N) = 1` and `N` not dividing `p`; when `N | p` the
/// Ramanujan factor is `phi(N)` rather than `mu(N)` and the identity fails.
pub fn kloosterman_level_factor(n: u64, p: i64, l: u64, level: u64) -> Result<LevelFactor> {
    if n == 0 {
        return domain("n", "must be positive");
    }
    if l == 0 {
        return domain("l", "must be positive");
    }
    if !is_prime(level) {
        return domain("N", format!("{level} is not prime"));
    }
    if gcd(l, level) != 1 {
        return domain("l", format!("gcd({l}, {level}) > 1"));
    }
    if reduce(p, level) == 0 {
        return domain("p", format!("{level} divides {p}"));
    }
    let n2 = (n as i128 * n as i128) as i64;
    let lhs = kloosterman(level as i64 * n2, p, l * level)?;
    let nbar = mod_inverse(level % l.max(1), l).unwrap_or(0);
    let twisted = ((nbar as i128 * p as i128).rem_euclid(l as i128)) as i64;
    let rhs = mobius(level) as f64 * kloosterman(n2, twisted, l)?;
    Ok(LevelFactor { lhs, rhs })
}
