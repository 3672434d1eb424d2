//! Eigenforms from the exact Hecke matrices.
//!
//! The characteristic polynomial of `T_n` is computed exactly. Its roots are
//! isolated with a Sturm sequence and refined by dyadic bisection to `P`
//! fractional bits. The eigenvector is one fraction-free solve of
//! `(2^P T_n - Lambda) x = e`, which is inverse iteration carried out exactly.

use num_bigint::{BigInt, Sign};
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};

use super::form::HeckeEigenform;
use super::space::{hecke_matrix, CuspSpace};
use crate::{Error, Result};

/// Hecke operators tried in turn when an earlier one has a repeated eigenvalue.
pub const SEPARATING_OPERATORS: [u64; 3] = [2, 3, 5];

/// Required relative residual `|T v - lambda v| / (|T| |v|)`.
pub const RESIDUAL_BOUND: f64 = 1e-20;

const MODULI: [u64; 3] = [(1 << 61) - 1, 1_000_000_007, 998_244_353];

/// Monic characteristic polynomial, coefficients from the constant term up,
/// by the Faddeev–LeVerrier recursion (all divisions are exact).
pub fn charpoly(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = m.len();
    let mut c = vec![BigInt::zero(); d + 1];
    c[d] = BigInt::one();
    // am = A * M_{j-1}
    let mut am = vec![vec![BigInt::zero(); d]; d];
    for j in 1..=d {
        let mut mk = am.clone();
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += &c[d - j + 1];
        }
        am = mat_mul(m, &mk);
        let tr: BigInt = (0..d).map(|i| am[i][i].clone()).sum();
        c[d - j] = -tr / BigInt::from(j);
    }
    c
}

fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let d = a.len();
    (0..d)
        .map(|i| {
            (0..d)
                .map(|j| {
                    let mut s = BigInt::zero();
                    for l in 0..d {
                        if !a[i][l].is_zero() && !b[l][j].is_zero() {
                            s += &a[i][l] * &b[l][j];
                        }
                    }
                    s
                })
                .collect()
        })
        .collect()
}

fn mulmod(a: u64, b: u64, q: u64) -> u64 {
    ((a as u128 * b as u128) % q as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, q: u64) -> u64 {
    let mut r = 1;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, q);
        }
        a = mulmod(a, a, q);
        e >>= 1;
    }
    r
}

fn trim(p: &mut Vec<u64>) {
    while p.last() == Some(&0) {
        p.pop();
    }
}

/// Degree of `gcd(p, p')` over `F_q`.
fn gcd_degree_mod(p: &[BigInt], q: u64) -> usize {
    let qb = BigInt::from(q);
    let reduce = |c: &BigInt| {
        let r = c % &qb;
        let r = if r.is_negative() { r + &qb } else { r };
        r.to_u64().expect("reduced residue fits")
    };
    let mut a: Vec<u64> = p.iter().map(reduce).collect();
    let mut b: Vec<u64> = (1..p.len()).map(|i| mulmod(reduce(&p[i]), i as u64 % q, q)).collect();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        // a <- a mod b
        let inv = powmod(*b.last().expect("nonempty"), q - 2, q);
        while a.len() >= b.len() {
            let shift = a.len() - b.len();
            let f = mulmod(*a.last().expect("nonempty"), inv, q);
            for (i, &bi) in b.iter().enumerate() {
                let t = mulmod(f, bi, q);
                a[i + shift] = (a[i + shift] + q - t) % q;
            }
            trim(&mut a);
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// True when `p` is provably squarefree (gcd with `p'` is trivial modulo
/// some prime). False means a repeated root is likely but not certain.
pub fn is_squarefree(p: &[BigInt]) -> bool {
    MODULI.iter().any(|&q| gcd_degree_mod(p, q) == 0)
}

/// Sign of `p(y / 2^bits)`.
fn sign_at(p: &[BigInt], y: &BigInt, bits: u32) -> Sign {
    let d = p.len() - 1;
    let mut acc = p[d].clone();
    let mut scale = BigInt::one();
    for i in (0..d).rev() {
        scale <<= bits;
        acc = acc * y + &p[i] * &scale;
    }
    acc.sign()
}

/// `num / den` rounded to double precision.
pub(crate) fn ratio_f64(num: &BigInt, den: &BigInt) -> f64 {
    if num.is_zero() {
        return 0.0;
    }
    let shift = 64 + den.bits() as i64 - num.bits() as i64;
    let q = if shift >= 0 { (num << shift as u64) / den } else { num / (den << (-shift) as u64) };
    let mut v = q.to_f64().expect("quotient is about 64 bits");
    // Scale by 2^-shift in steps that cannot overflow the exponent.
    let mut s = shift;
    while s != 0 {
        let step = s.clamp(-1000, 1000);
        v *= 2f64.powi(-step as i32);
        s -= step;
    }
    v
}

/// `ln |x|` for a nonzero integer of any size.
pub(crate) fn ln_abs(x: &BigInt) -> f64 {
    let bits = x.bits();
    if bits <= 1000 {
        return x.to_f64().expect("fits").abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = x.abs() >> shift;
    top.to_f64().expect("fits").ln() + shift as f64 * std::f64::consts::LN_2
}

/// Fraction-free Gauss–Jordan elimination on `[a | b]`. Returns `(det, x)`
/// with `a x = det b` exactly, `det` the determinant up to sign.
pub fn bareiss_solve(a: &[Vec<BigInt>], b: &[BigInt]) -> Result<(BigInt, Vec<BigInt>)> {
    let n = a.len();
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n)
            .find(|&r| !m[r][k].is_zero())
            .ok_or_else(|| Error::Singular(format!("no pivot in column {k}")))?;
        m.swap(k, p);
        let (before, rest) = m.split_at_mut(k);
        let (pivot_row, after) = rest.split_first_mut().expect("row k exists");
        for row in before.iter_mut().chain(after.iter_mut()) {
            let f = row[k].clone();
            for j in 0..=n {
                if j == k {
                    continue;
                }
                row[j] = (&pivot_row[k] * &row[j] - &f * &pivot_row[j]) / &prev;
            }
            row[k] = BigInt::zero();
        }
        prev = pivot_row[k].clone();
    }
    Ok((prev, m.into_iter().map(|mut r| r.pop().expect("augmented")).collect()))
}

/// An eigenvector of the Hecke algebra in echelon coordinates, exact up to
/// the `bits`-bit approximation of its eigenvalue.
#[derive(Debug, Clone)]
pub struct ExactEigenvector {
    /// Index of the Hecke operator whose spectrum separated the forms.
    pub operator: u64,
    /// Coordinates in the echelon basis; coordinate 0 is `a(1)`.
    pub coords: Vec<BigInt>,
    /// The eigenvalue of `T_operator` is `eigenvalue / 2^bits`.
    pub eigenvalue: BigInt,
    pub bits: u32,
    /// `|T v - lambda v| / (|T| |v|)` in the max norm.
    pub residual: f64,
}

fn content(p: &[BigInt]) -> BigInt {
    p.iter().fold(BigInt::zero(), |g, c| num_integer::Integer::gcd(&g, c))
}

/// `-c * (a mod b)` for a positive constant `c`, made primitive.
fn negated_pseudo_remainder(a: &[BigInt], b: &[BigInt]) -> Vec<BigInt> {
    let mut r = a.to_vec();
    let lb = b.last().expect("nonzero divisor");
    let db = b.len() - 1;
    while r.len() > db && !r.is_empty() {
        let lr = r.last().expect("nonempty").clone();
        let shift = r.len() - 1 - db;
        // r <- |lb| r - sign(lb) lr x^shift b, which cancels the top term.
        let (mul, sub) = if lb.is_negative() { (-lb, -lr) } else { (lb.clone(), lr) };
        for c in r.iter_mut() {
            *c *= &mul;
        }
        for (i, bi) in b.iter().enumerate() {
            r[i + shift] -= &sub * bi;
        }
        r.pop();
        while r.last().is_some_and(|c| c.is_zero()) {
            r.pop();
        }
    }
    let g = content(&r);
    r.iter().map(|c| -(c / &g)).collect()
}

/// Sturm sequence of a squarefree polynomial.
fn sturm_sequence(p: &[BigInt]) -> Vec<Vec<BigInt>> {
    let dp: Vec<BigInt> = (1..p.len()).map(|i| &p[i] * BigInt::from(i)).collect();
    let mut seq = vec![p.to_vec(), dp];
    loop {
        let n = seq.len();
        if seq[n - 1].len() <= 1 {
            break;
        }
        let r = negated_pseudo_remainder(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(r);
    }
    seq
}

/// Sign changes of the Sturm sequence at `y / 2^bits`.
fn variations(seq: &[Vec<BigInt>], y: &BigInt, bits: u32) -> usize {
    let mut count = 0;
    let mut last = Sign::NoSign;
    for q in seq {
        let s = sign_at(q, y, bits);
        if s != Sign::NoSign {
            if last != Sign::NoSign && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// All real roots of `charpoly(m)`, as integers `Lambda` with the root in
/// `[Lambda, Lambda + 1] / 2^bits`, in increasing order.
fn separated_roots(m: &[Vec<BigInt>], n: u64, k: u32, bits: u32) -> std::result::Result<Vec<BigInt>, String> {
    let d = m.len();
    let p = charpoly(m);
    if !is_squarefree(&p) {
        return Err("characteristic polynomial has a repeated factor".into());
    }
    let seq = sturm_sequence(&p);
    // Eigenvalues of T_n are at most sigma_0(n) n^{(k-1)/2} < 2^e in size.
    let e = ((n as f64).log2() * (k as f64 - 1.0) / 2.0 + 3.0).ceil() as u32;
    let bound = BigInt::one() << (e + bits);
    let mut pending = vec![(-&bound, bound.clone())];
    let mut isolated = Vec::with_capacity(d);
    while let Some((lo, hi)) = pending.pop() {
        let roots = variations(&seq, &lo, bits) - variations(&seq, &hi, bits);
        match roots {
            0 => {}
            1 => isolated.push((lo, hi)),
            _ => {
                if &hi - &lo <= BigInt::one() {
                    return Err(format!("roots closer than 2^-{bits}"));
                }
                let mid: BigInt = (&lo + &hi) >> 1u32;
                pending.push((lo, mid.clone()));
                pending.push((mid, hi));
            }
        }
    }
    if isolated.len() != d {
        return Err(format!("found {} real roots, expected {d}", isolated.len()));
    }
    isolated.sort();
    let mut out = Vec::with_capacity(d);
    for (mut lo, mut hi) in isolated {
        // The root lies in (lo, hi].
        if sign_at(&p, &hi, bits) == Sign::NoSign {
            out.push(hi);
            continue;
        }
        if sign_at(&p, &lo, bits) == Sign::NoSign {
            lo += 1;
        }
        let slo = sign_at(&p, &lo, bits);
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi) >> 1u32;
            match sign_at(&p, &mid, bits) {
                Sign::NoSign => {
                    lo = mid.clone();
                    hi = mid;
                }
                s if s == slo => lo = mid,
                _ => hi = mid,
            }
        }
        out.push(lo);
    }
    Ok(out)
}

/// Exact eigenvectors of the Hecke algebra on `space`.
pub fn exact_eigenvectors(space: &CuspSpace) -> Result<Vec<ExactEigenvector>> {
    let d = space.dim();
    let k = space.weight();
    if d == 0 {
        return Ok(Vec::new());
    }
    let bits = 128 + k;
    let mut failures = Vec::new();
    for &n in &SEPARATING_OPERATORS {
        let m = hecke_matrix(space, n)?;
        let roots = match separated_roots(&m, n, k, bits) {
            Ok(r) => r,
            Err(why) => {
                failures.push(format!("T_{n}: {why}"));
                continue;
            }
        };
        let mnorm = m
            .iter()
            .map(|r| r.iter().map(|x| x.to_f64().expect("finite").abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let scaled: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|x| x << bits).collect()).collect();
        let rhs = vec![BigInt::one(); d];
        let mut out = Vec::with_capacity(d);
        for lam in roots {
            let mut a = scaled.clone();
            for (i, row) in a.iter_mut().enumerate() {
                row[i] -= &lam;
            }
            // An eigenvalue that is exactly dyadic makes the shifted matrix
            // singular; moving one unit off it keeps the solve well posed.
            let (det, x) = match bareiss_solve(&a, &rhs) {
                Ok(sol) => sol,
                Err(Error::Singular(_)) => {
                    for (i, row) in a.iter_mut().enumerate() {
                        row[i] -= 1;
                    }
                    bareiss_solve(&a, &rhs)?
                }
                Err(e) => return Err(e),
            };
            if x[0].is_zero() {
                return Err(Error::EigenvalueCollision {
                    k,
                    detail: "eigenvector with vanishing first coefficient".into(),
                });
            }
            let xnorm = x.iter().map(ln_abs_or_neg_inf).fold(f64::NEG_INFINITY, f64::max);
            let residual = (ln_abs(&det) - bits as f64 * std::f64::consts::LN_2 - mnorm.ln() - xnorm).exp();
            if !(residual <= RESIDUAL_BOUND) {
                return Err(Error::EigenvalueCollision {
                    k,
                    detail: format!("T_{n} eigenvector residual {residual:e} exceeds {RESIDUAL_BOUND:e}"),
                });
            }
            out.push(ExactEigenvector {
                operator: n,
                coords: x,
                eigenvalue: lam,
                bits,
                residual,
            });
        }
        return Ok(out);
    }
    Err(Error::EigenvalueCollision {
        k,
        detail: failures.join("; "),
    })
}

fn ln_abs_or_neg_inf(x: &BigInt) -> f64 {
    if x.is_zero() {
        f64::NEG_INFINITY
    } else {
        ln_abs(x)
    }
}

/// Normalised eigenforms with `lambda(n)` for `n <= nmax`, ordered by `lambda(2)`.
pub fn eigenforms(space: &CuspSpace, nmax: usize) -> Result<Vec<HeckeEigenform>> {
    if nmax > space.nmax() {
        return Err(Error::Precision {
            needed: nmax as u64,
            available: space.nmax() as u64,
        });
    }
    let k = space.weight();
    let sign = if k % 4 == 0 { 1 } else { -1 };
    let half = (k - 2) / 2;
    let mut forms: Vec<HeckeEigenform> = exact_eigenvectors(space)?
        .into_iter()
        .map(|v| {
            let mut lambda = vec![0.0; nmax + 1];
            for (n, slot) in lambda.iter_mut().enumerate().skip(1) {
                let a: BigInt = v
                    .coords
                    .iter()
                    .zip(space.basis())
                    .map(|(x, b)| x * &b.coefficients()[n])
                    .sum();
                // lambda(n) = a(n) / n^{(k-1)/2} with the integer part of the power exact.
                let den = &v.coords[0] * Pow::pow(BigInt::from(n), half);
                *slot = ratio_f64(&a, &den) / (n as f64).sqrt();
            }
            HeckeEigenform::new(k, 1, lambda, sign)
        })
        .collect();
    if nmax >= 2 {
        forms.sort_by(|a, b| a.lambdas()[2].total_cmp(&b.lambdas()[2]));
    }
    Ok(forms)
}
