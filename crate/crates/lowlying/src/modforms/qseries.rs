//! Truncated power series in `q` with exact integer coefficients.

use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::{Error, Result};

/// `sum_{n < precision} c_n q^n`; coefficients at and beyond `precision` are
/// unknown, so every operation truncates to the smaller precision.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    coeffs: Vec<BigInt>,
}

impl QSeries {
    pub fn from_coefficients(coeffs: Vec<BigInt>) -> Self {
        Self { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::from_coefficients(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero(precision: usize) -> Self {
        Self::from_coefficients(vec![BigInt::zero(); precision])
    }

    pub fn one(precision: usize) -> Self {
        let mut s = Self::zero(precision);
        if precision > 0 {
            s.coeffs[0] = BigInt::one();
        }
        s
    }

    /// Number of known coefficients.
    pub fn precision(&self) -> usize {
        self.coeffs.len()
    }

    pub fn coefficients(&self) -> &[BigInt] {
        &self.coeffs
    }

    /// Coefficient of `q^n`, or a precision error if it is not known.
    pub fn coeff(&self, n: usize) -> Result<&BigInt> {
        self.coeffs.get(n).ok_or(Error::Precision {
            needed: n as u64,
            available: self.coeffs.len() as u64,
        })
    }

    pub fn truncate(mut self, precision: usize) -> Self {
        self.coeffs.truncate(precision);
        self
    }

    /// Index of the first nonzero coefficient.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| !c.is_zero())
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        Self::from_coefficients(self.coeffs.iter().map(|x| x * c).collect())
    }

    /// `self - c * other`, in place.
    pub fn sub_scaled(&mut self, c: &BigInt, other: &QSeries) {
        let p = self.precision().min(other.precision());
        self.coeffs.truncate(p);
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            if !y.is_zero() {
                *x -= c * y;
            }
        }
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut acc = QSeries::one(self.precision());
        let mut base = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// `f(q^m)`, keeping the precision of `self`.
    pub fn substitute_power(&self, m: usize) -> Self {
        assert!(m >= 1);
        let mut out = QSeries::zero(self.precision());
        for (i, c) in self.coeffs.iter().enumerate() {
            let j = i * m;
            if j >= out.precision() {
                break;
            }
            out.coeffs[j] = c.clone();
        }
        out
    }

    /// Multiply by `q^shift`, keeping the precision of `self`.
    pub fn shift(&self, shift: usize) -> Self {
        let p = self.precision();
        let mut out = QSeries::zero(p);
        for i in shift..p {
            out.coeffs[i] = self.coeffs[i - shift].clone();
        }
        out
    }

    pub fn max_abs_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.abs().bits()).max().unwrap_or(0)
    }
}

impl Add for &QSeries {
    type Output = QSeries;
    fn add(self, rhs: &QSeries) -> QSeries {
        QSeries::from_coefficients(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a + b).collect())
    }
}

impl Sub for &QSeries {
    type Output = QSeries;
    fn sub(self, rhs: &QSeries) -> QSeries {
        QSeries::from_coefficients(self.coeffs.iter().zip(&rhs.coeffs).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &QSeries {
    type Output = QSeries;
    fn neg(self) -> QSeries {
        QSeries::from_coefficients(self.coeffs.iter().map(|a| -a).collect())
    }
}

impl Mul for &QSeries {
    type Output = QSeries;
    fn mul(self, rhs: &QSeries) -> QSeries {
        let p = self.precision().min(rhs.precision());
        let mut out = vec![BigInt::zero(); p];
        // Iterate over the sparser factor in the outer loop.
        let (a, b) = if self.coeffs.iter().filter(|c| c.is_zero()).count()
            >= rhs.coeffs.iter().filter(|c| c.is_zero()).count()
        {
            (self, rhs)
        } else {
            (rhs, self)
        };
        for (i, x) in a.coeffs.iter().enumerate().take(p) {
            if x.is_zero() {
                continue;
            }
            for (o, y) in out[i..].iter_mut().zip(&b.coeffs) {
                if !y.is_zero() {
                    *o += x * y;
                }
            }
        }
        QSeries::from_coefficients(out)
    }
}

/// `sigma_r(n)` for `1 <= n < len`, as exact integers, by a divisor sieve.
fn divisor_power_sums(r: u32, len: usize) -> Vec<BigInt> {
    let mut s = vec![BigInt::zero(); len];
    for d in 1..len {
        let dr = BigInt::from(d).pow(r);
        for m in (d..len).step_by(d) {
            s[m] += &dr;
        }
    }
    s
}

/// `E_4 = 1 + 240 sum sigma_3(n) q^n`.
pub fn eisenstein_e4(precision: usize) -> QSeries {
    let mut s = divisor_power_sums(3, precision);
    for c in s.iter_mut() {
        *c *= 240;
    }
    if precision > 0 {
        s[0] = BigInt::one();
    }
    QSeries::from_coefficients(s)
}

/// `E_6 = 1 - 504 sum sigma_5(n) q^n`.
pub fn eisenstein_e6(precision: usize) -> QSeries {
    let mut s = divisor_power_sums(5, precision);
    for c in s.iter_mut() {
        *c *= -504;
    }
    if precision > 0 {
        s[0] = BigInt::one();
    }
    QSeries::from_coefficients(s)
}

/// `prod_{n >= 1} (1 - q^n)` by Euler's pentagonal number theorem.
pub fn euler_product(precision: usize) -> Vec<i64> {
    let mut out = vec![0i64; precision];
    if precision == 0 {
        return out;
    }
    out[0] = 1;
    for m in 1.. {
        let g1 = m * (3 * m - 1) / 2;
        if g1 >= precision {
            break;
        }
        let sign = if m % 2 == 0 { 1 } else { -1 };
        out[g1] += sign;
        let g2 = m * (3 * m + 1) / 2;
        if g2 < precision {
            out[g2] += sign;
        }
    }
    out
}

/// `tau(0), ..., tau(precision - 1)`, from `Delta = q (sum (-1)^m (2m+1) q^{m(m+1)/2})^8`.
///
/// Fixed-width arithmetic with overflow checks; fine far beyond any index
/// used here since `|tau(n)| <= d(n) n^{11/2}`.
pub fn delta_coefficients(precision: usize) -> Result<Vec<i128>> {
    let mut out = vec![0i128; precision];
    if precision < 2 {
        return Ok(out);
    }
    let len = precision - 1;
    let mut sparse = Vec::new();
    for m in 0.. {
        let e = m * (m + 1) / 2;
        if e >= len {
            break;
        }
        let c = (2 * m + 1) as i128;
        sparse.push((e, if m % 2 == 0 { c } else { -c }));
    }
    let overflow = || Error::Precision {
        needed: precision as u64,
        available: 0,
    };
    let mut acc = vec![0i128; len];
    acc[0] = 1;
    for _ in 0..8 {
        let mut next = vec![0i128; len];
        for (i, &a) in acc.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for &(e, c) in &sparse {
                let j = i + e;
                if j >= len {
                    break;
                }
                let t = a.checked_mul(c).ok_or_else(overflow)?;
                next[j] = next[j].checked_add(t).ok_or_else(overflow)?;
            }
        }
        acc = next;
    }
    out[1..].copy_from_slice(&acc);
    Ok(out)
}

/// `Delta = q prod (1 - q^n)^24` as a [`QSeries`].
pub fn delta(precision: usize) -> Result<QSeries> {
    Ok(QSeries::from_coefficients(
        delta_coefficients(precision)?.into_iter().map(BigInt::from).collect(),
    ))
}

/// `q^{shift} prod_j prod_n (1 - q^{m_j n})^{e_j}` for an eta quotient with
/// nonnegative exponents, with `shift` given explicitly.
pub fn eta_product(factors: &[(usize, u32)], shift: usize, precision: usize) -> QSeries {
    let base = QSeries::from_i64(&euler_product(precision));
    let mut acc = QSeries::one(precision);
    for &(m, e) in factors {
        acc = &acc * &base.substitute_power(m).pow(e);
    }
    acc.shift(shift)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `prod (1 - q^n)` by multiplying out the factors one at a time.
    fn naive_euler(p: usize) -> Vec<i64> {
        let mut acc = vec![0i64; p];
        acc[0] = 1;
        for n in 1..p {
            for j in (n..p).rev() {
                acc[j] -= acc[j - n];
            }
        }
        acc
    }

    #[test]
    fn pentagonal_matches_naive_product() {
        assert_eq!(euler_product(300), naive_euler(300));
    }

    #[test]
    fn delta_first_coefficients() {
        let t = delta_coefficients(11).unwrap();
        assert_eq!(
            &t[..],
            &[0, 1, -24, 252, -1472, 4830, -6048, -16744, 84480, -113643, -115920]
        );
    }

    #[test]
    fn delta_routes_agree() {
        let p = 200;
        let e4 = eisenstein_e4(p);
        let e6 = eisenstein_e6(p);
        let d = &e4.pow(3) - &e6.pow(2);
        let d: Vec<BigInt> = d.coefficients().iter().map(|c| c / 1728).collect();
        let via_eta = eta_product(&[(1, 24)], 1, p);
        assert_eq!(d, via_eta.coefficients());
        assert_eq!(delta(p).unwrap(), via_eta);
    }

    #[test]
    fn product_and_power() {
        let a = QSeries::from_i64(&[1, 1, 0, 0, 0]);
        assert_eq!(a.pow(4), QSeries::from_i64(&[1, 4, 6, 4, 1]));
        let b = QSeries::from_i64(&[2, 0, 3]);
        assert_eq!((&a * &b).precision(), 3);
        assert!(a.coeff(7).is_err());
    }
}
