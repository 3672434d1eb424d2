//! Cusp forms for `SL_2(Z)`: dimensions, the Victor Miller basis and Hecke
//! matrices.

use num_bigint::BigInt;
use num_traits::{Pow, Zero};
#[cfg(test)]
use num_traits::One;

use super::qseries::{delta, eisenstein_e4, eisenstein_e6, QSeries};
use crate::arith::{divisors, gcd};
use crate::{domain, Error, Result};

/// Dimension of the space of weight `k` cusp forms for `SL_2(Z)`.
pub fn dim_cusp(k: u32) -> Result<usize> {
    if k % 2 == 1 || k < 4 {
        return domain("k", format!("weight must be even and at least 4, got {k}"));
    }
    if k < 12 || k == 14 {
        return Ok(0);
    }
    let base = (k / 12) as usize;
    Ok(if k % 12 == 2 { base - 1 } else { base })
}

/// The cusp space with its echelonised integral basis: coefficient `i` of
/// basis form `j` is `delta_{ij}` for `1 <= i, j <= dim`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CuspSpace {
    k: u32,
    basis: Vec<QSeries>,
    precision: usize,
}

impl CuspSpace {
    pub(crate) fn from_parts(k: u32, basis: Vec<QSeries>, precision: usize) -> Result<Self> {
        if dim_cusp(k)? != basis.len() {
            return Err(Error::Cache(format!(
                "weight {k} needs {} basis forms, got {}",
                dim_cusp(k)?,
                basis.len()
            )));
        }
        if basis.iter().any(|b| b.precision() != precision) {
            return Err(Error::Cache("basis rows have unequal lengths".into()));
        }
        Ok(Self { k, basis, precision })
    }

    pub fn weight(&self) -> u32 {
        self.k
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[QSeries] {
        &self.basis
    }

    /// Number of known coefficients (indices `0..precision`).
    pub fn precision(&self) -> usize {
        self.precision
    }

    /// Largest known coefficient index.
    pub fn nmax(&self) -> usize {
        self.precision.saturating_sub(1)
    }

    /// The same space with coefficients `0..=nmax` only.
    pub fn truncated(&self, nmax: usize) -> Result<Self> {
        if nmax > self.nmax() {
            return Err(Error::Precision {
                needed: nmax as u64,
                available: self.nmax() as u64,
            });
        }
        let basis = self.basis.iter().map(|b| b.clone().truncate(nmax + 1)).collect();
        Self::from_parts(self.k, basis, nmax + 1)
    }
}

/// `(a, b)` with `4a + 6b = k mod 12`, `a <= 2`, `b <= 1`.
fn eisenstein_exponents(k: u32) -> (u32, u32) {
    match k % 12 {
        0 => (0, 0),
        2 => (2, 1),
        4 => (1, 0),
        6 => (0, 1),
        8 => (2, 0),
        _ => (1, 1),
    }
}

/// Victor Miller basis with coefficients `0..=nmax`.
pub fn victor_miller_basis(k: u32, nmax: usize) -> Result<CuspSpace> {
    if k < 12 || k % 2 == 1 {
        return domain("k", format!("weight must be even and at least 12, got {k}"));
    }
    let d = dim_cusp(k)?;
    if nmax < d {
        return Err(Error::Precision {
            needed: d as u64,
            available: nmax as u64,
        });
    }
    let p = nmax + 1;
    let (a, b) = eisenstein_exponents(k);
    let l = ((k - 4 * a - 6 * b) / 12) as usize;
    debug_assert_eq!(l, d);
    let e4 = eisenstein_e4(p);
    let e6 = eisenstein_e6(p);
    let tail = &e4.pow(a) * &e6.pow(b);
    let dl = delta(p)?;
    let e6sq = e6.pow(2);
    // g_j = Delta^j E6^{2(l-j)} E4^a E6^b, built from shared powers.
    let mut e6_powers = vec![QSeries::one(p)];
    for _ in 1..l {
        let next = e6_powers.last().expect("nonempty") * &e6sq;
        e6_powers.push(next);
    }
    let mut basis = Vec::with_capacity(l);
    let mut dpow = QSeries::one(p);
    for j in 1..=l {
        dpow = &dpow * &dl;
        basis.push(&(&dpow * &e6_powers[l - j]) * &tail);
    }
    // g_j = q^j + O(q^{j+1}); clear coefficients j+1..=l from the bottom up.
    for j in (0..l).rev() {
        for i in (j + 1)..l {
            let c = basis[j].coefficients()[i + 1].clone();
            if !c.is_zero() {
                let (head, rest) = basis.split_at_mut(i);
                head[j].sub_scaled(&c, &rest[0]);
            }
        }
    }
    CuspSpace::from_parts(k, basis, p)
}

/// Coefficients `1..=m` of `T_n f` for a weight `k` form `f`:
/// `a(T_n f, i) = sum_{d | (i, n)} d^{k-1} a(f, i n / d^2)`.
pub fn hecke_action(f: &QSeries, k: u32, n: u64, m: usize) -> Result<Vec<BigInt>> {
    if n == 0 {
        return domain("n", "Hecke index must be positive");
    }
    let needed = m as u64 * n;
    if needed >= f.precision() as u64 {
        return Err(Error::Precision {
            needed,
            available: f.precision() as u64 - 1,
        });
    }
    let mut out = Vec::with_capacity(m);
    for i in 1..=m as u64 {
        let mut acc = BigInt::zero();
        for d in divisors(gcd(i, n)) {
            let t = f.coefficients()[(i * n / (d * d)) as usize].clone();
            if !t.is_zero() {
                acc += Pow::pow(BigInt::from(d), k - 1) * t;
            }
        }
        out.push(acc);
    }
    Ok(out)
}

/// Matrix of `T_n` in the echelon basis: column `j` holds the first `dim`
/// coefficients of `T_n b_j`, so eigenvectors are right eigenvectors.
pub fn hecke_matrix(space: &CuspSpace, n: u64) -> Result<Vec<Vec<BigInt>>> {
    let d = space.dim();
    let mut m = vec![vec![BigInt::zero(); d]; d];
    for (j, b) in space.basis().iter().enumerate() {
        let col = hecke_action(b, space.weight(), n, d)?;
        for (i, c) in col.into_iter().enumerate() {
            m[i][j] = c;
        }
    }
    Ok(m)
}

#[cfg(test)]
fn identity_matrix(d: usize) -> Vec<Vec<BigInt>> {
    (0..d)
        .map(|i| (0..d).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }).collect())
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimensions() {
        assert_eq!(dim_cusp(12).unwrap(), 1);
        assert_eq!(dim_cusp(26).unwrap(), 1);
        assert_eq!(dim_cusp(24).unwrap(), 2);
        for k in [4, 6, 8, 10, 14] {
            assert_eq!(dim_cusp(k).unwrap(), 0);
        }
        assert!(dim_cusp(2).is_err());
        assert!(dim_cusp(13).is_err());
    }

    #[test]
    fn weight_sixteen_is_e4_delta() {
        let s = victor_miller_basis(16, 10).unwrap();
        assert_eq!(s.dim(), 1);
        let e4d = &eisenstein_e4(11) * &delta(11).unwrap();
        assert_eq!(s.basis()[0], e4d);
        assert_eq!(s.basis()[0].coefficients()[2], BigInt::from(216));
    }

    #[test]
    fn echelon_property() {
        for k in [24, 36, 48, 62, 100] {
            let s = victor_miller_basis(k, 30).unwrap();
            for (j, b) in s.basis().iter().enumerate() {
                for i in 1..=s.dim() {
                    let expect = if i == j + 1 { 1 } else { 0 };
                    assert_eq!(b.coefficients()[i], BigInt::from(expect), "k={k} i={i} j={j}");
                }
                assert!(b.coefficients()[0].is_zero());
            }
        }
    }

    #[test]
    fn hecke_on_delta() {
        let s = victor_miller_basis(12, 40).unwrap();
        assert_eq!(hecke_matrix(&s, 2).unwrap(), vec![vec![BigInt::from(-24)]]);
        assert_eq!(hecke_matrix(&s, 6).unwrap(), vec![vec![BigInt::from(-6048)]]);
        assert_eq!(hecke_matrix(&s, 1).unwrap(), identity_matrix(1));
        assert!(matches!(hecke_matrix(&s, 41), Err(Error::Precision { .. })));
    }

    #[test]
    fn hecke_operators_commute() {
        let s = victor_miller_basis(48, 40).unwrap();
        let t2 = hecke_matrix(&s, 2).unwrap();
        let t3 = hecke_matrix(&s, 3).unwrap();
        let mul = |a: &Vec<Vec<BigInt>>, b: &Vec<Vec<BigInt>>| -> Vec<Vec<BigInt>> {
            let d = a.len();
            (0..d)
                .map(|i| (0..d).map(|j| (0..d).map(|l| &a[i][l] * &b[l][j]).sum()).collect())
                .collect()
        };
        assert_eq!(mul(&t2, &t3), mul(&t3, &t2));
        assert_eq!(mul(&t2, &t3), hecke_matrix(&s, 6).unwrap());
    }
}
