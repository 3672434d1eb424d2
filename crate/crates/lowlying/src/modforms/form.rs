//! Normalised Hecke eigenforms.

use serde::{Deserialize, Serialize};

use crate::arith::factorize;
use crate::{domain, Error, Result};

/// A Hecke eigenform with Deligne-normalised eigenvalues
/// `lambda(n) = a(n) / n^{(k-1)/2}` for `n <= nmax`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HeckeEigenform {
    k: u32,
    level: u64,
    /// `lambda[n]` for `0 <= n <= nmax`; `lambda[0]` is unused and zero.
    lambda: Vec<f64>,
    sign: i8,
}

impl HeckeEigenform {
    pub(crate) fn new(k: u32, level: u64, lambda: Vec<f64>, sign: i8) -> Self {
        Self { k, level, lambda, sign }
    }

    /// `Delta` with `lambda(n) = tau(n) / n^{11/2}` for `n <= nmax`.
    pub fn delta(nmax: usize) -> Result<Self> {
        let tau = super::qseries::delta_coefficients(nmax + 1)?;
        let lambda = tau
            .iter()
            .enumerate()
            .map(|(n, t)| if n == 0 { 0.0 } else { *t as f64 / (n as f64).powf(5.5) })
            .collect();
        Ok(Self::new(12, 1, lambda, 1))
    }

    pub fn weight(&self) -> u32 {
        self.k
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn nmax(&self) -> usize {
        self.lambda.len() - 1
    }

    /// Root number of the functional equation.
    pub fn sign(&self) -> i8 {
        self.sign
    }

    /// `lambda(0..=nmax)` as computed from the q-expansion.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambda
    }

    fn stored(&self, n: u64) -> Result<f64> {
        self.lambda.get(n as usize).copied().ok_or(Error::Precision {
            needed: n,
            available: self.nmax() as u64,
        })
    }

    /// `lambda(p^e)` from `lambda(p)` by the Hecke recursion
    /// `lambda(p^{j+1}) = lambda(p) lambda(p^j) - lambda(p^{j-1})`
    /// (or `lambda(p)^e` when `p` divides the level).
    pub fn lambda_prime_power(&self, p: u64, e: u32) -> Result<f64> {
        let lp = self.stored(p)?;
        if self.level % p == 0 {
            return Ok(lp.powi(e as i32));
        }
        let (mut prev, mut cur) = (1.0, lp);
        if e == 0 {
            return Ok(1.0);
        }
        for _ in 1..e {
            let next = lp * cur - prev;
            prev = cur;
            cur = next;
        }
        Ok(cur)
    }

    /// `lambda(n)`: stored values up to `nmax`, multiplicativity beyond.
    pub fn lambda(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return domain("n", "eigenvalues are indexed from 1");
        }
        if (n as usize) <= self.nmax() {
            return self.stored(n);
        }
        self.lambda_multiplicative(n)
    }

    /// `lambda(n)` assembled from prime-power values only.
    pub fn lambda_multiplicative(&self, n: u64) -> Result<f64> {
        let mut v = 1.0;
        for (p, e) in factorize(n) {
            v *= self.lambda_prime_power(p, e)?;
        }
        Ok(v)
    }

    /// Truncated harmonic-weight sum `sum_{t <= T} lambda(t^2) / t`.
    pub fn harmonic_sum(&self, t_max: u64) -> Result<f64> {
        let mut acc = crate::NeumaierSum::new();
        for t in 1..=t_max {
            acc.add(self.lambda(t * t)? / t as f64);
        }
        Ok(acc.value())
    }
}
