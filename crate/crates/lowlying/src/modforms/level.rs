//! The weight 2 newform of level 11 as an eta product.

use num_traits::ToPrimitive;

use super::form::HeckeEigenform;
use super::qseries::eta_product;
use crate::arith::mobius;
use crate::{domain, Result};

const LEVEL: u64 = 11;

/// `q prod (1 - q^n)^2 (1 - q^{11 n})^2` with `lambda(n) = a(n) / sqrt(n)` and
/// sign `-mu(N) lambda(N) sqrt(N)`.
pub fn eta_product_level11(nmax: usize) -> Result<HeckeEigenform> {
    if nmax < 2 {
        return domain("nmax", format!("must be at least 2, got {nmax}"));
    }
    let p = nmax.max(LEVEL as usize) + 1;
    let s = eta_product(&[(1, 2), (LEVEL as usize, 2)], 1, p);
    let a: Vec<f64> = s.coefficients().iter().map(|c| c.to_f64().expect("small")).collect();
    let lambda: Vec<f64> = (0..=nmax).map(|n| if n == 0 { 0.0 } else { a[n] / (n as f64).sqrt() }).collect();
    let lam_n = a[LEVEL as usize] / (LEVEL as f64).sqrt();
    let eps = -(mobius(LEVEL) as f64) * lam_n * (LEVEL as f64).sqrt();
    Ok(HeckeEigenform::new(2, LEVEL, lambda, eps.round() as i8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::PrimeTable;

    #[test]
    fn first_coefficients_and_sign() {
        let f = eta_product_level11(20).unwrap();
        let l = f.lambdas();
        assert!((l[2] * 2f64.sqrt() + 2.0).abs() < 1e-14);
        assert!((l[3] * 3f64.sqrt() + 1.0).abs() < 1e-14);
        assert_eq!(f.sign(), 1);
        assert!(eta_product_level11(1).is_err());
    }

    #[test]
    fn ramanujan_bound() {
        let f = eta_product_level11(100).unwrap();
        for &p in PrimeTable::new(100).primes() {
            assert!(f.lambdas()[p as usize].abs() <= 2.0);
        }
    }
}
