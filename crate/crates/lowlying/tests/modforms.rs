use lowlying::arith::{divisor_count, divisors, gcd, PrimeTable};
use lowlying::modforms::qseries::delta_coefficients;
use lowlying::modforms::{
    dim_cusp, eigenforms, eta_product_level11, hecke_matrix, l1_sym2, sym_sq_truncation, victor_miller_basis,
    HeckeEigenform,
};
use num_traits::ToPrimitive;

/// tau(n) by expanding q prod (1 - q^n)^24 one factor at a time.
fn tau_oracle(len: usize) -> Vec<i128> {
    let mut acc = vec![0i128; len];
    acc[1] = 1;
    for n in 1..len {
        for _ in 0..24 {
            for j in (n + 1..len).rev() {
                acc[j] -= acc[j - n];
            }
        }
    }
    acc
}

fn forms(k: u32, nmax: usize) -> Vec<HeckeEigenform> {
    eigenforms(&victor_miller_basis(k, nmax).unwrap(), nmax).unwrap()
}

#[test]
fn delta_expansion_matches_product_oracle() {
    let t = tau_oracle(400);
    assert_eq!(delta_coefficients(400).unwrap(), t);
    let s = victor_miller_basis(12, 399).unwrap();
    let b: Vec<i128> = s.basis()[0].coefficients().iter().map(|c| c.to_i128().unwrap()).collect();
    assert_eq!(b, t);
}

#[test]
fn one_eigenform_per_dimension() {
    for k in (12..=200).step_by(2) {
        let d = dim_cusp(k).unwrap();
        let nmax = 6 * d.max(1) + 2;
        assert_eq!(forms(k, nmax).len(), d, "k={k}");
    }
}

#[test]
fn trace_matches_eigenvalue_sum() {
    for k in (12..=60).step_by(2) {
        if dim_cusp(k).unwrap() == 0 {
            continue;
        }
        let s = victor_miller_basis(k, 40).unwrap();
        let f = eigenforms(&s, 7).unwrap();
        for n in [2u64, 3, 5, 7] {
            let m = hecke_matrix(&s, n).unwrap();
            let tr: f64 = (0..s.dim()).map(|i| m[i][i].to_f64().unwrap()).sum();
            let scale = (n as f64).powf((k as f64 - 1.0) / 2.0);
            let sum: f64 = f.iter().map(|g| g.lambdas()[n as usize] * scale).sum();
            assert!((tr - sum).abs() <= 1e-6 * tr.abs().max(scale), "k={k} n={n}: {tr} vs {sum}");
        }
    }
}

fn check_multiplicative(f: &HeckeEigenform, level: u64, limit: u64, tol: f64) {
    for m in 1..=limit {
        for n in 1..=limit {
            let lhs = f.lambdas()[m as usize] * f.lambdas()[n as usize];
            let rhs: f64 = divisors(gcd(m, n))
                .into_iter()
                .filter(|&d| gcd(d, level) == 1)
                .map(|d| f.lambdas()[(m * n / (d * d)) as usize])
                .sum();
            assert!((lhs - rhs).abs() <= tol * (1.0 + rhs.abs()), "m={m} n={n}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn hecke_relations_level_one() {
    for k in [12, 24] {
        for f in forms(k, 2500) {
            check_multiplicative(&f, 1, 50, 1e-9);
            for n in 1..=2500u64 {
                assert!(f.lambdas()[n as usize].abs() <= divisor_count(n) as f64 * (1.0 + 1e-12));
            }
        }
    }
}

#[test]
fn hecke_relations_level_eleven() {
    let f = eta_product_level11(2500).unwrap();
    check_multiplicative(&f, 11, 50, 1e-12);
}

#[test]
fn weight_twelve_and_twenty_four_values() {
    let d = forms(12, 10);
    assert!((d[0].lambdas()[2] + 0.530_330_085_9).abs() < 1e-10);
    let two = forms(24, 10);
    assert_eq!(two.len(), 2);
    for f in &two {
        assert_eq!(f.lambdas()[1], 1.0);
        assert!(f.lambdas()[2].abs() <= 2.0);
    }
    // T_2 on weight 24 has characteristic polynomial x^2 - 1080 x - 20468736 (eigenvalues 540 +- 12 sqrt(144169)).
    let a2: Vec<f64> = two.iter().map(|f| f.lambdas()[2] * 2f64.powf(11.5)).collect();
    let disc = (1080.0f64 * 1080.0 + 4.0 * 20_468_736.0).sqrt();
    assert!((a2[0] - (1080.0 - disc) / 2.0).abs() < 1e-6);
    assert!((a2[1] - (1080.0 + disc) / 2.0).abs() < 1e-6);
}

#[test]
fn sign_rule_level_one() {
    for k in (12..=40).step_by(2) {
        for f in forms(k, 12) {
            assert_eq!(f.sign() == 1, k % 4 == 0, "k={k}");
        }
    }
}

#[test]
fn prime_power_eigenvalues_two_routes() {
    let len = 100_000;
    let tau = delta_coefficients(len).unwrap();
    let f = forms(12, 2500).remove(0);
    let lam = |n: usize| tau[n] as f64 / (n as f64).powf(5.5);
    for &p in PrimeTable::new(50).primes() {
        let p = p as usize;
        let recur2 = f.lambda_prime_power(p as u64, 2).unwrap();
        assert!((recur2 - lam(p * p)).abs() < 1e-12, "p={p}");
        if p.pow(4) < len {
            let recur = f.lambda_prime_power(p as u64, 4).unwrap() - recur2;
            assert!((recur - (lam(p.pow(4)) - lam(p * p))).abs() < 1e-11, "p={p}");
        }
    }
}

#[test]
fn symmetric_square_band_and_sweep() {
    for k in [12u32, 24, 36, 48] {
        let fs = forms(k, 400);
        let lk = (k as f64).ln();
        for f in &fs {
            let v = l1_sym2(f).unwrap();
            assert!(v > lk.powi(-2) && v < lk.powi(2), "k={k}: {v}");
        }
    }
    let f = forms(12, 1 << 13).remove(0);
    let vals: Vec<f64> = (4..=13).map(|j| sym_sq_truncation(&f, 1 << j).unwrap().value).collect();
    for (j, w) in vals.windows(2).enumerate() {
        let x = (1u64 << (j + 4)) as f64;
        assert!((w[1] - w[0]).abs() <= 4.0 / x.sqrt(), "X={x}");
    }
}
