//! `L(1, sym^2 f)`: the sharp truncation and a smoothed evaluation.
//!
//! The sharp sum `sum_{m^2 n <= X} lambda(n^2) / (m^2 n)` converges like
//! `X^{-1/2}`. For values needed to many digits we use the approximate
//! functional equation of the completed function
//! `Lambda(s) = gamma(s) L(s, sym^2 f)`,
//! `gamma(s) = N^s pi^{-3s/2} Gamma((s+1)/2) Gamma((s+k-1)/2) Gamma((s+k)/2)`,
//! which is even under `s -> 1 - s`. With the trivial weight,
//! `Lambda(1) = sum a_n (W(1, n) + W(0, n))` where
//! `W(s, n) = (1/2 pi i) int_{(c)} gamma(s+u) n^{-s-u} du / u`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::form::HeckeEigenform;
use crate::arith::gcd;
use crate::specfun::quad::gauss_legendre;
use crate::specfun::ln_gamma;
use crate::sum::NeumaierSum;
use crate::{domain, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SymSqData {
    pub weight: u32,
    pub level: u64,
    pub cutoff: u64,
    pub value: f64,
}

/// `lambda(n^2)` for `1 <= n <= x` through a smallest-prime-factor sieve.
fn lambda_squares(f: &HeckeEigenform, x: u64) -> Result<Vec<f64>> {
    let x = x as usize;
    let mut spf = vec![0u32; x + 1];
    for p in 2..=x {
        if spf[p] == 0 {
            for m in (p..=x).step_by(p) {
                if spf[m] == 0 {
                    spf[m] = p as u32;
                }
            }
        }
    }
    let mut out = vec![0.0; x + 1];
    if x >= 1 {
        out[1] = 1.0;
    }
    for n in 2..=x {
        let p = spf[n] as usize;
        let mut r = n;
        let mut e = 0;
        while r % p == 0 {
            r /= p;
            e += 1;
        }
        out[n] = f.lambda_prime_power(p as u64, 2 * e)? * out[r];
    }
    Ok(out)
}

/// `sum_{m^2 n <= X, (m, N) = 1} lambda(n^2) / (m^2 n)`.
pub fn sym_sq_truncation(f: &HeckeEigenform, x: u64) -> Result<SymSqData> {
    if x < 1 {
        return domain("X", "cutoff must be at least 1");
    }
    let lam = lambda_squares(f, x)?;
    let mut acc = NeumaierSum::new();
    for (n, l) in lam.iter().enumerate().skip(1) {
        let mut inner = NeumaierSum::new();
        let mut m = 1u64;
        while m * m * n as u64 <= x {
            if gcd(m, f.level()) == 1 {
                inner.add(1.0 / (m * m) as f64);
            }
            m += 1;
        }
        acc.add(l / n as f64 * inner.value());
    }
    Ok(SymSqData {
        weight: f.weight(),
        level: f.level(),
        cutoff: x,
        value: acc.value(),
    })
}

/// `log gamma(z)` for the completed symmetric square.
fn ln_gamma_factor(z: Complex64, k: u32, level: u64) -> Complex64 {
    let kf = k as f64;
    z * (level as f64).ln() - z * (1.5 * PI.ln())
        + ln_gamma((z + 1.0) * 0.5)
        + ln_gamma((z + kf - 1.0) * 0.5)
        + ln_gamma((z + kf) * 0.5)
}

/// Terms are dropped once they fall below this fraction of the first.
const AFE_TAIL: f64 = 1e-19;
const PANEL: f64 = 0.25;

/// `L(1, sym^2 f)` from the approximate functional equation with contour
/// abscissa `c`.
fn l1_sym2_with(f: &HeckeEigenform, c: f64) -> Result<f64> {
    let (k, level) = (f.weight(), f.level());
    let lg1 = ln_gamma_factor(Complex64::new(1.0, 0.0), k, level);
    let kernel = |s: f64, t: f64| {
        let u = Complex64::new(c, t);
        (ln_gamma_factor(u + s, k, level) - lg1).exp() / u
    };
    // Integration range in t: both kernels decay like exp(-3 pi t / 4).
    let scale = kernel(0.0, 0.0).norm().max(kernel(1.0, 0.0).norm());
    let mut t_max = 1.0;
    while kernel(0.0, t_max).norm().max(kernel(1.0, t_max).norm()) > AFE_TAIL * 1e-3 * scale {
        t_max += 1.0;
        if t_max > 1e4 {
            return Err(Error::Quadrature("symmetric square kernel does not decay".into()));
        }
    }
    let panels = (t_max / PANEL).ceil() as usize;
    let h = t_max / panels as f64;
    let (gx, gw) = gauss_legendre(16);
    let mut nodes = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let lo = p as f64 * h;
        for (x, w) in gx.iter().zip(&gw) {
            let t = lo + 0.5 * h * (x + 1.0);
            nodes.push((t, 0.5 * h * w, kernel(1.0, t), kernel(0.0, t)));
        }
    }
    // W(1, n) + W(0, n) = (1/pi) Re int_0^inf [K1(t) n^{-1-c-it} + K0(t) n^{-c-it}] dt.
    let weight = |n: f64| {
        let ln = n.ln();
        let mut acc = NeumaierSum::new();
        for &(t, w, k1, k0) in &nodes {
            let phase = Complex64::from_polar(1.0, -t * ln);
            acc.add(w * ((k1 / n + k0) * phase).re);
        }
        acc.value() * n.powf(-c) / PI
    };
    let first = weight(1.0).abs();
    let mut total = NeumaierSum::new();
    let mut quiet = 0;
    let mut n = 1u64;
    while quiet < 8 {
        let w = weight(n as f64);
        if w.abs() < AFE_TAIL * first {
            quiet += 1;
        } else {
            quiet = 0;
        }
        // a_n = sum_{m^2 | n, (m, N) = 1} lambda((n / m^2)^2)
        let mut a = 0.0;
        let mut m = 1u64;
        while m * m <= n {
            if n % (m * m) == 0 && gcd(m, level) == 1 {
                let r = n / (m * m);
                a += f.lambda(r * r)?;
            }
            m += 1;
        }
        total.add(a * w);
        n += 1;
    }
    Ok(total.value())
}

/// `L(1, sym^2 f)` to close to double precision.
pub fn l1_sym2(f: &HeckeEigenform) -> Result<f64> {
    l1_sym2_with(f, 2.0)
}
