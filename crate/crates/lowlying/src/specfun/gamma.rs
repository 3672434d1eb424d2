//! Log-gamma and digamma for complex arguments with positive real part.

use std::f64::consts::PI;

use num_complex::Complex64;

// B_{2k} for k = 1..=10.
const BERNOULLI: [f64; 10] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
    7.0 / 6.0,
    -3617.0 / 510.0,
    43867.0 / 798.0,
    -174611.0 / 330.0,
];

const SHIFT: f64 = 16.0;

/// A branch of `log Gamma(z)`, for `Re z > 0`.
///
/// The imaginary part is not reduced modulo `2 pi`; only `exp` of the result
/// and real parts are meaningful to callers.
pub fn ln_gamma(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "ln_gamma needs Re z > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < SHIFT {
        shift += w.ln();
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += p * (b / (2.0 * k * (2.0 * k - 1.0)));
        p *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * (2.0 * PI).ln() + series - shift
}

/// `psi(z) = Gamma'(z) / Gamma(z)` for `Re z > 0`.
pub fn digamma_complex(z: Complex64) -> Complex64 {
    assert!(z.re > 0.0, "digamma needs Re z > 0");
    let mut shift = Complex64::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < SHIFT {
        shift += 1.0 / w;
        w += 1.0;
    }
    let inv = 1.0 / w;
    let inv2 = inv * inv;
    let mut series = Complex64::new(0.0, 0.0);
    let mut p = inv2;
    for (k, b) in BERNOULLI.iter().enumerate() {
        let k = (k + 1) as f64;
        series += p * (b / (2.0 * k));
        p *= inv2;
    }
    w.ln() - 0.5 * inv - series - shift
}

pub fn digamma(x: f64) -> f64 {
    digamma_complex(Complex64::new(x, 0.0)).re
}

pub fn ln_gamma_real(x: f64) -> f64 {
    ln_gamma(Complex64::new(x, 0.0)).re
}

#[cfg(test)]
mod tests {
    use super::*;

    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

    #[test]
    fn digamma_special_values() {
        assert!((digamma(1.0) + EULER_GAMMA).abs() < 1e-15);
        assert!((digamma(0.5) + EULER_GAMMA + 2.0 * 2f64.ln()).abs() < 1e-14);
        // psi(n + 1) = H_n - gamma
        let h: f64 = (1..=30).map(|k| 1.0 / k as f64).sum();
        assert!((digamma(31.0) - (h - EULER_GAMMA)).abs() < 1e-14);
    }

    #[test]
    fn ln_gamma_factorials() {
        let mut f = 0.0;
        for n in 1..60 {
            assert!((ln_gamma_real(n as f64) - f).abs() < 1e-12 * f.max(1.0), "n={n}");
            f += (n as f64).ln();
        }
    }

    #[test]
    fn reflection_on_critical_line() {
        // |Gamma(1/2 + it)|^2 = pi / cosh(pi t)
        for t in [0.0, 0.7, 3.0, 12.5, 40.0] {
            let lg = ln_gamma(Complex64::new(0.5, t));
            let lhs = 2.0 * lg.re;
            let rhs = PI.ln() - (PI * t).cosh().ln();
            assert!((lhs - rhs).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn digamma_recurrence_and_derivative() {
        let z = Complex64::new(2.3, -4.1);
        let d = digamma_complex(z + 1.0) - digamma_complex(z) - 1.0 / z;
        assert!(d.norm() < 1e-14);
        let h = 1e-5;
        let fd = (ln_gamma(z + h) - ln_gamma(z - h)) / (2.0 * h);
        assert!((fd - digamma_complex(z)).norm() < 1e-8);
    }
}
