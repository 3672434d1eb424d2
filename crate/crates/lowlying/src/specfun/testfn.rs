//! Even test functions with compactly supported Fourier transforms.
//!
//! Fourier convention: `phi_hat(xi) = int phi(x) e(-x xi) dx`.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{domain, Error, Result};

pub trait TestFunction: Send + Sync {
    fn name(&self) -> String;
    fn phi(&self, x: f64) -> f64;
    fn phi_hat(&self, xi: f64) -> f64;
    /// `phi_hat` vanishes outside `[-r, r]`.
    fn support_radius(&self) -> f64;
    fn phi0(&self) -> f64 {
        self.phi(0.0)
    }
    fn integral(&self) -> f64 {
        self.phi_hat(0.0)
    }
    /// Points in `[0, r]` where `phi_hat` is not smooth.
    fn hat_breakpoints(&self) -> Vec<f64> {
        vec![0.0, self.support_radius()]
    }
    /// An exact expansion of `phi(x)` for large `x` as a finite sum of
    /// [`TrigTerm`]s, if one exists.
    fn far_field(&self) -> Option<Vec<TrigTerm>> {
        None
    }
}

/// `coef * x^{-power} * cos(freq * x + phase)` with `freq >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrigTerm {
    pub coef: f64,
    pub power: u32,
    pub freq: f64,
    pub phase: f64,
}

impl TrigTerm {
    pub fn new(coef: f64, power: u32, freq: f64, phase: f64) -> Self {
        if freq < 0.0 {
            Self { coef, power, freq: -freq, phase: -phase }
        } else {
            Self { coef, power, freq, phase }
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coef * x.powi(-(self.power as i32)) * (self.freq * x + self.phase).cos()
    }

    /// The product, as a sum of two terms.
    pub fn times(&self, other: &TrigTerm) -> [TrigTerm; 2] {
        let c = 0.5 * self.coef * other.coef;
        let n = self.power + other.power;
        [
            TrigTerm::new(c, n, self.freq + other.freq, self.phase + other.phase),
            TrigTerm::new(c, n, self.freq - other.freq, self.phase - other.phase),
        ]
    }

    /// `int_x0^inf` of the term, for `power >= 2` or an oscillating term with
    /// `power >= 1`. Oscillating terms use the asymptotic series
    /// `int_X^inf x^{-n} e^{ibx} dx = -e^{ibX} X^{-n} / (ib) sum_j (n)_j / (ibX)^j`,
    /// which needs `freq * x0` well above `power`.
    pub fn tail_integral(&self, x0: f64) -> Result<f64> {
        let n = self.power as f64;
        if self.freq == 0.0 {
            if self.power < 2 {
                return domain("power", "non-oscillating tail needs power >= 2");
            }
            return Ok(self.coef * self.phase.cos() * x0.powf(1.0 - n) / (n - 1.0));
        }
        if self.power == 0 {
            return domain("power", "oscillating tail needs power >= 1");
        }
        let bx = self.freq * x0;
        if bx < 4.0 * (n + 20.0) {
            return domain("x0", format!("freq * x0 = {bx} is too small for the asymptotic tail"));
        }
        // e^{i theta} I_n, I_n = (i e^{ibX} X^{-n} / b) sum_j (n)_j (-i / (bX))^j.
        let mut sum = Complex64::new(0.0, 0.0);
        let mut term = Complex64::new(1.0, 0.0);
        let step = Complex64::new(0.0, -1.0 / bx);
        for j in 0..200 {
            sum += term;
            term *= step * (n + j as f64);
            if term.norm() < 1e-18 * sum.norm() {
                break;
            }
        }
        let lead = Complex64::new(0.0, 1.0) * Complex64::from_polar(1.0, bx + self.phase) * x0.powf(-n) / self.freq;
        Ok(self.coef * (lead * sum).re)
    }
}

/// `phi(x) = (sin(2 pi nu x) / (2 pi nu x))^2`, whose transform is the
/// triangle of height `1/(2 nu)` on `[-2 nu, 2 nu]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SincSq {
    nu: f64,
}

impl SincSq {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return domain("nu", format!("must be positive, got {nu}"));
        }
        Ok(Self { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

pub fn make_sinc_sq(nu: f64) -> Result<SincSq> {
    SincSq::new(nu)
}

impl TestFunction for SincSq {
    fn name(&self) -> String {
        format!("sinc2:{}", self.nu)
    }

    fn phi(&self, x: f64) -> f64 {
        let z = 2.0 * PI * self.nu * x;
        if z.abs() < 1e-4 {
            let z2 = z * z;
            return 1.0 - z2 / 3.0 + 2.0 * z2 * z2 / 45.0;
        }
        let s = z.sin() / z;
        s * s
    }

    fn phi_hat(&self, xi: f64) -> f64 {
        let r = 2.0 * self.nu;
        (1.0 - xi.abs() / r).max(0.0) / r
    }

    fn support_radius(&self) -> f64 {
        2.0 * self.nu
    }

    fn phi0(&self) -> f64 {
        1.0
    }

    fn integral(&self) -> f64 {
        0.5 / self.nu
    }

    /// `sin^2(a x) / (a x)^2 = (1 - cos(2 a x)) / (2 a^2 x^2)` with `a = 2 pi nu`.
    fn far_field(&self) -> Option<Vec<TrigTerm>> {
        let a = 2.0 * PI * self.nu;
        let c = 0.5 / (a * a);
        Some(vec![TrigTerm::new(c, 2, 0.0, 0.0), TrigTerm::new(-c, 2, 2.0 * a, 0.0)])
    }
}

/// A parsed test-function name from the `sinc2:<nu>` grammar.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum TestFunctionSpec {
    SincSq(SincSq),
}

impl TestFunctionSpec {
    pub fn as_dyn(&self) -> &dyn TestFunction {
        match self {
            TestFunctionSpec::SincSq(s) => s,
        }
    }
}

impl FromStr for TestFunctionSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (family, arg) = s.split_once(':').ok_or_else(|| Error::Domain {
            name: "phi",
            reason: format!("expected <family>:<parameter>, got `{s}`"),
        })?;
        match family {
            "sinc2" => {
                let nu: f64 = arg.parse().map_err(|_| Error::Domain {
                    name: "phi",
                    reason: format!("`{arg}` is not a number"),
                })?;
                Ok(TestFunctionSpec::SincSq(SincSq::new(nu)?))
            }
            other => domain("phi", format!("unknown test function family `{other}`")),
        }
    }
}

impl fmt::Display for TestFunctionSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.as_dyn().name())
    }
}

/// `phi(x) = int phi_hat(xi) e(x xi) dx`, used to check a declared pair.
pub fn fourier_inverse(tf: &dyn TestFunction, x: f64) -> Result<f64> {
    let r = tf.support_radius();
    let mut breaks = tf.hat_breakpoints();
    let pieces = 8 + (2.0 * r * x.abs()).ceil() as usize;
    breaks.extend((1..pieces).map(|j| r * j as f64 / pieces as f64));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let q = super::quad::integrate_breaks(|xi: f64| 2.0 * tf.phi_hat(xi) * (2.0 * PI * x * xi).cos(), &breaks, 1e-13)?;
    Ok(q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::quad::integrate_breaks;

    #[test]
    fn sinc_sq_nu_one() {
        let f = make_sinc_sq(1.0).unwrap();
        assert_eq!(f.integral(), 0.5);
        assert_eq!(f.phi_hat(0.0), 0.5);
        assert_eq!(f.phi0(), 1.0);
        let q = integrate_breaks(|x| f.phi_hat(x), &[-1.0, 0.0, 1.0], 1e-14).unwrap();
        assert!((q.value - 0.75).abs() < 1e-13);
    }

    #[test]
    fn sinc_sq_two_thirds() {
        let f = make_sinc_sq(2.0 / 3.0).unwrap();
        assert!((f.integral() - 0.75).abs() < 1e-15);
        let q = integrate_breaks(|x| f.phi_hat(x), &[-1.0, 0.0, 1.0], 1e-14).unwrap();
        assert!((q.value - 15.0 / 16.0).abs() < 1e-13);
    }

    #[test]
    fn support_is_honoured() {
        let f = make_sinc_sq(0.7).unwrap();
        for xi in [1.4, 1.41, 2.0, 5.0, -1.5] {
            assert_eq!(f.phi_hat(xi), 0.0);
        }
    }

    #[test]
    fn fourier_inversion() {
        for nu in [0.5, 1.0, 7.0 / 6.0] {
            let f = make_sinc_sq(nu).unwrap();
            for x in [0.0, 0.1, 0.37, 1.0, 2.3, 5.5] {
                let inv = fourier_inverse(&f, x).unwrap();
                assert!((inv - f.phi(x)).abs() < 1e-8, "nu={nu} x={x}");
            }
        }
    }

    #[test]
    fn far_field_is_exact_for_sinc_sq() {
        let f = make_sinc_sq(0.8).unwrap();
        let terms = f.far_field().unwrap();
        for x in [0.3, 2.0, 17.5] {
            let v: f64 = terms.iter().map(|t| t.eval(x)).sum();
            assert!((v - f.phi(x)).abs() < 1e-14);
        }
    }

    #[test]
    fn oscillatory_tail_matches_quadrature() {
        let t = TrigTerm::new(1.3, 2, 5.0, 0.4);
        let x0 = 30.0;
        let far = t.tail_integral(400.0).unwrap();
        let q = integrate_breaks(|x| t.eval(x), &(0..=740).map(|j| x0 + 0.5 * j as f64).collect::<Vec<_>>(), 1e-14).unwrap();
        let direct = t.tail_integral(x0).unwrap();
        assert!((direct - (q.value + far)).abs() < 1e-13, "{direct} vs {}", q.value + far);
        let flat = TrigTerm::new(2.0, 3, 0.0, 0.0);
        assert!((flat.tail_integral(2.0).unwrap() - 0.25).abs() < 1e-15);
    }

    #[test]
    fn grammar() {
        let s: TestFunctionSpec = "sinc2:1.0".parse().unwrap();
        assert_eq!(s.as_dyn().support_radius(), 2.0);
        assert!("gauss:1".parse::<TestFunctionSpec>().is_err());
        assert!("sinc2:abc".parse::<TestFunctionSpec>().is_err());
        assert!("sinc2:-1".parse::<TestFunctionSpec>().is_err());
        assert!("sinc2".parse::<TestFunctionSpec>().is_err());
    }
}
