//! The smooth compactly supported window `h`.

use serde::{Deserialize, Serialize};

use super::quad::integrate;
use crate::{domain, Result};

/// The bump `exp(-1/(1-u^2))` with `u` the affine image of `[a, b]` on `[-1, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothWindow {
    a: f64,
    b: f64,
    hhat0: f64,
}

impl Default for SmoothWindow {
    fn default() -> Self {
        Self::bump(0.5, 2.0).expect("valid default support")
    }
}

impl SmoothWindow {
    pub fn bump(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0 && b > a && b.is_finite()) {
            return domain("support", format!("need 0 < a < b < inf, got [{a}, {b}]"));
        }
        let mut w = Self { a, b, hhat0: 0.0 };
        let q = integrate(|t| w.eval(t), a, b, 1e-14)?;
        w.hhat0 = q.value;
        Ok(w)
    }

    pub fn support(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// `hat h(0) = int h`.
    pub fn hhat0(&self) -> f64 {
        self.hhat0
    }

    fn u(&self, t: f64) -> f64 {
        (2.0 * t - (self.a + self.b)) / (self.b - self.a)
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.derivative(0, t)
    }

    /// `h^{(order)}(t)` for `order <= 3`.
    pub fn derivative(&self, order: u32, t: f64) -> f64 {
        assert!(order <= 3, "derivatives up to order 3 are implemented");
        if t <= self.a || t >= self.b {
            return 0.0;
        }
        let u = self.u(t);
        let w = 1.0 - u * u;
        let g = (-1.0 / w).exp();
        if g == 0.0 {
            return 0.0;
        }
        // Derivatives of the exponent E(u) = -1/w.
        let e1 = -2.0 * u / (w * w);
        let e2 = -2.0 / (w * w) - 8.0 * u * u / (w * w * w);
        let e3 = -24.0 * u / (w * w * w) - 48.0 * u * u * u / (w * w * w * w);
        let du = 2.0 / (self.b - self.a);
        match order {
            0 => g,
            1 => g * e1 * du,
            2 => g * (e2 + e1 * e1) * du * du,
            _ => g * (e3 + 3.0 * e1 * e2 + e1 * e1 * e1) * du * du * du,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivatives_match_finite_differences() {
        let w = SmoothWindow::default();
        let step = 1e-4;
        for t in [0.7, 1.0, 1.25, 1.6, 1.9] {
            for k in 1..=3 {
                let fd = (w.derivative(k - 1, t + step) - w.derivative(k - 1, t - step)) / (2.0 * step);
                let d = w.derivative(k, t);
                assert!((fd - d).abs() < 1e-5 * (1.0 + d.abs()), "t={t} k={k}: {d} vs {fd}");
            }
        }
    }

    #[test]
    fn support_and_positivity() {
        let w = SmoothWindow::default();
        assert_eq!(w.eval(0.5), 0.0);
        assert_eq!(w.eval(2.0), 0.0);
        assert_eq!(w.eval(0.1), 0.0);
        assert!((w.eval(1.25) - (-1.0f64).exp()).abs() < 1e-15);
        assert!(w.hhat0() > 0.0);
        assert!(SmoothWindow::bump(1.0, 1.0).is_err());
    }

    #[test]
    fn integral_by_independent_rule() {
        let w = SmoothWindow::default();
        let n = 20000;
        let h = 1.5 / n as f64;
        let s: f64 = (1..n).map(|j| w.eval(0.5 + j as f64 * h)).sum::<f64>() * h;
        assert!((s - w.hhat0()).abs() < 1e-12);
    }
}
