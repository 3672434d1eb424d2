//! Bessel series over the weight and the archimedean term of the explicit
//! formula.

use std::f64::consts::{FRAC_PI_4, PI};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::bessel::bessel_j_all;
use super::quad::integrate_breaks;
use super::testfn::TestFunction;
use super::vh::VhTransform;
use crate::sum::NeumaierSum;
use crate::{domain, Result};

/// Beyond this argument `|V_h|` is far below double precision resolution of
/// the other terms and is taken as zero.
const VH_NEGLIGIBLE: f64 = 20_000.0;

/// Which weighted Bessel series to compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SeriesKind {
    /// `4 sum_{l = a mod 4} h(l/L) J_l(x)` with `a` in {1, 3}.
    Residue(u8),
    /// `2 sum_{l odd} h(l/L) i^{l+1} J_l(x)`.
    Alternating,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BesselSeriesReport {
    pub kind: SeriesKind,
    pub l: f64,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    /// The `V_h` (imaginary part) term included in `rhs`.
    pub vh_term: f64,
    pub residual: f64,
}

/// `Im(e^{i(x - pi/4)} L x^{-1/2} V_h(L^2 / 2x))`.
pub fn vh_oscillatory_term(vh: &VhTransform, l: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    let xi = l * l / (2.0 * x);
    if xi > VH_NEGLIGIBLE {
        return 0.0;
    }
    let v = vh.interpolate(xi);
    (Complex64::from_polar(l / x.sqrt(), x - FRAC_PI_4) * v).im
}

/// Compare a weighted Bessel series with its main terms.
pub fn bessel_series_check(vh: &VhTransform, kind: SeriesKind, l: f64, x: f64) -> Result<BesselSeriesReport> {
    if !(l >= 10.0) {
        return domain("L", format!("must be at least 10, got {l}"));
    }
    if !(x >= 0.0 && x.is_finite()) {
        return domain("x", format!("must be finite and nonnegative, got {x}"));
    }
    if let SeriesKind::Residue(a) = kind {
        if a != 1 && a != 3 {
            return domain("a", format!("residue must be 1 or 3, got {a}"));
        }
    }
    let h = vh.window();
    let (_, b) = h.support();
    let lmax = (b * l).ceil() as usize + 1;
    let j = bessel_j_all(lmax, x);
    let mut acc = NeumaierSum::new();
    for (order, jl) in j.iter().enumerate().skip(1) {
        let w = h.eval(order as f64 / l);
        if w == 0.0 {
            continue;
        }
        match kind {
            SeriesKind::Residue(a) if order % 4 == a as usize => acc.add(4.0 * w * jl),
            SeriesKind::Alternating if order % 2 == 1 => {
                // i^{l+1} is -1 for l = 1 mod 4 and +1 for l = 3 mod 4.
                let sign = if order % 4 == 1 { -1.0 } else { 1.0 };
                acc.add(2.0 * sign * w * jl);
            }
            _ => {}
        }
    }
    let lhs = acc.value();
    let vh_term = vh_oscillatory_term(vh, l, x);
    let rhs = match kind {
        SeriesKind::Residue(a) => {
            // i^{1-a} is 1 for a = 1 and -1 for a = 3 (a = -1 mod 4).
            let twist = if a == 1 { 1.0 } else { -1.0 };
            let t = x / l;
            h.eval(t) + twist * vh_term + x / (6.0 * l * l * l) * h.derivative(3, t)
        }
        SeriesKind::Alternating => -vh_term,
    };
    Ok(BesselSeriesReport {
        kind,
        l,
        x,
        lhs,
        rhs,
        vh_term,
        residual: lhs - rhs,
    })
}

/// The archimedean term of the explicit formula for a weight `k`, level
/// `level` form, with the test function dilated by `scale`:
///
/// `(1/2pi) int (log N - 2 log 2pi + psi(k/2 + ir) + psi(k/2 - ir)) phi(r scale / 2pi) dr`.
///
/// Evaluated on the Fourier side through Gauss's integral for `psi`.
pub fn digamma_arch_term(k: u32, level: u64, tf: &dyn TestFunction, scale: f64) -> Result<f64> {
    if k < 1 {
        return domain("k", "weight must be positive");
    }
    if !(scale > 0.0) {
        return domain("scale", "must be positive");
    }
    let a = 0.5 * k as f64;
    let c = (level as f64).ln() - 2.0 * (2.0 * PI).ln();
    let h0 = tf.phi_hat(0.0);
    let integrand = |t: f64| {
        if t == 0.0 {
            return 0.0;
        }
        let em1 = -(-t).exp_m1();
        let ea = (-a * t).exp();
        h0 * ((-t).exp() / t - ea / em1) + ea * (h0 - tf.phi_hat(t / scale)) / em1
    };
    let r = tf.support_radius() * scale;
    let mut breaks: Vec<f64> = tf.hat_breakpoints().iter().map(|b| b * scale).collect();
    breaks.extend([0.0, 1.0, 4.0, r + 60.0]);
    breaks.extend((1..16).map(|j| r * j as f64 / 16.0));
    breaks.retain(|b| *b >= 0.0 && *b <= r + 60.0);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let q = integrate_breaks(integrand, &breaks, 1e-13)?;
    Ok(c * h0 / scale + 2.0 / scale * q.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::testfn::make_sinc_sq;
    use crate::specfun::window::SmoothWindow;

    #[test]
    fn zero_argument_series_vanishes() {
        let vh = VhTransform::new(SmoothWindow::default());
        let r = bessel_series_check(&vh, SeriesKind::Residue(1), 50.0, 0.0).unwrap();
        assert_eq!(r.lhs, 0.0);
        assert_eq!(r.rhs, 0.0);
    }

    #[test]
    fn vh_term_small_below_threshold() {
        let vh = VhTransform::new(SmoothWindow::default());
        let h0 = vh.window().hhat0();
        for l in [100.0f64, 400.0, 1000.0] {
            let x = l * l / 1000.0;
            assert!(vh_oscillatory_term(&vh, l, x).abs() < 1e-8 * h0);
        }
    }

    struct Zero;

    impl TestFunction for Zero {
        fn name(&self) -> String {
            "zero".into()
        }
        fn phi(&self, _: f64) -> f64 {
            0.0
        }
        fn phi_hat(&self, _: f64) -> f64 {
            0.0
        }
        fn support_radius(&self) -> f64 {
            1.0
        }
    }

    #[test]
    fn arch_term_of_zero_function() {
        assert_eq!(digamma_arch_term(12, 1, &Zero, 5.0).unwrap(), 0.0);
    }

    #[test]
    fn arch_term_tends_to_integral() {
        let f = make_sinc_sq(1.0).unwrap();
        let mut prev = f64::INFINITY;
        for k in [12u32, 120, 1200, 12_000, 120_000] {
            let scale = 2.0 * (k as f64).ln();
            let gap = (digamma_arch_term(k, 1, &f, scale).unwrap() - f.integral()).abs();
            assert!(gap < prev);
            prev = gap;
        }
        assert!(prev < 0.12);
    }
}
