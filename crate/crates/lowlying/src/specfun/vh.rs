//! The transform `V_h(xi) = (2pi)^{-1/2} int h(sqrt u) u^{-1/2} e^{i xi u} du`
//! and its plane integrals.
//!
//! After `u = t^2` the integrand is `2 h(t) e^{i xi t^2}` on the support of
//! `h`, which is smooth, so composite Gauss–Legendre with about one panel per
//! oscillation is enough. A Hermite grid caches `V_h` for repeated use.

use std::f64::consts::{PI, TAU};
use std::sync::OnceLock;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::quad::{composite_gl, gauss_legendre, integrate_breaks};
use super::window::SmoothWindow;
use crate::{domain, Result};

const ORDER: usize = 16;

/// Grid tiers `(end, step)`, starting from 0; the step grows as `V_h` decays.
const TIERS: [(f64, f64); 3] = [(50.0, 0.005), (200.0, 0.02), (1100.0, 0.1)];

#[derive(Debug)]
pub struct VhTransform {
    window: SmoothWindow,
    gl: (Vec<f64>, Vec<f64>),
    grid: OnceLock<HermiteGrid>,
    btable: OnceLock<BTable>,
}

#[derive(Debug)]
struct HermiteGrid {
    knots: Vec<f64>,
    values: Vec<Complex64>,
    slopes: Vec<Complex64>,
}

#[derive(Debug)]
struct BTable {
    y: Vec<f64>,
    weighted: Vec<Complex64>,
}

impl VhTransform {
    pub fn new(window: SmoothWindow) -> Self {
        Self {
            window,
            gl: gauss_legendre(ORDER),
            grid: OnceLock::new(),
            btable: OnceLock::new(),
        }
    }

    pub fn window(&self) -> &SmoothWindow {
        &self.window
    }

    /// `V_h(xi)` and `V_h'(xi)` by composite Gauss–Legendre.
    pub fn eval_with_derivative(&self, xi: f64) -> (Complex64, Complex64) {
        if xi < 0.0 {
            let (v, d) = self.eval_with_derivative(-xi);
            return (v.conj(), -d.conj());
        }
        let (a, b) = self.window.support();
        let oscillations = xi * (b * b - a * a) / TAU;
        let panels = 24 + oscillations.ceil() as usize;
        let h = (b - a) / panels as f64;
        let (x, w) = &self.gl;
        let mut v = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for p in 0..panels {
            let lo = a + p as f64 * h;
            for (xi_, wi) in x.iter().zip(w) {
                let t = lo + 0.5 * h * (xi_ + 1.0);
                let ht = self.window.eval(t);
                if ht == 0.0 {
                    continue;
                }
                let t2 = t * t;
                let e = Complex64::from_polar(0.5 * h * wi * ht, xi * t2);
                v += e;
                d += e * t2;
            }
        }
        let c = 2.0 / TAU.sqrt();
        (v * c, Complex64::new(0.0, 1.0) * d * c)
    }

    pub fn eval(&self, xi: f64) -> Complex64 {
        self.eval_with_derivative(xi).0
    }

    /// `V_h(xi)` by adaptive Gauss–Kronrod, an independent route used as an oracle.
    pub fn eval_adaptive(&self, xi: f64, tol: f64) -> Result<Complex64> {
        let (a, b) = self.window.support();
        let pieces = 8 + (xi.abs() * (b * b - a * a) / TAU).ceil() as usize;
        let breaks: Vec<f64> = (0..=pieces).map(|j| a + (b - a) * j as f64 / pieces as f64).collect();
        let w = self.window;
        let q = integrate_breaks(
            |t: f64| Complex64::from_polar(w.eval(t), xi * t * t),
            &breaks,
            tol,
        )?;
        Ok(q.value * (2.0 / TAU.sqrt()))
    }

    fn grid(&self) -> &HermiteGrid {
        self.grid.get_or_init(|| {
            let mut knots = vec![0.0];
            let mut start = 0.0;
            for (end, step) in TIERS {
                let n = ((end - start) / step).round() as usize;
                for j in 1..=n {
                    knots.push(start + (end - start) * j as f64 / n as f64);
                }
                start = end;
            }
            let (values, slopes) = knots.iter().map(|&k| self.eval_with_derivative(k)).unzip();
            HermiteGrid { knots, values, slopes }
        })
    }

    /// Largest `xi` covered by the interpolation grid.
    pub fn grid_limit(&self) -> f64 {
        TIERS[TIERS.len() - 1].0
    }

    /// `V_h(xi)` from the cached cubic Hermite grid; falls back to direct
    /// evaluation outside it.
    pub fn interpolate(&self, xi: f64) -> Complex64 {
        if xi < 0.0 {
            return self.interpolate(-xi).conj();
        }
        if xi >= self.grid_limit() {
            return self.eval(xi);
        }
        let g = self.grid();
        let i = g.knots.partition_point(|&k| k <= xi).saturating_sub(1).min(g.knots.len() - 2);
        let (x0, x1) = (g.knots[i], g.knots[i + 1]);
        let h = x1 - x0;
        let s = (xi - x0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        g.values[i] * h00 + g.slopes[i] * (h10 * h) + g.values[i + 1] * h01 + g.slopes[i + 1] * (h11 * h)
    }

    fn btable(&self) -> &BTable {
        self.btable.get_or_init(|| {
            let ymax = self.grid_limit().sqrt();
            let (y, w) = composite_gl(0.0, ymax, 2000, 12);
            let weighted = y.iter().zip(&w).map(|(&y, &w)| self.interpolate(y * y) * (2.0 * w)).collect();
            BTable { y, weighted }
        })
    }

    /// `B(v) = int V_h(y^2) e(yv) dy`.
    pub fn b_transform(&self, v: f64) -> Complex64 {
        let t = self.btable();
        t.y.iter()
            .zip(&t.weighted)
            .map(|(&y, &wv)| wv * (TAU * y * v).cos())
            .sum()
    }

    /// `int V_h(beta x^2) e(xs) dx` by the closed form in `h`.
    pub fn plane_integral_closed(&self, beta: f64, s: i64) -> Result<Complex64> {
        if !(beta > 0.0) {
            return domain("beta", "must be positive");
        }
        let (a, b) = self.window.support();
        let c = PI * PI * (s as f64) * (s as f64) / beta;
        let pieces = 8 + (c * (1.0 / (a * a) - 1.0 / (b * b)) / TAU).ceil() as usize;
        let breaks: Vec<f64> = (0..=pieces).map(|j| a + (b - a) * j as f64 / pieces as f64).collect();
        let w = self.window;
        let q = integrate_breaks(
            |t: f64| Complex64::from_polar(w.eval(t) / t, -c / (t * t)),
            &breaks,
            1e-14,
        )?;
        Ok(q.value * Complex64::new(1.0, 1.0) / beta.sqrt())
    }

    /// The same integral as `beta^{-1/2} B(s / sqrt(beta))`.
    pub fn plane_integral_b(&self, beta: f64, s: i64) -> Result<Complex64> {
        if !(beta > 0.0) {
            return domain("beta", "must be positive");
        }
        let r = beta.sqrt();
        Ok(self.b_transform(s as f64 / r) / r)
    }
}

/// Both evaluations of the plane integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlaneIntegral {
    pub beta: f64,
    pub s: i64,
    pub closed_re: f64,
    pub closed_im: f64,
    pub b_route_re: f64,
    pub b_route_im: f64,
}

impl PlaneIntegral {
    pub fn closed(&self) -> Complex64 {
        Complex64::new(self.closed_re, self.closed_im)
    }

    pub fn b_route(&self) -> Complex64 {
        Complex64::new(self.b_route_re, self.b_route_im)
    }

    pub fn discrepancy(&self) -> f64 {
        (self.closed() - self.b_route()).norm()
    }

    /// `Im(e^{-i pi/4} I)`.
    pub fn rotated_imaginary(&self) -> f64 {
        (self.closed() * Complex64::from_polar(1.0, -PI / 4.0)).im
    }
}

pub fn vh_plane_integral(vh: &VhTransform, beta: f64, s: i64) -> Result<PlaneIntegral> {
    let c = vh.plane_integral_closed(beta, s)?;
    let b = vh.plane_integral_b(beta, s)?;
    Ok(PlaneIntegral {
        beta,
        s,
        closed_re: c.re,
        closed_im: c.im,
        b_route_re: b.re,
        b_route_im: b.im,
    })
}

/// `sum_s Im(e^{-i pi/4} int V_h(beta x^2) e(xs) dx)` over all integers `s`,
/// truncated once terms fall below `tol`.
pub fn rotated_s_sum(vh: &VhTransform, beta: f64, tol: f64) -> Result<f64> {
    let mut total = 0.0;
    let mut quiet = 0;
    let mut s = 1i64;
    loop {
        let term = 2.0 * (vh.plane_integral_closed(beta, s)? * Complex64::from_polar(1.0, -PI / 4.0)).im;
        total += term;
        quiet = if term.abs() < tol { quiet + 1 } else { 0 };
        if (s as f64) > beta.sqrt() && quiet >= 5 {
            break;
        }
        s += 1;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vh() -> VhTransform {
        VhTransform::new(SmoothWindow::default())
    }

    #[test]
    fn value_at_zero() {
        let v = vh();
        let expect = (2.0 / PI).sqrt() * v.window().hhat0();
        assert!((v.eval(0.0).re - expect).abs() < 1e-12);
        assert!(v.eval(0.0).im.abs() < 1e-15);
    }

    #[test]
    fn direct_matches_adaptive() {
        let v = vh();
        for xi in [0.0, 1.0, 10.0, 57.3, 200.0, 900.0] {
            let a = v.eval(xi);
            let b = v.eval_adaptive(xi, 1e-14).unwrap();
            assert!((a - b).norm() < 1e-12, "xi={xi}: {a} vs {b}");
        }
    }

    #[test]
    fn grid_interpolation_budget() {
        let v = vh();
        let mut worst: f64 = 0.0;
        let mut xi = 0.0013;
        while xi < 1100.0 {
            worst = worst.max((v.interpolate(xi) - v.eval(xi)).norm());
            xi = xi * 1.07 + 0.0021;
        }
        assert!(worst < 1e-9, "worst grid error {worst:e}");
    }

    #[test]
    fn plane_integral_routes_agree() {
        let v = vh();
        for (beta, s) in [(1.0, 0), (1.0, 1), (4.0, 3), (30.0, 2), (30.0, 11), (200.0, 5), (200.0, 40)] {
            let p = vh_plane_integral(&v, beta, s).unwrap();
            assert!(p.discrepancy() < 1e-8, "beta={beta} s={s}: {:e}", p.discrepancy());
        }
    }

    #[test]
    fn rotated_imaginary_vanishes_at_s_zero() {
        let v = vh();
        for beta in [0.5, 3.0, 100.0] {
            let p = vh_plane_integral(&v, beta, 0).unwrap();
            assert!(p.rotated_imaginary().abs() < 1e-10);
        }
    }
}
