//! Adaptive Gauss–Kronrod (7, 15) quadrature and Gauss–Legendre rules.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;

use crate::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Values that can be integrated: real or complex.
pub trait Integrand:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> + Default
{
    fn norm(self) -> f64;
}

impl Integrand for f64 {
    fn norm(self) -> f64 {
        self.abs()
    }
}

impl Integrand for Complex64 {
    fn norm(self) -> f64 {
        Complex64::norm(self)
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature<T> {
    pub value: T,
    pub error: f64,
    pub evaluations: usize,
}

fn gk15<T: Integrand, F: Fn(f64) -> T>(f: &F, a: f64, b: f64) -> (T, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        kronrod = kronrod + s * WGK[j];
        if j % 2 == 1 {
            gauss = gauss + s * WG[j / 2];
        }
    }
    let k = kronrod * h;
    let g = gauss * h;
    (k, (k - g).norm())
}

/// Adaptive integration on `[a, b]` to absolute tolerance `tol`.
pub fn integrate<T: Integrand, F: Fn(f64) -> T>(f: F, a: f64, b: f64, tol: f64) -> Result<Quadrature<T>> {
    integrate_breaks(f, &[a, b], tol)
}

/// Adaptive integration over consecutive intervals of `breaks`.
///
/// Global strategy: the interval with the largest error estimate is bisected
/// until the summed estimate drops below `tol`. Intervals whose estimate is at
/// rounding level, or which cannot be split further, are retired.
pub fn integrate_breaks<T: Integrand, F: Fn(f64) -> T>(f: F, breaks: &[f64], tol: f64) -> Result<Quadrature<T>> {
    const MAX_INTERVALS: usize = 20_000;
    let mut heap = BinaryHeap::new();
    let mut live_error = 0.0;
    let mut retired_value = T::default();
    let mut retired_error = 0.0;
    let mut evaluations = 0;
    let push = |heap: &mut BinaryHeap<Piece<T>>, live: &mut f64, rv: &mut T, re: &mut f64, a: f64, b: f64, v: T, e: f64| {
        let unsplittable = (b - a) <= 8.0 * f64::EPSILON * a.abs().max(b.abs()) || (b - a) < 1e-290;
        if e <= 50.0 * f64::EPSILON * v.norm() || unsplittable {
            *rv = *rv + v;
            *re += e;
        } else {
            *live += e;
            heap.push(Piece { a, b, value: v, error: e });
        }
    };
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            let (v, e) = gk15(&f, w[0], w[1]);
            evaluations += 15;
            push(&mut heap, &mut live_error, &mut retired_value, &mut retired_error, w[0], w[1], v, e);
        }
    }
    while live_error + retired_error > tol {
        let Some(p) = heap.pop() else { break };
        if evaluations > 15 * MAX_INTERVALS {
            return Err(Error::Quadrature(format!(
                "interval budget exhausted near [{}, {}], error estimate {:e}",
                p.a,
                p.b,
                live_error + retired_error
            )));
        }
        live_error -= p.error;
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(&f, p.a, m);
        let (v2, e2) = gk15(&f, m, p.b);
        evaluations += 30;
        push(&mut heap, &mut live_error, &mut retired_value, &mut retired_error, p.a, m, v1, e1);
        push(&mut heap, &mut live_error, &mut retired_value, &mut retired_error, m, p.b, v2, e2);
        if heap.is_empty() {
            live_error = 0.0;
        }
    }
    let mut value = retired_value;
    let mut error = retired_error;
    for p in heap {
        value = value + p.value;
        error += p.error;
    }
    Ok(Quadrature { value, error, evaluations })
}

struct Piece<T> {
    a: f64,
    b: f64,
    value: T,
    error: f64,
}

impl<T> PartialEq for Piece<T> {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error).is_eq()
    }
}

impl<T> Eq for Piece<T> {}

impl<T> PartialOrd for Piece<T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<T> Ord for Piece<T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (z * p - p0) / (z * z - 1.0);
            let dz = p / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Composite Gauss–Legendre rule: `panels` equal panels of `order` nodes.
pub fn composite_gl(a: f64, b: f64, panels: usize, order: usize) -> (Vec<f64>, Vec<f64>) {
    let (x, w) = gauss_legendre(order);
    let h = (b - a) / panels as f64;
    let mut nodes = Vec::with_capacity(panels * order);
    let mut weights = Vec::with_capacity(panels * order);
    for p in 0..panels {
        let lo = a + p as f64 * h;
        for (xi, wi) in x.iter().zip(&w) {
            nodes.push(lo + 0.5 * h * (xi + 1.0));
            weights.push(0.5 * h * wi);
        }
    }
    (nodes, weights)
}
