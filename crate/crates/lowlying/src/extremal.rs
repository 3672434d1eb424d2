//! The extremal problem behind the nonvanishing bounds.
//!
//! Write `W_hat = delta_0 + m`. For `phi_hat = g * g~` with `g` supported on
//! `[-a, a]`, the ratio
//! `int phi W / phi(0)` becomes `R(g) = <(I + K) g, g> / |<g, 1>|^2` where
//! `K g(x) = int_{-a}^{a} m(x - y) g(y) dy`. Its infimum is `1 / <1, f0>` with
//! `(I + K) f0 = 1`.
//!
//! The support radius of `phi_hat` is `2a`: radius 2 gives `a = 1`, and the
//! symplectic problem with radius `4/3` is posed on `[-2/3, 2/3]`.
//!
//! `m` is piecewise constant with jumps at `|xi| = 1`, so the Nystrom grid is
//! chosen with `1` a multiple of the step; every jump of `m(x_i - y)` then
//! falls on a node, where the kernel takes the mean of its one-sided values.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::{predict_integral, SymmetryClass};
use crate::specfun::quad::integrate;
use crate::specfun::make_sinc_sq;
use crate::{domain, fsum, Error, NeumaierSum, Result};

/// Smallest number of grid intervals accepted by the solver.
pub const MIN_GRID: usize = 64;
/// Default refinement sweep.
pub const SWEEP: [usize; 4] = [64, 128, 256, 512];

/// `(I + K) f = 1` on `[-a, a]` with the kernel of a symmetry class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FredholmProblem {
    pub class: SymmetryClass,
    /// Half-width `a` of the interval carrying `g`.
    pub half_width: f64,
    /// Number of intervals; the grid has `grid + 1` nodes.
    pub grid: usize,
}

impl FredholmProblem {
    /// The problem for `phi_hat` supported in `[-2, 2]`.
    pub fn new(class: SymmetryClass, grid: usize) -> Result<Self> {
        Self::with_support(class, 2.0, grid)
    }

    /// The problem for `phi_hat` supported in `[-radius, radius]`.
    pub fn with_support(class: SymmetryClass, radius: f64, grid: usize) -> Result<Self> {
        let p = Self {
            class,
            half_width: radius / 2.0,
            grid,
        };
        p.validate()?;
        Ok(p)
    }

    fn validate(&self) -> Result<()> {
        if self.grid < MIN_GRID {
            return domain("grid", format!("need at least {MIN_GRID} intervals, got {}", self.grid));
        }
        if !(self.half_width > 0.0 && self.half_width <= 1.0) {
            return domain("radius", format!("support radius must lie in (0, 2], got {}", 2.0 * self.half_width));
        }
        let per_unit = 1.0 / self.step();
        if (per_unit - per_unit.round()).abs() > 1e-9 {
            return domain(
                "grid",
                format!("step {} does not divide the jump at 1 (half-width {})", self.step(), self.half_width),
            );
        }
        Ok(())
    }

    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.grid as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        let h = self.step();
        (0..=self.grid).map(|i| -self.half_width + i as f64 * h).collect()
    }

    /// Trapezoid weights.
    pub fn weights(&self) -> Vec<f64> {
        let h = self.step();
        let mut w = vec![h; self.grid + 1];
        w[0] = h / 2.0;
        w[self.grid] = h / 2.0;
        w
    }

    /// Steps per unit length, so the jump sits `jump` nodes away.
    fn jump(&self) -> usize {
        (1.0 / self.step()).round() as usize
    }

    /// `m(x_i - x_j)` with the mean of the one-sided values on the jump.
    fn kernel_value(&self, i: usize, j: usize) -> f64 {
        let d = i.abs_diff(j);
        let m = |xi: f64| self.class.fourier_kernel(xi);
        match d.cmp(&self.jump()) {
            std::cmp::Ordering::Less => m(0.0),
            std::cmp::Ordering::Greater => m(2.0),
            std::cmp::Ordering::Equal => 0.5 * (m(0.0) + m(2.0)),
        }
    }

    /// `K_ij = w_j m(x_i - x_j)`.
    fn operator(&self) -> DMatrix<f64> {
        let n = self.grid + 1;
        let w = self.weights();
        DMatrix::from_fn(n, n, |i, j| w[j] * self.kernel_value(i, j))
    }

    /// `(I + K) g` at the nodes.
    pub fn apply(&self, g: &[f64]) -> Result<Vec<f64>> {
        if g.len() != self.grid + 1 {
            return domain("g", format!("need {} node values, got {}", self.grid + 1, g.len()));
        }
        let k = self.operator();
        let kg = &k * DVector::from_column_slice(g);
        Ok(g.iter().zip(kg.iter()).map(|(a, b)| a + b).collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FredholmSolution {
    pub problem: FredholmProblem,
    pub nodes: Vec<f64>,
    pub f0: Vec<f64>,
    /// `<1, f0>`.
    pub a: f64,
    pub alpha: f64,
    /// `max |(I + K) f0 - 1|`.
    pub residual: f64,
    /// `max |f0(x) - f0(-x)|`.
    pub evenness: f64,
    /// `max |k_ij - k_ji|` for the node kernel `k_ij = K_ij / w_j`.
    pub asymmetry: f64,
}

/// Solve the discretized equation by dense LU.
pub fn solve_fredholm(problem: &FredholmProblem) -> Result<FredholmSolution> {
    problem.validate()?;
    let n = problem.grid + 1;
    let k = problem.operator();
    let w = problem.weights();
    let mut asymmetry: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asymmetry = asymmetry.max((k[(i, j)] / w[j] - k[(j, i)] / w[i]).abs());
        }
    }
    let a_mat = DMatrix::<f64>::identity(n, n) + &k;
    let lu = a_mat.clone().lu();
    let f = lu
        .solve(&DVector::from_element(n, 1.0))
        .ok_or_else(|| Error::Singular(format!("I + K on {} nodes", n)))?;
    let min_pivot = lu.u().diagonal().iter().fold(f64::INFINITY, |acc, v| acc.min(v.abs()));
    if min_pivot < 1e-12 {
        return Err(Error::Singular(format!("smallest pivot {min_pivot:e}")));
    }
    let r = &a_mat * &f;
    let residual = r.iter().fold(0.0f64, |acc, v| acc.max((v - 1.0).abs()));
    let f0: Vec<f64> = f.iter().copied().collect();
    let evenness = (0..n).fold(0.0f64, |acc, i| acc.max((f0[i] - f0[n - 1 - i]).abs()));
    let a = fsum(w.iter().zip(&f0).map(|(wi, fi)| wi * fi));
    if !(a > 0.0) {
        return Err(Error::Singular(format!("<1, f0> = {a} is not positive")));
    }
    Ok(FredholmSolution {
        problem: *problem,
        nodes: problem.nodes(),
        f0,
        a,
        alpha: 1.0 / a,
        residual,
        evenness,
        asymmetry,
    })
}

impl FredholmSolution {
    /// The Nystrom interpolant `1 - int m(x - y) f(y) dy` with `f` the
    /// piecewise-linear interpolant of the node values, integrated exactly.
    ///
    /// At the node where the jump of `m` meets an end of the interval the
    /// node value itself is only first-order accurate; this is second order
    /// everywhere.
    pub fn interpolate(&self, x: f64) -> Result<f64> {
        let a = self.problem.half_width;
        if !(-a..=a).contains(&x) {
            return domain("x", format!("must lie in [{}, {a}], got {x}", -a));
        }
        let mut acc = NeumaierSum::new();
        for (j, pair) in self.nodes.windows(2).enumerate() {
            let (lo, hi) = (pair[0], pair[1]);
            let (f_lo, f_hi) = (self.f0[j], self.f0[j + 1]);
            let mut cuts = vec![lo, hi];
            for c in [x - 1.0, x + 1.0] {
                if c > lo && c < hi {
                    cuts.push(c);
                }
            }
            cuts.sort_by(f64::total_cmp);
            for s in cuts.windows(2) {
                let m = self.problem.class.fourier_kernel(x - 0.5 * (s[0] + s[1]));
                if m != 0.0 {
                    let lin = |y: f64| f_lo + (f_hi - f_lo) * (y - lo) / (hi - lo);
                    acc.add(m * 0.5 * (s[1] - s[0]) * (lin(s[0]) + lin(s[1])));
                }
            }
        }
        Ok(1.0 - acc.value())
    }
}

/// Grid refinement with Richardson extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AlphaSweep {
    pub class: SymmetryClass,
    pub radius: f64,
    pub grids: Vec<usize>,
    pub alphas: Vec<f64>,
    /// `log2` of successive difference ratios; empty entries when a difference vanishes.
    pub orders: Vec<Option<f64>>,
    /// Second-order Richardson value from the two finest grids.
    pub extrapolated: f64,
}

/// Solve on each grid (doubling) and extrapolate.
pub fn alpha_sweep(class: SymmetryClass, radius: f64, grids: &[usize]) -> Result<AlphaSweep> {
    if grids.len() < 2 {
        return domain("grids", "need at least two grid sizes");
    }
    if grids.windows(2).any(|w| w[1] != 2 * w[0]) {
        return domain("grids", "grid sizes must double");
    }
    let alphas = grids
        .par_iter()
        .map(|&g| Ok(solve_fredholm(&FredholmProblem::with_support(class, radius, g)?)?.alpha))
        .collect::<Result<Vec<_>>>()?;
    let orders = alphas
        .windows(3)
        .map(|w| {
            let (d1, d2) = (w[0] - w[1], w[1] - w[2]);
            (d1 != 0.0 && d2 != 0.0).then(|| (d1 / d2).abs().log2())
        })
        .collect();
    let k = alphas.len();
    let extrapolated = alphas[k - 1] + (alphas[k - 1] - alphas[k - 2]) / 3.0;
    Ok(AlphaSweep {
        class,
        radius,
        grids: grids.to_vec(),
        alphas,
        orders,
        extrapolated,
    })
}

/// The extremal function on `[0, 1]` for the orthogonal classes with support 2:
/// `cos(x/2 - (pi+1)/4) / (sqrt 2 sin(1/4) + sin((pi+1)/4))` for SO(even),
/// `cos(x/2 + (pi-1)/4) / (3 sin((pi+1)/4) - 2 sin((pi-1)/4))` for SO(odd),
/// and `1/2` for O.
pub fn closed_form_f0(class: SymmetryClass, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return domain("x", format!("must lie in [0, 1], got {x}"));
    }
    let p = (PI + 1.0) / 4.0;
    let q = (PI - 1.0) / 4.0;
    match class {
        SymmetryClass::SoEven => Ok((x / 2.0 - p).cos() / (2f64.sqrt() * 0.25f64.sin() + p.sin())),
        SymmetryClass::SoOdd => Ok((x / 2.0 + q).cos() / (3.0 * p.sin() - 2.0 * q.sin())),
        SymmetryClass::O => Ok(0.5),
        SymmetryClass::Sp => domain("class", "no closed form is known for Sp"),
    }
}

/// `(3 + cot(1/4)) / 8`, `(5 + cot(1/4)) / 8` and `1`.
pub fn closed_form_alpha(class: SymmetryClass) -> Result<f64> {
    let cot = 1.0 / 0.25f64.tan();
    match class {
        SymmetryClass::SoEven => Ok((3.0 + cot) / 8.0),
        SymmetryClass::SoOdd => Ok((5.0 + cot) / 8.0),
        SymmetryClass::O => Ok(1.0),
        SymmetryClass::Sp => domain("class", "no closed form is known for Sp"),
    }
}

/// Residual at `x in [0, 1]` of the folded equation for an even `f`:
/// `f(x) + int_{-1}^{1} m(x - y) f(|y|) dy - 1`, integrated adaptively.
pub fn closed_form_residual(class: SymmetryClass, x: f64) -> Result<f64> {
    let f = |y: f64| closed_form_f0(class, y.abs()).unwrap_or(f64::NAN);
    let tol = 1e-15;
    // Pieces of [-1, 1] on which m(x - y) is constant.
    let mut breaks = vec![-1.0, 0.0, 1.0];
    if x > 0.0 && x < 1.0 {
        breaks.push(x - 1.0);
    }
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    let mut acc = NeumaierSum::new();
    for w in breaks.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        let m = class.fourier_kernel(x - mid);
        if m != 0.0 {
            acc.add(m * integrate(f, w[0], w[1], tol)?.value);
        }
    }
    Ok(f(x) + acc.value() - 1.0)
}

/// `R(g) = <(I + K) g, g> / <g, 1>^2` for node values `g`.
pub fn rayleigh_quotient(problem: &FredholmProblem, g: &[f64]) -> Result<f64> {
    problem.validate()?;
    let ag = problem.apply(g)?;
    let w = problem.weights();
    let num = fsum(w.iter().zip(g).zip(&ag).map(|((wi, gi), ai)| wi * gi * ai));
    let lin = fsum(w.iter().zip(g).map(|(wi, gi)| wi * gi));
    let norm = fsum(w.iter().zip(g).map(|(wi, gi)| wi * gi * gi)).sqrt();
    if lin.abs() <= 1e-12 * norm.max(f64::MIN_POSITIVE) {
        return domain("g", "<g, 1> vanishes");
    }
    Ok(num / (lin * lin))
}

/// Where an `alpha` comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AlphaSource {
    /// `int phi W` for `phi = sinc^2` filling the support.
    Sinc2,
    /// The extrapolated Nystrom value.
    Fredholm,
    /// The closed forms (SO(even), SO(odd), O).
    ClosedForm,
}

/// Support radius used for each class in the nonvanishing chain.
pub fn chain_radius(class: SymmetryClass) -> f64 {
    match class {
        SymmetryClass::Sp => 4.0 / 3.0,
        _ => 2.0,
    }
}

/// `alpha` for a class at its chain radius.
pub fn alpha_for(class: SymmetryClass, source: AlphaSource) -> Result<f64> {
    let radius = chain_radius(class);
    match source {
        AlphaSource::Sinc2 => Ok(predict_integral(class, &make_sinc_sq(radius / 2.0)?)?.fourier),
        AlphaSource::Fredholm => Ok(alpha_sweep(class, radius, &SWEEP)?.extrapolated),
        AlphaSource::ClosedForm => closed_form_alpha(class),
    }
}

/// A bound derived from `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonvanishingFamily {
    /// Even orders of vanishing: the proportion with `L(1/2) != 0` is at least `1 - alpha/2`.
    SoEven(f64),
    /// Odd orders: the proportion with a simple zero is at least `1 - (alpha - 1)/2`.
    SoOdd(f64),
    /// Both parities in equal measure: the mean order is at most `(alpha+ + alpha-)/2`.
    Combined { even: f64, odd: f64 },
    /// Symmetric squares, even orders: nonvanishing proportion at least `1 - alpha/2`.
    SymSquare(f64),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingResult {
    pub family: NonvanishingFamily,
    pub proportion_bound: Option<f64>,
    pub order_bound: Option<f64>,
}

pub fn nonvanishing_pipeline(family: NonvanishingFamily) -> Result<NonvanishingResult> {
    let check = |a: f64| {
        if a.is_finite() && a > 0.0 {
            Ok(a)
        } else {
            domain("alpha", format!("must be positive, got {a}"))
        }
    };
    let (proportion_bound, order_bound) = match family {
        NonvanishingFamily::SoEven(a) | NonvanishingFamily::SymSquare(a) => (Some(1.0 - check(a)? / 2.0), None),
        NonvanishingFamily::SoOdd(a) => (Some(1.0 - (check(a)? - 1.0) / 2.0), None),
        NonvanishingFamily::Combined { even, odd } => (None, Some((check(even)? + check(odd)?) / 2.0)),
    };
    Ok(NonvanishingResult {
        family,
        proportion_bound,
        order_bound,
    })
}

/// The four bounds from one source of `alpha` values.
pub fn nonvanishing_chain(source: AlphaSource) -> Result<Vec<NonvanishingResult>> {
    let even = alpha_for(SymmetryClass::SoEven, source)?;
    let odd = alpha_for(SymmetryClass::SoOdd, source)?;
    let mut out = vec![
        nonvanishing_pipeline(NonvanishingFamily::SoEven(even))?,
        nonvanishing_pipeline(NonvanishingFamily::SoOdd(odd))?,
        nonvanishing_pipeline(NonvanishingFamily::Combined { even, odd })?,
    ];
    let sp = match source {
        AlphaSource::ClosedForm => alpha_for(SymmetryClass::Sp, AlphaSource::Fredholm)?,
        s => alpha_for(SymmetryClass::Sp, s)?,
    };
    out.push(nonvanishing_pipeline(NonvanishingFamily::SymSquare(sp))?);
    Ok(out)
}
