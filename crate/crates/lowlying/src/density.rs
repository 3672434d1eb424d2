//! One-level density statistics through the explicit formula, the symmetry
//! densities `W(G)`, and the exponential-sum experiment over primes.
//!
//! For a form `f` of weight `k` and level `N` and a scale `L`,
//!
//! `D(f, phi) = A - (2/L) sum_p sum_{nu >= 1} log p / p^{nu/2} c_nu(p) phi_hat(nu log p / L)`
//!
//! with `c_nu(p) = lambda(p^nu) - lambda(p^{nu-2})` (`lambda(p)^nu` when `p | N`)
//! and `A` the archimedean term of [`digamma_arch_term`]. Because `phi_hat`
//! has compact support every sum is finite and the identity is exact.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, PrimeTable};
use crate::modforms::{eta_product_level11, HeckeEigenform};
use crate::petersson::{family_spectra, petersson_kernel_level_n, Aspect, AveragingSpec, LevelOptions, Parity, Route, Weighting, WeightKernel};
use crate::specfun::quad::integrate_breaks;
use crate::specfun::{digamma_arch_term, TestFunction, TrigTerm};
use crate::{domain, fsum, Error, NeumaierSum, Result};

/// A Katz–Sarnak symmetry type.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SymmetryClass {
    #[serde(rename = "SOeven")]
    SoEven,
    #[serde(rename = "SOodd")]
    SoOdd,
    O,
    Sp,
}

impl SymmetryClass {
    pub const ALL: [SymmetryClass; 4] = [SymmetryClass::SoEven, SymmetryClass::SoOdd, SymmetryClass::O, SymmetryClass::Sp];

    /// Mass of the point measure at 0 in `W(G)`.
    pub fn atom_mass(self) -> f64 {
        match self {
            SymmetryClass::SoOdd => 1.0,
            SymmetryClass::O => 0.5,
            _ => 0.0,
        }
    }

    /// Coefficient `s` in the continuous part `1 + s sin(2 pi x) / (2 pi x)`.
    fn sine_sign(self) -> f64 {
        match self {
            SymmetryClass::SoEven => 1.0,
            SymmetryClass::SoOdd | SymmetryClass::Sp => -1.0,
            SymmetryClass::O => 0.0,
        }
    }

    /// The continuous part of `W(G)(x)`.
    pub fn density(self, x: f64) -> f64 {
        1.0 + self.sine_sign() * sinc_2pi(x)
    }

    /// `m(xi)`: the Fourier transform of `W(G)` is `delta_0 + m`.
    pub fn fourier_kernel(self, xi: f64) -> f64 {
        let ind = if xi.abs() <= 1.0 { 1.0 } else { 0.0 };
        match self {
            SymmetryClass::SoEven => 0.5 * ind,
            SymmetryClass::SoOdd => 1.0 - 0.5 * ind,
            SymmetryClass::Sp => -0.5 * ind,
            SymmetryClass::O => 0.5,
        }
    }

    /// The class attached to a family: a lookup, not a statistical test.
    pub fn for_family(kind: FamilyKind, parity: Parity) -> Self {
        match (kind, parity) {
            (FamilyKind::Sym2, _) => SymmetryClass::Sp,
            (FamilyKind::Gl2, Parity::All) => SymmetryClass::O,
            (FamilyKind::Gl2, Parity::Plus) => SymmetryClass::SoEven,
            (FamilyKind::Gl2, Parity::Minus) => SymmetryClass::SoOdd,
        }
    }
}

impl fmt::Display for SymmetryClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SymmetryClass::SoEven => "SOeven",
            SymmetryClass::SoOdd => "SOodd",
            SymmetryClass::O => "O",
            SymmetryClass::Sp => "Sp",
        })
    }
}

impl FromStr for SymmetryClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SOeven" | "soeven" | "so-even" => Ok(SymmetryClass::SoEven),
            "SOodd" | "soodd" | "so-odd" => Ok(SymmetryClass::SoOdd),
            "O" | "o" => Ok(SymmetryClass::O),
            "Sp" | "sp" | "USp" => Ok(SymmetryClass::Sp),
            other => domain("class", format!("unknown symmetry class `{other}`")),
        }
    }
}

/// `sin(2 pi x) / (2 pi x)`.
pub fn sinc_2pi(x: f64) -> f64 {
    let z = 2.0 * PI * x;
    if z.abs() < 1e-4 {
        let z2 = z * z;
        return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
    }
    z.sin() / z
}

/// `int phi W(G)` evaluated twice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Prediction {
    pub class: SymmetryClass,
    /// `int phi(x) W(x) dx` including `phi(0)` times the atom.
    pub space: f64,
    /// `phi_hat(0) + int phi_hat(xi) m(xi) d xi`.
    pub fourier: f64,
}

impl Prediction {
    pub fn value(&self) -> f64 {
        self.fourier
    }

    pub fn discrepancy(&self) -> f64 {
        (self.space - self.fourier).abs()
    }
}

/// Largest cutoff for the numerically integrated part of the space side.
const SPACE_CUTOFF_MAX: f64 = 1e4;

fn space_side(class: SymmetryClass, tf: &dyn TestFunction) -> Result<f64> {
    let far = tf.far_field().ok_or_else(|| {
        Error::Quadrature(format!("{} has no far-field expansion for the space-side tail", tf.name()))
    })?;
    let s = class.sine_sign();
    let mut w_terms = vec![TrigTerm::new(1.0, 0, 0.0, 0.0)];
    if s != 0.0 {
        w_terms.push(TrigTerm::new(s / (2.0 * PI), 1, 2.0 * PI, -0.5 * PI));
    }
    let mut tail_terms = Vec::new();
    for a in &far {
        for w in &w_terms {
            if w.power == 0 && w.freq == 0.0 {
                tail_terms.push(TrigTerm::new(a.coef * w.coef, a.power, a.freq, a.phase));
            } else {
                tail_terms.extend(a.times(w));
            }
        }
    }
    // Tiny frequencies are merged into the non-oscillating part.
    let mut x0: f64 = 64.0;
    for t in tail_terms.iter_mut() {
        if t.freq != 0.0 && t.freq < 1e-12 {
            t.coef *= t.phase.cos();
            t.freq = 0.0;
            t.phase = 0.0;
        }
        if t.freq > 0.0 {
            x0 = x0.max(4.0 * (t.power as f64 + 40.0) / t.freq);
        }
    }
    if x0 > SPACE_CUTOFF_MAX {
        return Err(Error::Quadrature(format!("space-side cutoff {x0:.1} exceeds {SPACE_CUTOFF_MAX}")));
    }
    let x0 = x0.ceil();
    let breaks: Vec<f64> = (0..=(2.0 * x0) as usize).map(|j| 0.5 * j as f64).collect();
    let body = integrate_breaks(|x| tf.phi(x) * class.density(x), &breaks, 1e-14)?;
    let tail: Vec<f64> = tail_terms.iter().map(|t| t.tail_integral(x0)).collect::<Result<_>>()?;
    Ok(2.0 * (body.value + fsum(tail)) + class.atom_mass() * tf.phi0())
}

fn fourier_side(class: SymmetryClass, tf: &dyn TestFunction) -> Result<f64> {
    let r = tf.support_radius();
    let mut breaks = tf.hat_breakpoints();
    breaks.extend([0.0, 1.0, r]);
    breaks.retain(|b| (0.0..=r).contains(b));
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    // Evaluate m just inside each piece so the jump at 1 is never sampled.
    let q = integrate_breaks(|xi| tf.phi_hat(xi) * class.fourier_kernel(xi), &breaks, 1e-15)?;
    Ok(tf.phi_hat(0.0) + 2.0 * q.value)
}

/// `int phi(x) W(G)(x) dx` on the space side and the Fourier side.
pub fn predict_integral(class: SymmetryClass, tf: &dyn TestFunction) -> Result<Prediction> {
    Ok(Prediction {
        class,
        space: space_side(class, tf)?,
        fourier: fourier_side(class, tf)?,
    })
}

/// The explicit formula split into its pieces.
///
/// For a GL(2) form: `arch` is the archimedean term; `diag` is the `-1` part of
/// `c_2(p)`; `lambda_p`, `lambda_p2` and `higher` collect `nu = 1`, the
/// `lambda(p^2)` part of `nu = 2`, and `nu >= 3`. For a symmetric square:
/// `arch` is `int phi`, `lambda_p` the `lambda(p^2)` term, `lambda_p2` the
/// `lambda(p^4) - lambda(p^2)` term, and `higher` is zero.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DensityTerms {
    pub arch: f64,
    pub diag: f64,
    pub lambda_p: f64,
    pub lambda_p2: f64,
    pub higher: f64,
}

impl DensityTerms {
    /// The statistic: the buckets added in a fixed order.
    pub fn total(&self) -> f64 {
        self.arch + self.diag + self.lambda_p + self.lambda_p2 + self.higher
    }

    fn scaled(&self, s: f64) -> Self {
        Self {
            arch: self.arch * s,
            diag: self.diag * s,
            lambda_p: self.lambda_p * s,
            lambda_p2: self.lambda_p2 * s,
            higher: self.higher * s,
        }
    }
}

#[derive(Default)]
struct TermSums {
    arch: NeumaierSum,
    diag: NeumaierSum,
    lambda_p: NeumaierSum,
    lambda_p2: NeumaierSum,
    higher: NeumaierSum,
}

impl TermSums {
    fn add(&mut self, t: &DensityTerms, w: f64) {
        self.arch.add(w * t.arch);
        self.diag.add(w * t.diag);
        self.lambda_p.add(w * t.lambda_p);
        self.lambda_p2.add(w * t.lambda_p2);
        self.higher.add(w * t.higher);
    }

    fn value(&self) -> DensityTerms {
        DensityTerms {
            arch: self.arch.value(),
            diag: self.diag.value(),
            lambda_p: self.lambda_p.value(),
            lambda_p2: self.lambda_p2.value(),
            higher: self.higher.value(),
        }
    }
}

/// The scale `L` by which zeros are dilated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Scale {
    /// `log k^2` (or `log K^2` for a family).
    LogKSquared(u64),
    /// `log N`.
    LogN(u64),
    Custom(f64),
}

impl Scale {
    pub fn value(&self) -> f64 {
        match *self {
            Scale::LogKSquared(k) => 2.0 * (k as f64).ln(),
            Scale::LogN(n) => (n as f64).ln(),
            Scale::Custom(l) => l,
        }
    }
}

fn check_scale(l: f64) -> Result<()> {
    if !(l > 0.0 && l.is_finite()) {
        return domain("scale", format!("must be positive, got {l}"));
    }
    Ok(())
}

/// Largest prime range the family routes will sieve.
pub const FAMILY_PRIME_LIMIT: u64 = 50_000_000;

fn check_family_range(limit: u64) -> Result<()> {
    if limit > FAMILY_PRIME_LIMIT {
        return Err(Error::Precision {
            needed: limit,
            available: FAMILY_PRIME_LIMIT,
        });
    }
    Ok(())
}

/// Largest `p^nu` with `phi_hat(nu log p / L)` possibly nonzero.
fn prime_power_limit(tf: &dyn TestFunction, l: f64) -> u64 {
    (tf.support_radius() * l).exp().floor() as u64
}

fn ensure_range(f: &HeckeEigenform, needed: u64) -> Result<()> {
    let primes = PrimeTable::new(needed);
    if let Some(&p) = primes.primes().last() {
        if p as usize > f.nmax() {
            return Err(Error::Precision {
                needed: p,
                available: f.nmax() as u64,
            });
        }
    }
    Ok(())
}

/// `D(f, phi)` with zeros dilated by `scale`, computed exactly from the
/// explicit formula and returned bucket by bucket.
pub fn density_single(f: &HeckeEigenform, tf: &dyn TestFunction, scale: Scale) -> Result<DensityTerms> {
    let l = scale.value();
    check_scale(l)?;
    let limit = prime_power_limit(tf, l);
    ensure_range(f, limit)?;
    let arch = digamma_arch_term(f.weight(), f.level(), tf, l)?;
    let mut diag = NeumaierSum::new();
    let mut lp = NeumaierSum::new();
    let mut lp2 = NeumaierSum::new();
    let mut hi = NeumaierSum::new();
    let primes = PrimeTable::new(limit.max(2));
    let c = 2.0 / l;
    for &p in primes.up_to(limit) {
        let logp = (p as f64).ln();
        let bad = f.level() % p == 0;
        let mut nu = 1u32;
        loop {
            let hat = tf.phi_hat(nu as f64 * logp / l);
            if nu as f64 * logp > tf.support_radius() * l {
                break;
            }
            if hat != 0.0 {
                let w = c * logp * (p as f64).powf(-0.5 * nu as f64) * hat;
                let top = f.lambda_prime_power(p, nu)?;
                match nu {
                    1 => lp.add(-w * top),
                    2 if bad => lp2.add(-w * top),
                    2 => {
                        lp2.add(-w * top);
                        diag.add(w);
                    }
                    _ => {
                        let low = if bad { 0.0 } else { f.lambda_prime_power(p, nu - 2)? };
                        hi.add(-w * (top - low));
                    }
                }
            }
            nu += 1;
        }
    }
    Ok(DensityTerms {
        arch,
        diag: diag.value(),
        lambda_p: lp.value(),
        lambda_p2: lp2.value(),
        higher: hi.value(),
    })
}

/// The symmetric-square statistic as the approximation
///
/// `int phi - (2/L) sum_p log p / p phi_hat(2 log p / L)
///  - (2/L) sum_p log p / sqrt(p) lambda(p^2) phi_hat(log p / L)
///  - (2/L) sum_p log p / p (lambda(p^4) - lambda(p^2)) phi_hat(2 log p / L)`.
///
/// The diagonal term enters with a minus sign here and a plus sign in the
/// GL(2) formula; both are reported in the `diag` bucket as computed.
pub fn density_single_sym2(f: &HeckeEigenform, tf: &dyn TestFunction, scale: Scale) -> Result<DensityTerms> {
    let l = scale.value();
    check_scale(l)?;
    let limit = prime_power_limit(tf, l);
    ensure_range(f, limit)?;
    let c = 2.0 / l;
    let mut diag = NeumaierSum::new();
    let mut lp = NeumaierSum::new();
    let mut lp2 = NeumaierSum::new();
    let primes = PrimeTable::new(limit.max(2));
    for &p in primes.up_to(limit) {
        let logp = (p as f64).ln();
        let h1 = tf.phi_hat(logp / l);
        if h1 != 0.0 {
            lp.add(-c * logp / (p as f64).sqrt() * f.lambda_prime_power(p, 2)? * h1);
        }
        let h2 = tf.phi_hat(2.0 * logp / l);
        if h2 != 0.0 {
            let w = c * logp / p as f64 * h2;
            diag.add(-w);
            lp2.add(-w * (f.lambda_prime_power(p, 4)? - f.lambda_prime_power(p, 2)?));
        }
    }
    Ok(DensityTerms {
        arch: tf.integral(),
        diag: diag.value(),
        lambda_p: lp.value(),
        lambda_p2: lp2.value(),
        higher: 0.0,
    })
}

/// Which L-functions of the family are studied.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FamilyKind {
    /// `L(s, f)`.
    Gl2,
    /// `L(s, sym^2 f)`.
    Sym2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityReport {
    pub family: String,
    pub testfn: String,
    pub support_radius: f64,
    pub scale: f64,
    pub class: SymmetryClass,
    /// The weighted average of `D`, equal to `terms.total()`.
    pub statistic: f64,
    pub prediction: f64,
    pub terms: DensityTerms,
    /// The total weight (`A_K[1]`, `A*[1]` or the natural count).
    pub mass: f64,
    pub route: Route,
}

impl DensityReport {
    pub fn relative_error(&self) -> f64 {
        (self.statistic - self.prediction).abs() / self.prediction.abs()
    }
}

/// The family average of `D` normalised by the total weight, with its
/// predicted value `int phi W(G)`.
///
/// Weight aspect: zeros are scaled by `log K^2`, forms weighted as in `A_K`
/// (or naturally), parity through `i^k`. The kernel route replaces each
/// `A_K[lambda(n)]` by its Petersson expansion and needs no eigenforms.
/// Level aspect: zeros are scaled by `log N`, forms weighted by `omega_f`,
/// parity through `(1 +- eps_f)/2`; the spectral route exists for `N = 11`.
pub fn family_average(spec: &AveragingSpec, kind: FamilyKind, tf: &dyn TestFunction, route: Route) -> Result<DensityReport> {
    spec.validate()?;
    let class = SymmetryClass::for_family(kind, spec.parity);
    let prediction = predict_integral(class, tf)?.value();
    let (terms, mass, l) = match (spec.aspect, kind, route) {
        (Aspect::Weight, FamilyKind::Gl2, Route::Kernel) => weight_kernel_average(spec, tf)?,
        (Aspect::Weight, _, Route::Spectral) => weight_spectral_average(spec, kind, tf)?,
        (Aspect::Level, FamilyKind::Gl2, Route::Kernel) => level_kernel_average(spec, tf, LevelOptions::for_level(spec.size))?,
        (Aspect::Level, FamilyKind::Gl2, Route::Spectral) => level_spectral_average(spec, tf)?,
        _ => return domain("route", "the kernel route covers GL(2) statistics only"),
    };
    let family = match spec.aspect {
        Aspect::Weight => format!("weight K={} {:?} {:?} {:?}", spec.size, spec.parity, spec.weighting, kind),
        Aspect::Level => format!("level N={} {:?} {:?}", spec.size, spec.parity, kind),
    };
    Ok(DensityReport {
        family,
        testfn: tf.name(),
        support_radius: tf.support_radius(),
        scale: l,
        class,
        statistic: terms.total(),
        prediction,
        terms,
        mass,
        route,
    })
}

fn weight_spectral_average(spec: &AveragingSpec, kind: FamilyKind, tf: &dyn TestFunction) -> Result<(DensityTerms, f64, f64)> {
    let l = Scale::LogKSquared(spec.size).value();
    let limit = prime_power_limit(tf, l);
    let spectra = family_spectra(spec, limit as usize)?;
    let windows = spec.weights()?;
    let mut sums = TermSums::default();
    let mut mass = NeumaierSum::new();
    for (s, &(k, h)) in spectra.iter().zip(&windows) {
        debug_assert_eq!(s.weight(), k);
        let weights: Vec<f64> = match spec.weighting {
            Weighting::Harmonic => s.harmonic_weights(),
            Weighting::Natural => vec![12.0 / (k - 1) as f64; s.forms().len()],
        };
        for (f, w) in s.forms().iter().zip(weights) {
            let t = match kind {
                FamilyKind::Gl2 => density_single(f, tf, Scale::Custom(l))?,
                FamilyKind::Sym2 => density_single_sym2(f, tf, Scale::Custom(l))?,
            };
            sums.add(&t, h * w);
            mass.add(h * w);
        }
    }
    let mass = mass.value();
    if mass == 0.0 {
        return domain("spec", "the family is empty");
    }
    Ok((sums.value().scaled(1.0 / mass), mass, l))
}

/// Per-prime contributions `(diag, lambda_p, lambda_p2, higher)` given an
/// evaluator for the average of `lambda(n)` and the total mass.
fn prime_buckets(
    tf: &dyn TestFunction,
    l: f64,
    level: u64,
    mass: f64,
    avg: &(dyn Fn(u64) -> Result<f64> + Sync),
) -> Result<[f64; 4]> {
    let limit = prime_power_limit(tf, l);
    check_family_range(limit)?;
    let primes = PrimeTable::new(limit.max(2));
    let c = 2.0 / l;
    let rows = primes
        .up_to(limit)
        .par_iter()
        .map(|&p| {
            let logp = (p as f64).ln();
            let bad = level % p == 0;
            let mut out = [0.0; 4];
            let mut nu = 1u32;
            let mut pow = p;
            while nu as f64 * logp <= tf.support_radius() * l {
                let hat = tf.phi_hat(nu as f64 * logp / l);
                if hat != 0.0 {
                    let w = c * logp * (p as f64).powf(-0.5 * nu as f64) * hat;
                    let top = avg(pow)?;
                    match nu {
                        1 => out[1] -= w * top,
                        2 => {
                            out[2] -= w * top;
                            if !bad {
                                out[0] += w * mass;
                            }
                        }
                        _ => {
                            let low = if bad { 0.0 } else { avg(pow / (p * p))? };
                            out[3] -= w * (top - low);
                        }
                    }
                }
                nu += 1;
                pow = match pow.checked_mul(p) {
                    Some(v) => v,
                    None => break,
                };
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut out = [0.0; 4];
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = fsum(rows.iter().map(|r| r[j]));
    }
    Ok(out)
}

fn weight_kernel_average(spec: &AveragingSpec, tf: &dyn TestFunction) -> Result<(DensityTerms, f64, f64)> {
    if spec.weighting != Weighting::Harmonic {
        return domain("route", "the kernel route needs harmonic weights");
    }
    let l = Scale::LogKSquared(spec.size).value();
    let windows = spec.weights()?;
    let limit = prime_power_limit(tf, l);
    check_family_range(limit)?;
    let kernel = WeightKernel::new(&windows, limit.max(1))?;
    let mass = kernel.eval(1)?;
    let arch_weights = windows
        .par_iter()
        .map(|&(k, h)| Ok((k, h * digamma_arch_term(k, 1, tf, l)?)))
        .collect::<Result<Vec<_>>>()?;
    let arch = WeightKernel::new(&arch_weights, 1)?.eval(1)?;
    let [diag, lp, lp2, hi] = prime_buckets(tf, l, 1, mass, &|n| kernel.eval(n))?;
    let terms = DensityTerms {
        arch,
        diag,
        lambda_p: lp,
        lambda_p2: lp2,
        higher: hi,
    };
    Ok((terms.scaled(1.0 / mass), mass, l))
}

fn level_kernel_average(spec: &AveragingSpec, tf: &dyn TestFunction, opts: LevelOptions) -> Result<(DensityTerms, f64, f64)> {
    let level = spec.size;
    let l = Scale::LogN(level).value();
    check_scale(l)?;
    let cmax = (opts.cmax / level).max(1) * level;
    let sqrt_n = (level as f64).sqrt();
    // A*[(1 +- eps)/2 lambda(n)] up to the common factor (N - 1/N)/12.
    let avg = |n: u64| -> Result<f64> {
        let base = petersson_kernel_level_n(level, 1, n, cmax)?.value;
        let twist = |sgn: f64| -> Result<f64> {
            let t = petersson_kernel_level_n(level, 1, level * n, cmax)?.value;
            Ok(0.5 * (base + sgn * sqrt_n * t))
        };
        match spec.parity {
            Parity::All => Ok(base),
            Parity::Plus => twist(1.0),
            Parity::Minus => twist(-1.0),
        }
    };
    let mass = avg(1)?;
    let arch = digamma_arch_term(2, level, tf, l)? * mass;
    let [diag, lp, lp2, hi] = prime_buckets(tf, l, level, mass, &avg)?;
    let terms = DensityTerms {
        arch,
        diag,
        lambda_p: lp,
        lambda_p2: lp2,
        higher: hi,
    };
    Ok((terms.scaled(1.0 / mass), mass, l))
}

fn level_spectral_average(spec: &AveragingSpec, tf: &dyn TestFunction) -> Result<(DensityTerms, f64, f64)> {
    if spec.size != 11 {
        return domain("N", "the spectral route is available at level 11 only");
    }
    let l = Scale::LogN(11).value();
    let f = eta_product_level11(prime_power_limit(tf, l).max(200) as usize)?;
    if !spec.parity.keeps(f.sign()) {
        return domain("parity", "no level 11 form has this root number");
    }
    let t = density_single(&f, tf, Scale::Custom(l))?;
    Ok((t, 1.0, l))
}

/// `sum_{p <= X, p = a mod c} w(p) e(2 sqrt(p) / c)` with `w = 1` or `log p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExpSumTrace {
    pub a: u64,
    pub c: u64,
    pub weighted: bool,
    /// Geometric grid of cutoffs.
    pub grid: Vec<f64>,
    /// `|F(X)|` at each grid point.
    pub values: Vec<f64>,
    /// `max_{t <= X} |F(t)|`, the monotone trace used for the fit.
    pub running_max: Vec<f64>,
    /// Real and imaginary parts of `F(X)` at each grid point.
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// For the unweighted sum, `S(X) log X - int_2^X S(t) / t dt` at each grid
    /// point: the log-weighted sum recovered by Abel summation.
    pub abel_re: Vec<f64>,
    pub abel_im: Vec<f64>,
    pub fit: Option<PowerFit>,
}

/// Least-squares fit `log y = log C + exponent log X`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerFit {
    pub exponent: f64,
    /// Standard error of the exponent.
    pub sigma: f64,
    pub intercept: f64,
    /// Root-mean-square residual on the log scale.
    pub rms_residual: f64,
    pub points: usize,
}

/// Grid points per decade.
const GRID_PER_DECADE: usize = 20;
/// Cutoffs below this are excluded from the fit.
const FIT_FLOOR: f64 = 1e3;

/// Ordinary least squares on `(log x, log y)`.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<PowerFit> {
    if x.len() != y.len() || x.len() < 3 {
        return domain("points", "need at least three matching points");
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    if ly.iter().any(|v| !v.is_finite()) {
        return domain("points", "values must be positive");
    }
    let n = lx.len() as f64;
    let mx = fsum(lx.iter().copied()) / n;
    let my = fsum(ly.iter().copied()) / n;
    let sxx = fsum(lx.iter().map(|v| (v - mx) * (v - mx)));
    let sxy = fsum(lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr = fsum(lx.iter().zip(&ly).map(|(a, b)| (b - intercept - slope * a).powi(2)));
    let sigma = (ssr / (n - 2.0) / sxx).sqrt();
    Ok(PowerFit {
        exponent: slope,
        sigma,
        intercept,
        rms_residual: (ssr / n).sqrt(),
        points: x.len(),
    })
}

/// Walk the primes `p = a mod c` up to `x_max` and record the trace of
/// `F(X) = sum_{p <= X} w(p) e(2 sqrt(p) / c)`. The exponent is fitted to the
/// running maximum over the top two decades above `10^3`.
pub fn hyp4_sum(a: u64, c: u64, x_max: f64, weighted: bool) -> Result<ExpSumTrace> {
    if c == 0 {
        return domain("c", "modulus must be positive");
    }
    if gcd(a % c, c) != 1 && c > 1 {
        return domain("a", format!("need gcd(a, c) = 1, got a = {a}, c = {c}"));
    }
    if !(x_max >= 2.0 && x_max <= 1e10) {
        return domain("X", format!("cutoff must lie in [2, 1e10], got {x_max}"));
    }
    let limit = x_max.floor() as u64;
    let mut grid = Vec::new();
    let mut g = 2.0f64;
    while g < x_max {
        grid.push(g);
        g *= 10f64.powf(1.0 / GRID_PER_DECADE as f64);
    }
    grid.push(x_max);
    let primes = PrimeTable::new(limit);
    let mut re = NeumaierSum::new();
    let mut im = NeumaierSum::new();
    // int_2^t S(u)/u du for the step function S, advanced prime by prime.
    let mut int_re = NeumaierSum::new();
    let mut int_im = NeumaierSum::new();
    let mut last = 2.0f64;
    let mut peak: f64 = 0.0;
    let mut out = ExpSumTrace {
        a,
        c,
        weighted,
        grid: grid.clone(),
        values: Vec::with_capacity(grid.len()),
        running_max: Vec::with_capacity(grid.len()),
        re: Vec::with_capacity(grid.len()),
        im: Vec::with_capacity(grid.len()),
        abel_re: Vec::new(),
        abel_im: Vec::new(),
        fit: None,
    };
    let mut gi = 0;
    let record = |t: f64, re: f64, im: f64, peak: f64, ire: f64, iim: f64, out: &mut ExpSumTrace| {
        out.values.push(re.hypot(im));
        out.running_max.push(peak);
        out.re.push(re);
        out.im.push(im);
        if !weighted {
            let lt = t.ln();
            out.abel_re.push(re * lt - ire);
            out.abel_im.push(im * lt - iim);
        }
    };
    let cf = c as f64;
    for &p in primes.primes() {
        let pf = p as f64;
        while gi < grid.len() && grid[gi] < pf {
            let t = grid[gi];
            let (sr, si) = (re.value(), im.value());
            let (ir, ii) = (int_re.value() + sr * (t / last).ln(), int_im.value() + si * (t / last).ln());
            record(t, sr, si, peak, ir, ii, &mut out);
            gi += 1;
        }
        let (sr, si) = (re.value(), im.value());
        int_re.add(sr * (pf / last).ln());
        int_im.add(si * (pf / last).ln());
        last = pf;
        if p % c != a % c {
            continue;
        }
        let w = if weighted { pf.ln() } else { 1.0 };
        let phase = 4.0 * PI * pf.sqrt() / cf;
        re.add(w * phase.cos());
        im.add(w * phase.sin());
        peak = peak.max(re.value().hypot(im.value()));
    }
    while gi < grid.len() {
        let t = grid[gi];
        let (sr, si) = (re.value(), im.value());
        let (ir, ii) = (int_re.value() + sr * (t / last).ln(), int_im.value() + si * (t / last).ln());
        record(t, sr, si, peak, ir, ii, &mut out);
        gi += 1;
    }
    let lo = (x_max / 100.0).max(FIT_FLOOR);
    let (fx, fy): (Vec<f64>, Vec<f64>) = out
        .grid
        .iter()
        .zip(&out.running_max)
        .filter(|(x, y)| **x >= lo && **y > 0.0)
        .map(|(x, y)| (*x, *y))
        .unzip();
    out.fit = fit_power_law(&fx, &fy).ok();
    Ok(out)
}

/// Real zeros `rho` of `L(s, f)` satisfy `rho <= 1/2 + 1/(2 nu)` when the
/// Fourier support reaches `2 nu`.
pub fn corollary6_bound(nu: f64) -> Result<f64> {
    if !(nu > 0.0) {
        return domain("nu", format!("must be positive, got {nu}"));
    }
    Ok(0.5 + 0.5 / nu)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::make_sinc_sq;

    #[test]
    fn table_of_predictions() {
        let one = make_sinc_sq(1.0).unwrap();
        let cases = [
            (SymmetryClass::SoEven, 7.0 / 8.0),
            (SymmetryClass::SoOdd, 9.0 / 8.0),
            (SymmetryClass::O, 1.0),
        ];
        for (class, want) in cases {
            let p = predict_integral(class, &one).unwrap();
            assert!((p.fourier - want).abs() < 1e-12, "{class}: {p:?}");
            assert!((p.space - want).abs() < 1e-10, "{class}: {p:?}");
        }
        let two_thirds = make_sinc_sq(2.0 / 3.0).unwrap();
        let p = predict_integral(SymmetryClass::Sp, &two_thirds).unwrap();
        assert!((p.fourier - 9.0 / 32.0).abs() < 1e-12, "{p:?}");
        assert!((p.space - 9.0 / 32.0).abs() < 1e-10, "{p:?}");
    }

    #[test]
    fn kernel_matches_density() {
        for class in SymmetryClass::ALL {
            assert_eq!(class.fourier_kernel(-0.3), class.fourier_kernel(0.3));
        }
        assert_eq!(SymmetryClass::SoOdd.fourier_kernel(0.5), 0.5);
        assert_eq!(SymmetryClass::SoOdd.fourier_kernel(1.5), 1.0);
        assert_eq!(SymmetryClass::Sp.density(0.0), 0.0);
        assert_eq!("SOodd".parse::<SymmetryClass>().unwrap(), SymmetryClass::SoOdd);
        assert!("U".parse::<SymmetryClass>().is_err());
    }

    #[test]
    fn bound_arithmetic() {
        assert!((corollary6_bound(7.0 / 6.0).unwrap() - 13.0 / 14.0).abs() < 1e-15);
        assert_eq!(corollary6_bound(1.0).unwrap(), 1.0);
        assert!((corollary6_bound(1e12).unwrap() - 0.5).abs() < 1e-12);
        assert!(corollary6_bound(0.0).is_err());
    }

    #[test]
    fn power_fit_recovers_exponent() {
        let x: Vec<f64> = (0..20).map(|j| 10f64.powf(3.0 + j as f64 / 5.0)).collect();
        let y: Vec<f64> = x.iter().map(|v| 3.0 * v.powf(0.42)).collect();
        let f = fit_power_law(&x, &y).unwrap();
        assert!((f.exponent - 0.42).abs() < 1e-12);
        assert!(f.sigma < 1e-10);
    }

    #[test]
    fn empty_progression() {
        // The first prime = 3 mod 10 is 3.
        let t = hyp4_sum(3, 10, 2.5, false).unwrap();
        assert!(t.values.iter().all(|v| *v == 0.0));
        assert!(hyp4_sum(2, 4, 100.0, false).is_err());
    }
}
