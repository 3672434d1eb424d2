//! Both sides of the Petersson formula and the averaging operators built on it.
//!
//! Level 1, weight `k`:
//!
//! `(2 pi^2 / (k-1)) sum_f lambda_f(m) lambda_f(n) / L(1, sym^2 f)
//!     = delta(m, n) + 2 pi i^k sum_c S(m, n; c) / c J_{k-1}(4 pi sqrt(mn) / c)`.
//!
//! Prime level `N`, weight 2:
//!
//! `(12 / (N - 1/N)) sum_f omega_f lambda_f(m) lambda_f(n)
//!     = delta(m, n) - 2 pi sum_{N | c} S(m, n; c) / c J_1(4 pi sqrt(mn) / c)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd, is_prime, kloosterman, kloosterman_progression};
use crate::modforms::{eigenforms, eta_product_level11, l1_sym2, victor_miller_basis, CuspSpace, HeckeEigenform};
use crate::specfun::gamma::ln_gamma_real;
use crate::specfun::{bessel_j, bessel_j_all, SmoothWindow};
use crate::{domain, fsum, Error, NeumaierSum, Result};

/// Relative accuracy budget for one `L(1, sym^2 f)` value.
pub const SYM2_RELATIVE_BUDGET: f64 = 1e-12;
/// Target for the certified Kloosterman–Bessel tail when `cmax` is chosen.
pub const TAIL_TARGET: f64 = 1e-12;
/// A caller-supplied `cmax` whose certified tail exceeds this is rejected.
pub const TAIL_LIMIT: f64 = 1e-10;

const ZETA2: f64 = PI * PI / 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PeterssonReport {
    /// The weight at level 1, the level otherwise.
    pub k_or_n: u64,
    pub m: u64,
    pub n: u64,
    /// Spectral side.
    pub lhs: f64,
    /// Delta term plus the truncated Kloosterman–Bessel series.
    pub rhs: f64,
    pub residual: f64,
    /// Bound on the omitted terms `c > cmax`.
    pub truncation_bound: f64,
    /// Accuracy budget of the spectral side.
    pub spectral_budget: f64,
    pub cmax: u64,
}

impl PeterssonReport {
    /// `|residual|` within the truncation bound plus the spectral budget plus `slack`.
    pub fn within_budget(&self, slack: f64) -> bool {
        self.residual.abs() <= self.truncation_bound + self.spectral_budget + slack
    }
}

fn delta(m: u64, n: u64) -> f64 {
    if m == n {
        1.0
    } else {
        0.0
    }
}

fn ln_factorial(n: u32) -> f64 {
    ln_gamma_real(n as f64 + 1.0)
}

/// `i^k` for even `k`.
fn i_pow(k: u32) -> f64 {
    if k % 4 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Bound for `2 pi sum_{c > cmax} |S(m, n; c)| / c |J_{k-1}(4 pi sqrt(mn) / c)|`
/// from `|S| <= 2 sqrt((m, n) c)` and `|J_{k-1}(x)| <= (x/2)^{k-1} / (k-1)!`:
/// `4 pi sqrt(g) (2 pi sqrt(mn))^{k-1} / ((k-1)! (k-2)) cmax^{-(k-2)}`.
pub fn level1_tail_bound(k: u32, m: u64, n: u64, cmax: u64) -> f64 {
    assert!(k >= 4, "the bound needs k >= 4");
    let g = gcd(m, n) as f64;
    let x = 2.0 * PI * ((m * n) as f64).sqrt();
    let ln = (4.0 * PI * g.sqrt()).ln() + (k - 1) as f64 * x.ln()
        - ln_factorial(k - 1)
        - ((k - 2) as f64).ln()
        - (k - 2) as f64 * (cmax as f64).ln();
    ln.exp()
}

/// Smallest `cmax >= 1` whose certified tail is below `target`.
pub fn level1_cmax(k: u32, m: u64, n: u64, target: f64) -> u64 {
    let mut c = 1u64;
    while level1_tail_bound(k, m, n, c) >= target {
        c = if c < 16 { c + 1 } else { c + c / 8 };
    }
    c
}

/// `delta(m, n) + 2 pi i^k sum_{c <= cmax} S(m, n; c) / c J_{k-1}(4 pi sqrt(mn) / c)`.
pub fn petersson_geometric_level1(k: u32, m: u64, n: u64, cmax: u64) -> Result<f64> {
    check_level1_args(k, m, n)?;
    let x0 = 4.0 * PI * ((m * n) as f64).sqrt();
    let mut acc = NeumaierSum::new();
    for c in 1..=cmax {
        let s = kloosterman(m as i64, n as i64, c)?;
        if s != 0.0 {
            acc.add(s / c as f64 * bessel_j(k - 1, x0 / c as f64));
        }
    }
    Ok(delta(m, n) + 2.0 * PI * i_pow(k) * acc.value())
}

fn check_level1_args(k: u32, m: u64, n: u64) -> Result<()> {
    if k < 12 || k % 2 == 1 {
        return domain("k", format!("weight must be even and at least 12, got {k}"));
    }
    if m == 0 || n == 0 {
        return domain("m, n", "indices must be positive");
    }
    Ok(())
}

/// Hecke eigenforms of one weight with their `L(1, sym^2 f)` values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightSpectrum {
    k: u32,
    forms: Vec<HeckeEigenform>,
    l1: Vec<f64>,
}

impl WeightSpectrum {
    /// Eigenforms of weight `k` with `lambda(n)` stored for `n <= nmax`.
    pub fn new(k: u32, nmax: usize) -> Result<Self> {
        if k < 12 || k % 2 == 1 {
            return domain("k", format!("weight must be even and at least 12, got {k}"));
        }
        let nmax = nmax.max(Self::default_nmax(k));
        Self::from_space(&victor_miller_basis(k, nmax)?)
    }

    /// Eigenforms of an already built (for instance cached) cusp space.
    pub fn from_space(space: &CuspSpace) -> Result<Self> {
        let k = space.weight();
        if space.nmax() < Self::default_nmax(k) {
            return Err(Error::Precision {
                needed: Self::default_nmax(k) as u64,
                available: space.nmax() as u64,
            });
        }
        let forms = eigenforms(space, space.nmax())?;
        let l1 = forms.iter().map(l1_sym2).collect::<Result<Vec<_>>>()?;
        Ok(Self { k, forms, l1 })
    }

    /// Enough eigenvalues for `L(1, sym^2 f)` through its functional equation.
    pub fn default_nmax(k: u32) -> usize {
        2 * k as usize + 60
    }

    pub fn weight(&self) -> u32 {
        self.k
    }

    pub fn forms(&self) -> &[HeckeEigenform] {
        &self.forms
    }

    pub fn l1_sym2(&self) -> &[f64] {
        &self.l1
    }

    /// `(2 pi^2 / (k-1)) / L(1, sym^2 f)` for each form.
    pub fn harmonic_weights(&self) -> Vec<f64> {
        let c = 2.0 * PI * PI / (self.k - 1) as f64;
        self.l1.iter().map(|l| c / l).collect()
    }

    /// `(2 pi^2 / (k-1)) sum_f X_f / L(1, sym^2 f)`.
    pub fn harmonic_sum(&self, x: impl Fn(&HeckeEigenform) -> Result<f64>) -> Result<f64> {
        let w = self.harmonic_weights();
        let mut acc = NeumaierSum::new();
        for (f, wf) in self.forms.iter().zip(w) {
            acc.add(wf * x(f)?);
        }
        Ok(acc.value())
    }

    /// `(12 / (k-1)) sum_f X_f`, the same normalisation without harmonic weights.
    pub fn natural_sum(&self, x: impl Fn(&HeckeEigenform) -> Result<f64>) -> Result<f64> {
        let c = 12.0 / (self.k - 1) as f64;
        let mut acc = NeumaierSum::new();
        for f in &self.forms {
            acc.add(c * x(f)?);
        }
        Ok(acc.value())
    }

    /// Budget for the spectral side of `sum_f w_f X_f` given `sum_f w_f |X_f|`.
    fn budget(abs_sum: f64) -> f64 {
        SYM2_RELATIVE_BUDGET * abs_sum + f64::EPSILON * 16.0
    }

    /// The two sides of the level 1 formula for `(m, n)`.
    pub fn petersson(&self, m: u64, n: u64, cmax: Option<u64>) -> Result<PeterssonReport> {
        let k = self.k;
        check_level1_args(k, m, n)?;
        let cmax = match cmax {
            Some(c) => {
                let b = level1_tail_bound(k, m, n, c.max(1));
                if b > TAIL_LIMIT {
                    return Err(Error::Truncation(format!(
                        "cmax = {c} leaves a tail bound of {b:.3e} for k = {k}, m = {m}, n = {n}"
                    )));
                }
                c
            }
            None => level1_cmax(k, m, n, TAIL_TARGET),
        };
        let lhs = self.harmonic_sum(|f| Ok(f.lambda(m)? * f.lambda(n)?))?;
        let abs = self.harmonic_sum(|f| Ok((f.lambda(m)? * f.lambda(n)?).abs()))?;
        let rhs = petersson_geometric_level1(k, m, n, cmax)?;
        Ok(PeterssonReport {
            k_or_n: k as u64,
            m,
            n,
            lhs,
            rhs,
            residual: lhs - rhs,
            truncation_bound: level1_tail_bound(k, m, n, cmax.max(1)),
            spectral_budget: Self::budget(abs),
            cmax,
        })
    }
}

/// Both sides of the level 1 Petersson formula. With `cmax = None` the series
/// is cut where its certified tail drops below [`TAIL_TARGET`].
pub fn petersson_level1(k: u32, m: u64, n: u64, cmax: Option<u64>) -> Result<PeterssonReport> {
    check_level1_args(k, m, n)?;
    let nmax = (m.max(n) as usize).max(WeightSpectrum::default_nmax(k));
    WeightSpectrum::new(k, nmax)?.petersson(m, n, cmax)
}

/// The truncated level `N` kernel with a bound on what was left out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelKernel {
    pub level: u64,
    pub m: u64,
    pub n: u64,
    pub cmax: u64,
    pub value: f64,
    /// Weil-bound estimate of the omitted `c > cmax`; it decays only like
    /// `cmax^{-1/2} log cmax`.
    pub tail_bound: f64,
}

/// Rigorous bound for `2 pi sum_{c > C, N | c} |S(m, n; c)| / c |J_1(4 pi sqrt(mn) / c)|`:
/// `24 pi^2 sqrt(g mn) (log(C/N) + 3) / (N sqrt(C))`, from Weil's bound,
/// `tau(N l) <= 2 tau(l)`, `|J_1(x)| <= x/2` and `sum_{l <= x} tau(l) <= x (log x + 1)`.
pub fn level_n_tail_bound(level: u64, m: u64, n: u64, cmax: u64) -> f64 {
    let g = gcd(m, n) as f64;
    let c = (cmax.max(level)) as f64;
    let lv = level as f64;
    24.0 * PI * PI * (g * (m * n) as f64).sqrt() * ((c / lv).ln() + 3.0) / (lv * c.sqrt())
}

/// `delta(m, n) - 2 pi sum_{c <= cmax, N | c} S(m, n; c) / c J_1(4 pi sqrt(mn) / c)`.
pub fn petersson_kernel_level_n(level: u64, m: u64, n: u64, cmax: u64) -> Result<LevelKernel> {
    if !is_prime(level) {
        return domain("N", format!("level must be prime, got {level}"));
    }
    if m == 0 || n == 0 {
        return domain("m, n", "indices must be positive");
    }
    if cmax < level || cmax % level != 0 {
        return Err(Error::Truncation(format!("cmax = {cmax} must be a positive multiple of N = {level}")));
    }
    let x0 = 4.0 * PI * ((m * n) as f64).sqrt();
    let sums = kloosterman_progression(m as i64, n as i64, level, cmax)?;
    // Ascending c within fixed shards, shards combined in order.
    let parts: Vec<f64> = sums
        .par_chunks(4096)
        .map(|chunk| {
            let mut acc = NeumaierSum::new();
            for &(c, s) in chunk {
                let x = x0 / c as f64;
                acc.add(s / c as f64 * bessel_j(1, x));
            }
            acc.value()
        })
        .collect();
    Ok(LevelKernel {
        level,
        m,
        n,
        cmax,
        value: delta(m, n) - 2.0 * PI * fsum(parts),
        tail_bound: level_n_tail_bound(level, m, n, cmax),
    })
}

/// `omega_f = (sum_t lambda(t^2) / t)^{-1} = zeta^{(N)}(2) / L(1, sym^2 f)`.
pub fn harmonic_weight(f: &HeckeEigenform) -> Result<f64> {
    let l = l1_sym2(f)?;
    let lv = f.level() as f64;
    let zeta = if f.level() == 1 { ZETA2 } else { ZETA2 * (1.0 - 1.0 / (lv * lv)) };
    Ok(zeta / l)
}

/// `omega_f` from the sharp truncation `sum_{t <= T} lambda(t^2) / t`.
pub fn harmonic_weight_truncated(f: &HeckeEigenform, t_max: u64) -> Result<f64> {
    Ok(1.0 / f.harmonic_sum(t_max)?)
}

const LEVEL11: u64 = 11;

fn level_mass(level: u64) -> f64 {
    let lv = level as f64;
    12.0 / (lv - 1.0 / lv)
}

/// Both sides of the level 11 formula, the spectral side from the eta product.
///
/// The tail bound is reported but, decaying like `cmax^{-1/2}`, it cannot
/// certify small residuals at practical `cmax`.
pub fn petersson_level11(m: u64, n: u64, cmax: u64) -> Result<PeterssonReport> {
    let f = eta_product_level11(m.max(n).max(200) as usize)?;
    let w = harmonic_weight(&f)?;
    let lhs = level_mass(LEVEL11) * w * f.lambda(m)? * f.lambda(n)?;
    let kern = petersson_kernel_level_n(LEVEL11, m, n, cmax)?;
    Ok(PeterssonReport {
        k_or_n: LEVEL11,
        m,
        n,
        lhs,
        rhs: kern.value,
        residual: lhs - kern.value,
        truncation_bound: kern.tail_bound,
        spectral_budget: WeightSpectrum::budget(lhs.abs()),
        cmax,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aspect {
    Weight,
    Level,
}

/// Which root numbers are kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    All,
    Plus,
    Minus,
}

impl Parity {
    /// Whether a form with root number `eps` is kept.
    pub fn keeps(self, eps: i8) -> bool {
        match self {
            Parity::All => true,
            Parity::Plus => eps == 1,
            Parity::Minus => eps == -1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    /// `1 / L(1, sym^2 f)` at level 1, `omega_f` at level `N`.
    Harmonic,
    /// `12 / (k-1)` per form at level 1, `1` per form at level `N`.
    Natural,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AveragingSpec {
    pub aspect: Aspect,
    /// `K` in the weight aspect, the prime level `N` in the level aspect.
    pub size: u64,
    /// The weight window `h`; unused in the level aspect.
    pub window: SmoothWindow,
    pub parity: Parity,
    pub weighting: Weighting,
}

impl AveragingSpec {
    pub fn weight(k_big: u64, window: SmoothWindow, parity: Parity) -> Self {
        Self {
            aspect: Aspect::Weight,
            size: k_big,
            window,
            parity,
            weighting: Weighting::Harmonic,
        }
    }

    pub fn level(level: u64, parity: Parity) -> Self {
        Self {
            aspect: Aspect::Level,
            size: level,
            window: SmoothWindow::default(),
            parity,
            weighting: Weighting::Harmonic,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.aspect {
            Aspect::Weight if self.size == 0 => domain("K", "must be positive"),
            Aspect::Level if !is_prime(self.size) => domain("N", format!("level must be prime, got {}", self.size)),
            _ => Ok(()),
        }
    }

    /// Even weights `k` with `h((k-1)/K) > 0` and the requested `i^k`, with their window values.
    pub fn weights(&self) -> Result<Vec<(u32, f64)>> {
        if self.aspect != Aspect::Weight {
            return domain("aspect", "weights exist only in the weight aspect");
        }
        self.validate()?;
        let kk = self.size as f64;
        let (a, b) = self.window.support();
        let lo = (a * kk + 1.0).floor() as u32;
        let hi = (b * kk + 1.0).ceil() as u32;
        Ok((lo.max(2)..=hi)
            .filter(|k| k % 2 == 0 && self.parity.keeps(i_pow(*k) as i8))
            .map(|k| (k, self.window.eval((k - 1) as f64 / kk)))
            .filter(|&(_, h)| h > 0.0)
            .collect())
    }
}

/// A per-form quantity `X_f` to be averaged.
#[derive(Clone, Copy)]
pub enum Payload<'a> {
    Constant(f64),
    /// `lambda_f(m) lambda_f(n)`.
    LambdaProduct(u64, u64),
    /// Any function of the form; only the spectral route applies.
    PerForm(&'a (dyn Fn(&HeckeEigenform) -> Result<f64> + Sync)),
}

impl Payload<'_> {
    fn eval(&self, f: &HeckeEigenform) -> Result<f64> {
        match *self {
            Payload::Constant(c) => Ok(c),
            Payload::LambdaProduct(m, n) => Ok(f.lambda(m)? * f.lambda(n)?),
            Payload::PerForm(g) => g(f),
        }
    }

    fn max_index(&self) -> u64 {
        match *self {
            Payload::LambdaProduct(m, n) => m.max(n),
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Route {
    /// Sum over eigenforms.
    Spectral,
    /// Delta term plus Kloosterman–Bessel series, for payloads linear in `lambda(m) lambda(n)`.
    Kernel,
}

/// Eigenform data for every weight in the window of `spec`.
pub fn family_spectra(spec: &AveragingSpec, nmax: usize) -> Result<Vec<WeightSpectrum>> {
    spec.weights()?
        .into_par_iter()
        .map(|(k, _)| WeightSpectrum::new(k, nmax))
        .collect()
}

/// `A_K[X]` from precomputed spectra.
pub fn average_ak_over(spec: &AveragingSpec, spectra: &[WeightSpectrum], payload: Payload<'_>) -> Result<f64> {
    let weights = spec.weights()?;
    let parts: Vec<f64> = weights
        .par_iter()
        .map(|&(k, h)| {
            let s = spectra
                .iter()
                .find(|s| s.weight() == k)
                .ok_or_else(|| Error::Domain {
                    name: "spectra",
                    reason: format!("no eigenforms supplied for weight {k}"),
                })?;
            let v = match spec.weighting {
                Weighting::Harmonic => s.harmonic_sum(|f| payload.eval(f))?,
                Weighting::Natural => s.natural_sum(|f| payload.eval(f))?,
            };
            Ok(h * v)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(fsum(parts))
}

/// `A_K[X] = sum_k h((k-1)/K) (2 pi^2/(k-1)) sum_f X_f / L(1, sym^2 f)`, the
/// sum over `k` restricted by parity through `i^k`.
pub fn average_ak(spec: &AveragingSpec, payload: Payload<'_>, route: Route) -> Result<f64> {
    spec.validate()?;
    if spec.aspect != Aspect::Weight {
        return domain("aspect", "A_K is defined in the weight aspect");
    }
    match route {
        Route::Spectral => {
            let nmax = payload.max_index() as usize;
            let spectra = family_spectra(spec, nmax)?;
            average_ak_over(spec, &spectra, payload)
        }
        Route::Kernel => {
            if spec.weighting != Weighting::Harmonic {
                return domain("route", "the kernel route needs harmonic weights");
            }
            let (m, n, scale) = match payload {
                Payload::Constant(c) => (1, 1, c),
                Payload::LambdaProduct(m, n) => (m, n, 1.0),
                Payload::PerForm(_) => return domain("route", "the kernel route needs a payload linear in lambda(m) lambda(n)"),
            };
            if scale == 0.0 {
                return Ok(0.0);
            }
            let weights = spec.weights()?;
            let kernel = WeightKernel::new(&weights, m.max(n) * m.min(n))?;
            Ok(scale * kernel.eval_pair(m, n)?)
        }
    }
}

/// `sum_k w_k (delta(m, n) + 2 pi i^k sum_c S(m, n; c) / c J_{k-1}(4 pi sqrt(mn) / c))`
/// for a fixed list of weights, with `c` cut where the certified tail of the
/// whole combination drops below [`TAIL_TARGET`].
/// Largest modulus tabulated by [`WeightKernel`]; the table costs `O(c^3)`.
pub const KERNEL_ROW_LIMIT: u64 = 2500;

#[derive(Debug, Clone)]
pub struct WeightKernel {
    ks: Vec<u32>,
    w: Vec<f64>,
    abs_w: f64,
    kmin: u32,
    kmax: u32,
    /// `S(1, a; c)` for `a mod c`, indexed by `c - 1`.
    rows: Vec<Vec<f64>>,
}

impl WeightKernel {
    /// Weights `(k, w_k)` with every `k` even and at least 12; rows of
    /// `S(1, .; c)` are tabulated for `n <= n_max`.
    pub fn new(weights: &[(u32, f64)], n_max: u64) -> Result<Self> {
        if weights.is_empty() {
            return domain("weights", "no weights in the window");
        }
        if let Some(&(k, _)) = weights.iter().find(|(k, _)| *k < 12 || k % 2 == 1) {
            return domain("k", format!("weights must be even and at least 12, got {k}"));
        }
        let ks: Vec<u32> = weights.iter().map(|w| w.0).collect();
        let w: Vec<f64> = weights.iter().map(|w| w.1).collect();
        let abs_w = w.iter().map(|x| x.abs()).sum();
        let kmin = *ks.iter().min().expect("nonempty");
        let kmax = *ks.iter().max().expect("nonempty");
        let mut me = Self {
            ks,
            w,
            abs_w,
            kmin,
            kmax,
            rows: Vec::new(),
        };
        let cmax = me.cmax(1, n_max.max(1));
        if cmax > KERNEL_ROW_LIMIT {
            return Err(Error::Truncation(format!(
                "indices up to {n_max} need Kloosterman rows to c = {cmax}, above {KERNEL_ROW_LIMIT}"
            )));
        }
        me.rows = (1..=cmax)
            .into_par_iter()
            .map(|c| crate::arith::kloosterman_row(1, c))
            .collect::<Result<Vec<_>>>()?;
        Ok(me)
    }

    /// Smallest `c` beyond which the combined tail is certified below [`TAIL_TARGET`].
    /// Each `k` obeys the bound at `kmin` once `2 pi sqrt(mn) / c < kmin`.
    pub fn cmax(&self, m: u64, n: u64) -> u64 {
        let target = TAIL_TARGET / self.abs_w.max(1.0);
        let floor = (2.0 * PI * ((m * n) as f64).sqrt() / self.kmin as f64).ceil() as u64 + 1;
        level1_cmax(self.kmin, m, n, target).max(floor)
    }

    pub fn total_weight(&self) -> f64 {
        fsum(self.w.iter().copied())
    }

    /// `sum_k w_k i^k J_{k-1}(x)`.
    fn bessel_combination(&self, x: f64) -> f64 {
        let j = bessel_j_all(self.kmax as usize - 1, x);
        let mut acc = NeumaierSum::new();
        for (k, w) in self.ks.iter().zip(&self.w) {
            acc.add(w * i_pow(*k) * j[*k as usize - 1]);
        }
        acc.value()
    }

    /// The combination for `(1, n)`, using the tabulated rows.
    pub fn eval(&self, n: u64) -> Result<f64> {
        if n == 0 {
            return domain("n", "index must be positive");
        }
        let cmax = self.cmax(1, n);
        if cmax as usize > self.rows.len() {
            return Err(Error::Precision {
                needed: cmax,
                available: self.rows.len() as u64,
            });
        }
        let x0 = 4.0 * PI * (n as f64).sqrt();
        let mut acc = NeumaierSum::new();
        for c in 1..=cmax {
            let s = self.rows[c as usize - 1][(n % c) as usize];
            if s != 0.0 {
                acc.add(s / c as f64 * self.bessel_combination(x0 / c as f64));
            }
        }
        Ok(delta(1, n) * self.total_weight() + 2.0 * PI * acc.value())
    }

    /// The combination for a general pair, summing Kloosterman sums directly.
    pub fn eval_pair(&self, m: u64, n: u64) -> Result<f64> {
        if m == 1 || n == 1 {
            return self.eval(m * n);
        }
        if m == 0 || n == 0 {
            return domain("m, n", "indices must be positive");
        }
        let cmax = self.cmax(m, n);
        let x0 = 4.0 * PI * ((m * n) as f64).sqrt();
        let mut acc = NeumaierSum::new();
        for c in 1..=cmax {
            let s = kloosterman(m as i64, n as i64, c)?;
            if s != 0.0 {
                acc.add(s / c as f64 * self.bessel_combination(x0 / c as f64));
            }
        }
        Ok(delta(m, n) * self.total_weight() + 2.0 * PI * acc.value())
    }
}

/// A level-aspect payload, reduced to a combination of `lambda_f(j)` by the
/// Hecke relations (which hold exactly for newforms of prime level).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum LevelPayload {
    Constant(f64),
    /// `lambda_f(m)`.
    Lambda(u64),
    /// `lambda_f(m) lambda_f(n)`.
    LambdaProduct(u64, u64),
}

/// `lambda(m) lambda(n) = sum_{d | (m, n), (d, N) = 1} lambda(mn / d^2)` as `(coefficient, index)`.
pub fn hecke_linearize(m: u64, n: u64, level: u64) -> Vec<(f64, u64)> {
    crate::arith::divisors(gcd(m, n))
        .into_iter()
        .filter(|d| gcd(*d, level) == 1)
        .map(|d| (1.0, m * n / (d * d)))
        .collect()
}

impl LevelPayload {
    fn linear(&self, level: u64) -> Vec<(f64, u64)> {
        match *self {
            LevelPayload::Constant(c) => vec![(c, 1)],
            LevelPayload::Lambda(m) => vec![(1.0, m)],
            LevelPayload::LambdaProduct(m, n) => hecke_linearize(m, n, level),
        }
    }

    fn eval(&self, f: &HeckeEigenform) -> Result<f64> {
        match *self {
            LevelPayload::Constant(c) => Ok(c),
            LevelPayload::Lambda(m) => f.lambda(m),
            LevelPayload::LambdaProduct(m, n) => Ok(f.lambda(m)? * f.lambda(n)?),
        }
    }
}

/// Truncation choices for the level-aspect kernel route.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelOptions {
    /// `T` in `omega_f^{-1} ~ sum_{t <= T} lambda(t^2) / t`.
    pub t_max: u64,
    /// Kloosterman–Bessel cutoff, rounded down to a multiple of `N`.
    pub cmax: u64,
}

impl LevelOptions {
    pub fn for_level(level: u64) -> Self {
        Self {
            t_max: 20,
            cmax: level * 2000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LevelAverage {
    pub level: u64,
    pub parity: Parity,
    /// `A*[X sum_{t <= T} lambda(t^2) / t]` through the kernel.
    pub kernel: f64,
    /// Sum of the Weil tail bounds of every kernel used, scaled as in `kernel`.
    pub kernel_tail_bound: f64,
    /// The same truncated quantity summed over forms (level 11 only).
    pub spectral_truncated: Option<f64>,
    /// The exact `S[X]` summed over forms (level 11 only).
    pub spectral: Option<f64>,
    pub options: LevelOptions,
}

/// `S[X] = sum_f X_f` and `S^{+-}[X] = sum_f (1 +- eps_f)/2 X_f` over newforms of prime level `N`.
///
/// The kernel route uses `S[X] = A*[X omega_f^{-1}]` with the weight inverted by
/// its sharp truncation at `T` and `eps_f = sqrt(N) lambda_f(N)`. The spectral
/// route is available at `N = 11`, where the space is one-dimensional.
pub fn average_s_level_n(level: u64, parity: Parity, payload: LevelPayload, opts: LevelOptions) -> Result<LevelAverage> {
    if !is_prime(level) {
        return domain("N", format!("level must be prime, got {level}"));
    }
    if opts.t_max == 0 {
        return domain("t_max", "must be at least 1");
    }
    let cmax = opts.cmax / level * level;
    if cmax == 0 {
        return Err(Error::Truncation(format!("cmax = {} is below N = {level}", opts.cmax)));
    }
    let base = payload.linear(level);
    // X -> (1 +- eps) X / 2 with eps X = sqrt(N) lambda(N) X = sqrt(N) sum_j a_j lambda(N j).
    let sqrt_n = (level as f64).sqrt();
    let mut terms: Vec<(f64, u64)> = Vec::new();
    let half = if parity == Parity::All { 1.0 } else { 0.5 };
    for &(a, j) in &base {
        terms.push((half * a, j));
        let sgn = match parity {
            Parity::All => 0.0,
            Parity::Plus => 1.0,
            Parity::Minus => -1.0,
        };
        if sgn != 0.0 {
            terms.push((0.5 * sgn * sqrt_n * a, level * j));
        }
    }
    // A*[lambda(j) lambda(t^2)] = (N - 1/N)/12 kernel(j, t^2).
    let jobs: Vec<(f64, u64, u64)> = terms
        .iter()
        .flat_map(|&(a, j)| (1..=opts.t_max).map(move |t| (a / t as f64, j, t * t)))
        .filter(|(a, _, _)| *a != 0.0)
        .collect();
    let vals = jobs
        .par_iter()
        .map(|&(a, j, t2)| {
            let k = petersson_kernel_level_n(level, j, t2, cmax)?;
            Ok((a * k.value, a.abs() * k.tail_bound))
        })
        .collect::<Result<Vec<_>>>()?;
    let mass = 1.0 / level_mass(level);
    let kernel = mass * fsum(vals.iter().map(|v| v.0));
    let kernel_tail_bound = mass * fsum(vals.iter().map(|v| v.1));
    let (spectral, spectral_truncated) = if level == LEVEL11 {
        let f = eta_product_level11((level * opts.t_max * opts.t_max).max(200) as usize)?;
        let keep = match parity {
            Parity::All => 1.0,
            Parity::Plus => (1.0 + f.sign() as f64) / 2.0,
            Parity::Minus => (1.0 - f.sign() as f64) / 2.0,
        };
        let x = keep * payload.eval(&f)?;
        let w = harmonic_weight(&f)?;
        (Some(x), Some(w * x * f.harmonic_sum(opts.t_max)?))
    } else {
        (None, None)
    };
    Ok(LevelAverage {
        level,
        parity,
        kernel,
        kernel_tail_bound,
        spectral_truncated,
        spectral,
        options: LevelOptions { t_max: opts.t_max, cmax },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tail_bound_decreases() {
        let a = level1_tail_bound(12, 1, 1, 2);
        let b = level1_tail_bound(12, 1, 1, 4);
        assert!(b < a);
        let c = level1_cmax(12, 1, 1, 1e-12);
        assert!(level1_tail_bound(12, 1, 1, c) < 1e-12);
        assert!(level1_tail_bound(12, 1, 1, c - 1) >= 1e-12 || c <= 16);
    }

    #[test]
    fn rejects_short_truncation() {
        assert!(matches!(petersson_level1(12, 7, 9, Some(1)), Err(Error::Truncation(_))));
        assert!(petersson_level1(13, 1, 1, None).is_err());
        assert!(petersson_level1(10, 1, 1, None).is_err());
    }

    #[test]
    fn delta_form_two_sided() {
        let r = petersson_level1(12, 1, 1, None).unwrap();
        assert!(r.residual.abs() < 1e-10, "{r:?}");
        let r = petersson_level1(12, 2, 3, None).unwrap();
        assert!(r.residual.abs() < 1e-10, "{r:?}");
    }

    #[test]
    fn empty_space_still_balances() {
        // S_14 = 0, so the Kloosterman series cancels the delta term.
        let r = petersson_geometric_level1(14, 1, 1, level1_cmax(14, 1, 1, 1e-13)).unwrap();
        assert!(r.abs() < 1e-10, "{r}");
    }

    #[test]
    fn window_weights_respect_parity() {
        let spec = AveragingSpec::weight(20, SmoothWindow::default(), Parity::Plus);
        let ks: Vec<u32> = spec.weights().unwrap().iter().map(|w| w.0).collect();
        assert!(ks.iter().all(|k| k % 4 == 0));
        assert_eq!(ks.first(), Some(&12));
        assert_eq!(ks.last(), Some(&40));
    }

    #[test]
    fn hecke_linearization() {
        assert_eq!(hecke_linearize(2, 3, 11), vec![(1.0, 6)]);
        assert_eq!(hecke_linearize(2, 2, 11), vec![(1.0, 4), (1.0, 1)]);
        assert_eq!(hecke_linearize(11, 11, 11), vec![(1.0, 121)]);
    }

    #[test]
    fn level_kernel_argument_checks() {
        assert!(petersson_kernel_level_n(12, 1, 1, 120).is_err());
        assert!(matches!(petersson_kernel_level_n(11, 1, 1, 100), Err(Error::Truncation(_))));
        assert!(petersson_kernel_level_n(11, 0, 1, 110).is_err());
    }
}
