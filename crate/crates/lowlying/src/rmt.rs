//! Haar-random matrices from `SO(2N)`, `SO(2N+1)` and `USp(2N)` and the
//! one-level density of their eigenphases near 1.
//!
//! Eigenvalues of these groups come in pairs `e^{+-i theta}`, so the phases are
//! read off the symmetric (Hermitian) part `(M + M^*)/2`, whose spectrum is
//! `cos theta`, each value twice. For `SO(2N+1)` the extra eigenvalue `1` of
//! the symmetric part is the forced eigenvalue `+1` of `M`, since
//! `(M - I)^T (M - I) = 2 (I - (M + M^T)/2)`.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Complex, DMatrix};
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::density::SymmetryClass;
use crate::specfun::quad::integrate;
use crate::{domain, Error, Result};

/// The compact groups sampled here.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Group {
    /// `SO(2N)`.
    SoEven,
    /// `SO(2N+1)`.
    SoOdd,
    /// `USp(2N)`.
    Usp,
}

impl Group {
    pub const ALL: [Group; 3] = [Group::SoEven, Group::SoOdd, Group::Usp];

    pub fn class(self) -> SymmetryClass {
        match self {
            Group::SoEven => SymmetryClass::SoEven,
            Group::SoOdd => SymmetryClass::SoOdd,
            Group::Usp => SymmetryClass::Sp,
        }
    }

    /// Matrix size for rank `n`.
    pub fn dim(self, n: usize) -> usize {
        match self {
            Group::SoOdd => 2 * n + 1,
            _ => 2 * n,
        }
    }
}

impl fmt::Display for Group {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Group::SoEven => "so-even",
            Group::SoOdd => "so-odd",
            Group::Usp => "usp",
        })
    }
}

impl FromStr for Group {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "so-even" | "SOeven" => Ok(Group::SoEven),
            "so-odd" | "SOodd" => Ok(Group::SoOdd),
            "usp" | "sp" | "USp" | "Sp" => Ok(Group::Usp),
            other => domain("group", format!("unknown group `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSample {
    pub group: Group,
    pub n: usize,
    pub count: usize,
    pub seed: u64,
    /// The `N` nontrivial phases in `[0, pi]` of each matrix, ascending.
    pub phases: Vec<Vec<f64>>,
    /// Largest `max |M^* M - I|` (and `max |M^T J M - J|` for `USp`) over the samples.
    pub max_residual: f64,
    /// Number of samples with an eigenvalue `+1` (checked for `SO(2N+1)` only).
    pub forced_one: usize,
    /// `|M_00|^2` of each matrix; its mean under Haar measure is `1 / dim`.
    pub corner: Vec<f64>,
}

/// Each sample uses its own ChaCha stream, so results do not depend on the
/// number of threads.
fn sample_rng(seed: u64, index: usize) -> ChaCha12Rng {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

fn gaussian(rng: &mut ChaCha12Rng) -> f64 {
    StandardNormal.sample(rng)
}

/// Haar element of `SO(d)`: QR of a Gaussian matrix with `diag(R) > 0`,
/// then one column negated if the determinant is `-1`.
pub fn haar_orthogonal(d: usize, rng: &mut ChaCha12Rng) -> DMatrix<f64> {
    let g = DMatrix::from_fn(d, d, |_, _| gaussian(rng));
    let qr = g.qr();
    let r = qr.r();
    let mut q = qr.q();
    for j in 0..d {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// `J X` for `J = [[0, I], [-I, 0]]`.
fn apply_j(x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = x.nrows() / 2;
    DMatrix::from_fn(x.nrows(), x.ncols(), |i, j| if i < n { x[(i + n, j)] } else { -x[(i - n, j)] })
}

/// `max(|M^* M - I|, |M^T J M - J|)` entrywise, with the complex products
/// split into real ones.
pub fn symplectic_residual(m: &DMatrix<Complex<f64>>) -> f64 {
    let d = m.nrows();
    let a = m.map(|z| z.re);
    let b = m.map(|z| z.im);
    let (at, bt) = (a.transpose(), b.transpose());
    // M^* M = A^T A + B^T B + i (A^T B - B^T A)
    let re = &at * &a + &bt * &b - DMatrix::<f64>::identity(d, d);
    let im = &at * &b - &bt * &a;
    // M^T J M = A^T J A - B^T J B + i (A^T J B + B^T J A)
    let (ja, jb) = (apply_j(&a), apply_j(&b));
    let j = apply_j(&DMatrix::<f64>::identity(d, d));
    let sre = &at * &ja - &bt * &jb - j;
    let sim = &at * &jb + &bt * &ja;
    let mut worst = 0.0f64;
    for i in 0..d * d {
        worst = worst.max(re[i].hypot(im[i])).max(sre[i].hypot(sim[i]));
    }
    worst
}

/// Haar element of `USp(2N)` with columns `u_1..u_N, -J conj(u_1)..-J conj(u_N)`,
/// the `u_j` produced by Gram-Schmidt of complex Gaussian vectors against all
/// earlier columns and their quaternionic partners.
pub fn haar_symplectic(n: usize, rng: &mut ChaCha12Rng) -> DMatrix<Complex<f64>> {
    let d = 2 * n;
    let mut cols: Vec<Vec<Complex<f64>>> = Vec::with_capacity(d);
    let partner = |u: &[Complex<f64>]| -> Vec<Complex<f64>> {
        // -J conj(u): top half -conj(u_bottom), bottom half conj(u_top).
        let mut v = vec![Complex::new(0.0, 0.0); d];
        for i in 0..n {
            v[i] = -u[i + n].conj();
            v[i + n] = u[i].conj();
        }
        v
    };
    let mut firsts = Vec::with_capacity(n);
    let mut seconds = Vec::with_capacity(n);
    for _ in 0..n {
        let mut z: Vec<Complex<f64>> = (0..d).map(|_| Complex::new(gaussian(rng), gaussian(rng))).collect();
        // Two passes of classical Gram-Schmidt keep the result orthonormal to rounding.
        for _ in 0..2 {
            for c in &cols {
                let dot: Complex<f64> = c.iter().zip(&z).map(|(a, b)| a.conj() * b).sum();
                for (zi, ci) in z.iter_mut().zip(c) {
                    *zi -= dot * ci;
                }
            }
        }
        let norm = z.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
        for v in z.iter_mut() {
            *v /= norm;
        }
        let w = partner(&z);
        cols.push(z.clone());
        cols.push(w.clone());
        firsts.push(z);
        seconds.push(w);
    }
    DMatrix::from_fn(d, d, |i, j| if j < n { firsts[j][i] } else { seconds[j - n][i] })
}

/// Pair up a doubled spectrum (ascending) and return the phases.
fn phases_from_cosines(mut cos: Vec<f64>, leftover_top: bool) -> Vec<f64> {
    cos.sort_by(f64::total_cmp);
    if leftover_top {
        cos.pop();
    }
    let mut out: Vec<f64> = cos.chunks(2).map(|p| (0.5 * (p[0] + p[1])).clamp(-1.0, 1.0).acos()).collect();
    out.sort_by(f64::total_cmp);
    out
}

struct OneSample {
    phases: Vec<f64>,
    residual: f64,
    forced_one: bool,
    corner: f64,
}

fn one_sample(group: Group, n: usize, seed: u64, index: usize) -> OneSample {
    let mut rng = sample_rng(seed, index);
    match group {
        Group::SoEven | Group::SoOdd => {
            let d = group.dim(n);
            let q = haar_orthogonal(d, &mut rng);
            let gram = q.transpose() * &q - DMatrix::<f64>::identity(d, d);
            let residual = gram.amax();
            let sym = (&q + q.transpose()) * 0.5;
            let cos: Vec<f64> = sym.symmetric_eigenvalues().iter().copied().collect();
            let top = cos.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let odd = group == Group::SoOdd;
            OneSample {
                phases: phases_from_cosines(cos, odd),
                residual,
                forced_one: odd && (1.0 - top).abs() < 1e-10,
                corner: q[(0, 0)] * q[(0, 0)],
            }
        }
        Group::Usp => {
            let m = haar_symplectic(n, &mut rng);
            let residual = symplectic_residual(&m);
            let herm = (&m + m.adjoint()) * Complex::new(0.5, 0.0);
            let cos: Vec<f64> = herm.symmetric_eigenvalues().iter().copied().collect();
            OneSample {
                phases: phases_from_cosines(cos, false),
                residual,
                forced_one: false,
                corner: m[(0, 0)].norm_sqr(),
            }
        }
    }
}

/// `count` Haar samples of rank `n`.
pub fn sample_group(group: Group, n: usize, count: usize, seed: u64) -> Result<EnsembleSample> {
    if n < 2 {
        return domain("N", format!("rank must be at least 2, got {n}"));
    }
    if count == 0 {
        return domain("count", "need at least one sample");
    }
    let samples: Vec<OneSample> = (0..count).into_par_iter().map(|i| one_sample(group, n, seed, i)).collect();
    let max_residual = samples.iter().fold(0.0f64, |acc, s| acc.max(s.residual));
    let forced_one = samples.iter().filter(|s| s.forced_one).count();
    let corner = samples.iter().map(|s| s.corner).collect();
    Ok(EnsembleSample {
        group,
        n,
        count,
        seed,
        phases: samples.into_iter().map(|s| s.phases).collect(),
        max_residual,
        forced_one,
        corner,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmpiricalDensity {
    pub class: SymmetryClass,
    pub edges: Vec<f64>,
    /// Mean number of scaled phases per sample and unit length in each bin.
    pub density: Vec<f64>,
    pub stderr: Vec<f64>,
    /// `int_bin W / width` for the continuous part of `W`.
    pub predicted: Vec<f64>,
    pub samples: usize,
}

impl EmpiricalDensity {
    /// `max |density - predicted|` over bins.
    pub fn sup_deviation(&self) -> f64 {
        self.density.iter().zip(&self.predicted).fold(0.0f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// `max |density - predicted| / stderr` over bins.
    pub fn max_z(&self) -> f64 {
        self.density
            .iter()
            .zip(&self.predicted)
            .zip(&self.stderr)
            .fold(0.0f64, |acc, ((a, b), s)| acc.max((a - b).abs() / s))
    }

    /// Equal mixture of two histograms on the same bins.
    pub fn mix(&self, other: &EmpiricalDensity, class: SymmetryClass) -> Result<EmpiricalDensity> {
        if self.edges != other.edges {
            return domain("bins", "histograms have different bins");
        }
        let avg = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect::<Vec<_>>();
        let stderr = self.stderr.iter().zip(&other.stderr).map(|(a, b)| 0.5 * a.hypot(*b)).collect();
        Ok(EmpiricalDensity {
            class,
            edges: self.edges.clone(),
            density: avg(&self.density, &other.density),
            stderr,
            predicted: predicted_bins(class, &self.edges)?,
            samples: self.samples + other.samples,
        })
    }
}

fn predicted_bins(class: SymmetryClass, edges: &[f64]) -> Result<Vec<f64>> {
    edges
        .windows(2)
        .map(|e| Ok(integrate(|x| class.density(x), e[0], e[1], 1e-13)?.value / (e[1] - e[0])))
        .collect()
}

/// Histogram of `theta N / pi` on `[0, cutoff]` with bins of `binwidth`.
pub fn empirical_one_level(sample: &EnsembleSample, binwidth: f64, cutoff: f64) -> Result<EmpiricalDensity> {
    if !(binwidth > 0.0) || !(cutoff > 0.0) {
        return domain("bins", "bin width and cutoff must be positive");
    }
    if cutoff > sample.n as f64 / 4.0 {
        return domain("cutoff", format!("must be at most N/4 = {}", sample.n as f64 / 4.0));
    }
    let bins = (cutoff / binwidth).round() as usize;
    if bins == 0 || ((bins as f64) * binwidth - cutoff).abs() > 1e-9 * cutoff {
        return domain("bins", "bin width must divide the cutoff");
    }
    let edges: Vec<f64> = (0..=bins).map(|i| i as f64 * binwidth).collect();
    let scale = sample.n as f64 / std::f64::consts::PI;
    let mut sum = vec![0.0f64; bins];
    let mut sum_sq = vec![0.0f64; bins];
    let mut counts = vec![0u32; bins];
    for phases in &sample.phases {
        counts.iter_mut().for_each(|c| *c = 0);
        for &t in phases {
            let x = t * scale;
            if x >= cutoff {
                break;
            }
            counts[((x / binwidth) as usize).min(bins - 1)] += 1;
        }
        for b in 0..bins {
            let c = counts[b] as f64;
            sum[b] += c;
            sum_sq[b] += c * c;
        }
    }
    let s = sample.count as f64;
    let density = sum.iter().map(|v| v / s / binwidth).collect();
    let stderr = sum
        .iter()
        .zip(&sum_sq)
        .map(|(a, b)| {
            let mean = a / s;
            let var = (b / s - mean * mean).max(0.0) * s / (s - 1.0).max(1.0);
            (var / s).sqrt() / binwidth
        })
        .collect();
    let class = sample.group.class();
    Ok(EmpiricalDensity {
        class,
        predicted: predicted_bins(class, &edges)?,
        edges,
        density,
        stderr,
        samples: sample.count,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn samples_are_group_elements() {
        for g in Group::ALL {
            let s = sample_group(g, 6, 20, 7).unwrap();
            assert!(s.max_residual < 1e-12, "{g}: {}", s.max_residual);
            assert!(s.phases.iter().all(|p| p.len() == 6));
            assert!(s.phases.iter().flatten().all(|t| (0.0..=std::f64::consts::PI).contains(t)));
        }
        assert_eq!(sample_group(Group::SoOdd, 6, 20, 7).unwrap().forced_one, 20);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = sample_group(Group::Usp, 4, 8, 99).unwrap();
        let b = sample_group(Group::Usp, 4, 8, 99).unwrap();
        assert_eq!(a, b);
        let c = sample_group(Group::Usp, 4, 8, 100).unwrap();
        assert_ne!(a.phases, c.phases);
    }

    #[test]
    fn argument_checks() {
        assert!(sample_group(Group::SoEven, 1, 5, 0).is_err());
        assert!(sample_group(Group::SoEven, 4, 0, 0).is_err());
        let s = sample_group(Group::SoEven, 8, 4, 0).unwrap();
        assert!(empirical_one_level(&s, 0.1, 3.0).is_err());
        assert!(empirical_one_level(&s, 0.3, 1.0).is_err());
        assert!(empirical_one_level(&s, 0.25, 1.0).is_ok());
    }
}
