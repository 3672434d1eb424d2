use std::path::Path;

use lowlying::arith::{kloosterman, twisted_sum, weil_bound};
use lowlying::density::{family_average, hyp4_sum, predict_integral, DensityReport, ExpSumTrace, Prediction, SymmetryClass};
use lowlying::extremal::{
    alpha_for, alpha_sweep, chain_radius, closed_form_alpha, closed_form_residual, nonvanishing_pipeline, solve_fredholm,
    AlphaSource, FredholmProblem, NonvanishingFamily, NonvanishingResult,
};
use lowlying::modforms::cache::load_or_build;
use lowlying::petersson::{
    petersson_kernel_level_n, petersson_level11, AveragingSpec, Aspect, PeterssonReport, WeightSpectrum,
};
use lowlying::rmt::{empirical_one_level, sample_group, EmpiricalDensity, Group};
use lowlying::specfun::{bessel_series_check, BesselSeriesReport, SeriesKind, SmoothWindow, VhTransform};
use lowlying::{Error, Result};
use serde::{Deserialize, Serialize};

use crate::args::*;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KloostermanRow {
    pub m: i64,
    pub n: i64,
    pub c: u64,
    pub value: f64,
    pub weil_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TwistedRow {
    pub n: u64,
    pub c: u64,
    pub enumerated: f64,
    pub closed_form: i64,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenformRow {
    pub k: u32,
    pub sign: i8,
    pub l1_sym2: f64,
    /// `lambda(1..=nmax)`.
    pub lambdas: Vec<f64>,
}

/// A Petersson comparison; `lhs` is absent when no spectral side is available.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeterssonRow {
    pub k_or_n: u64,
    pub m: u64,
    pub n: u64,
    pub lhs: Option<f64>,
    pub rhs: f64,
    pub residual: Option<f64>,
    pub truncation_bound: f64,
    pub cmax: u64,
}

impl From<PeterssonReport> for PeterssonRow {
    fn from(r: PeterssonReport) -> Self {
        Self {
            k_or_n: r.k_or_n,
            m: r.m,
            n: r.n,
            lhs: Some(r.lhs),
            rhs: r.rhs,
            residual: Some(r.residual),
            truncation_bound: r.truncation_bound,
            cmax: r.cmax,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RmtReport {
    pub histogram: EmpiricalDensity,
    pub max_residual: f64,
    /// Samples with a forced eigenvalue `+1`, out of `odd_samples`.
    pub forced_one: usize,
    pub odd_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExtremalRow {
    pub class: SymmetryClass,
    pub radius: f64,
    pub grid: usize,
    pub alpha: f64,
    pub closed_form: Option<f64>,
    /// `max |(I + K) f0 - 1|` of the discrete system.
    pub residual: f64,
    /// Largest closed-form residual at 100 points of `[0, 1]`.
    pub closed_form_residual: Option<f64>,
    pub extrapolated: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonvanishingRow {
    pub class: NonvanishingClass,
    pub alpha: AlphaChoice,
    pub result: NonvanishingResult,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "rows", rename_all = "kebab-case")]
pub enum ReportData {
    Kloosterman(Vec<KloostermanRow>),
    TwistedSum(Vec<TwistedRow>),
    BesselCheck(Vec<BesselSeriesReport>),
    Eigen(Vec<EigenformRow>),
    Petersson(Vec<PeterssonRow>),
    Density(DensityReport),
    Hyp4(ExpSumTrace),
    Predict(Prediction),
    Rmt(RmtReport),
    Extremal(Vec<ExtremalRow>),
    Nonvanishing(Vec<NonvanishingRow>),
}

fn flag_err(name: &'static str, reason: impl Into<String>) -> Error {
    Error::Domain {
        name,
        reason: reason.into(),
    }
}

fn moduli(c: u64, c_max: Option<u64>) -> Result<std::ops::RangeInclusive<u64>> {
    let hi = c_max.unwrap_or(c);
    if c == 0 {
        return Err(flag_err("c", "modulus must be positive"));
    }
    if hi < c {
        return Err(flag_err("c-max", format!("{hi} is below c = {c}")));
    }
    Ok(c..=hi)
}

pub fn execute(command: &Command, cache_dir: &Path, seed: u64) -> Result<ReportData> {
    match command {
        Command::Kloosterman(a) => {
            let rows = moduli(a.c, a.c_max)?
                .map(|c| {
                    Ok(KloostermanRow {
                        m: a.m,
                        n: a.n,
                        c,
                        value: kloosterman(a.m, a.n, c)?,
                        weil_bound: weil_bound(a.m, a.n, c),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ReportData::Kloosterman(rows))
        }
        Command::TwistedSum(a) => {
            let rows = moduli(a.c, a.c_max)?
                .map(|c| {
                    let t = twisted_sum(a.n, c)?;
                    Ok(TwistedRow {
                        n: t.n,
                        c: t.c,
                        enumerated: t.enumerated,
                        closed_form: t.closed_form,
                        agrees: t.agrees(1e-8),
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ReportData::TwistedSum(rows))
        }
        Command::BesselCheck(a) => {
            let vh = VhTransform::new(SmoothWindow::default());
            let mut rows = Vec::new();
            for &l in &a.l {
                for &x in &a.x {
                    for kind in [SeriesKind::Residue(1), SeriesKind::Residue(3), SeriesKind::Alternating] {
                        rows.push(bessel_series_check(&vh, kind, l, x)?);
                    }
                }
            }
            Ok(ReportData::BesselCheck(rows))
        }
        Command::Eigen(a) => {
            if a.k < 12 || a.k % 2 == 1 {
                return Err(flag_err("k", format!("weight must be even and at least 12, got {}", a.k)));
            }
            if a.nmax == 0 {
                return Err(flag_err("nmax", "must be positive"));
            }
            let spectrum = cached_spectrum(cache_dir, a.k, a.nmax)?;
            let rows = spectrum
                .forms()
                .iter()
                .zip(spectrum.l1_sym2())
                .map(|(f, l1)| {
                    Ok(EigenformRow {
                        k: a.k,
                        sign: f.sign(),
                        l1_sym2: *l1,
                        lambdas: (1..=a.nmax as u64).map(|n| f.lambda(n)).collect::<Result<_>>()?,
                    })
                })
                .collect::<Result<_>>()?;
            Ok(ReportData::Eigen(rows))
        }
        Command::PeterssonCheck(a) => {
            if a.k < 12 || a.k % 2 == 1 {
                return Err(flag_err("k", format!("weight must be even and at least 12, got {}", a.k)));
            }
            if a.m == 0 || a.n == 0 {
                return Err(flag_err(if a.m == 0 { "m" } else { "n" }, "indices must be positive"));
            }
            let spectrum = cached_spectrum(cache_dir, a.k, a.m.max(a.n) as usize)?;
            Ok(ReportData::Petersson(vec![spectrum.petersson(a.m, a.n, a.cmax)?.into()]))
        }
        Command::PeterssonKernel(a) => {
            let cmax = a.cmax.unwrap_or(2000 * a.level);
            let row = if a.level == 11 {
                petersson_level11(a.m, a.n, cmax)?.into()
            } else {
                let k = petersson_kernel_level_n(a.level, a.m, a.n, cmax)?;
                PeterssonRow {
                    k_or_n: a.level,
                    m: a.m,
                    n: a.n,
                    lhs: None,
                    rhs: k.value,
                    residual: None,
                    truncation_bound: k.tail_bound,
                    cmax: k.cmax,
                }
            };
            Ok(ReportData::Petersson(vec![row]))
        }
        Command::Density(a) => {
            let mut spec = match a.aspect {
                Aspect::Weight => {
                    let k = a.k_big.ok_or_else(|| flag_err("K", "required in the weight aspect"))?;
                    if a.level.is_some() {
                        return Err(flag_err("N", "only used in the level aspect"));
                    }
                    AveragingSpec::weight(k, SmoothWindow::default(), a.parity)
                }
                Aspect::Level => {
                    let n = a.level.ok_or_else(|| flag_err("N", "required in the level aspect"))?;
                    if a.k_big.is_some() {
                        return Err(flag_err("K", "only used in the weight aspect"));
                    }
                    AveragingSpec::level(n, a.parity)
                }
            };
            spec.weighting = a.weighting;
            Ok(ReportData::Density(family_average(&spec, a.family, a.phi.as_dyn(), a.route)?))
        }
        Command::Hyp4(a) => Ok(ReportData::Hyp4(hyp4_sum(a.a, a.c, a.x_max, a.weighted)?)),
        Command::Predict(a) => Ok(ReportData::Predict(predict_integral(a.class, a.phi.as_dyn())?)),
        Command::Rmt(a) => rmt(a, seed),
        Command::Extremal(a) => extremal(a),
        Command::Nonvanishing(a) => nonvanishing(a),
    }
}

fn cached_spectrum(dir: &Path, k: u32, nmax: usize) -> Result<WeightSpectrum> {
    let space = load_or_build(dir, k, nmax.max(WeightSpectrum::default_nmax(k)))?;
    WeightSpectrum::from_space(&space)
}

fn rmt(a: &RmtArgs, seed: u64) -> Result<ReportData> {
    let run = |g: Group, seed: u64| -> Result<(EmpiricalDensity, f64, usize, usize)> {
        let s = sample_group(g, a.rank, a.samples, seed)?;
        let h = empirical_one_level(&s, a.bins, a.cutoff)?;
        let odd = if g == Group::SoOdd { s.count } else { 0 };
        Ok((h, s.max_residual, s.forced_one, odd))
    };
    let (histogram, max_residual, forced_one, odd_samples) = match a.group {
        RmtGroup::SoEven => run(Group::SoEven, seed)?,
        RmtGroup::SoOdd => run(Group::SoOdd, seed)?,
        RmtGroup::Usp => run(Group::Usp, seed)?,
        RmtGroup::O => {
            let even = run(Group::SoEven, seed)?;
            let odd = run(Group::SoOdd, seed.wrapping_add(1))?;
            (even.0.mix(&odd.0, SymmetryClass::O)?, even.1.max(odd.1), odd.2, odd.3)
        }
    };
    Ok(ReportData::Rmt(RmtReport {
        histogram,
        max_residual,
        forced_one,
        odd_samples,
    }))
}

fn extremal(a: &ExtremalArgs) -> Result<ReportData> {
    let radius = a.radius.unwrap_or_else(|| chain_radius(a.class));
    let grids: Vec<usize> = if a.sweep { (0..4).map(|i| a.grid << i).collect() } else { vec![a.grid] };
    let full = radius == 2.0;
    let closed_form = if full { closed_form_alpha(a.class).ok() } else { None };
    let closed_form_residual = match closed_form {
        Some(_) => Some(
            (0..100)
                .map(|i| closed_form_residual(a.class, i as f64 / 99.0).map(f64::abs))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(0.0, f64::max),
        ),
        None => None,
    };
    let extrapolated = if a.sweep { Some(alpha_sweep(a.class, radius, &grids)?.extrapolated) } else { None };
    let rows = grids
        .iter()
        .map(|&g| {
            let sol = solve_fredholm(&FredholmProblem::with_support(a.class, radius, g)?)?;
            Ok(ExtremalRow {
                class: a.class,
                radius,
                grid: g,
                alpha: sol.alpha,
                closed_form,
                residual: sol.residual,
                closed_form_residual,
                extrapolated,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReportData::Extremal(rows))
}

fn nonvanishing(a: &NonvanishingArgs) -> Result<ReportData> {
    let classes = match a.class {
        NonvanishingClass::All => vec![
            NonvanishingClass::SoEven,
            NonvanishingClass::SoOdd,
            NonvanishingClass::O,
            NonvanishingClass::Sp,
        ],
        c => vec![c],
    };
    if let AlphaChoice::Value(_) = a.alpha {
        if classes.len() != 1 || classes[0] == NonvanishingClass::O {
            return Err(flag_err("alpha", "a numeric alpha needs a single class other than o"));
        }
    }
    let alpha = |class: SymmetryClass| -> Result<f64> {
        match a.alpha {
            AlphaChoice::Value(v) => Ok(v),
            AlphaChoice::Source(s) => alpha_for(class, s),
            // The closed forms where they exist, the extrapolated Nystrom value otherwise.
            AlphaChoice::Auto => match class {
                SymmetryClass::Sp => alpha_for(class, AlphaSource::Fredholm),
                _ => alpha_for(class, AlphaSource::ClosedForm),
            },
        }
    };
    let rows = classes
        .into_iter()
        .map(|class| {
            let family = match class {
                NonvanishingClass::SoEven => NonvanishingFamily::SoEven(alpha(SymmetryClass::SoEven)?),
                NonvanishingClass::SoOdd => NonvanishingFamily::SoOdd(alpha(SymmetryClass::SoOdd)?),
                NonvanishingClass::O => NonvanishingFamily::Combined {
                    even: alpha(SymmetryClass::SoEven)?,
                    odd: alpha(SymmetryClass::SoOdd)?,
                },
                NonvanishingClass::Sp => NonvanishingFamily::SymSquare(alpha(SymmetryClass::Sp)?),
                NonvanishingClass::All => unreachable!(),
            };
            Ok(NonvanishingRow {
                class,
                alpha: a.alpha,
                result: nonvanishing_pipeline(family)?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(ReportData::Nonvanishing(rows))
}
