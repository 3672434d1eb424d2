//! The twelve acceptance criteria as functions returning a [`Criterion`].
//!
//! Each check runs the library at the sizes the criterion names and compares
//! against the stated tolerance. Nothing here panics on a failed comparison;
//! the verdict and the measured numbers go into the record.

use std::fmt;
use std::time::Instant;

use lowlying::arith::{divisors, gcd, is_prime, kloosterman_level_factor, kloosterman_row, twisted_sum, weil_bound};
use lowlying::density::{density_single, family_average, hyp4_sum, predict_integral, FamilyKind, Scale, SymmetryClass};
use lowlying::extremal::{alpha_sweep, closed_form_residual, nonvanishing_chain, AlphaSource, SWEEP};
use lowlying::modforms::HeckeEigenform;
use lowlying::petersson::{average_ak, petersson_level11, AveragingSpec, Parity, Payload, Route, WeightSpectrum, TAIL_LIMIT};
use lowlying::rmt::{empirical_one_level, sample_group, Group};
use lowlying::specfun::{bessel_series_check, make_sinc_sq, SeriesKind, SmoothWindow, TestFunction, VhTransform};
use lowlying::Result;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

#[derive(Debug, Clone, PartialEq)]
pub struct Criterion {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    /// Measured values behind the verdict.
    pub detail: String,
    pub seconds: f64,
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {} ({:.1} s): {}",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.title,
            self.seconds,
            self.detail
        )
    }
}

/// Time `body` and turn a library error into a failed record.
fn run(id: u8, title: &'static str, body: impl FnOnce() -> Result<(bool, String)>) -> Criterion {
    let start = Instant::now();
    let (passed, detail) = body().unwrap_or_else(|e| (false, format!("error: {e}")));
    Criterion {
        id,
        title,
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn cot_quarter() -> f64 {
    1.0 / 0.25f64.tan()
}

/// Extrapolated Nystrom constants against `(3 + cot 1/4)/8` and `(5 + cot 1/4)/8`.
pub fn extremal_constants() -> Criterion {
    run(1, "extremal constants", || {
        let start = Instant::now();
        let even = alpha_sweep(SymmetryClass::SoEven, 2.0, &SWEEP)?.extrapolated;
        let odd = alpha_sweep(SymmetryClass::SoOdd, 2.0, &SWEEP)?.extrapolated;
        let secs = start.elapsed().as_secs_f64();
        let de = (even - (3.0 + cot_quarter()) / 8.0).abs();
        let dod = (odd - (5.0 + cot_quarter()) / 8.0).abs();
        Ok((
            de <= 1e-6 && dod <= 1e-6 && secs < 10.0,
            format!("SOeven {even:.9} (off {de:.1e}), SOodd {odd:.9} (off {dod:.1e}), tol 1e-6, {secs:.1} s < 10 s"),
        ))
    })
}

/// Closed-form extremal functions in their integral equations.
pub fn closed_form_residuals() -> Criterion {
    run(2, "closed-form residuals", || {
        let mut worst: f64 = 0.0;
        for class in [SymmetryClass::SoEven, SymmetryClass::SoOdd] {
            for j in 0..100 {
                let x = j as f64 / 99.0;
                worst = worst.max(closed_form_residual(class, x)?.abs());
            }
        }
        Ok((worst <= 1e-10, format!("max residual {worst:.2e} over 2 x 100 points, tol 1e-10")))
    })
}

/// `int phi W(G)` on both sides of Plancherel.
pub fn prediction_integrals() -> Criterion {
    run(3, "prediction integrals", || {
        let cases = [
            (SymmetryClass::SoEven, 1.0, 7.0 / 8.0),
            (SymmetryClass::SoOdd, 1.0, 9.0 / 8.0),
            (SymmetryClass::O, 1.0, 1.0),
            (SymmetryClass::Sp, 2.0 / 3.0, 9.0 / 32.0),
        ];
        let mut worst: f64 = 0.0;
        for (class, nu, want) in cases {
            let p = predict_integral(class, &make_sinc_sq(nu)?)?;
            worst = worst.max((p.space - want).abs()).max((p.fourier - want).abs());
        }
        Ok((worst <= 1e-10, format!("7/8, 9/8, 1, 9/32: max error {worst:.2e} over both sides, tol 1e-10")))
    })
}

/// The four bounds from the `sinc^2` and Fredholm routes.
pub fn nonvanishing_chains() -> Criterion {
    run(4, "nonvanishing chain", || {
        let bounds = |source| -> Result<Vec<f64>> {
            Ok(nonvanishing_chain(source)?
                .iter()
                .map(|r| r.proportion_bound.or(r.order_bound).unwrap_or(f64::NAN))
                .collect())
        };
        let sinc = bounds(AlphaSource::Sinc2)?;
        let exact = [9.0 / 16.0, 15.0 / 16.0, 1.0, 55.0 / 64.0];
        let sinc_err = sinc.iter().zip(exact).fold(0.0f64, |a, (g, w)| a.max((g - w).abs()));
        let fred = bounds(AlphaSource::Fredholm)?;
        let cot = cot_quarter();
        let symbolic = [1.0 - (3.0 + cot) / 16.0, 1.0 - (cot - 3.0) / 16.0, (4.0 + cot) / 8.0];
        let fred_err = fred.iter().zip(symbolic).fold(0.0f64, |a, (g, w)| a.max((g - w).abs()));
        Ok((
            sinc_err <= 1e-10 && fred_err <= 1e-6,
            format!(
                "sinc2 {:?} (max error {sinc_err:.1e}); Fredholm {:.6} {:.6} {:.6} (max error {fred_err:.1e}), Sp {:.6}",
                sinc, fred[0], fred[1], fred[2], fred[3]
            ),
        ))
    })
}

/// Level 1 for every even `k` in 12..=40 and `m, n <= 10`, then level 11.
pub fn petersson_agreement() -> Criterion {
    run(5, "Petersson two-sided agreement", || {
        let start = Instant::now();
        let mut worst: f64 = 0.0;
        let mut certified = true;
        for k in (12..=40).step_by(2) {
            let s = WeightSpectrum::new(k, 0)?;
            for m in 1..=10 {
                for n in 1..=10 {
                    let r = s.petersson(m, n, None)?;
                    certified &= r.truncation_bound <= TAIL_LIMIT;
                    worst = worst.max(r.residual.abs());
                }
            }
        }
        let level = petersson_level11(1, 1, 1_100_000)?;
        let secs = start.elapsed().as_secs_f64();
        Ok((
            worst <= 1e-5 && certified && level.residual.abs() <= 1e-5 && secs < 120.0,
            format!(
                "level 1 max residual {worst:.1e} (tails certified: {certified}); level 11 residual {:.1e} at c <= {}; {secs:.0} s < 120 s",
                level.residual, level.cmax
            ),
        ))
    })
}

/// Log-log slope of the residuals at `x = L`, for both series of each kind.
pub fn bessel_series_law() -> Criterion {
    run(6, "Bessel-series law", || {
        let vh = VhTransform::new(SmoothWindow::default());
        let ls = [50.0, 100.0, 200.0, 400.0];
        let mut parts = Vec::new();
        let mut ok = true;
        for kind in [SeriesKind::Residue(1), SeriesKind::Residue(3), SeriesKind::Alternating] {
            let res = ls
                .iter()
                .map(|&l| Ok(bessel_series_check(&vh, kind, l, l)?.residual.abs()))
                .collect::<Result<Vec<_>>>()?;
            let slope = -lowlying::density::fit_power_law(&ls, &res)?.exponent;
            ok &= slope >= 4.0;
            let name = match kind {
                SeriesKind::Residue(a) => format!("l = {a} mod 4"),
                SeriesKind::Alternating => "alternating".to_owned(),
            };
            parts.push(format!("{name}: exponent {slope:.2}"));
        }
        Ok((ok, format!("x/L = 1, L in 50..400; {}; need >= 4", parts.join(", "))))
    })
}

/// `A_K[1]` and its parity halves against `h^(0) K/2` and `h^(0) K/4`.
pub fn averaging_normalizations() -> Criterion {
    run(7, "averaging normalizations", || {
        let window = SmoothWindow::default();
        let h0 = window.hhat0();
        let k_big = 400u64;
        let ratio = |parity, share: f64| -> Result<f64> {
            let v = average_ak(&AveragingSpec::weight(k_big, window, parity), Payload::Constant(1.0), Route::Kernel)?;
            Ok(v / (share * h0 * k_big as f64))
        };
        let all = ratio(Parity::All, 0.5)?;
        let plus = ratio(Parity::Plus, 0.25)?;
        let minus = ratio(Parity::Minus, 0.25)?;
        let inside = |r: f64| (0.98..=1.02).contains(&r);
        Ok((
            inside(all) && inside(plus) && inside(minus),
            format!("K = 400: all {all:.5}, plus {plus:.5}, minus {minus:.5}; need [0.98, 1.02]"),
        ))
    })
}

/// Weight-aspect family average with `sinc^2`, `nu = 1/2`.
pub fn family_density_trend() -> Criterion {
    run(8, "family-density trend", || {
        let tf = make_sinc_sq(0.5)?;
        let mut errs = Vec::new();
        let mut stats = Vec::new();
        let mut prediction = 0.0;
        for k_big in [100u64, 200, 400] {
            let spec = AveragingSpec::weight(k_big, SmoothWindow::default(), Parity::All);
            let r = family_average(&spec, FamilyKind::Gl2, &tf, Route::Kernel)?;
            prediction = r.prediction;
            stats.push(r.statistic);
            errs.push(r.relative_error());
        }
        let shrinking = errs.windows(2).all(|w| w[1] < w[0]);
        let close = errs[2] <= 0.10;
        Ok((
            shrinking && close,
            format!(
                "prediction {prediction}; K = 100, 200, 400: {:.4}, {:.4}, {:.4}; relative errors {:.3}, {:.3}, {:.3}; decreasing: {shrinking}; need <= 0.10 at K = 400",
                stats[0], stats[1], stats[2], errs[0], errs[1], errs[2]
            ),
        ))
    })
}

/// Eigenphase histograms at `N = 50`.
pub fn rmt_densities() -> Criterion {
    run(9, "RMT densities", || {
        let start = Instant::now();
        let mut parts = Vec::new();
        let mut ok = true;
        let mut forced = true;
        for (i, group) in Group::ALL.into_iter().enumerate() {
            let sample = sample_group(group, 50, 10_000, i as u64)?;
            if group == Group::SoOdd {
                forced = sample.forced_one == sample.count;
            }
            let h = empirical_one_level(&sample, 0.1, 3.0)?;
            let dev = h.sup_deviation();
            ok &= dev <= 0.05;
            parts.push(format!("{group} sup {dev:.4} (max z {:.2})", h.max_z()));
        }
        let secs = start.elapsed().as_secs_f64();
        Ok((
            ok && forced && secs < 300.0,
            format!("{}; need <= 0.05; +1 forced in every SO(2N+1) sample: {forced}; {secs:.0} s < 300 s", parts.join(", ")),
        ))
    })
}

/// Weil bound, `S_n(c)` closed form and the level factorization.
pub fn arithmetic_oracles() -> Criterion {
    run(10, "arithmetic oracles", || {
        // S(du, n; c) = S(d, nu; c) and the bound only sees (d, n, c), so rows
        // m = d | c cover every pair.
        let mut pairs = 0u64;
        let mut weil_ok = true;
        for c in 1..=500u64 {
            for d in divisors(c) {
                let m = (d % c) as i64;
                for (n, s) in kloosterman_row(m, c)?.into_iter().enumerate() {
                    weil_ok &= s.abs() <= weil_bound(m, n as i64, c) * (1.0 + 1e-12) + 1e-9;
                    pairs += 1;
                }
            }
        }
        let mut twisted_ok = true;
        for c in 1..=200 {
            for n in 1..=20 {
                twisted_ok &= twisted_sum(n, c)?.agrees(1e-9);
            }
        }
        let mut rng = ChaCha12Rng::seed_from_u64(157);
        let primes: Vec<u64> = (2..60).filter(|&p| is_prime(p)).collect();
        let mut factor_ok = true;
        let mut done = 0;
        while done < 100 {
            let level = primes[rng.random_range(0..primes.len())];
            let l = rng.random_range(1..=300u64);
            let n = rng.random_range(1..=50u64);
            let p = rng.random_range(-2000..=2000i64);
            if gcd(l, level) != 1 || p.rem_euclid(level as i64) == 0 {
                continue;
            }
            factor_ok &= kloosterman_level_factor(n, p, l, level)?.agrees(1e-9);
            done += 1;
        }
        Ok((
            weil_ok && twisted_ok && factor_ok,
            format!(
                "Weil bound on {pairs} row entries (c <= 500): {weil_ok}; S_n(c), c <= 200, n <= 20: {twisted_ok}; factorization on 100 random instances: {factor_ok}"
            ),
        ))
    })
}

/// Growth exponent of `|sum_{p <= X} e(2 sqrt p / c)|` for `c <= 10`.
pub fn hypothesis4_experiment() -> Criterion {
    run(11, "Hypothesis-4 experiment", || {
        let mut parts = Vec::new();
        let mut ok = true;
        for c in 1..=10 {
            let t = hyp4_sum(1, c, 1e7, false)?;
            let Some(fit) = t.fit else {
                ok = false;
                parts.push(format!("c={c}: no fit"));
                continue;
            };
            ok &= fit.exponent <= 0.75 + 2.0 * fit.sigma;
            parts.push(format!("c={c}: {:.3}+-{:.3} (rms {:.3})", fit.exponent, fit.sigma, fit.rms_residual));
        }
        Ok((ok, format!("X = 1e7; {}; need exponent <= 0.75 + 2 sigma", parts.join(", "))))
    })
}

/// Bucket recombination and the tiny-support case for Delta.
pub fn explicit_formula_identity() -> Criterion {
    run(12, "explicit-formula identity", || {
        let f = HeckeEigenform::delta(21_000)?;
        let scale = Scale::LogKSquared(12);
        let mut exact = true;
        for nu in [0.1, 0.25, 0.5, 0.75, 1.0] {
            let t = density_single(&f, &make_sinc_sq(nu)?, scale)?;
            let again = (((t.arch + t.diag) + t.lambda_p) + t.lambda_p2) + t.higher;
            exact &= t.total().to_bits() == again.to_bits();
        }
        // 2 nu L below log 2: no prime power is seen.
        let nu = 0.9 * 2f64.ln() / (2.0 * scale.value());
        let tiny = make_sinc_sq(nu)?;
        let t = density_single(&f, &tiny, scale)?;
        let arch_only = t.total().to_bits() == t.arch.to_bits() && tiny.support_radius() * scale.value() < 2f64.ln();
        Ok((
            exact && arch_only,
            format!("recombination bit-for-bit at 5 supports: {exact}; support {:.4} gives total == arch: {arch_only}", nu * 2.0),
        ))
    })
}

/// All criteria in order.
pub const CHECKS: [fn() -> Criterion; 12] = [
    extremal_constants,
    closed_form_residuals,
    prediction_integrals,
    nonvanishing_chains,
    petersson_agreement,
    bessel_series_law,
    averaging_normalizations,
    family_density_trend,
    rmt_densities,
    arithmetic_oracles,
    hypothesis4_experiment,
    explicit_formula_identity,
];
