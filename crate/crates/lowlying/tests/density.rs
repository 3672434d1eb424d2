use lowlying::density::{
    corollary6_bound, density_single, density_single_sym2, family_average, hyp4_sum, predict_integral, FamilyKind,
    Scale, SymmetryClass,
};
use lowlying::modforms::qseries::delta_coefficients;
use lowlying::modforms::{eta_product_level11, HeckeEigenform};
use lowlying::petersson::{AveragingSpec, Parity, Route, WeightSpectrum};
use lowlying::specfun::{make_sinc_sq, SmoothWindow, TestFunction};
use proptest::prelude::*;

fn delta_form(nmax: usize) -> HeckeEigenform {
    HeckeEigenform::delta(nmax).unwrap()
}

/// Returns `(p, e)` when `n = p^e`, by trial division.
fn as_prime_power(n: u64) -> Option<(u64, u32)> {
    let mut p = 2;
    while p * p <= n && n % p != 0 {
        p += 1;
    }
    if n % p != 0 {
        p = n;
    }
    let (mut m, mut e) = (n, 0);
    while m % p == 0 {
        m /= p;
        e += 1;
    }
    (m == 1).then_some((p, e))
}

/// The prime side for Delta straight from tau(n), walking every integer.
fn delta_prime_side(tf: &dyn TestFunction, l: f64) -> f64 {
    let limit = (tf.support_radius() * l).exp() as u64;
    let tau = delta_coefficients(limit as usize + 1).unwrap();
    let lam = |n: u64| tau[n as usize] as f64 / (n as f64).powf(5.5);
    let mut total = 0.0;
    for n in 2..=limit {
        if let Some((p, e)) = as_prime_power(n) {
            let lower = match e {
                1 => 0.0,
                2 => 1.0,
                _ => lam(n / (p * p)),
            };
            let c = lam(n) - lower;
            total -= 2.0 / l * (p as f64).ln() / (n as f64).sqrt() * c * tf.phi_hat((n as f64).ln() / l);
        }
    }
    total
}

#[test]
fn explicit_formula_matches_brute_force() {
    let f = delta_form(21_000);
    for nu in [0.3, 0.5, 0.9, 1.0] {
        let tf = make_sinc_sq(nu).unwrap();
        let t = density_single(&f, &tf, Scale::LogKSquared(12)).unwrap();
        let l = Scale::LogKSquared(12).value();
        let prime = t.total() - t.arch;
        let brute = delta_prime_side(&tf, l);
        assert!((prime - brute).abs() < 1e-12, "nu={nu}: {prime} vs {brute}");
    }
}

#[test]
fn delta_statistic_is_frozen() {
    let f = delta_form(21_000);
    let t = density_single(&f, &make_sinc_sq(1.0).unwrap(), Scale::LogKSquared(12)).unwrap();
    assert!((t.total() - 0.002_529_169_225_924_03).abs() < 1e-12, "{t:?}");
    // Nonnegative, as it must be when every zero is real.
    assert!(t.total() >= 0.0);
}

#[test]
fn buckets_recombine_exactly() {
    let f = delta_form(21_000);
    for nu in [0.25, 0.5, 0.8, 1.0] {
        let t = density_single(&f, &make_sinc_sq(nu).unwrap(), Scale::LogKSquared(12)).unwrap();
        let again = ((((t.arch + t.diag) + t.lambda_p) + t.lambda_p2) + t.higher).to_bits();
        assert_eq!(t.total().to_bits(), again);
    }
}

#[test]
fn tiny_support_is_the_archimedean_term() {
    let f = delta_form(50);
    // Support radius 0.1 against L = log 144 keeps every p^nu out.
    let tf = make_sinc_sq(0.05).unwrap();
    let t = density_single(&f, &tf, Scale::LogKSquared(12)).unwrap();
    assert_eq!((t.diag, t.lambda_p, t.lambda_p2, t.higher), (0.0, 0.0, 0.0, 0.0));
    assert_eq!(t.total(), t.arch);
    let s = density_single_sym2(&f, &tf, Scale::LogKSquared(12)).unwrap();
    assert_eq!(s.total(), tf.integral());
}

#[test]
fn scale_is_log_k_squared() {
    let spectrum = WeightSpectrum::new(24, 200).unwrap();
    let tf = make_sinc_sq(0.4).unwrap();
    for f in spectrum.forms() {
        let a = density_single(f, &tf, Scale::LogKSquared(24)).unwrap();
        let b = density_single(f, &tf, Scale::Custom(2.0 * 24f64.ln())).unwrap();
        assert_eq!(a, b);
    }
}

#[test]
fn short_expansion_is_an_error() {
    let f = delta_form(20);
    assert!(density_single(&f, &make_sinc_sq(1.0).unwrap(), Scale::LogKSquared(12)).is_err());
    assert!(density_single(&f, &make_sinc_sq(1.0).unwrap(), Scale::Custom(-1.0)).is_err());
}

#[test]
fn sym2_fourth_powers_two_routes() {
    let tau = delta_coefficients(84_000).unwrap();
    let f = delta_form(100);
    for p in [2u64, 3, 5, 7, 11, 13, 17] {
        for e in [2u32, 4] {
            let n = p.pow(e);
            let direct = tau[n as usize] as f64 / (n as f64).powf(5.5);
            let hecke = f.lambda_prime_power(p, e).unwrap();
            assert!((direct - hecke).abs() < 1e-12 * direct.abs().max(1.0), "p={p} e={e}");
        }
    }
}

#[test]
fn sym2_terms_follow_their_formula() {
    let f = delta_form(21_000);
    let tf = make_sinc_sq(0.75).unwrap();
    let l = Scale::LogKSquared(12).value();
    let s = density_single_sym2(&f, &tf, Scale::LogKSquared(12)).unwrap();
    let mut diag = 0.0;
    for p in (2u64..=41).filter(|&n| as_prime_power(n).is_some_and(|(_, e)| e == 1)) {
        let lp = (p as f64).ln();
        diag -= 2.0 / l * lp / p as f64 * tf.phi_hat(2.0 * lp / l);
    }
    assert!((s.diag - diag).abs() < 1e-14, "{} vs {diag}", s.diag);
    assert!(s.diag < 0.0);
    assert_eq!(s.higher, 0.0);
    let again = density_single_sym2(&delta_form(21_000), &tf, Scale::LogKSquared(12)).unwrap();
    assert_eq!(s, again);
}

#[test]
fn level_eleven_form_has_a_density() {
    let f = eta_product_level11(200).unwrap();
    let t = density_single(&f, &make_sinc_sq(1.0).unwrap(), Scale::LogN(11)).unwrap();
    assert!(t.total().is_finite());
    // Only p = 11 divides the level and its whole c_2 lands in lambda_p2.
    assert!(t.diag > 0.0);
}

#[test]
fn weight_routes_agree() {
    let tf = make_sinc_sq(0.5).unwrap();
    for parity in [Parity::All, Parity::Plus, Parity::Minus] {
        let spec = AveragingSpec::weight(20, SmoothWindow::default(), parity);
        let a = family_average(&spec, FamilyKind::Gl2, &tf, Route::Kernel).unwrap();
        let b = family_average(&spec, FamilyKind::Gl2, &tf, Route::Spectral).unwrap();
        assert!((a.statistic - b.statistic).abs() < 1e-10, "{parity:?}: {} vs {}", a.statistic, b.statistic);
        assert!((a.mass - b.mass).abs() < 1e-10 * b.mass);
    }
}

#[test]
fn level_routes_agree() {
    let tf = make_sinc_sq(0.5).unwrap();
    let spec = AveragingSpec::level(11, Parity::All);
    let a = family_average(&spec, FamilyKind::Gl2, &tf, Route::Kernel).unwrap();
    let b = family_average(&spec, FamilyKind::Gl2, &tf, Route::Spectral).unwrap();
    assert!((a.statistic - b.statistic).abs() < 1e-4, "{} vs {}", a.statistic, b.statistic);
    assert_eq!(b.class, SymmetryClass::O);
}

#[test]
fn weight_aspect_error_shrinks() {
    let tf = make_sinc_sq(0.5).unwrap();
    let mut prev = f64::INFINITY;
    for k in [50u64, 100, 200] {
        let r = family_average(&AveragingSpec::weight(k, SmoothWindow::default(), Parity::All), FamilyKind::Gl2, &tf, Route::Kernel).unwrap();
        assert_eq!(r.prediction, 1.5);
        let err = (r.statistic - r.prediction).abs();
        assert!(err < prev, "K={k}: {}", r.statistic);
        prev = err;
    }
}

#[test]
fn sym2_family_is_symplectic() {
    let spec = AveragingSpec::weight(20, SmoothWindow::default(), Parity::All);
    let r = family_average(&spec, FamilyKind::Sym2, &make_sinc_sq(0.5).unwrap(), Route::Spectral).unwrap();
    assert_eq!(r.class, SymmetryClass::Sp);
    assert!(r.statistic.is_finite());
    assert!(family_average(&spec, FamilyKind::Sym2, &make_sinc_sq(0.5).unwrap(), Route::Kernel).is_err());
}

#[test]
fn printed_predictions() {
    let cases = [
        (SymmetryClass::SoEven, 1.0, 7.0 / 8.0),
        (SymmetryClass::SoOdd, 1.0, 9.0 / 8.0),
        (SymmetryClass::O, 1.0, 1.0),
        (SymmetryClass::Sp, 2.0 / 3.0, 9.0 / 32.0),
    ];
    for (class, nu, want) in cases {
        let p = predict_integral(class, &make_sinc_sq(nu).unwrap()).unwrap();
        assert!((p.space - want).abs() < 1e-10, "{class} space {}", p.space);
        assert!((p.fourier - want).abs() < 1e-10, "{class} fourier {}", p.fourier);
    }
}

#[test]
fn abel_summation_links_the_traces() {
    for c in [1u64, 3, 7] {
        let plain = hyp4_sum(1, c, 2e5, false).unwrap();
        let logged = hyp4_sum(1, c, 2e5, true).unwrap();
        assert_eq!(plain.grid, logged.grid);
        for i in 0..plain.grid.len() {
            let (a, b) = ((plain.abel_re[i], plain.abel_im[i]), (logged.re[i], logged.im[i]));
            let scale = b.0.hypot(b.1).max(1.0);
            assert!((a.0 - b.0).hypot(a.1 - b.1) < 0.01 * scale, "c={c} X={}", plain.grid[i]);
        }
    }
}

#[test]
fn hyp4_arguments() {
    assert!(hyp4_sum(4, 6, 1e3, false).is_err());
    assert!(hyp4_sum(1, 0, 1e3, false).is_err());
    let t = hyp4_sum(1, 1, 1e6, false).unwrap();
    let fit = t.fit.unwrap();
    assert!(fit.exponent < 0.75 + 2.0 * fit.sigma, "{fit:?}");
    assert!(t.running_max.windows(2).all(|w| w[0] <= w[1]));
}

#[test]
fn zero_free_threshold() {
    assert!((corollary6_bound(7.0 / 6.0).unwrap() - 13.0 / 14.0).abs() < 1e-15);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn space_and_fourier_sides_agree(nu in 0.3f64..2.5) {
        let tf = make_sinc_sq(nu).unwrap();
        for class in SymmetryClass::ALL {
            let p = predict_integral(class, &tf).unwrap();
            prop_assert!(p.discrepancy() < 1e-8, "{} nu={}: {:?}", class, nu, p);
        }
    }

    #[test]
    fn even_and_odd_average_to_orthogonal(nu in 0.3f64..2.5) {
        let tf = make_sinc_sq(nu).unwrap();
        let v = |c| predict_integral(c, &tf).unwrap();
        let (e, o, full) = (v(SymmetryClass::SoEven), v(SymmetryClass::SoOdd), v(SymmetryClass::O));
        prop_assert!((e.fourier + o.fourier - 2.0 * full.fourier).abs() < 1e-10);
        prop_assert!((e.space + o.space - 2.0 * full.space).abs() < 1e-10);
    }

    #[test]
    fn recombination_for_any_support(nu in 0.05f64..1.0) {
        let f = delta_form(21_000);
        let t = density_single(&f, &make_sinc_sq(nu).unwrap(), Scale::LogKSquared(12)).unwrap();
        prop_assert_eq!(t.total().to_bits(), ((((t.arch + t.diag) + t.lambda_p) + t.lambda_p2) + t.higher).to_bits());
    }
}
