use std::f64::consts::PI;
use std::sync::LazyLock;

use lowlying::specfun::*;
use num_complex::Complex64;
use proptest::prelude::*;

static VH: LazyLock<VhTransform> = LazyLock::new(|| VhTransform::new(SmoothWindow::default()));

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn frozen_bessel_values() {
    // 30-digit reference values.
    let cases = [
        (5u32, 10.0, -0.234_061_528_186_793_64),
        (100, 100.0, 0.096_366_673_295_861_56),
        (1000, 800.0, 5.730_614_915_324_174e-43),
        (3, 2000.0, -0.016_384_305_466_237_57),
    ];
    for (n, x, want) in cases {
        let got = bessel_j(n, x);
        assert!(rel(got, want) < 1e-12, "J_{n}({x}) = {got}, want {want}");
    }
}

#[test]
fn frozen_gamma_values() {
    assert!((digamma(1.0) + 0.577_215_664_901_532_9).abs() < 1e-14);
    assert!((digamma(0.5) + 1.963_510_026_021_423_5).abs() < 1e-14);
    assert!((digamma(7.25) - 1.910_453_526_883_736).abs() < 1e-14);
    let g = ln_gamma(Complex64::new(3.0, 4.0));
    assert!((g.re + 1.756_626_784_603_784).abs() < 1e-13);
    assert!((g.im - 4.742_664_438_034_658).abs() < 1e-13);
}

#[test]
fn vh_at_zero() {
    let vh = &*VH;
    let want = (2.0 / PI).sqrt() * vh.window().hhat0();
    assert!((vh.eval(0.0) - want).norm() < 1e-8 * want);
    assert!((vh.interpolate(0.0) - want).norm() < 1e-8 * want);
}

#[test]
fn series_residuals_vanish_for_large_windows() {
    let vh = &*VH;
    for kind in [SeriesKind::Residue(1), SeriesKind::Residue(3), SeriesKind::Alternating] {
        for ratio in [0.5, 1.0, 2.0] {
            let mut last = f64::INFINITY;
            for l in [400.0, 1600.0] {
                // Largest residual over one period of the oscillating term.
                let worst = (0..16)
                    .map(|j| {
                        let x = ratio * l + 2.0 * PI * j as f64 / 16.0;
                        bessel_series_check(vh, kind, l, x).unwrap().residual.abs()
                    })
                    .fold(0.0, f64::max);
                assert!(worst < last / 16.0, "{kind:?} x/L={ratio} L={l}: {worst:e} after {last:e}");
                last = worst;
            }
            assert!(last < 1e-6, "{kind:?} x/L={ratio}: {last:e}");
        }
    }
}

#[test]
fn vh_term_negligible_for_small_arguments() {
    // x = L^{2 - delta} with delta = 1: the argument L/2 of V_h grows with L.
    let vh = &*VH;
    let h0 = vh.window().hhat0();
    let mut last = f64::INFINITY;
    for l in [100.0f64, 200.0, 400.0, 800.0, 1600.0] {
        let worst = (0..16).map(|j| vh_oscillatory_term(vh, l, l + 0.4 * j as f64).abs()).fold(0.0, f64::max);
        assert!(worst < last, "L={l}: {worst:e}");
        if l >= 1600.0 {
            assert!(worst < 1e-8 * h0, "L={l}: {worst:e}");
        }
        last = worst;
    }
}

#[test]
fn series_check_rejects_bad_input() {
    let vh = &*VH;
    assert!(bessel_series_check(vh, SeriesKind::Residue(2), 50.0, 10.0).is_err());
    assert!(bessel_series_check(vh, SeriesKind::Residue(1), 5.0, 10.0).is_err());
    assert!(bessel_series_check(vh, SeriesKind::Residue(1), 50.0, f64::NAN).is_err());
}

#[test]
fn sinc_squared_pair() {
    for nu in [0.25, 0.5, 1.0] {
        let f = make_sinc_sq(nu).unwrap();
        for x in [0.0, 0.1, 0.37, 1.3] {
            let back = testfn::fourier_inverse(&f, x).unwrap();
            assert!((back - f.phi(x)).abs() < 1e-10, "nu={nu} x={x}");
        }
        assert!((f.integral() - 0.5 / nu).abs() < 1e-15);
    }
    assert!("sinc2:0".parse::<TestFunctionSpec>().is_err());
    assert!("gauss:1".parse::<TestFunctionSpec>().is_err());
}

proptest! {
    #[test]
    fn bessel_three_term_recurrence(n in 1u32..1500, x in 0.5f64..5000.0) {
        let (a, b, c) = (bessel_j(n - 1, x), bessel_j(n, x), bessel_j(n + 1, x));
        let scale = a.abs().max(b.abs()).max(c.abs());
        prop_assume!(scale > 1e-250);
        prop_assert!((a + c - 2.0 * n as f64 / x * b).abs() <= 1e-10 * scale * (1.0 + 2.0 * n as f64 / x));
    }

    #[test]
    fn bessel_all_orders_agree(x in 1.0f64..600.0, n in 0usize..900) {
        let all = bessel_j_all(900, x);
        let one = bessel_j(n as u32, x);
        prop_assert!((all[n] - one).abs() <= 1e-13 + 1e-11 * one.abs());
    }

    #[test]
    fn digamma_recurrence(x in 0.05f64..200.0) {
        prop_assert!((digamma(x + 1.0) - digamma(x) - 1.0 / x).abs() < 1e-12 * (1.0 + 1.0 / x));
    }

    #[test]
    fn vh_grid_matches_adaptive(xi in 0.0f64..1200.0) {
        let a = VH.interpolate(xi);
        let b = VH.eval_adaptive(xi, 1e-12).unwrap();
        prop_assert!((a - b).norm() < 1e-9);
    }
}
