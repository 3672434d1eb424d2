use lowlying::density::SymmetryClass;
use lowlying::rmt::{empirical_one_level, haar_orthogonal, haar_symplectic, sample_group, symplectic_residual, Group};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;

fn mean_and_se(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[test]
fn corner_entry_has_haar_mean() {
    for g in Group::ALL {
        for n in [2, 5, 12] {
            let s = sample_group(g, n, 4000, 11).unwrap();
            let (mean, se) = mean_and_se(&s.corner);
            let want = 1.0 / g.dim(n) as f64;
            assert!((mean - want).abs() < 3.0 * se, "{g} N={n}: {mean} vs {want} (se {se})");
        }
    }
}

// Moments of traces, from invariant theory: E tr M = 0, E (tr M)^2 = 1,
// E tr M^2 = +1 for orthogonal and -1 for symplectic groups.
#[test]
fn trace_moments_from_phases() {
    for g in Group::ALL {
        let s = sample_group(g, 8, 6000, 3).unwrap();
        let shift = if g == Group::SoOdd { 1.0 } else { 0.0 };
        let tr: Vec<f64> = s.phases.iter().map(|p| shift + p.iter().map(|t| 2.0 * t.cos()).sum::<f64>()).collect();
        let tr2: Vec<f64> = s.phases.iter().map(|p| shift + p.iter().map(|t| 2.0 * (2.0 * t).cos()).sum::<f64>()).collect();
        let sq: Vec<f64> = tr.iter().map(|t| t * t).collect();
        let sign = if g == Group::Usp { -1.0 } else { 1.0 };
        for (v, want, what) in [(&tr, 0.0, "tr"), (&sq, 1.0, "tr^2"), (&tr2, sign, "tr M^2")] {
            let (m, se) = mean_and_se(v);
            assert!((m - want).abs() < 4.0 * se, "{g} {what}: {m} vs {want} (se {se})");
        }
    }
}

#[test]
fn matrices_are_in_their_groups() {
    let mut rng = ChaCha12Rng::seed_from_u64(5);
    for d in [4, 7, 30] {
        let q = haar_orthogonal(d, &mut rng);
        assert!((q.determinant() - 1.0).abs() < 1e-12);
        assert!((q.transpose() * &q - nalgebra::DMatrix::<f64>::identity(d, d)).amax() < 1e-13);
    }
    for n in [2, 9] {
        let m = haar_symplectic(n, &mut rng);
        assert!(symplectic_residual(&m) < 1e-13);
        // Brute-force form check with complex products.
        let d = 2 * n;
        let j = nalgebra::DMatrix::from_fn(d, d, |a, b| {
            let v = if b == a + n { 1.0 } else if a == b + n { -1.0 } else { 0.0 };
            nalgebra::Complex::new(v, 0.0)
        });
        let r = m.transpose() * &j * &m - &j;
        assert!(r.iter().all(|z| z.norm() < 1e-13));
    }
}

#[test]
fn odd_orthogonal_fixes_a_vector() {
    let s = sample_group(Group::SoOdd, 10, 200, 8).unwrap();
    assert_eq!(s.forced_one, 200);
    assert!(s.max_residual <= 1e-10);
}

#[test]
fn thread_count_does_not_matter() {
    let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let three = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let a = one.install(|| sample_group(Group::SoEven, 6, 50, 21).unwrap());
    let b = three.install(|| sample_group(Group::SoEven, 6, 50, 21).unwrap());
    assert_eq!(a, b);
}

#[test]
fn density_shape_near_the_origin() {
    let n = 40;
    let mut h = Vec::new();
    for g in Group::ALL {
        let s = sample_group(g, n, 3000, 1).unwrap();
        h.push(empirical_one_level(&s, 0.25, 10.0).unwrap());
    }
    // SO(even) repels nothing at 0: density about 2; USp and SO(odd) vanish there.
    assert!(h[0].density[0] > 1.6, "{:?}", h[0].density[0]);
    assert!(h[1].density[0] < 0.3);
    assert!(h[2].density[0] < 0.3);
    for e in &h {
        let tail: f64 = e.density[30..].iter().sum::<f64>() / 10.0;
        assert!((tail - 1.0).abs() < 0.05, "{:?} {tail}", e.class);
        assert!(e.max_z() < 5.0, "{:?} {}", e.class, e.max_z());
    }
    let o = h[0].mix(&h[1], SymmetryClass::O).unwrap();
    assert!((o.predicted[0] - 0.5 * (h[0].predicted[0] + h[1].predicted[0])).abs() < 1e-12);
    assert!(o.max_z() < 5.0);
}

#[test]
fn predicted_bins_integrate_the_density() {
    let s = sample_group(Group::Usp, 8, 10, 0).unwrap();
    let h = empirical_one_level(&s, 0.5, 2.0).unwrap();
    // int_0^x (1 - sin(2 pi t)/(2 pi t)) dt by Simpson on a fine grid.
    for (k, p) in h.predicted.iter().enumerate() {
        let (a, b) = (h.edges[k], h.edges[k + 1]);
        let m = 2000;
        let f = |t: f64| if t == 0.0 { 0.0 } else { 1.0 - (2.0 * std::f64::consts::PI * t).sin() / (2.0 * std::f64::consts::PI * t) };
        let step = (b - a) / m as f64;
        let mut acc = f(a) + f(b);
        for i in 1..m {
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * step);
        }
        assert!((acc * step / 3.0 / (b - a) - p).abs() < 1e-10);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn same_seed_same_sample(seed in any::<u64>(), n in 2usize..6, g in 0usize..3) {
        let g = Group::ALL[g];
        let a = sample_group(g, n, 4, seed).unwrap();
        let b = sample_group(g, n, 4, seed).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert!(a.max_residual <= 1e-10);
        for p in &a.phases {
            prop_assert_eq!(p.len(), n);
            prop_assert!(p.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
