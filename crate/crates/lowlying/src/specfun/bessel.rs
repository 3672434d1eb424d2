//! Bessel functions of the first kind and integer order.
//!
//! All orders at a fixed argument come from one downward (Miller) recurrence.
//! The recurrence is normalised by the Neumann identity
//! `J_0 + 2 sum J_{2k} = 1` for small arguments and by matching `J_0, J_1`
//! from the Hankel asymptotics for large ones.

use std::f64::consts::{FRAC_PI_4, PI};

const HANKEL_SWITCH: f64 = 25.0;

/// `J_0` and `J_1` from the Hankel asymptotic expansion, `x >= 25`.
fn j0_j1_asymptotic(x: f64) -> (f64, f64) {
    let pq = |mu: f64| {
        let z8 = 8.0 * x;
        let (mut p, mut q) = (1.0, 0.0);
        let mut term = 1.0;
        let mut k = 1;
        loop {
            let a = (2 * k - 1) as f64;
            term *= (mu - a * a) / (k as f64 * z8);
            if k % 2 == 1 {
                q += term * if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            } else {
                p += term * if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
            }
            if term.abs() < 1e-17 || k > 40 {
                break;
            }
            k += 1;
        }
        (p, q)
    };
    let s = (2.0 / (PI * x)).sqrt();
    let (p0, q0) = pq(0.0);
    let (p1, q1) = pq(4.0);
    let chi0 = x - FRAC_PI_4;
    let chi1 = x - 3.0 * FRAC_PI_4;
    (
        s * (p0 * chi0.cos() - q0 * chi0.sin()),
        s * (p1 * chi1.cos() - q1 * chi1.sin()),
    )
}

fn power_series(n: u32, x: f64) -> f64 {
    let h = 0.5 * x;
    let mut term = 1.0;
    for k in 1..=n {
        term *= h / k as f64;
    }
    let mut sum = term;
    let mut m = 1.0;
    loop {
        term *= -h * h / (m * (m + n as f64));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || m > 200.0 {
            break;
        }
        m += 1.0;
    }
    sum
}

/// `J_0(x), ..., J_nmax(x)` for `x >= 0`.
pub fn bessel_j_all(nmax: usize, x: f64) -> Vec<f64> {
    let mut out = vec![0.0; nmax + 1];
    if x == 0.0 {
        out[0] = 1.0;
        return out;
    }
    let top = nmax.max(x.ceil() as usize);
    let start = top + 20 + (6.0 * (top as f64).cbrt()) as usize + ((40 * top) as f64).sqrt() as usize;
    let start = start + (start % 2);
    const BIG: f64 = 1e250;
    let mut next = 0.0;
    let mut cur = 1.0;
    let mut neumann = 0.0;
    for k in (1..=start).rev() {
        let prev = 2.0 * k as f64 / x * cur - next;
        next = cur;
        cur = prev;
        let order = k - 1;
        if order <= nmax {
            out[order] = cur;
        }
        if order % 2 == 0 && order > 0 {
            neumann += cur;
        }
        if cur.abs() > BIG {
            cur /= BIG;
            next /= BIG;
            neumann /= BIG;
            for v in out.iter_mut() {
                *v /= BIG;
            }
        }
    }
    // cur is J_0, next is J_1, up to a common scale.
    let scale = if x < HANKEL_SWITCH {
        1.0 / (cur + 2.0 * neumann)
    } else {
        let (j0, j1) = j0_j1_asymptotic(x);
        // cur may be near BIG, so its square is out of range.
        let r = cur.hypot(next);
        (j0 * (cur / r) + j1 * (next / r)) / r
    };
    for v in out.iter_mut() {
        *v *= scale;
    }
    out
}

/// `J_n(x)` for `x >= 0`.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    assert!(x >= 0.0 && x.is_finite(), "bessel_j needs a finite x >= 0");
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    if x * x < 0.04 * (n as f64 + 1.0) {
        return power_series(n, x);
    }
    if x > 2.0 * n as f64 + 50.0 {
        // Upward recurrence is stable below the turning point.
        let (j0, j1) = if x >= HANKEL_SWITCH {
            j0_j1_asymptotic(x)
        } else {
            let v = bessel_j_all(1, x);
            (v[0], v[1])
        };
        if n == 0 {
            return j0;
        }
        let (mut a, mut b) = (j0, j1);
        for k in 1..n {
            let c = 2.0 * k as f64 / x * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    bessel_j_all(n as usize, x)[n as usize]
}

/// Upper bound `min(1, (x/2)^n / n!)` for `|J_n(x)|`.
pub fn bessel_small_argument_bound(n: u32, x: f64) -> f64 {
    let mut log = n as f64 * (0.5 * x).ln();
    for k in 2..=n {
        log -= (k as f64).ln();
    }
    log.exp().min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `(1/pi) int_0^pi cos(n t - x sin t) dt` by the trapezoid rule, which is
    /// spectrally accurate for this periodic integrand.
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 2 * (n as usize + x as usize + 64);
        let h = PI / m as f64;
        let mut s = 0.5 * (1.0 + (n as f64 * PI).cos());
        for j in 1..m {
            let t = j as f64 * h;
            s += (n as f64 * t - x * t.sin()).cos();
        }
        s * h / PI
    }

    #[test]
    fn trivial_values() {
        assert_eq!(bessel_j(1, 0.0), 0.0);
        assert_eq!(bessel_j(0, 0.0), 1.0);
    }

    #[test]
    fn matches_integral_representation() {
        for &n in &[0u32, 1, 2, 5, 11, 23, 39, 100, 399, 800] {
            for &x in &[0.3, 1.0, 7.5, 24.9, 25.1, 60.0, 180.0, 411.0, 1000.0] {
                let v = bessel_j(n, x);
                let o = integral_oracle(n, x);
                let env = (2.0 / (PI * x.max(n as f64 + 1.0))).sqrt();
                assert!((v - o).abs() < 1e-12 * env.max(o.abs()), "n={n} x={x}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn known_values() {
        // Values from standard tables.
        assert!((bessel_j(0, 1.0) - 0.765_197_686_557_966_6).abs() < 1e-15);
        assert!((bessel_j(1, 10.0) - 0.043_472_746_168_861_44).abs() < 1e-15);
    }

    #[test]
    fn all_orders_agree_with_single() {
        let x = 321.7;
        let all = bessel_j_all(900, x);
        for n in [0usize, 1, 50, 320, 322, 500, 900] {
            assert!((all[n] - bessel_j(n as u32, x)).abs() < 1e-13, "n={n}");
        }
    }

    #[test]
    fn long_recurrence_keeps_its_scale() {
        // Order far past the argument: the recurrence passes through the
        // rescaling step before it reaches J_0.
        for x in [50.0, 200.0, 400.0] {
            let all = bessel_j_all(3 * x as usize, x);
            for n in [0u32, 7, x as u32, 2 * x as u32] {
                let o = integral_oracle(n, x);
                assert!((all[n as usize] - o).abs() < 1e-12, "x={x} n={n}: {} vs {o}", all[n as usize]);
            }
        }
    }
}
