use num_complex::Complex64;
use plasmon_cascade::special::*;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// z^n sum_k (-z^2/2)^k / (k! (2n+2k+1)!!)
fn taylor_j(n: usize, z: Complex64, terms: usize) -> Complex64 {
    let mut dfact = 1.0;
    for k in 1..=n {
        dfact *= (2 * k + 1) as f64;
    }
    let mut term = z.powu(n as u32) / dfact;
    let mut sum = term;
    let q = -z * z * 0.5;
    for k in 1..terms {
        term = term * q / (k as f64 * (2 * n + 2 * k + 1) as f64);
        sum += term;
    }
    sum
}

fn rel(a: Complex64, b: Complex64) -> f64 {
    (a - b).norm() / b.norm()
}

#[test]
fn j5_against_taylor_series() {
    let z = c(2.0, 0.5);
    let oracle = taylor_j(5, z, 30);
    let got = spherical_bessel_j(5, z).unwrap();
    assert!(rel(got, oracle) < 1e-12, "{got} vs {oracle}");
}

#[test]
fn riccati_h1_matches_central_difference() {
    let z = c(4.0, 1.0);
    let h = 1e-5;
    let f = |x: Complex64| x * spherical_hankel1(3, x).unwrap();
    let fd = (f(z + h) - f(z - h)) / (2.0 * h);
    let got = riccati_derivative(3, z, Kind::H1).unwrap();
    assert!(rel(got, fd) < 1e-6, "{got} vs {fd}");
}

#[test]
fn riccati_j_closed_forms() {
    let d = riccati_derivative(0, c(2.0, 0.0), Kind::J).unwrap();
    assert!((d.re - 2f64.cos()).abs() < 1e-14 && d.im.abs() < 1e-14);
    let d = riccati_derivative(1, c(1e-8, 0.0), Kind::J).unwrap();
    assert!(d.norm() < 1e-7);
}

#[test]
fn wronskian_at_three() {
    let (n, x) = (2, 3.0);
    let z = c(x, 0.0);
    let j = |k: usize| spherical_bessel_j(k, z).unwrap();
    let y = |k: usize| spherical_bessel_y(k, z).unwrap();
    // f_n' = f_{n-1} - (n + 1) f_n / x
    let jp = j(n - 1) - j(n) * ((n + 1) as f64 / x);
    let yp = y(n - 1) - y(n) * ((n + 1) as f64 / x);
    let w = j(n) * yp - jp * y(n);
    assert!((w.re - 1.0 / (x * x)).abs() < 1e-13 && w.im.abs() < 1e-13, "{w}");
}

#[test]
fn hankel_first_order_closed_form() {
    let z = c(1.0, 0.0);
    let expected = -(c(1.0, 0.0) + c(0.0, 1.0) / z) * (c(0.0, 1.0) * z).exp() / z;
    let got = spherical_hankel1(1, z).unwrap();
    assert!(rel(got, expected) < 1e-14, "{got} vs {expected}");
    let h0 = spherical_hankel1(0, z).unwrap();
    assert!((h0 - c(1f64.sin(), -1f64.cos())).norm() < 1e-14);
}

#[test]
fn zero_argument_limits() {
    assert_eq!(spherical_bessel_j(0, c(0.0, 0.0)).unwrap(), c(1.0, 0.0));
    assert!(spherical_bessel_j(1, c(1e-300, 0.0)).unwrap().norm() < 1e-299);
    assert!(spherical_hankel1(0, c(0.0, 0.0)).is_err());
}

fn closed_j(n: usize, z: Complex64) -> Complex64 {
    let (s, co) = (z.sin(), z.cos());
    match n {
        0 => s / z,
        1 => s / (z * z) - co / z,
        _ => (3.0 / (z * z) - 1.0) * s / z - 3.0 * co / (z * z),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn low_orders_match_closed_forms(r in 1.0f64..50.0, phase in -0.3f64..0.3, n in 0usize..3) {
        let z = Complex64::from_polar(r, phase);
        let got = spherical_bessel_j(n, z).unwrap();
        let want = closed_j(n, z);
        prop_assert!(rel(got, want) < 1e-10, "n={} z={} got={} want={}", n, z, got, want);
    }

    #[test]
    fn small_arguments_match_series(r in 0.01f64..4.0, phase in -1.5f64..1.5, n in 0usize..12) {
        let z = Complex64::from_polar(r, phase);
        let got = spherical_bessel_j(n, z).unwrap();
        let want = taylor_j(n, z, 60);
        prop_assert!(rel(got, want) < 1e-11, "n={} z={} got={} want={}", n, z, got, want);
    }

    #[test]
    fn three_term_recurrence(r in 0.5f64..50.0, phase in -0.5f64..0.5, n in 1usize..30) {
        let z = Complex64::from_polar(r, phase);
        let h = hankel1_all(n + 1, z).unwrap();
        let lhs = h[n - 1] + h[n + 1];
        let rhs = h[n] * ((2 * n + 1) as f64) / z;
        prop_assert!(rel(lhs, rhs) < 1e-9);
        let j = bessel_j_all(n + 1, z).unwrap();
        let scale = j[n - 1].norm().max(j[n + 1].norm()).max(1e-300);
        let lhs = j[n - 1] + j[n + 1];
        let rhs = j[n] * ((2 * n + 1) as f64) / z;
        prop_assert!((lhs - rhs).norm() / scale < 1e-9);
    }
}
