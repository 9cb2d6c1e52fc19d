mod common;

use common::{bessel_j_integral, bessel_j_series, bessel_zeros, disk_lambdas};

#[test]
fn series_and_integral_routes_agree() {
    for n in 0..6 {
        for k in 0..40 {
            let x = 0.1 + 0.3 * k as f64;
            let (a, b) = (bessel_j_series(n, x), bessel_j_integral(n, x));
            assert!((a - b).abs() < 1e-12, "n={n} x={x}: {a} vs {b}");
        }
    }
}

#[test]
fn three_term_recurrence() {
    for n in 1..6 {
        for x in [0.7, 2.3, 5.9, 9.4] {
            let lhs = bessel_j_series(n - 1, x) + bessel_j_series(n + 1, x);
            let rhs = 2.0 * f64::from(n) / x * bessel_j_series(n, x);
            assert!((lhs - rhs).abs() < 1e-13);
        }
    }
}

#[test]
fn zeros_are_roots_of_the_independent_route() {
    for n in 0..5 {
        for z in bessel_zeros(n, 10.0) {
            assert!(bessel_j_series(n, z).abs() < 1e-12, "n={n} z={z}");
            assert!(bessel_j_integral(n, z).abs() < 1e-12, "n={n} z={z}");
        }
    }
}

#[test]
fn large_zeros_follow_mcmahon() {
    // j_{0,k} ≈ β + 1/(8β) with β = (k − 1/4)π.
    let zeros = bessel_zeros(0, 40.0);
    for (i, z) in zeros.iter().enumerate().skip(6) {
        let beta = (i as f64 + 0.75) * std::f64::consts::PI;
        assert!((z - (beta + 1.0 / (8.0 * beta))).abs() < 1e-4, "k={}", i + 1);
    }
}

#[test]
fn first_disk_roots_match_five_digit_values() {
    let l = disk_lambdas(7.5);
    let five = [2.40483, 3.83171, 5.13562, 5.52008, 6.38016];
    for (got, want) in l.iter().zip(five) {
        assert!((got - want).abs() < 6e-6, "{got} vs {want}");
    }
    assert!(disk_lambdas(2.4).is_empty());
}
