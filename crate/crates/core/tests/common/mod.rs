//! Shared helpers for the integration tests: an independent Bessel-zero
//! oracle and small problem builders.
#![allow(dead_code)]

use std::f64::consts::PI;

use formal_powers::geometry::{Domain, Point2};
use formal_powers::problems::{complete_system, particular_solution, BasisMode, EllipticProblem, FormalPowerBasis, ParticularSpec, ProfileInit};
use formal_powers::quadrature::QuadratureRule;
use formal_powers::solver::{assemble, error_grid, max_abs_error, solve_bvp, ApproximateSolution, BoundaryCondition, SolveMode};

/// `J_n(x)` from the power series. Cancellation costs digits beyond `x ≈ 10`.
pub fn bessel_j_series(n: u32, x: f64) -> f64 {
    let half = x / 2.0;
    let mut term = half.powi(n as i32) / (1..=n).map(f64::from).product::<f64>();
    let mut sum = term;
    for k in 1..200u32 {
        term *= -half * half / (f64::from(k) * f64::from(k + n));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) && k > 5 {
            break;
        }
    }
    sum
}

/// `J_n(x) = (1/2π) ∫₀^{2π} cos(nτ − x sin τ) dτ` by the trapezoidal rule,
/// which converges geometrically for this periodic integrand.
pub fn bessel_j_integral(n: u32, x: f64) -> f64 {
    let m = 256;
    (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            (f64::from(n) * t - x * t.sin()).cos()
        })
        .sum::<f64>()
        / m as f64
}

/// Series below `x = 8`, where the trapezoid sum only has absolute accuracy
/// and tiny high-order values would be noise; integral above it.
pub fn bessel_j(n: u32, x: f64) -> f64 {
    if x < 8.0 {
        bessel_j_series(n, x)
    } else {
        bessel_j_integral(n, x)
    }
}

/// Zeros of `J_n` in `(0, x_max)`: sign changes on a 0.05 lattice refined by
/// bisection.
pub fn bessel_zeros(n: u32, x_max: f64) -> Vec<f64> {
    let step = 0.05;
    let mut out = Vec::new();
    let mut a = 0.5 * step;
    while a < x_max {
        let b = (a + step).min(x_max);
        let (fa, fb) = (bessel_j(n, a), bessel_j(n, b));
        if fa == 0.0 {
            out.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            while hi - lo > 1e-14 {
                let mid = 0.5 * (lo + hi);
                let fm = bessel_j(n, mid);
                if fm * flo <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            out.push(0.5 * (lo + hi));
        }
        a = b;
    }
    out
}

/// Distinct Dirichlet eigenvalue roots `λ` of the unit disk (zeros of all
/// `J_n`) below `x_max`, ascending.
pub fn disk_lambdas(x_max: f64) -> Vec<f64> {
    let mut all: Vec<f64> = (0..12).flat_map(|n| bessel_zeros(n, x_max)).collect();
    all.sort_by(|a, b| a.partial_cmp(b).unwrap());
    all
}

/// `u = exp(e^{y/2} cos(x/2))`, an exact solution of `(−Δ + e^y/4)u = 0`.
pub fn second_example_exact(z: Point2<f64>) -> f64 {
    ((z.im / 2.0).exp() * (z.re / 2.0).cos()).exp()
}

pub fn yukawa_basis(domain: &Domain<f64>, c: f64, n: usize, mode: BasisMode) -> FormalPowerBasis<f64> {
    let ps = particular_solution(&EllipticProblem::yukawa(c), &ParticularSpec::Exponential, domain).unwrap();
    complete_system(&ps, domain, n, mode, &QuadratureRule::default()).unwrap()
}

pub fn second_example_basis(domain: &Domain<f64>, n: usize) -> FormalPowerBasis<f64> {
    let eq = EllipticProblem::schrodinger_y(|y: f64| y.exp() / 4.0);
    let spec = ParticularSpec::Product {
        lambda: 0.0,
        init: ProfileInit::Default,
    };
    let ps = particular_solution(&eq, &spec, domain).unwrap();
    complete_system(&ps, domain, n, BasisMode::Auto, &QuadratureRule::default()).unwrap()
}

/// Square Dirichlet collocation with `exact` as boundary data; returns the
/// solution and its maximum error on the default grid.
pub fn dirichlet_run<F>(basis: &FormalPowerBasis<f64>, exact: F) -> (ApproximateSolution<f64>, f64)
where
    F: Fn(Point2<f64>) -> f64 + Send + Sync + Clone + 'static,
{
    let sys = assemble(basis, &BoundaryCondition::dirichlet(exact.clone()), basis.len()).unwrap();
    let sol = solve_bvp(&sys, SolveMode::Square).unwrap();
    let err = max_abs_error(&sol, &exact, &error_grid(basis.domain())).unwrap();
    (sol, err)
}

/// `⌈k/2⌉!`, the factorial weight of `u_k` in expansions.
pub fn factorial_weight(k: usize) -> f64 {
    (1..=k.div_ceil(2)).map(|i| i as f64).product()
}
