mod common;

use common::disk_lambdas;
use formal_powers::geometry::Domain;
use formal_powers::problems::{BasisMode, EllipticProblem};
use formal_powers::solver::{eigen_matrix, find_eigenvalues, EigenSetup, DEFAULT_GRID_STEP};

fn setup(n: usize) -> EigenSetup<f64> {
    EigenSetup::new(EllipticProblem::laplace(), Domain::unit_disk(), n)
}

#[test]
fn exact_and_ray_matrices_agree() {
    let ray = setup(21);
    let exact = setup(21).with_mode(BasisMode::Exact);
    for l in [2.0, 3.1, 4.4, 5.7, 6.9] {
        let (a, b) = (eigen_matrix(&ray, l).unwrap(), eigen_matrix(&exact, l).unwrap());
        for j in 0..a.ncols() {
            let scale = a.column(j).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            let diff = (a.column(j) - b.column(j)).iter().fold(0.0f64, |m, v| m.max(v.norm()));
            assert!(diff <= 1e-8 * scale.max(1.0), "λ={l} column {j}: {diff} vs {scale}");
        }
    }
}

#[test]
fn no_roots_below_the_first_bessel_zero() {
    assert!(disk_lambdas(1.0).is_empty());
    let scan = find_eigenvalues(&setup(23), (0.1, 1.0), DEFAULT_GRID_STEP, None).unwrap();
    assert!(scan.roots.is_empty(), "{:?}", scan.lambdas());
}

#[test]
fn first_four_disk_roots() {
    let mut want = disk_lambdas(5.6);
    want.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
    assert_eq!(want.len(), 4);
    let scan = find_eigenvalues(&setup(21), (2.0, 5.6), DEFAULT_GRID_STEP, Some(4)).unwrap();
    let got = scan.lambdas();
    assert_eq!(got.len(), 4, "{got:?}");
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 5e-4, "{g} vs {w}");
    }
    for r in &scan.roots {
        assert!(r.prominence < 1e-2);
        assert!((r.eigenvalue() - r.lambda * r.lambda).abs() == 0.0);
    }
}
