//! Boundary collocation for Dirichlet and Neumann problems, error norms on
//! interior grids, and the eigenvalue search driven by the collocation
//! matrix.

mod eigen;

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex;

pub use eigen::{
    eigen_indicator, eigen_matrix, find_eigenvalues, matrix_indicator, refine_minimum, EigenIndicator, EigenRoot,
    EigenScan, EigenSetup, DEFAULT_GRID_STEP, REFINE_TOL, ROOT_THRESHOLD,
};

use crate::error::{Error, Result};
use crate::geometry::{CollocationSet, Domain, Placement, Point2};
use crate::problems::FormalPowerBasis;
use crate::scalar::{cabs, from_usize, lit, to_f64, Real};

/// Condition estimates above this produce a warning.
pub const CONDITION_WARN: f64 = 1e13;
/// Condition estimates above this are an error.
pub const CONDITION_ERROR: f64 = 1e15;
/// Boundary points added to every error grid.
pub const BOUNDARY_ERROR_SAMPLES: usize = 512;
/// Minimum number of interior points in the default error grid.
pub const INTERIOR_ERROR_POINTS: usize = 500;
/// Normal-derivative step relative to the domain radius.
pub const NORMAL_STEP: f64 = 1e-5;

/// `B[u] = u` or `B[u] = ∂u/∂n`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BoundaryOperator {
    #[default]
    Dirichlet,
    Neumann,
}

impl BoundaryOperator {
    pub fn name(&self) -> &'static str {
        match self {
            BoundaryOperator::Dirichlet => "dirichlet",
            BoundaryOperator::Neumann => "neumann",
        }
    }
}

/// Boundary data `v(ζ, n)` at a point with its unit outward normal.
pub type BoundaryData<T> = Arc<dyn Fn(Point2<T>, Point2<T>) -> T + Send + Sync>;

/// An operator with its boundary data.
#[derive(Clone)]
pub struct BoundaryCondition<T: Real> {
    operator: BoundaryOperator,
    data: BoundaryData<T>,
    pin: Option<Arc<dyn Fn(Point2<T>) -> T + Send + Sync>>,
}

impl<T: Real> BoundaryCondition<T> {
    pub fn dirichlet(v: impl Fn(Point2<T>) -> T + Send + Sync + 'static) -> Self {
        BoundaryCondition {
            operator: BoundaryOperator::Dirichlet,
            data: Arc::new(move |z, _| v(z)),
            pin: None,
        }
    }

    /// Neumann data given as a function of the point and outward normal.
    pub fn neumann(g: impl Fn(Point2<T>, Point2<T>) -> T + Send + Sync + 'static) -> Self {
        BoundaryCondition {
            operator: BoundaryOperator::Neumann,
            data: Arc::new(g),
            pin: None,
        }
    }

    /// Neumann data `∇v · n` from a gradient `(v_x, v_y)`.
    pub fn neumann_from_gradient(grad: impl Fn(Point2<T>) -> (T, T) + Send + Sync + 'static) -> Self {
        Self::neumann(move |z, n| {
            let (gx, gy) = grad(z);
            gx * n.re + gy * n.im
        })
    }

    /// Replaces the first Neumann row by the Dirichlet row `u(ζ_0) = v(ζ_0)`.
    /// Without a pin, a pure Neumann problem with `q ≡ 0` is pinned to 0.
    pub fn with_pin(mut self, v: impl Fn(Point2<T>) -> T + Send + Sync + 'static) -> Self {
        self.pin = Some(Arc::new(v));
        self
    }

    pub fn operator(&self) -> BoundaryOperator {
        self.operator
    }

    pub fn value(&self, z: Point2<T>, normal: Point2<T>) -> T {
        (self.data)(z, normal)
    }

    /// Scales the data by `s` (the pin value too).
    pub fn scaled(&self, s: T) -> Self {
        let data = self.data.clone();
        let pin = self.pin.clone();
        BoundaryCondition {
            operator: self.operator,
            data: Arc::new(move |z, n| data(z, n) * s),
            pin: pin.map(|p| Arc::new(move |z| p(z) * s) as Arc<dyn Fn(Point2<T>) -> T + Send + Sync>),
        }
    }
}

/// `u_k(ζ_j)` for every point (rows) and basis member (columns).
pub fn boundary_values<T: Real>(basis: &FormalPowerBasis<T>, points: &[Point2<T>]) -> Result<DMatrix<Complex<T>>> {
    let vals = basis.eval_many(points)?;
    Ok(DMatrix::from_fn(points.len(), basis.len(), |j, k| vals[j][k]))
}

/// `∂u_k/∂n` at each point for every basis member. Exact mode
/// differentiates the closed forms; numeric mode uses the inward one-sided
/// stencil `(−11f₀ + 18f₁ − 9f₂ + 2f₃)/(6h)` along `−n`.
pub fn normal_derivatives<T: Real>(
    basis: &FormalPowerBasis<T>,
    points: &[Point2<T>],
    normals: &[Point2<T>],
) -> Result<DMatrix<Complex<T>>> {
    if let Some(g) = basis.gradients(points) {
        return Ok(DMatrix::from_fn(points.len(), basis.len(), |j, k| {
            let (gx, gy) = g[j][k];
            gx * normals[j].re + gy * normals[j].im
        }));
    }
    let domain = basis.domain();
    let h = domain.radius() * lit(NORMAL_STEP);
    let tol = domain.radius() * lit(1e-9);
    let mut stencil = Vec::with_capacity(points.len() * 4);
    for (z, n) in points.iter().zip(normals) {
        for s in 0..4 {
            let w = *z - *n * (h * from_usize::<T>(s));
            if s > 0 && !domain.contains_closed(w, tol) {
                return Err(Error::Geometry(format!(
                    "normal-derivative stencil leaves the domain at ({:.6}, {:.6})",
                    to_f64(z.re),
                    to_f64(z.im)
                )));
            }
            stencil.push(w);
        }
    }
    let vals = basis.eval_many(&stencil)?;
    let w: [T; 4] = [lit(-11.0), lit(18.0), lit(-9.0), lit(2.0)];
    let den = h * lit(6.0);
    Ok(DMatrix::from_fn(points.len(), basis.len(), |j, k| {
        let d = (0..4).fold(Complex::new(T::zero(), T::zero()), |a, s| a + vals[4 * j + s][k] * w[s]);
        // Derivative along −n, so the outward derivative flips the sign.
        -d / den
    }))
}

/// `∂u_k/∂n` for one basis member at one boundary point.
pub fn normal_derivative<T: Real>(basis: &FormalPowerBasis<T>, k: usize, zeta: Point2<T>, normal: Point2<T>) -> Result<T> {
    if k >= basis.len() {
        return Err(Error::InvalidArgument(format!("basis index {k} out of range")));
    }
    Ok(normal_derivatives(basis, &[zeta], &[normal])?[(0, k)].re)
}

/// The collocation system `Σ b_k B[u_k](ζ_j) = v(ζ_j)`.
#[derive(Clone)]
pub struct CollocationSystem<T: Real> {
    basis: FormalPowerBasis<T>,
    points: CollocationSet<T>,
    matrix: DMatrix<T>,
    rhs: DVector<T>,
    operator: BoundaryOperator,
    pinned: bool,
    condition: T,
    warnings: Vec<String>,
}

/// Uniform-in-arclength collocation with `m_points ≥ N + 1` points.
pub fn assemble<T: Real>(basis: &FormalPowerBasis<T>, bc: &BoundaryCondition<T>, m_points: usize) -> Result<CollocationSystem<T>> {
    let cols = basis.len();
    if m_points < cols {
        return Err(Error::Underdetermined { rows: m_points, cols });
    }
    let domain: &Domain<T> = basis.domain();
    let set = domain.collocation_points(m_points, Placement::Arclength)?;
    let values = match bc.operator {
        BoundaryOperator::Dirichlet => boundary_values(basis, &set.points)?,
        BoundaryOperator::Neumann => normal_derivatives(basis, &set.points, &set.normals)?,
    };
    let mut matrix = values.map(|v| v.re);
    let mut rhs = DVector::from_fn(m_points, |j, _| bc.value(set.points[j], set.normals[j]));
    let pinned = bc.operator == BoundaryOperator::Neumann && (bc.pin.is_some() || basis.equation().q_vanishes());
    if pinned {
        let row = boundary_values(basis, &set.points[..1])?;
        for k in 0..cols {
            matrix[(0, k)] = row[(0, k)].re;
        }
        rhs[0] = bc.pin.as_ref().map_or(T::zero(), |p| p(set.points[0]));
    }
    let mut warnings = Vec::new();
    let scan = values.iter().all(|v| v.im == T::zero());
    if !scan {
        warnings.push("basis values carry an imaginary part; only real parts are used".into());
    }
    if matrix.iter().any(|v| !v.is_finite()) || rhs.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("collocation matrix or data is not finite".into()));
    }
    let condition = condition_estimate(&matrix);
    if condition > lit(CONDITION_WARN) {
        warnings.push(format!("condition estimate {:.3e} exceeds {CONDITION_WARN:e}", to_f64(condition)));
    }
    Ok(CollocationSystem {
        basis: basis.clone(),
        points: set,
        matrix,
        rhs,
        operator: bc.operator,
        pinned,
        condition,
        warnings,
    })
}

/// Per-column maximum magnitudes used to equilibrate the matrix.
fn column_scales<T: Real>(m: &DMatrix<T>) -> Vec<T> {
    (0..m.ncols())
        .map(|k| {
            let s = m.column(k).iter().fold(T::zero(), |a, v| a.max(v.abs()));
            if s > T::zero() {
                s
            } else {
                T::one()
            }
        })
        .collect()
}

fn equilibrate<T: Real>(m: &DMatrix<T>, scales: &[T]) -> DMatrix<T> {
    DMatrix::from_fn(m.nrows(), m.ncols(), |j, k| m[(j, k)] / scales[k])
}

/// 2-norm condition number of the column-equilibrated matrix.
pub fn condition_estimate<T: Real>(m: &DMatrix<T>) -> T {
    let scaled = equilibrate(m, &column_scales(m));
    let sv = scaled.singular_values();
    let (mut lo, mut hi) = (T::max_value().unwrap_or(T::one()), T::zero());
    for s in sv.iter() {
        lo = lo.min(*s);
        hi = hi.max(*s);
    }
    if lo > T::zero() {
        hi / lo
    } else {
        T::max_value().unwrap_or(hi)
    }
}

impl<T: Real> CollocationSystem<T> {
    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn rhs(&self) -> &DVector<T> {
        &self.rhs
    }

    pub fn points(&self) -> &CollocationSet<T> {
        &self.points
    }

    pub fn basis(&self) -> &FormalPowerBasis<T> {
        &self.basis
    }

    pub fn operator(&self) -> BoundaryOperator {
        self.operator
    }

    /// Whether the first row was replaced by a Dirichlet row.
    pub fn is_pinned(&self) -> bool {
        self.pinned
    }

    /// Condition number of the column-equilibrated matrix.
    pub fn condition(&self) -> T {
        self.condition
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn is_square(&self) -> bool {
        self.matrix.nrows() == self.matrix.ncols()
    }
}

/// How the collocation system is solved.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum SolveMode {
    /// Pivoted elimination on a square system.
    #[default]
    Square,
    /// Least squares by QR factorization.
    LeastSquares,
}

impl SolveMode {
    pub fn name(&self) -> &'static str {
        match self {
            SolveMode::Square => "square",
            SolveMode::LeastSquares => "least_squares",
        }
    }
}

/// `u^N = Σ b_k u_k`.
#[derive(Clone)]
pub struct ApproximateSolution<T: Real> {
    basis: FormalPowerBasis<T>,
    coefficients: Vec<T>,
    residual: T,
    condition: T,
    warnings: Vec<String>,
}

/// Solves the collocation system; the columns are equilibrated first.
pub fn solve_bvp<T: Real>(system: &CollocationSystem<T>, mode: SolveMode) -> Result<ApproximateSolution<T>> {
    if system.condition > lit(CONDITION_ERROR) {
        return Err(Error::IllConditioned {
            estimate: to_f64(system.condition),
        });
    }
    let scales = column_scales(&system.matrix);
    let a = equilibrate(&system.matrix, &scales);
    let y = match mode {
        SolveMode::Square => {
            if !system.is_square() {
                return Err(Error::InvalidArgument(format!(
                    "square mode needs as many points as unknowns ({} × {})",
                    a.nrows(),
                    a.ncols()
                )));
            }
            a.clone().lu().solve(&system.rhs)
        }
        SolveMode::LeastSquares => {
            let qr = a.clone().qr();
            let qtb = qr.q().transpose() * &system.rhs;
            qr.r().solve_upper_triangular(&qtb)
        }
    }
    .ok_or(Error::IllConditioned {
        estimate: f64::INFINITY,
    })?;
    let coefficients: Vec<T> = y.iter().zip(&scales).map(|(v, s)| *v / *s).collect();
    let b = DVector::from_column_slice(&coefficients);
    let r = &system.matrix * &b - &system.rhs;
    let residual = r.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if coefficients.iter().any(|v| !v.is_finite()) {
        return Err(Error::IllConditioned {
            estimate: to_f64(system.condition),
        });
    }
    Ok(ApproximateSolution {
        basis: system.basis.clone(),
        coefficients,
        residual,
        condition: system.condition,
        warnings: system.warnings.clone(),
    })
}

impl<T: Real> ApproximateSolution<T> {
    pub fn coefficients(&self) -> &[T] {
        &self.coefficients
    }

    pub fn basis(&self) -> &FormalPowerBasis<T> {
        &self.basis
    }

    /// Largest `|Σ b_k B[u_k](ζ_j) − v(ζ_j)|` over the collocation points.
    pub fn residual(&self) -> T {
        self.residual
    }

    pub fn condition(&self) -> T {
        self.condition
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn eval_many(&self, points: &[Point2<T>]) -> Result<Vec<T>> {
        Ok(self
            .basis
            .eval_many(points)?
            .iter()
            .map(|row| row.iter().zip(&self.coefficients).fold(T::zero(), |a, (u, b)| a + u.re * *b))
            .collect())
    }

    pub fn eval(&self, z: Point2<T>) -> Result<T> {
        Ok(self.eval_many(&[z])?[0])
    }
}

/// At least [`INTERIOR_ERROR_POINTS`] interior lattice points.
pub fn error_grid<T: Real>(domain: &Domain<T>) -> Vec<Point2<T>> {
    domain.interior_grid_min(INTERIOR_ERROR_POINTS)
}

/// `max |u^N − exact|` over `grid` together with
/// [`BOUNDARY_ERROR_SAMPLES`] boundary points.
pub fn max_abs_error<T: Real, F>(sol: &ApproximateSolution<T>, exact: &F, grid: &[Point2<T>]) -> Result<T>
where
    F: Fn(Point2<T>) -> T + ?Sized,
{
    let mut pts = grid.to_vec();
    pts.extend(sol.basis.domain().boundary_sample(BOUNDARY_ERROR_SAMPLES));
    let vals = sol.eval_many(&pts)?;
    Ok(pts
        .iter()
        .zip(&vals)
        .map(|(z, v)| (*v - exact(*z)).abs())
        .fold(T::zero(), |a, b| a.max(b)))
}

/// `max |u_k − ũ_k|` over the points, per `k`, for two bases of equal size.
pub fn basis_disagreement<T: Real>(a: &FormalPowerBasis<T>, b: &FormalPowerBasis<T>, points: &[Point2<T>]) -> Result<Vec<T>> {
    if a.len() != b.len() {
        return Err(Error::InvalidArgument("bases differ in size".into()));
    }
    let (va, vb) = (a.eval_many(points)?, b.eval_many(points)?);
    let mut worst = vec![T::zero(); a.len()];
    for (ra, rb) in va.iter().zip(&vb) {
        for k in 0..a.len() {
            worst[k] = worst[k].max(cabs(ra[k] - rb[k]));
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{complete_system, particular_solution, BasisMode, EllipticProblem, ParticularSpec};
    use crate::quadrature::QuadratureRule;

    fn yukawa(c: f64, n: usize, mode: BasisMode) -> FormalPowerBasis<f64> {
        let disk = Domain::unit_disk();
        let ps = particular_solution(&EllipticProblem::yukawa(c), &ParticularSpec::Exponential, &disk).unwrap();
        complete_system(&ps, &disk, n, mode, &QuadratureRule::default()).unwrap()
    }

    fn harmonic(n: usize) -> FormalPowerBasis<f64> {
        let disk = Domain::unit_disk();
        let ps = particular_solution(&EllipticProblem::laplace(), &ParticularSpec::Constant, &disk).unwrap();
        complete_system(&ps, &disk, n, BasisMode::Auto, &QuadratureRule::default()).unwrap()
    }

    #[test]
    fn harmonic_matrix_shape() {
        let b = harmonic(2);
        let s = assemble(&b, &BoundaryCondition::dirichlet(|z: Point2<f64>| z.re), 3).unwrap();
        assert_eq!(s.matrix().shape(), (3, 3));
        for j in 0..3 {
            assert!((s.matrix()[(j, 0)] - 1.0).abs() < 1e-15);
        }
        let sol = solve_bvp(&s, SolveMode::Square).unwrap();
        let e = max_abs_error(&sol, &|z: Point2<f64>| z.re, &error_grid(b.domain())).unwrap();
        assert!(e < 1e-12, "{e}");
    }

    #[test]
    fn underdetermined_is_rejected() {
        let b = harmonic(4);
        assert!(matches!(
            assemble(&b, &BoundaryCondition::dirichlet(|_| 0.0), 4),
            Err(Error::Underdetermined { rows: 4, cols: 5 })
        ));
    }

    #[test]
    fn rhs_is_boundary_data() {
        let b = yukawa(1.0, 6, BasisMode::Auto);
        let s = assemble(&b, &BoundaryCondition::dirichlet(|z: Point2<f64>| z.re.exp()), 7).unwrap();
        for j in 0..7 {
            let th = 2.0 * std::f64::consts::PI * j as f64 / 7.0;
            assert!((s.rhs()[j] - th.cos().exp()).abs() < 1e-12);
        }
    }

    #[test]
    fn generator_data_recovers_unit_vector() {
        let b = yukawa(1.0, 10, BasisMode::Auto);
        let s = assemble(&b, &BoundaryCondition::dirichlet(|z: Point2<f64>| z.im.exp()), 11).unwrap();
        let sol = solve_bvp(&s, SolveMode::Square).unwrap();
        assert!((sol.coefficients()[0] - 1.0).abs() < 1e-12);
        for v in &sol.coefficients()[1..] {
            assert!(v.abs() < 1e-12);
        }
        assert!(sol.residual() < 1e-12);
        let e = max_abs_error(&sol, &|z: Point2<f64>| z.im.exp(), &error_grid(b.domain())).unwrap();
        assert!(e < 1e-12);
    }

    #[test]
    fn low_order_yukawa_coefficients() {
        let c = 1.0;
        let b = yukawa(c, 34, BasisMode::Auto);
        let s = assemble(&b, &BoundaryCondition::dirichlet(move |z: Point2<f64>| (c * z.re).exp()), 35).unwrap();
        let sol = solve_bvp(&s, SolveMode::Square).unwrap();
        let want = [1.0, c, c, c * c / 2.0, c * c / 2.0];
        for (k, w) in want.iter().enumerate() {
            assert!((sol.coefficients()[k] - w).abs() < 1e-10, "k={k} {}", sol.coefficients()[k]);
        }
    }

    #[test]
    fn least_squares_agrees_with_square() {
        let b = yukawa(1.0, 14, BasisMode::Auto);
        let bc = BoundaryCondition::dirichlet(|z: Point2<f64>| z.re.exp());
        let sq = solve_bvp(&assemble(&b, &bc, 15).unwrap(), SolveMode::Square).unwrap();
        let ls = solve_bvp(&assemble(&b, &bc, 30).unwrap(), SolveMode::LeastSquares).unwrap();
        let grid = error_grid(b.domain());
        let e1 = max_abs_error(&sq, &|z: Point2<f64>| z.re.exp(), &grid).unwrap();
        let e2 = max_abs_error(&ls, &|z: Point2<f64>| z.re.exp(), &grid).unwrap();
        assert!(e1 < 1e-4 && e2 < 1e-4, "{e1} {e2}");
        assert!(solve_bvp(&assemble(&b, &bc, 30).unwrap(), SolveMode::Square).is_err());
    }

    #[test]
    fn normal_derivative_examples() {
        let h = harmonic(2);
        let one = Complex::new(1.0, 0.0);
        assert!((normal_derivative(&h, 1, one, one).unwrap() - 1.0).abs() < 1e-14);
        let y = yukawa(1.0, 4, BasisMode::Exact);
        let top = Complex::new(0.0, 1.0);
        assert!((normal_derivative(&y, 0, top, top).unwrap() - std::f64::consts::E).abs() < 1e-13);
    }

    #[test]
    fn numeric_normal_derivative_matches_closed_form() {
        let exact = yukawa(1.0, 4, BasisMode::Exact);
        let numeric = yukawa(1.0, 4, BasisMode::Numeric);
        let set = exact.domain().collocation_points(16, Placement::Arclength).unwrap();
        let a = normal_derivatives(&exact, &set.points, &set.normals).unwrap();
        let b = normal_derivatives(&numeric, &set.points, &set.normals).unwrap();
        for j in 0..16 {
            assert!((a[(j, 3)] - b[(j, 3)]).norm() < 1e-6, "j={j}");
        }
    }

    #[test]
    fn neumann_matches_dirichlet() {
        let c = 1.0;
        let b = yukawa(c, 20, BasisMode::Auto);
        let u = move |z: Point2<f64>| (c * z.re).exp();
        let d = solve_bvp(&assemble(&b, &BoundaryCondition::dirichlet(u), 21).unwrap(), SolveMode::Square).unwrap();
        let bc = BoundaryCondition::neumann_from_gradient(move |z: Point2<f64>| (c * (c * z.re).exp(), 0.0)).with_pin(u);
        let s = assemble(&b, &bc, 21).unwrap();
        assert!(s.is_pinned());
        let n = solve_bvp(&s, SolveMode::Square).unwrap();
        let grid = error_grid(b.domain());
        let (vd, vn) = (d.eval_many(&grid).unwrap(), n.eval_many(&grid).unwrap());
        let diff = vd.iter().zip(&vn).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-6, "{diff}");
    }

    #[test]
    fn pure_neumann_harmonic_is_pinned() {
        let b = harmonic(6);
        let bc = BoundaryCondition::neumann_from_gradient(|_| (1.0, 0.0));
        let s = assemble(&b, &bc, 7).unwrap();
        assert!(s.is_pinned());
        let sol = solve_bvp(&s, SolveMode::Square).unwrap();
        // Pinned to zero at ζ₀ = (1, 0): u = x − 1.
        let e = max_abs_error(&sol, &|z: Point2<f64>| z.re - 1.0, &error_grid(b.domain())).unwrap();
        assert!(e < 1e-9, "{e}");
    }

    #[test]
    fn scaling_the_data_scales_the_solution() {
        let b = yukawa(1.0, 12, BasisMode::Auto);
        let bc = BoundaryCondition::dirichlet(|z: Point2<f64>| (z.re * z.im).cos());
        let s1 = solve_bvp(&assemble(&b, &bc, 13).unwrap(), SolveMode::Square).unwrap();
        // Powers of two scale floating-point values exactly.
        let s2 = solve_bvp(&assemble(&b, &bc.scaled(8.0), 13).unwrap(), SolveMode::Square).unwrap();
        for (a, b) in s1.coefficients().iter().zip(s2.coefficients()) {
            assert_eq!(a * 8.0, *b);
        }
    }
}
