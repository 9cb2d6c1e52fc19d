use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::boundary_values;
use crate::error::{Error, Result};
use crate::geometry::{Domain, Placement};
use crate::problems::{complete_system, particular_solution, BasisMode, EllipticProblem, ParticularSpec, ProfileInit};
use crate::quadrature::QuadratureRule;
use crate::scalar::{cabs, from_usize, lit, to_f64, Real};

/// Default spacing of the λ scan.
pub const DEFAULT_GRID_STEP: f64 = 0.01;
/// A refined minimum is a root when the indicator there falls below this
/// fraction of the smaller bracketing grid value.
pub const ROOT_THRESHOLD: f64 = 1e-2;
/// Bracket width at which golden-section refinement stops.
pub const REFINE_TOL: f64 = 1e-10;

/// Everything fixed while λ varies: `(Δ + λ² − V(y))u = 0` on `domain`
/// with `N + 1` basis functions and as many collocation points.
#[derive(Clone)]
pub struct EigenSetup<T: Real> {
    pub problem: EllipticProblem<T>,
    pub domain: Domain<T>,
    pub n: usize,
    pub init: ProfileInit<T>,
    pub mode: BasisMode,
    pub rule: QuadratureRule,
}

impl<T: Real> EigenSetup<T> {
    /// Numeric (ray) basis, default profile and quadrature.
    pub fn new(problem: EllipticProblem<T>, domain: Domain<T>, n: usize) -> Self {
        EigenSetup {
            problem,
            domain,
            n,
            init: ProfileInit::Default,
            mode: BasisMode::Numeric,
            rule: QuadratureRule::default(),
        }
    }

    pub fn with_mode(mut self, mode: BasisMode) -> Self {
        self.mode = mode;
        self
    }
}

/// `U(λ) = (u_k(ζ_j))` for the basis built from `u0 = e^{iλx}h(y)`.
pub fn eigen_matrix<T: Real>(setup: &EigenSetup<T>, lambda: T) -> Result<DMatrix<Complex<T>>> {
    if !(lambda > T::zero()) {
        return Err(Error::InvalidArgument("λ must be positive".into()));
    }
    let spec = ParticularSpec::Eigen {
        lambda,
        init: setup.init,
    };
    let ps = particular_solution(&setup.problem, &spec, &setup.domain)?;
    let basis = complete_system(&ps, &setup.domain, setup.n, setup.mode, &setup.rule)?;
    let pts = setup.domain.collocation_points(setup.n + 1, Placement::Arclength)?;
    boundary_values(&basis, &pts.points)
}

/// Indicator values at one λ.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenIndicator<T: Real> {
    /// Smallest singular value of the row-normalized matrix.
    pub sigma_min: T,
    /// `log |det U(λ)|` of the raw matrix.
    pub log_abs_det: T,
}

/// Scales each row to unit maximum magnitude and returns the smallest
/// singular value.
pub fn matrix_indicator<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let mut a = m.clone();
    for mut row in a.row_iter_mut() {
        let s = row.iter().fold(T::zero(), |acc, v| acc.max(cabs(*v)));
        if s > T::zero() {
            let inv = Complex::new(T::one() / s, T::zero());
            for v in row.iter_mut() {
                *v *= inv;
            }
        }
    }
    a.singular_values()
        .iter()
        .fold(T::max_value().unwrap_or(T::one()), |acc, v| acc.min(*v))
}

fn log_abs_det<T: Real>(m: &DMatrix<Complex<T>>) -> T {
    let u = m.clone().lu().u();
    (0..u.nrows()).fold(T::zero(), |acc, i| acc + cabs(u[(i, i)]).ln())
}

pub fn eigen_indicator<T: Real>(setup: &EigenSetup<T>, lambda: T) -> Result<EigenIndicator<T>> {
    let m = eigen_matrix(setup, lambda)?;
    Ok(EigenIndicator {
        sigma_min: matrix_indicator(&m),
        log_abs_det: log_abs_det(&m),
    })
}

/// Golden-section search for a minimum of `f` on `[a, b]`, stopping when
/// the bracket is narrower than `tol`. Returns `(x, f(x))`.
pub fn refine_minimum<T: Real, F>(f: F, a: T, b: T, tol: T) -> Result<(T, T)>
where
    F: Fn(T) -> Result<T>,
{
    let g: T = (lit::<T>(5.0).sqrt() - T::one()) * lit(0.5);
    let (mut lo, mut hi) = (a.min(b), a.max(b));
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1)?, f(x2)?);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2)?;
        }
        if x1 == x2 {
            break;
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// A refined indicator minimum accepted as a root.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EigenRoot<T: Real> {
    pub lambda: T,
    pub indicator: T,
    /// Indicator at λ* over the smaller bracketing grid value.
    pub prominence: T,
    /// Final golden-section bracket width.
    pub width: T,
}

impl<T: Real> EigenRoot<T> {
    /// The eigenvalue `λ*²` of `−Δ + V`.
    pub fn eigenvalue(&self) -> T {
        self.lambda * self.lambda
    }
}

/// Result of a λ scan.
#[derive(Clone, Debug)]
pub struct EigenScan<T: Real> {
    pub n: usize,
    pub lambda_grid: Vec<T>,
    /// Indicator per grid point; `None` where the basis could not be built.
    pub indicator: Vec<Option<T>>,
    pub roots: Vec<EigenRoot<T>>,
    /// Grid points skipped after a positivity failure, with the message.
    pub skipped: Vec<(T, String)>,
}

impl<T: Real> EigenScan<T> {
    pub fn lambdas(&self) -> Vec<T> {
        self.roots.iter().map(|r| r.lambda).collect()
    }
}

/// Scans `σ_min(λ)` over `range` at `grid_step`, refines every local
/// minimum of the grid values by golden section and keeps those whose
/// prominence is below [`ROOT_THRESHOLD`]. With `k_wanted` only the first
/// roots are returned.
pub fn find_eigenvalues<T: Real>(
    setup: &EigenSetup<T>,
    range: (T, T),
    grid_step: T,
    k_wanted: Option<usize>,
) -> Result<EigenScan<T>> {
    let (a, b) = range;
    if !(a > T::zero()) || !(b > a) || !(grid_step > T::zero()) {
        return Err(Error::InvalidArgument(
            "λ range must be positive and increasing with a positive step".into(),
        ));
    }
    let count = to_f64((b - a) / grid_step + lit(1e-9)).floor() as usize + 1;
    let grid: Vec<T> = (0..count).map(|k| a + grid_step * from_usize::<T>(k)).collect();
    let evals: Vec<Result<T>> = grid
        .par_iter()
        .map(|&l| eigen_matrix(setup, l).map(|m| matrix_indicator(&m)))
        .collect();
    let mut indicator = Vec::with_capacity(count);
    let mut skipped = Vec::new();
    for (l, r) in grid.iter().zip(evals) {
        match r {
            Ok(v) => indicator.push(Some(v)),
            Err(e @ Error::Positivity { .. }) => {
                skipped.push((*l, e.to_string()));
                indicator.push(None);
            }
            Err(e) => return Err(e),
        }
    }
    let brackets: Vec<usize> = (1..count.saturating_sub(1))
        .filter(|&i| match (indicator[i - 1], indicator[i], indicator[i + 1]) {
            (Some(l), Some(m), Some(r)) => m < l && m <= r,
            _ => false,
        })
        .collect();
    let refined: Vec<Result<Option<EigenRoot<T>>>> = brackets
        .par_iter()
        .map(|&i| {
            let f = |l: T| eigen_matrix(setup, l).map(|m| matrix_indicator(&m));
            let (lo, hi) = (grid[i - 1], grid[i + 1]);
            let (x, fx) = refine_minimum(f, lo, hi, lit(REFINE_TOL))?;
            let side = indicator[i - 1]
                .unwrap_or(T::one())
                .min(indicator[i + 1].unwrap_or(T::one()));
            let prominence = fx / side;
            Ok((prominence < lit(ROOT_THRESHOLD)).then_some(EigenRoot {
                lambda: x,
                indicator: fx,
                prominence,
                width: lit(REFINE_TOL),
            }))
        })
        .collect();
    let mut roots = Vec::new();
    for r in refined {
        if let Some(root) = r? {
            roots.push(root);
        }
    }
    roots.sort_by(|p, q| p.lambda.partial_cmp(&q.lambda).unwrap_or(std::cmp::Ordering::Equal));
    if let Some(k) = k_wanted {
        roots.truncate(k);
    }
    Ok(EigenScan {
        n: setup.n,
        lambda_grid: grid,
        indicator,
        roots,
        skipped,
    })
}
