//! Elliptic problems `(div p grad + q)u = 0`, their positive particular
//! solutions, and the complete systems of exact solutions built from them.

mod basis;
mod coords;
mod profile;

use std::sync::Arc;

use num_complex::Complex;

pub use basis::{complete_system, BasisMode, FormalPowerBasis};
pub use coords::{coordinate_catalog, CoordinateSystem};
pub use profile::{ode_profile, OdeProfile, ProfileInit, DEFAULT_PROFILE_STEP};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};
use crate::scalar::{cabs, cexp, creal, lit, to_f64, Real};
use crate::vekua::{GeneratingSequence, ScalarField, SeparableFactor};

/// A potential depending on `y` only.
pub type Potential<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Descriptor of the equation family.
#[derive(Clone)]
pub enum ProblemKind<T: Real> {
    Laplace,
    /// `Δu − c²u = 0`.
    Yukawa { c: T },
    /// `(−Δ + V(y))u = 0`.
    Schrodinger { potential: Potential<T> },
    General,
}

/// `(div p grad + q) u = 0`.
#[derive(Clone)]
pub struct EllipticProblem<T: Real> {
    p: ScalarField<T>,
    q: ScalarField<T>,
    kind: ProblemKind<T>,
}

impl<T: Real> EllipticProblem<T> {
    pub fn laplace() -> Self {
        EllipticProblem {
            p: ScalarField::constant(T::one()),
            q: ScalarField::constant(T::zero()),
            kind: ProblemKind::Laplace,
        }
    }

    pub fn yukawa(c: T) -> Self {
        EllipticProblem {
            p: ScalarField::constant(T::one()),
            q: ScalarField::constant(-c * c),
            kind: ProblemKind::Yukawa { c },
        }
    }

    /// `(−Δ + V(y))u = 0`.
    pub fn schrodinger_y(potential: impl Fn(T) -> T + Send + Sync + 'static) -> Self {
        let v: Potential<T> = Arc::new(potential);
        let vq = v.clone();
        EllipticProblem {
            p: ScalarField::constant(T::one()),
            q: ScalarField::new(move |z: Point2<T>| -vq(z.im)),
            kind: ProblemKind::Schrodinger { potential: v },
        }
    }

    pub fn general(p: ScalarField<T>, q: ScalarField<T>) -> Self {
        EllipticProblem {
            p,
            q,
            kind: ProblemKind::General,
        }
    }

    pub fn p(&self) -> &ScalarField<T> {
        &self.p
    }

    pub fn q(&self) -> &ScalarField<T> {
        &self.q
    }

    pub fn kind(&self) -> &ProblemKind<T> {
        &self.kind
    }

    pub fn tag(&self) -> String {
        match &self.kind {
            ProblemKind::Laplace => "laplace".into(),
            ProblemKind::Yukawa { c } => format!("yukawa(c={})", to_f64(*c)),
            ProblemKind::Schrodinger { .. } => "schrodinger_q_of_y".into(),
            ProblemKind::General => "general".into(),
        }
    }

    /// `q ≡ 0`.
    pub fn q_vanishes(&self) -> bool {
        matches!(self.kind, ProblemKind::Laplace) || self.q.as_constant() == Some(T::zero())
    }

    /// `V(y)` when `q = −V(y)` (Laplace and Yukawa included).
    pub fn y_potential(&self) -> Option<Potential<T>> {
        match &self.kind {
            ProblemKind::Laplace => Some(Arc::new(|_| T::zero())),
            ProblemKind::Yukawa { c } => {
                let c2 = *c * *c;
                Some(Arc::new(move |_| c2))
            }
            ProblemKind::Schrodinger { potential } => Some(potential.clone()),
            ProblemKind::General => None,
        }
    }

    /// Checks `p > 0` at the samples.
    pub fn check_positive(&self, samples: &[Point2<T>]) -> Result<()> {
        for z in samples {
            if !(self.p.value(*z) > T::zero()) {
                return Err(Error::Positivity {
                    x: to_f64(z.re),
                    y: to_f64(z.im),
                });
            }
        }
        Ok(())
    }

    /// `(div p grad + q)u` at `z` by the flux-form five-point stencil with
    /// step `h`.
    pub fn residual<F>(&self, u: &F, z: Point2<T>, h: T) -> Complex<T>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let half: T = lit(0.5);
        let c = u(z);
        let mut acc = Complex::new(T::zero(), T::zero());
        for d in [Complex::new(h, T::zero()), Complex::new(T::zero(), h)] {
            acc += (u(z + d) - c) * self.p.value(z + d * half) - (c - u(z - d)) * self.p.value(z - d * half);
        }
        acc / (h * h) + c * self.q.value(z)
    }

    /// Fourth-order residual: Richardson combination of steps `h` and `2h`.
    pub fn residual4<F>(&self, u: &F, z: Point2<T>, h: T) -> Complex<T>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let r1 = self.residual(u, z, h);
        let r2 = self.residual(u, z, h + h);
        (r1 * lit::<T>(4.0) - r2) / lit::<T>(3.0)
    }
}

/// How to build the particular solution `u0`.
#[derive(Clone)]
pub enum ParticularSpec<T: Real> {
    /// `u0 ≡ 1`, requires `q ≡ 0`.
    Constant,
    /// `u0 = e^{cy}` for the Yukawa equation.
    Exponential,
    /// `u0 = e^{λx} h(y)` with `h'' = (V(y) − λ²) h`.
    Product { lambda: T, init: ProfileInit<T> },
    /// `u0 = e^{iλx} h(y)` with `h'' = V(y) h`, a particular solution of
    /// `(Δ + λ² − V(y))u = 0`; for `V ≡ 0` the profile `e^{iλy}` is used.
    Eigen { lambda: T, init: ProfileInit<T> },
    /// User-supplied `f = p^{1/2}u0 = S(s)T(t)`.
    Separable {
        s: SeparableFactor<T>,
        t: SeparableFactor<T>,
        coords: CoordinateSystem<T>,
    },
}

/// Which construction produced a particular solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ParticularKind<T: Real> {
    Constant,
    /// `f = e^{κy}`; ExpPoly-representable.
    Exponential { kappa: Complex<T> },
    Product { lambda: T },
    Eigen { lambda: T },
    Separable,
}

/// A nonvanishing particular solution and its generating sequence.
#[derive(Clone)]
pub struct ParticularSolution<T: Real> {
    equation: EllipticProblem<T>,
    seq: GeneratingSequence<T>,
    profile: Option<Arc<OdeProfile<T>>>,
    kind: ParticularKind<T>,
}

/// Scaled residual tolerance for particular solutions.
const U0_RESIDUAL_TOL: f64 = 1e-6;

impl<T: Real> ParticularSolution<T> {
    /// The equation `u0` solves; for eigen mode `(Δ + λ² − V)u = 0`.
    pub fn equation(&self) -> &EllipticProblem<T> {
        &self.equation
    }

    pub fn sequence(&self) -> &GeneratingSequence<T> {
        &self.seq
    }

    pub fn profile(&self) -> Option<&OdeProfile<T>> {
        self.profile.as_deref()
    }

    pub fn kind(&self) -> ParticularKind<T> {
        self.kind
    }

    pub fn is_real(&self) -> bool {
        self.seq.is_real()
    }

    /// `f = p^{1/2} u0`.
    pub fn f(&self, z: Point2<T>) -> Complex<T> {
        self.seq.f_value(z)
    }

    /// `u0 = p^{-1/2} f`.
    pub fn u0(&self, z: Point2<T>) -> Complex<T> {
        self.seq.f_value(z) / self.equation.p.value(z).sqrt()
    }

    /// Largest scaled residual of `u0` over the samples.
    pub fn residual(&self, samples: &[Point2<T>], h: T) -> T {
        let q = &self.equation.q;
        samples
            .iter()
            .map(|&z| {
                let r = self.equation.residual4(&|w| self.u0(w), z, h);
                cabs(r) / (cabs(self.u0(z)) * (T::one() + q.value(z).abs()))
            })
            .fold(T::zero(), |a, b| a.max(b))
    }
}

/// Builds `u0` for `problem` on `domain` and verifies residual, positivity
/// and separability.
pub fn particular_solution<T: Real>(
    problem: &EllipticProblem<T>,
    spec: &ParticularSpec<T>,
    domain: &Domain<T>,
) -> Result<ParticularSolution<T>> {
    let [x0, x1, y0, y1] = domain.bounding_box();
    let _ = (x0, x1);
    let p_const = problem.p.as_constant();
    let need_const_p = || {
        p_const.ok_or_else(|| {
            Error::Separability("this particular solution needs constant p; use a separable spec".into())
        })
    };
    let need_potential = || {
        problem
            .y_potential()
            .ok_or_else(|| Error::Separability("the potential must depend on y only".into()))
    };
    let cartesian = CoordinateSystem::Cartesian;
    let (equation, seq, profile, kind) = match spec {
        ParticularSpec::Constant => {
            if !problem.q_vanishes() {
                return Err(Error::InvalidArgument("u0 ≡ 1 requires q ≡ 0".into()));
            }
            need_const_p()?;
            let seq = GeneratingSequence::new(SeparableFactor::one(), SeparableFactor::one(), cartesian);
            (problem.clone(), seq, None, ParticularKind::Constant)
        }
        ParticularSpec::Exponential => {
            let c = match problem.kind {
                ProblemKind::Yukawa { c } => c,
                ProblemKind::Laplace => T::zero(),
                _ => {
                    return Err(Error::InvalidArgument(
                        "the exponential particular solution belongs to the Yukawa equation".into(),
                    ))
                }
            };
            let s = need_const_p()?.sqrt();
            let kappa = creal(c);
            let seq = GeneratingSequence::new(
                SeparableFactor::one(),
                scaled_exp(kappa, s),
                cartesian,
            );
            (problem.clone(), seq, None, ParticularKind::Exponential { kappa })
        }
        ParticularSpec::Product { lambda, init } => {
            need_const_p()?;
            let v = need_potential()?;
            let l2 = *lambda * *lambda;
            let prof = Arc::new(ode_profile(
                Arc::new(move |y| v(y) - l2),
                (y0, y1),
                init.clone(),
                lit(DEFAULT_PROFILE_STEP),
            )?);
            let seq = GeneratingSequence::new(
                SeparableFactor::exp(creal(*lambda)),
                profile_factor(&prof),
                cartesian,
            );
            (problem.clone(), seq, Some(prof), ParticularKind::Product { lambda: *lambda })
        }
        ParticularSpec::Eigen { lambda, init } => {
            let p = need_const_p()?;
            if p != T::one() {
                return Err(Error::InvalidArgument("eigen mode expects p ≡ 1".into()));
            }
            let v = need_potential()?;
            let l2 = *lambda * *lambda;
            let vq = v.clone();
            let shifted = EllipticProblem::general(
                ScalarField::constant(T::one()),
                ScalarField::new(move |z: Point2<T>| l2 - vq(z.im)),
            );
            let zero_potential = problem.q_vanishes();
            if zero_potential {
                let kappa = Complex::new(T::zero(), *lambda);
                let seq = GeneratingSequence::exponential(kappa);
                let eq = EllipticProblem {
                    q: ScalarField::constant(l2),
                    ..shifted
                };
                (eq, seq, None, ParticularKind::Exponential { kappa })
            } else {
                let prof = Arc::new(ode_profile(v, (y0, y1), init.clone(), lit(DEFAULT_PROFILE_STEP))?);
                let seq = GeneratingSequence::new(
                    SeparableFactor::exp(Complex::new(T::zero(), *lambda)),
                    profile_factor(&prof),
                    cartesian,
                );
                (shifted, seq, Some(prof), ParticularKind::Eigen { lambda: *lambda })
            }
        }
        ParticularSpec::Separable { s, t, coords } => {
            coords.admissible(domain)?;
            let seq = GeneratingSequence::new(s.clone(), t.clone(), *coords);
            (problem.clone(), seq, None, ParticularKind::Separable)
        }
    };
    let ps = ParticularSolution {
        equation,
        seq,
        profile,
        kind,
    };
    let mut samples = domain.interior_grid(12);
    samples.extend(domain.boundary_sample(64));
    ps.equation.check_positive(&samples)?;
    ps.seq.validate(&samples)?;
    if ps.is_real() {
        for z in &samples {
            let v = ps.u0(*z);
            if !(v.re > T::zero()) {
                return Err(Error::Positivity {
                    x: to_f64(z.re),
                    y: to_f64(z.im),
                });
            }
        }
    }
    let interior = domain.interior_grid(8);
    let h = domain.radius() * lit(1e-3);
    let r = ps.residual(&interior, h);
    if !(r < lit(U0_RESIDUAL_TOL)) {
        return Err(Error::NotASolution { residual: to_f64(r) });
    }
    Ok(ps)
}

fn scaled_exp<T: Real>(kappa: Complex<T>, scale: T) -> SeparableFactor<T> {
    if scale == T::one() {
        return SeparableFactor::exp(kappa);
    }
    SeparableFactor::complex(
        move |t| cexp(kappa * t) * scale,
        Some(Arc::new(move |t| kappa * cexp(kappa * t) * scale)),
        kappa.im == T::zero(),
    )
}

fn profile_factor<T: Real>(prof: &Arc<OdeProfile<T>>) -> SeparableFactor<T> {
    let (a, b) = (prof.clone(), prof.clone());
    SeparableFactor::real(move |y| a.value(y), move |y| b.derivative(y))
}
