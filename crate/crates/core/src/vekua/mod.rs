//! Pseudoanalytic function machinery for the main Vekua equation
//! `W_z̄ = (f_z̄ / f) W̄`: generating pairs and sequences, the
//! (F,G)-derivative and integral, formal powers, Taylor coefficients and
//! the transforms between metaharmonic functions.

mod bicomplex;
mod exact;
mod metaharmonic;
mod ray;
mod sequence;
mod taylor;

use std::sync::Arc;

use num_complex::Complex;

pub use bicomplex::Bicomplex;
pub use exact::{exact_formal_powers, FormalExpPair};
pub use metaharmonic::{associated_q1, conjugate_metaharmonic, factorization_residual, inverse_metaharmonic};
pub use ray::{formal_powers, FormalPowerTable, RayEngine, RayGrid};
pub use sequence::{GeneratingSequence, SeparableFactor};
pub use taylor::{taylor_coefficients, TaylorCoefficients, TaylorOptions};

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::quadrature::{LineIntegrator, Path};
use crate::scalar::{cabs, ci, lit, to_f64, Real};

type RealFn<T> = Arc<dyn Fn(Point2<T>) -> T + Send + Sync>;
type GradientFn<T> = Arc<dyn Fn(Point2<T>) -> (T, T) + Send + Sync>;

/// Real field on the plane with an optional closed-form gradient.
#[derive(Clone)]
pub struct ScalarField<T: Real> {
    value: RealFn<T>,
    gradient: Option<GradientFn<T>>,
    constant: Option<T>,
}

impl<T: Real> ScalarField<T> {
    pub fn new(value: impl Fn(Point2<T>) -> T + Send + Sync + 'static) -> Self {
        ScalarField {
            value: Arc::new(value),
            gradient: None,
            constant: None,
        }
    }

    pub fn with_gradient(
        value: impl Fn(Point2<T>) -> T + Send + Sync + 'static,
        gradient: impl Fn(Point2<T>) -> (T, T) + Send + Sync + 'static,
    ) -> Self {
        ScalarField {
            value: Arc::new(value),
            gradient: Some(Arc::new(gradient)),
            constant: None,
        }
    }

    pub fn constant(c: T) -> Self {
        ScalarField {
            value: Arc::new(move |_| c),
            gradient: Some(Arc::new(|_| (T::zero(), T::zero()))),
            constant: Some(c),
        }
    }

    pub fn value(&self, z: Point2<T>) -> T {
        (self.value)(z)
    }

    /// `(∂_x, ∂_y)`, by centered differences at step `1e-5` when no closed
    /// form was given.
    pub fn gradient(&self, z: Point2<T>) -> (T, T) {
        match &self.gradient {
            Some(g) => g(z),
            None => self.fd_gradient(z, lit(1e-5)),
        }
    }

    pub fn fd_gradient(&self, z: Point2<T>, h: T) -> (T, T) {
        let two_h = h + h;
        let gx = (self.value(z + Complex::new(h, T::zero())) - self.value(z - Complex::new(h, T::zero()))) / two_h;
        let gy = (self.value(z + Complex::new(T::zero(), h)) - self.value(z - Complex::new(T::zero(), h))) / two_h;
        (gx, gy)
    }

    /// The value when the field was built as a constant.
    pub fn as_constant(&self) -> Option<T> {
        self.constant
    }

    pub fn has_gradient(&self) -> bool {
        self.gradient.is_some()
    }
}

type ValueFn<T> = Arc<dyn Fn(Point2<T>) -> Complex<T> + Send + Sync>;
type WirtingerFn<T> = Arc<dyn Fn(Point2<T>) -> (Complex<T>, Complex<T>) + Send + Sync>;

/// Complex-valued field on the plane with Wirtinger derivatives, analytic
/// when supplied and centered differences otherwise.
#[derive(Clone)]
pub struct Field<T: Real> {
    value: ValueFn<T>,
    wirtinger: Option<WirtingerFn<T>>,
}

impl<T: Real> Field<T> {
    pub fn new(value: impl Fn(Point2<T>) -> Complex<T> + Send + Sync + 'static) -> Self {
        Field {
            value: Arc::new(value),
            wirtinger: None,
        }
    }

    /// Field with closed-form `(∂_z, ∂_z̄)`.
    pub fn with_derivatives(
        value: impl Fn(Point2<T>) -> Complex<T> + Send + Sync + 'static,
        wirtinger: impl Fn(Point2<T>) -> (Complex<T>, Complex<T>) + Send + Sync + 'static,
    ) -> Self {
        Field {
            value: Arc::new(value),
            wirtinger: Some(Arc::new(wirtinger)),
        }
    }

    pub fn value(&self, z: Point2<T>) -> Complex<T> {
        (self.value)(z)
    }

    /// `(∂_z W, ∂_z̄ W)` at `z`.
    pub fn wirtinger(&self, z: Point2<T>) -> (Complex<T>, Complex<T>) {
        match &self.wirtinger {
            Some(d) => d(z),
            None => fd_wirtinger(&*self.value, z, lit(1e-6)),
        }
    }

    pub fn has_analytic_derivatives(&self) -> bool {
        self.wirtinger.is_some()
    }
}

/// Centered-difference Wirtinger derivatives with step `h`.
pub fn fd_wirtinger<T: Real, F>(f: &F, z: Point2<T>, h: T) -> (Complex<T>, Complex<T>)
where
    F: Fn(Point2<T>) -> Complex<T> + ?Sized,
{
    let two_h = h + h;
    let fx = (f(z + Complex::new(h, T::zero())) - f(z - Complex::new(h, T::zero()))) / two_h;
    let fy = (f(z + Complex::new(T::zero(), h)) - f(z - Complex::new(T::zero(), h))) / two_h;
    let half: T = lit(0.5);
    ((fx - ci::<T>() * fy) * half, (fx + ci::<T>() * fy) * half)
}

/// Generating pair `(F, G)` with `Im(F̄ G) > 0`.
#[derive(Clone)]
pub struct GeneratingPair<T: Real> {
    pub f: Field<T>,
    pub g: Field<T>,
}

impl<T: Real> GeneratingPair<T> {
    /// Pair checked for `Im(F̄G) > 0` at the sample points.
    pub fn new(f: Field<T>, g: Field<T>, samples: &[Point2<T>]) -> Result<Self> {
        let pair = GeneratingPair { f, g };
        pair.verify(samples)?;
        Ok(pair)
    }

    pub fn verify(&self, samples: &[Point2<T>]) -> Result<()> {
        for z in samples {
            let v = (self.f.value(*z).conj() * self.g.value(*z)).im;
            if !(v > T::zero()) {
                return Err(Error::DegeneratePair(format!(
                    "Im(conj(F) G) = {:.3e} at ({:.6}, {:.6})",
                    to_f64(v),
                    to_f64(z.re),
                    to_f64(z.im)
                )));
            }
        }
        Ok(())
    }
}

/// The pair `(f, i/f)` of a positive real field `f`.
pub fn main_pair<T: Real>(f: Field<T>, samples: &[Point2<T>]) -> Result<GeneratingPair<T>> {
    for z in samples {
        let v = f.value(*z);
        if !(v.re > T::zero()) || v.im != T::zero() {
            return Err(Error::Positivity {
                x: to_f64(z.re),
                y: to_f64(z.im),
            });
        }
    }
    let fv = f.clone();
    let fd = f.clone();
    let g = Field::with_derivatives(
        move |z| ci::<T>() / fv.value(z),
        move |z| {
            let v = fd.value(z);
            let (dz, dzb) = fd.wirtinger(z);
            let k = -ci::<T>() / (v * v);
            (k * dz, k * dzb)
        },
    );
    GeneratingPair::new(f, g, samples)
}

/// Characteristic coefficients of a pair at one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CharCoeffs<T: Real> {
    pub a: Complex<T>,
    pub b: Complex<T>,
    pub big_a: Complex<T>,
    pub big_b: Complex<T>,
}

/// `a, b, A, B` of `(F, G)` at `z`.
pub fn char_coeffs<T: Real>(pair: &GeneratingPair<T>, z: Point2<T>) -> Result<CharCoeffs<T>> {
    let (f, g) = (pair.f.value(z), pair.g.value(z));
    let (fz, fzb) = pair.f.wirtinger(z);
    let (gz, gzb) = pair.g.wirtinger(z);
    let den = f * g.conj() - f.conj() * g;
    if cabs(den) < lit(1e-14) {
        return Err(Error::DegeneratePair(format!(
            "F conj(G) - conj(F) G vanishes at ({:.6}, {:.6})",
            to_f64(z.re),
            to_f64(z.im)
        )));
    }
    Ok(CharCoeffs {
        a: -(f.conj() * gzb - fzb * g.conj()) / den,
        b: (f * gzb - fzb * g) / den,
        big_a: -(f.conj() * gz - fz * g.conj()) / den,
        big_b: (f * gz - fz * g) / den,
    })
}

/// `Ẇ = W_z − A W − B W̄` at `z`.
pub fn fg_derivative<T: Real>(w: &Field<T>, pair: &GeneratingPair<T>, z: Point2<T>) -> Result<Complex<T>> {
    let cc = char_coeffs(pair, z)?;
    let v = w.value(z);
    let (wz, _) = w.wirtinger(z);
    Ok(wz - cc.big_a * v - cc.big_b * v.conj())
}

/// (F,G)-integral of `W` along `path`, evaluated at the path end `z1`:
/// `F(z1) Re∫ 2Ḡ/(FḠ−F̄G) W dz − G(z1) Re∫ 2F̄/(FḠ−F̄G) W dz`.
pub fn fg_integral<T: Real, W>(
    w: &W,
    pair: &GeneratingPair<T>,
    path: &Path<T>,
    integrator: &LineIntegrator<T>,
) -> Result<Complex<T>>
where
    W: Fn(Point2<T>) -> Complex<T> + ?Sized,
{
    let two: T = lit(2.0);
    let kernel = |z: Point2<T>, first: bool| {
        let (f, g) = (pair.f.value(z), pair.g.value(z));
        let den = f * g.conj() - f.conj() * g;
        let num = if first { g.conj() } else { f.conj() };
        num * two / den * w(z)
    };
    let z1 = path.end();
    for z in path.vertices() {
        let (f, g) = (pair.f.value(*z), pair.g.value(*z));
        if cabs(f * g.conj() - f.conj() * g) < lit(1e-14) {
            return Err(Error::DegeneratePair("denominator vanishes on the path".into()));
        }
    }
    let i1 = integrator.integrate_path(&|z| kernel(z, true), path)?;
    let i2 = integrator.integrate_path(&|z| kernel(z, false), path)?;
    Ok(pair.f.value(z1) * i1.re - pair.g.value(z1) * i2.re)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::QuadratureRule;
    use crate::scalar::creal;

    fn exp_field(c: f64) -> Field<f64> {
        Field::with_derivatives(
            move |z: Complex<f64>| creal((c * z.im).exp()),
            move |z: Complex<f64>| {
                let v = (c * z.im).exp();
                // ∂_z = ½(∂x − i∂y), ∂_z̄ = ½(∂x + i∂y)
                (Complex::new(0.0, -0.5 * c * v), Complex::new(0.0, 0.5 * c * v))
            },
        )
    }

    fn samples() -> Vec<Complex<f64>> {
        vec![
            Complex::new(0.1, 0.2),
            Complex::new(-0.5, 0.3),
            Complex::new(0.4, -0.7),
        ]
    }

    #[test]
    fn analytic_pair_has_zero_coefficients() {
        let one = Field::with_derivatives(|_| creal(1.0), |_| (creal(0.0), creal(0.0)));
        let i = Field::with_derivatives(|_| Complex::new(0.0, 1.0), |_| (creal(0.0), creal(0.0)));
        let p = GeneratingPair::new(one, i, &samples()).unwrap();
        let cc = char_coeffs(&p, Complex::new(0.3, 0.1)).unwrap();
        for v in [cc.a, cc.b, cc.big_a, cc.big_b] {
            assert_eq!(v, creal(0.0));
        }
    }

    #[test]
    fn main_pair_coefficients() {
        let c = 1.0;
        let p = main_pair(exp_field(c), &samples()).unwrap();
        for z in samples() {
            let cc = char_coeffs(&p, z).unwrap();
            assert!(cc.a.norm() < 1e-10 && cc.big_a.norm() < 1e-10);
            assert!((cc.big_b - Complex::new(0.0, -0.5 * c)).norm() < 1e-10);
            assert!((cc.b - Complex::new(0.0, 0.5 * c)).norm() < 1e-10);
            let g = (p.f.value(z).conj() * p.g.value(z)).im;
            assert!((g - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn main_pair_rejects_nonpositive() {
        let f = Field::new(|z: Complex<f64>| creal(z.re));
        assert!(matches!(
            main_pair(f, &[Complex::new(-0.5, 0.0)]),
            Err(Error::Positivity { .. })
        ));
    }

    #[test]
    fn generators_have_zero_derivative() {
        let p = main_pair(exp_field(1.0), &samples()).unwrap();
        for z in samples() {
            assert!(fg_derivative(&p.f, &p, z).unwrap().norm() < 1e-12);
            assert!(fg_derivative(&p.g, &p, z).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn fg_integral_reductions() {
        let li = LineIntegrator::new(QuadratureRule::default()).unwrap();
        let one = Field::with_derivatives(|_| creal(1.0), |_| (creal(0.0), creal(0.0)));
        let i = Field::with_derivatives(|_| Complex::new(0.0, 1.0), |_| (creal(0.0), creal(0.0)));
        let analytic = GeneratingPair::new(one, i, &samples()).unwrap();
        let w = |z: Complex<f64>| z * z + Complex::new(0.0, 1.0) * z.exp();
        let target = Complex::new(0.4, -0.6);
        let path = Path::segment(Complex::new(0.0, 0.0), target);
        let v = fg_integral(&w, &analytic, &path, &li).unwrap();
        let direct = li.integrate_path(&w, &path).unwrap();
        assert!((v - direct).norm() < 1e-14);
        // (f, i/f): kernels reduce to W/f and i f W.
        let p = main_pair(exp_field(1.0), &samples()).unwrap();
        let v = fg_integral(&w, &p, &path, &li).unwrap();
        let f = |z: Complex<f64>| z.im.exp();
        let i1 = li.integrate_path(&|z| w(z) / f(z), &path).unwrap();
        let i2 = li.integrate_path(&|z| Complex::new(0.0, 1.0) * f(z) * w(z), &path).unwrap();
        let simplified = creal(f(target)) * i1.re - Complex::new(0.0, 1.0) / f(target) * i2.re;
        assert!((v - simplified).norm() < 1e-13);
        let zero = fg_integral(&|_| creal(0.0), &p, &path, &li).unwrap();
        assert_eq!(zero, creal(0.0));
    }
}
