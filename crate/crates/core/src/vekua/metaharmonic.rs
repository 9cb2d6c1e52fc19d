use num_complex::Complex;

use super::{fd_wirtinger, ScalarField};
use crate::error::Result;
use crate::geometry::Point2;
use crate::quadrature::Abar;
use crate::scalar::{cabs, ci, creal, lit, Real};

/// `∂_z̄(a·u)` for real `a, u` from gradients.
fn dzbar_product<T: Real>(a: T, ga: (T, T), u: T, gu: (T, T)) -> Complex<T> {
    let half: T = lit(0.5);
    Complex::new(ga.0 * u + a * gu.0, ga.1 * u + a * gu.1) * half
}

/// Conjugate metaharmonic function
/// `v = u0^{-1} Ā(i p u0² ∂_z̄(u0^{-1} u))` at `target`, normalized by
/// `v(base) = 0`, so that `p^{1/2}u + i p^{-1/2} v` solves the main Vekua
/// equation for `f = p^{1/2} u0`.
pub fn conjugate_metaharmonic<T: Real>(
    u: &ScalarField<T>,
    p: &ScalarField<T>,
    u0: &ScalarField<T>,
    abar: &Abar<'_, T>,
    base: Point2<T>,
    target: Point2<T>,
) -> Result<T> {
    let phi = |z: Point2<T>| {
        let w0 = u0.value(z);
        let (gx, gy) = u0.gradient(z);
        let inv = T::one() / w0;
        let ginv = (-gx * inv * inv, -gy * inv * inv);
        ci::<T>() * p.value(z) * w0 * w0 * dzbar_product(inv, ginv, u.value(z), u.gradient(z))
    };
    Ok(abar.eval(&phi, base, target)? / u0.value(target))
}

/// Inverse transform `u = −u0 Ā(i p^{-1} u0^{-2} ∂_z̄(u0 v))` at `target`,
/// normalized by `u(base) = 0`.
pub fn inverse_metaharmonic<T: Real>(
    v: &ScalarField<T>,
    p: &ScalarField<T>,
    u0: &ScalarField<T>,
    abar: &Abar<'_, T>,
    base: Point2<T>,
    target: Point2<T>,
) -> Result<T> {
    let phi = |z: Point2<T>| {
        let w0 = u0.value(z);
        ci::<T>() / (p.value(z) * w0 * w0) * dzbar_product(w0, u0.gradient(z), v.value(z), v.gradient(z))
    };
    Ok(-u0.value(target) * abar.eval(&phi, base, target)?)
}

/// `q₁ = −(1/p)(q/p + 2⟨∇p/p, ∇u0/u0⟩ + 2|∇u0/u0|²)`, the potential of
/// the equation `(div (1/p) grad + q₁) v = 0` met by conjugate functions.
pub fn associated_q1<T: Real>(p: &ScalarField<T>, q: &ScalarField<T>, u0: &ScalarField<T>, z: Point2<T>) -> T {
    let (pv, uv) = (p.value(z), u0.value(z));
    let (px, py) = p.gradient(z);
    let (ux, uy) = u0.gradient(z);
    let (lx, ly) = (ux / uv, uy / uv);
    let two: T = lit(2.0);
    -(q.value(z) / pv + two * (px / pv * lx + py / pv * ly) + two * (lx * lx + ly * ly)) / pv
}

/// Largest difference between `¼(div p grad + q)φ` and
/// `p^{1/2}(∂_z + (f_z̄/f)C)(∂_z̄ − (f_z̄/f)C)p^{1/2}φ`, `f = p^{1/2}u0`,
/// over the samples, all derivatives by centered differences at step `h`.
pub fn factorization_residual<T: Real, F>(
    p: &ScalarField<T>,
    q: &ScalarField<T>,
    u0: &ScalarField<T>,
    phi: &F,
    samples: &[Point2<T>],
    h: T,
) -> T
where
    F: Fn(Point2<T>) -> T + ?Sized,
{
    let hx = Complex::new(h, T::zero());
    let hy = Complex::new(T::zero(), h);
    let half = lit::<T>(0.5);
    let f = |z: Point2<T>| creal(p.value(z).sqrt() * u0.value(z));
    let b = |z: Point2<T>| fd_wirtinger(&f, z, h).1 / f(z);
    let g = |z: Point2<T>| creal(p.value(z).sqrt() * phi(z));
    let inner = |z: Point2<T>| fd_wirtinger(&g, z, h).1 - b(z) * g(z).conj();
    let mut worst = T::zero();
    for &z in samples {
        let c = phi(z);
        let flux = |d: Complex<T>| p.value(z + d * half) * (phi(z + d) - c) - p.value(z - d * half) * (c - phi(z - d));
        let lhs = ((flux(hx) + flux(hy)) / (h * h) + q.value(z) * c) * lit(0.25);
        let w = inner(z);
        let rhs = (fd_wirtinger(&inner, z, h).0 + b(z) * w.conj()) * p.value(z).sqrt();
        worst = worst.max(cabs(creal(lhs) - rhs));
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Domain;
    use crate::quadrature::QuadratureRule;

    fn one() -> ScalarField<f64> {
        ScalarField::constant(1.0)
    }

    fn abar(domain: &Domain<f64>) -> Abar<'_, f64> {
        Abar::new(QuadratureRule::default()).unwrap().within(domain)
    }

    #[test]
    fn harmonic_conjugates() {
        let disk = Domain::unit_disk();
        let a = abar(&disk);
        let z0 = Complex::new(0.0, 0.0);
        let x = ScalarField::with_gradient(|z: Complex<f64>| z.re, |_| (1.0, 0.0));
        let sq = ScalarField::new(|z: Complex<f64>| z.re * z.re - z.im * z.im);
        for t in [Complex::new(0.3, 0.4), Complex::new(-0.6, 0.2)] {
            let v = conjugate_metaharmonic(&x, &one(), &one(), &a, z0, t).unwrap();
            assert!((v - t.im).abs() < 1e-12);
            let v = conjugate_metaharmonic(&sq, &one(), &one(), &a, z0, t).unwrap();
            assert!((v - 2.0 * t.re * t.im).abs() < 1e-9);
        }
    }

    #[test]
    fn yukawa_round_trip_and_associated_equation() {
        let c = 1.0;
        let disk = Domain::unit_disk();
        let a = abar(&disk);
        let u0 = ScalarField::with_gradient(move |z: Complex<f64>| (c * z.im).exp(), move |z: Complex<f64>| (0.0, c * (c * z.im).exp()));
        // Nested difference quotients amplify noise, so u carries its gradient.
        let u = ScalarField::with_gradient(move |z: Complex<f64>| (c * z.re).exp(), move |z: Complex<f64>| (c * (c * z.re).exp(), 0.0));
        let z0 = Complex::new(0.0, 0.0);
        let (pc, uc) = (one(), u0.clone());
        let ua = u.clone();
        let v = ScalarField::new(move |z| {
            let ab = Abar::new(QuadratureRule::default()).unwrap().checked(false);
            conjugate_metaharmonic(&ua, &pc, &uc, &ab, z0, z).unwrap()
        });
        // v = e^{cx} − e^{−cy} for this normalization.
        for t in [Complex::new(0.3, 0.4), Complex::new(-0.5, -0.1)] {
            assert!((v.value(t) - ((c * t.re).exp() - (-c * t.im).exp())).abs() < 1e-10);
        }
        let pts = [Complex::new(0.3, 0.4), Complex::new(-0.5, -0.1), Complex::new(0.1, -0.6)];
        let mut diffs = Vec::new();
        for t in pts {
            let back = inverse_metaharmonic(&v, &one(), &u0, &a, z0, t).unwrap();
            diffs.push((back - u.value(t)) / u0.value(t));
        }
        for d in &diffs {
            assert!((d - diffs[0]).abs() < 1e-8, "{diffs:?}");
        }
        let q = ScalarField::constant(-c * c);
        let h = 1e-3;
        for t in pts {
            let q1 = associated_q1(&one(), &q, &u0, t);
            let lap = (v.value(t + h) + v.value(t - h) + v.value(t + Complex::new(0.0, h)) + v.value(t - Complex::new(0.0, h)) - 4.0 * v.value(t)) / (h * h);
            assert!((lap + q1 * v.value(t)).abs() < 1e-4);
        }
    }

    #[test]
    fn q1_examples() {
        let z = Complex::new(0.2, 0.3);
        let q = ScalarField::constant(2.5);
        assert_eq!(associated_q1(&one(), &q, &one(), z), -2.5);
        let c: f64 = 1.3;
        let u0 = ScalarField::with_gradient(move |z: Complex<f64>| (c * z.im).exp(), move |z: Complex<f64>| (0.0, c * (c * z.im).exp()));
        let q = ScalarField::constant(c * c);
        assert!((associated_q1(&one(), &q, &u0, z) + 3.0 * c * c).abs() < 1e-12);
    }

    #[test]
    fn factorization_holds_for_consistent_potential() {
        let pts = [Complex::new(0.2, 0.3), Complex::new(-0.4, 0.1), Complex::new(0.5, -0.5)];
        let zero = ScalarField::constant(0.0);
        let harmonic = |z: Complex<f64>| z.re * z.re - z.im * z.im + z.re;
        assert!(factorization_residual(&one(), &zero, &one(), &harmonic, &pts, 1e-3) < 1e-6);
        // u0 = e^y solves Δu0 + q u0 = 0 only for q = −1.
        let u0 = ScalarField::new(|z: Complex<f64>| z.im.exp());
        let q = ScalarField::constant(-1.0);
        let phi = |z: Complex<f64>| z.re.powi(3) * z.im;
        let r3 = factorization_residual(&one(), &q, &u0, &phi, &pts, 1e-3);
        assert!(r3 < 1e-4, "{r3}");
        let r2 = factorization_residual(&one(), &q, &u0, &phi, &pts, 1e-2);
        let slope = (r2 / r3).log10();
        assert!(slope > 1.7, "slope {slope}");
        // Non-constant p, u0 = 1 with q = 0.
        let p = ScalarField::new(|z: Complex<f64>| 1.0 + 0.3 * z.re * z.re);
        let r = factorization_residual(&p, &zero, &one(), &phi, &pts, 1e-3);
        assert!(r < 1e-4, "{r}");
    }
}
