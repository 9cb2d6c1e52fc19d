//! Scalar abstraction and small complex helpers.

use nalgebra::RealField;
use num_complex::Complex;
use num_traits::ToPrimitive;

/// Floating-point scalar the library is generic over.
pub trait Real: RealField + Copy + ToPrimitive + std::fmt::LowerExp {}

impl Real for f32 {}
impl Real for f64 {}

/// Converts an `f64` literal into `T`.
#[inline]
pub fn lit<T: Real>(v: f64) -> T {
    nalgebra::convert(v)
}

/// Converts a count into `T`.
#[inline]
pub fn from_usize<T: Real>(n: usize) -> T {
    nalgebra::convert(n as f64)
}

/// Lossy conversion to `f64` for reporting.
#[inline]
pub fn to_f64<T: Real>(v: T) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Machine epsilon of `T`.
#[inline]
pub fn epsilon<T: Real>() -> T {
    T::default_epsilon()
}

#[inline]
pub fn c<T: Real>(re: T, im: T) -> Complex<T> {
    Complex::new(re, im)
}

#[inline]
pub fn creal<T: Real>(re: T) -> Complex<T> {
    Complex::new(re, T::zero())
}

#[inline]
pub fn czero<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::zero())
}

#[inline]
pub fn cone<T: Real>() -> Complex<T> {
    Complex::new(T::one(), T::zero())
}

#[inline]
pub fn ci<T: Real>() -> Complex<T> {
    Complex::new(T::zero(), T::one())
}

#[inline]
pub fn cabs<T: Real>(z: Complex<T>) -> T {
    z.re.hypot(z.im)
}

#[inline]
pub fn cexp<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = z.re.exp();
    Complex::new(r * z.im.cos(), r * z.im.sin())
}

/// `e^z − 1` without cancellation near zero.
pub fn cexpm1<T: Real>(z: Complex<T>) -> Complex<T> {
    if cabs(z) < lit(0.5) {
        let mut term = z;
        let mut sum = z;
        for k in 2..40 {
            term = term * z / from_usize::<T>(k);
            sum += term;
            if cabs(term) <= epsilon::<T>() * cabs(sum) {
                break;
            }
        }
        sum
    } else {
        cexp(z) - cone()
    }
}

/// Principal logarithm.
#[inline]
pub fn cln<T: Real>(z: Complex<T>) -> Complex<T> {
    Complex::new(cabs(z).ln(), z.im.atan2(z.re))
}

/// Principal square root.
pub fn csqrt<T: Real>(z: Complex<T>) -> Complex<T> {
    let r = cabs(z);
    if r == T::zero() {
        return czero();
    }
    let half: T = lit(0.5);
    let re = ((r + z.re) * half).sqrt();
    let im = ((r - z.re) * half).sqrt();
    Complex::new(re, if z.im < T::zero() { -im } else { im })
}

/// Principal arcsine, `asin w = −i ln(iw + √(1 − w²))`.
pub fn casin<T: Real>(w: Complex<T>) -> Complex<T> {
    let root = csqrt(cone::<T>() - w * w);
    let l = cln(ci::<T>() * w + root);
    Complex::new(l.im, -l.re)
}

/// `z^n` for integer `n ≥ 0` by repeated squaring.
pub fn cpowu<T: Real>(mut z: Complex<T>, mut n: u32) -> Complex<T> {
    let mut acc = cone();
    while n > 0 {
        if n & 1 == 1 {
            acc *= z;
        }
        z = z * z;
        n >>= 1;
    }
    acc
}
