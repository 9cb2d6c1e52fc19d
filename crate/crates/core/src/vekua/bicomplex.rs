use std::ops::{Add, AddAssign, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::scalar::Real;

/// `re + i·im` with `re, im` complex in a second, commuting unit `j`.
///
/// The Vekua equation's imaginary unit is `i`; the eigen profile
/// `e^{jλx} h(y)` lives in `j`. Conjugation acts on `i` only.
#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Bicomplex<T> {
    pub re: Complex<T>,
    pub im: Complex<T>,
}

impl<T: Real> Bicomplex<T> {
    pub fn new(re: Complex<T>, im: Complex<T>) -> Self {
        Bicomplex { re, im }
    }

    pub fn zero() -> Self {
        Bicomplex::new(Complex::new(T::zero(), T::zero()), Complex::new(T::zero(), T::zero()))
    }

    pub fn one() -> Self {
        Bicomplex::scalar(Complex::new(T::one(), T::zero()))
    }

    /// Ordinary complex number in the `i`-plane.
    pub fn from_i(c: Complex<T>) -> Self {
        Bicomplex::new(Complex::new(c.re, T::zero()), Complex::new(c.im, T::zero()))
    }

    /// Number with zero `i`-part.
    pub fn scalar(c: Complex<T>) -> Self {
        Bicomplex::new(c, Complex::new(T::zero(), T::zero()))
    }

    /// `i`-conjugate.
    pub fn conj(self) -> Self {
        Bicomplex::new(self.re, -self.im)
    }

    /// `re² + im²`, the `j`-complex modulus square.
    pub fn norm_j(self) -> Complex<T> {
        self.re * self.re + self.im * self.im
    }

    pub fn inv(self) -> Self {
        let d = self.norm_j();
        Bicomplex::new(self.re / d, -self.im / d)
    }

    pub fn scale(self, c: Complex<T>) -> Self {
        Bicomplex::new(self.re * c, self.im * c)
    }

    /// Ordinary complex value, valid when both components are `j`-real.
    pub fn to_i(self) -> Complex<T> {
        Complex::new(self.re.re, self.im.re)
    }

    /// Largest absolute component, for magnitude checks.
    pub fn max_abs(self) -> T {
        let a = self.re.re.abs().max(self.re.im.abs());
        let b = self.im.re.abs().max(self.im.im.abs());
        a.max(b)
    }
}

impl<T: Real> Add for Bicomplex<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Bicomplex::new(self.re + o.re, self.im + o.im)
    }
}

impl<T: Real> AddAssign for Bicomplex<T> {
    fn add_assign(&mut self, o: Self) {
        self.re += o.re;
        self.im += o.im;
    }
}

impl<T: Real> Sub for Bicomplex<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Bicomplex::new(self.re - o.re, self.im - o.im)
    }
}

impl<T: Real> Neg for Bicomplex<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Bicomplex::new(-self.re, -self.im)
    }
}

impl<T: Real> Mul for Bicomplex<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        Bicomplex::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl<T: Real> Mul<T> for Bicomplex<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Bicomplex::new(self.re * s, self.im * s)
    }
}

impl<T: Real> Div for Bicomplex<T> {
    type Output = Self;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Self) -> Self {
        self * o.inv()
    }
}
