use std::sync::Arc;

use num_complex::Complex;

use super::{Bicomplex, Field, GeneratingPair};
use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::problems::CoordinateSystem;
use crate::scalar::{cabs, ci, cexp, cone, cpowu, creal, czero, lit, to_f64, Real};

type Profile<T> = Arc<dyn Fn(T) -> Complex<T> + Send + Sync>;

/// One factor of a separable `f = S(s)·T(t)`.
///
/// Values are complex in the eigen unit `j`; a factor flagged real has zero
/// imaginary part everywhere.
#[derive(Clone)]
pub struct SeparableFactor<T: Real> {
    value: Profile<T>,
    derivative: Option<Profile<T>>,
    real: bool,
    unit: bool,
}

impl<T: Real> SeparableFactor<T> {
    pub fn one() -> Self {
        SeparableFactor {
            value: Arc::new(|_| cone()),
            derivative: Some(Arc::new(|_| czero())),
            real: true,
            unit: true,
        }
    }

    /// `e^{c·t}`; real when `c` is.
    pub fn exp(c: Complex<T>) -> Self {
        if c == czero() {
            return Self::one();
        }
        SeparableFactor {
            value: Arc::new(move |t| cexp(c * t)),
            derivative: Some(Arc::new(move |t| c * cexp(c * t))),
            real: c.im == T::zero(),
            unit: false,
        }
    }

    /// Real profile with closed-form derivative.
    pub fn real(
        value: impl Fn(T) -> T + Send + Sync + 'static,
        derivative: impl Fn(T) -> T + Send + Sync + 'static,
    ) -> Self {
        SeparableFactor {
            value: Arc::new(move |t| creal(value(t))),
            derivative: Some(Arc::new(move |t| creal(derivative(t)))),
            real: true,
            unit: false,
        }
    }

    /// General profile; the derivative falls back to centered differences.
    pub fn complex(
        value: impl Fn(T) -> Complex<T> + Send + Sync + 'static,
        derivative: Option<Profile<T>>,
        real: bool,
    ) -> Self {
        SeparableFactor {
            value: Arc::new(value),
            derivative,
            real,
            unit: false,
        }
    }

    pub fn value(&self, t: T) -> Complex<T> {
        (self.value)(t)
    }

    pub fn derivative(&self, t: T) -> Complex<T> {
        match &self.derivative {
            Some(d) => d(t),
            None => {
                let h: T = lit(1e-6);
                ((self.value)(t + h) - (self.value)(t - h)) / (h + h)
            }
        }
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    pub fn is_one(&self) -> bool {
        self.unit
    }
}

/// The sequence of pairs `(F_m, G_m)` embedding `(f, i/f)` for separable
/// `f = S(s)T(t)`, `s + it = Φ(z)`:
/// even `m`: `F_m = Φ_z^m f`, `G_m = Φ_z^m i/f`;
/// odd `m`: `F_m = Φ_z^m f/S²`, `G_m = Φ_z^m i S²/f`.
#[derive(Clone)]
pub struct GeneratingSequence<T: Real> {
    s: SeparableFactor<T>,
    t: SeparableFactor<T>,
    coords: CoordinateSystem<T>,
}

impl<T: Real> GeneratingSequence<T> {
    pub fn new(s: SeparableFactor<T>, t: SeparableFactor<T>, coords: CoordinateSystem<T>) -> Self {
        GeneratingSequence { s, t, coords }
    }

    /// `f = e^{κy}` in Cartesian coordinates.
    pub fn exponential(kappa: Complex<T>) -> Self {
        Self::new(SeparableFactor::one(), SeparableFactor::exp(kappa), CoordinateSystem::Cartesian)
    }

    /// The analytic sequence `(1, i)`.
    pub fn analytic() -> Self {
        Self::new(SeparableFactor::one(), SeparableFactor::one(), CoordinateSystem::Cartesian)
    }

    pub fn coords(&self) -> CoordinateSystem<T> {
        self.coords
    }

    pub fn s_factor(&self) -> &SeparableFactor<T> {
        &self.s
    }

    pub fn t_factor(&self) -> &SeparableFactor<T> {
        &self.t
    }

    pub fn is_real(&self) -> bool {
        self.s.is_real() && self.t.is_real()
    }

    /// Smallest `p` with `(F_{m+p}, G_{m+p}) = (F_m, G_m)`, when the
    /// sequence is periodic.
    pub fn period(&self) -> Option<usize> {
        match (self.coords.is_identity(), self.s.is_one()) {
            (true, true) => Some(1),
            (true, false) => Some(2),
            _ => None,
        }
    }

    /// `f(z) = S(s)·T(t)` (complex in `j`).
    pub fn f_value(&self, z: Point2<T>) -> Complex<T> {
        let w = self.coords.phi(z);
        self.s.value(w.re) * self.t.value(w.im)
    }

    /// Checks `Φ_z` and the separable factors at the samples, and the pair
    /// inequality for `m = 0, 1` in real mode.
    pub fn validate(&self, samples: &[Point2<T>]) -> Result<()> {
        for &z in samples {
            let d = self.coords.phi_z(z);
            let m = cabs(d);
            if !m.is_finite() || m < lit(1e-12) {
                return Err(Error::ConformalMap(format!(
                    "Φ_z = {:.3e} at ({:.6}, {:.6})",
                    to_f64(m),
                    to_f64(z.re),
                    to_f64(z.im)
                )));
            }
            let w = self.coords.phi(z);
            let (sv, tv) = (self.s.value(w.re), self.t.value(w.im));
            if !(cabs(sv) > lit(1e-300)) || !(cabs(tv) > lit(1e-300)) {
                return Err(Error::Separability(format!(
                    "S or T vanishes at ({:.6}, {:.6})",
                    to_f64(z.re),
                    to_f64(z.im)
                )));
            }
        }
        if self.is_real() {
            for m in 0..2 {
                for &z in samples {
                    let (f, g) = self.pair_values(m, z);
                    let v = (f.to_i().conj() * g.to_i()).im;
                    if !(v > T::zero()) {
                        return Err(Error::DegeneratePair(format!(
                            "pair {m} violates Im(conj(F) G) > 0 at ({:.6}, {:.6})",
                            to_f64(z.re),
                            to_f64(z.im)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    fn exponents(m: usize) -> (i32, i32) {
        if m % 2 == 0 {
            (1, 1)
        } else {
            (-1, 1)
        }
    }

    /// `(F_m(z), G_m(z))` as bicomplex numbers.
    pub fn pair_values(&self, m: usize, z: Point2<T>) -> (Bicomplex<T>, Bicomplex<T>) {
        let w = self.coords.phi(z);
        let (sv, tv) = (self.s.value(w.re), self.t.value(w.im));
        let (a, b) = Self::exponents(m);
        let h = sv.powi(a) * tv.powi(b);
        let pm = cpowu(self.coords.phi_z(z), m as u32);
        let f = Bicomplex::from_i(pm) * Bicomplex::scalar(h);
        let g = Bicomplex::from_i(ci::<T>() * pm) * Bicomplex::scalar(cone::<T>() / h);
        (f, g)
    }

    /// `(F_m, G_m)` as fields with closed-form derivatives; real mode only.
    pub fn pair(&self, m: usize) -> Result<GeneratingPair<T>> {
        if !self.is_real() {
            return Err(Error::Separability(
                "pointwise pairs need real factors; complex profiles go through the bicomplex engine".into(),
            ));
        }
        let (a, b) = Self::exponents(m);
        let make = |scale: Complex<T>, a: i32, b: i32| {
            let me = self.clone();
            let md = self.clone();
            Field::with_derivatives(
                move |z| {
                    let w = me.coords.phi(z);
                    let h = me.s.value(w.re).re.powi(a) * me.t.value(w.im).re.powi(b);
                    scale * cpowu(me.coords.phi_z(z), m as u32) * h
                },
                move |z| md.derivatives(z, m, scale, a, b),
            )
        };
        Ok(GeneratingPair {
            f: make(cone(), a, b),
            g: make(ci(), -a, -b),
        })
    }

    /// Wirtinger derivatives of `scale·Φ_z^m·S^a·T^b`.
    fn derivatives(&self, z: Point2<T>, m: usize, scale: Complex<T>, a: i32, b: i32) -> (Complex<T>, Complex<T>) {
        let w = self.coords.phi(z);
        let d = self.coords.phi_z(z);
        let sv = self.s.value(w.re).re;
        let tv = self.t.value(w.im).re;
        let ls = lit::<T>(a as f64) * self.s.derivative(w.re).re / sv;
        let lt = lit::<T>(b as f64) * self.t.derivative(w.im).re / tv;
        let h = sv.powi(a) * tv.powi(b);
        let [sz, tz, szb, tzb] = CoordinateSystem::st_wirtinger(d);
        let hz = (sz * ls + tz * lt) * h;
        let hzb = (szb * ls + tzb * lt) * h;
        let pm = cpowu(d, m as u32);
        let dpm = if m == 0 {
            czero()
        } else {
            cpowu(d, m as u32 - 1) * self.coords.phi_zz(z) * lit::<T>(m as f64)
        };
        (scale * (dpm * h + pm * hz), scale * pm * hzb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::vekua::{char_coeffs, fd_wirtinger};

    fn pts() -> Vec<Complex<f64>> {
        vec![
            Complex::new(0.2, 0.1),
            Complex::new(-0.4, 0.5),
            Complex::new(0.6, -0.3),
        ]
    }

    #[test]
    fn exponential_sequence_is_constant() {
        let seq = GeneratingSequence::<f64>::exponential(creal(1.0));
        assert_eq!(seq.period(), Some(1));
        for m in 0..5 {
            for z in pts() {
                let (f, g) = seq.pair_values(m, z);
                assert!((f.to_i() - creal(z.im.exp())).norm() < 1e-14);
                assert!((g.to_i() - Complex::new(0.0, (-z.im).exp())).norm() < 1e-14);
            }
        }
        let a = GeneratingSequence::<f64>::analytic();
        let (f, g) = a.pair_values(3, Complex::new(0.3, 0.2));
        assert_eq!((f.to_i(), g.to_i()), (creal(1.0), Complex::new(0.0, 1.0)));
    }

    #[test]
    fn polar_pair_has_inverse_z_factor() {
        let seq = GeneratingSequence::<f64>::new(
            SeparableFactor::one(),
            SeparableFactor::one(),
            CoordinateSystem::Polar,
        );
        let (f, _) = seq.pair_values(1, Complex::new(2.0, 0.0));
        assert!((f.to_i().norm() - 0.5).abs() < 1e-15);
    }

    fn separable_polar() -> GeneratingSequence<f64> {
        GeneratingSequence::new(
            SeparableFactor::real(|s: f64| (0.5 * s).exp() + 0.2 * s * s, |s: f64| 0.5 * (0.5 * s).exp() + 0.4 * s),
            SeparableFactor::real(|t: f64| 2.0 + t.sin(), |t: f64| t.cos()),
            CoordinateSystem::Polar,
        )
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        let seq = separable_polar();
        for m in 0..4 {
            let p = seq.pair(m).unwrap();
            for z in [Complex::new(2.0, 0.5), Complex::new(3.1, -0.4)] {
                for fld in [&p.f, &p.g] {
                    let (dz, dzb) = fld.wirtinger(z);
                    let (nz, nzb) = fd_wirtinger(&|w| fld.value(w), z, 1e-6);
                    assert!((dz - nz).norm() < 1e-7, "m={m}");
                    assert!((dzb - nzb).norm() < 1e-7, "m={m}");
                }
            }
        }
    }

    #[test]
    fn successor_property() {
        let seq = separable_polar();
        let z = [Complex::new(2.0, 0.5), Complex::new(3.1, -0.4), Complex::new(2.6, 0.9)];
        seq.validate(&z).unwrap();
        for m in 0..4 {
            let c0 = char_coeffs(&seq.pair(m).unwrap(), z[m % 3]).unwrap();
            let c1 = char_coeffs(&seq.pair(m + 1).unwrap(), z[m % 3]).unwrap();
            assert!((c1.a - c0.a).norm() < 1e-8);
            assert!((c1.b + c0.big_b).norm() < 1e-8);
        }
    }

    #[test]
    fn complex_factors_need_bicomplex_engine() {
        let seq = GeneratingSequence::<f64>::new(
            SeparableFactor::exp(Complex::new(0.0, 2.0)),
            SeparableFactor::one(),
            CoordinateSystem::Cartesian,
        );
        assert!(!seq.is_real());
        assert_eq!(seq.period(), Some(2));
        assert!(matches!(seq.pair(0), Err(Error::Separability(_))));
        let z = Complex::new(0.3, 0.1);
        assert!((seq.f_value(z) - Complex::new(0.0, 0.6).exp()).norm() < 1e-15);
    }

    #[test]
    fn validate_rejects_vanishing_factor() {
        let seq = GeneratingSequence::<f64>::new(
            SeparableFactor::one(),
            SeparableFactor::real(|t| t, |_| 1.0),
            CoordinateSystem::Cartesian,
        );
        assert!(matches!(
            seq.validate(&[Complex::new(0.5, 0.0)]),
            Err(Error::Separability(_))
        ));
    }
}
