//! Closed algebra of functions `Σ c_{jkσ} x^j y^k e^{σκy}` with exact
//! antiderivatives and exact straight-segment integrals.
//!
//! `κ` is fixed per instance. The exponent index `σ` is a small signed
//! integer; the formal-power recursion produces `σ ∈ {−2, …, 2}` in
//! intermediate steps. When `κ = 0` every term is stored with `σ = 0`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::Point2;
use crate::scalar::{cabs, cexp, cexpm1, cone, czero, from_usize, lit, to_f64, Real};

/// Exponents of one term `x^x y^y e^{σκy}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub x: u32,
    pub y: u32,
    pub sigma: i32,
}

impl Monomial {
    pub fn new(x: u32, y: u32, sigma: i32) -> Self {
        Monomial { x, y, sigma }
    }
}

/// Exponential polynomial in `(x, y)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPoly<T: Real> {
    kappa: Complex<T>,
    terms: BTreeMap<Monomial, Complex<T>>,
}

fn negligible<T: Real>(c: Complex<T>) -> bool {
    let tiny: T = lit(1e-300);
    c.re.abs() < tiny && c.im.abs() < tiny
}

impl<T: Real> ExpPoly<T> {
    pub fn zero(kappa: Complex<T>) -> Self {
        ExpPoly {
            kappa,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(kappa: Complex<T>, c: Complex<T>) -> Self {
        Self::term(kappa, 0, 0, 0, c)
    }

    /// Single term `c x^j y^k e^{σκy}`.
    pub fn term(kappa: Complex<T>, j: u32, k: u32, sigma: i32, c: Complex<T>) -> Self {
        let mut p = Self::zero(kappa);
        p.push(Monomial::new(j, k, sigma), c);
        p
    }

    /// `e^{σκy}`.
    pub fn exp_y(kappa: Complex<T>, sigma: i32) -> Self {
        Self::term(kappa, 0, 0, sigma, cone())
    }

    pub fn kappa(&self) -> Complex<T> {
        self.kappa
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Complex<T>)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: Monomial) -> Complex<T> {
        self.terms.get(&m).copied().unwrap_or_else(czero)
    }

    fn kappa_is_zero(&self) -> bool {
        self.kappa.re == T::zero() && self.kappa.im == T::zero()
    }

    fn push(&mut self, mut m: Monomial, c: Complex<T>) {
        if self.kappa_is_zero() {
            m.sigma = 0;
        }
        let slot = self.terms.entry(m).or_insert_with(czero);
        *slot += c;
        if negligible(*slot) {
            self.terms.remove(&m);
        }
    }

    fn same_kappa(&self, other: &Self) -> Result<()> {
        if self.kappa == other.kappa {
            Ok(())
        } else {
            Err(Error::KappaMismatch)
        }
    }

    /// Largest x-degree, y-degree and σ range `(σ_min, σ_max)`.
    pub fn extents(&self) -> (u32, u32, i32, i32) {
        let mut e = (0u32, 0u32, 0i32, 0i32);
        for m in self.terms.keys() {
            e.0 = e.0.max(m.x);
            e.1 = e.1.max(m.y);
            e.2 = e.2.min(m.sigma);
            e.3 = e.3.max(m.sigma);
        }
        e
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(*m, *c);
        }
        Ok(out)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.push(*m, -*c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex<T>) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            out.push(*m, *c * s);
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.scale(-cone::<T>())
    }

    fn map_monomials(&self, f: impl Fn(Monomial) -> Monomial) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            out.push(f(*m), *c);
        }
        out
    }

    pub fn mul_x(&self) -> Self {
        self.map_monomials(|m| Monomial::new(m.x + 1, m.y, m.sigma))
    }

    pub fn mul_y(&self) -> Self {
        self.map_monomials(|m| Monomial::new(m.x, m.y + 1, m.sigma))
    }

    /// Product with `e^{σκy}`.
    pub fn mul_exp(&self, sigma: i32) -> Self {
        self.map_monomials(|m| Monomial::new(m.x, m.y, m.sigma + sigma))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.same_kappa(other)?;
        let mut out = Self::zero(self.kappa);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.push(
                    Monomial::new(a.x + b.x, a.y + b.y, a.sigma + b.sigma),
                    *ca * *cb,
                );
            }
        }
        Ok(out)
    }

    /// Complex conjugate of the function; only defined for real `κ`, where
    /// conjugation acts on the coefficients alone.
    pub fn conj_real_kappa(&self) -> Result<Self> {
        if self.kappa.im != T::zero() {
            return Err(Error::ComplexKappa);
        }
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            out.push(*m, c.conj());
        }
        Ok(out)
    }

    /// Value at `z`.
    pub fn eval(&self, z: Point2<T>) -> Complex<T> {
        self.eval_in(&PowerTable::for_poly(self, z))
    }

    /// Value at `z` together with `Σ |c x^j y^k e^{σκy}|`, the scale
    /// against which rounding in the sum should be judged.
    pub fn eval_with_magnitude(&self, z: Point2<T>) -> (Complex<T>, T) {
        let t = PowerTable::for_poly(self, z);
        let mut sum = czero::<T>();
        let mut mag = T::zero();
        for (m, c) in &self.terms {
            let v = *c * t.factor(*m);
            mag += cabs(v);
            sum += v;
        }
        (sum, mag)
    }

    /// Value using precomputed powers; the table must cover this polynomial.
    pub fn eval_in(&self, t: &PowerTable<T>) -> Complex<T> {
        let mut sum = czero::<T>();
        for (m, c) in &self.terms {
            sum += *c * t.factor(*m);
        }
        sum
    }

    pub fn d_dx(&self) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            if m.x > 0 {
                out.push(
                    Monomial::new(m.x - 1, m.y, m.sigma),
                    *c * from_usize::<T>(m.x as usize),
                );
            }
        }
        out
    }

    pub fn d_dy(&self) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            if m.y > 0 {
                out.push(
                    Monomial::new(m.x, m.y - 1, m.sigma),
                    *c * from_usize::<T>(m.y as usize),
                );
            }
            if m.sigma != 0 {
                out.push(*m, *c * self.kappa * lit::<T>(m.sigma as f64));
            }
        }
        out
    }

    pub fn laplacian(&self) -> Self {
        let xx = self.d_dx().d_dx();
        let yy = self.d_dy().d_dy();
        xx.checked_add(&yy).expect("same kappa")
    }

    /// `(∂_x f, ∂_y f)` at `z`.
    pub fn gradient_at(&self, z: Point2<T>) -> (Complex<T>, Complex<T>) {
        (self.d_dx().eval(z), self.d_dy().eval(z))
    }

    /// `f(x0, y)` as a function of `y` alone.
    pub fn restrict_x(&self, x0: T) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            out.push(Monomial::new(0, m.y, m.sigma), *c * x0.powi(m.x as i32));
        }
        out
    }

    /// `∫_0^x f(ξ, y) dξ`.
    pub fn antiderivative_x(&self) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            out.push(
                Monomial::new(m.x + 1, m.y, m.sigma),
                *c / from_usize::<T>(m.x as usize + 1),
            );
        }
        out
    }

    /// `∫_{y0}^y f(x, η) dη`.
    pub fn integrate_y_from(&self, y0: T) -> Self {
        let mut out = Self::zero(self.kappa);
        for (m, c) in &self.terms {
            let k = m.y;
            if m.sigma == 0 || self.kappa_is_zero() {
                let kp = from_usize::<T>(k as usize + 1);
                out.push(Monomial::new(m.x, k + 1, 0), *c / kp);
                out.push(Monomial::new(m.x, 0, 0), -*c * y0.powi(k as i32 + 1) / kp);
                continue;
            }
            // ∫ η^k e^{aη} dη = e^{aη} Σ_i (−1)^i k!/(k−i)! η^{k−i} / a^{i+1}
            let a = self.kappa * lit::<T>(m.sigma as f64);
            let mut coef = cone::<T>() / a;
            let mut at_y0 = czero::<T>();
            for i in 0..=k {
                let deg = k - i;
                out.push(Monomial::new(m.x, deg, m.sigma), *c * coef);
                at_y0 += coef * y0.powi(deg as i32);
                coef = coef * (-from_usize::<T>(deg as usize)) / a;
            }
            out.push(Monomial::new(m.x, 0, 0), -*c * at_y0 * cexp(a * y0));
        }
        out
    }

    /// Potential `φ` of the closed form `P dx + Q dy` with `φ(z0) = 0`:
    /// `φ = ∫_{y0}^{y} Q(x0, η) dη + ∫_{x0}^{x} P(ξ, y) dξ`.
    pub fn potential(p: &Self, q: &Self, z0: Point2<T>) -> Result<Self> {
        p.same_kappa(q)?;
        let vertical = q.restrict_x(z0.re).integrate_y_from(z0.im);
        let a = p.antiderivative_x();
        let horizontal = a.checked_sub(&a.restrict_x(z0.re))?;
        vertical.checked_add(&horizontal)
    }

    /// Exact `∫_{za}^{zb} f(z) dz` along the straight segment.
    pub fn integrate_segment(&self, za: Point2<T>, zb: Point2<T>) -> Complex<T> {
        if self.terms.is_empty() {
            return czero();
        }
        let d = zb - za;
        let (jmax, kmax, smin, smax) = self.extents();
        let binom_rows = |base: T, step: T, nmax: u32| -> Vec<Vec<T>> {
            let mut rows = Vec::with_capacity(nmax as usize + 1);
            rows.push(vec![T::one()]);
            for n in 1..=nmax as usize {
                let prev: &Vec<T> = &rows[n - 1];
                let mut row = vec![T::zero(); n + 1];
                for (r, v) in prev.iter().enumerate() {
                    row[r] += *v * base;
                    row[r + 1] += *v * step;
                }
                rows.push(row);
            }
            rows
        };
        let bx = binom_rows(za.re, d.re, jmax);
        let by = binom_rows(za.im, d.im, kmax);
        let deg = (jmax + kmax) as usize;
        let nsig = (smax - smin + 1) as usize;
        let mut poly = vec![vec![czero::<T>(); deg + 1]; nsig];
        for (m, c) in &self.terms {
            let row = &mut poly[(m.sigma - smin) as usize];
            for (r, xr) in bx[m.x as usize].iter().enumerate() {
                let cx = *c * *xr;
                for (s, ys) in by[m.y as usize].iter().enumerate() {
                    row[r + s] += cx * *ys;
                }
            }
        }
        let mut total = czero::<T>();
        for (i, row) in poly.iter().enumerate() {
            let sigma = smin + i as i32;
            let a = self.kappa * lit::<T>(sigma as f64);
            let moments = exp_moments(a * d.im, deg);
            let mut part = czero::<T>();
            for (p, mo) in row.iter().zip(&moments) {
                part += *p * *mo;
            }
            total += part * cexp(a * za.im);
        }
        total * d
    }

    /// Plain-text term table: `j k sigma re im`, one term per line.
    pub fn dump(&self) -> String {
        let mut s = String::from("# j k sigma re im\n");
        for (m, c) in &self.terms {
            let _ = writeln!(
                s,
                "{} {} {} {:.17e} {:.17e}",
                m.x,
                m.y,
                m.sigma,
                to_f64(c.re),
                to_f64(c.im)
            );
        }
        s
    }
}

/// Powers `x^j`, `y^k` and exponentials `e^{σκy}` at one point.
#[derive(Clone, Debug)]
pub struct PowerTable<T: Real> {
    xs: Vec<T>,
    ys: Vec<T>,
    exps: Vec<Complex<T>>,
    smin: i32,
}

impl<T: Real> PowerTable<T> {
    pub fn new(z: Point2<T>, kappa: Complex<T>, jmax: u32, kmax: u32, smin: i32, smax: i32) -> Self {
        let mut xs = Vec::with_capacity(jmax as usize + 1);
        let mut ys = Vec::with_capacity(kmax as usize + 1);
        let (mut px, mut py) = (T::one(), T::one());
        for _ in 0..=jmax {
            xs.push(px);
            px *= z.re;
        }
        for _ in 0..=kmax {
            ys.push(py);
            py *= z.im;
        }
        let exps = (smin..=smax)
            .map(|s| cexp(kappa * (z.im * lit(s as f64))))
            .collect();
        PowerTable { xs, ys, exps, smin }
    }

    pub fn for_poly(p: &ExpPoly<T>, z: Point2<T>) -> Self {
        let (j, k, s0, s1) = p.extents();
        Self::new(z, p.kappa, j, k, s0, s1)
    }

    #[inline]
    fn factor(&self, m: Monomial) -> Complex<T> {
        self.exps[(m.sigma - self.smin) as usize] * (self.xs[m.x as usize] * self.ys[m.y as usize])
    }
}

/// Moments `I_m(β) = ∫_0^1 t^m e^{βt} dt` for `m = 0..=m_max`.
///
/// Power series for `|β| ≤ 1`; otherwise the upward recurrence
/// `I_m = (e^β − m I_{m−1})/β` while `m ≤ |β|` and the downward recurrence
/// `I_{m−1} = (e^β − β I_m)/m` above, each used only where it is stable.
pub fn exp_moments<T: Real>(beta: Complex<T>, m_max: usize) -> Vec<Complex<T>> {
    let mag = cabs(beta);
    let mut out = vec![czero::<T>(); m_max + 1];
    if mag <= T::one() {
        for (m, slot) in out.iter_mut().enumerate() {
            *slot = moment_series(beta, m);
        }
        return out;
    }
    let e = cexp(beta);
    let split = to_f64(mag).floor() as usize;
    out[0] = cexpm1(beta) / beta;
    for m in 1..=split.min(m_max) {
        out[m] = (e - out[m - 1] * from_usize::<T>(m)) / beta;
    }
    if split < m_max {
        let top = m_max.max(2 * split + 2) + 60;
        let mut cur = e / (crate::scalar::creal(from_usize::<T>(top + 1)) - beta);
        for m in (split + 2..=top).rev() {
            let prev = (e - beta * cur) / from_usize::<T>(m);
            if m - 1 <= m_max {
                out[m - 1] = prev;
            }
            cur = prev;
        }
    }
    out
}

/// `I_m(β) = Σ_i β^i / (i! (m + i + 1))`.
pub fn moment_series<T: Real>(beta: Complex<T>, m: usize) -> Complex<T> {
    let mut term = cone::<T>();
    let mut sum = czero::<T>();
    for i in 0..200usize {
        let add = term / from_usize::<T>(m + i + 1);
        sum += add;
        if i > 2 && cabs(add) <= T::default_epsilon() * cabs(sum) * lit(0.25) {
            break;
        }
        term = term * beta / from_usize::<T>(i + 1);
    }
    sum
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::{LineIntegrator, QuadratureRule};
    use proptest::prelude::*;

    fn k(re: f64) -> Complex<f64> {
        Complex::new(re, 0.0)
    }

    /// u₂ = −sinh(cy)/c
    fn u2(c: f64) -> ExpPoly<f64> {
        ExpPoly::term(k(c), 0, 0, 1, k(-0.5 / c))
            .checked_add(&ExpPoly::term(k(c), 0, 0, -1, k(0.5 / c)))
            .unwrap()
    }

    #[test]
    fn eval_closed_forms() {
        let u0 = ExpPoly::exp_y(k(1.0), 1);
        assert!((u0.eval(Complex::new(0.0, 0.0)) - 1.0).norm() < 1e-15);
        let v = u2(1.0).eval(Complex::new(0.0, 1.0));
        assert!((v.re + 1.0f64.sinh()).abs() < 1e-15);
        // u₃ = (x² − y/c) e^{cy} + sinh(cy)/c²
        let c = 1.0;
        let u3 = ExpPoly::term(k(c), 2, 0, 1, k(1.0))
            .checked_add(&ExpPoly::term(k(c), 0, 1, 1, k(-1.0 / c)))
            .unwrap()
            .checked_sub(&u2(c).scale(k(1.0 / c)))
            .unwrap();
        assert!((u3.eval(Complex::new(1.0, 0.0)) - 1.0).norm() < 1e-15);
    }

    #[test]
    fn arithmetic() {
        let e = ExpPoly::term(k(1.0), 1, 0, 1, k(1.0));
        let x2 = e.mul_x();
        assert_eq!(x2.coefficient(Monomial::new(2, 0, 1)), k(1.0));
        let one = ExpPoly::exp_y(k(1.0), 1)
            .checked_mul(&ExpPoly::exp_y(k(1.0), -1))
            .unwrap();
        assert_eq!(one.len(), 1);
        assert_eq!(one.coefficient(Monomial::new(0, 0, 0)), k(1.0));
        let sinh_over_c = u2(1.0).neg();
        assert!(u2(1.0).checked_add(&sinh_over_c).unwrap().is_empty());
    }

    #[test]
    fn kappa_mismatch() {
        let a = ExpPoly::exp_y(k(1.0), 1);
        let b = ExpPoly::exp_y(k(2.0), 1);
        assert_eq!(a.checked_add(&b), Err(Error::KappaMismatch));
        assert_eq!(a.checked_mul(&b), Err(Error::KappaMismatch));
        let ci = ExpPoly::exp_y(Complex::new(0.0, 2.0), 1);
        assert_eq!(ci.conj_real_kappa(), Err(Error::ComplexKappa));
    }

    #[test]
    fn zero_kappa_collapses_sigma() {
        let p = ExpPoly::term(k(0.0), 0, 3, 1, k(2.0));
        assert_eq!(p.coefficient(Monomial::new(0, 3, 0)), k(2.0));
        let q = p.integrate_y_from(0.5);
        let y: f64 = 0.9;
        let expect = 0.5 * (y.powi(4) - 0.5f64.powi(4));
        assert!((q.eval(Complex::new(0.3, y)).re - expect).abs() < 1e-15);
    }

    #[test]
    fn segment_integrals() {
        let one = ExpPoly::constant(k(1.0), k(1.0));
        let v = one.integrate_segment(Complex::new(0.0, 0.0), Complex::new(1.0, 1.0));
        assert!((v - Complex::new(1.0, 1.0)).norm() < 1e-15);
        let e = ExpPoly::exp_y(k(1.0), 1);
        let v = e.integrate_segment(Complex::new(0.0, 0.0), Complex::new(0.0, 1.0));
        assert!((v - Complex::new(0.0, std::f64::consts::E - 1.0)).norm() < 1e-15);
        let xe = ExpPoly::term(k(1.0), 1, 0, 1, k(1.0));
        let li = LineIntegrator::new(QuadratureRule::gauss(64)).unwrap();
        let a = Complex::new(0.0, 0.0);
        let b = Complex::new(1.0, 1.0);
        let q = li.integrate_segment(&|z| xe.eval(z), a, b).unwrap();
        assert!((xe.integrate_segment(a, b) - q).norm() < 1e-14);
    }

    #[test]
    fn moments_seam_at_switch() {
        for arg in [0.0, 0.7, 1.9, 3.1, 4.4] {
            let dir = Complex::new(f64::cos(arg), f64::sin(arg));
            let below = exp_moments(dir * (1.0 - 1e-12), 30);
            let above = exp_moments(dir * (1.0 + 1e-12), 30);
            for m in 0..=30 {
                let series = moment_series(dir * (1.0 + 1e-12), m);
                assert!((above[m] - series).norm() <= 1e-15 * series.norm().max(1e-300) * 4.0);
                assert!((above[m] - below[m]).norm() <= 1e-11 * series.norm());
            }
        }
    }

    #[test]
    fn moments_at_zero_and_large() {
        let z = exp_moments(Complex::new(0.0, 0.0), 5);
        for (m, v) in z.iter().enumerate() {
            assert!((v.re - 1.0 / (m as f64 + 1.0)).abs() < 1e-16);
        }
        let li = crate::quadrature::GaussLegendre::<f64>::new(80);
        for beta in [Complex::new(-20.0, 3.0), Complex::new(12.0, 0.0), Complex::new(0.0, 7.5)] {
            let ms = exp_moments(beta, 25);
            for (m, v) in ms.iter().enumerate() {
                let q: Complex<f64> = li.integrate(0.0, 1.0, |t| (beta * t).exp() * t.powi(m as i32));
                assert!((v - q).norm() <= 1e-13 * q.norm().max(1e-12), "beta={beta} m={m}");
            }
        }
    }

    #[test]
    fn potential_recovers_function() {
        // φ = x y e^{y} + 2x: P = y e^y + 2, Q = x e^y + x y e^y
        let kap = k(1.0);
        let p = ExpPoly::term(kap, 0, 1, 1, k(1.0))
            .checked_add(&ExpPoly::constant(kap, k(2.0)))
            .unwrap();
        let q = ExpPoly::term(kap, 1, 0, 1, k(1.0))
            .checked_add(&ExpPoly::term(kap, 1, 1, 1, k(1.0)))
            .unwrap();
        let z0 = Complex::new(0.2, -0.3);
        let phi = ExpPoly::potential(&p, &q, z0).unwrap();
        let f = |z: Complex<f64>| z.re * z.im * z.im.exp() + 2.0 * z.re;
        for z in [Complex::new(0.5, 0.1), Complex::new(-0.4, 0.7)] {
            assert!((phi.eval(z).re - (f(z) - f(z0))).abs() < 1e-14);
        }
    }

    #[test]
    fn derivatives_and_dump() {
        let p = ExpPoly::term(k(2.0), 1, 2, -1, k(3.0));
        let (gx, gy) = p.gradient_at(Complex::new(0.5, 0.25));
        let (x, y): (f64, f64) = (0.5, 0.25);
        assert!((gx.re - 3.0 * y * y * (-2.0 * y).exp()).abs() < 1e-15);
        let expect = 3.0 * x * (2.0 * y - 2.0 * y * y) * (-2.0 * y).exp();
        assert!((gy.re - expect).abs() < 1e-15);
        let d = p.dump();
        assert!(d.lines().nth(1).unwrap().starts_with("1 2 -1 3.0"));
    }

    fn arb_poly() -> impl Strategy<Value = ExpPoly<f64>> {
        (
            (-5.0f64..5.0, -5.0f64..5.0),
            prop::collection::vec(
                (0u32..=5, 0u32..=5, -1i32..=1, -1.0f64..1.0, -1.0f64..1.0),
                1..10,
            ),
        )
            .prop_map(|((kr, ki), terms)| {
                let mut kap = Complex::new(kr, ki);
                if kap.norm() > 5.0 {
                    kap = kap / kap.norm() * 5.0;
                }
                let mut p = ExpPoly::zero(kap);
                for (j, kk, s, re, im) in terms {
                    p = p
                        .checked_add(&ExpPoly::term(kap, j, kk, s, Complex::new(re, im)))
                        .unwrap();
                }
                p
            })
    }

    proptest! {
        #[test]
        fn segment_integral_matches_gauss(
            p in arb_poly(),
            ra in 0.0f64..1.0, ta in 0.0f64..6.3,
            rb in 0.0f64..1.0, tb in 0.0f64..6.3,
        ) {
            let a = Complex::from_polar(ra, ta);
            let b = Complex::from_polar(rb, tb);
            let li = LineIntegrator::new(QuadratureRule::gauss(64)).unwrap();
            let q = li.integrate_segment(&|z| p.eval(z), a, b).unwrap();
            let e = p.integrate_segment(a, b);
            let scale: f64 = p.terms().map(|(m, c)| c.norm() * (m.sigma as f64 * p.kappa()).norm().exp()).sum();
            prop_assert!((e - q).norm() <= 1e-12 * scale.max(1.0), "{e} vs {q}");
        }

        #[test]
        fn segment_integral_is_additive(p in arb_poly(), q in arb_poly()) {
            let q = ExpPoly { kappa: p.kappa(), terms: q.terms.clone() };
            let a = Complex::new(-0.3, 0.2);
            let b = Complex::new(0.6, -0.5);
            let lhs = p.checked_add(&q).unwrap().integrate_segment(a, b);
            let rhs = p.integrate_segment(a, b) + q.integrate_segment(a, b);
            let scale: f64 = p.terms().chain(q.terms()).map(|(_, c)| c.norm()).sum::<f64>() * 1e3;
            prop_assert!((lhs - rhs).norm() <= 1e-14 * scale.max(1.0));
        }
    }
}
