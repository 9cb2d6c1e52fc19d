//! Line integrals along polygonal paths and the `Ā` antiderivative operator.

use std::ops::{Add, Mul};

use nalgebra::DMatrix;
use num_complex::Complex;
use num_traits::Zero;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};
use crate::scalar::{czero, from_usize, lit, to_f64, Real};

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Clone, Debug)]
pub struct GaussLegendre<T: Real> {
    nodes: Vec<T>,
    weights: Vec<T>,
}

impl<T: Real> GaussLegendre<T> {
    /// `n`-point rule; nodes by Newton iteration on `P_n`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![T::zero(); n];
        let mut weights = vec![T::zero(); n];
        let nt = from_usize::<T>(n);
        for i in 0..n.div_ceil(2) {
            let guess = T::pi() * (from_usize::<T>(i) + lit(0.75)) / (nt + lit(0.5));
            let mut x = guess.cos();
            let mut dp = T::one();
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= lit::<T>(2.0) * T::default_epsilon() {
                    let (_, d) = legendre(n, x);
                    dp = d;
                    break;
                }
            }
            let w = lit::<T>(2.0) / ((T::one() - x * x) * dp * dp);
            nodes[i] = x;
            nodes[n - 1 - i] = -x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = T::zero();
        }
        nodes.reverse();
        weights.reverse();
        GaussLegendre { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Nodes on `[-1, 1]`, ascending.
    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    /// `∫_a^b f`.
    pub fn integrate<V, F>(&self, a: T, b: T, f: F) -> V
    where
        V: Zero + Add<Output = V> + Mul<T, Output = V>,
        F: Fn(T) -> V,
    {
        let half = (b - a) * lit(0.5);
        let mid = (a + b) * lit(0.5);
        let mut acc = V::zero();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc = acc + f(mid + half * *x) * *w;
        }
        acc * half
    }
}

fn legendre<T: Real>(n: usize, x: T) -> (T, T) {
    let mut p0 = T::one();
    let mut p1 = x;
    for k in 2..=n {
        let kt = from_usize::<T>(k);
        let p2 = ((kt + kt - T::one()) * x * p1 - (kt - T::one()) * p0) / kt;
        p0 = p1;
        p1 = p2;
    }
    let nt = from_usize::<T>(n);
    let d = nt * (x * p1 - p0) / (x * x - T::one());
    (p1, d)
}

/// Integration scheme used on each path segment.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QuadratureMode {
    #[default]
    Gauss,
    /// Cubic not-a-knot spline through equispaced samples, integrated exactly.
    Spline,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct QuadratureRule {
    pub mode: QuadratureMode,
    pub nodes_per_segment: usize,
    pub spline_samples: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule {
            mode: QuadratureMode::Gauss,
            nodes_per_segment: 24,
            spline_samples: 64,
        }
    }
}

impl QuadratureRule {
    pub fn gauss(nodes: usize) -> Self {
        QuadratureRule {
            mode: QuadratureMode::Gauss,
            nodes_per_segment: nodes,
            ..Default::default()
        }
    }

    pub fn spline(samples: usize) -> Self {
        QuadratureRule {
            mode: QuadratureMode::Spline,
            spline_samples: samples,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            QuadratureMode::Gauss if self.nodes_per_segment == 0 => Err(Error::InvalidArgument(
                "gauss rule needs at least one node".into(),
            )),
            QuadratureMode::Spline if self.spline_samples < 4 => Err(Error::InvalidArgument(
                "spline rule needs at least four samples".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Polyline `z_0 → z_1 → … → z_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Path<T: Real> {
    vertices: Vec<Point2<T>>,
}

impl<T: Real> Path<T> {
    pub fn new(vertices: Vec<Point2<T>>) -> Result<Self> {
        if vertices.len() < 2 {
            return Err(Error::Path("a path needs at least two vertices".into()));
        }
        if vertices.iter().any(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(Error::Path("non-finite vertex".into()));
        }
        Ok(Path { vertices })
    }

    pub fn segment(a: Point2<T>, b: Point2<T>) -> Self {
        Path {
            vertices: vec![a, b],
        }
    }

    /// Horizontal leg to `(target.x, base.y)` followed by a vertical leg.
    pub fn horizontal_then_vertical(base: Point2<T>, target: Point2<T>) -> Self {
        let corner = Complex::new(target.re, base.im);
        Path {
            vertices: vec![base, corner, target],
        }
    }

    pub fn vertices(&self) -> &[Point2<T>] {
        &self.vertices
    }

    pub fn start(&self) -> Point2<T> {
        self.vertices[0]
    }

    pub fn end(&self) -> Point2<T> {
        self.vertices[self.vertices.len() - 1]
    }

    pub fn segments(&self) -> impl Iterator<Item = (Point2<T>, Point2<T>)> + '_ {
        self.vertices.windows(2).map(|w| (w[0], w[1]))
    }
}

/// Cumulative integration weights of the not-a-knot cubic spline through
/// `n` equispaced samples on `[0, 1]`: row `j` integrates over `[0, t_j]`.
pub fn spline_cumulative_weights<T: Real>(n: usize) -> Result<DMatrix<T>> {
    if n < 4 {
        return Err(Error::InvalidArgument(
            "not-a-knot spline needs at least four samples".into(),
        ));
    }
    let h = T::one() / from_usize::<T>(n - 1);
    let six_h2 = lit::<T>(6.0) / (h * h);
    let mut a = DMatrix::<T>::zeros(n, n);
    let mut b = DMatrix::<T>::zeros(n, n);
    a[(0, 0)] = T::one();
    a[(0, 1)] = lit(-2.0);
    a[(0, 2)] = T::one();
    a[(n - 1, n - 3)] = T::one();
    a[(n - 1, n - 2)] = lit(-2.0);
    a[(n - 1, n - 1)] = T::one();
    for i in 1..n - 1 {
        a[(i, i - 1)] = T::one();
        a[(i, i)] = lit(4.0);
        a[(i, i + 1)] = T::one();
        b[(i, i - 1)] = six_h2;
        b[(i, i)] = -six_h2 - six_h2;
        b[(i, i + 1)] = six_h2;
    }
    // Second derivatives as a linear map of the samples.
    let k = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::InvalidArgument("spline system is singular".into()))?;
    let mut w = DMatrix::<T>::zeros(n, n);
    let half = h * lit(0.5);
    let h3 = h * h * h / lit(24.0);
    for j in 1..n {
        for col in 0..n {
            let prev = w[(j - 1, col)];
            let mut v = prev;
            if col == j - 1 || col == j {
                v += half;
            }
            v -= h3 * (k[(j - 1, col)] + k[(j, col)]);
            w[(j, col)] = v;
        }
    }
    Ok(w)
}

/// Evaluates complex line integrals with a fixed [`QuadratureRule`].
#[derive(Clone, Debug)]
pub struct LineIntegrator<T: Real> {
    rule: QuadratureRule,
    gauss: GaussLegendre<T>,
    spline_weights: Vec<T>,
}

impl<T: Real> LineIntegrator<T> {
    pub fn new(rule: QuadratureRule) -> Result<Self> {
        rule.validate()?;
        let gauss = GaussLegendre::new(rule.nodes_per_segment.max(1));
        let spline_weights = if rule.mode == QuadratureMode::Spline {
            let w = spline_cumulative_weights::<T>(rule.spline_samples)?;
            let last = rule.spline_samples - 1;
            (0..rule.spline_samples).map(|i| w[(last, i)]).collect()
        } else {
            Vec::new()
        };
        Ok(LineIntegrator {
            rule,
            gauss,
            spline_weights,
        })
    }

    pub fn rule(&self) -> &QuadratureRule {
        &self.rule
    }

    /// `∫_a^b g(z) dz` along the straight segment.
    pub fn integrate_segment<F>(&self, g: &F, a: Point2<T>, b: Point2<T>) -> Result<Complex<T>>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let d = b - a;
        let mut acc = czero::<T>();
        let mut eval = |t: T, w: T| -> Result<()> {
            let z = a + d * t;
            let v = g(z);
            if !(v.re.is_finite() && v.im.is_finite()) {
                return Err(Error::Integration {
                    x: to_f64(z.re),
                    y: to_f64(z.im),
                });
            }
            acc += v * w;
            Ok(())
        };
        match self.rule.mode {
            QuadratureMode::Gauss => {
                let half: T = lit(0.5);
                for (x, w) in self.gauss.nodes.iter().zip(&self.gauss.weights) {
                    eval(half + half * *x, half * *w)?;
                }
            }
            QuadratureMode::Spline => {
                let n = self.spline_weights.len();
                let last = from_usize::<T>(n - 1);
                for (i, w) in self.spline_weights.iter().enumerate() {
                    eval(from_usize::<T>(i) / last, *w)?;
                }
            }
        }
        Ok(acc * d)
    }

    /// `∫_path g(z) dz`.
    pub fn integrate_path<F>(&self, g: &F, path: &Path<T>) -> Result<Complex<T>>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let mut acc = czero::<T>();
        for (a, b) in path.segments() {
            acc += self.integrate_segment(g, a, b)?;
        }
        Ok(acc)
    }
}

const COMPAT_SAMPLES: usize = 32;
const COMPAT_STEP: f64 = 1e-3;
const COMPAT_TOL: f64 = 1e-4;

/// The operator `Ā[Φ](z) = 2 Re ∫_{base}^{z} conj(Φ) dζ`, the real
/// potential `φ` with `∂_z̄ φ = Φ`, for `Φ` with `∂_y Re Φ = ∂_x Im Φ`.
#[derive(Clone)]
pub struct Abar<'d, T: Real> {
    integrator: LineIntegrator<T>,
    domain: Option<&'d Domain<T>>,
    check: bool,
}

impl<'d, T: Real> Abar<'d, T> {
    pub fn new(rule: QuadratureRule) -> Result<Self> {
        Ok(Abar {
            integrator: LineIntegrator::new(rule)?,
            domain: None,
            check: true,
        })
    }

    /// Restricts paths to the closed domain and samples the compatibility
    /// check inside it.
    pub fn within(mut self, domain: &'d Domain<T>) -> Self {
        self.domain = Some(domain);
        self
    }

    /// Enables or disables the sampled compatibility check on every call.
    pub fn checked(mut self, check: bool) -> Self {
        self.check = check;
        self
    }

    /// `Ā[Φ]` from `base` to `target` along the horizontal-then-vertical path.
    pub fn eval<F>(&self, phi: &F, base: Point2<T>, target: Point2<T>) -> Result<T>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let path = Path::horizontal_then_vertical(base, target);
        self.eval_along(phi, &path)
    }

    /// `Ā[Φ]` along an explicit path.
    pub fn eval_along<F>(&self, phi: &F, path: &Path<T>) -> Result<T>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        if let Some(d) = self.domain {
            let tol = d.radius() * lit(1e-10);
            for (a, b) in path.segments() {
                for k in 0..=64 {
                    let z = a + (b - a) * (from_usize::<T>(k) / lit(64.0));
                    if !d.contains_closed(z, tol) {
                        return Err(Error::Path(format!(
                            "path leaves the domain near ({:.6}, {:.6})",
                            to_f64(z.re),
                            to_f64(z.im)
                        )));
                    }
                }
            }
        }
        if self.check {
            self.check_compatibility(phi, path)?;
        }
        let conj = |z: Point2<T>| phi(z).conj();
        let v = self.integrator.integrate_path(&conj, path)?;
        Ok(v.re + v.re)
    }

    /// Verifies `∂_y Re Φ = ∂_x Im Φ` at seeded random points by centered
    /// differences.
    pub fn check_compatibility<F>(&self, phi: &F, path: &Path<T>) -> Result<()>
    where
        F: Fn(Point2<T>) -> Complex<T> + ?Sized,
    {
        let mut rng = StdRng::seed_from_u64(0x0ab4_0c0e);
        let samples: Vec<Point2<T>> = match self.domain {
            Some(d) => {
                let [x0, x1, y0, y1] = d.bounding_box();
                let mut pts = Vec::with_capacity(COMPAT_SAMPLES);
                while pts.len() < COMPAT_SAMPLES {
                    let (u, v): (f64, f64) = (rng.random(), rng.random());
                    let p = Complex::new(x0 + (x1 - x0) * lit(u), y0 + (y1 - y0) * lit(v));
                    if d.contains(p) {
                        pts.push(p);
                    }
                }
                pts
            }
            None => {
                let vs = path.vertices();
                let (mut x0, mut x1, mut y0, mut y1) = (vs[0].re, vs[0].re, vs[0].im, vs[0].im);
                for v in vs {
                    x0 = x0.min(v.re);
                    x1 = x1.max(v.re);
                    y0 = y0.min(v.im);
                    y1 = y1.max(v.im);
                }
                let pad = lit::<T>(1e-3);
                (0..COMPAT_SAMPLES)
                    .map(|_| {
                        let (u, v): (f64, f64) = (rng.random(), rng.random());
                        Complex::new(
                            x0 - pad + (x1 - x0 + pad + pad) * lit(u),
                            y0 - pad + (y1 - y0 + pad + pad) * lit(v),
                        )
                    })
                    .collect()
            }
        };
        let h: T = lit(COMPAT_STEP);
        let two_h = h + h;
        let mut worst = T::zero();
        let mut scale = T::one();
        for p in samples {
            let dy = (phi(p + Complex::new(T::zero(), h)) - phi(p - Complex::new(T::zero(), h))) / two_h;
            let dx = (phi(p + Complex::new(h, T::zero())) - phi(p - Complex::new(h, T::zero()))) / two_h;
            let r = (dy.re - dx.im).abs();
            if !r.is_finite() {
                return Err(Error::Integration {
                    x: to_f64(p.re),
                    y: to_f64(p.im),
                });
            }
            worst = worst.max(r);
            scale = scale.max(dy.re.abs()).max(dx.im.abs());
        }
        if worst > lit::<T>(COMPAT_TOL) * scale {
            return Err(Error::Compatibility {
                residual: to_f64(worst),
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn gauss_rule_is_exact_to_degree() {
        for n in [1usize, 2, 5, 12, 24, 64] {
            let g = GaussLegendre::<f64>::new(n);
            let wsum: f64 = g.weights().iter().sum();
            assert!((wsum - 2.0).abs() < 1e-13, "n={n}");
            let deg = 2 * n - 1;
            let v: f64 = g.integrate(0.0, 1.0, |x| x.powi(deg as i32));
            assert!((v - 1.0 / (deg as f64 + 1.0)).abs() < 1e-14, "n={n}");
        }
    }

    #[test]
    fn gauss_f32() {
        let g = GaussLegendre::<f32>::new(8);
        let v: f32 = g.integrate(0.0, 1.0, |x| x * x);
        assert!((v - 1.0 / 3.0).abs() < 1e-6);
    }

    #[test]
    fn unit_integrand_gives_displacement() {
        let li = LineIntegrator::<f64>::new(QuadratureRule::default()).unwrap();
        let one = |_z: Complex<f64>| Complex::new(1.0, 0.0);
        let v = li
            .integrate_segment(&one, Complex::new(0.0, 0.0), Complex::new(1.0, 1.0))
            .unwrap();
        assert!((v - Complex::new(1.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn z_integrand_on_two_leg_path() {
        let li = LineIntegrator::<f64>::new(QuadratureRule::default()).unwrap();
        let path = Path::new(vec![
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
            Complex::new(1.0, 1.0),
        ])
        .unwrap();
        let v = li.integrate_path(&|z| z, &path).unwrap();
        assert!((v - Complex::new(0.0, 1.0)).norm() < 1e-14);
    }

    #[test]
    fn nonfinite_integrand_is_an_error() {
        let li = LineIntegrator::<f64>::new(QuadratureRule::default()).unwrap();
        let r = li.integrate_segment(
            &|_z: Complex<f64>| Complex::new(f64::NAN, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(1.0, 0.0),
        );
        assert!(matches!(r, Err(Error::Integration { .. })));
    }

    #[test]
    fn spline_mode_integrates_cubics_exactly() {
        let li = LineIntegrator::<f64>::new(QuadratureRule::spline(9)).unwrap();
        let g = |z: Complex<f64>| z * z * z - z * 2.0 + Complex::new(0.5, 1.0);
        let a = Complex::new(-0.3, 0.1);
        let b = Complex::new(0.7, 0.4);
        let exact = |z: Complex<f64>| z.powi(4) / 4.0 - z * z + Complex::new(0.5, 1.0) * z;
        let v = li.integrate_segment(&g, a, b).unwrap();
        assert!((v - (exact(b) - exact(a))).norm() < 1e-13);
    }

    #[test]
    fn spline_cumulative_rows() {
        let w = spline_cumulative_weights::<f64>(11).unwrap();
        // ∫_0^{t_j} t^3 dt = t_j^4 / 4
        for j in 0..11 {
            let t = j as f64 / 10.0;
            let v: f64 = (0..11).map(|i| w[(j, i)] * (i as f64 / 10.0).powi(3)).sum();
            assert!((v - t.powi(4) / 4.0).abs() < 1e-15);
        }
    }

    #[test]
    fn abar_of_z_is_modulus_squared() {
        let abar = Abar::<f64>::new(QuadratureRule::default()).unwrap();
        let v = abar
            .eval(&|z| z, Complex::new(0.0, 0.0), Complex::new(0.6, -0.3))
            .unwrap();
        assert!((v - 0.45).abs() < 1e-14);
    }

    #[test]
    fn abar_rejects_non_gradient() {
        let abar = Abar::<f64>::new(QuadratureRule::default()).unwrap();
        // Φ = 2y + ix has ∂_y Re Φ = 2 but ∂_x Im Φ = 1.
        let r = abar.eval(
            &|z: Complex<f64>| Complex::new(0.0, 1.0) * z.conj() + Complex::new(z.im, 0.0),
            Complex::new(0.0, 0.0),
            Complex::new(0.5, 0.5),
        );
        assert!(matches!(r, Err(Error::Compatibility { .. })));
    }

    #[test]
    fn abar_path_outside_domain() {
        let d = Domain::<f64>::unit_disk();
        let abar = Abar::new(QuadratureRule::default()).unwrap().within(&d);
        let r = abar.eval(&|z| z, Complex::new(0.0, 0.0), Complex::new(2.0, 0.0));
        assert!(matches!(r, Err(Error::Path(_))));
    }

    proptest! {
        #[test]
        fn abar_is_path_independent(
            tx in -0.6f64..0.6, ty in -0.6f64..0.6,
            mx in -0.6f64..0.6, my in -0.6f64..0.6,
        ) {
            // Φ = ∂_z̄ of φ = x²y + e^x cos y: Φ = ½(φ_x + iφ_y).
            let phi = |z: Complex<f64>| {
                let (x, y) = (z.re, z.im);
                Complex::new(x * y + 0.5 * x.exp() * y.cos(), 0.5 * x * x - 0.5 * x.exp() * y.sin())
            };
            let abar = Abar::<f64>::new(QuadratureRule::default()).unwrap().checked(false);
            let base = Complex::new(0.0, 0.0);
            let target = Complex::new(tx, ty);
            let direct = abar.eval(&phi, base, target).unwrap();
            let detour = Path::new(vec![base, Complex::new(mx, my), target]).unwrap();
            let other = abar.eval_along(&phi, &detour).unwrap();
            prop_assert!((direct - other).abs() < 1e-10);
            let exact = tx * tx * ty + tx.exp() * ty.cos() - 1.0;
            prop_assert!((direct - exact).abs() < 1e-12);
        }
    }
}
