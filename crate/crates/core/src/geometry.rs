//! Planar domains: boundary parametrizations, interior tests, collocation
//! point placement and interior evaluation grids.

use std::sync::Arc;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;
use crate::scalar::{cabs, from_usize, lit, Real};

/// A point of the plane, read interchangeably as the complex number `x + iy`.
pub type Point2<T> = Complex<T>;

/// Parametrized closed curve `t ↦ (γ(t), γ'(t))` on `t ∈ [0, 1)`.
pub type CurveFn<T> = Arc<dyn Fn(T) -> (Point2<T>, Point2<T>) + Send + Sync>;

const ARCLENGTH_PANELS: usize = 256;
const ARCLENGTH_NODES: usize = 16;
const POLYGON_SAMPLES: usize = 4096;

#[derive(Clone)]
enum Shape<T: Real> {
    Ellipse {
        a: T,
        b: T,
    },
    /// Unit circle whose arc `|θ| ≤ half_angle` is replaced by two segments
    /// meeting at the apex `(1 + height, 0)`. Parametrized by arclength,
    /// starting at the apex.
    Peaked {
        height: T,
        half_angle: T,
        seg_len: T,
        arc_len: T,
    },
    Custom(CurveFn<T>),
}

/// Closed, positively oriented, piecewise-smooth boundary curve.
#[derive(Clone)]
pub struct BoundaryCurve<T: Real> {
    shape: Shape<T>,
    /// Cumulative arclength at panel breakpoints `k / ARCLENGTH_PANELS`.
    cumulative: Vec<T>,
    corners: Vec<T>,
    gauss: GaussLegendre<T>,
}

impl<T: Real> BoundaryCurve<T> {
    fn new(shape: Shape<T>) -> Self {
        let corners = match &shape {
            Shape::Peaked {
                seg_len, arc_len, ..
            } => {
                let total = *seg_len + *seg_len + *arc_len;
                vec![T::zero(), *seg_len / total, (*seg_len + *arc_len) / total]
            }
            _ => Vec::new(),
        };
        let mut curve = BoundaryCurve {
            shape,
            cumulative: Vec::new(),
            corners,
            gauss: GaussLegendre::new(ARCLENGTH_NODES),
        };
        let mut cumulative = Vec::with_capacity(ARCLENGTH_PANELS + 1);
        cumulative.push(T::zero());
        let mut acc = T::zero();
        let dt = T::one() / from_usize::<T>(ARCLENGTH_PANELS);
        for k in 0..ARCLENGTH_PANELS {
            let a = from_usize::<T>(k) * dt;
            acc += curve.speed_integral(a, a + dt);
            cumulative.push(acc);
        }
        curve.cumulative = cumulative;
        curve
    }

    fn speed_integral(&self, a: T, b: T) -> T {
        self.gauss.integrate(a, b, |t| cabs(self.tangent(t)))
    }

    fn wrap(t: T) -> T {
        let w = t - t.floor();
        if w >= T::one() {
            T::zero()
        } else {
            w
        }
    }

    /// Point `γ(t)`; `t` is taken modulo 1.
    pub fn point(&self, t: T) -> Point2<T> {
        self.eval(Self::wrap(t)).0
    }

    /// Derivative `γ'(t)` (one-sided from the right at corners).
    pub fn tangent(&self, t: T) -> Point2<T> {
        self.eval(Self::wrap(t)).1
    }

    fn eval(&self, t: T) -> (Point2<T>, Point2<T>) {
        match &self.shape {
            Shape::Ellipse { a, b } => {
                let th = T::two_pi() * t;
                let (s, c) = (th.sin(), th.cos());
                (
                    Complex::new(*a * c, *b * s),
                    Complex::new(-*a * s, *b * c) * T::two_pi(),
                )
            }
            Shape::Peaked {
                height,
                half_angle,
                seg_len,
                arc_len,
            } => {
                let total = *seg_len + *seg_len + *arc_len;
                let s = t * total;
                let apex = Complex::new(T::one() + *height, T::zero());
                let upper = Complex::new(half_angle.cos(), half_angle.sin());
                let lower = upper.conj();
                if s < *seg_len {
                    let d = (upper - apex) / *seg_len;
                    (apex + d * s, d * total)
                } else if s < *seg_len + *arc_len {
                    let th = *half_angle + (s - *seg_len);
                    let (sn, cs) = (th.sin(), th.cos());
                    (Complex::new(cs, sn), Complex::new(-sn, cs) * total)
                } else {
                    let d = (apex - lower) / *seg_len;
                    (lower + d * (s - *seg_len - *arc_len), d * total)
                }
            }
            Shape::Custom(f) => f(t),
        }
    }

    /// Total arclength.
    pub fn length(&self) -> T {
        self.cumulative[ARCLENGTH_PANELS]
    }

    /// Parameter values where the tangent is discontinuous.
    pub fn corners(&self) -> &[T] {
        &self.corners
    }

    /// Inverse of the arclength function: the parameter `t` with `s(t) = s`.
    pub fn param_at_arclength(&self, s: T) -> T {
        let total = self.length();
        if let Shape::Peaked { .. } = self.shape {
            return s / total;
        }
        let s = s.max(T::zero()).min(total);
        let k = match self
            .cumulative
            .binary_search_by(|v| v.partial_cmp(&s).unwrap_or(std::cmp::Ordering::Less))
        {
            Ok(k) => return from_usize::<T>(k) / from_usize::<T>(ARCLENGTH_PANELS),
            Err(k) => k.saturating_sub(1).min(ARCLENGTH_PANELS - 1),
        };
        let dt = T::one() / from_usize::<T>(ARCLENGTH_PANELS);
        let t0 = from_usize::<T>(k) * dt;
        let (s0, s1) = (self.cumulative[k], self.cumulative[k + 1]);
        let mut t = t0 + dt * (s - s0) / (s1 - s0);
        let tol = lit::<T>(4.0) * T::default_epsilon();
        for _ in 0..30 {
            let f = s0 + self.speed_integral(t0, t) - s;
            let step = f / cabs(self.tangent(t));
            t -= step;
            t = t.max(t0).min(t0 + dt);
            if step.abs() <= tol {
                break;
            }
        }
        t
    }

    /// Unit outward normal at `γ(t)`; at corners the normalized mean of the
    /// two one-sided normals.
    pub fn outward_normal(&self, t: T) -> Point2<T> {
        let t = Self::wrap(t);
        let scale = lit::<T>(1e-12);
        let is_corner = self.corners.iter().any(|c| (*c - t).abs() <= scale);
        let n_of = |d: Point2<T>| {
            let r = cabs(d);
            Complex::new(d.im / r, -d.re / r)
        };
        if is_corner {
            let right = n_of(self.tangent(t));
            let left = n_of(self.tangent(t - lit(1e-9)));
            let m = right + left;
            m / cabs(m)
        } else {
            n_of(self.tangent(t))
        }
    }

    fn polygon(&self, count: usize) -> Vec<Point2<T>> {
        (0..count)
            .map(|k| self.point(from_usize::<T>(k) / from_usize::<T>(count)))
            .collect()
    }
}

/// Named family a domain belongs to.
#[derive(Clone, Debug, PartialEq)]
pub enum DomainKind<T: Real> {
    Disk,
    Ellipse { eccentricity: T },
    PeakedDisk { height: T, half_angle: T },
    Custom,
}

/// A bounded, simply connected region with a parametrized boundary and a
/// distinguished interior center.
#[derive(Clone)]
pub struct Domain<T: Real> {
    kind: DomainKind<T>,
    boundary: BoundaryCurve<T>,
    center: Point2<T>,
    polygon: Vec<Point2<T>>,
    radius: T,
    bbox: [T; 4],
}

/// How collocation points are spread along the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Placement {
    #[default]
    Arclength,
    Parameter,
}

/// Boundary points with their unit outward normals.
#[derive(Clone, Debug)]
pub struct CollocationSet<T: Real> {
    pub points: Vec<Point2<T>>,
    pub normals: Vec<Point2<T>>,
    pub params: Vec<T>,
}

impl<T: Real> CollocationSet<T> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

impl<T: Real> Domain<T> {
    fn from_parts(kind: DomainKind<T>, boundary: BoundaryCurve<T>, center: Point2<T>) -> Self {
        let polygon = boundary.polygon(POLYGON_SAMPLES);
        let radius = polygon
            .iter()
            .map(|p| cabs(*p - center))
            .fold(T::zero(), |a, b| a.max(b));
        let mut bbox = [polygon[0].re, polygon[0].re, polygon[0].im, polygon[0].im];
        for p in &polygon {
            bbox[0] = bbox[0].min(p.re);
            bbox[1] = bbox[1].max(p.re);
            bbox[2] = bbox[2].min(p.im);
            bbox[3] = bbox[3].max(p.im);
        }
        if let DomainKind::Ellipse { .. } | DomainKind::Disk = kind {
            if let Shape::Ellipse { a, b } = boundary.shape {
                bbox = [-a, a, -b, b];
            }
        }
        Domain {
            kind,
            boundary,
            center,
            polygon,
            radius,
            bbox,
        }
    }

    /// The unit disk centred at the origin.
    pub fn unit_disk() -> Self {
        let boundary = BoundaryCurve::new(Shape::Ellipse {
            a: T::one(),
            b: T::one(),
        });
        Self::from_parts(DomainKind::Disk, boundary, Complex::new(T::zero(), T::zero()))
    }

    /// Ellipse of eccentricity `e` and area π, semi-axes
    /// `a = (1 − e²)^{−1/4}`, `b = (1 − e²)^{1/4}`.
    pub fn ellipse(e: T) -> Result<Self> {
        if !(e >= T::zero() && e < T::one()) {
            return Err(Error::DomainParameter(format!(
                "eccentricity must lie in [0, 1), got {e:e}"
            )));
        }
        let s = (T::one() - e * e).sqrt().sqrt();
        let boundary = BoundaryCurve::new(Shape::Ellipse {
            a: T::one() / s,
            b: s,
        });
        let kind = if e == T::zero() {
            DomainKind::Disk
        } else {
            DomainKind::Ellipse { eccentricity: e }
        };
        Ok(Self::from_parts(kind, boundary, Complex::new(T::zero(), T::zero())))
    }

    /// Unit disk with a peak of the given height on the positive x-axis; the
    /// arc `|θ| ≤ π/8` is replaced by two segments to `(1 + height, 0)`.
    pub fn peaked_disk(height: T) -> Result<Self> {
        Self::peaked_disk_with_sector(height, T::pi() / lit(8.0))
    }

    /// Peaked disk with an explicit half-angle of the replaced sector.
    pub fn peaked_disk_with_sector(height: T, half_angle: T) -> Result<Self> {
        if !(height > T::zero()) || !height.is_finite() {
            return Err(Error::DomainParameter(format!(
                "peak height must be positive, got {height:e}"
            )));
        }
        if !(half_angle > T::zero() && half_angle < T::frac_pi_2()) {
            return Err(Error::DomainParameter(format!(
                "sector half-angle must lie in (0, π/2), got {half_angle:e}"
            )));
        }
        let apex = Complex::new(T::one() + height, T::zero());
        let upper = Complex::new(half_angle.cos(), half_angle.sin());
        let seg_len = cabs(upper - apex);
        let arc_len = T::two_pi() - half_angle - half_angle;
        let boundary = BoundaryCurve::new(Shape::Peaked {
            height,
            half_angle,
            seg_len,
            arc_len,
        });
        Ok(Self::from_parts(
            DomainKind::PeakedDisk { height, half_angle },
            boundary,
            Complex::new(T::zero(), T::zero()),
        ))
    }

    /// Domain bounded by a user curve `t ↦ (γ(t), γ'(t))`, `t ∈ [0, 1)`.
    /// The curve must be simple, positively oriented and enclose `center`.
    pub fn custom(curve: CurveFn<T>, center: Point2<T>) -> Result<Self> {
        let boundary = BoundaryCurve::new(Shape::Custom(curve));
        let d = Self::from_parts(DomainKind::Custom, boundary, center);
        let poly = &d.polygon;
        let mut area = T::zero();
        for k in 0..poly.len() {
            let (p, q) = (poly[k], poly[(k + 1) % poly.len()]);
            area += p.re * q.im - q.re * p.im;
        }
        if !(area > T::zero()) {
            return Err(Error::Geometry(
                "boundary is not positively oriented".into(),
            ));
        }
        if !polygon_is_simple(poly) {
            return Err(Error::Geometry("boundary curve self-intersects".into()));
        }
        if !polygon_contains(poly, center) {
            return Err(Error::Geometry("center lies outside the boundary".into()));
        }
        Ok(d)
    }

    pub fn kind(&self) -> &DomainKind<T> {
        &self.kind
    }

    pub fn boundary(&self) -> &BoundaryCurve<T> {
        &self.boundary
    }

    pub fn center(&self) -> Point2<T> {
        self.center
    }

    /// Largest distance from the center to the boundary.
    pub fn radius(&self) -> T {
        self.radius
    }

    /// `[x_min, x_max, y_min, y_max]`.
    pub fn bounding_box(&self) -> [T; 4] {
        self.bbox
    }

    /// Closed-form implicit function for elliptic boundaries
    /// (`x²/a² + y²/b² − 1`), `None` otherwise.
    pub fn implicit(&self, p: Point2<T>) -> Option<T> {
        match self.boundary.shape {
            Shape::Ellipse { a, b } => {
                let (u, v) = ((p.re - self.center.re) / a, (p.im - self.center.im) / b);
                Some(u * u + v * v - T::one())
            }
            _ => None,
        }
    }

    /// Strict interior test.
    pub fn contains(&self, p: Point2<T>) -> bool {
        match &self.boundary.shape {
            Shape::Ellipse { .. } => self.implicit(p).is_some_and(|v| v < T::zero()),
            Shape::Peaked {
                height, half_angle, ..
            } => peaked_signed(*height, *half_angle, p) < T::zero(),
            Shape::Custom(_) => polygon_contains(&self.polygon, p),
        }
    }

    /// Interior-or-boundary test with absolute slack `tol`.
    pub fn contains_closed(&self, p: Point2<T>, tol: T) -> bool {
        match &self.boundary.shape {
            Shape::Ellipse { a, b } => {
                let v = self.implicit(p).unwrap_or(T::zero());
                v <= tol * lit(2.0) / a.min(*b)
            }
            Shape::Peaked {
                height, half_angle, ..
            } => peaked_signed(*height, *half_angle, p) <= tol,
            Shape::Custom(_) => {
                polygon_contains(&self.polygon, p) || polygon_distance(&self.polygon, p) <= tol
            }
        }
    }

    /// Whether every ray from `c` meets the boundary once (checked on a
    /// dense boundary sample).
    pub fn is_star_shaped_about(&self, c: Point2<T>) -> bool {
        let poly = &self.polygon;
        let n = poly.len();
        (0..n).all(|k| {
            let (p, q) = (poly[k] - c, poly[(k + 1) % n] - c);
            p.re * q.im - p.im * q.re > T::zero()
        })
    }

    /// `m` boundary points starting at `γ(0)`, uniform in arclength or in
    /// the curve parameter.
    pub fn collocation_points(&self, m: usize, placement: Placement) -> Result<CollocationSet<T>> {
        self.boundary_points(m, placement, T::zero())
    }

    /// Arclength-uniform boundary sample offset by half a spacing from the
    /// collocation lattice.
    pub fn boundary_sample(&self, count: usize) -> Vec<Point2<T>> {
        self.boundary_points(count, Placement::Arclength, lit(0.5))
            .map(|s| s.points)
            .unwrap_or_default()
    }

    fn boundary_points(&self, m: usize, placement: Placement, offset: T) -> Result<CollocationSet<T>> {
        if m == 0 {
            return Err(Error::InvalidArgument(
                "at least one collocation point is required".into(),
            ));
        }
        let mut set = CollocationSet {
            points: Vec::with_capacity(m),
            normals: Vec::with_capacity(m),
            params: Vec::with_capacity(m),
        };
        let len = self.boundary.length();
        for j in 0..m {
            let frac = (from_usize::<T>(j) + offset) / from_usize::<T>(m);
            let t = match placement {
                Placement::Arclength => self.boundary.param_at_arclength(frac * len),
                Placement::Parameter => frac,
            };
            set.points.push(self.boundary.point(t));
            set.normals.push(self.boundary.outward_normal(t));
            set.params.push(t);
        }
        Ok(set)
    }

    /// Cell-centred lattice of `resolution × resolution` points over the
    /// bounding box, restricted to the strict interior.
    pub fn interior_grid(&self, resolution: usize) -> Vec<Point2<T>> {
        let [x0, x1, y0, y1] = self.bbox;
        let r = from_usize::<T>(resolution.max(1));
        let half: T = lit(0.5);
        let mut pts = Vec::new();
        for i in 0..resolution {
            for j in 0..resolution {
                let x = x0 + (x1 - x0) * (from_usize::<T>(i) + half) / r;
                let y = y0 + (y1 - y0) * (from_usize::<T>(j) + half) / r;
                let p = Complex::new(x, y);
                if self.contains(p) {
                    pts.push(p);
                }
            }
        }
        pts
    }

    /// Smallest lattice from [`Domain::interior_grid`] with at least
    /// `min_points` interior points.
    pub fn interior_grid_min(&self, min_points: usize) -> Vec<Point2<T>> {
        let mut res = ((min_points as f64) * 4.0 / std::f64::consts::PI).sqrt().ceil() as usize;
        loop {
            let g = self.interior_grid(res.max(2));
            if g.len() >= min_points {
                return g;
            }
            res += 1;
        }
    }
}

/// Signed indicator of the peaked disk: negative inside, and its magnitude
/// equals the distance to the boundary near the boundary.
fn peaked_signed<T: Real>(height: T, half_angle: T, p: Point2<T>) -> T {
    let apex = Complex::new(T::one() + height, T::zero());
    let upper = Complex::new(half_angle.cos(), half_angle.sin());
    let lower = upper.conj();
    let ang = p.im.atan2(p.re).abs();
    let r = cabs(p);
    if ang >= half_angle {
        return r - T::one();
    }
    // Inside the sector: signed distance to the two segments. For the upper
    // segment the interior lies to the right of apex -> upper.
    let side = |a: Point2<T>, b: Point2<T>| {
        let d = b - a;
        let w = p - a;
        -(d.re * w.im - d.im * w.re) / cabs(d)
    };
    let s1 = side(apex, upper);
    let s2 = side(lower, apex);
    s1.max(s2)
}

fn polygon_contains<T: Real>(poly: &[Point2<T>], p: Point2<T>) -> bool {
    let n = poly.len();
    let mut inside = false;
    let mut j = n - 1;
    for i in 0..n {
        let (a, b) = (poly[i], poly[j]);
        if (a.im > p.im) != (b.im > p.im) {
            let x = a.re + (p.im - a.im) * (b.re - a.re) / (b.im - a.im);
            if p.re < x {
                inside = !inside;
            }
        }
        j = i;
    }
    inside
}

fn segment_distance<T: Real>(a: Point2<T>, b: Point2<T>, p: Point2<T>) -> T {
    let d = b - a;
    let len2 = d.norm_sqr();
    let t = if len2 > T::zero() {
        ((p - a).re * d.re + (p - a).im * d.im) / len2
    } else {
        T::zero()
    };
    let t = t.max(T::zero()).min(T::one());
    cabs(p - (a + d * t))
}

fn polygon_distance<T: Real>(poly: &[Point2<T>], p: Point2<T>) -> T {
    let n = poly.len();
    (0..n)
        .map(|k| segment_distance(poly[k], poly[(k + 1) % n], p))
        .fold(T::max_value().unwrap_or_else(|| lit(1e300)), |a, b| a.min(b))
}

fn segments_cross<T: Real>(a: Point2<T>, b: Point2<T>, c: Point2<T>, d: Point2<T>) -> bool {
    let orient = |p: Point2<T>, q: Point2<T>, r: Point2<T>| {
        (q.re - p.re) * (r.im - p.im) - (q.im - p.im) * (r.re - p.re)
    };
    let (o1, o2) = (orient(a, b, c), orient(a, b, d));
    let (o3, o4) = (orient(c, d, a), orient(c, d, b));
    o1 * o2 < T::zero() && o3 * o4 < T::zero()
}

fn polygon_is_simple<T: Real>(poly: &[Point2<T>]) -> bool {
    // Coarse pass: self-intersection of a closed curve shows up already on
    // a subsampled polygon unless the loop is tiny.
    let step = (poly.len() / 512).max(1);
    let sub: Vec<_> = poly.iter().step_by(step).copied().collect();
    let n = sub.len();
    for i in 0..n {
        for j in i + 2..n {
            if i == 0 && j == n - 1 {
                continue;
            }
            if segments_cross(sub[i], sub[(i + 1) % n], sub[j], sub[(j + 1) % n]) {
                return false;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn unit_disk_start_point() {
        let d = Domain::<f64>::unit_disk();
        let p = d.boundary().point(0.0);
        assert!((p - Complex::new(1.0, 0.0)).norm() < 1e-15);
        assert!((d.boundary().length() - 2.0 * std::f64::consts::PI).abs() < 1e-13);
    }

    #[test]
    fn ellipse_axes_and_area() {
        let d = Domain::<f64>::ellipse(0.9).unwrap();
        let a = (1.0f64 - 0.81).powf(-0.25);
        let b = (1.0f64 - 0.81).powf(0.25);
        assert!((a * b - 1.0).abs() < 1e-15);
        assert!((std::f64::consts::PI * a * b - std::f64::consts::PI).abs() < 1e-12);
        let p = d.boundary().point(0.0);
        assert!((p.re - a).abs() < 1e-14);
    }

    #[test]
    fn eccentricity_out_of_range() {
        assert!(matches!(
            Domain::<f64>::ellipse(1.0),
            Err(Error::DomainParameter(_))
        ));
        assert!(Domain::<f64>::ellipse(-0.1).is_err());
    }

    #[test]
    fn peaked_apex_and_height_validation() {
        let d = Domain::<f64>::peaked_disk(0.5).unwrap();
        let p = d.boundary().point(0.0);
        assert!((p - Complex::new(1.5, 0.0)).norm() < 1e-15);
        assert!(Domain::<f64>::peaked_disk(0.0).is_err());
        assert!(d.contains(Complex::new(1.2, 0.0)));
        assert!(!d.contains(Complex::new(0.95, 0.45)));
        assert!(d.is_star_shaped_about(d.center()));
    }

    #[test]
    fn collocation_on_disk_and_normals() {
        let d = Domain::<f64>::unit_disk();
        let set = d.collocation_points(35, Placement::Arclength).unwrap();
        assert_eq!(set.len(), 35);
        for (p, n) in set.points.iter().zip(&set.normals) {
            assert!(d.implicit(*p).unwrap().abs() < 1e-10);
            assert!((*n - *p).norm() < 1e-12);
        }
    }

    #[test]
    fn arclength_spacing_on_ellipse() {
        let d = Domain::<f64>::ellipse(0.99).unwrap();
        let m = 40;
        let set = d.collocation_points(m, Placement::Arclength).unwrap();
        let len = d.boundary().length();
        // Gauss arclength between consecutive parameters.
        let g = GaussLegendre::<f64>::new(32);
        for j in 0..m {
            let t0 = set.params[j];
            let t1 = if j + 1 < m { set.params[j + 1] } else { 1.0 };
            let arc = g.integrate(t0, t1, |t| d.boundary().tangent(t).norm());
            assert!((arc - len / m as f64).abs() < 1e-9 * len, "gap {j}: {arc}");
        }
        for p in &set.points {
            assert!(d.implicit(*p).unwrap().abs() < 1e-10);
        }
    }

    #[test]
    fn interior_grid_size() {
        for d in [
            Domain::<f64>::unit_disk(),
            Domain::ellipse(0.99).unwrap(),
            Domain::peaked_disk(1.0).unwrap(),
        ] {
            let g = d.interior_grid_min(500);
            assert!(g.len() >= 500);
            assert!(g.iter().all(|p| d.contains(*p)));
        }
    }

    #[test]
    fn custom_rejects_clockwise() {
        let cw: CurveFn<f64> = Arc::new(|t: f64| {
            let th = -2.0 * std::f64::consts::PI * t;
            (
                Complex::new(th.cos(), th.sin()),
                Complex::new(th.sin(), -th.cos()) * (2.0 * std::f64::consts::PI),
            )
        });
        assert!(Domain::custom(cw, Complex::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn custom_square_like_domain() {
        // Rounded square r(θ) = 1 + 0.2 cos 4θ, star-shaped about 0.
        let f: CurveFn<f64> = Arc::new(|t: f64| {
            let tau = 2.0 * std::f64::consts::PI;
            let th = tau * t;
            let r = 1.0 + 0.2 * (4.0 * th).cos();
            let dr = -0.8 * (4.0 * th).sin();
            let p = Complex::new(r * th.cos(), r * th.sin());
            let dp = Complex::new(dr * th.cos() - r * th.sin(), dr * th.sin() + r * th.cos()) * tau;
            (p, dp)
        });
        let d = Domain::custom(f, Complex::new(0.0, 0.0)).unwrap();
        assert!(d.is_star_shaped_about(d.center()));
        assert!(d.contains(Complex::new(0.5, 0.5)));
        assert!(!d.contains(Complex::new(1.25, 0.0)));
    }

    proptest! {
        #[test]
        fn collocation_points_on_ellipse(e in 0.0f64..0.99, m in 3usize..80) {
            let d = Domain::<f64>::ellipse(e).unwrap();
            let set = d.collocation_points(m, Placement::Arclength).unwrap();
            prop_assert_eq!(set.len(), m);
            for (p, n) in set.points.iter().zip(&set.normals) {
                prop_assert!(d.implicit(*p).unwrap().abs() < 1e-10);
                prop_assert!((n.norm() - 1.0).abs() < 1e-12);
                // Outward: moving along the normal leaves the domain.
                prop_assert!(!d.contains(*p + *n * 1e-6));
                prop_assert!(d.contains(*p - *n * 1e-6));
            }
        }

        #[test]
        fn peaked_boundary_points_are_on_boundary(h in 0.05f64..2.0, t in 0.0f64..1.0) {
            let d = Domain::<f64>::peaked_disk(h).unwrap();
            let p = d.boundary().point(t);
            prop_assert!(d.contains_closed(p, 1e-12));
            prop_assert!(!d.contains(p + d.boundary().outward_normal(t) * 1e-7));
        }
    }
}
