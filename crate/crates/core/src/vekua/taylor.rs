use nalgebra::DMatrix;
use num_complex::Complex;

use super::{char_coeffs, GeneratingSequence};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};
use crate::scalar::{cabs, ci, from_usize, lit, Real};

/// Settings for the local Chebyshev jet used to differentiate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaylorOptions<T: Real> {
    /// Polynomial degree per axis (raised to `n_max + 4`, rounded up to
    /// even). Low degrees amplify rounding less in high derivatives.
    pub degree: usize,
    /// Half-width of the sampling box; defaults to 0.65 times the distance
    /// from the center to the boundary, so the box corners stay inside.
    pub radius: Option<T>,
}

impl<T: Real> Default for TaylorOptions<T> {
    fn default() -> Self {
        TaylorOptions {
            degree: 16,
            radius: None,
        }
    }
}

/// Taylor coefficients `a_n = W^{[n]}(z0) / n!` of a solution of the main
/// Vekua equation.
#[derive(Clone, Debug, PartialEq)]
pub struct TaylorCoefficients<T: Real> {
    pub coefficients: Vec<Complex<T>>,
}

/// Highest supported derivative order.
pub const MAX_TAYLOR_ORDER: usize = 12;

fn cheb_points<T: Real>(d: usize) -> Vec<T> {
    (0..=d)
        .map(|k| (T::pi() * from_usize::<T>(k) / from_usize::<T>(d)).cos())
        .collect()
}

/// Chebyshev differentiation matrix on `cheb_points(d)`.
fn cheb_diff<T: Real>(d: usize) -> DMatrix<T> {
    let x = cheb_points::<T>(d);
    let c = |i: usize| {
        let s = if i % 2 == 0 { T::one() } else { -T::one() };
        if i == 0 || i == d {
            s + s
        } else {
            s
        }
    };
    let mut m = DMatrix::<T>::zeros(d + 1, d + 1);
    for i in 0..=d {
        for j in 0..=d {
            if i != j {
                m[(i, j)] = c(i) / c(j) / (x[i] - x[j]);
            }
        }
    }
    // Negative-sum trick for the diagonal.
    for i in 0..=d {
        let s: T = (0..=d).filter(|&j| j != i).fold(T::zero(), |a, j| a + m[(i, j)]);
        m[(i, i)] = -s;
    }
    m
}

/// Taylor coefficients `a_0..a_{n_max}` of `w` at `z0`, with
/// `W^{[m+1]} = ∂_z W^{[m]} − A_m W^{[m]} − B_m W̄^{[m]}` for the pairs of
/// `seq`. Derivatives act on a tensor Chebyshev interpolant of `w` sampled
/// in a box around `z0`; `n_max` is capped at [`MAX_TAYLOR_ORDER`].
pub fn taylor_coefficients<T, W>(
    w: &W,
    seq: &GeneratingSequence<T>,
    z0: Point2<T>,
    domain: Option<&Domain<T>>,
    n_max: usize,
    opts: TaylorOptions<T>,
) -> Result<TaylorCoefficients<T>>
where
    T: Real,
    W: Fn(Point2<T>) -> Complex<T> + ?Sized,
{
    if n_max > MAX_TAYLOR_ORDER {
        return Err(Error::InvalidArgument(format!(
            "Taylor coefficients are limited to order {MAX_TAYLOR_ORDER}"
        )));
    }
    let radius = match (opts.radius, domain) {
        (Some(r), Some(d)) => {
            let reach = boundary_distance(d, z0)?;
            if r * lit::<T>(2.0).sqrt() >= reach {
                return Err(Error::Geometry("the Taylor sampling box leaves the domain".into()));
            }
            r
        }
        (Some(r), None) => r,
        (None, Some(d)) => boundary_distance(d, z0)? * lit(0.65),
        (None, None) => lit(0.25),
    };
    let d = opts.degree.max(n_max + 4).div_ceil(2) * 2;
    let xs = cheb_points::<T>(d);
    let nodes: Vec<Point2<T>> = (0..=d)
        .flat_map(|iy| xs.iter().map(move |&x| (x, iy)))
        .map(|(x, iy)| z0 + Complex::new(x, xs[iy]) * radius)
        .collect();
    let idx = |ix: usize, iy: usize| iy * (d + 1) + ix;
    let dm = cheb_diff::<T>(d).map(|v| Complex::new(v / radius, T::zero()));
    let dmt = dm.transpose();

    let levels = seq.period().unwrap_or(n_max.max(1));
    let mut coeffs = Vec::with_capacity(levels);
    for l in 0..levels {
        let pair = seq.pair(l)?;
        let cc = nodes
            .iter()
            .map(|&z| char_coeffs(&pair, z).map(|c| (c.big_a, c.big_b)))
            .collect::<Result<Vec<_>>>()?;
        coeffs.push(cc);
    }

    // Row = y index, column = x index.
    let mut cur = DMatrix::<Complex<T>>::from_fn(d + 1, d + 1, |iy, ix| w(nodes[idx(ix, iy)]));
    let center = d / 2;
    let half: T = lit(0.5);
    let mut out = Vec::with_capacity(n_max + 1);
    let mut fact = T::one();
    for n in 0..=n_max {
        if n > 0 {
            fact *= from_usize::<T>(n);
        }
        let v = cur[(center, center)];
        if !(cabs(v).is_finite()) {
            return Err(Error::Integration {
                x: crate::scalar::to_f64(z0.re),
                y: crate::scalar::to_f64(z0.im),
            });
        }
        out.push(v / fact);
        if n == n_max {
            break;
        }
        let dx = &cur * &dmt;
        let dy = &dm * &cur;
        let cc = &coeffs[n % levels];
        cur = DMatrix::from_fn(d + 1, d + 1, |iy, ix| {
            let (a, b) = cc[idx(ix, iy)];
            let wv = cur[(iy, ix)];
            (dx[(iy, ix)] - ci::<T>() * dy[(iy, ix)]) * half - a * wv - b * wv.conj()
        });
    }
    Ok(TaylorCoefficients { coefficients: out })
}

fn boundary_distance<T: Real>(domain: &Domain<T>, z0: Point2<T>) -> Result<T> {
    if !domain.contains(z0) {
        return Err(Error::Geometry("the Taylor center is not interior".into()));
    }
    Ok(domain
        .boundary_sample(1024)
        .iter()
        .map(|b| cabs(*b - z0))
        .fold(T::max_value().unwrap_or(T::one()), |a, b| a.min(b)))
}
