use std::fmt;

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};
use crate::scalar::{cabs, casin, ci, cln, cone, csqrt, lit, to_f64, Real};

/// Orthogonal coordinates `s + it = Φ(z)` given by a conformal map.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum CoordinateSystem<T: Real> {
    Cartesian,
    /// `Φ = ln z`.
    Polar,
    /// `Φ = √2·√z`, so `s = √(r + x)`, `t = ±√(r − x)`.
    Parabolic,
    /// `Φ = arcsin(z / α)`.
    Elliptic { alpha: T },
    /// `Φ = ln((α + z) / (α − z))`.
    Bipolar { alpha: T },
}

/// Looks up a coordinate system by name.
pub fn coordinate_catalog<T: Real>(name: &str, alpha: Option<T>) -> Result<CoordinateSystem<T>> {
    let need_alpha = || match alpha {
        Some(a) if a > T::zero() => Ok(a),
        _ => Err(Error::InvalidArgument(format!(
            "{name} coordinates need a parameter alpha > 0"
        ))),
    };
    match name {
        "cartesian" => Ok(CoordinateSystem::Cartesian),
        "polar" => Ok(CoordinateSystem::Polar),
        "parabolic" => Ok(CoordinateSystem::Parabolic),
        "elliptic" => Ok(CoordinateSystem::Elliptic { alpha: need_alpha()? }),
        "bipolar" => Ok(CoordinateSystem::Bipolar { alpha: need_alpha()? }),
        other => Err(Error::InvalidArgument(format!(
            "unknown coordinate system '{other}'"
        ))),
    }
}

impl<T: Real> fmt::Display for CoordinateSystem<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl<T: Real> CoordinateSystem<T> {
    pub fn name(&self) -> &'static str {
        match self {
            CoordinateSystem::Cartesian => "cartesian",
            CoordinateSystem::Polar => "polar",
            CoordinateSystem::Parabolic => "parabolic",
            CoordinateSystem::Elliptic { .. } => "elliptic",
            CoordinateSystem::Bipolar { .. } => "bipolar",
        }
    }

    pub fn is_identity(&self) -> bool {
        matches!(self, CoordinateSystem::Cartesian)
    }

    /// `Φ(z) = s + it`.
    pub fn phi(&self, z: Point2<T>) -> Complex<T> {
        match *self {
            CoordinateSystem::Cartesian => z,
            CoordinateSystem::Polar => cln(z),
            CoordinateSystem::Parabolic => csqrt(z) * lit::<T>(2.0).sqrt(),
            CoordinateSystem::Elliptic { alpha } => casin(z / alpha),
            CoordinateSystem::Bipolar { alpha } => {
                let a = Complex::new(alpha, T::zero());
                cln((a + z) / (a - z))
            }
        }
    }

    /// `Φ_z`.
    pub fn phi_z(&self, z: Point2<T>) -> Complex<T> {
        match *self {
            CoordinateSystem::Cartesian => cone(),
            CoordinateSystem::Polar => cone::<T>() / z,
            CoordinateSystem::Parabolic => cone::<T>() / (csqrt(z) * lit::<T>(2.0).sqrt()),
            CoordinateSystem::Elliptic { alpha } => cone::<T>() / csqrt(Complex::new(alpha * alpha, T::zero()) - z * z),
            CoordinateSystem::Bipolar { alpha } => {
                Complex::new(alpha + alpha, T::zero()) / (Complex::new(alpha * alpha, T::zero()) - z * z)
            }
        }
    }

    /// `Φ_zz`.
    pub fn phi_zz(&self, z: Point2<T>) -> Complex<T> {
        let d = self.phi_z(z);
        match *self {
            CoordinateSystem::Cartesian => Complex::new(T::zero(), T::zero()),
            CoordinateSystem::Polar => -d * d,
            CoordinateSystem::Parabolic => -d / (z * lit::<T>(2.0)),
            CoordinateSystem::Elliptic { .. } => z * d * d * d,
            CoordinateSystem::Bipolar { alpha } => d * z * lit::<T>(2.0) / (Complex::new(alpha * alpha, T::zero()) - z * z),
        }
    }

    /// Points where `Φ` or `Φ_z` is singular.
    pub fn singular_points(&self) -> Vec<Point2<T>> {
        match *self {
            CoordinateSystem::Cartesian => vec![],
            CoordinateSystem::Polar | CoordinateSystem::Parabolic => vec![Complex::new(T::zero(), T::zero())],
            CoordinateSystem::Elliptic { alpha } | CoordinateSystem::Bipolar { alpha } => {
                vec![Complex::new(-alpha, T::zero()), Complex::new(alpha, T::zero())]
            }
        }
    }

    /// Branch cuts of the principal branches, as real-axis rays
    /// `(origin, direction ±1)`.
    fn branch_cuts(&self) -> Vec<(T, T)> {
        match *self {
            CoordinateSystem::Cartesian => vec![],
            CoordinateSystem::Polar | CoordinateSystem::Parabolic => vec![(T::zero(), -T::one())],
            CoordinateSystem::Elliptic { alpha } | CoordinateSystem::Bipolar { alpha } => {
                vec![(alpha, T::one()), (-alpha, -T::one())]
            }
        }
    }

    /// Checks that the map is analytic with bounded, nonvanishing `Φ_z` on
    /// the closed domain: no singular point inside, no branch cut crossing
    /// the boundary, and a sampled `Φ_z` check.
    pub fn admissible(&self, domain: &Domain<T>) -> Result<()> {
        if self.is_identity() {
            return Ok(());
        }
        let tol = domain.radius() * lit(1e-9);
        for sp in self.singular_points() {
            if domain.contains_closed(sp, tol) {
                return Err(Error::ConformalMap(format!(
                    "{} coordinates are singular at ({}, {}) inside the domain",
                    self.name(),
                    to_f64(sp.re),
                    to_f64(sp.im)
                )));
            }
        }
        let boundary = domain.boundary_sample(2048);
        for (origin, dir) in self.branch_cuts() {
            for k in 0..boundary.len() {
                let a = boundary[k];
                let b = boundary[(k + 1) % boundary.len()];
                if (a.im <= T::zero()) != (b.im <= T::zero()) {
                    let x = a.re + (b.re - a.re) * (-a.im) / (b.im - a.im);
                    if (x - origin) * dir >= T::zero() {
                        return Err(Error::ConformalMap(format!(
                            "the domain crosses the branch cut of {} coordinates",
                            self.name()
                        )));
                    }
                }
            }
        }
        let mut samples = domain.interior_grid(24);
        samples.extend(boundary.iter().step_by(16).copied());
        for z in samples {
            let d = self.phi_z(z);
            let m = cabs(d);
            if !m.is_finite() || m < lit(1e-12) || m > lit(1e12) {
                return Err(Error::ConformalMap(format!(
                    "|Φ_z| = {:.3e} at ({:.6}, {:.6})",
                    to_f64(m),
                    to_f64(z.re),
                    to_f64(z.im)
                )));
            }
        }
        Ok(())
    }

    /// `(s_z, t_z, s_z̄, t_z̄)` from `Φ_z`.
    pub(crate) fn st_wirtinger(phi_z: Complex<T>) -> [Complex<T>; 4] {
        let half: T = lit(0.5);
        [
            phi_z * half,
            -ci::<T>() * phi_z * half,
            phi_z.conj() * half,
            ci::<T>() * phi_z.conj() * half,
        ]
    }
}
