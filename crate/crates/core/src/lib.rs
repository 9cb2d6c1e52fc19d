//! Complete systems of exact solutions for two-dimensional elliptic
//! equations `(div p grad + q) u = 0`, built from formal powers of the
//! associated main Vekua equation, and collocation solvers on top of them.
//!
//! The library is generic over the floating-point type through [`Real`];
//! the aliases at the crate root fix it to `f64`.

pub mod error;
pub mod expoly;
pub mod geometry;
pub mod problems;
pub mod quadrature;
pub mod scalar;
pub mod solver;
pub mod vekua;

pub use error::{Error, Result};
pub use scalar::Real;

/// Library version.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// `f64` instantiations.
pub type Domain = geometry::Domain<f64>;
pub type Point2 = geometry::Point2<f64>;
pub type ExpPoly = expoly::ExpPoly<f64>;
pub type EllipticProblem = problems::EllipticProblem<f64>;
pub type FormalPowerBasis = problems::FormalPowerBasis<f64>;
pub type BoundaryCondition = solver::BoundaryCondition<f64>;
pub type ApproximateSolution = solver::ApproximateSolution<f64>;
pub type EigenSetup = solver::EigenSetup<f64>;
