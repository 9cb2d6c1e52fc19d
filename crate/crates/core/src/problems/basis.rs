use std::sync::Arc;

use num_complex::Complex;
use rayon::prelude::*;

use super::{EllipticProblem, ParticularKind, ParticularSolution};
use crate::error::{Error, Result};
use crate::expoly::ExpPoly;
use crate::geometry::{Domain, Point2};
use crate::quadrature::QuadratureRule;
use crate::scalar::{cabs, creal, lit, to_f64, Real};
use crate::vekua::{exact_formal_powers, formal_powers, GeneratingSequence, RayGrid, ScalarField};

/// How basis functions are evaluated.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum BasisMode {
    /// ExpPoly closed forms (sequence `f = e^{κy}` only).
    Exact,
    /// Ray recursion with numeric integration.
    Numeric,
    /// Exact when the particular solution allows it, numeric otherwise.
    #[default]
    Auto,
}

/// Scaled PDE residual tolerance for exact-mode basis functions.
pub const EXACT_RESIDUAL_TOL: f64 = 1e-8;
/// Scaled PDE residual tolerance for numeric-mode basis functions.
pub const NUMERIC_RESIDUAL_TOL: f64 = 1e-4;

#[derive(Clone)]
enum Engine<T: Real> {
    Exact {
        polys: Vec<ExpPoly<T>>,
        scale: T,
    },
    Numeric {
        seq: GeneratingSequence<T>,
        grid: Arc<RayGrid<T>>,
        p: ScalarField<T>,
    },
}

/// The solutions `u_0, …, u_N`: `u_0 = p^{-1/2} Re Z^{(0)}(1)`,
/// `u_{2n−1} = p^{-1/2} Re Z^{(n)}(1)`, `u_{2n} = p^{-1/2} Re Z^{(n)}(i)`,
/// formal powers centered at the domain center. In eigen mode "Re" is the
/// real part in the Vekua unit and values are complex in the eigen unit.
#[derive(Clone)]
pub struct FormalPowerBasis<T: Real> {
    n: usize,
    z0: Point2<T>,
    domain: Domain<T>,
    equation: EllipticProblem<T>,
    engine: Engine<T>,
}

/// `(exponent n, family)` of basis index `k`.
fn index(k: usize) -> (usize, usize) {
    if k == 0 {
        (0, 0)
    } else if k % 2 == 1 {
        (k.div_ceil(2), 0)
    } else {
        (k / 2, 1)
    }
}

/// Builds `u_0..u_N` for `ps` on `domain`.
pub fn complete_system<T: Real>(
    ps: &ParticularSolution<T>,
    domain: &Domain<T>,
    n: usize,
    mode: BasisMode,
    rule: &QuadratureRule,
) -> Result<FormalPowerBasis<T>> {
    let z0 = domain.center();
    let p = ps.equation().p().clone();
    let kappa = match ps.kind() {
        ParticularKind::Exponential { kappa } => Some(kappa),
        ParticularKind::Constant => Some(creal(T::zero())),
        _ => None,
    };
    let exact = match (mode, kappa, p.as_constant()) {
        (BasisMode::Numeric, _, _) => None,
        (_, Some(k), Some(pc)) => Some((k, pc)),
        (BasisMode::Exact, _, _) => {
            return Err(Error::InvalidArgument(
                "exact mode needs f = e^{κy} with constant p".into(),
            ))
        }
        _ => None,
    };
    let engine = match exact {
        Some((kappa, pc)) => {
            let powers = exact_formal_powers(kappa, z0, n.div_ceil(2))?;
            let polys = (0..=n)
                .map(|k| {
                    let (e, fam) = index(k);
                    powers[e][fam].u.clone()
                })
                .collect();
            Engine::Exact {
                polys,
                scale: T::one() / pc.sqrt(),
            }
        }
        None => {
            if !domain.is_star_shaped_about(z0) {
                return Err(Error::Geometry(
                    "numeric formal powers need a domain star-shaped about its center".into(),
                ));
            }
            Engine::Numeric {
                seq: ps.sequence().clone(),
                grid: Arc::new(RayGrid::for_rule(rule)?),
                p,
            }
        }
    };
    Ok(FormalPowerBasis {
        n,
        z0,
        domain: domain.clone(),
        equation: ps.equation().clone(),
        engine,
    })
}

impl<T: Real> FormalPowerBasis<T> {
    /// Number of functions, `N + 1`.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn center(&self) -> Point2<T> {
        self.z0
    }

    pub fn domain(&self) -> &Domain<T> {
        &self.domain
    }

    pub fn equation(&self) -> &EllipticProblem<T> {
        &self.equation
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.engine, Engine::Exact { .. })
    }

    pub fn mode_name(&self) -> &'static str {
        if self.is_exact() {
            "exact"
        } else {
            "numeric"
        }
    }

    /// ExpPoly forms of `Re Z` (before the `p^{-1/2}` factor), exact mode.
    pub fn exact_polys(&self) -> Option<&[ExpPoly<T>]> {
        match &self.engine {
            Engine::Exact { polys, .. } => Some(polys),
            Engine::Numeric { .. } => None,
        }
    }

    /// `u_0(z), …, u_N(z)` at each point.
    pub fn eval_many(&self, points: &[Point2<T>]) -> Result<Vec<Vec<Complex<T>>>> {
        match &self.engine {
            Engine::Exact { polys, scale } => Ok(points
                .par_iter()
                .map(|&z| polys.iter().map(|u| u.eval(z) * *scale).collect())
                .collect()),
            Engine::Numeric { seq, grid, p } => {
                let table = formal_powers(seq, self.z0, self.n.div_ceil(2), points, Some(&self.domain), grid)?;
                Ok(points
                    .iter()
                    .enumerate()
                    .map(|(i, &z)| {
                        let s = T::one() / p.value(z).sqrt();
                        (0..=self.n)
                            .map(|k| {
                                let (e, fam) = index(k);
                                table.value(i, e, fam).re * s
                            })
                            .collect()
                    })
                    .collect())
            }
        }
    }

    pub fn eval_all(&self, z: Point2<T>) -> Result<Vec<Complex<T>>> {
        Ok(self.eval_many(&[z])?.pop().expect("one point"))
    }

    /// Closed-form gradients `(∂_x u_k, ∂_y u_k)`, exact mode only.
    pub fn gradients(&self, points: &[Point2<T>]) -> Option<Vec<Vec<(Complex<T>, Complex<T>)>>> {
        match &self.engine {
            Engine::Exact { polys, scale } => Some(
                points
                    .par_iter()
                    .map(|&z| {
                        polys
                            .iter()
                            .map(|u| {
                                let (gx, gy) = u.gradient_at(z);
                                (gx * *scale, gy * *scale)
                            })
                            .collect()
                    })
                    .collect(),
            ),
            Engine::Numeric { .. } => None,
        }
    }

    /// Largest scaled residual of `(div p grad + q) u_k` over the samples,
    /// per `k`. Exact mode differentiates symbolically and scales by the
    /// term magnitudes; numeric mode uses a fourth-order difference stencil
    /// and scales by `max(1, |u_k|)`.
    pub fn pde_residuals(&self, samples: &[Point2<T>]) -> Result<Vec<T>> {
        let mut worst = vec![T::zero(); self.len()];
        match &self.engine {
            Engine::Exact { polys, .. } => {
                let q = self.equation.q().as_constant().ok_or_else(|| {
                    Error::InvalidArgument("exact mode expects a constant potential".into())
                })?;
                for (k, u) in polys.iter().enumerate() {
                    let lap = u.laplacian();
                    for &z in samples {
                        let (lv, lm) = lap.eval_with_magnitude(z);
                        let (uv, um) = u.eval_with_magnitude(z);
                        let den = (lm + q.abs() * um).max(lit(1e-300));
                        worst[k] = worst[k].max(cabs(lv + uv * q) / den);
                    }
                }
            }
            Engine::Numeric { .. } => {
                let h = self.domain.radius() * lit(1e-3);
                let offsets = [
                    Complex::new(T::zero(), T::zero()),
                    Complex::new(h, T::zero()),
                    Complex::new(-h, T::zero()),
                    Complex::new(T::zero(), h),
                    Complex::new(T::zero(), -h),
                ];
                let mut pts = Vec::with_capacity(samples.len() * 9);
                for &z in samples {
                    for m in [T::one(), lit(2.0)] {
                        for d in &offsets[1..] {
                            pts.push(z + *d * m);
                        }
                    }
                    pts.push(z);
                }
                let vals = self.eval_many(&pts)?;
                for (s, &z) in samples.iter().enumerate() {
                    let base = s * 9;
                    for k in 0..self.len() {
                        let lookup = |w: Point2<T>| {
                            let idx = pts[base..base + 9]
                                .iter()
                                .position(|p| *p == w)
                                .expect("stencil point");
                            vals[base + idx][k]
                        };
                        let r = self.equation.residual4(&lookup, z, h);
                        let scale = cabs(vals[base + 8][k]).max(T::one());
                        worst[k] = worst[k].max(cabs(r) / scale);
                    }
                }
            }
        }
        Ok(worst)
    }

    /// Fails with a not-a-solution error when any `u_k` exceeds the mode's
    /// residual tolerance.
    pub fn check_pde(&self, samples: &[Point2<T>]) -> Result<()> {
        let tol: T = lit(if self.is_exact() {
            EXACT_RESIDUAL_TOL
        } else {
            NUMERIC_RESIDUAL_TOL
        });
        let r = self.pde_residuals(samples)?;
        match r.iter().copied().fold(T::zero(), |a, b| a.max(b)) {
            w if w < tol => Ok(()),
            w => Err(Error::NotASolution { residual: to_f64(w) }),
        }
    }
}
