use nalgebra::DMatrix;
use num_complex::Complex;
use rayon::prelude::*;

use super::{Bicomplex, GeneratingSequence};
use crate::error::{Error, Result};
use crate::geometry::{Domain, Point2};
use crate::quadrature::{spline_cumulative_weights, GaussLegendre, QuadratureMode, QuadratureRule};
use crate::scalar::{cabs, from_usize, lit, to_f64, Real};

/// Nodes on the ray parameter `t ∈ [0, 1]` with a cumulative integration
/// matrix: row `j` integrates the interpolant of the node values over
/// `[0, t_j]`.
#[derive(Clone, Debug)]
pub struct RayGrid<T: Real> {
    nodes: Vec<T>,
    cumulative: DMatrix<T>,
}

impl<T: Real> RayGrid<T> {
    /// Chebyshev–Lobatto nodes; the polynomial interpolant is integrated
    /// exactly.
    pub fn chebyshev(m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::InvalidArgument("a ray grid needs at least two nodes".into()));
        }
        let half: T = lit(0.5);
        let last = from_usize::<T>(m - 1);
        let nodes: Vec<T> = (0..m)
            .map(|j| half * (T::one() - (T::pi() * from_usize::<T>(j) / last).cos()))
            .collect();
        let bary: Vec<T> = (0..m)
            .map(|i| {
                let s = if i % 2 == 0 { T::one() } else { -T::one() };
                if i == 0 || i == m - 1 {
                    s * half
                } else {
                    s
                }
            })
            .collect();
        let gauss = GaussLegendre::<T>::new(m / 2 + 2);
        let mut cumulative = DMatrix::<T>::zeros(m, m);
        let mut basis = vec![T::zero(); m];
        for j in 1..m {
            let (a, b) = (nodes[j - 1], nodes[j]);
            let mid = (a + b) * half;
            let hw = (b - a) * half;
            for (x, w) in gauss.nodes().iter().zip(gauss.weights()) {
                lagrange_basis(&nodes, &bary, mid + hw * *x, &mut basis);
                for i in 0..m {
                    cumulative[(j, i)] += hw * *w * basis[i];
                }
            }
            for i in 0..m {
                let prev = cumulative[(j - 1, i)];
                cumulative[(j, i)] += prev;
            }
        }
        Ok(RayGrid { nodes, cumulative })
    }

    /// Equispaced samples with not-a-knot cubic spline integration.
    pub fn spline(samples: usize) -> Result<Self> {
        let cumulative = spline_cumulative_weights(samples)?;
        let last = from_usize::<T>(samples - 1);
        let nodes = (0..samples).map(|j| from_usize::<T>(j) / last).collect();
        Ok(RayGrid { nodes, cumulative })
    }

    /// Grid matching a quadrature rule: Gauss mode uses twice the per-segment
    /// node count on a Chebyshev grid.
    pub fn for_rule(rule: &QuadratureRule) -> Result<Self> {
        rule.validate()?;
        match rule.mode {
            QuadratureMode::Gauss => Self::chebyshev((2 * rule.nodes_per_segment).max(8)),
            QuadratureMode::Spline => Self::spline(rule.spline_samples),
        }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[T] {
        &self.nodes
    }

    pub fn cumulative(&self) -> &DMatrix<T> {
        &self.cumulative
    }

    fn integrate(&self, values: &[Bicomplex<T>], out: &mut [Bicomplex<T>]) {
        let m = self.len();
        for j in 0..m {
            let mut acc = Bicomplex::zero();
            for i in 0..m {
                acc += values[i] * self.cumulative[(j, i)];
            }
            out[j] = acc;
        }
    }
}

fn lagrange_basis<T: Real>(nodes: &[T], bary: &[T], x: T, out: &mut [T]) {
    for (i, &t) in nodes.iter().enumerate() {
        if x == t {
            out.iter_mut().for_each(|v| *v = T::zero());
            out[i] = T::one();
            return;
        }
    }
    let mut den = T::zero();
    for i in 0..nodes.len() {
        out[i] = bary[i] / (x - nodes[i]);
        den += out[i];
    }
    out.iter_mut().for_each(|v| *v /= den);
}

/// Computes formal powers along straight rays from a center.
pub struct RayEngine<'a, T: Real> {
    seq: &'a GeneratingSequence<T>,
    grid: &'a RayGrid<T>,
}

impl<'a, T: Real> RayEngine<'a, T> {
    pub fn new(seq: &'a GeneratingSequence<T>, grid: &'a RayGrid<T>) -> Self {
        RayEngine { seq, grid }
    }

    /// `(λ, μ)` with `λF_m(z0) + μG_m(z0) = a` for `a = 1` and `a = i`.
    pub fn initial_coefficients(&self, m: usize, z0: Point2<T>) -> Result<[(Complex<T>, Complex<T>); 2]> {
        let (f, g) = self.seq.pair_values(m, z0);
        let det = f.re * g.im - g.re * f.im;
        let scale = (cabs(f.re) + cabs(f.im)) * (cabs(g.re) + cabs(g.im));
        if !(cabs(det) > scale * lit(1e-14)) {
            return Err(Error::DegeneratePair(format!(
                "initial system for pair {m} is singular at ({:.6}, {:.6})",
                to_f64(z0.re),
                to_f64(z0.im)
            )));
        }
        Ok([(g.im / det, -f.im / det), (-g.re / det, f.re / det)])
    }

    fn levels(&self, n_max: usize) -> usize {
        match self.seq.period() {
            Some(p) => p,
            None => n_max + 1,
        }
    }

    /// `Z^{(n)}(a, z0; target)` for `n = 0..=n_max`, families `[a = 1, a = i]`.
    pub fn ray(&self, z0: Point2<T>, target: Point2<T>, n_max: usize) -> Result<Vec<[Bicomplex<T>; 2]>> {
        let levels = self.levels(n_max);
        let periodic = self.seq.period().is_some();
        let m = self.grid.len();
        let delta = Bicomplex::from_i(target - z0);
        let two: T = lit(2.0);

        let mut fs = vec![vec![Bicomplex::zero(); m]; levels];
        let mut gs = vec![vec![Bicomplex::zero(); m]; levels];
        let mut k1 = vec![vec![Bicomplex::zero(); m]; levels];
        let mut k2 = vec![vec![Bicomplex::zero(); m]; levels];
        for l in 0..levels {
            for (j, &t) in self.grid.nodes().iter().enumerate() {
                let z = z0 + (target - z0) * t;
                let (f, g) = self.seq.pair_values(l, z);
                let den = f * g.conj() - f.conj() * g;
                let inv = den.inv() * two * delta;
                fs[l][j] = f;
                gs[l][j] = g;
                k1[l][j] = g.conj() * inv;
                k2[l][j] = f.conj() * inv;
            }
        }

        let mut out = vec![[Bicomplex::zero(); 2]; n_max + 1];
        for (fam, slot) in (0..2).zip([0usize, 1]) {
            // cur[l] holds Z_l^{(k)} on the ray for the current k.
            let mut cur: Vec<Vec<Bicomplex<T>>> = (0..levels)
                .map(|l| {
                    let (lam, mu) = self.initial_coefficients(l, z0)?[fam];
                    Ok((0..m)
                        .map(|j| fs[l][j].scale(lam) + gs[l][j].scale(mu))
                        .collect())
                })
                .collect::<Result<_>>()?;
            out[0][slot] = cur[0][m - 1];
            let mut w1 = vec![Bicomplex::zero(); m];
            let mut w2 = vec![Bicomplex::zero(); m];
            let mut i1 = vec![Bicomplex::zero(); m];
            let mut i2 = vec![Bicomplex::zero(); m];
            for k in 1..=n_max {
                let kk = from_usize::<T>(k);
                let active = if periodic { levels } else { n_max - k + 1 };
                let mut next = vec![Vec::new(); levels];
                for l in 0..active {
                    let src = &cur[if periodic { (l + 1) % levels } else { l + 1 }];
                    for j in 0..m {
                        w1[j] = k1[l][j] * src[j];
                        w2[j] = k2[l][j] * src[j];
                    }
                    self.grid.integrate(&w1, &mut i1);
                    self.grid.integrate(&w2, &mut i2);
                    next[l] = (0..m)
                        .map(|j| (fs[l][j].scale(i1[j].re) - gs[l][j].scale(i2[j].re)) * kk)
                        .collect();
                }
                cur = next;
                out[k][slot] = cur[0][m - 1];
            }
        }
        Ok(out)
    }
}

/// Formal powers of both coefficient families at a set of targets.
#[derive(Clone, Debug)]
pub struct FormalPowerTable<T: Real> {
    z0: Point2<T>,
    n_max: usize,
    targets: Vec<Point2<T>>,
    values: Vec<Vec<[Bicomplex<T>; 2]>>,
}

impl<T: Real> FormalPowerTable<T> {
    pub fn center(&self) -> Point2<T> {
        self.z0
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn targets(&self) -> &[Point2<T>] {
        &self.targets
    }

    /// `Z^{(n)}(a, z0; targets[i])`, `a = 1` for `family = 0`, `a = i` for 1.
    pub fn value(&self, i: usize, n: usize, family: usize) -> Bicomplex<T> {
        self.values[i][n][family]
    }

    /// All powers at one target.
    pub fn at(&self, i: usize) -> &[[Bicomplex<T>; 2]] {
        &self.values[i]
    }
}

/// Checks that every segment `z0 → target` stays in the closed domain.
pub(crate) fn check_rays<T: Real>(domain: &Domain<T>, z0: Point2<T>, targets: &[Point2<T>]) -> Result<()> {
    let tol = domain.radius() * lit(1e-9);
    if !domain.contains(z0) {
        return Err(Error::Geometry("the center of the formal powers is not interior".into()));
    }
    for &t in targets {
        for s in 1..=32 {
            let p = z0 + (t - z0) * (from_usize::<T>(s) / lit(32.0));
            if !domain.contains_closed(p, tol) {
                return Err(Error::Geometry(format!(
                    "segment to ({:.6}, {:.6}) leaves the domain; the domain must be star-shaped about the center",
                    to_f64(t.re),
                    to_f64(t.im)
                )));
            }
        }
    }
    Ok(())
}

/// Formal powers `Z^{(n)}(a, z0; ·)`, `n = 0..=n_max`, at each target, one
/// ray per target, rays in parallel.
pub fn formal_powers<T: Real>(
    seq: &GeneratingSequence<T>,
    z0: Point2<T>,
    n_max: usize,
    targets: &[Point2<T>],
    domain: Option<&Domain<T>>,
    grid: &RayGrid<T>,
) -> Result<FormalPowerTable<T>> {
    if let Some(d) = domain {
        check_rays(d, z0, targets)?;
    }
    let mut samples = vec![z0];
    samples.extend(targets.iter().step_by((targets.len() / 16).max(1)).copied());
    seq.validate(&samples)?;
    let engine = RayEngine::new(seq, grid);
    let values = targets
        .par_iter()
        .map(|&t| engine.ray(z0, t, n_max))
        .collect::<Result<Vec<_>>>()?;
    Ok(FormalPowerTable {
        z0,
        n_max,
        targets: targets.to_vec(),
        values,
    })
}
