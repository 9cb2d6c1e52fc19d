use num_complex::Complex;

use super::Bicomplex;
use crate::error::Result;
use crate::expoly::ExpPoly;
use crate::geometry::Point2;
use crate::scalar::{cexp, creal, lit, Real};

/// Formal power `W = u + i·v` of the sequence `f = e^{κy}` with ExpPoly
/// components. For complex `κ` the components are complex in the eigen
/// unit and `i` stays formal.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalExpPair<T: Real> {
    pub u: ExpPoly<T>,
    pub v: ExpPoly<T>,
}

impl<T: Real> FormalExpPair<T> {
    pub fn kappa(&self) -> Complex<T> {
        self.u.kappa()
    }

    pub fn eval(&self, z: Point2<T>) -> Bicomplex<T> {
        Bicomplex::new(self.u.eval(z), self.v.eval(z))
    }

    /// `∂_z̄W − (f_z̄/f)W̄` as an ExpPoly pair; with `f_z̄/f = iκ/2` this is
    /// `½(u_x − v_y) − (κ/2)v + i(½(v_x + u_y) − (κ/2)u)`.
    pub fn vekua_residual(&self) -> Result<Self> {
        let half = creal(lit::<T>(0.5));
        let k2 = self.kappa() * lit::<T>(0.5);
        let re = self
            .u
            .d_dx()
            .checked_sub(&self.v.d_dy())?
            .scale(half)
            .checked_sub(&self.v.scale(k2))?;
        let im = self
            .v
            .d_dx()
            .checked_add(&self.u.d_dy())?
            .scale(half)
            .checked_sub(&self.u.scale(k2))?;
        Ok(FormalExpPair { u: re, v: im })
    }
}

/// `Z^{(n)}(a, z0; ·)` for `f = e^{κy}`, `n = 0..=n_max`, families
/// `[a = 1, a = i]`, built exactly in the ExpPoly algebra.
///
/// Each step is the (F,G)-integral of the pair `(e^{κy}, i e^{−κy})`:
/// `u' = n e^{κy} φ`, `v' = n e^{−κy} ψ` with `φ, ψ` the potentials of
/// `(u e^{−κy}) dx − (v e^{−κy}) dy` and `(v e^{κy}) dx + (u e^{κy}) dy`.
pub fn exact_formal_powers<T: Real>(
    kappa: Complex<T>,
    z0: Point2<T>,
    n_max: usize,
) -> Result<Vec<[FormalExpPair<T>; 2]>> {
    let zero = ExpPoly::zero(kappa);
    let lam = cexp(-kappa * z0.im);
    let mu = cexp(kappa * z0.im);
    let start = [
        FormalExpPair {
            u: ExpPoly::term(kappa, 0, 0, 1, lam),
            v: zero.clone(),
        },
        FormalExpPair {
            u: zero.clone(),
            v: ExpPoly::term(kappa, 0, 0, -1, mu),
        },
    ];
    let mut out = vec![start];
    for n in 1..=n_max {
        let nn = creal(lit::<T>(n as f64));
        let prev = &out[n - 1];
        let mut next = Vec::with_capacity(2);
        for w in prev.iter() {
            let phi = ExpPoly::potential(&w.u.mul_exp(-1), &w.v.mul_exp(-1).neg(), z0)?;
            let psi = ExpPoly::potential(&w.v.mul_exp(1), &w.u.mul_exp(1), z0)?;
            next.push(FormalExpPair {
                u: phi.mul_exp(1).scale(nn),
                v: psi.mul_exp(-1).scale(nn),
            });
        }
        let b = next.pop().expect("two families");
        let a = next.pop().expect("two families");
        out.push([a, b]);
    }
    Ok(out)
}
