#[cfg(test)]
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::scalar::{from_usize, lit, to_f64, Real};

use super::Potential;

/// Default integration step for `h(y)`.
pub const DEFAULT_PROFILE_STEP: f64 = 1e-3;

/// Initial data for `h'' = q(y) h`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ProfileInit<T: Real> {
    /// `h = 1`, `h' = 0` at the lower end of the range.
    Default,
    /// `h(y) = value`, `h'(y) = slope` at a given `y`.
    Values { y: T, value: T, slope: T },
    /// `h = 1` at the lower end and `h = value` at `y`, by shooting on the
    /// initial slope.
    Shooting { y: T, value: T },
}

/// Solution of `(−d²/dy² + q(y)) h = 0` on a range with dense output.
#[derive(Clone)]
pub struct OdeProfile<T: Real> {
    q: Potential<T>,
    ys: Vec<T>,
    h: Vec<T>,
    dh: Vec<T>,
}

fn rk4_step<T: Real>(q: &Potential<T>, y: T, h: T, dh: T, step: T) -> (T, T) {
    let half: T = lit(0.5);
    let f = |yy: T, a: T, b: T| (b, q(yy) * a);
    let (k1a, k1b) = f(y, h, dh);
    let (k2a, k2b) = f(y + step * half, h + step * half * k1a, dh + step * half * k1b);
    let (k3a, k3b) = f(y + step * half, h + step * half * k2a, dh + step * half * k2b);
    let (k4a, k4b) = f(y + step, h + step * k3a, dh + step * k3b);
    let sixth = step / lit(6.0);
    (
        h + sixth * (k1a + (k2a + k3a) * lit(2.0) + k4a),
        dh + sixth * (k1b + (k2b + k3b) * lit(2.0) + k4b),
    )
}

/// Integrates from `start` to `end` in `n` equal steps, returning the
/// visited nodes including both ends.
fn integrate<T: Real>(q: &Potential<T>, start: T, end: T, h0: T, dh0: T, target_step: T) -> Vec<(T, T, T)> {
    let span = end - start;
    let n = (span.abs() / target_step).ceil().max(T::one());
    let n_steps = to_f64(n) as usize;
    let step = span / n;
    let mut out = Vec::with_capacity(n_steps + 1);
    let (mut h, mut dh) = (h0, dh0);
    out.push((start, h, dh));
    for k in 0..n_steps {
        let y = start + step * from_usize::<T>(k);
        let (a, b) = rk4_step(q, y, h, dh, step);
        h = a;
        dh = b;
        out.push((start + step * from_usize::<T>(k + 1), h, dh));
    }
    out
}

/// Padding beyond the requested range, so difference stencils near the
/// boundary stay within the tabulated profile.
fn padding<T: Real>(lo: T, hi: T) -> T {
    (hi - lo) * lit(0.02) + lit(1e-3)
}

/// Solves `h'' = q(y) h` over `y_range` (padded slightly) with fourth-order
/// Runge–Kutta at step `step` and checks `h > 0` at every node.
pub fn ode_profile<T: Real>(
    q: Potential<T>,
    y_range: (T, T),
    init: ProfileInit<T>,
    step: T,
) -> Result<OdeProfile<T>> {
    let (lo, hi) = y_range;
    if !(hi > lo) || !(step > T::zero()) {
        return Err(Error::InvalidArgument("profile range must be increasing with a positive step".into()));
    }
    let pad = padding(lo, hi);
    let (plo, phi) = (lo - pad, hi + pad);
    let (y0, h0, dh0) = match init {
        ProfileInit::Default => (lo, T::one(), T::zero()),
        ProfileInit::Values { y, value, slope } => (y, value, slope),
        ProfileInit::Shooting { y, value } => {
            let a = integrate(&q, lo, y, T::one(), T::zero(), step);
            let b = integrate(&q, lo, y, T::zero(), T::one(), step);
            let (ha, hb) = (a.last().expect("nonempty").1, b.last().expect("nonempty").1);
            if hb.abs() < lit(1e-300) {
                return Err(Error::InvalidArgument("shooting target is unreachable".into()));
            }
            (lo, T::one(), (value - ha) / hb)
        }
    };
    if y0 < plo || y0 > phi {
        return Err(Error::InvalidArgument(format!(
            "profile initial point y = {} lies outside the range",
            to_f64(y0)
        )));
    }
    let mut nodes = integrate(&q, y0, plo, h0, dh0, step);
    nodes.reverse();
    nodes.pop();
    nodes.extend(integrate(&q, y0, phi, h0, dh0, step));
    for &(y, h, _) in &nodes {
        if !(h > T::zero()) {
            return Err(Error::Positivity { x: f64::NAN, y: to_f64(y) });
        }
    }
    Ok(OdeProfile {
        q,
        ys: nodes.iter().map(|n| n.0).collect(),
        h: nodes.iter().map(|n| n.1).collect(),
        dh: nodes.iter().map(|n| n.2).collect(),
    })
}

impl<T: Real> OdeProfile<T> {
    /// Tabulated range `(y_min, y_max)`.
    pub fn range(&self) -> (T, T) {
        (self.ys[0], self.ys[self.ys.len() - 1])
    }

    fn interval(&self, y: T) -> usize {
        let n = self.ys.len();
        match self.ys.binary_search_by(|v| v.partial_cmp(&y).unwrap_or(std::cmp::Ordering::Less)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.clamp(1, n - 1) - 1,
        }
    }

    /// Cubic Hermite interpolation of `(h, h')` on the node interval.
    fn hermite(&self, y: T) -> (T, T) {
        let i = self.interval(y);
        let (y0, y1) = (self.ys[i], self.ys[i + 1]);
        let w = y1 - y0;
        let t = (y - y0) / w;
        let (h0, h1) = (self.h[i], self.h[i + 1]);
        let (d0, d1) = (self.dh[i] * w, self.dh[i + 1] * w);
        let two: T = lit(2.0);
        let three: T = lit(3.0);
        let t2 = t * t;
        let t3 = t2 * t;
        let value = (two * t3 - three * t2 + T::one()) * h0
            + (t3 - two * t2 + t) * d0
            + (three * t2 - two * t3) * h1
            + (t3 - t2) * d1;
        let six: T = lit(6.0);
        let four: T = lit(4.0);
        let deriv = ((six * t2 - six * t) * h0
            + (three * t2 - four * t + T::one()) * d0
            + (six * t - six * t2) * h1
            + (three * t2 - two * t) * d1)
            / w;
        (value, deriv)
    }

    pub fn value(&self, y: T) -> T {
        self.hermite(y).0
    }

    pub fn derivative(&self, y: T) -> T {
        self.hermite(y).1
    }

    /// `h'' = q h`.
    pub fn second_derivative(&self, y: T) -> T {
        (self.q)(y) * self.value(y)
    }

    /// Node values `(y, h, h')`.
    pub fn nodes(&self) -> impl Iterator<Item = (T, T, T)> + '_ {
        (0..self.ys.len()).map(|i| (self.ys[i], self.h[i], self.dh[i]))
    }
}
