//! One-dimensional quadrature for radial integrands with endpoint singularities.

mod ip;
mod kronrod;
mod radial;
mod tanh_sinh;

pub use ip::{ip_identity_check, ip_value, ip_value_or_zero};
pub use radial::{
    integrate_radial, radial_integral, radial_integral_with, Mode, RadialDomain, RadialWeight,
    Substitution,
};

use crate::error::{Error, Result};

/// Cap on the substitution power; exponents this close to -1 are rejected upstream.
const MAX_STRETCH: f64 = 400.0;
/// Distance from an endpoint with a known exponent, relative to the segment,
/// below which the integrand is replaced by its leading power `C t^e`. Keeps raw
/// samples inside the f64 range even when a mild total exponent hides an
/// overflowing factor.
const TAIL_FLOOR: f64 = 1e-40;

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct QuadResult {
    pub value: f64,
    pub err_est: f64,
    pub evals: usize,
    /// `false` when the depth limit was hit; `value` is then the best estimate.
    pub converged: bool,
}

impl QuadResult {
    pub fn zero() -> Self {
        QuadResult {
            value: 0.0,
            err_est: 0.0,
            evals: 0,
            converged: true,
        }
    }

    fn merge(self, o: QuadResult) -> QuadResult {
        QuadResult {
            value: self.value + o.value,
            err_est: self.err_est + o.err_est,
            evals: self.evals + o.evals,
            converged: self.converged && o.converged,
        }
    }

    pub fn scaled(self, s: f64) -> QuadResult {
        QuadResult {
            value: self.value * s,
            err_est: self.err_est * s.abs(),
            ..self
        }
    }
}

/// Local power behaviour of the integrand at the two ends of the interval and
/// interior points where it is not smooth.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SingularHints {
    /// `f(x) ~ (x - lo)^e` as `x -> lo`.
    pub origin_exponent: Option<f64>,
    /// `f(x) ~ (hi - x)^e` as `x -> hi`.
    pub boundary_exponent: Option<f64>,
    pub split_points: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig {
    pub rel_tol: f64,
    pub max_level: u32,
    pub max_pieces: usize,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig {
            rel_tol: 1e-10,
            max_level: 9,
            max_pieces: 2000,
        }
    }
}

impl QuadConfig {
    /// Tighter tolerance and two extra levels, used as a self-consistency oracle.
    pub fn refined(self) -> Self {
        QuadConfig {
            rel_tol: self.rel_tol * 1e-3,
            max_level: self.max_level + 2,
            max_pieces: self.max_pieces * 4,
        }
    }
}

/// `int_lo^hi f(x) dx` for a plain integrand.
pub fn integrate<F>(f: F, lo: f64, hi: f64, hints: &SingularHints, rel_tol: f64) -> Result<QuadResult>
where
    F: Fn(f64) -> f64,
{
    let cfg = QuadConfig {
        rel_tol,
        ..QuadConfig::default()
    };
    integrate_gaps(&|x, _, _| Ok(f(x)), lo, hi, hints, &cfg)
}

/// `int_lo^hi f dx` where `f(x, x - lo, hi - x)` also receives exact endpoint distances.
pub fn integrate_gaps<F>(f: &F, lo: f64, hi: f64, hints: &SingularHints, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::BadInterval { lo, hi });
    }
    let mut cuts = vec![lo];
    let mut inner: Vec<f64> = hints
        .split_points
        .iter()
        .copied()
        .filter(|&s| s > lo && s < hi)
        .collect();
    inner.sort_by(|a, b| a.total_cmp(b));
    inner.dedup();
    cuts.extend(inner);
    cuts.push(hi);
    let last = cuts.len() - 2;
    let mut total = QuadResult::zero();
    for (i, w) in cuts.windows(2).enumerate() {
        let lo_exp = if i == 0 { hints.origin_exponent } else { None };
        let hi_exp = if i == last { hints.boundary_exponent } else { None };
        let part = segment(f, lo, hi, w[0], w[1], lo_exp, hi_exp, cfg)?;
        total = total.merge(part);
    }
    Ok(total)
}

/// Integrates over `[a, b]` inside the outer interval `[lo, hi]`; distances
/// passed to `f` refer to the outer interval.
#[allow(clippy::too_many_arguments)]
pub(crate) fn segment<F>(
    f: &F,
    lo: f64,
    hi: f64,
    a: f64,
    b: f64,
    lo_exp: Option<f64>,
    hi_exp: Option<f64>,
    cfg: &QuadConfig,
) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let off_lo = a - lo;
    let off_hi = hi - b;
    let local = |x: f64, da: f64, db: f64| f(x, off_lo + da, off_hi + db);
    match (lo_exp, hi_exp) {
        (None, None) => robust(&local, a, b, cfg),
        (Some(m), None) => stretched(&local, a, b, m, false, cfg),
        (None, Some(m)) => stretched(&local, a, b, m, true, cfg),
        (Some(m0), Some(m1)) => {
            let mid = 0.5 * (a + b);
            let half = mid - a;
            let left = |x: f64, da: f64, db: f64| local(x, da, db + (b - mid));
            let right = |x: f64, da: f64, db: f64| local(x, da + half, db);
            let l = stretched(&left, a, mid, m0, false, cfg)?;
            let r = stretched(&right, mid, b, m1, true, cfg)?;
            Ok(l.merge(r))
        }
    }
}

/// `x - a = L s^m` (or `b - x = L s^m` when `at_hi`), turning `t^e` into a bounded
/// integrand; `m = 1` for `e >= 0`. The piece within `TAIL_FLOOR L` of the endpoint is integrated as `C t^e`.
fn stretched<F>(f: &F, a: f64, b: f64, e: f64, at_hi: bool, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let m = (1.0 / (1.0 + e)).clamp(1.0, MAX_STRETCH);
    let len = b - a;
    let floor = len * TAIL_FLOOR;
    let s0 = TAIL_FLOOR.powf(1.0 / m);
    let g = |_s: f64, s: f64, one_minus_s: f64| -> Result<f64> {
        let near = len * s.powf(m);
        if near < f64::MIN_POSITIVE {
            return Ok(0.0);
        }
        let far = if one_minus_s < 0.5 {
            -len * (m * (-one_minus_s).ln_1p()).exp_m1()
        } else {
            len - near
        };
        if far <= 0.0 {
            return Ok(0.0);
        }
        let jac = len * m * s.powf(m - 1.0);
        let v = if at_hi {
            f(b - near, far, near)?
        } else {
            f(a + near, near, far)?
        };
        Ok(v * jac)
    };
    let tail_value = if at_hi {
        f(b - floor, len - floor, floor)?
    } else {
        f(a + floor, floor, len - floor)?
    };
    let tail = tail_value * floor / (1.0 + e);
    let body = robust(&|x: f64, _: f64, to_hi: f64| g(x, x, to_hi), s0, 1.0, cfg)?;
    Ok(QuadResult {
        value: body.value + tail,
        ..body
    })
}

/// Double-exponential first; adaptive Kronrod if that fails to settle.
fn robust<F>(f: &F, a: f64, b: f64, cfg: &QuadConfig) -> Result<QuadResult>
where
    F: Fn(f64, f64, f64) -> Result<f64>,
{
    let ts = tanh_sinh::integrate(f, a, b, cfg.rel_tol, cfg.max_level)?;
    if ts.converged {
        return Ok(ts);
    }
    let gk = kronrod::integrate(f, a, b, cfg.rel_tol, cfg.max_pieces)?;
    let mut best = if gk.err_est < ts.err_est { gk } else { ts };
    best.evals = ts.evals + gk.evals;
    Ok(best)
}
