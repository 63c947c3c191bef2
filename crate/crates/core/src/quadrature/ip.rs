//! The convexity kernel `I_p(f, u) = (p-1) int_0^1 |xi f + (1-xi) u|^(p-2) xi dxi`.

use super::{segment, QuadConfig};
use crate::error::{Error, Result};

fn kernel_cfg() -> QuadConfig {
    QuadConfig {
        rel_tol: 1e-14,
        max_level: 10,
        max_pieces: 400,
    }
}

/// `I_p(fv, uv)` by quadrature. On each sign-definite piece of
/// `L(xi) = uv + xi (fv - uv)` the substitution `s = |L|^(p-1)` removes the
/// `|L|^(p-2)` singularity at the zero crossing.
pub fn ip_value(fv: f64, uv: f64, p: f64) -> Result<f64> {
    if !(p > 1.0) {
        return Err(Error::ConstraintViolation(format!("p>1 (got {p})")));
    }
    if p == 2.0 {
        return Ok(0.5);
    }
    let scale = fv.abs().max(uv.abs());
    if scale == 0.0 {
        return if p > 2.0 {
            Ok(0.0)
        } else {
            Err(Error::UndefinedAtOrigin)
        };
    }
    let d = fv - uv;
    let cfg = kernel_cfg();
    if d.abs() <= 1e-3 * scale {
        // L keeps the sign of uv and stays away from zero
        let g = |xi: f64, _: f64, _: f64| Ok((p - 1.0) * (uv + xi * d).abs().powf(p - 2.0) * xi);
        return Ok(segment(&g, 0.0, 1.0, 0.0, 1.0, None, None, &cfg)?.value);
    }
    let crossing = -uv / d;
    let mut cuts = vec![0.0];
    if crossing > 0.0 && crossing < 1.0 {
        cuts.push(crossing);
    }
    cuts.push(1.0);
    let inv = 1.0 / (p - 1.0);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (xa, xb) = (w[0], w[1]);
        let la = if xa == crossing { 0.0 } else { uv + xa * d };
        let lb = if xb == crossing { 0.0 } else { uv + xb * d };
        let sigma = if la + lb >= 0.0 { 1.0 } else { -1.0 };
        let sa = la.abs().powf(p - 1.0);
        let sb = lb.abs().powf(p - 1.0);
        let xi_of = |s: f64| (sigma * s.powf(inv) - uv) / d;
        let (lo, hi, orient) = if sa <= sb { (sa, sb, 1.0) } else { (sb, sa, -1.0) };
        if hi == lo {
            continue;
        }
        let g = |s: f64, _: f64, _: f64| Ok(xi_of(s));
        let piece = segment(&g, lo, hi, lo, hi, None, None, &cfg)?;
        total += orient * sigma / d * piece.value;
    }
    Ok(total.max(0.0))
}

/// As [`ip_value`], but maps the undefined `(0, 0)` case to `0` and reports it.
/// The kernel always multiplies `|f - u|^2`, which vanishes there.
pub fn ip_value_or_zero(fv: f64, uv: f64, p: f64) -> Result<(f64, bool)> {
    match ip_value(fv, uv, p) {
        Ok(v) => Ok((v, false)),
        Err(Error::UndefinedAtOrigin) => Ok((0.0, true)),
        Err(e) => Err(e),
    }
}

/// `| |u|^p/p + (p-1)/p |v|^p - |v|^(p-2) v u - I_p(v, u) |v - u|^2 |`.
pub fn ip_identity_check(v: f64, u: f64, p: f64) -> Result<f64> {
    let (ip, _) = ip_value_or_zero(v, u, p)?;
    let av = v.abs();
    let lhs = u.abs().powf(p) / p + (p - 1.0) / p * av.powf(p) - signed_pow(v, p - 1.0) * u;
    Ok((lhs - ip * (v - u) * (v - u)).abs())
}

/// `|x|^(q-1) x` written as `sign(x) |x|^q`, finite at `x = 0` for `q > 0`.
pub(crate) fn signed_pow(x: f64, q: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x.signum() * x.abs().powf(q)
    }
}
