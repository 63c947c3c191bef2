//! Test-function families used by the sharpness scans.

use super::expr::RadialExpr;
use crate::error::{Error, Result};

fn check_delta(delta: f64) -> Result<()> {
    if delta > 0.0 && delta < 0.5 {
        Ok(())
    } else {
        Err(Error::BadDelta(delta))
    }
}

/// `phi * (1 - (r/R)^c)^kappa` with `phi = 0` below `R(1-2 delta)` and `phi = 1` above `R(1-delta)`.
pub fn make_boundary_family(kappa: f64, delta: f64, c: f64, radius: f64) -> Result<RadialExpr> {
    check_delta(delta)?;
    if !(kappa > 0.0) {
        return Err(Error::ConstraintViolation(format!("kappa>0 (got {kappa})")));
    }
    if !(c > 0.0) || !(radius > 0.0) {
        return Err(Error::ConstraintViolation(format!(
            "c>0 and R>0 (got c={c}, R={radius})"
        )));
    }
    Ok(RadialExpr::Product(vec![
        RadialExpr::RampUp {
            lo: radius * (1.0 - 2.0 * delta),
            hi: radius * (1.0 - delta),
        },
        RadialExpr::boundary_power(c, kappa, radius),
    ]))
}

/// `phi * r^kappa` with `phi = 1` on `(0, delta)` and `phi = 0` beyond `2 delta`.
pub fn make_origin_family(kappa: f64, delta: f64) -> Result<RadialExpr> {
    check_delta(delta)?;
    Ok(RadialExpr::Product(vec![
        RadialExpr::RampDown {
            lo: delta,
            hi: 2.0 * delta,
        },
        RadialExpr::power(kappa),
    ]))
}

/// `((r/R)^(-c) - 1)^((b-1)/p)`, the profile that saturates the boundary constant.
pub fn extremal_candidate(b: f64, p: f64, c: f64, radius: f64) -> RadialExpr {
    let kappa = (b - 1.0) / p;
    let mut factors = vec![
        RadialExpr::power(-c * kappa),
        RadialExpr::boundary_power(c, kappa, radius),
    ];
    if radius != 1.0 {
        factors.insert(0, RadialExpr::constant(radius.powf(c * kappa)));
    }
    RadialExpr::Product(factors)
}
