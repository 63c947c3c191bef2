//! Hardy inequalities with origin-type and boundary-type sharp constants and
//! their remainder identities, plus the integration-by-parts identity they
//! share.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::context::Hint;
use super::hardy::kernel_density;
use super::report::inadmissible_or;
use super::{Builder, Ctx, HardyParams, Profile, VerificationReport, VerifyOptions};

const IDENTITY_TOL: f64 = 1e-8;
const SINGULAR_TOL: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OriginMode {
    Inequality,
    Identity,
    IdentityL2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundaryMode {
    Inequality,
    Identity,
    IdentityL2,
}

fn identity_tol(p: f64) -> f64 {
    if p < 2.0 {
        SINGULAR_TOL
    } else {
        IDENTITY_TOL
    }
}

fn scope(p: f64, f: &Profile, l2: bool) -> Result<()> {
    if l2 && p != 2.0 {
        return Err(Error::ConstraintViolation(format!("p=2 (got {p})")));
    }
    if !l2 && p != 2.0 && f.is_complex() {
        return Err(Error::ConstraintViolation(
            "the Lp identity needs a real profile".into(),
        ));
    }
    Ok(())
}

/// Origin-constant inequality `((Q-a)/p)^p int |f|^p r^-a w^(1-b) <= int |f'|^p r^(p-a) w^(1-b)`
/// and its remainder identity.
pub fn verify_hardy_b(hp: &HardyParams, f: &Profile, mode: OriginMode, opts: &VerifyOptions) -> Result<VerificationReport> {
    hp.check_origin()?;
    let id = match mode {
        OriginMode::Inequality => "hardy_b_inequality",
        OriginMode::Identity => "hardy_b_identity",
        OriginMode::IdentityL2 => "hardy_b_identity_l2",
    };
    if mode != OriginMode::Inequality {
        scope(hp.p, f, mode == OriginMode::IdentityL2)?;
    }
    let snap = hp.snapshot(f);
    let run = || {
        let (p, a, bb, c) = (hp.p, hp.a, hp.b, hp.c);
        let ctx = Ctx::new(f, hp.q, c, hp.radius, 1, opts.quad);
        let mut b = Builder::new(id, &snap, opts.tol_scale);
        let sharp = ((hp.q - a) / p).powf(p);
        let main = ctx.integral(Hint::new(0, p), -a, 1.0 - bb, |pt| Ok(pt.abs_pow(0, p)))?;
        b.put("lhs_main", sharp, main);
        let grad = ctx.integral(Hint::new(1, p), p - a, 1.0 - bb, |pt| Ok(pt.abs_pow(1, p)))?;
        b.put("grad", 1.0, grad);
        if mode == OriginMode::Inequality {
            return Ok(b.inequality(&["lhs_main"], &["grad"]));
        }
        let coef = sharp * (bb - 1.0) * c * p / (hp.q - a);
        if coef == 0.0 {
            b.put_value("boundary_term", 0.0, 0.0);
        } else {
            let x = ctx.integral(Hint::new(0, p), c - a, -bb, |pt| Ok(pt.abs_pow(0, p)))?;
            b.put("boundary_term", coef, x);
        }
        let t = p / (hp.q - a);
        let rem = ctx.integral(Hint::new(0, p), -a, 1.0 - bb, |pt| kernel_density(pt, 0, t * pt.r, p))?;
        b.put("remainder", p * sharp, rem);
        Ok(b.identity(&["grad"], &["lhs_main", "boundary_term", "remainder"], identity_tol(p)))
    };
    inadmissible_or(id, &snap, run())
}

/// Boundary-constant inequality
/// `((b-1)c/p)^p int |f|^p r^(c-a) w^-b <= int |f'|^p r^(p-a-c(p-1)) w^(p-b)`
/// and its remainder identity.
///
/// The identity is assembled with the gradient weight of the inequality, which
/// is the weight that makes the stated kernel terms close; the alternative
/// weight `r^(p-a) w^(1-b)` is reported as `grad_alt` for comparison.
pub fn verify_hardy_c(hp: &HardyParams, f: &Profile, mode: BoundaryMode, opts: &VerifyOptions) -> Result<VerificationReport> {
    hp.check_boundary()?;
    let id = match mode {
        BoundaryMode::Inequality => "hardy_c_inequality",
        BoundaryMode::Identity => "hardy_c_identity",
        BoundaryMode::IdentityL2 => "hardy_c_identity_l2",
    };
    if mode != BoundaryMode::Inequality {
        scope(hp.p, f, mode == BoundaryMode::IdentityL2)?;
    }
    let snap = hp.snapshot(f);
    let run = || {
        let (p, a, bb, c) = (hp.p, hp.a, hp.b, hp.c);
        let ctx = Ctx::new(f, hp.q, c, hp.radius, 1, opts.quad);
        let mut b = Builder::new(id, &snap, opts.tol_scale);
        let sharp = ((bb - 1.0) * c / p).powf(p);
        let x = ctx.integral(Hint::new(0, p), c - a, -bb, |pt| Ok(pt.abs_pow(0, p)))?;
        b.put("lhs_main", sharp, x);
        let grad_r = p - a - c * (p - 1.0);
        let grad = ctx.integral(Hint::new(1, p), grad_r, p - bb, |pt| Ok(pt.abs_pow(1, p)))?;
        b.put("grad", 1.0, grad);
        if mode == BoundaryMode::Inequality {
            return Ok(b.inequality(&["lhs_main"], &["grad"]));
        }
        let alt = ctx.integral(Hint::new(1, p), p - a, 1.0 - bb, |pt| Ok(pt.abs_pow(1, p)))?;
        b.put("grad_alt", 1.0, alt);
        b.note("gradient weight r^(p-a-c(p-1)) w^(p-b) used; grad_alt uses r^(p-a) w^(1-b) and does not close the identity");
        if mode == BoundaryMode::IdentityL2 {
            b.note("L2 kernel weight exponent on r taken as (a-c)/2");
        }
        let coef = sharp * (hp.q - a) * p / ((bb - 1.0) * c);
        if coef == 0.0 {
            b.put_value("origin_term", 0.0, 0.0);
        } else {
            let a7 = ctx.integral(Hint::new(0, p), -a, 1.0 - bb, |pt| Ok(pt.abs_pow(0, p)))?;
            b.put("origin_term", coef, a7);
        }
        let t = p / ((bb - 1.0) * c);
        let rem = ctx.integral(Hint::new(0, p), c - a, -bb, |pt| {
            kernel_density(pt, 0, t * pt.r.powf(1.0 - c) * pt.w, p)
        })?;
        b.put("remainder", p * sharp, rem);
        Ok(b.identity(&["grad"], &["lhs_main", "origin_term", "remainder"], identity_tol(p)))
    };
    inadmissible_or(id, &snap, run())
}

/// `(1-a) A + (b-1) c X = -p int |f|^(p-2) f f' r^(1-a) w^(1-b) - (Q-1) A`
/// with `A = int |f|^p r^-a w^(1-b)` and `X = int |f|^p r^(c-a) w^-b`.
pub fn verify_ibp_identity(hp: &HardyParams, f: &Profile, opts: &VerifyOptions) -> Result<VerificationReport> {
    hp.check_origin()?;
    if f.is_complex() {
        return Err(Error::ConstraintViolation("integration by parts identity needs a real profile".into()));
    }
    let snap = hp.snapshot(f);
    let run = || {
        let (p, a, bb, c) = (hp.p, hp.a, hp.b, hp.c);
        let ctx = Ctx::new(f, hp.q, c, hp.radius, 1, opts.quad);
        let mut b = Builder::new("ibp_identity", &snap, opts.tol_scale);
        let big_a = ctx.integral(Hint::new(0, p), -a, 1.0 - bb, |pt| Ok(pt.abs_pow(0, p)))?;
        b.put("origin_term", 1.0 - a, big_a);
        b.put("measure_term", -(hp.q - 1.0), big_a);
        if bb == 1.0 {
            b.put_value("boundary_term", 0.0, 0.0);
        } else {
            let x = ctx.integral(Hint::new(0, p), c - a, -bb, |pt| Ok(pt.abs_pow(0, p)))?;
            b.put("boundary_term", (bb - 1.0) * c, x);
        }
        let cross = ctx.integral(Hint::new(0, p), 1.0 - a, 1.0 - bb, |pt| {
            let v = pt.re(0);
            Ok(v.signum() * v.abs().powf(p - 1.0) * pt.re(1))
        })?;
        b.put("cross_term", -p, cross);
        Ok(b.identity(
            &["origin_term", "boundary_term"],
            &["cross_term", "measure_term"],
            identity_tol(p),
        ))
    };
    inadmissible_or("ibp_identity", &snap, run())
}
