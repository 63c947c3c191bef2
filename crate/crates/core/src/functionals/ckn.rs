//! Higher-order Caffarelli-Kohn-Nirenberg type inequality built on the
//! iterated Hardy identity and one Hölder step.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::context::Hint;
use super::hardy::ladder;
use super::report::inadmissible_or;
use super::{Builder, Ctx, HardyParams, Profile, Status, VerificationReport, VerifyOptions};

/// Tolerance on the exponent balance `delta r/p + (1-delta) r/q = 1` and on window edges.
const BALANCE_TOL: f64 = 1e-12;

/// Interpolation exponents `q`, `r`, `delta`, `beta`, `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CknExponents {
    pub q: f64,
    pub r: f64,
    pub delta: f64,
    pub beta: f64,
    pub gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CknParams {
    pub base: HardyParams,
    #[serde(flatten)]
    pub exps: CknExponents,
}

/// Admissible interval for `delta`: `[0,1] ∩ [(r-q)/r, p/r]`.
fn window(p: f64, q: f64, r: f64) -> (f64, f64) {
    (((r - q) / r).max(0.0), (p / r).min(1.0))
}

fn inside(x: f64, (lo, hi): (f64, f64)) -> bool {
    x >= lo - BALANCE_TOL && x <= hi + BALANCE_TOL
}

/// Solves the exponent balance for `delta` and sets `gamma = -delta + beta (1-delta)`.
///
/// For `p != q` the balance fixes `delta`; a conflicting `pick` is a window
/// violation. For `p = q` the balance forces `r = p` and leaves `delta` free,
/// so `pick` is required.
pub fn resolve_ckn_params(base: HardyParams, q: f64, r: f64, beta: f64, pick: Option<f64>) -> Result<CknParams> {
    let p = base.p;
    if !(p > 1.0 && q > 1.0 && r > 0.0) {
        return Err(Error::ConstraintViolation(format!("p>1, q>1, r>0 (got p={p}, q={q}, r={r})")));
    }
    if p + q < r {
        return Err(Error::ConstraintViolation(format!("p+q>=r (got {})", p + q)));
    }
    let win = window(p, q, r);
    if win.0 > win.1 + BALANCE_TOL {
        return Err(Error::NoAdmissibleDelta(format!("empty window [{}, {}]", win.0, win.1)));
    }
    let delta = if p != q {
        let d = (1.0 - r / q) / (r / p - r / q);
        if let Some(want) = pick {
            if (want - d).abs() > BALANCE_TOL {
                return Err(Error::WindowViolation(format!(
                    "delta={want} contradicts the exponent balance, which gives {d}"
                )));
            }
        }
        if !inside(d, win) {
            return Err(Error::NoAdmissibleDelta(format!(
                "balance gives delta={d} outside [{}, {}]",
                win.0, win.1
            )));
        }
        d
    } else {
        if (r - p).abs() > BALANCE_TOL * p {
            return Err(Error::NoAdmissibleDelta(format!("p=q requires r=p (got r={r})")));
        }
        let Some(d) = pick else {
            return Err(Error::NoAdmissibleDelta("p=q leaves delta free; pick one".into()));
        };
        if !inside(d, win) {
            return Err(Error::WindowViolation(format!("delta={d} outside [{}, {}]", win.0, win.1)));
        }
        d
    };
    let delta = delta.clamp(0.0, 1.0);
    Ok(CknParams {
        base,
        exps: CknExponents {
            q,
            r,
            delta,
            beta,
            gamma: -delta + beta * (1.0 - delta),
        },
    })
}

impl CknParams {
    pub fn check(&self) -> Result<()> {
        let p = self.base.p;
        let CknExponents { q, r, delta, beta, gamma } = self.exps;
        if !(q > 1.0 && r > 0.0 && p + q >= r) {
            return Err(Error::ConstraintViolation(format!("q>1, r>0, p+q>=r (got q={q}, r={r})")));
        }
        if !inside(delta, window(p, q, r)) {
            return Err(Error::WindowViolation(format!("delta={delta}")));
        }
        let balance = delta * r / p + (1.0 - delta) * r / q;
        if (balance - 1.0).abs() > BALANCE_TOL {
            return Err(Error::ConstraintViolation(format!("delta r/p + (1-delta) r/q = 1 (got {balance})")));
        }
        if (gamma - (-delta + beta * (1.0 - delta))).abs() > BALANCE_TOL {
            return Err(Error::ConstraintViolation("gamma = -delta + beta (1-delta)".into()));
        }
        Ok(())
    }
}

/// `(int |f|^s omega^(s e))^(1/s)` with its propagated error.
fn weighted_norm(ctx: &Ctx, omega: (f64, f64), s: f64, e: f64) -> Result<(f64, f64)> {
    let q = ctx.integral(Hint::new(0, s), s * e * omega.0, s * e * omega.1, |pt| Ok(pt.abs_pow(0, s)))?;
    let n = q.value.max(0.0).powf(1.0 / s);
    let err = if q.value > 0.0 { n * q.err_est / (s * q.value) } else { 0.0 };
    Ok((n, err))
}

/// Checks
/// `prod ((b+jp-1)c/p)^delta ||omega^gamma f||_r <= (grad - rem)^(delta/p) ||omega^beta f||_q^(1-delta)`
/// where `rem` collects the nonnegative remainder and `psi` terms of the order-`k`
/// identity, and separately the Hölder step
/// `||omega^gamma f||_r <= ||f/omega||_p^delta ||omega^beta f||_q^(1-delta)`.
pub fn verify_ckn(ckn: &CknParams, f: &Profile, opts: &VerifyOptions) -> Result<VerificationReport> {
    let hp = ckn.base;
    hp.check_higher(hp.k)?;
    ckn.check()?;
    let mut snap = hp.snapshot(f);
    for (k, v) in serde_json::to_value(ckn.exps).expect("serializes").as_object().expect("object") {
        snap[k.as_str()] = v.clone();
    }
    inadmissible_or("ckn", &snap, ckn_inner(ckn, f, opts, &snap))
}

fn ckn_inner(ckn: &CknParams, f: &Profile, opts: &VerifyOptions, snap: &serde_json::Value) -> Result<VerificationReport> {
    let hp = ckn.base;
    let CknExponents { q, r, delta, beta, gamma } = ckn.exps;
    let (p, k) = (hp.p, hp.k);
    let ctx = Ctx::new(f, hp.q, hp.c, hp.radius, k, opts.quad);
    let mut b = Builder::new("ckn", snap, opts.tol_scale);

    let shift = (k - 1) as f64 * p;
    let omega = ((hp.a + shift) / p, (hp.b + shift) / p);

    let with_rem = p == 2.0 || !f.is_complex();
    let lad = ladder(&ctx, &hp, &mut b, with_rem)?;
    let grad = b.get("grad");
    let grad_err = b.err("grad");
    let dropped: Vec<&str> = if with_rem {
        lad.remainders.iter().chain(&lad.psis).map(String::as_str).collect()
    } else {
        b.note("complex profile with p!=2: remainder terms set to zero");
        Vec::new()
    };
    let rem: f64 = dropped.iter().map(|n| b.get(n)).sum();
    let rem_err: f64 = dropped.iter().map(|n| b.err(n)).sum();
    let mut bracket = grad - rem;
    let bracket_err = grad_err + rem_err;
    b.put_value("bracket", bracket, bracket_err);
    if bracket < 0.0 {
        if -bracket > 10.0 * bracket_err + 1e-12 * grad.abs() {
            let diag = format!("negative bracket {bracket:e} beyond its error {bracket_err:e}");
            return Ok(b.with_status(f64::NAN, f64::NAN, Status::Fail { diagnostic: diag }));
        }
        bracket = 0.0;
    }

    let (n_r, e_r) = weighted_norm(&ctx, omega, r, gamma)?;
    let (n_p, e_p) = weighted_norm(&ctx, omega, p, -1.0)?;
    let (n_q, e_q) = weighted_norm(&ctx, omega, q, beta)?;
    b.put_value("norm_r", n_r, e_r);
    b.put_value("norm_p", n_p, e_p);
    b.put_value("norm_q", n_q, e_q);

    let constant: f64 = (0..k)
        .map(|j| ((hp.b + j as f64 * p - 1.0) * hp.c / p).abs().powf(delta))
        .product();
    let lhs = constant * n_r;
    let lhs_err = constant * e_r;
    let bracket_pow = bracket.powf(delta / p);
    let q_pow = n_q.powf(1.0 - delta);
    let rhs = bracket_pow * q_pow;
    let rhs_err = rhs
        * (rel(bracket_err, bracket) * delta / p + rel(e_q, n_q) * (1.0 - delta));

    let holder_rhs = n_p.powf(delta) * q_pow;
    let holder_err = holder_rhs * (rel(e_p, n_p) * delta + rel(e_q, n_q) * (1.0 - delta));
    let holder_slack = holder_rhs - n_r;
    b.put_value("holder_rhs", holder_rhs, holder_err);
    b.put_value("holder_slack", holder_slack, holder_err + e_r);
    let holder_budget = 10.0 * (holder_err + e_r) + 1e-9 * holder_rhs.abs().max(n_r.abs());
    if holder_slack < -holder_budget {
        let diag = format!("Hölder step fails: slack {holder_slack:e}");
        return Ok(b.with_status(lhs, rhs, Status::Fail { diagnostic: diag }));
    }
    b.put_value("lhs", lhs, lhs_err);
    b.put_value("rhs", rhs, rhs_err);
    Ok(b.inequality_values(lhs, rhs, lhs_err + rhs_err, lhs.abs() + rhs.abs()))
}

fn rel(err: f64, v: f64) -> f64 {
    if v == 0.0 {
        0.0
    } else {
        err / v.abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialExpr;

    fn base() -> HardyParams {
        HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0)
    }

    #[test]
    fn resolve_examples() {
        let c = resolve_ckn_params(base(), 2.0, 2.0, 0.0, Some(0.5)).unwrap();
        assert_eq!(c.exps.gamma, -0.5);
        assert!(resolve_ckn_params(base(), 2.0, 2.0, 0.0, None).is_err());
        let hp = HardyParams { p: 3.0, ..base() };
        let c = resolve_ckn_params(hp, 2.0, 2.4, 0.0, None).unwrap();
        assert!((c.exps.delta - 0.5).abs() < 1e-12);
        assert!(matches!(resolve_ckn_params(hp, 2.0, 2.4, 0.0, Some(1.0)), Err(Error::WindowViolation(_))));
    }

    #[test]
    fn delta_cases() {
        let f = Profile::real(RadialExpr::mul(RadialExpr::bump(0.2, 0.8), RadialExpr::power(1.0)));
        let o = VerifyOptions::default();
        for d in [0.0, 0.5, 1.0] {
            let c = resolve_ckn_params(base(), 2.0, 2.0, 0.3, Some(d)).unwrap();
            let r = verify_ckn(&c, &f, &o).unwrap();
            assert!(r.passed(), "delta={d}: {}", r.to_json());
            if d == 0.0 {
                assert_eq!(r.slack(), Some(0.0));
            }
        }
    }
}
