//! Logarithmic weights as the `c -> 0` limit of the boundary weight, using
//! `1 - r^c = c log(1/r) + o(c)`.

use crate::error::{Error, Result};

use super::context::{pow0, Hint};
use super::report::inadmissible_or;
use super::{Builder, Ctx, HardyParams, Profile, VerificationReport, VerifyOptions};

/// Largest gap allowed at the smallest `c` of the grid.
const FINAL_GAP: f64 = 0.01;
/// Relative slack when checking that gaps shrink along the grid.
const MONOTONE_SLACK: f64 = 1e-9;

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::ConstraintViolation("c grid is empty".into()));
    }
    if grid.iter().any(|&c| !(c > 0.0 && c <= 0.2)) {
        return Err(Error::ConstraintViolation("c grid must lie in (0, 0.2]".into()));
    }
    if grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ConstraintViolation("c grid must be strictly decreasing".into()));
    }
    Ok(())
}

/// Checks the log-weight Hardy inequality
/// `((b-1)/p)^p int |f|^p r^-a L^-b <= int |f'|^p r^(p-a) L^(p-b)`, `L = log(1/r)`,
/// the log forms of the origin-constant and Rellich inequalities where their
/// hypotheses allow, and the convergence of `c^(b-p)` times the boundary-weight
/// terms to the log-weight terms along `c_grid`.
pub fn verify_log_limits(hp: &HardyParams, f: &Profile, c_grid: &[f64], opts: &VerifyOptions) -> Result<VerificationReport> {
    validate_grid(c_grid)?;
    HardyParams { c: c_grid[0], ..*hp }.check_unified()?;
    let snap = hp.snapshot(f);
    let run = || {
        let (q, p, a, bb) = (hp.q, hp.p, hp.a, hp.b);
        let ctx = Ctx::new(f, q, 1.0, hp.radius, 2, opts.quad);
        if !ctx.is_interior() {
            return Err(Error::ConstraintViolation("profile must vanish near r=0 and r=R".into()));
        }
        let mut b = Builder::new("log_limits", &snap, opts.tol_scale);
        let log_int = |order: usize, s: f64, r_pow: f64, l_pow: f64| {
            ctx.integral(Hint::new(order, s), r_pow, 0.0, move |pt| {
                Ok(pt.abs_pow(order, s) * pt.log_inv.powf(l_pow))
            })
        };
        let weighted_f = log_int(0, p, -a, -bb)?;
        let sharp = ((bb - 1.0) / p).powf(p);
        b.put("lhs_main", sharp, weighted_f);
        b.put("grad", 1.0, log_int(1, p, p - a, p - bb)?);

        let mut failures = Vec::new();
        b.put("origin_lhs", ((q - a) / p).powf(p), weighted_f);
        b.put("origin_rhs", 1.0, log_int(1, p, p - a, -bb)?);
        let (s, ok) = b.link(&["origin_lhs"], &["origin_rhs"]);
        if !ok {
            failures.push(format!("origin log inequality fails with slack {s:e}"));
        }

        if p == 2.0 {
            let lap = ctx.integral(Hint::new(2, 2.0), 4.0 - a, 0.0, |pt| {
                let (re, im) = pt.radial_laplacian(q);
                Ok(pow0(re.hypot(im), 2.0))
            })?;
            b.put("rellich_rhs", 1.0, lap);
            if 4.0 - q < a && a <= q {
                b.put("rellich_sq_lhs", ((q + a - 4.0) / 4.0).powi(2), log_int(0, 2.0, -a, -2.0)?);
                let (s, ok) = b.link(&["rellich_sq_lhs"], &["rellich_rhs"]);
                if !ok {
                    failures.push(format!("squared-log Rellich fails with slack {s:e}"));
                }
            }
            if (3.0..=q).contains(&a) {
                b.put("rellich_fourth_lhs", 0.5625, log_int(0, 2.0, -a, -4.0)?);
                let (s, ok) = b.link(&["rellich_fourth_lhs"], &["rellich_rhs"]);
                if !ok {
                    failures.push(format!("fourth-power-log Rellich fails with slack {s:e}"));
                }
            }
        }

        let target_lhs = b.get("lhs_main");
        let target_rhs = b.get("grad");
        let mut prev_gap = f64::INFINITY;
        let mut last_gap = f64::NAN;
        for &c in c_grid {
            let cctx = Ctx::new(f, q, c, hp.radius, 1, opts.quad);
            let scale = c.powf(bb - p);
            let lhs = cctx.integral(Hint::new(0, p), -a, -bb, |pt| Ok(pt.abs_pow(0, p)))?;
            let lhs = b.put(&format!("scaled_lhs_c{c}"), scale * ((bb - 1.0) * c / p).powf(p), lhs);
            let rhs = cctx.integral(Hint::new(1, p), p - a, p - bb, |pt| Ok(pt.abs_pow(1, p)))?;
            let rhs = b.put(&format!("scaled_rhs_c{c}"), scale, rhs);
            let gap = rel_gap(lhs, target_lhs);
            b.put_value(&format!("gap_lhs_c{c}"), gap, 0.0);
            b.put_value(&format!("gap_rhs_c{c}"), rel_gap(rhs, target_rhs), 0.0);
            if gap > prev_gap * (1.0 + MONOTONE_SLACK) + MONOTONE_SLACK {
                failures.push(format!("gap grows from {prev_gap:e} to {gap:e} at c={c}"));
            }
            prev_gap = gap;
            last_gap = gap;
        }
        if !(last_gap <= FINAL_GAP * opts.tol_scale) {
            failures.push(format!("final gap {last_gap:e} exceeds {FINAL_GAP}"));
        }
        Ok(b.inequality_unless(&["lhs_main"], &["grad"], failures))
    };
    inadmissible_or("log_limits", &snap, run())
}

fn rel_gap(x: f64, target: f64) -> f64 {
    if target == 0.0 {
        x.abs()
    } else {
        (x - target).abs() / target.abs()
    }
}
