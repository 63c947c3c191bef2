//! Rayleigh-quotient scans showing that the sharp constants are approached
//! but not attained.
//!
//! All integrals are taken in the normalized variable `r/R`; quotients of
//! matching homogeneity are unaffected and the probe reports normalized values.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functionals::{Ctx, HardyParams, Hint, Point, Profile, VerifyOptions};
use crate::quadrature::QuadResult;
use crate::radial::{extremal_candidate, make_boundary_family, make_origin_family, RadialExpr};

/// Offsets of `kappa` above its critical value, coarse to fine.
pub const DEFAULT_OFFSETS: [f64; 6] = [0.32, 0.16, 0.08, 0.04, 0.02, 0.01];
/// Cutoff width as a fraction of the offset.
const DELTA_PER_OFFSET: f64 = 0.1;
/// Allowed relative distance of the scan limit from the target.
pub const SCAN_GAP: f64 = 0.05;
/// Allowed deviation of the normalized divergence slope from 1.
const SLOPE_TOL: f64 = 0.1;
const MIN_R_SQUARED: f64 = 0.999;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RayleighKind {
    /// `int |f'|^p r^(p-a) w^(p-b) / int |f|^p r^-a w^-b`.
    UnifiedHardy,
    /// `int |f'|^p r^(p-a) w^(1-b) / int |f|^p r^-a w^(1-b)`.
    OriginHardy,
    /// `int |f'|^p r^(p-a-c(p-1)) w^(p-b) / int |f|^p r^(c-a) w^-b`.
    BoundaryHardy,
    /// `int |Lf|^2 r^(4-a) / int |f|^2 r^-a w^-2`.
    RellichWeightSquared,
    /// `int |Lf|^2 r^(4-a) / int |f|^2 r^-a w^-4`.
    RellichWeightFourth,
    /// `int |Lf|^p r^(2p-a) / int |f|^p r^-a w^-p`.
    RellichLp,
}

impl RayleighKind {
    fn check(self, hp: &HardyParams) -> Result<()> {
        match self {
            RayleighKind::UnifiedHardy => hp.check_unified(),
            RayleighKind::OriginHardy => hp.check_origin(),
            RayleighKind::BoundaryHardy => hp.check_boundary(),
            RayleighKind::RellichWeightSquared => hp.check_rellich_first(),
            RayleighKind::RellichWeightFourth => hp.check_rellich_second(),
            RayleighKind::RellichLp => hp.check_rellich_lp(),
        }
    }

    /// Best constant of the inequality the quotient belongs to.
    pub fn sharp_constant(self, hp: &HardyParams) -> f64 {
        let HardyParams { q, p, a, b, c, .. } = *hp;
        match self {
            RayleighKind::UnifiedHardy | RayleighKind::BoundaryHardy => ((b - 1.0) * c / p).powf(p),
            RayleighKind::OriginHardy => ((q - a) / p).powf(p),
            RayleighKind::RellichWeightSquared => ((q + a - 4.0) * c / 4.0).powi(2),
            RayleighKind::RellichWeightFourth => (0.75 * c * c).powi(2),
            RayleighKind::RellichLp => {
                let k = ((q * (p - 1.0) + a - 2.0 * p) / p).abs().powf(p);
                k * ((p - 1.0) * c / p).powf(p)
            }
        }
    }
}

/// Quotient value with its propagated quadrature error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Quotient {
    pub value: f64,
    pub err_est: f64,
}

fn lap_pow(pt: &Point, q: f64, p: f64) -> f64 {
    let (re, im) = pt.radial_laplacian(q);
    re.hypot(im).powf(p)
}

/// Gradient-side integral over function-side integral for `kind`.
pub fn rayleigh(hp: &HardyParams, f: &RadialExpr, kind: RayleighKind, opts: &VerifyOptions) -> Result<Quotient> {
    kind.check(hp)?;
    let profile = Profile::real(f.clone());
    let HardyParams { q, p, a, b, c, .. } = *hp;
    // Second-order jets overflow near the critical powers; take only what the kind needs.
    let order = match kind {
        RayleighKind::UnifiedHardy | RayleighKind::OriginHardy | RayleighKind::BoundaryHardy => 1,
        _ => 2,
    };
    let ctx = Ctx::new(&profile, q, c, hp.radius, order, opts.quad);
    let abs0 = |pt: &Point| Ok(pt.abs_pow(0, p));
    let abs1 = |pt: &Point| Ok(pt.abs_pow(1, p));
    let lap = |pt: &Point| Ok(lap_pow(pt, q, p));
    let (num, den) = match kind {
        RayleighKind::UnifiedHardy => (
            ctx.integral(Hint::new(1, p), p - a, p - b, abs1)?,
            ctx.integral(Hint::new(0, p), -a, -b, abs0)?,
        ),
        RayleighKind::OriginHardy => (
            ctx.integral(Hint::new(1, p), p - a, 1.0 - b, abs1)?,
            ctx.integral(Hint::new(0, p), -a, 1.0 - b, abs0)?,
        ),
        RayleighKind::BoundaryHardy => (
            ctx.integral(Hint::new(1, p), p - a - c * (p - 1.0), p - b, abs1)?,
            ctx.integral(Hint::new(0, p), c - a, -b, abs0)?,
        ),
        RayleighKind::RellichWeightSquared | RayleighKind::RellichWeightFourth => {
            let w_pow = if kind == RayleighKind::RellichWeightSquared { -2.0 } else { -4.0 };
            (
                ctx.integral(Hint::new(2, 2.0), 4.0 - a, 0.0, lap)?,
                ctx.integral(Hint::new(0, 2.0), -a, w_pow, abs0)?,
            )
        }
        RayleighKind::RellichLp => (
            ctx.integral(Hint::new(2, p), 2.0 * p - a, 0.0, lap)?,
            ctx.integral(Hint::new(0, p), -a, -p, abs0)?,
        ),
    };
    quotient(num, den)
}

fn quotient(num: QuadResult, den: QuadResult) -> Result<Quotient> {
    if den.value <= 0.0 {
        return Err(Error::ZeroDenominator);
    }
    let value = num.value / den.value;
    let rel = num.err_est / num.value.abs().max(f64::MIN_POSITIVE) + den.err_est / den.value;
    Ok(Quotient {
        value,
        err_est: value.abs() * rel,
    })
}

/// One `(kappa, delta)` point; `error` is set and `ratio` is NaN when the
/// point could not be evaluated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub kappa: f64,
    pub delta: f64,
    pub ratio: f64,
    pub err_est: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanFamily {
    /// `phi_delta (1 - (r/R)^c)^kappa`, `kappa -> (b-1)/p` from above.
    Boundary,
    /// `phi_delta r^kappa`, `kappa -> -(Q-a)/p` from above.
    Origin,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessScan {
    pub family: ScanFamily,
    pub target: f64,
    pub rows: Vec<ScanRow>,
    /// Linear extrapolation to zero offset through the two finest rows.
    pub extrapolated: f64,
    /// `|extrapolated - target| / target`.
    pub relative_gap: f64,
    /// `|ratio - target| / target` at the finest row; informational, since the
    /// raw ratio carries a cutoff cost linear in the offset.
    pub finest_gap: f64,
    /// Every row stays above `target` up to its error budget.
    pub lower_bound_ok: bool,
    /// Ratios move toward the target as the offset shrinks.
    pub monotone: bool,
    pub pass: bool,
}

impl SharpnessScan {
    pub const CSV_HEADER: &'static str = "kappa,delta,ratio,err_est";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            out.push_str(&format!("{:e},{:e},{:e},{:e}\n", r.kappa, r.delta, r.ratio, r.err_est));
        }
        out
    }

    /// `{target, extrapolated, relative_gap}` plus the pass flags.
    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "family": self.family,
            "target": self.target,
            "extrapolated": self.extrapolated,
            "relative_gap": self.relative_gap,
            "finest_gap": self.finest_gap,
            "lower_bound_ok": self.lower_bound_ok,
            "monotone": self.monotone,
            "pass": self.pass,
        })
    }
}

fn validate_offsets(offsets: &[f64]) -> Result<()> {
    if offsets.len() < 2 {
        return Err(Error::ConstraintViolation("a scan needs at least two offsets".into()));
    }
    if offsets.iter().any(|&o| !(o > 0.0 && o * DELTA_PER_OFFSET < 0.5)) {
        return Err(Error::ConstraintViolation("offsets must be positive and below 5".into()));
    }
    if offsets.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ConstraintViolation("offsets must be strictly decreasing".into()));
    }
    Ok(())
}

/// Scan of the unified Hardy quotient over the boundary family.
pub fn scan_boundary(hp: &HardyParams, offsets: &[f64], opts: &VerifyOptions) -> Result<SharpnessScan> {
    hp.check_unified()?;
    validate_offsets(offsets)?;
    let critical = (hp.b - 1.0) / hp.p;
    run_scan(ScanFamily::Boundary, hp, RayleighKind::UnifiedHardy, offsets, opts, |off| {
        let kappa = critical + off;
        let delta = off * DELTA_PER_OFFSET;
        Ok((kappa, delta, make_boundary_family(kappa, delta, hp.c, hp.radius)?))
    })
}

/// Scan of the origin-constant quotient over the origin family.
pub fn scan_origin(hp: &HardyParams, offsets: &[f64], opts: &VerifyOptions) -> Result<SharpnessScan> {
    hp.check_origin()?;
    validate_offsets(offsets)?;
    let critical = -(hp.q - hp.a) / hp.p;
    run_scan(ScanFamily::Origin, hp, RayleighKind::OriginHardy, offsets, opts, |off| {
        let kappa = critical + off;
        let delta = off * DELTA_PER_OFFSET;
        Ok((kappa, delta, make_origin_family(kappa, delta)?))
    })
}

fn run_scan<G>(
    family: ScanFamily,
    hp: &HardyParams,
    kind: RayleighKind,
    offsets: &[f64],
    opts: &VerifyOptions,
    make: G,
) -> Result<SharpnessScan>
where
    G: Fn(f64) -> Result<(f64, f64, RadialExpr)> + Sync,
{
    let target = kind.sharp_constant(hp);
    let rows: Vec<ScanRow> = offsets
        .par_iter()
        .map(|&off| {
            let (kappa, delta, ratio) = match make(off) {
                Ok((k, d, f)) => (k, d, rayleigh(hp, &f, kind, opts)),
                Err(e) => (f64::NAN, off * DELTA_PER_OFFSET, Err(e)),
            };
            match ratio {
                Ok(q) => ScanRow {
                    kappa,
                    delta,
                    ratio: q.value,
                    err_est: q.err_est,
                    error: None,
                },
                Err(e) => ScanRow {
                    kappa,
                    delta,
                    ratio: f64::NAN,
                    err_est: f64::NAN,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();

    let all_ok = rows.iter().all(|r| r.error.is_none());
    let budget = |r: &ScanRow| (10.0 * r.err_est + 1e-9 * target) * opts.tol_scale;
    let lower_bound_ok = all_ok && rows.iter().all(|r| r.ratio >= target - budget(r));
    let dist: Vec<f64> = rows.iter().map(|r| (r.ratio - target).abs()).collect();
    let monotone = all_ok
        && rows
            .windows(2)
            .zip(dist.windows(2))
            .all(|(r, d)| d[1] <= d[0] + budget(&r[0]) + budget(&r[1]));

    let n = rows.len();
    let (o1, o2) = (offsets[n - 2], offsets[n - 1]);
    let (r1, r2) = (rows[n - 2].ratio, rows[n - 1].ratio);
    let extrapolated = r2 - (r1 - r2) * o2 / (o1 - o2);
    let relative_gap = (extrapolated - target).abs() / target;
    let finest_gap = (r2 - target).abs() / target;
    let pass = lower_bound_ok && relative_gap <= SCAN_GAP * opts.tol_scale;
    Ok(SharpnessScan {
        family,
        target,
        rows,
        extrapolated,
        relative_gap,
        finest_gap,
        lower_bound_ok,
        monotone,
        pass,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProbeRow {
    pub eps: f64,
    pub integral: f64,
    pub err_est: f64,
}

/// Growth of the gradient-side integral of the extremal profile on `[1/2, 1-eps]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NonattainmentProbe {
    pub rows: Vec<ProbeRow>,
    /// Least-squares slope of the integral against `log(1/eps)`.
    pub slope: f64,
    /// Predicted slope `((b-1)/p)^p c^(p-1)`.
    pub coefficient: f64,
    pub normalized_slope: f64,
    pub r_squared: f64,
    /// Increment per unit of `log(1/eps)` between consecutive rows, normalized.
    pub increments: Vec<f64>,
    pub pass: bool,
}

/// Shell integrals of `|f'|^p r^(p-a) w^(p-b)` for the extremal profile, which
/// grow like `log(1/eps)` because the profile is not admissible.
pub fn nonattainment_probe(hp: &HardyParams, eps_grid: &[f64], opts: &VerifyOptions) -> Result<NonattainmentProbe> {
    hp.check_unified()?;
    if eps_grid.len() < 2 {
        return Err(Error::ConstraintViolation("the probe needs at least two eps values".into()));
    }
    if eps_grid.iter().any(|&e| !(e > 0.0 && e < 0.5)) || eps_grid.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::ConstraintViolation("eps grid must be strictly decreasing in (0, 1/2)".into()));
    }
    let HardyParams { q, p, a, b, c, .. } = *hp;
    let profile = Profile::real(extremal_candidate(b, p, c, hp.radius));
    let ctx = Ctx::new(&profile, q, c, hp.radius, 1, opts.quad);
    let rows = eps_grid
        .par_iter()
        .map(|&eps| {
            let v = ctx.integral_between(0.5, 1.0 - eps, p - a, p - b, |pt| Ok(pt.abs_pow(1, p)))?;
            Ok(ProbeRow {
                eps,
                integral: v.value,
                err_est: v.err_est,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let xs: Vec<f64> = rows.iter().map(|r| -r.eps.ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| r.integral).collect();
    let (slope, r_squared) = linear_fit(&xs, &ys);
    let coefficient = ((b - 1.0) / p).powf(p) * c.powf(p - 1.0);
    let normalized_slope = slope / coefficient;
    let increments = xs
        .windows(2)
        .zip(ys.windows(2))
        .map(|(x, y)| (y[1] - y[0]) / (x[1] - x[0]) / coefficient)
        .collect();
    let pass = (normalized_slope - 1.0).abs() <= SLOPE_TOL * opts.tol_scale && r_squared >= MIN_R_SQUARED;
    Ok(NonattainmentProbe {
        rows,
        slope,
        coefficient,
        normalized_slope,
        r_squared,
        increments,
        pass,
    })
}

/// Least-squares slope and coefficient of determination.
fn linear_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
    (slope, r2)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> HardyParams {
        HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0)
    }

    #[test]
    fn quotients_respect_constants() {
        let o = VerifyOptions::default();
        let f = make_boundary_family(1.0, 0.25, 1.0, 1.0).unwrap();
        let q = rayleigh(&base(), &f, RayleighKind::UnifiedHardy, &o).unwrap();
        assert!(q.value >= 0.25);
        let hp = HardyParams { b: 1.0, ..base() };
        let f = make_origin_family(2.0, 0.1).unwrap();
        let q = rayleigh(&hp, &f, RayleighKind::OriginHardy, &o).unwrap();
        assert!(q.value >= 2.25);
        let zero = RadialExpr::constant(0.0);
        assert!(matches!(rayleigh(&base(), &zero, RayleighKind::UnifiedHardy, &o), Err(Error::ZeroDenominator)));
    }

    #[test]
    fn boundary_scan_approaches_quarter() {
        let s = scan_boundary(&base(), &DEFAULT_OFFSETS, &VerifyOptions::default()).unwrap();
        assert!(s.pass, "{}", s.summary());
        let last = s.rows.last().unwrap();
        assert!((last.kappa - 0.51).abs() < 1e-12 && (last.delta - 1e-3).abs() < 1e-15);
        assert!(s.monotone);
    }

    #[test]
    fn origin_scan_approaches_target() {
        let hp = HardyParams { b: 1.0, ..base() };
        let s = scan_origin(&hp, &DEFAULT_OFFSETS, &VerifyOptions::default()).unwrap();
        assert!(s.pass, "{}", s.summary());
    }

    #[test]
    fn probe_grows_logarithmically() {
        let p = nonattainment_probe(&base(), &[1e-1, 1e-2, 1e-3, 1e-4], &VerifyOptions::default()).unwrap();
        assert!(p.pass, "{p:?}");
        for inc in &p.increments {
            assert!((inc - 1.0).abs() < 0.1, "{inc}");
        }
    }
}
