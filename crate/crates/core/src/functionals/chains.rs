//! Euclidean consequences: classical and geometric Hardy chains and the
//! classical and geometric Rellich chains, each link checked separately.
//!
//! Integrals here are taken directly on `[0, R]` with the exact distance
//! `R - r`, so the `R` powers in the geometric chain are exercised rather than
//! normalized away.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{GroupModel, NormKind};
use crate::quadrature::{integrate_radial, QuadConfig, QuadResult, RadialDomain, RadialWeight, Substitution};
use crate::radial::{Jet, RadialPoint};

use super::context::pow0;
use super::{Builder, Profile, VerificationReport, VerifyOptions};

/// Relative tolerance for the closing equality of the geometric Hardy chain.
const EQUALITY_TOL: f64 = 1e-10;

/// Exponents for the chains. The classical Hardy chain uses `p`, `a`, `b = p`,
/// `c = (n-a)/(p-1)`; the geometric Hardy chain uses `p = a = geometric_p`,
/// `b = geometric_b` and `c = 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ChainSpec {
    pub p: f64,
    pub a: f64,
    pub geometric_p: f64,
    pub geometric_b: f64,
    #[serde(rename = "R")]
    pub radius: f64,
}

impl Default for ChainSpec {
    fn default() -> Self {
        ChainSpec {
            p: 2.0,
            a: 0.0,
            geometric_p: 2.0,
            geometric_b: 2.0,
            radius: 1.0,
        }
    }
}

struct Direct<'a> {
    f: &'a Profile,
    n: f64,
    radius: f64,
    domain: RadialDomain,
    cfg: QuadConfig,
}

struct Sample {
    r: f64,
    gap: f64,
    re: Jet,
    im: Option<Jet>,
}

impl Sample {
    fn modulus(&self, j: usize) -> f64 {
        self.re.deriv(j).hypot(self.im.as_ref().map_or(0.0, |h| h.deriv(j)))
    }

    fn radial_laplacian_abs(&self, n: f64) -> f64 {
        let l = |j: &Jet| j.deriv(2) + (n - 1.0) * j.deriv(1) / self.r;
        l(&self.re).hypot(self.im.as_ref().map_or(0.0, l))
    }
}

impl<'a> Direct<'a> {
    fn new(f: &'a Profile, n: f64, radius: f64, cfg: QuadConfig) -> Result<Option<Self>> {
        let mut support: Option<(f64, f64)> = None;
        let mut splits = Vec::new();
        for e in std::iter::once(&f.re).chain(f.im.as_ref()) {
            if let Some(s) = e.support(radius) {
                support = Some(match support {
                    None => (s.lo, s.hi),
                    Some((a, b)) => (a.min(s.lo), b.max(s.hi)),
                });
            }
            splits.extend(e.breakpoints());
        }
        let Some((lo, hi)) = support else {
            return Ok(None);
        };
        if lo <= 0.0 || hi >= radius {
            return Err(Error::ConstraintViolation("chains need a profile vanishing near r=0 and r=R".into()));
        }
        splits.retain(|&x| x > lo && x < hi);
        splits.sort_by(f64::total_cmp);
        splits.dedup();
        Ok(Some(Direct {
            f,
            n,
            radius,
            domain: RadialDomain {
                lo,
                hi,
                splits,
                lo_exponent: None,
                hi_exponent: None,
            },
            cfg,
        }))
    }

    /// `int_0^R g r^(n-1) dr` with `g` given the sample.
    fn integral(&self, g: impl Fn(&Sample) -> f64) -> Result<QuadResult> {
        let weight = RadialWeight {
            r_power: self.n - 1.0,
            w_power: 0.0,
            c: 1.0,
            radius: self.radius,
        };
        integrate_radial(&self.domain, weight, &self.cfg, Substitution::Never, |pt: &RadialPoint| {
            let gap = pt.edge.map_or(self.radius - pt.r, |(_, g)| g);
            let re = self.f.re.eval_jet_at(pt, 2)?;
            let im = match &self.f.im {
                Some(h) => Some(h.eval_jet_at(pt, 2)?),
                None => None,
            };
            Ok(g(&Sample { r: pt.r, gap, re, im }))
        })
    }
}

fn link_failure(b: &Builder, small: &str, big: &str) -> Option<String> {
    let (s, ok) = b.link(&[small], &[big]);
    (!ok).then(|| format!("{small} <= {big} fails with slack {s:e}"))
}

/// Runs every chain that the dimension admits. Each `<=` link is checked on its
/// own; the report passes only if all links pass.
pub fn verify_chains(model: &GroupModel, f: &Profile, spec: &ChainSpec, opts: &VerifyOptions) -> Result<VerificationReport> {
    if model.norm_kind() != NormKind::Euclidean {
        return Err(Error::IncompatibleNormKind("chains need the Euclidean norm".into()));
    }
    let n = model.q();
    let (p, a, radius) = (spec.p, spec.a, spec.radius);
    if !(p > 1.0 && a < n && radius > 0.0) {
        return Err(Error::ConstraintViolation(format!("p>1, a<n, R>0 (got p={p}, a={a}, R={radius})")));
    }
    let mut snap = serde_json::to_value(spec).expect("serializes");
    snap["n"] = n.into();
    snap["f"] = f.describe().into();
    let mut b = Builder::new("chains", &snap, opts.tol_scale);
    let Some(d) = Direct::new(f, n, radius, opts.quad)? else {
        b.note("profile vanishes identically");
        return Ok(b.with_status(0.0, 0.0, super::Status::InequalityPass { slack: 0.0 }));
    };
    let mut failures = Vec::new();

    // Classical Hardy: b = p, c = (n-a)/(p-1).
    let c = (n - a) / (p - 1.0);
    let grad = d.integral(|s| pow0(s.modulus(1), p) * s.r.powf(p - a))?;
    b.put("hardy_grad", 1.0, grad);
    let weighted = d.integral(|s| {
        let w = -(c * (-s.gap / radius).ln_1p()).exp_m1();
        pow0(s.modulus(0), p) * s.r.powf(-a) * w.powf(-p)
    })?;
    b.put("hardy_weighted", ((p - 1.0) * c / p).powf(p), weighted);
    let plain = d.integral(|s| pow0(s.modulus(0), p) * s.r.powf(-a))?;
    b.put("hardy_classical", ((n - a) / p).powf(p), plain);
    failures.extend(link_failure(&b, "hardy_weighted", "hardy_grad"));
    failures.extend(link_failure(&b, "hardy_classical", "hardy_weighted"));

    // Geometric Hardy: a = p, c = 1 <= (n-p)/(b-1).
    let (gp, gb) = (spec.geometric_p, spec.geometric_b);
    if gp > 1.0 && gb > 1.0 && 1.0 <= (n - gp) / (gb - 1.0) {
        let k = ((gb - 1.0) / gp).powf(gp);
        let scale = radius.powf(gp - gb);
        let dist = d.integral(|s| pow0(s.modulus(0), gp) * s.gap.powf(-gb))?;
        b.put("geo_distance", k, dist);
        let rel = d.integral(|s| pow0(s.modulus(0), gp) * s.r.powf(-gp) * (s.gap / radius).powf(-gb))?;
        b.put("geo_weighted", k * scale, rel);
        let grad_rel = d.integral(|s| pow0(s.modulus(1), gp) * (s.gap / radius).powf(gp - gb))?;
        b.put("geo_grad_scaled", scale, grad_rel);
        let grad_dist = d.integral(|s| pow0(s.modulus(1), gp) * s.gap.powf(gp - gb))?;
        b.put("geo_grad", 1.0, grad_dist);
        failures.extend(link_failure(&b, "geo_distance", "geo_weighted"));
        failures.extend(link_failure(&b, "geo_weighted", "geo_grad_scaled"));
        let (rel_res, ok) = b.matches(&["geo_grad_scaled"], &["geo_grad"], EQUALITY_TOL);
        if !ok {
            failures.push(format!("geometric closing equality off by {rel_res:e}"));
        }
    } else {
        b.note(format!("geometric Hardy chain skipped: needs 1 <= (n-p)/(b-1) with p={gp}, b={gb}"));
    }

    // Rellich chains: p = 2, a = 4.
    if n >= 5.0 {
        let lap = d.integral(|s| pow0(s.radial_laplacian_abs(n), 2.0))?;
        let plain = d.integral(|s| pow0(s.modulus(0), 2.0) * s.r.powi(-4))?;
        b.put("rellich_plain", 1.0, plain);
        let cr = n - 4.0;
        let weighted = d.integral(|s| {
            let w = -(cr * (-s.gap / radius).ln_1p()).exp_m1();
            pow0(s.modulus(0), 2.0) * s.r.powi(-4) * w.powi(-2)
        })?;
        b.put("rellich_weighted", 1.0, weighted);
        b.put("rellich_laplacian", (n * (n - 4.0) / 4.0).powi(-2), lap);
        failures.extend(link_failure(&b, "rellich_plain", "rellich_weighted"));
        failures.extend(link_failure(&b, "rellich_weighted", "rellich_laplacian"));
        if n >= 7.0 {
            let dist = d.integral(|s| pow0(s.modulus(0), 2.0) * s.gap.powi(-4))?;
            b.put("geo_rellich_distance", 1.0, dist);
            let rel = d.integral(|s| pow0(s.modulus(0), 2.0) * s.r.powi(-4) * (s.gap / radius).powi(-4))?;
            b.put("geo_rellich_weighted", 1.0, rel);
            b.put("geo_rellich_laplacian", (0.75f64).powi(-2), lap);
            failures.extend(link_failure(&b, "geo_rellich_distance", "geo_rellich_weighted"));
            failures.extend(link_failure(&b, "geo_rellich_weighted", "geo_rellich_laplacian"));
        }
    }
    Ok(b.inequality_unless(&["hardy_classical"], &["hardy_grad"], failures))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::radial::RadialExpr;

    #[test]
    fn chains_in_three_five_and_seven() {
        let f = Profile::real(RadialExpr::mul(RadialExpr::bump(0.2, 0.8), RadialExpr::power(1.0)));
        let o = VerifyOptions::default();
        for n in [3, 5, 7] {
            let m = GroupModel::euclidean(n).unwrap();
            let r = verify_chains(&m, &f, &ChainSpec::default(), &o).unwrap();
            assert!(r.passed(), "n={n}: {}", r.to_json());
        }
        let spec = ChainSpec { geometric_p: 4.0, radius: 2.0, ..ChainSpec::default() };
        let g = Profile::real(RadialExpr::mul(RadialExpr::bump(0.4, 1.6), RadialExpr::power(1.0)));
        let r = verify_chains(&GroupModel::euclidean(5).unwrap(), &g, &spec, &o).unwrap();
        assert!(r.passed(), "{}", r.to_json());
        assert!(r.term("geo_distance").is_some());
    }
}
