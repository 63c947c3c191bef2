//! Radial integrals `int_0^R F(r) r^alpha (1 - (r/R)^c)^beta dr`.

use super::{integrate_gaps, QuadConfig, QuadResult, SingularHints};
use crate::error::{Endpoint, Error, Result};
use crate::radial::{admissible, RadialExpr, RadialPoint, WeightExponents};

/// Power weight `r^r_power (1 - (r/radius)^c)^w_power`; `r_power` includes the measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialWeight {
    pub r_power: f64,
    pub w_power: f64,
    pub c: f64,
    pub radius: f64,
}

impl RadialWeight {
    /// `1 - (r/R)^c` accurate near both ends.
    pub fn boundary_factor(c: f64, radius: f64, pt: &RadialPoint) -> f64 {
        let log_ratio = match pt.edge {
            Some((edge, gap)) if edge == radius && gap < 0.5 * radius => (-gap / radius).ln_1p(),
            _ => (pt.r / radius).ln(),
        };
        -(c * log_ratio).exp_m1()
    }

    pub fn eval(&self, pt: &RadialPoint) -> f64 {
        let mut w = 1.0;
        if self.r_power != 0.0 {
            w *= pt.r.powf(self.r_power);
        }
        if self.w_power != 0.0 {
            w *= Self::boundary_factor(self.c, self.radius, pt).powf(self.w_power);
        }
        w
    }

    /// `v * eval(pt)`, going through logarithms when a tiny integrand meets an
    /// overflowing weight.
    pub fn apply(&self, v: f64, pt: &RadialPoint) -> f64 {
        let direct = v * self.eval(pt);
        if direct.is_finite() {
            return direct;
        }
        let w = Self::boundary_factor(self.c, self.radius, pt);
        log_product(v, &[(pt.r, self.r_power), (w, self.w_power)])
    }
}

/// `v * prod base^pow` for positive bases, evaluated in log space.
fn log_product(v: f64, factors: &[(f64, f64)]) -> f64 {
    let log: f64 = factors
        .iter()
        .filter(|&&(_, pow)| pow != 0.0)
        .map(|&(base, pow)| pow * base.ln())
        .sum();
    v.signum() * (v.abs().ln() + log).exp()
}

/// Integration range inside `[0, R]` with the local exponents of the full
/// integrand (weight included) at its two ends.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialDomain {
    pub lo: f64,
    pub hi: f64,
    pub splits: Vec<f64>,
    pub lo_exponent: Option<f64>,
    pub hi_exponent: Option<f64>,
}

impl RadialDomain {
    pub fn full(radius: f64) -> Self {
        RadialDomain {
            lo: 0.0,
            hi: radius,
            splits: Vec::new(),
            lo_exponent: None,
            hi_exponent: None,
        }
    }
}

/// Change of variable `t = (r/R)^c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Substitution {
    /// Applied when `c` is far from 1 and the range reaches the boundary.
    #[default]
    Auto,
    Never,
    Always,
}

/// `int_lo^hi f(pt) * weight(pt) dr` where `pt` carries the exact gap to `R`.
pub fn integrate_radial<F>(
    domain: &RadialDomain,
    weight: RadialWeight,
    cfg: &QuadConfig,
    subst: Substitution,
    f: F,
) -> Result<QuadResult>
where
    F: Fn(&RadialPoint) -> Result<f64>,
{
    let radius = weight.radius;
    let touches_edge = domain.hi >= radius;
    let use_t = match subst {
        Substitution::Never => false,
        Substitution::Always => true,
        Substitution::Auto => touches_edge && (weight.c < 0.5 || weight.c > 2.0),
    };
    if domain.hi <= domain.lo {
        return Ok(QuadResult::zero());
    }
    if !use_t {
        let hi = domain.hi;
        let g = |r: f64, _from_lo: f64, to_hi: f64| -> Result<f64> {
            let pt = if touches_edge {
                RadialPoint::with_edge(r, radius, to_hi)
            } else {
                RadialPoint::with_edge(r, radius, (radius - hi) + to_hi)
            };
            let v = f(&pt)?;
            if v == 0.0 {
                return Ok(0.0);
            }
            Ok(weight.apply(v, &pt))
        };
        let hints = SingularHints {
            origin_exponent: domain.lo_exponent,
            boundary_exponent: domain.hi_exponent,
            split_points: domain.splits.clone(),
        };
        return integrate_gaps(&g, domain.lo, domain.hi, &hints, cfg);
    }
    let c = weight.c;
    let to_t = |r: f64| (r / radius).powf(c);
    let t_lo = to_t(domain.lo);
    let t_hi = if touches_edge { 1.0 } else { to_t(domain.hi) };
    let inv_c = 1.0 / c;
    let g = |t: f64, from_lo: f64, to_hi: f64| -> Result<f64> {
        let t = if domain.lo == 0.0 { from_lo } else { t };
        let r = radius * t.powf(inv_c);
        if r < f64::MIN_POSITIVE {
            return Ok(0.0);
        }
        let gap = if touches_edge && to_hi < 0.5 {
            -radius * ((-to_hi).ln_1p() * inv_c).exp_m1()
        } else {
            radius - r
        };
        let pt = RadialPoint::with_edge(r, radius, gap);
        let v = f(&pt)?;
        if v == 0.0 {
            return Ok(0.0);
        }
        let w = if touches_edge { to_hi } else { 1.0 - t };
        let jac = radius * inv_c * t.powf(inv_c - 1.0);
        let direct = v * r.powf(weight.r_power) * w.powf(weight.w_power) * jac;
        if direct.is_finite() {
            return Ok(direct);
        }
        Ok(log_product(v, &[(r, weight.r_power), (w, weight.w_power), (jac, 1.0)]))
    };
    let hints = SingularHints {
        origin_exponent: domain.lo_exponent.map(|e| (e + 1.0) * inv_c - 1.0),
        boundary_exponent: domain.hi_exponent,
        split_points: domain.splits.iter().map(|&s| to_t(s)).collect(),
    };
    integrate_gaps(&g, t_lo, t_hi, &hints, cfg)
}

/// Integrand shape for [`radial_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Mode {
    AbsPow(f64),
    Plain,
}

/// `int_0^R |g|^p r^(Q-a-1) (1 - (r/R)^c)^(-b) dr` (or `g` itself in `Plain` mode).
pub fn radial_integral(
    g: &RadialExpr,
    q: f64,
    a: f64,
    b: f64,
    c: f64,
    radius: f64,
    mode: Mode,
) -> Result<QuadResult> {
    radial_integral_with(g, q, a, b, c, radius, mode, &QuadConfig::default(), Substitution::Auto)
}

#[allow(clippy::too_many_arguments)]
pub fn radial_integral_with(
    g: &RadialExpr,
    q: f64,
    a: f64,
    b: f64,
    c: f64,
    radius: f64,
    mode: Mode,
    cfg: &QuadConfig,
    subst: Substitution,
) -> Result<QuadResult> {
    let p = match mode {
        Mode::AbsPow(p) => p,
        Mode::Plain => 1.0,
    };
    let weights = WeightExponents {
        origin_power: -a,
        boundary_power: -b,
    };
    admissible(g, weights, q, p, 0, radius).map_err(Error::Inadmissible)?;
    let Some(supp) = g.support(radius) else {
        return Ok(QuadResult::zero());
    };
    let lo_exponent = (supp.lo <= 0.0)
        .then(|| g.local_exponent(Endpoint::Origin, radius, 0))
        .flatten()
        .map(|e| p * e + q - a - 1.0);
    let hi_exponent = (supp.hi >= radius)
        .then(|| g.local_exponent(Endpoint::Boundary, radius, 0))
        .flatten()
        .map(|e| p * e - b);
    let domain = RadialDomain {
        lo: supp.lo.max(0.0),
        hi: supp.hi.min(radius),
        splits: g.breakpoints(),
        lo_exponent,
        hi_exponent,
    };
    let weight = RadialWeight {
        r_power: q - a - 1.0,
        w_power: -b,
        c,
        radius,
    };
    integrate_radial(&domain, weight, cfg, subst, |pt| {
        let v = g.eval_jet_at(pt, 0)?.value();
        Ok(match mode {
            Mode::AbsPow(p) => v.abs().powf(p),
            Mode::Plain => v,
        })
    })
}
