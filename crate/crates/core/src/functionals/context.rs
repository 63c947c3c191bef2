//! Integration over the unit ball after normalizing `R` to 1.

use crate::error::{Endpoint, Error, Result};
use crate::quadrature::{integrate_radial, QuadConfig, QuadResult, RadialDomain, RadialWeight, Substitution};
use crate::radial::{admissible, Jet, RadialPoint, WeightExponents};

use super::Profile;

/// Profile jets and weight factors at one normalized radius.
pub(crate) struct Point {
    pub r: f64,
    /// `1 - r^c`, accurate near `r = 1`.
    pub w: f64,
    /// `log(1/r)`, accurate near `r = 1`.
    pub log_inv: f64,
    re: Jet,
    im: Option<Jet>,
}

impl Point {
    pub fn re(&self, j: usize) -> f64 {
        self.re.deriv(j)
    }

    pub fn im(&self, j: usize) -> f64 {
        self.im.as_ref().map_or(0.0, |h| h.deriv(j))
    }

    pub fn modulus(&self, j: usize) -> f64 {
        self.re(j).hypot(self.im(j))
    }

    pub fn abs_pow(&self, j: usize, p: f64) -> f64 {
        pow0(self.modulus(j), p)
    }

    /// `g'' + (Q-1) g' / r` for the real and imaginary parts.
    pub fn radial_laplacian(&self, q: f64) -> (f64, f64) {
        let part = |j: &dyn Fn(usize) -> f64| j(2) + (q - 1.0) * j(1) / self.r;
        (part(&|j| self.re(j)), part(&|j| self.im(j)))
    }
}

/// `x^p` for `x >= 0` with `0^p = 0`.
pub(crate) fn pow0(x: f64, p: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else if p == 2.0 {
        x * x
    } else {
        x.powf(p)
    }
}

/// Behaviour of the integrand used for admissibility and endpoint hints:
/// it scales like `|f^(order)|^p r^r_pow w^w_pow`.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Hint {
    pub order: usize,
    pub p: f64,
}

impl Hint {
    pub fn new(order: usize, p: f64) -> Self {
        Hint { order, p }
    }
}

pub(crate) struct Ctx<'a> {
    profile: &'a Profile,
    pub q: f64,
    pub c: f64,
    scale: f64,
    order: usize,
    support: Option<(f64, f64)>,
    splits: Vec<f64>,
    cfg: QuadConfig,
}

impl<'a> Ctx<'a> {
    pub fn new(profile: &'a Profile, q: f64, c: f64, radius: f64, order: usize, cfg: QuadConfig) -> Self {
        let parts = std::iter::once(&profile.re).chain(profile.im.as_ref());
        let mut support: Option<(f64, f64)> = None;
        let mut splits = Vec::new();
        for e in parts {
            if let Some(s) = e.support(radius) {
                let (lo, hi) = ((s.lo / radius).max(0.0), (s.hi / radius).min(1.0));
                support = Some(match support {
                    None => (lo, hi),
                    Some((a, b)) => (a.min(lo), b.max(hi)),
                });
            }
            splits.extend(e.breakpoints().into_iter().map(|x| x / radius));
        }
        splits.sort_by(f64::total_cmp);
        splits.dedup();
        Ctx {
            profile,
            q,
            c,
            scale: radius,
            order,
            support,
            splits,
            cfg,
        }
    }

    /// Support strictly inside `(0, 1)`.
    pub fn is_interior(&self) -> bool {
        self.support.is_none_or(|(lo, hi)| lo > 0.0 && hi < 1.0)
    }

    pub fn point(&self, pt: &RadialPoint) -> Result<Point> {
        let re = self.profile.re.eval_scaled_jet(pt, self.scale, self.order)?;
        let im = match &self.profile.im {
            Some(h) => Some(h.eval_scaled_jet(pt, self.scale, self.order)?),
            None => None,
        };
        let log_inv = match pt.edge {
            Some((_, gap)) if gap < 0.5 => -(-gap).ln_1p(),
            _ => -pt.r.ln(),
        };
        Ok(Point {
            r: pt.r,
            w: RadialWeight::boundary_factor(self.c, 1.0, pt),
            log_inv,
            re,
            im,
        })
    }

    fn exponents(&self, hint: Hint, r_pow: f64, w_pow: f64) -> Result<(Option<f64>, Option<f64>)> {
        let weights = WeightExponents {
            origin_power: r_pow,
            boundary_power: w_pow,
        };
        let parts = std::iter::once(&self.profile.re).chain(self.profile.im.as_ref());
        let mut lo_e: Option<f64> = None;
        let mut hi_e: Option<f64> = None;
        for e in parts {
            admissible(e, weights, self.q, hint.p, hint.order, self.scale).map_err(Error::Inadmissible)?;
            let at = |end| e.local_exponent(end, self.scale, hint.order);
            if let Some(x) = at(Endpoint::Origin) {
                let t = hint.p * x + r_pow + self.q - 1.0;
                lo_e = Some(lo_e.map_or(t, |m| m.min(t)));
            }
            if let Some(x) = at(Endpoint::Boundary) {
                let t = hint.p * x + w_pow;
                hi_e = Some(hi_e.map_or(t, |m| m.min(t)));
            }
        }
        Ok((lo_e, hi_e))
    }

    /// `int_0^1 f(point) r^(r_pow + Q - 1) (1 - r^c)^w_pow dr` over the support.
    pub fn integral<F>(&self, hint: Hint, r_pow: f64, w_pow: f64, f: F) -> Result<QuadResult>
    where
        F: Fn(&Point) -> Result<f64>,
    {
        let (lo_e, hi_e) = self.exponents(hint, r_pow, w_pow)?;
        let Some((lo, hi)) = self.support else {
            return Ok(QuadResult::zero());
        };
        let domain = RadialDomain {
            lo,
            hi,
            splits: self.splits.iter().copied().filter(|&x| x > lo && x < hi).collect(),
            lo_exponent: (lo <= 0.0).then_some(lo_e).flatten(),
            hi_exponent: (hi >= 1.0).then_some(hi_e).flatten(),
        };
        let weight = RadialWeight {
            r_power: r_pow + self.q - 1.0,
            w_power: w_pow,
            c: self.c,
            radius: 1.0,
        };
        integrate_radial(&domain, weight, &self.cfg, Substitution::Auto, |pt| {
            let point = self.point(pt)?;
            f(&point)
        })
    }

    /// Same integrand restricted to `[lo, hi]` inside `(0, 1)`, without the
    /// convergence check: used to watch a divergent integral grow.
    pub fn integral_between<F>(&self, lo: f64, hi: f64, r_pow: f64, w_pow: f64, f: F) -> Result<QuadResult>
    where
        F: Fn(&Point) -> Result<f64>,
    {
        let Some((s_lo, s_hi)) = self.support else {
            return Ok(QuadResult::zero());
        };
        let (lo, hi) = (lo.max(s_lo), hi.min(s_hi));
        let domain = RadialDomain {
            lo,
            hi,
            splits: self.splits.iter().copied().filter(|&x| x > lo && x < hi).collect(),
            lo_exponent: None,
            hi_exponent: None,
        };
        let weight = RadialWeight {
            r_power: r_pow + self.q - 1.0,
            w_power: w_pow,
            c: self.c,
            radius: 1.0,
        };
        integrate_radial(&domain, weight, &self.cfg, Substitution::Never, |pt| {
            let point = self.point(pt)?;
            f(&point)
        })
    }
}
