//! Closed expression family for radial profiles `f(r)`.

use std::fmt;

use super::jet::Jet;
use crate::error::{Endpoint, Error, Result};

/// Below `exp(-700)` the cutoff factors are flushed to an exact zero jet;
/// their derivatives are then far below the smallest normal double.
const CUTOFF_FLUSH: f64 = 700.0;

/// Immutable expression tree for a radial function.
#[derive(Debug, Clone, PartialEq)]
pub enum RadialExpr {
    Const(f64),
    /// `r^alpha`
    PowerR(f64),
    /// `(1 - (r/radius)^c)^kappa`
    BoundaryPower { c: f64, kappa: f64, radius: f64 },
    /// `log(radius / r)`
    LogR { radius: f64 },
    /// Two-sided bump `exp(4 - 1/(t(1-t)))`, `t = (r-lo)/(hi-lo)`, zero outside `(lo, hi)`.
    Bump { lo: f64, hi: f64 },
    /// Smooth step: 0 for `r <= lo`, 1 for `r >= hi`.
    RampUp { lo: f64, hi: f64 },
    /// Smooth step: 1 for `r <= lo`, 0 for `r >= hi`.
    RampDown { lo: f64, hi: f64 },
    Sum(Vec<RadialExpr>),
    Product(Vec<RadialExpr>),
    Negate(Box<RadialExpr>),
}

/// Evaluation point with an optionally exact distance to an outer edge.
///
/// Quadrature near `r = R` passes `to_edge = R - r` computed without
/// cancellation so that `1 - (r/R)^c` and `log(R/r)` stay accurate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialPoint {
    pub r: f64,
    pub edge: Option<(f64, f64)>,
}

impl RadialPoint {
    pub fn new(r: f64) -> Self {
        RadialPoint { r, edge: None }
    }

    pub fn with_edge(r: f64, edge: f64, to_edge: f64) -> Self {
        RadialPoint {
            r,
            edge: Some((edge, to_edge)),
        }
    }

    /// `ln(r / radius)` using the exact gap when it refers to `radius`.
    fn log_ratio(&self, radius: f64) -> f64 {
        match self.edge {
            Some((edge, gap)) if edge == radius && gap < 0.5 * radius => (-gap / radius).ln_1p(),
            _ => (self.r / radius).ln(),
        }
    }

    fn gap_to(&self, radius: f64) -> f64 {
        match self.edge {
            Some((edge, gap)) if edge == radius => gap,
            _ => radius - self.r,
        }
    }
}

/// Closed interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    fn hull(self, o: Interval) -> Interval {
        Interval {
            lo: self.lo.min(o.lo),
            hi: self.hi.max(o.hi),
        }
    }

    fn intersect(self, o: Interval) -> Option<Interval> {
        let lo = self.lo.max(o.lo);
        let hi = self.hi.min(o.hi);
        (lo < hi).then_some(Interval { lo, hi })
    }
}

fn cutoff_e(t: f64, order: usize) -> Jet {
    // E(t) = exp(-1/t) for t > 0
    if t <= 0.0 || 1.0 / t > CUTOFF_FLUSH {
        return Jet::zero(order);
    }
    Jet::variable(t, order).recip().scale(-1.0).exp()
}

/// Smooth step `s(t) = E(t) / (E(t) + E(1-t))` as a jet in `t`.
fn ramp_jet(t: f64, order: usize) -> Jet {
    if t <= 0.0 || 1.0 / t > CUTOFF_FLUSH {
        return Jet::zero(order);
    }
    if t >= 1.0 || 1.0 / (1.0 - t) > CUTOFF_FLUSH {
        return Jet::constant(1.0, order);
    }
    let left = cutoff_e(t, order);
    let tt = Jet::variable(t, order);
    let one_minus = &Jet::constant(1.0, order) - &tt;
    let right = one_minus.recip().scale(-1.0).exp();
    let denom = &left + &right;
    &left * &denom.recip()
}

fn bump_jet(t: f64, order: usize) -> Jet {
    if t <= 0.0 || t >= 1.0 {
        return Jet::zero(order);
    }
    let prod = t * (1.0 - t);
    if 1.0 / prod > CUTOFF_FLUSH + 4.0 {
        return Jet::zero(order);
    }
    let tt = Jet::variable(t, order);
    let u = &tt * &(&Jet::constant(1.0, order) - &tt);
    let mut arg = u.recip().scale(-1.0);
    let shifted = arg.derivatives()[0] + 4.0;
    let mut c = arg.derivatives().to_vec();
    c[0] = shifted;
    arg = Jet::from_derivatives(c);
    arg.exp()
}

/// Derivative exponent rule for a local power `t^e`: integer powers
/// eventually differentiate into smooth (exponent 0) remainders.
fn power_rule(e: f64, k: usize) -> f64 {
    let kf = k as f64;
    if e >= 0.0 && e.fract() == 0.0 {
        (e - kf).max(0.0)
    } else {
        e - kf
    }
}

impl RadialExpr {
    pub fn constant(v: f64) -> Self {
        RadialExpr::Const(v)
    }

    pub fn power(alpha: f64) -> Self {
        RadialExpr::PowerR(alpha)
    }

    pub fn boundary_power(c: f64, kappa: f64, radius: f64) -> Self {
        RadialExpr::BoundaryPower { c, kappa, radius }
    }

    pub fn log_r(radius: f64) -> Self {
        RadialExpr::LogR { radius }
    }

    pub fn bump(lo: f64, hi: f64) -> Self {
        RadialExpr::Bump { lo, hi }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn mul(a: RadialExpr, b: RadialExpr) -> Self {
        RadialExpr::Product(vec![a, b])
    }

    #[allow(clippy::should_implement_trait)]
    pub fn add(a: RadialExpr, b: RadialExpr) -> Self {
        RadialExpr::Sum(vec![a, b])
    }

    pub fn is_identically_zero(&self) -> bool {
        match self {
            RadialExpr::Const(v) => *v == 0.0,
            RadialExpr::Sum(ch) => ch.iter().all(|c| c.is_identically_zero()),
            RadialExpr::Product(ch) => ch.iter().any(|c| c.is_identically_zero()),
            RadialExpr::Negate(c) => c.is_identically_zero(),
            _ => false,
        }
    }

    /// Smallest radius among nodes that are only defined for `r < radius`.
    fn domain_limit(&self) -> f64 {
        match self {
            RadialExpr::BoundaryPower { radius, .. } | RadialExpr::LogR { radius } => *radius,
            RadialExpr::Sum(ch) | RadialExpr::Product(ch) => ch
                .iter()
                .map(|c| c.domain_limit())
                .fold(f64::INFINITY, f64::min),
            RadialExpr::Negate(c) => c.domain_limit(),
            _ => f64::INFINITY,
        }
    }

    /// Jet of the profile at `r` up to `order`.
    pub fn eval_jet(&self, r: f64, order: usize) -> Result<Jet> {
        self.eval_jet_at(&RadialPoint::new(r), order)
    }

    pub fn eval_jet_at(&self, pt: &RadialPoint, order: usize) -> Result<Jet> {
        let limit = self.domain_limit();
        let inside = pt.r > 0.0 && (pt.r < limit || pt.gap_to(limit) > 0.0);
        if !inside {
            return Err(Error::EvalOutsideDomain {
                r: pt.r,
                radius: limit,
            });
        }
        let jet = self.jet_unchecked(pt, order);
        if !jet.is_finite() {
            return Err(Error::PoleHit(pt.r));
        }
        Ok(jet)
    }

    fn jet_unchecked(&self, pt: &RadialPoint, order: usize) -> Jet {
        let r = pt.r;
        match self {
            RadialExpr::Const(v) => Jet::constant(*v, order),
            RadialExpr::PowerR(alpha) => Jet::power_of_variable(r, *alpha, order),
            RadialExpr::BoundaryPower { c, kappa, radius } => {
                if *kappa == 0.0 {
                    return Jet::constant(1.0, order);
                }
                // (r/R)^c as a jet, then replace the value by the accurate 1 - (r/R)^c
                let inner = Jet::power_of_variable(r, *c, order).scale(radius.powf(-c));
                let mut coeffs: Vec<f64> = inner.derivatives().iter().map(|v| -v).collect();
                coeffs[0] = -(c * pt.log_ratio(*radius)).exp_m1();
                Jet::from_derivatives(coeffs).powf(*kappa)
            }
            RadialExpr::LogR { radius } => {
                let mut coeffs = vec![0.0; order + 1];
                coeffs[0] = -pt.log_ratio(*radius);
                let mut fact = 1.0;
                for (j, slot) in coeffs.iter_mut().enumerate().skip(1) {
                    // d^j/dr^j (-ln r) = (-1)^j (j-1)! / r^j
                    let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                    *slot = sign * fact / r.powi(j as i32);
                    fact *= j as f64;
                }
                Jet::from_derivatives(coeffs)
            }
            RadialExpr::Bump { lo, hi } => {
                let w = hi - lo;
                bump_jet((r - lo) / w, order).chain_linear(1.0 / w)
            }
            RadialExpr::RampUp { lo, hi } => {
                let w = hi - lo;
                ramp_jet((r - lo) / w, order).chain_linear(1.0 / w)
            }
            RadialExpr::RampDown { lo, hi } => {
                let w = hi - lo;
                ramp_jet((hi - r) / w, order).chain_linear(-1.0 / w)
            }
            RadialExpr::Sum(children) => children
                .iter()
                .map(|c| c.jet_unchecked(pt, order))
                .fold(Jet::zero(order), |acc, j| &acc + &j),
            RadialExpr::Product(children) => {
                let mut acc = Jet::constant(1.0, order);
                for c in children {
                    let j = c.jet_unchecked(pt, order);
                    if j.is_zero() {
                        return Jet::zero(order);
                    }
                    acc = &acc * &j;
                }
                acc
            }
            RadialExpr::Negate(c) => -&c.jet_unchecked(pt, order),
        }
    }

    /// Plain value `f(r)`.
    pub fn eval(&self, r: f64) -> Result<f64> {
        Ok(self.eval_jet(r, 0)?.value())
    }

    /// Conservative superset of `{r in [0, radius] : f(r) != 0}`; `None` if `f == 0`.
    pub fn support(&self, radius: f64) -> Option<Interval> {
        let full = Interval { lo: 0.0, hi: radius };
        let raw = self.raw_support()?;
        raw.intersect(full)
    }

    fn raw_support(&self) -> Option<Interval> {
        let all = Interval {
            lo: 0.0,
            hi: f64::INFINITY,
        };
        match self {
            RadialExpr::Const(v) => (*v != 0.0).then_some(all),
            RadialExpr::BoundaryPower { radius, kappa, .. } => {
                if *kappa == 0.0 {
                    Some(all)
                } else {
                    Some(Interval {
                        lo: 0.0,
                        hi: *radius,
                    })
                }
            }
            RadialExpr::LogR { radius } => Some(Interval {
                lo: 0.0,
                hi: *radius,
            }),
            RadialExpr::PowerR(_) => Some(all),
            RadialExpr::Bump { lo, hi } => Some(Interval { lo: *lo, hi: *hi }),
            RadialExpr::RampUp { lo, .. } => Some(Interval {
                lo: *lo,
                hi: f64::INFINITY,
            }),
            RadialExpr::RampDown { hi, .. } => Some(Interval { lo: 0.0, hi: *hi }),
            RadialExpr::Sum(ch) => ch
                .iter()
                .filter_map(|c| c.raw_support())
                .reduce(Interval::hull),
            RadialExpr::Product(ch) => {
                let mut acc = all;
                for c in ch {
                    acc = acc.intersect(c.raw_support()?)?;
                }
                Some(acc)
            }
            RadialExpr::Negate(c) => c.raw_support(),
        }
    }

    /// Edges of every cutoff factor; the integrand is smooth between them.
    pub fn breakpoints(&self) -> Vec<f64> {
        let mut out = Vec::new();
        self.collect_breakpoints(&mut out);
        out.sort_by(|a, b| a.total_cmp(b));
        out.dedup();
        out
    }

    fn collect_breakpoints(&self, out: &mut Vec<f64>) {
        match self {
            RadialExpr::Bump { lo, hi }
            | RadialExpr::RampUp { lo, hi }
            | RadialExpr::RampDown { lo, hi } => {
                out.push(*lo);
                out.push(*hi);
            }
            RadialExpr::Sum(ch) | RadialExpr::Product(ch) => {
                ch.iter().for_each(|c| c.collect_breakpoints(out))
            }
            RadialExpr::Negate(c) => c.collect_breakpoints(out),
            _ => {}
        }
    }

    /// Leading local power of `f^(order)` near `endpoint` of `(0, radius)`:
    /// `f^(order) ~ t^e` with `t = r` at the origin and `t = radius - r` at
    /// the boundary. `None` means the derivative vanishes identically there.
    /// The estimate is conservative (never larger than the true exponent).
    pub fn local_exponent(&self, endpoint: Endpoint, radius: f64, order: usize) -> Option<f64> {
        let at_origin = endpoint == Endpoint::Origin;
        match self {
            RadialExpr::Const(v) => (*v != 0.0 && order == 0).then_some(0.0),
            RadialExpr::PowerR(alpha) => {
                if at_origin {
                    if *alpha == 0.0 && order > 0 {
                        None
                    } else {
                        Some(power_rule(*alpha, order))
                    }
                } else {
                    Some(0.0)
                }
            }
            RadialExpr::BoundaryPower {
                c,
                kappa,
                radius: own,
            } => {
                if *kappa == 0.0 {
                    return (order == 0).then_some(0.0);
                }
                if at_origin {
                    Some(if order == 0 { 0.0 } else { power_rule(*c, order) })
                } else if *own > radius {
                    Some(0.0)
                } else {
                    Some(power_rule(*kappa, order))
                }
            }
            RadialExpr::LogR { radius: own } => {
                if at_origin {
                    Some(-(order as f64))
                } else if *own > radius {
                    Some(0.0)
                } else {
                    Some(power_rule(1.0, order))
                }
            }
            RadialExpr::Bump { lo, hi } => {
                if (at_origin && *lo > 0.0) || (!at_origin && *hi <= radius) {
                    None
                } else {
                    Some(0.0)
                }
            }
            RadialExpr::RampUp { lo, hi } => {
                if at_origin {
                    (*lo <= 0.0).then_some(0.0)
                } else if *hi < radius {
                    (order == 0).then_some(0.0)
                } else {
                    Some(0.0)
                }
            }
            RadialExpr::RampDown { lo, hi } => {
                if at_origin {
                    if *lo > 0.0 {
                        (order == 0).then_some(0.0)
                    } else {
                        Some(0.0)
                    }
                } else {
                    (*hi >= radius).then_some(0.0)
                }
            }
            RadialExpr::Sum(ch) => ch
                .iter()
                .filter_map(|c| c.local_exponent(endpoint, radius, order))
                .reduce(f64::min),
            RadialExpr::Negate(c) => c.local_exponent(endpoint, radius, order),
            RadialExpr::Product(ch) => {
                // table[k] = exponent of the k-th derivative of the partial product
                let mut table: Vec<Option<f64>> = (0..=order).map(|k| (k == 0).then_some(0.0)).collect();
                for c in ch {
                    let factor: Vec<Option<f64>> = (0..=order)
                        .map(|k| c.local_exponent(endpoint, radius, k))
                        .collect();
                    table = (0..=order)
                        .map(|k| {
                            (0..=k)
                                .filter_map(|j| Some(table[j]? + factor[k - j]?))
                                .reduce(f64::min)
                        })
                        .collect();
                }
                table[order]
            }
        }
    }

    /// Jet of `g(s) = f(scale * s)` at `s`, used to normalize a ball of radius `scale` to 1.
    pub fn eval_scaled_jet(&self, s: &RadialPoint, scale: f64, order: usize) -> Result<Jet> {
        let pt = RadialPoint {
            r: s.r * scale,
            edge: s.edge.map(|(e, g)| (e * scale, g * scale)),
        };
        Ok(self.eval_jet_at(&pt, order)?.chain_linear(scale))
    }
}

fn fmt_num(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_list(f: &mut fmt::Formatter<'_>, name: &str, ch: &[RadialExpr]) -> fmt::Result {
    write!(f, "{name}(")?;
    for (i, c) in ch.iter().enumerate() {
        if i > 0 {
            write!(f, ", ")?;
        }
        write!(f, "{c}")?;
    }
    write!(f, ")")
}

impl fmt::Display for RadialExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RadialExpr::Const(v) => write!(f, "const({})", fmt_num(*v)),
            RadialExpr::PowerR(a) => write!(f, "powr({})", fmt_num(*a)),
            RadialExpr::BoundaryPower { c, kappa, radius } => write!(
                f,
                "bnd(c={}, k={}, R={})",
                fmt_num(*c),
                fmt_num(*kappa),
                fmt_num(*radius)
            ),
            RadialExpr::LogR { radius } => write!(f, "logr(R={})", fmt_num(*radius)),
            RadialExpr::Bump { lo, hi } => write!(f, "bump({}, {})", fmt_num(*lo), fmt_num(*hi)),
            RadialExpr::RampUp { lo, hi } => {
                write!(f, "rampup({}, {})", fmt_num(*lo), fmt_num(*hi))
            }
            RadialExpr::RampDown { lo, hi } => {
                write!(f, "rampdown({}, {})", fmt_num(*lo), fmt_num(*hi))
            }
            RadialExpr::Sum(ch) => fmt_list(f, "add", ch),
            RadialExpr::Product(ch) => fmt_list(f, "mul", ch),
            RadialExpr::Negate(c) => write!(f, "neg({c})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn power_jet_example() {
        let j = RadialExpr::power(2.0).eval_jet(3.0, 2).unwrap();
        assert_eq!(j.derivatives(), &[9.0, 6.0, 2.0]);
    }

    #[test]
    fn boundary_power_linear() {
        let j = RadialExpr::boundary_power(1.0, 1.0, 1.0)
            .eval_jet(0.25, 1)
            .unwrap();
        assert!((j.value() - 0.75).abs() < 1e-15);
        assert!((j.deriv(1) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn r_log_r_stationary_at_inverse_e() {
        let f = RadialExpr::mul(RadialExpr::power(1.0), RadialExpr::log_r(1.0));
        let r = (-1f64).exp();
        let j = f.eval_jet(r, 1).unwrap();
        assert!((j.value() - r).abs() < 1e-15);
        assert!(j.deriv(1).abs() < 1e-15);
    }

    #[test]
    fn outside_domain_rejected() {
        let f = RadialExpr::boundary_power(1.0, 0.5, 1.0);
        assert!(matches!(f.eval_jet(1.5, 0), Err(Error::EvalOutsideDomain { .. })));
        assert!(matches!(
            RadialExpr::power(1.0).eval_jet(0.0, 0),
            Err(Error::EvalOutsideDomain { .. })
        ));
    }

    #[test]
    fn accurate_near_edge() {
        let f = RadialExpr::boundary_power(2.0, -0.5, 1.0);
        let gap = 1e-18;
        let pt = RadialPoint::with_edge(1.0 - gap, 1.0, gap);
        let v = f.eval_jet_at(&pt, 0).unwrap().value();
        // (1 - (1-d)^2)^(-1/2) ~ (2d)^(-1/2)
        assert!((v / (2.0 * gap).powf(-0.5) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn supports() {
        let f = RadialExpr::mul(RadialExpr::bump(0.2, 0.8), RadialExpr::power(3.0));
        assert_eq!(f.support(1.0), Some(Interval { lo: 0.2, hi: 0.8 }));
        assert_eq!(
            RadialExpr::power(2.0).support(1.0),
            Some(Interval { lo: 0.0, hi: 1.0 })
        );
        let s = RadialExpr::add(RadialExpr::bump(0.1, 0.4), RadialExpr::bump(0.5, 0.9));
        assert_eq!(s.support(1.0), Some(Interval { lo: 0.1, hi: 0.9 }));
        assert_eq!(RadialExpr::constant(0.0).support(1.0), None);
        assert_eq!(s.breakpoints(), vec![0.1, 0.4, 0.5, 0.9]);
    }

    #[test]
    fn bump_peak_and_edges() {
        let b = RadialExpr::bump(0.2, 0.8);
        assert!((b.eval(0.5).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(b.eval(0.2).unwrap(), 0.0);
        assert_eq!(b.eval(0.9).unwrap(), 0.0);
        assert_eq!(b.eval(0.2 + 1e-6).unwrap(), 0.0);
    }

    #[test]
    fn exponents_of_products() {
        let f = RadialExpr::mul(RadialExpr::power(-1.5), RadialExpr::boundary_power(1.0, 0.7, 1.0));
        assert_eq!(f.local_exponent(Endpoint::Origin, 1.0, 0), Some(-1.5));
        assert_eq!(f.local_exponent(Endpoint::Origin, 1.0, 1), Some(-2.5));
        let b = f.local_exponent(Endpoint::Boundary, 1.0, 1).unwrap();
        assert!((b - (0.7 - 1.0)).abs() < 1e-15);
        let bumped = RadialExpr::mul(RadialExpr::bump(0.2, 0.8), RadialExpr::power(-3.0));
        assert_eq!(bumped.local_exponent(Endpoint::Origin, 1.0, 2), None);
    }
}
