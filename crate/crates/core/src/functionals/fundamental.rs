//! Sampled positivity of the pointwise convexity inequalities behind the `psi`
//! terms: for `p >= 2`
//! `|a-b|^p - |a|^p + p |a|^(p-2) a b >= C |b|^p`, and for `1 < p < 2`
//! `(|a-b|^p - |a|^p + p |a|^(p-2) a b) (|a-b| + |a|)^(2-p) >= C |b|^2`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Pairs with `|b| <= FILTER max(1, |a|)` are dropped: the quotient is 0/0 there.
const FILTER: f64 = 1e-8;
/// Allowed relative negativity of the elementary tangent-line check.
const ELEMENTARY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FundamentalReport {
    pub p: f64,
    pub samples: usize,
    /// Samples that survived the small-`b` filter.
    pub kept: usize,
    /// Empirical infimum of the normalized quotient.
    pub infimum: f64,
    /// `(a, b)` attaining `infimum`.
    pub argmin: (f64, f64),
    /// Smallest `(a^p - p (a-b)^(p-1) b - (a-b)^p) / a^p` over `a >= b >= 0`.
    pub elementary_min_slack: f64,
    pub pass: bool,
}

/// Normalized quotient at one pair; `None` when filtered out.
pub fn convexity_quotient(p: f64, a: f64, b: f64) -> Option<f64> {
    if b.abs() <= FILTER * a.abs().max(1.0) || a == 0.0 {
        return None;
    }
    let d = (a - b).abs();
    let num = d.powf(p) - a.abs().powf(p) + p * a.abs().powf(p - 2.0) * a * b;
    Some(if p >= 2.0 {
        num / b.abs().powf(p)
    } else {
        num * (d + a.abs()).powf(2.0 - p) / (b * b)
    })
}

pub fn fundamental_inequality_suite(p: f64, samples: usize, seed: u64) -> Result<FundamentalReport> {
    if !(p > 1.0) {
        return Err(Error::ConstraintViolation(format!("p>1 (got {p})")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut kept = 0;
    let mut infimum = f64::INFINITY;
    let mut argmin = (f64::NAN, f64::NAN);
    for _ in 0..samples {
        let a: f64 = rng.gen_range(-1.0..1.0);
        let b: f64 = rng.gen_range(-1.0..1.0);
        if let Some(v) = convexity_quotient(p, a, b) {
            kept += 1;
            if v < infimum {
                infimum = v;
                argmin = (a, b);
            }
        }
    }
    let mut elementary_min_slack = f64::INFINITY;
    for _ in 0..samples {
        let a: f64 = rng.gen_range(0.0..1.0);
        let b: f64 = a * rng.gen_range(0.0..=1.0);
        if a == 0.0 {
            continue;
        }
        let rest = a - b;
        let slack = a.powf(p) - p * rest.powf(p - 1.0) * b - rest.powf(p);
        elementary_min_slack = elementary_min_slack.min(slack / a.powf(p));
    }
    let pass = kept > 0 && infimum > 0.0 && elementary_min_slack >= -ELEMENTARY_SLACK;
    Ok(FundamentalReport {
        p,
        samples,
        kept,
        infimum,
        argmin,
        elementary_min_slack,
        pass,
    })
}
