use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::radial::RadialExpr;

/// Relative slack allowed when testing `c` against its upper bound.
const BOUND_SLACK: f64 = 1e-12;

fn default_one() -> f64 {
    1.0
}

fn default_order() -> usize {
    1
}

/// Exponents `(Q, p, a, b, c, R, k)` shared by all verifiers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HardyParams {
    #[serde(rename = "Q")]
    pub q: f64,
    pub p: f64,
    #[serde(default)]
    pub a: f64,
    #[serde(default = "default_one")]
    pub b: f64,
    #[serde(default = "default_one")]
    pub c: f64,
    #[serde(rename = "R", default = "default_one")]
    pub radius: f64,
    #[serde(default = "default_order")]
    pub k: usize,
}

fn violation(msg: String) -> Error {
    Error::ConstraintViolation(msg)
}

fn require(ok: bool, msg: impl FnOnce() -> String) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(violation(msg()))
    }
}

fn at_most(x: f64, bound: f64) -> bool {
    x <= bound + BOUND_SLACK * bound.abs().max(1.0)
}

impl HardyParams {
    pub fn new(q: f64, p: f64, a: f64, b: f64, c: f64) -> Self {
        HardyParams {
            q,
            p,
            a,
            b,
            c,
            radius: 1.0,
            k: 1,
        }
    }

    pub fn with_radius(self, radius: f64) -> Self {
        HardyParams { radius, ..self }
    }

    pub fn with_order(self, k: usize) -> Self {
        HardyParams { k, ..self }
    }

    fn base(&self) -> Result<()> {
        require(self.q > 1.0 && self.q.is_finite(), || format!("Q>1 (got {})", self.q))?;
        require(self.radius > 0.0 && self.radius.is_finite(), || {
            format!("R>0 (got {})", self.radius)
        })?;
        require([self.p, self.a, self.b, self.c].iter().all(|v| v.is_finite()), || {
            "parameters must be finite".into()
        })
    }

    fn p_above_one(&self) -> Result<()> {
        require(self.p > 1.0, || format!("p>1 (got {})", self.p))
    }

    fn c_positive(&self) -> Result<()> {
        require(self.c > 0.0, || format!("c>0 (got {})", self.c))
    }

    /// JSON snapshot of the parameters together with the profile.
    pub fn snapshot(&self, f: &Profile) -> serde_json::Value {
        let mut v = serde_json::to_value(self).expect("params serialize");
        v["f"] = serde_json::Value::String(f.describe());
        v
    }

    /// Largest admissible `c` for the first-order boundary inequality.
    pub fn critical_c(&self) -> f64 {
        (self.q - self.a) / (self.b - 1.0)
    }

    pub fn is_critical(&self) -> bool {
        let crit = self.critical_c();
        (self.c - crit).abs() <= BOUND_SLACK * crit.abs().max(1.0)
    }

    /// `1<p`, `b>1`, `a<Q`, `0<c<=(Q-a)/(b-1)`.
    pub fn check_unified(&self) -> Result<()> {
        self.base()?;
        self.p_above_one()?;
        require(self.b > 1.0, || format!("b>1 (got {})", self.b))?;
        require(self.a < self.q, || format!("a<Q (got a={}, Q={})", self.a, self.q))?;
        self.c_positive()?;
        require(at_most(self.c, self.critical_c()), || {
            format!("c<=(Q-a)/(b-1)={} (got {})", self.critical_c(), self.c)
        })
    }

    /// Order-`k` version: `b+(k-1)p>1`, `a+(k-1)p<Q`, `0<c<=(Q-a-(k-1)p)/(b+(k-1)p-1)`.
    pub fn check_higher(&self, k: usize) -> Result<()> {
        self.base()?;
        self.p_above_one()?;
        require(k >= 1, || "k>=1".into())?;
        let shift = (k as f64 - 1.0) * self.p;
        require(self.b + shift > 1.0, || {
            format!("b+(k-1)p>1 (got {})", self.b + shift)
        })?;
        require(self.a + shift < self.q, || {
            format!("a+(k-1)p<Q (got {})", self.a + shift)
        })?;
        self.c_positive()?;
        let bound = (self.q - self.a - shift) / (self.b + shift - 1.0);
        require(at_most(self.c, bound), || {
            format!("c<=(Q-a-(k-1)p)/(b+(k-1)p-1)={bound} (got {})", self.c)
        })?;
        for j in 0..k {
            let t = self.b + j as f64 * self.p - 1.0;
            require(t != 0.0, || format!("b+{j}p-1 must be nonzero"))?;
        }
        Ok(())
    }

    /// `1<p`, `a<Q`, `b>=1`, `c>0`.
    pub fn check_origin(&self) -> Result<()> {
        self.base()?;
        self.p_above_one()?;
        require(self.a < self.q, || format!("a<Q (got a={}, Q={})", self.a, self.q))?;
        require(self.b >= 1.0, || format!("b>=1 (got {})", self.b))?;
        self.c_positive()
    }

    /// `1<p`, `a<Q`, `b>1`, `0<c<=(Q-a)/(p-1)`.
    pub fn check_boundary(&self) -> Result<()> {
        self.base()?;
        self.p_above_one()?;
        require(self.a < self.q, || format!("a<Q (got a={}, Q={})", self.a, self.q))?;
        require(self.b > 1.0, || format!("b>1 (got {})", self.b))?;
        self.c_positive()?;
        let bound = (self.q - self.a) / (self.p - 1.0);
        require(at_most(self.c, bound), || {
            format!("c<=(Q-a)/(p-1)={bound} (got {})", self.c)
        })
    }

    /// `p=2`, `4-Q<a<=Q-c`, `c>0`.
    pub fn check_rellich_first(&self) -> Result<()> {
        self.base()?;
        require(self.p == 2.0, || format!("p=2 (got {})", self.p))?;
        self.c_positive()?;
        require(4.0 - self.q < self.a, || format!("4-Q<a (got a={})", self.a))?;
        require(at_most(self.a, self.q - self.c), || {
            format!("a<=Q-c={} (got {})", self.q - self.c, self.a)
        })
    }

    /// `p=2`, `3<=a<=min(Q-c+2, Q-3c)`, `c>0`.
    pub fn check_rellich_second(&self) -> Result<()> {
        self.base()?;
        require(self.p == 2.0, || format!("p=2 (got {})", self.p))?;
        self.c_positive()?;
        let upper = (self.q - self.c + 2.0).min(self.q - 3.0 * self.c);
        require(self.a >= 3.0, || format!("3<=a (got {})", self.a))?;
        require(at_most(self.a, upper), || {
            format!("a<=min(Q-c+2, Q-3c)={upper} (got {})", self.a)
        })
    }

    /// `1<p`, `c>0`, `a<=Q-(p-1)c`.
    pub fn check_rellich_lp(&self) -> Result<()> {
        self.base()?;
        self.p_above_one()?;
        self.c_positive()?;
        let bound = self.q - (self.p - 1.0) * self.c;
        require(at_most(self.a, bound), || {
            format!("a<=Q-(p-1)c={bound} (got {})", self.a)
        })
    }

    /// `p>=1`.
    pub fn check_lower_bound(&self) -> Result<()> {
        self.base()?;
        require(self.p >= 1.0, || format!("p>=1 (got {})", self.p))
    }
}

/// Radial profile, optionally complex as `re + i im`.
#[derive(Debug, Clone, PartialEq)]
pub struct Profile {
    pub re: RadialExpr,
    pub im: Option<RadialExpr>,
}

impl Profile {
    pub fn real(re: RadialExpr) -> Self {
        Profile { re, im: None }
    }

    pub fn complex(re: RadialExpr, im: RadialExpr) -> Self {
        Profile { re, im: Some(im) }
    }

    pub fn is_complex(&self) -> bool {
        self.im.is_some()
    }

    pub fn describe(&self) -> String {
        match &self.im {
            None => self.re.to_string(),
            Some(im) => format!("{} + i*{}", self.re, im),
        }
    }
}

impl From<RadialExpr> for Profile {
    fn from(re: RadialExpr) -> Self {
        Profile::real(re)
    }
}

/// Quadrature settings and a multiplier applied to every pass tolerance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyOptions {
    pub quad: QuadConfig,
    pub tol_scale: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            quad: QuadConfig::default(),
            tol_scale: 1.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unified_constraints() {
        assert!(HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0).check_unified().is_ok());
        let err = HardyParams::new(4.0, 2.0, 1.0, 0.5, 1.0).check_unified().unwrap_err();
        assert!(err.to_string().contains("b>1"), "{err}");
        assert!(HardyParams::new(4.0, 2.0, 1.0, 2.0, 3.0).check_unified().is_ok());
        assert!(HardyParams::new(4.0, 2.0, 1.0, 2.0, 3.1).check_unified().is_err());
        assert!(HardyParams::new(4.0, 2.0, 1.0, 2.0, 3.0).is_critical());
    }

    #[test]
    fn rellich_constraints() {
        assert!(HardyParams::new(5.0, 2.0, 4.0, 2.0, 1.0).check_rellich_first().is_ok());
        assert!(HardyParams::new(8.0, 2.0, 4.0, 2.0, 1.0).check_rellich_second().is_ok());
        assert!(HardyParams::new(5.0, 2.0, 4.0, 2.0, 1.0).check_rellich_second().is_err());
    }

    #[test]
    fn deserialize_defaults() {
        let p: HardyParams = serde_json::from_str(r#"{"Q":4,"p":2,"a":1,"b":2}"#).unwrap();
        assert_eq!(p, HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0));
        assert!(serde_json::from_str::<HardyParams>(r#"{"Q":4,"p":2,"x":1}"#).is_err());
    }
}
