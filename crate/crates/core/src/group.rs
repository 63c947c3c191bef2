//! Homogeneous groups described by dilation weights and a quasi-norm.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Monte Carlo budgets are split into this many independently seeded shards,
/// so results do not depend on the worker count.
const MC_SHARDS: u64 = 32;
const MIN_SAMPLES: usize = 10_000;

/// `Q = sum of the dilation weights`.
pub fn homogeneous_dimension(weights: &[f64]) -> Result<f64> {
    if weights.is_empty() {
        return Err(Error::EmptyWeights);
    }
    if let Some(&w) = weights.iter().find(|&&w| !(w >= 1.0)) {
        return Err(Error::WeightBelowOne(w));
    }
    Ok(weights.iter().sum())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum NormKind {
    Euclidean,
    /// `(sum |x_i|^(2N/nu_i))^(1/2N)`; `exponent` is the even integer `2N`.
    AnisotropicPower { exponent: u32 },
    /// `((x1^2 + x2^2)^2 + x3^2)^(1/4)` on the first Heisenberg group.
    Koranyi,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GroupModel {
    weights: Vec<f64>,
    q: f64,
    norm: NormKind,
}

/// Coordinate-free model: every radial verifier only needs `Q > 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AbstractRadialModel {
    pub q: f64,
}

impl AbstractRadialModel {
    pub fn new(q: f64) -> Result<Self> {
        if q > 1.0 && q.is_finite() {
            Ok(AbstractRadialModel { q })
        } else {
            Err(Error::ConstraintViolation(format!("Q>1 (got {q})")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig {
            samples: 1_000_000,
            seed: 1,
        }
    }
}

impl GroupModel {
    pub fn new(weights: Vec<f64>, norm: NormKind) -> Result<Self> {
        let q = homogeneous_dimension(&weights)?;
        match norm {
            NormKind::Euclidean => {
                if weights.iter().any(|&w| w != 1.0) {
                    return Err(Error::IncompatibleNormKind(
                        "Euclidean norm needs all dilation weights equal to 1".into(),
                    ));
                }
            }
            NormKind::AnisotropicPower { exponent } => {
                if exponent == 0 || exponent % 2 != 0 {
                    return Err(Error::IncompatibleNormKind(format!(
                        "anisotropic exponent must be a positive even integer, got {exponent}"
                    )));
                }
                for &w in &weights {
                    let ratio = exponent as f64 / w;
                    if (ratio - ratio.round()).abs() > 1e-12 {
                        return Err(Error::IncompatibleNormKind(format!(
                            "exponent {exponent} is not divisible by weight {w}"
                        )));
                    }
                }
            }
            NormKind::Koranyi => {
                if weights != [1.0, 1.0, 2.0] {
                    return Err(Error::IncompatibleNormKind(
                        "Koranyi norm needs n=3 with weights (1,1,2)".into(),
                    ));
                }
            }
        }
        Ok(GroupModel { weights, q, norm })
    }

    pub fn euclidean(n: usize) -> Result<Self> {
        GroupModel::new(vec![1.0; n], NormKind::Euclidean)
    }

    pub fn heisenberg() -> Self {
        GroupModel::new(vec![1.0, 1.0, 2.0], NormKind::Koranyi).expect("valid Heisenberg model")
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn norm_kind(&self) -> NormKind {
        self.norm
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() == self.dim() {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            })
        }
    }

    pub fn dilate(&self, lambda: f64, x: &[f64]) -> Result<Vec<f64>> {
        if !(lambda > 0.0) {
            return Err(Error::NonpositiveLambda(lambda));
        }
        self.check_dim(x)?;
        Ok(x.iter()
            .zip(&self.weights)
            .map(|(xi, nu)| lambda.powf(*nu) * xi)
            .collect())
    }

    pub fn quasi_norm(&self, x: &[f64]) -> Result<f64> {
        self.check_dim(x)?;
        Ok(self.norm_unchecked(x))
    }

    fn norm_unchecked(&self, x: &[f64]) -> f64 {
        match self.norm {
            NormKind::Euclidean => x.iter().map(|v| v * v).sum::<f64>().sqrt(),
            NormKind::AnisotropicPower { exponent } => {
                let e = exponent as f64;
                // factor out the largest homogeneous scale to avoid overflow
                let scale = x
                    .iter()
                    .zip(&self.weights)
                    .map(|(xi, nu)| xi.abs().powf(1.0 / nu))
                    .fold(0.0, f64::max);
                if scale == 0.0 {
                    return 0.0;
                }
                let s: f64 = x
                    .iter()
                    .zip(&self.weights)
                    .map(|(xi, nu)| (xi.abs() / scale.powf(*nu)).powf(e / nu))
                    .sum();
                scale * s.powf(1.0 / e)
            }
            NormKind::Koranyi => {
                let h = x[0] * x[0] + x[1] * x[1];
                (h * h + x[2] * x[2]).sqrt().sqrt()
            }
        }
    }

    /// Monte Carlo estimate of `int_{|x|<R} |x|^s dx` by rejection from the
    /// box `prod [-R^nu_i, R^nu_i]`, which covers the quasi-ball for all
    /// supported norms.
    pub fn mc_ball_moment(&self, s: f64, radius: f64, cfg: McConfig) -> Result<McEstimate> {
        if !(s > -self.q) {
            return Err(Error::DivergentMoment { s, q: self.q });
        }
        if cfg.samples < MIN_SAMPLES {
            return Err(Error::TooFewSamples(cfg.samples));
        }
        if !(radius > 0.0) {
            return Err(Error::NonpositiveLambda(radius));
        }
        let half: Vec<f64> = self.weights.iter().map(|nu| radius.powf(*nu)).collect();
        let volume: f64 = half.iter().map(|h| 2.0 * h).product();
        let n = cfg.samples as u64;
        let partial: Vec<(u64, f64, f64)> = (0..MC_SHARDS)
            .into_par_iter()
            .map(|shard| {
                let count = n / MC_SHARDS + u64::from(shard < n % MC_SHARDS);
                let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
                rng.set_stream(shard);
                let mut x = vec![0.0; half.len()];
                let (mut sum, mut sum_sq) = (0.0, 0.0);
                for _ in 0..count {
                    for (xi, h) in x.iter_mut().zip(&half) {
                        *xi = rng.gen_range(-*h..*h);
                    }
                    let r = self.norm_unchecked(&x);
                    if r < radius && r > 0.0 {
                        let y = r.powf(s);
                        sum += y;
                        sum_sq += y * y;
                    }
                }
                (count, sum, sum_sq)
            })
            .collect();
        let (count, sum, sum_sq) = partial
            .iter()
            .fold((0u64, 0.0, 0.0), |acc, p| (acc.0 + p.0, acc.1 + p.1, acc.2 + p.2));
        let nf = count as f64;
        let mean = sum / nf;
        let var = ((sum_sq - nf * mean * mean) / (nf - 1.0)).max(0.0);
        Ok(McEstimate {
            estimate: volume * mean,
            stderr: volume * (var / nf).sqrt(),
        })
    }

    /// Fitted unit-sphere measures `(Q+s) M(s,R) / R^(Q+s)` for `(s,R) in {(0,1), (1,2)}`.
    pub fn sphere_measure_fits(&self, cfg: McConfig) -> Result<Vec<McEstimate>> {
        [(0.0, 1.0), (1.0, 2.0)]
            .iter()
            .enumerate()
            .map(|(i, &(s, r))| {
                let sub = McConfig {
                    seed: cfg.seed.wrapping_add(i as u64),
                    ..cfg
                };
                let m = self.mc_ball_moment(s, r, sub)?;
                let k = (self.q + s) / r.powf(self.q + s);
                Ok(McEstimate {
                    estimate: k * m.estimate,
                    stderr: k * m.stderr,
                })
            })
            .collect()
    }

    /// Surface measure of the unit quasi-sphere: closed form for the
    /// Euclidean norm, otherwise the mean of the Monte Carlo fits.
    pub fn sphere_measure(&self, cfg: McConfig) -> Result<f64> {
        if self.norm == NormKind::Euclidean {
            let n = self.dim() as f64;
            return Ok(2.0 * std::f64::consts::PI.powf(n / 2.0) / statrs::function::gamma::gamma(n / 2.0));
        }
        let fits = self.sphere_measure_fits(cfg)?;
        Ok(fits.iter().map(|f| f.estimate).sum::<f64>() / fits.len() as f64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn dimensions() {
        assert_eq!(homogeneous_dimension(&[1.0, 1.0, 1.0]).unwrap(), 3.0);
        assert_eq!(homogeneous_dimension(&[1.0, 1.0, 2.0]).unwrap(), 4.0);
        assert_eq!(homogeneous_dimension(&[2.0, 3.0]).unwrap(), 5.0);
        assert_eq!(homogeneous_dimension(&[]), Err(Error::EmptyWeights));
        assert_eq!(homogeneous_dimension(&[1.0, 0.5]), Err(Error::WeightBelowOne(0.5)));
    }

    #[test]
    fn dilation_examples() {
        let h = GroupModel::heisenberg();
        assert_eq!(h.dilate(2.0, &[1.0, 1.0, 1.0]).unwrap(), vec![2.0, 2.0, 4.0]);
        assert_eq!(h.dilate(1.0, &[0.3, -2.0, 5.0]).unwrap(), vec![0.3, -2.0, 5.0]);
        let m = GroupModel::new(vec![1.0, 1.0], NormKind::Euclidean).unwrap();
        assert_eq!(m.dilate(0.5, &[4.0, 8.0]).unwrap(), vec![2.0, 4.0]);
        assert_eq!(m.dilate(0.0, &[1.0, 1.0]), Err(Error::NonpositiveLambda(0.0)));
        assert!(matches!(m.dilate(1.0, &[1.0]), Err(Error::DimensionMismatch { .. })));
    }

    #[test]
    fn norm_examples() {
        let e2 = GroupModel::euclidean(2).unwrap();
        assert_eq!(e2.quasi_norm(&[3.0, 4.0]).unwrap(), 5.0);
        let h = GroupModel::heisenberg();
        assert!((h.quasi_norm(&[0.0, 0.0, 4.0]).unwrap() - 2.0).abs() < 1e-15);
        assert_eq!(h.quasi_norm(&[1.0, 0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(h.quasi_norm(&[0.0, 0.0, 0.0]).unwrap(), 0.0);
        assert!(matches!(
            GroupModel::new(vec![1.0, 2.0], NormKind::Euclidean),
            Err(Error::IncompatibleNormKind(_))
        ));
        assert!(matches!(
            GroupModel::new(vec![1.0, 1.0], NormKind::Koranyi),
            Err(Error::IncompatibleNormKind(_))
        ));
        assert!(matches!(
            GroupModel::new(vec![2.0, 3.0], NormKind::AnisotropicPower { exponent: 4 }),
            Err(Error::IncompatibleNormKind(_))
        ));
        assert!(GroupModel::new(vec![2.0, 3.0], NormKind::AnisotropicPower { exponent: 6 }).is_ok());
    }

    #[test]
    fn closed_form_spheres() {
        let cfg = McConfig::default();
        assert!((GroupModel::euclidean(2).unwrap().sphere_measure(cfg).unwrap() - 2.0 * PI).abs() < 1e-13);
        assert!((GroupModel::euclidean(3).unwrap().sphere_measure(cfg).unwrap() - 4.0 * PI).abs() < 1e-13);
    }

    #[test]
    fn mc_errors_and_determinism() {
        let m = GroupModel::euclidean(3).unwrap();
        let cfg = McConfig {
            samples: 20_000,
            seed: 7,
        };
        assert!(matches!(m.mc_ball_moment(-3.0, 1.0, cfg), Err(Error::DivergentMoment { .. })));
        assert!(matches!(
            m.mc_ball_moment(0.0, 1.0, McConfig { samples: 10, seed: 1 }),
            Err(Error::TooFewSamples(10))
        ));
        let a = m.mc_ball_moment(0.0, 1.0, cfg).unwrap();
        let b = m.mc_ball_moment(0.0, 1.0, cfg).unwrap();
        assert_eq!(a, b);
        assert!((a.estimate - 4.0 * PI / 3.0).abs() < 4.0 * a.stderr);
    }
}
