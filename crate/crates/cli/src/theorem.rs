//! Maps a `theorem_id` plus raw params/options to a task whose hypotheses have
//! already been checked.

use hardy_core::functionals::{
    resolve_ckn_params, verify_chains, verify_ckn, verify_hardy_b, verify_hardy_c, verify_high_l2, verify_high_lp,
    verify_ibp_identity, verify_l2_identity, verify_log_limits, verify_lp_identity, verify_radial_lower_bound,
    verify_rellich_l2, verify_rellich_lp, verify_unified_hardy, BoundaryMode, ChainSpec, CknParams, HardyParams,
    HighLpMode, OriginMode, Profile, RellichL2Kind, VerificationReport, VerifyOptions,
};
use hardy_core::group::{GroupModel, NormKind};
use hardy_core::sharpness::DEFAULT_OFFSETS;
use hardy_core::{Error, Result};
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{Map, Value};

use crate::config::{JobKind, ModelSpec};

pub const VERIFY_IDS: &[&str] = &[
    "unified_hardy",
    "l2_identity",
    "lp_identity",
    "high_l2",
    "high_lp",
    "high_lp_inequality",
    "hardy_b_inequality",
    "hardy_b_identity",
    "hardy_b_identity_l2",
    "hardy_c_inequality",
    "hardy_c_identity",
    "hardy_c_identity_l2",
    "ibp_identity",
    "rellich_l2_weight_squared",
    "rellich_l2_weight_fourth",
    "rellich_l2_expansion",
    "rellich_lp",
    "radial_lower_bound",
    "log_limits",
    "ckn",
    "chains",
];
pub const SHARPNESS_IDS: &[&str] = &["boundary_scan", "origin_scan", "nonattainment"];
pub const MC_IDS: &[&str] = &["euclidean_moments", "moment_scaling", "fundamental_inequality"];

const PARAM_KEYS: &[&str] = &["Q", "p", "a", "b", "c", "R", "k"];
const DEFAULT_EPS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-4];

pub fn ids_for(kind: JobKind) -> &'static [&'static str] {
    match kind {
        JobKind::Verify | JobKind::Sweep => VERIFY_IDS,
        JobKind::Sharpness => SHARPNESS_IDS,
        JobKind::McCheck => MC_IDS,
    }
}

/// Grid axes that address `params`; every other axis addresses `options`.
pub fn is_param_key(key: &str) -> bool {
    PARAM_KEYS.contains(&key)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum HardyKind {
    Unified,
    L2Identity,
    LpIdentity,
    HighL2,
    HighLp(HighLpMode),
    Origin(OriginMode),
    Boundary(BoundaryMode),
    Ibp,
    RellichL2(RellichL2Kind),
    RellichLp,
    LowerBound,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct LogOptions {
    c_grid: Vec<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct CknOptions {
    q: f64,
    r: f64,
    beta: f64,
    #[serde(default)]
    delta: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScanOptions {
    #[serde(default = "default_offsets")]
    offsets: Vec<f64>,
}

fn default_offsets() -> Vec<f64> {
    DEFAULT_OFFSETS.to_vec()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProbeOptions {
    #[serde(default = "default_eps")]
    eps: Vec<f64>,
}

fn default_eps() -> Vec<f64> {
    DEFAULT_EPS.to_vec()
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MomentOptions {
    #[serde(default = "default_moments")]
    pub s: Vec<f64>,
    #[serde(rename = "R", default = "one")]
    pub radius: f64,
    #[serde(default = "default_mc_samples")]
    pub samples: usize,
}

fn default_moments() -> Vec<f64> {
    vec![0.0, 1.0, 2.0]
}

fn one() -> f64 {
    1.0
}

fn default_mc_samples() -> usize {
    1_000_000
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FundamentalParams {
    p: f64,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
struct FundamentalOptions {
    #[serde(default = "default_fundamental_samples")]
    samples: usize,
}

fn default_fundamental_samples() -> usize {
    100_000
}

/// A job body with validated inputs.
#[derive(Debug, Clone)]
pub enum Task {
    Hardy { kind: HardyKind, hp: HardyParams },
    LogLimits { hp: HardyParams, c_grid: Vec<f64> },
    Ckn(CknParams),
    Chains { model: GroupModel, spec: ChainSpec },
    BoundaryScan { hp: HardyParams, offsets: Vec<f64> },
    OriginScan { hp: HardyParams, offsets: Vec<f64> },
    Probe { hp: HardyParams, eps: Vec<f64> },
    Moments { model: GroupModel, opts: MomentOptions },
    Scaling { model: GroupModel, opts: MomentOptions },
    Fundamental { p: f64, samples: usize },
}

fn parse<T: DeserializeOwned>(what: &str, map: &Map<String, Value>) -> Result<T> {
    serde_json::from_value(Value::Object(map.clone()))
        .map_err(|e| Error::ConstraintViolation(format!("{what}: {e}")))
}

fn no_options(id: &str, options: &Map<String, Value>) -> Result<()> {
    if options.is_empty() {
        Ok(())
    } else {
        let keys: Vec<&str> = options.keys().map(String::as_str).collect();
        Err(Error::ConstraintViolation(format!("{id} takes no options (got {})", keys.join(", "))))
    }
}

pub fn build_model(spec: &ModelSpec) -> Result<Option<GroupModel>> {
    Ok(match spec {
        ModelSpec::Abstract { .. } => None,
        ModelSpec::Euclidean { n } => Some(GroupModel::euclidean(*n)?),
        ModelSpec::Heisenberg => Some(GroupModel::heisenberg()),
        ModelSpec::Anisotropic { weights, exponent } => Some(GroupModel::new(
            weights.clone(),
            NormKind::AnisotropicPower { exponent: *exponent },
        )?),
    })
}

fn model_q(spec: &ModelSpec) -> Result<f64> {
    match spec {
        ModelSpec::Abstract { q } => hardy_core::group::AbstractRadialModel::new(*q).map(|m| m.q),
        other => Ok(build_model(other)?.expect("concrete model").q()),
    }
}

fn concrete(id: &str, model: Option<&ModelSpec>) -> Result<GroupModel> {
    model
        .map(build_model)
        .transpose()?
        .flatten()
        .ok_or_else(|| Error::ConstraintViolation(format!("{id} needs a concrete group model")))
}

/// Parameters with `Q` taken from the model when one is given.
fn hardy_params(model: Option<&ModelSpec>, params: &Map<String, Value>) -> Result<HardyParams> {
    let mut map = params.clone();
    if let Some(spec) = model {
        let q = model_q(spec)?;
        match map.get("Q").and_then(Value::as_f64) {
            Some(given) if given != q => {
                return Err(Error::ConstraintViolation(format!(
                    "params.Q={given} disagrees with the model (Q={q})"
                )))
            }
            _ => {
                map.insert("Q".into(), q.into());
            }
        }
    } else if !map.contains_key("Q") {
        return Err(Error::ConstraintViolation("Q is required when no model is given".into()));
    }
    parse("params", &map)
}

fn require_p2(hp: &HardyParams) -> Result<()> {
    if hp.p == 2.0 {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("p=2 (got {})", hp.p)))
    }
}

impl HardyKind {
    fn from_id(id: &str) -> Option<Self> {
        Some(match id {
            "unified_hardy" => HardyKind::Unified,
            "l2_identity" => HardyKind::L2Identity,
            "lp_identity" => HardyKind::LpIdentity,
            "high_l2" => HardyKind::HighL2,
            "high_lp" => HardyKind::HighLp(HighLpMode::Identity),
            "high_lp_inequality" => HardyKind::HighLp(HighLpMode::Inequality),
            "hardy_b_inequality" => HardyKind::Origin(OriginMode::Inequality),
            "hardy_b_identity" => HardyKind::Origin(OriginMode::Identity),
            "hardy_b_identity_l2" => HardyKind::Origin(OriginMode::IdentityL2),
            "hardy_c_inequality" => HardyKind::Boundary(BoundaryMode::Inequality),
            "hardy_c_identity" => HardyKind::Boundary(BoundaryMode::Identity),
            "hardy_c_identity_l2" => HardyKind::Boundary(BoundaryMode::IdentityL2),
            "ibp_identity" => HardyKind::Ibp,
            "rellich_l2_weight_squared" => HardyKind::RellichL2(RellichL2Kind::WeightSquared),
            "rellich_l2_weight_fourth" => HardyKind::RellichL2(RellichL2Kind::WeightFourth),
            "rellich_l2_expansion" => HardyKind::RellichL2(RellichL2Kind::Expansion),
            "rellich_lp" => HardyKind::RellichLp,
            "radial_lower_bound" => HardyKind::LowerBound,
            _ => return None,
        })
    }

    /// The hypothesis predicate, evaluated before any quadrature.
    fn check(self, hp: &HardyParams) -> Result<()> {
        match self {
            HardyKind::Unified => hp.check_unified(),
            HardyKind::L2Identity => require_p2(hp).and_then(|_| hp.check_higher(1)),
            HardyKind::LpIdentity => hp.check_higher(1),
            HardyKind::HighL2 => require_p2(hp).and_then(|_| hp.check_higher(hp.k)),
            HardyKind::HighLp(_) => hp.check_higher(hp.k),
            HardyKind::Origin(m) => {
                hp.check_origin()?;
                if m == OriginMode::IdentityL2 {
                    require_p2(hp)?;
                }
                Ok(())
            }
            HardyKind::Boundary(m) => {
                hp.check_boundary()?;
                if m == BoundaryMode::IdentityL2 {
                    require_p2(hp)?;
                }
                Ok(())
            }
            HardyKind::Ibp => hp.check_origin(),
            HardyKind::RellichL2(RellichL2Kind::WeightSquared) => hp.check_rellich_first(),
            HardyKind::RellichL2(RellichL2Kind::WeightFourth) => hp.check_rellich_second(),
            HardyKind::RellichL2(RellichL2Kind::Expansion) => require_p2(hp),
            HardyKind::RellichLp => hp.check_rellich_lp(),
            HardyKind::LowerBound => hp.check_lower_bound(),
        }
    }

    fn run(self, hp: &HardyParams, f: &Profile, opts: &VerifyOptions) -> Result<VerificationReport> {
        match self {
            HardyKind::Unified => verify_unified_hardy(hp, f, opts),
            HardyKind::L2Identity => verify_l2_identity(hp, f, opts),
            HardyKind::LpIdentity => verify_lp_identity(hp, f, opts),
            HardyKind::HighL2 => verify_high_l2(hp, f, opts),
            HardyKind::HighLp(m) => verify_high_lp(hp, f, m, opts),
            HardyKind::Origin(m) => verify_hardy_b(hp, f, m, opts),
            HardyKind::Boundary(m) => verify_hardy_c(hp, f, m, opts),
            HardyKind::Ibp => verify_ibp_identity(hp, f, opts),
            HardyKind::RellichL2(k) => verify_rellich_l2(hp, f, k, opts),
            HardyKind::RellichLp => verify_rellich_lp(hp, f, opts),
            HardyKind::LowerBound => verify_radial_lower_bound(hp, f, opts),
        }
    }
}

/// Builds and checks the task for one theorem id; no numerical work happens here.
pub fn prepare(
    id: &str,
    model: Option<&ModelSpec>,
    params: &Map<String, Value>,
    options: &Map<String, Value>,
) -> Result<Task> {
    if let Some(kind) = HardyKind::from_id(id) {
        no_options(id, options)?;
        let hp = hardy_params(model, params)?;
        kind.check(&hp)?;
        return Ok(Task::Hardy { kind, hp });
    }
    match id {
        "log_limits" => {
            let hp = hardy_params(model, params)?;
            let LogOptions { c_grid } = parse("options", options)?;
            let first = c_grid
                .first()
                .copied()
                .ok_or_else(|| Error::ConstraintViolation("c grid is empty".into()))?;
            HardyParams { c: first, ..hp }.check_unified()?;
            Ok(Task::LogLimits { hp, c_grid })
        }
        "ckn" => {
            let hp = hardy_params(model, params)?;
            hp.check_higher(hp.k)?;
            let o: CknOptions = parse("options", options)?;
            let ckn = resolve_ckn_params(hp, o.q, o.r, o.beta, o.delta)?;
            ckn.check()?;
            Ok(Task::Ckn(ckn))
        }
        "chains" => {
            no_options(id, options)?;
            let model = concrete(id, model)?;
            if model.norm_kind() != NormKind::Euclidean {
                return Err(Error::IncompatibleNormKind("chains need the Euclidean norm".into()));
            }
            let spec: ChainSpec = parse("params", params)?;
            if !(spec.p > 1.0 && spec.a < model.q() && spec.radius > 0.0) {
                return Err(Error::ConstraintViolation(format!(
                    "p>1, a<n, R>0 (got p={}, a={}, R={})",
                    spec.p, spec.a, spec.radius
                )));
            }
            Ok(Task::Chains { model, spec })
        }
        "boundary_scan" => {
            let hp = hardy_params(model, params)?;
            hp.check_unified()?;
            let ScanOptions { offsets } = parse("options", options)?;
            Ok(Task::BoundaryScan { hp, offsets })
        }
        "origin_scan" => {
            let hp = hardy_params(model, params)?;
            hp.check_origin()?;
            let ScanOptions { offsets } = parse("options", options)?;
            Ok(Task::OriginScan { hp, offsets })
        }
        "nonattainment" => {
            let hp = hardy_params(model, params)?;
            hp.check_unified()?;
            let ProbeOptions { eps } = parse("options", options)?;
            Ok(Task::Probe { hp, eps })
        }
        "euclidean_moments" => {
            no_params(id, params)?;
            let model = concrete(id, model)?;
            if model.norm_kind() != NormKind::Euclidean {
                return Err(Error::IncompatibleNormKind("closed-form moments need the Euclidean norm".into()));
            }
            let opts: MomentOptions = parse("options", options)?;
            check_moments(&model, &opts)?;
            Ok(Task::Moments { model, opts })
        }
        "moment_scaling" => {
            no_params(id, params)?;
            let model = concrete(id, model)?;
            let opts: MomentOptions = parse("options", options)?;
            check_moments(&model, &opts)?;
            Ok(Task::Scaling { model, opts })
        }
        "fundamental_inequality" => {
            let FundamentalParams { p } = parse("params", params)?;
            if !(p > 1.0) {
                return Err(Error::ConstraintViolation(format!("p>1 (got {p})")));
            }
            let FundamentalOptions { samples } = parse("options", options)?;
            Ok(Task::Fundamental { p, samples })
        }
        other => Err(Error::ConstraintViolation(format!("unknown theorem_id '{other}'"))),
    }
}

fn no_params(id: &str, params: &Map<String, Value>) -> Result<()> {
    if params.is_empty() {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("{id} takes its inputs from options, not params")))
    }
}

fn check_moments(model: &GroupModel, opts: &MomentOptions) -> Result<()> {
    if opts.s.is_empty() {
        return Err(Error::ConstraintViolation("moment list s is empty".into()));
    }
    if let Some(&s) = opts.s.iter().find(|&&s| !(s > -model.q())) {
        return Err(Error::DivergentMoment { s, q: model.q() });
    }
    if !(opts.radius > 0.0) {
        return Err(Error::ConstraintViolation(format!("R>0 (got {})", opts.radius)));
    }
    if opts.samples < 10_000 {
        return Err(Error::TooFewSamples(opts.samples));
    }
    Ok(())
}

/// Runs a verification task; other tasks are handled by the job runner.
pub fn run_verifier(task: &Task, f: &Profile, opts: &VerifyOptions) -> Result<VerificationReport> {
    match task {
        Task::Hardy { kind, hp } => kind.run(hp, f, opts),
        Task::LogLimits { hp, c_grid } => verify_log_limits(hp, f, c_grid, opts),
        Task::Ckn(ckn) => verify_ckn(ckn, f, opts),
        Task::Chains { model, spec } => verify_chains(model, f, spec, opts),
        _ => unreachable!("not a verifier task"),
    }
}
