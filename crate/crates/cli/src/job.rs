//! Validation of whole configs and execution of single jobs.

use std::collections::HashSet;
use std::fmt::Write as _;

use hardy_core::functionals::{fundamental_inequality_suite, Profile, Status, VerificationReport, VerifyOptions};
use hardy_core::group::{GroupModel, McConfig};
use hardy_core::radial::parse_expr;
use hardy_core::sharpness::{nonattainment_probe, scan_boundary, scan_origin, SharpnessScan};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::{valid_name, Format, JobKind, JobSpec, ModelSpec, RunConfig};
use crate::error::{is_admissibility, CliError};
use crate::theorem::{ids_for, is_param_key, prepare, run_verifier, MomentOptions, Task};

const DEFAULT_SEED: u64 = 1;
/// Monte Carlo agreement threshold in standard errors.
const MC_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    Inadmissible,
}

impl Verdict {
    pub fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "PASS",
            Verdict::Fail => "FAIL",
            Verdict::Inadmissible => "INADMISSIBLE",
        }
    }
}

/// Overrides from the command line.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub tol_scale: Option<f64>,
}

#[derive(Debug, Clone)]
struct SweepSpec {
    model: Option<ModelSpec>,
    params: Map<String, Value>,
    options: Map<String, Value>,
    axes: Vec<(String, Vec<f64>)>,
}

#[derive(Debug, Clone)]
enum Body {
    Single(Task),
    Sweep(SweepSpec),
}

#[derive(Debug, Clone)]
pub struct Job {
    pub name: String,
    pub kind: JobKind,
    pub theorem_id: String,
    seed: u64,
    opts: VerifyOptions,
    profile: Option<Profile>,
    body: Body,
}

pub struct JobResult {
    pub name: String,
    pub kind: JobKind,
    pub theorem_id: String,
    pub verdict: Verdict,
    pub detail: String,
    /// Rendered files, keyed by format.
    pub files: Vec<(Format, String)>,
}

fn config_err(job: &str, msg: impl std::fmt::Display) -> CliError {
    CliError::Config(format!("job '{job}': {msg}"))
}

fn parse_profile(name: &str, spec: &JobSpec) -> Result<Option<Profile>, CliError> {
    let parse = |src: &str| parse_expr(src).map_err(|e| CliError::job(name, e));
    match (&spec.function, &spec.function_im) {
        (Some(re), None) => Ok(Some(Profile::real(parse(re)?))),
        (Some(re), Some(im)) => Ok(Some(Profile::complex(parse(re)?, parse(im)?))),
        (None, Some(_)) => Err(config_err(name, "function_im given without function")),
        (None, None) => Ok(None),
    }
}

/// Validates every job of the selected kinds before anything is computed.
pub fn plan(cfg: &RunConfig, only: Option<JobKind>, ov: Overrides) -> Result<Vec<Job>, CliError> {
    let selected: Vec<(usize, &JobSpec)> = cfg
        .jobs
        .iter()
        .enumerate()
        .filter(|(_, j)| only.is_none_or(|k| j.kind == k))
        .collect();
    if selected.is_empty() {
        let what = only.map_or(String::new(), |k| format!(" of kind {}", k.label()));
        return Err(CliError::Config(format!("no jobs{what} to run")));
    }
    let mut names = HashSet::new();
    let mut jobs = Vec::with_capacity(selected.len());
    for (i, spec) in selected {
        let name = spec
            .name
            .clone()
            .unwrap_or_else(|| format!("{:02}-{}", i + 1, spec.theorem_id));
        if !valid_name(&name) {
            return Err(CliError::Config(format!("job name '{name}' is not a valid file stem")));
        }
        if !names.insert(name.clone()) {
            return Err(CliError::Config(format!("duplicate job name '{name}'")));
        }
        jobs.push(plan_one(&name, spec, cfg.seed, ov)?);
    }
    Ok(jobs)
}

fn plan_one(name: &str, spec: &JobSpec, base_seed: Option<u64>, ov: Overrides) -> Result<Job, CliError> {
    let ids = ids_for(spec.kind);
    if !ids.contains(&spec.theorem_id.as_str()) {
        return Err(config_err(
            name,
            format!(
                "theorem_id '{}' is not valid for kind {}; expected one of {}",
                spec.theorem_id,
                spec.kind.label(),
                ids.join(", ")
            ),
        ));
    }
    let takes_function = matches!(spec.kind, JobKind::Verify | JobKind::Sweep);
    let profile = parse_profile(name, spec)?;
    match (takes_function, profile.is_some()) {
        (true, false) => return Err(config_err(name, "a function expression is required")),
        (false, true) => return Err(config_err(name, format!("{} jobs take no function", spec.kind.label()))),
        _ => {}
    }
    if spec.kind != JobKind::Sweep && !spec.grids.is_empty() {
        return Err(config_err(name, "grids are only valid for sweep jobs"));
    }
    let scale = spec.tolerances.scale.unwrap_or(1.0) * ov.tol_scale.unwrap_or(1.0);
    if !(scale > 0.0 && scale.is_finite()) {
        return Err(config_err(name, format!("tolerance scale must be positive (got {scale})")));
    }
    let mut opts = VerifyOptions {
        tol_scale: scale,
        ..VerifyOptions::default()
    };
    if let Some(t) = spec.tolerances.quad_rel_tol {
        if !(t > 0.0 && t < 1.0) {
            return Err(config_err(name, format!("quad_rel_tol must lie in (0, 1) (got {t})")));
        }
        opts.quad.rel_tol = t;
    }
    let seed = spec.seed.or(ov.seed).or(base_seed).unwrap_or(DEFAULT_SEED);
    let body = if spec.kind == JobKind::Sweep {
        if spec.grids.is_empty() || spec.grids.values().any(Vec::is_empty) {
            return Err(config_err(name, "a sweep needs at least one non-empty grid axis"));
        }
        Body::Sweep(SweepSpec {
            model: spec.model.clone(),
            params: spec.params.clone(),
            options: spec.options.clone(),
            axes: spec.grids.iter().map(|(k, v)| (k.clone(), v.clone())).collect(),
        })
    } else {
        let task = prepare(&spec.theorem_id, spec.model.as_ref(), &spec.params, &spec.options)
            .map_err(|e| CliError::job(name, e))?;
        Body::Single(task)
    };
    Ok(Job {
        name: name.to_string(),
        kind: spec.kind,
        theorem_id: spec.theorem_id.clone(),
        seed,
        opts,
        profile,
        body,
    })
}

/// What a job produced before it is wrapped and rendered.
struct Outcome {
    verdict: Verdict,
    detail: String,
    result: Value,
    csv: String,
    dat: String,
}

impl Job {
    pub fn run(&self, formats: &[Format]) -> JobResult {
        let out = match self.execute() {
            Ok(o) => o,
            Err(e) => Outcome {
                verdict: if is_admissibility(&e) { Verdict::Inadmissible } else { Verdict::Fail },
                detail: e.to_string(),
                result: Value::Null,
                csv: String::new(),
                dat: String::new(),
            },
        };
        let envelope = json!({
            "job": self.name,
            "kind": self.kind,
            "theorem_id": self.theorem_id,
            "seed": self.seed,
            "tol_scale": self.opts.tol_scale,
            "verdict": out.verdict,
            "detail": out.detail,
            "result": out.result,
        });
        let files = formats
            .iter()
            .map(|&f| {
                let text = match f {
                    Format::Json => {
                        let mut s = serde_json::to_string_pretty(&envelope).expect("envelope serializes");
                        s.push('\n');
                        s
                    }
                    Format::Csv => out.csv.clone(),
                    Format::GnuplotDat => out.dat.clone(),
                };
                (f, text)
            })
            .collect();
        JobResult {
            name: self.name.clone(),
            kind: self.kind,
            theorem_id: self.theorem_id.clone(),
            verdict: out.verdict,
            detail: out.detail,
            files,
        }
    }

    fn execute(&self) -> hardy_core::Result<Outcome> {
        match &self.body {
            Body::Sweep(s) => Ok(self.sweep(s)),
            Body::Single(task) => match task {
                Task::Hardy { .. } | Task::LogLimits { .. } | Task::Ckn(_) | Task::Chains { .. } => {
                    let f = self.profile.as_ref().expect("verify jobs carry a profile");
                    Ok(report_outcome(run_verifier(task, f, &self.opts)?))
                }
                Task::BoundaryScan { hp, offsets } => Ok(scan_outcome(scan_boundary(hp, offsets, &self.opts)?)),
                Task::OriginScan { hp, offsets } => Ok(scan_outcome(scan_origin(hp, offsets, &self.opts)?)),
                Task::Probe { hp, eps } => {
                    let probe = nonattainment_probe(hp, eps, &self.opts)?;
                    let mut csv = String::from("eps,integral,err_est\n");
                    let mut dat = String::from("# eps integral err_est\n");
                    for r in &probe.rows {
                        let _ = writeln!(csv, "{:e},{:e},{:e}", r.eps, r.integral, r.err_est);
                        let _ = writeln!(dat, "{:e} {:e} {:e}", r.eps, r.integral, r.err_est);
                    }
                    Ok(Outcome {
                        verdict: pass_or_fail(probe.pass),
                        detail: format!(
                            "normalized slope {:.4}, R^2 {:.6}",
                            probe.normalized_slope, probe.r_squared
                        ),
                        result: serde_json::to_value(&probe).expect("probe serializes"),
                        csv,
                        dat,
                    })
                }
                Task::Moments { model, opts } => moments(model, opts, self.seed),
                Task::Scaling { model, opts } => scaling(model, opts, self.seed),
                Task::Fundamental { p, samples } => {
                    let r = fundamental_inequality_suite(*p, *samples, self.seed)?;
                    let csv = format!(
                        "p,samples,kept,infimum,elementary_min_slack\n{:e},{},{},{:e},{:e}\n",
                        r.p, r.samples, r.kept, r.infimum, r.elementary_min_slack
                    );
                    Ok(Outcome {
                        verdict: pass_or_fail(r.pass),
                        detail: format!("p={} infimum {:.4} over {} samples", r.p, r.infimum, r.kept),
                        result: serde_json::to_value(&r).expect("report serializes"),
                        dat: csv.replace(',', " ").replacen("p ", "# p ", 1),
                        csv,
                    })
                }
            },
        }
    }

    /// Cells run independently; inadmissible cells are recorded and skipped.
    fn sweep(&self, s: &SweepSpec) -> Outcome {
        let f = self.profile.as_ref().expect("sweep jobs carry a profile");
        let cells = cartesian(&s.axes);
        let results: Vec<Cell> = cells
            .par_iter()
            .map(|values| {
                let run = || -> hardy_core::Result<VerificationReport> {
                    let (params, options) = assign(s, values);
                    let task = prepare(&self.theorem_id, s.model.as_ref(), &params, &options)?;
                    run_verifier(&task, f, &self.opts)
                };
                Cell::from_result(values.clone(), run())
            })
            .collect();
        render_sweep(&s.axes, results)
    }
}

fn pass_or_fail(ok: bool) -> Verdict {
    if ok {
        Verdict::Pass
    } else {
        Verdict::Fail
    }
}

fn report_verdict(r: &VerificationReport) -> Verdict {
    match r.status {
        Status::IdentityPass | Status::InequalityPass { .. } => Verdict::Pass,
        Status::Fail { .. } => Verdict::Fail,
        Status::Inadmissible { .. } => Verdict::Inadmissible,
    }
}

fn status_detail(r: &VerificationReport) -> String {
    match &r.status {
        Status::IdentityPass => format!("identity holds, residual_rel {:.2e}", r.residual_rel),
        Status::InequalityPass { slack } => format!("inequality holds, slack {slack:.4e}"),
        Status::Fail { diagnostic } => diagnostic.clone(),
        Status::Inadmissible { reason } => reason.clone(),
    }
}

fn report_outcome(r: VerificationReport) -> Outcome {
    let csv = format!("{}\n{}\n", VerificationReport::CSV_HEADER, r.csv_row());
    let mut dat = String::from("# term value err_est\n");
    for (name, t) in &r.terms {
        let _ = writeln!(dat, "{name} {:e} {:e}", t.value, t.err);
    }
    Outcome {
        verdict: report_verdict(&r),
        detail: status_detail(&r),
        result: serde_json::to_value(&r).expect("report serializes"),
        csv,
        dat,
    }
}

fn scan_outcome(scan: SharpnessScan) -> Outcome {
    let mut dat = String::from("# kappa delta ratio err_est\n");
    for r in &scan.rows {
        let _ = writeln!(dat, "{:e} {:e} {:e} {:e}", r.kappa, r.delta, r.ratio, r.err_est);
    }
    let finest = scan.rows.last().map_or(f64::NAN, |r| r.ratio);
    Outcome {
        verdict: pass_or_fail(scan.pass),
        detail: format!(
            "target {:.6}, extrapolated {:.6} (gap {:.3}%), finest ratio {:.6}",
            scan.target,
            scan.extrapolated,
            100.0 * scan.relative_gap,
            finest
        ),
        result: json!({ "summary": scan.summary(), "rows": scan.rows }),
        csv: scan.to_csv(),
        dat,
    }
}

#[derive(Serialize)]
struct McRow {
    s: f64,
    estimate: f64,
    stderr: f64,
    expected: f64,
    sigmas: f64,
}

fn mc_outcome(rows: Vec<McRow>, what: &str) -> Outcome {
    let worst = rows.iter().map(|r| r.sigmas).fold(0.0, f64::max);
    let mut csv = String::from("s,estimate,stderr,expected,sigmas\n");
    let mut dat = String::from("# s estimate stderr expected sigmas\n");
    for r in &rows {
        let _ = writeln!(csv, "{:e},{:e},{:e},{:e},{:e}", r.s, r.estimate, r.stderr, r.expected, r.sigmas);
        let _ = writeln!(dat, "{:e} {:e} {:e} {:e} {:e}", r.s, r.estimate, r.stderr, r.expected, r.sigmas);
    }
    Outcome {
        verdict: pass_or_fail(worst <= MC_SIGMAS),
        detail: format!("{what}: worst deviation {worst:.2} sigma"),
        result: json!({ "threshold_sigmas": MC_SIGMAS, "rows": rows }),
        csv,
        dat,
    }
}

fn moments(model: &GroupModel, opts: &MomentOptions, seed: u64) -> hardy_core::Result<Outcome> {
    // Exact for the Euclidean norm, which `prepare` requires here.
    let sphere = model.sphere_measure(McConfig::default())?;
    let n = model.dim();
    let mut rows = Vec::new();
    for (i, &s) in opts.s.iter().enumerate() {
        let cfg = McConfig {
            samples: opts.samples,
            seed: seed.wrapping_add(i as u64),
        };
        let m = model.mc_ball_moment(s, opts.radius, cfg)?;
        let q = n as f64 + s;
        let expected = sphere * opts.radius.powf(q) / q;
        rows.push(McRow {
            s,
            estimate: m.estimate,
            stderr: m.stderr,
            expected,
            sigmas: (m.estimate - expected).abs() / m.stderr,
        });
    }
    Ok(mc_outcome(rows, "closed-form moments"))
}

fn scaling(model: &GroupModel, opts: &MomentOptions, seed: u64) -> hardy_core::Result<Outcome> {
    let mut rows = Vec::new();
    for (i, &s) in opts.s.iter().enumerate() {
        let cfg = |k: u64| McConfig {
            samples: opts.samples,
            seed: seed.wrapping_add(2 * i as u64 + k),
        };
        let m1 = model.mc_ball_moment(s, opts.radius, cfg(0))?;
        let m2 = model.mc_ball_moment(s, 2.0 * opts.radius, cfg(1))?;
        let ratio = m2.estimate / m1.estimate;
        let stderr = ratio * ((m1.stderr / m1.estimate).powi(2) + (m2.stderr / m2.estimate).powi(2)).sqrt();
        let expected = 2f64.powf(model.q() + s);
        rows.push(McRow {
            s,
            estimate: ratio,
            stderr,
            expected,
            sigmas: (ratio - expected).abs() / stderr,
        });
    }
    Ok(mc_outcome(rows, "moment scaling under doubling"))
}

fn cartesian(axes: &[(String, Vec<f64>)]) -> Vec<Vec<f64>> {
    axes.iter().fold(vec![Vec::new()], |acc, (_, values)| {
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut cell = prefix.clone();
                    cell.push(v);
                    cell
                })
            })
            .collect()
    })
}

/// Params and options of one sweep cell.
fn assign(s: &SweepSpec, values: &[f64]) -> (Map<String, Value>, Map<String, Value>) {
    let (mut params, mut options) = (s.params.clone(), s.options.clone());
    for ((key, _), &v) in s.axes.iter().zip(values) {
        let value = if key == "k" && v.fract() == 0.0 && v >= 0.0 {
            Value::from(v as u64)
        } else {
            Value::from(v)
        };
        let target = if is_param_key(key) { &mut params } else { &mut options };
        target.insert(key.clone(), value);
    }
    (params, options)
}

#[derive(Serialize)]
struct Cell {
    values: Vec<f64>,
    verdict: Verdict,
    detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    report: Option<VerificationReport>,
}

impl Cell {
    fn from_result(values: Vec<f64>, r: hardy_core::Result<VerificationReport>) -> Self {
        match r {
            Ok(report) => Cell {
                values,
                verdict: report_verdict(&report),
                detail: status_detail(&report),
                report: Some(report),
            },
            Err(e) => Cell {
                values,
                verdict: if is_admissibility(&e) { Verdict::Inadmissible } else { Verdict::Fail },
                detail: e.to_string(),
                report: None,
            },
        }
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map_or_else(|| "nan".into(), |v| format!("{v:e}"))
}

fn render_sweep(axes: &[(String, Vec<f64>)], cells: Vec<Cell>) -> Outcome {
    let count = |v: Verdict| cells.iter().filter(|c| c.verdict == v).count();
    let (pass, fail, inadm) = (count(Verdict::Pass), count(Verdict::Fail), count(Verdict::Inadmissible));
    // All-inadmissible sweeps are a parameter error, not a numerical failure.
    let verdict = if fail > 0 {
        Verdict::Fail
    } else if pass == 0 {
        Verdict::Inadmissible
    } else {
        Verdict::Pass
    };

    let mut terms: Vec<String> = Vec::new();
    for r in cells.iter().filter_map(|c| c.report.as_ref()) {
        for name in r.terms.keys() {
            if !terms.contains(name) {
                terms.push(name.clone());
            }
        }
    }
    let names: Vec<&str> = axes.iter().map(|(k, _)| k.as_str()).collect();
    let mut csv = names.join(",");
    csv.push_str(",verdict,lhs,rhs,slack,residual_abs,residual_rel");
    for t in &terms {
        csv.push(',');
        csv.push_str(t);
    }
    csv.push('\n');
    let mut dat = format!("# {} slack residual_rel\n", names.join(" "));
    let mut previous_lead: Option<f64> = None;
    for c in &cells {
        let r = c.report.as_ref();
        let values: Vec<String> = c.values.iter().map(|v| format!("{v:e}")).collect();
        let slack = r.and_then(VerificationReport::slack);
        let _ = write!(
            csv,
            "{},{},{},{},{},{},{}",
            values.join(","),
            c.verdict.label().to_lowercase(),
            fmt_opt(r.map(|r| r.lhs)),
            fmt_opt(r.map(|r| r.rhs)),
            fmt_opt(slack),
            fmt_opt(r.map(|r| r.residual_abs)),
            fmt_opt(r.map(|r| r.residual_rel)),
        );
        for t in &terms {
            let _ = write!(csv, ",{}", fmt_opt(r.and_then(|r| r.term(t))));
        }
        csv.push('\n');
        // Blank line between blocks of the leading axis, as gnuplot expects for surfaces.
        if axes.len() > 1 && previous_lead.is_some_and(|p| p != c.values[0]) {
            dat.push('\n');
        }
        previous_lead = Some(c.values[0]);
        let _ = writeln!(
            dat,
            "{} {} {}",
            values.join(" "),
            fmt_opt(slack),
            fmt_opt(r.map(|r| r.residual_rel))
        );
    }
    Outcome {
        verdict,
        detail: format!("{} cells: {pass} pass, {fail} fail, {inadm} inadmissible", cells.len()),
        result: json!({ "axes": names, "cells": cells }),
        csv,
        dat,
    }
}

/// Runs the jobs on a pool of `threads` workers; results keep config order.
pub fn run_all(jobs: &[Job], formats: &[Format], threads: Option<usize>) -> Result<Vec<JobResult>, CliError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| CliError::Config(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| jobs.par_iter().map(|j| j.run(formats)).collect()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cartesian_order() {
        let axes = vec![("a".to_string(), vec![1.0, 2.0]), ("c".to_string(), vec![3.0, 4.0, 5.0])];
        let cells = cartesian(&axes);
        assert_eq!(cells.len(), 6);
        assert_eq!(cells[0], vec![1.0, 3.0]);
        assert_eq!(cells[5], vec![2.0, 5.0]);
    }
}
