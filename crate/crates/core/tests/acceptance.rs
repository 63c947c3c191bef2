//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use hardy_core::functionals::{
    fundamental_inequality_suite, resolve_ckn_params, verify_chains, verify_ckn, verify_high_l2, verify_high_lp,
    verify_l2_identity, verify_log_limits, verify_lp_identity, verify_radial_lower_bound, verify_rellich_l2,
    verify_rellich_lp, verify_unified_hardy, ChainSpec, HardyParams, HighLpMode, Profile, RellichL2Kind,
    VerificationReport, VerifyOptions,
};
use hardy_core::group::{GroupModel, McConfig};
use hardy_core::quadrature::ip_identity_check;
use hardy_core::radial::{parse_expr, RadialExpr};
use hardy_core::sharpness::{nonattainment_probe, scan_boundary, scan_origin, DEFAULT_OFFSETS, SCAN_GAP};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn opts() -> VerifyOptions {
    VerifyOptions::default()
}

fn bump_r() -> Profile {
    Profile::real(RadialExpr::mul(RadialExpr::bump(0.2, 0.8), RadialExpr::power(1.0)))
}

/// Fixed profiles with compact support inside the unit ball.
fn corpus() -> Vec<(&'static str, Profile)> {
    [
        "bump(0.2,0.8)",
        "mul(bump(0.2,0.8), powr(1))",
        "mul(bump(0.2,0.8), powr(3))",
        "add(bump(0.1,0.5), bump(0.4,0.9))",
        "mul(bump(0.3,0.9), logr())",
        "mul(rampup(0.3,0.5), rampdown(0.6,0.8), powr(2))",
    ]
    .into_iter()
    .map(|s| (s, Profile::real(parse_expr(s).expect("corpus parses"))))
    .collect()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn passed(r: VerificationReport) -> Result<VerificationReport, String> {
    if r.passed() {
        Ok(r)
    } else {
        Err(format!("{} {:?}", r.theorem_id, r.status))
    }
}

fn rel_diff(a: f64, b: f64) -> f64 {
    let s = a.abs().max(b.abs());
    if s == 0.0 {
        0.0
    } else {
        (a - b).abs() / s
    }
}

/// Largest relative term difference over the union of term names.
fn term_diff(x: &VerificationReport, y: &VerificationReport) -> Result<f64, String> {
    let mut worst = 0.0f64;
    for (name, t) in &x.terms {
        let u = y.term(name).ok_or_else(|| format!("term {name} missing"))?;
        worst = worst.max(rel_diff(t.value, u));
    }
    ensure(x.terms.len() == y.terms.len(), || "term sets differ".into())?;
    Ok(worst)
}

fn e<T: std::fmt::Display>(x: T) -> String {
    x.to_string()
}

fn c1() -> Outcome {
    let t0 = Instant::now();
    let r = passed(verify_l2_identity(&HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0), &bump_r(), &opts()).map_err(e)?)?;
    let dt = t0.elapsed().as_secs_f64();
    ensure(r.residual_rel <= 1e-8, || format!("residual {:e}", r.residual_rel))?;
    ensure(dt < 1.0, || format!("runtime {dt:.3}s"))?;
    let mut worst = r.residual_rel;
    for q in [2.5, 4.0, 7.0] {
        let r = passed(verify_l2_identity(&HardyParams::new(q, 2.0, 1.0, 2.0, 1.0), &bump_r(), &opts()).map_err(e)?)?;
        ensure(r.residual_rel <= 1e-8, || format!("Q={q}: residual {:e}", r.residual_rel))?;
        worst = worst.max(r.residual_rel);
    }
    Ok(format!("max residual_rel {worst:.1e}, runtime {:.1} ms", dt * 1e3))
}

fn c2() -> Outcome {
    let mut worst = 0.0f64;
    for p in [1.5, 3.0] {
        let r = passed(verify_lp_identity(&HardyParams::new(4.0, p, 1.0, 2.0, 1.0), &bump_r(), &opts()).map_err(e)?)?;
        ensure(r.residual_rel <= 1e-6, || format!("p={p}: residual {:e}", r.residual_rel))?;
        worst = worst.max(r.residual_rel);
    }
    let hp = HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0);
    let lp = verify_lp_identity(&hp, &bump_r(), &opts()).map_err(e)?;
    let l2 = verify_l2_identity(&hp, &bump_r(), &opts()).map_err(e)?;
    let d = term_diff(&lp, &l2)?;
    ensure(d <= 1e-9, || format!("p=2 terms differ by {d:e}"))?;
    Ok(format!("max residual_rel {worst:.1e}; p=2 term difference {d:.1e}"))
}

fn c3() -> Outcome {
    let f = bump_r();
    let mut worst = 0.0f64;
    let hp = HardyParams::new(8.0, 2.0, 1.0, 2.0, 0.5).with_order(2);
    let r = passed(verify_high_l2(&hp, &f, &opts()).map_err(e)?)?;
    worst = worst.max(r.residual_rel);
    for p in [1.5, 3.0] {
        let hp = HardyParams::new(8.0, p, 1.0, 2.0, 0.5).with_order(2);
        let r = passed(verify_high_lp(&hp, &f, HighLpMode::Identity, &opts()).map_err(e)?)?;
        worst = worst.max(r.residual_rel);
    }
    ensure(worst <= 1e-6, || format!("residual {worst:e}"))?;
    let hp = HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0);
    let d = term_diff(&verify_high_l2(&hp, &f, &opts()).map_err(e)?, &verify_l2_identity(&hp, &f, &opts()).map_err(e)?)?;
    ensure(d == 0.0, || format!("k=1 L2 differs by {d:e}"))?;
    for p in [1.5, 3.0] {
        let hp = HardyParams::new(4.0, p, 1.0, 2.0, 1.0);
        let hi = verify_high_lp(&hp, &f, HighLpMode::Identity, &opts()).map_err(e)?;
        let d = term_diff(&hi, &verify_lp_identity(&hp, &f, &opts()).map_err(e)?)?;
        ensure(d == 0.0, || format!("k=1 p={p} differs by {d:e}"))?;
    }
    Ok(format!("k=2 max residual_rel {worst:.1e}; k=1 reports identical"))
}

fn c4() -> Outcome {
    let f = bump_r();
    let mut cells = 0;
    let mut worst = 0.0f64;
    for p in [1.5, 2.0, 3.0] {
        for a in [0.0, 1.0, 2.0] {
            for b in [1.5, 2.0, 3.0] {
                let crit = (4.0 - a) / (b - 1.0);
                for frac in [0.25, 0.5, 1.0] {
                    let hp = HardyParams::new(4.0, p, a, b, frac * crit);
                    let r = passed(verify_unified_hardy(&hp, &f, &opts()).map_err(e)?)?;
                    let slack = r.slack().ok_or("missing slack")?;
                    ensure(slack >= 0.0, || format!("negative slack at p={p} a={a} b={b} c={}", hp.c))?;
                    if frac < 1.0 {
                        let rem = r.term("remainder").ok_or("missing remainder")?;
                        let d = rel_diff(slack, rem);
                        ensure(d <= 1e-6, || format!("slack vs remainder {d:e} at p={p} a={a} b={b}"))?;
                        worst = worst.max(d);
                    }
                    cells += 1;
                }
            }
        }
    }
    Ok(format!("{cells} cells pass; max slack/remainder mismatch {worst:.1e}"))
}

fn c5() -> Outcome {
    let t0 = Instant::now();
    let s = scan_boundary(&HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0), &DEFAULT_OFFSETS, &opts()).map_err(e)?;
    let dt = t0.elapsed().as_secs_f64();
    let last = s.rows.last().ok_or("no rows")?;
    ensure((last.kappa - 0.51).abs() < 1e-12 && (last.delta - 1e-3).abs() < 1e-15, || "finest row misplaced".into())?;
    ensure(s.lower_bound_ok, || "a row fell below 1/4".into())?;
    ensure(s.relative_gap <= SCAN_GAP, || format!("extrapolated gap {:e}", s.relative_gap))?;
    ensure(dt < 30.0, || format!("runtime {dt:.1}s"))?;
    // The raw row carries a cutoff cost linear in the offset; it is reported, not gated.
    Ok(format!(
        "extrapolated {:.5} (gap {:.2}%); finest raw ratio {:.4} ({:.1}% from target); {:.2}s",
        s.extrapolated,
        100.0 * s.relative_gap,
        last.ratio,
        100.0 * s.finest_gap,
        dt
    ))
}

fn c6() -> Outcome {
    let s = scan_origin(&HardyParams::new(4.0, 2.0, 1.0, 1.0, 1.0), &DEFAULT_OFFSETS, &opts()).map_err(e)?;
    ensure(s.lower_bound_ok, || "a row fell below 2.25".into())?;
    ensure(s.relative_gap <= SCAN_GAP, || format!("extrapolated gap {:e}", s.relative_gap))?;
    Ok(format!(
        "extrapolated {:.5} (gap {:.3}%), finest raw ratio {:.4}",
        s.extrapolated,
        100.0 * s.relative_gap,
        s.rows.last().map_or(f64::NAN, |r| r.ratio)
    ))
}

fn c7() -> Outcome {
    let probe = nonattainment_probe(&HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0), &[1e-1, 1e-2, 1e-3, 1e-4], &opts()).map_err(e)?;
    ensure((probe.normalized_slope - 1.0).abs() <= 0.1, || format!("slope {}", probe.normalized_slope))?;
    ensure(probe.r_squared >= 0.999, || format!("R^2 {}", probe.r_squared))?;
    Ok(format!("normalized slope {:.4}, R^2 {:.6}", probe.normalized_slope, probe.r_squared))
}

fn c8() -> Outcome {
    let base = HardyParams::new(8.0, 2.0, 1.0, 2.0, 0.5).with_order(2);
    let f = bump_r();
    for d in [0.0, 0.5, 1.0] {
        let ck = resolve_ckn_params(base, 2.0, 2.0, 0.3, Some(d)).map_err(e)?;
        let r = passed(verify_ckn(&ck, &f, &opts()).map_err(e)?)?;
        if d == 0.0 {
            ensure(r.slack() == Some(0.0), || format!("delta=0 slack {:?}", r.slack()))?;
        }
        if d == 1.0 {
            let high = verify_high_l2(&base, &f, &opts()).map_err(e)?;
            let main = high.term("lhs_main").ok_or("missing lhs_main")?;
            let lhs = r.term("lhs").ok_or("missing lhs")?;
            let bracket = r.term("bracket").ok_or("missing bracket")?;
            ensure(rel_diff(lhs * lhs, main) <= 1e-12, || format!("delta=1 lhs^2 vs Hardy {:e}", rel_diff(lhs * lhs, main)))?;
            ensure(rel_diff(bracket, main) <= 1e-6, || format!("delta=1 bracket vs Hardy {:e}", rel_diff(bracket, main)))?;
        }
    }
    let mut cases = vec![];
    for d in [0.0, 0.25, 0.5, 0.75, 1.0] {
        cases.push(resolve_ckn_params(base, 2.0, 2.0, 0.3, Some(d)).map_err(e)?);
    }
    let hp3 = HardyParams::new(8.0, 3.0, 1.0, 2.0, 0.5);
    cases.push(resolve_ckn_params(hp3, 2.0, 2.4, -0.2, None).map_err(e)?);
    let mut min_slack = f64::INFINITY;
    for (name, f) in corpus() {
        for ck in &cases {
            let r = passed(verify_ckn(ck, &f, &opts()).map_err(e)?)?;
            let s = r.term("holder_slack").ok_or("missing holder_slack")?;
            let scale = r.term("holder_rhs").unwrap_or(1.0).abs();
            ensure(s >= -1e-12 * scale, || format!("{name}: Hölder slack {s:e}"))?;
            min_slack = min_slack.min(s / scale.max(f64::MIN_POSITIVE));
        }
    }
    Ok(format!("delta in {{0, 1/2, 1}} pass; min relative Hölder slack {min_slack:.1e}"))
}

fn c9() -> Outcome {
    let f = bump_r();
    passed(verify_rellich_l2(&HardyParams::new(5.0, 2.0, 4.0, 2.0, 1.0), &f, RellichL2Kind::WeightSquared, &opts()).map_err(e)?)?;
    passed(verify_rellich_l2(&HardyParams::new(8.0, 2.0, 4.0, 2.0, 1.0), &f, RellichL2Kind::WeightFourth, &opts()).map_err(e)?)?;
    let mut worst = 0.0f64;
    for a in [1.0, 3.0, 4.5] {
        let r = passed(verify_rellich_l2(&HardyParams::new(5.0, 2.0, a, 2.0, 1.0), &f, RellichL2Kind::Expansion, &opts()).map_err(e)?)?;
        ensure(r.residual_rel <= 1e-8, || format!("expansion a={a}: {:e}", r.residual_rel))?;
        if a == 3.0 {
            ensure(r.term("cross_term") == Some(0.0), || "cross term not exactly zero at a=3".into())?;
        }
        worst = worst.max(r.residual_rel);
    }
    for p in [1.5, 2.0, 3.0] {
        passed(verify_radial_lower_bound(&HardyParams::new(5.0, p, 2.0, 2.0, 1.0), &f, &opts()).map_err(e)?)?;
        passed(verify_rellich_lp(&HardyParams::new(9.0, p, 2.0, p, 1.0), &f, &opts()).map_err(e)?)?;
    }
    let hp = HardyParams::new(5.0, 2.0, 4.0, 2.0, 1.0);
    let lp = passed(verify_rellich_lp(&hp, &f, &opts()).map_err(e)?)?;
    let l2 = verify_rellich_l2(&hp, &f, RellichL2Kind::WeightSquared, &opts()).map_err(e)?;
    let d = rel_diff(lp.term("lhs_main").unwrap_or(f64::NAN), l2.term("lhs_main").unwrap_or(0.0))
        .max(rel_diff(lp.term("laplacian").unwrap_or(f64::NAN), l2.term("laplacian").unwrap_or(0.0)));
    ensure(d <= 1e-9, || format!("p=2 cross-check {d:e}"))?;
    Ok(format!("expansion residual {worst:.1e}; Lp/L2 cross-check {d:.1e}"))
}

fn c10() -> Outcome {
    let grid = [0.2, 0.1, 0.05, 0.02, 0.01];
    let mut worst = 0.0f64;
    for (name, f) in corpus() {
        for hp in [HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0), HardyParams::new(4.0, 3.0, 0.0, 2.5, 1.0)] {
            let r = passed(verify_log_limits(&hp, &f, &grid, &opts()).map_err(e)?)?;
            let gap = r.term("gap_lhs_c0.01").ok_or("missing gap")?;
            ensure(gap <= 0.01, || format!("{name}: gap {gap:e}"))?;
            worst = worst.max(gap);
        }
    }
    Ok(format!("log inequality holds; max gap at c=0.01 {:.3}%", 100.0 * worst))
}

fn c11() -> Outcome {
    let mut links = 0;
    for n in [3usize, 5] {
        let m = GroupModel::euclidean(n).map_err(e)?;
        for (_, f) in corpus().into_iter().take(3) {
            let r = passed(verify_chains(&m, &f, &ChainSpec::default(), &opts()).map_err(e)?)?;
            links += r.terms.len();
        }
    }
    Ok(format!("all links pass at n=3 and n=5 ({links} terms checked)"))
}

fn c12() -> Outcome {
    let t0 = Instant::now();
    let cfg = McConfig { samples: 1_000_000, seed: 12 };
    let e3 = GroupModel::euclidean(3).map_err(e)?;
    let mut worst = 0.0f64;
    for s in [0.0, 1.0, 2.0] {
        let m = e3.mc_ball_moment(s, 1.0, cfg).map_err(e)?;
        let exact = 4.0 * PI / (3.0 + s);
        let z = (m.estimate - exact).abs() / m.stderr;
        ensure(z <= 3.0, || format!("n=3 s={s}: {z:.2} sigma"))?;
        worst = worst.max(z);
    }
    let h = GroupModel::heisenberg();
    for s in [0.0, 1.0] {
        let m1 = h.mc_ball_moment(s, 1.0, cfg).map_err(e)?;
        let m2 = h.mc_ball_moment(s, 2.0, McConfig { seed: 13, ..cfg }).map_err(e)?;
        let ratio = m2.estimate / m1.estimate;
        let sigma = ratio * ((m1.stderr / m1.estimate).powi(2) + (m2.stderr / m2.estimate).powi(2)).sqrt();
        let z = (ratio - 2f64.powf(4.0 + s)).abs() / sigma;
        ensure(z <= 3.0, || format!("Koranyi s={s}: {z:.2} sigma"))?;
        worst = worst.max(z);
    }
    let dt = t0.elapsed().as_secs_f64();
    ensure(dt < 60.0, || format!("runtime {dt:.1}s"))?;
    Ok(format!("worst deviation {worst:.2} sigma, {dt:.2}s"))
}

/// Central difference of `g` refined twice by Richardson extrapolation (`O(h^6)`).
fn richardson(g: impl Fn(f64) -> f64, x: f64, h: f64) -> f64 {
    let d = |h: f64| (g(x + h) - g(x - h)) / (2.0 * h);
    let (d0, d1, d2) = (d(h), d(h / 2.0), d(h / 4.0));
    let (e0, e1) = ((4.0 * d1 - d0) / 3.0, (4.0 * d2 - d1) / 3.0);
    (16.0 * e1 - e0) / 15.0
}

fn c13() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let exprs = [
        "powr(2.5)",
        "bnd(c=1.5, k=1.3)",
        "logr()",
        "bump(0.2,0.8)",
        "rampup(0.3,0.6)",
        "rampdown(0.4,0.7)",
        "mul(bump(0.1,0.9), powr(-1.5), bnd(c=0.5, k=2))",
        "add(mul(logr(), powr(2)), neg(bnd(k=3)))",
    ];
    let mut worst_fd = 0.0f64;
    for src in exprs {
        let f = parse_expr(src).map_err(e)?;
        for _ in 0..20 {
            let r = rng.gen_range(0.25..0.75);
            let jet = f.eval_jet(r, 3).map_err(e)?;
            for k in 1..=3 {
                let fd = richardson(|x| f.eval_jet(x, 3).map(|j| j.deriv(k - 1)).unwrap_or(f64::NAN), r, 4e-4);
                let d = (jet.deriv(k) - fd).abs() / jet.deriv(k).abs().max(1.0);
                ensure(d <= 1e-6, || format!("{src} order {k} at r={r}: {d:e}"))?;
                worst_fd = worst_fd.max(d);
            }
        }
    }
    let mut worst_ip = 0.0f64;
    for _ in 0..1000 {
        let p = rng.gen_range(1.1..4.0);
        let v: f64 = rng.gen_range(-2.0..2.0);
        let u: f64 = rng.gen_range(-2.0..2.0);
        let d = ip_identity_check(v, u, p).map_err(e)? / (1.0 + v.abs().powf(p) + u.abs().powf(p));
        ensure(d <= 1e-9, || format!("convexity identity off by {d:e} at p={p}, v={v}, u={u}"))?;
        worst_ip = worst_ip.max(d);
    }
    let mut infs = vec![];
    for p in [1.5, 2.0, 3.0] {
        let rep = fundamental_inequality_suite(p, 100_000, 7).map_err(e)?;
        ensure(rep.pass, || format!("p={p}: infimum {:e}", rep.infimum))?;
        infs.push(format!("{:.3}", rep.infimum));
    }
    Ok(format!(
        "jets vs differences {worst_fd:.1e}; identity {worst_ip:.1e}; infima [{}]",
        infs.join(", ")
    ))
}

type Criterion = (u32, &'static str, fn() -> Outcome);

fn main() -> ExitCode {
    let criteria: [Criterion; 13] = [
        (1, "L2 identity", c1),
        (2, "Lp identity", c2),
        (3, "higher-order identities", c3),
        (4, "unified Hardy grid", c4),
        (5, "boundary sharpness scan", c5),
        (6, "origin sharpness scan", c6),
        (7, "non-attainment probe", c7),
        (8, "CKN", c8),
        (9, "Rellich", c9),
        (10, "log limits", c10),
        (11, "Euclidean chains", c11),
        (12, "Monte Carlo cross-checks", c12),
        (13, "property suites", c13),
    ];
    let mut failed = 0;
    for (n, name, run) in criteria {
        let t0 = Instant::now();
        let outcome = run();
        let ms = t0.elapsed().as_secs_f64() * 1e3;
        match outcome {
            Ok(detail) => println!("criterion {n:>2} PASS  {name}: {detail} [{ms:.0} ms]"),
            Err(detail) => {
                failed += 1;
                println!("criterion {n:>2} FAIL  {name}: {detail} [{ms:.0} ms]");
            }
        }
    }
    println!("acceptance: {} of 13 criteria pass", 13 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
