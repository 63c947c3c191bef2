use hardy_core::functionals::{
    convexity_quotient, verify_high_l2, verify_l2_identity, verify_lp_identity, HardyParams, Profile,
    VerificationReport, VerifyOptions,
};
use hardy_core::group::{GroupModel, McConfig, NormKind};
use hardy_core::quadrature::{integrate_gaps, ip_identity_check, ip_value, QuadConfig, SingularHints};
use hardy_core::radial::{make_boundary_family, make_origin_family, RadialExpr};
use hardy_core::sharpness::{rayleigh, RayleighKind};
use proptest::prelude::*;

fn bump_r(lo: f64, hi: f64, scale: f64) -> Profile {
    Profile::real(RadialExpr::Product(vec![
        RadialExpr::bump(lo * scale, hi * scale),
        RadialExpr::power(1.0),
        RadialExpr::constant(1.0 / scale),
    ]))
}

fn leaf() -> impl Strategy<Value = RadialExpr> {
    prop_oneof![
        (-3.0..3.0f64).prop_map(RadialExpr::power),
        (0.3..3.0f64, 0.5..3.0f64).prop_map(|(c, k)| RadialExpr::boundary_power(c, k, 1.0)),
        Just(RadialExpr::log_r(1.0)),
        (0.05..0.4f64, 0.6..0.95f64).prop_map(|(lo, hi)| RadialExpr::bump(lo, hi)),
        (0.05..0.4f64, 0.6..0.95f64).prop_map(|(lo, hi)| RadialExpr::RampUp { lo, hi }),
        (-2.0..2.0f64).prop_map(RadialExpr::constant),
    ]
}

fn binom(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Worst `|residual_abs|` against the report's own error budget.
fn within_budget(r: &VerificationReport) -> bool {
    let err: f64 = r.terms.values().map(|t| t.err).sum();
    let mass: f64 = r.terms.values().map(|t| t.value.abs()).sum();
    r.residual_abs <= 10.0 * err + 64.0 * f64::EPSILON * mass
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn quasi_norms_are_homogeneous(lambda in 0.05..20.0f64, x in prop::array::uniform3(-3.0..3.0f64)) {
        let models = [
            GroupModel::euclidean(3).unwrap(),
            GroupModel::heisenberg(),
            GroupModel::new(vec![1.0, 2.0, 2.0], NormKind::AnisotropicPower { exponent: 4 }).unwrap(),
        ];
        for m in &models {
            let n = m.quasi_norm(&x).unwrap();
            let scaled = m.quasi_norm(&m.dilate(lambda, &x).unwrap()).unwrap();
            prop_assert!((scaled - lambda * n).abs() <= 1e-12 * lambda * n.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn product_jets_follow_leibniz(f in leaf(), g in leaf(), r in 0.45..0.55f64) {
        let (jf, jg) = (f.eval_jet(r, 3).unwrap(), g.eval_jet(r, 3).unwrap());
        let jp = RadialExpr::mul(f, g).eval_jet(r, 3).unwrap();
        for k in 0..=3 {
            let want: f64 = (0..=k).map(|j| binom(k, j) * jf.deriv(j) * jg.deriv(k - j)).sum();
            let scale: f64 = (0..=k).map(|j| binom(k, j) * (jf.deriv(j) * jg.deriv(k - j)).abs()).sum();
            prop_assert!((jp.deriv(k) - want).abs() <= 1e-13 * scale.max(f64::MIN_POSITIVE));
        }
    }

    #[test]
    fn zero_outside_support(f in leaf(), g in leaf(), r in 0.001..0.999f64) {
        let e = RadialExpr::mul(RadialExpr::add(f, RadialExpr::bump(0.2, 0.3)), g);
        if let Some(s) = e.support(1.0) {
            if r < s.lo || r > s.hi {
                prop_assert_eq!(e.eval(r).unwrap(), 0.0);
            }
        }
    }

    #[test]
    fn families_vanish_where_required(kappa in 0.1..3.0f64, delta in 0.01..0.49f64, t in 0.0..1.0f64) {
        let b = make_boundary_family(kappa, delta, 1.0, 1.0).unwrap();
        let r = t * (1.0 - 2.0 * delta);
        if r > 0.0 {
            prop_assert_eq!(b.eval(r).unwrap(), 0.0);
        }
        let o = make_origin_family(-kappa, delta).unwrap();
        let r = 2.0 * delta + t * (1.0 - 2.0 * delta);
        prop_assert_eq!(o.eval(r).unwrap(), 0.0);
    }

    #[test]
    fn convexity_kernel_positive_and_diagonal(v in -3.0..3.0f64, u in -3.0..3.0f64, p in 1.1..5.0f64) {
        let ip = ip_value(v, u, p);
        if v != 0.0 || u != 0.0 {
            prop_assert!(ip.unwrap() >= 0.0);
        }
        if v != 0.0 {
            let d = ip_value(v, v, p).unwrap();
            let want = 0.5 * (p - 1.0) * v.abs().powf(p - 2.0);
            prop_assert!((d - want).abs() <= 1e-12 * want);
        }
    }

    #[test]
    fn convexity_identity_holds(v in -3.0..3.0f64, u in -3.0..3.0f64, p in 1.1..5.0f64) {
        let scale = 1.0 + v.abs().powf(p) + u.abs().powf(p);
        prop_assert!(ip_identity_check(v, u, p).unwrap() <= 1e-9 * scale);
    }

    #[test]
    fn pointwise_convexity_positive(a in -1.0..1.0f64, b in -1.0..1.0f64, p in prop::sample::select(vec![1.5, 2.0, 2.5, 3.0, 4.0])) {
        if let Some(v) = convexity_quotient(p, a, b) {
            prop_assert!(v > 0.0);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn identity_residual_within_error_budget(
        q in 2.0..9.0f64,
        a in -1.0..1.5f64,
        b in 1.2..3.0f64,
        frac in 0.1..1.0f64,
        p in prop::sample::select(vec![1.5, 2.0, 3.0]),
    ) {
        let crit = (q - a) / (b - 1.0);
        let hp = HardyParams::new(q, p, a, b, frac * crit);
        let r = verify_lp_identity(&hp, &bump_r(0.2, 0.8, 1.0), &VerifyOptions::default()).unwrap();
        prop_assert!(r.passed(), "{}", r.to_json());
        prop_assert!(within_budget(&r), "{}", r.to_json());
    }

    #[test]
    fn radius_rescaling_is_invisible(lambda in 0.2..5.0f64, q in 2.0..8.0f64, a in -1.0..1.5f64) {
        let o = VerifyOptions::default();
        let hp = HardyParams::new(q, 2.0, a, 2.0, 1.0);
        let base = verify_l2_identity(&hp, &bump_r(0.2, 0.8, 1.0), &o).unwrap();
        let moved = verify_l2_identity(&hp.with_radius(lambda), &bump_r(0.2, 0.8, lambda), &o).unwrap();
        prop_assert!((base.residual_rel - moved.residual_rel).abs() <= 1e-9);
        for (name, t) in &base.terms {
            let m = moved.term(name).unwrap();
            prop_assert!((t.value - m).abs() <= 1e-9 * t.value.abs().max(1e-300), "{name}");
        }
    }

    #[test]
    fn quotient_is_dilation_invariant(lambda in 0.2..5.0f64, kappa in 0.6..2.0f64, delta in 0.05..0.3f64) {
        let o = VerifyOptions::default();
        let hp = HardyParams::new(4.0, 2.0, 1.0, 2.0, 1.0);
        let unit = rayleigh(&hp, &make_boundary_family(kappa, delta, 1.0, 1.0).unwrap(), RayleighKind::UnifiedHardy, &o).unwrap();
        let f = make_boundary_family(kappa, delta, 1.0, lambda).unwrap();
        let big = rayleigh(&hp.with_radius(lambda), &f, RayleighKind::UnifiedHardy, &o).unwrap();
        prop_assert!((unit.value - big.value).abs() <= 1e-9 * unit.value);
    }

    #[test]
    fn quotients_never_beat_the_constant(
        off in 0.01..1.0f64,
        delta in 0.001..0.3f64,
        b in 1.5..3.0f64,
        p in prop::sample::select(vec![1.5, 2.0, 3.0]),
    ) {
        let o = VerifyOptions::default();
        let hp = HardyParams::new(4.0, p, 1.0, b, 1.0);
        let f = make_boundary_family((b - 1.0) / p + off, delta, 1.0, 1.0).unwrap();
        let q = rayleigh(&hp, &f, RayleighKind::UnifiedHardy, &o).unwrap();
        let target = RayleighKind::UnifiedHardy.sharp_constant(&hp);
        prop_assert!(q.value >= target - 10.0 * q.err_est - 1e-9 * target, "{} < {target}", q.value);
    }
}

#[test]
fn beta_integrals_are_exact() {
    let grid = [0.5, 1.0, 2.5, 4.0];
    let cfg = QuadConfig {
        rel_tol: 1e-12,
        ..QuadConfig::default()
    };
    for &x in &grid {
        for &y in &grid {
            let hints = SingularHints {
                origin_exponent: Some(x - 1.0),
                boundary_exponent: Some(y - 1.0),
                split_points: vec![],
            };
            let f = |_: f64, from_lo: f64, from_hi: f64| Ok(from_lo.powf(x - 1.0) * from_hi.powf(y - 1.0));
            let v = integrate_gaps(&f, 0.0, 1.0, &hints, &cfg).unwrap();
            let exact = statrs::function::beta::beta(x, y);
            assert!((v.value - exact).abs() <= 1e-10 * exact, "B({x},{y}): {} vs {exact}", v.value);
        }
    }
}

#[test]
fn critical_psi_coefficient_is_exactly_zero() {
    let hp = HardyParams::new(4.0, 2.0, 1.0, 2.0, 3.0);
    let r = verify_high_l2(&hp, &bump_r(0.2, 0.8, 1.0), &VerifyOptions::default()).unwrap();
    assert!(r.passed());
    assert_eq!(r.term("psi_1"), Some(0.0));
}

#[test]
fn moments_match_polar_decomposition() {
    let m = GroupModel::euclidean(3).unwrap();
    let cfg = McConfig { samples: 200_000, seed: 5 };
    let sphere = m.sphere_measure(cfg).unwrap();
    for s in [0.0, 1.0, 2.0] {
        for radius in [1.0, 1.5] {
            let est = m.mc_ball_moment(s, radius, cfg).unwrap();
            let exact = sphere * radius.powf(3.0 + s) / (3.0 + s);
            assert!((est.estimate - exact).abs() <= 3.0 * est.stderr, "s={s} R={radius}");
        }
    }
}

#[test]
fn anisotropic_moments_scale_homogeneously() {
    let m = GroupModel::new(vec![1.0, 2.0], NormKind::AnisotropicPower { exponent: 4 }).unwrap();
    let cfg = McConfig { samples: 200_000, seed: 9 };
    let s = 0.5;
    let a = m.mc_ball_moment(s, 1.0, cfg).unwrap();
    let b = m.mc_ball_moment(s, 2.0, McConfig { seed: 10, ..cfg }).unwrap();
    let ratio = b.estimate / a.estimate;
    let sigma = ratio * ((a.stderr / a.estimate).powi(2) + (b.stderr / b.estimate).powi(2)).sqrt();
    assert!((ratio - 2f64.powf(m.q() + s)).abs() <= 3.0 * sigma);
}
