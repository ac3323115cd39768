mod common;

use std::f64::consts::PI;

use common::{factorial, lanczos_lgamma, rel};
use proptest::prelude::*;
use volprod::analysis::{check_bounds, dlogm_dp_series, dm_dp_fd};
use volprod::engine::{eval_log_product, log_upper_bound_sum, TailMode, TruncationPolicy};
use volprod::identities::{
    corollary1_check, corollary2_check_corrected, mn2_closed, Verdict,
};
use volprod::special::{gamma_limit, log_gamma, pochhammer_log};
use volprod::volume::{
    ball_volume, gamma_np_factorized, h_func, holder_conjugate, log_p_gamma_side, mprod_gamma,
    mprod_product, p_product, s_product, BallSpec,
};

fn policy() -> TruncationPolicy {
    TruncationPolicy::default()
}

fn cfg(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(cfg(256))]

    #[test]
    fn log_gamma_recurrence(x in 1e-3f64..1e3) {
        let lhs = log_gamma(x + 1.0).unwrap() - log_gamma(x).unwrap();
        let scale = 1.0f64.max(log_gamma(x + 1.0).unwrap().abs());
        prop_assert!((lhs - x.ln()).abs() <= 1e-13 * scale);
    }

    #[test]
    fn log_gamma_matches_lanczos(x in 1e-3f64..1e3) {
        let a = log_gamma(x).unwrap();
        let b = lanczos_lgamma(x);
        prop_assert!((a - b).abs() <= 1e-12 * 1.0f64.max(b.abs()), "x={x}: {a} vs {b}");
    }

    #[test]
    fn pochhammer_is_gamma_ratio(z in 0.01f64..50.0, k in 0u64..200) {
        let direct = pochhammer_log(z, k).unwrap();
        let via_gamma = log_gamma(z + k as f64).unwrap() - log_gamma(z).unwrap();
        prop_assert!((direct - via_gamma).abs() <= 1e-11 * 1.0f64.max(direct.abs()));
    }

    #[test]
    fn conjugate_exponent_involution(p in 1.0001f64..1e3) {
        let pair = holder_conjugate(p).unwrap();
        let back = pair.conjugate();
        prop_assert!(rel(back.q(), p) < 1e-12);
        prop_assert!((pair.inv_p() + pair.inv_q() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn h_reflection_and_gamma_form(p in 1.001f64..200.0) {
        let q = holder_conjugate(p).unwrap().q();
        let h = h_func(p).unwrap();
        prop_assert!(rel(h, h_func(q).unwrap()) < 1e-13);
        let oracle = (lanczos_lgamma(1.0 + 1.0 / p) + lanczos_lgamma(1.0 + 1.0 / q)).exp();
        prop_assert!(rel(h, oracle) < 1e-12);
        prop_assert!(h > 0.0 && h <= 1.0 + 1e-15);
    }

    #[test]
    fn ball_volumes_multiply_to_mprod(n in 1u32..30, p in 1.0f64..50.0) {
        let q = holder_conjugate(p).unwrap().q();
        let a = ball_volume(&BallSpec::new(n, p).unwrap()).unwrap();
        let b = ball_volume(&BallSpec::new(n, q).unwrap()).unwrap();
        prop_assert!(rel(a * b, mprod_gamma(n, p).unwrap()) < 1e-12);
    }

    #[test]
    fn gamma_route_bounds(n in 1u32..13, p in 1.0f64..100.0) {
        let r = check_bounds(n, p).unwrap();
        prop_assert!(r.passed, "{:?}", r.failures);
    }

    #[test]
    fn upper_bound_on_log_p(x in 0.05f64..20.0, a in 0.0f64..0.95) {
        let lp = log_p_gamma_side(x, a).unwrap();
        let ub = log_upper_bound_sum(a, x, 10_000).unwrap();
        prop_assert!(lp <= ub + 1e-12 * 1.0f64.max(lp.abs()), "{lp} > {ub}");
    }
}

proptest! {
    #![proptest_config(cfg(48))]

    #[test]
    fn product_route_matches_gamma_route(n in 1u32..13, p in 1.02f64..60.0) {
        let prod = mprod_product(n, p, &policy()).unwrap();
        let g = mprod_gamma(n, p).unwrap();
        prop_assert!(rel(prod.value, g) <= 1e-7, "n={n} p={p}");
    }

    #[test]
    fn conjugate_symmetry_of_product_route(n in 1u32..10, p in 1.05f64..20.0) {
        let q = holder_conjugate(p).unwrap().q();
        let a = mprod_product(n, p, &policy()).unwrap().value;
        let b = mprod_product(n, q, &policy()).unwrap().value;
        prop_assert!(rel(a, b) <= 1e-8);
        prop_assert!(rel(mprod_gamma(n, p).unwrap(), mprod_gamma(n, q).unwrap()) <= 1e-13);
    }

    #[test]
    fn p_product_bracket_contains_truth(x in 0.1f64..10.0, a in 0.0f64..0.95) {
        let e = p_product(x, a, &policy()).unwrap();
        let truth = log_p_gamma_side(x, a).unwrap();
        prop_assert!(e.contains_log(truth), "x={x} a={a}: {:?} vs {truth}", e.error_bracket);
        prop_assert!(rel(e.value, truth.exp()) <= 1e-7);
    }

    #[test]
    fn factorization_reproduces_gamma(n in 2u32..9, p in 1.1f64..6.0) {
        let f = gamma_np_factorized(n, p, &policy()).unwrap();
        prop_assert!(rel(f, lanczos_lgamma(n as f64 / p).exp()) <= 1e-6);
    }

    #[test]
    fn refinement_tightens_sine_product(x in 0.05f64..0.95, mode in prop_oneof![
        Just(TailMode::None), Just(TailMode::FirstOrder), Just(TailMode::Richardson)
    ]) {
        let term = |k: u64| {
            let kf = k as f64;
            (-(x * x) / (kf * kf)).ln_1p()
        };
        let truth = ((PI * x).sin() / (PI * x)).ln();
        let coarse = TruncationPolicy::new(4_096, 1e-15, mode).unwrap();
        let a = eval_log_product(term, &coarse).unwrap();
        let b = eval_log_product(term, &coarse.with_max_terms(16_384)).unwrap();
        prop_assert!(a.contains_log(truth) && b.contains_log(truth));
        prop_assert!(b.bracket_width() <= a.bracket_width() + 1e-15);
        prop_assert!((b.log_value - truth).abs() <= (a.log_value - truth).abs() + 1e-15);
    }

    #[test]
    fn series_derivative_matches_finite_difference(n in 2u32..9, p in 1.05f64..4.0) {
        let series = dlogm_dp_series(n, p, &policy()).unwrap();
        let fd = dm_dp_fd(n, p, None).unwrap() / mprod_gamma(n, p).unwrap();
        prop_assert!((series - fd).abs() <= 1e-6f64.max(1e-4 * series.abs()), "{series} vs {fd}");
    }
}

#[test]
fn gamma_limit_error_rate() {
    // error ~ c(z)/K with c(z) = z(z-1)/2 exactly to leading order
    for i in 1..=50 {
        let z = i as f64 - 0.5;
        let truth = lanczos_lgamma(z).exp();
        let k = 100_000u64;
        let err = gamma_limit(z, k).unwrap() / truth - 1.0;
        let c = -err * k as f64;
        let leading = z * (z - 1.0) / 2.0;
        assert!(
            (c - leading).abs() <= 0.05 * leading.abs().max(0.01),
            "z={z}: c={c} vs {leading}"
        );
        if z <= 14.0 {
            assert!(c.abs() <= 100.0);
        }
    }
}

#[test]
fn s_n_is_inverse_factorial() {
    for n in 1..=10u32 {
        let s = s_product(n, &policy()).unwrap();
        assert!(rel(s.value * factorial(n), 1.0) <= 1e-6, "n={n}");
    }
}

#[test]
fn product_route_near_one_approaches_lower_bound() {
    // The relative gap to 4^n/n! is linear in eps with a slope that grows
    // with n, so the 1e-2 band at eps = 1e-3 only covers n <= 6.
    for n in 1..=10u32 {
        let lower = 4f64.powi(n as i32) / factorial(n);
        let gap = |eps: f64| {
            let p = 1.0 + eps;
            let v = mprod_product(n, p, &policy()).unwrap().value;
            assert!(rel(v, mprod_gamma(n, p).unwrap()) <= 1e-7, "n={n} eps={eps}");
            v / lower - 1.0
        };
        let (g1, g2, g3) = (gap(1e-3), gap(5e-4), gap(2.5e-4));
        if n <= 6 {
            assert!(g1.abs() <= 1e-2, "n={n}: {g1}");
        }
        if n >= 2 {
            let (r1, r2) = (g1 / g2, g2 / g3);
            assert!((r1 - 2.0).abs() < 0.1 && (r2 - 2.0).abs() < 0.05, "n={n}: {r1} {r2}");
        } else {
            assert_eq!(g1, 0.0);
        }
    }
}

#[test]
fn consistency_triangle() {
    let h2 = h_func(2.0).unwrap();
    for m in 1..=6u32 {
        let n = 2 * m;
        let lhs = corollary1_check(m, &policy()).unwrap().lhs;
        let target = mn2_closed(n).unwrap()
            / (4f64.powi(n as i32) * h2.powi(2 * n as i32 - 2));
        assert!(rel(lhs * lhs, target) <= 1e-6, "m={m}");
    }
}

#[test]
fn verified_verdicts_survive_refinement() {
    let fine = policy().with_max_terms(4 * policy().max_terms);
    for m in 1..=8u32 {
        assert_eq!(corollary1_check(m, &policy()).unwrap().verdict, Verdict::Verified);
        assert_eq!(corollary1_check(m, &fine).unwrap().verdict, Verdict::Verified);
    }
    for m in 1..=6u32 {
        assert_eq!(corollary2_check_corrected(m, &fine).unwrap().verdict, Verdict::Verified);
    }
}

#[test]
fn lemma_grid_against_lanczos() {
    for &x in &[0.3, 0.5, 1.0, 2.7, 8.0] {
        for &a in &[0.0, 0.25, 0.5, 0.9] {
            let oracle = lanczos_lgamma(1.0 - a) + lanczos_lgamma(x + a) - lanczos_lgamma(x);
            let v = p_product(x, a, &policy()).unwrap().value;
            assert!(rel(v, oracle.exp()) <= 1e-7, "x={x} a={a}");
        }
    }
    assert!(rel(p_product(2.7, 0.9, &policy()).unwrap().value, 22.892_638_743_982_59) <= 1e-7);
}

#[test]
fn factorization_grid() {
    for n in 2..=8u32 {
        for &p in &[1.25, 1.5, 2.0, 3.0] {
            let f = gamma_np_factorized(n, p, &policy()).unwrap();
            assert!(rel(f, lanczos_lgamma(n as f64 / p).exp()) <= 1e-6);
        }
    }
}

#[test]
fn reference_values() {
    assert!(rel(mprod_gamma(2, 1.5).unwrap(), 9.673_596_609_249_16) < 1e-13);
    assert!(rel(mprod_gamma(2, 1.2).unwrap(), 9.068_996_821) < 1e-9);
    assert!(rel(h_func(1.5).unwrap(), 0.806_133_050_770_763_5) < 1e-14);
    assert!(rel(dm_dp_fd(2, 1.5, None).unwrap(), 1.052_498_244_671_579) < 1e-7);
    assert!(rel(dlogm_dp_series(2, 1.5, &policy()).unwrap(), 0.108_801_130_250_279_38) < 1e-8);
}
