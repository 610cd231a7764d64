mod common;

use std::f64::consts::PI;

use common::{expr, SmoothParams};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sturmcmp::coeffs::{integrate_vec, CoefficientSet, GaugeFunction, QuadOptions};
use sturmcmp::comparison::{
    compare, evaluate_con, gauge_identity_residual, quadratic_form, quadratic_form_of, separation, sturm_picone,
    ComparisonProblem, Verdict,
};
use sturmcmp::search::shoot_vanishing;
use sturmcmp::solver::{solve_ivp, ClosedForm, QuasiSolution};

fn harmonic(q: f64) -> CoefficientSet {
    CoefficientSet::constant(0.0, PI, 1.0, q, 0.0, 0.0).unwrap()
}

fn sine(c: &CoefficientSet) -> ClosedForm {
    ClosedForm::new(c, expr("sin(x)"), expr("cos(x)")).unwrap()
}

fn s_minus_r(c: &CoefficientSet) -> GaugeFunction {
    GaugeFunction::new(c.s().combine(c.r(), |s, r| s.clone() - r.clone()).unwrap(), 0.0).unwrap()
}

#[test]
fn classical_sturm_is_strict() {
    let tilde = harmonic(-1.0);
    let r = compare(&ComparisonProblem::ungauged(tilde.clone(), harmonic(-4.0)).unwrap(), &sine(&tilde), 32, 1e-10)
        .unwrap();
    // -3 ∫ sin² = -3π/2
    assert!((r.certificate.value + 1.5 * PI).abs() < 1e-10);
    assert_eq!(r.certificate.verdict, Verdict::StrictlyNegative);
    assert!(r.sweep.unwrap().all_have_zeros());
    assert!(r.consistent);
}

#[test]
fn self_comparison_is_weak_and_exceptional() {
    let tilde = harmonic(-1.0);
    let r = compare(&ComparisonProblem::ungauged(tilde.clone(), tilde.clone()).unwrap(), &sine(&tilde), 32, 1e-10)
        .unwrap();
    assert!(r.certificate.value.abs() <= r.certificate.err.max(1e-14));
    assert_eq!(r.certificate.verdict, Verdict::WeakNonpositive);
    assert!(r.exceptional.unwrap().is_multiple);
    assert!(r.consistent);
}

#[test]
fn larger_q_is_positive() {
    let tilde = harmonic(-1.0);
    let r = compare(&ComparisonProblem::ungauged(tilde.clone(), harmonic(-0.5)).unwrap(), &sine(&tilde), 32, 1e-10)
        .unwrap();
    assert!((r.certificate.value - 0.25 * PI).abs() < 1e-10);
    assert_eq!(r.certificate.verdict, Verdict::Positive);
    assert!(!r.sweep.unwrap().all_have_zeros());
}

#[test]
fn quadratic_forms() {
    let c = harmonic(-1.0);
    let e = quadratic_form_of(&sine(&c), 1e-12).unwrap();
    assert!(e.value.abs() < 1e-12);
    // φ = x(π - x): ∫ (π - 2x)² - x²(π - x)² = π³/3 - π⁵/30
    let e = quadratic_form(&c, |x| (x * (PI - x), PI - 2.0 * x), 1e-12).unwrap();
    let exact = PI.powi(3) / 3.0 - PI.powi(5) / 30.0;
    assert!((e.value - exact).abs() < 1e-11, "{} vs {exact}", e.value);
    assert!(quadratic_form(&c, |x| (1.0 + x, 1.0), 1e-12).is_err());
}

#[test]
fn sturm_picone_with_drift() {
    let tilde = CoefficientSet::from_exprs(0.0, PI, expr("1"), expr("-1"), expr("0"), expr("0")).unwrap();
    let target =
        CoefficientSet::from_exprs(0.0, PI, expr("0.9"), expr("-1.5"), expr("0.05*x"), expr("0.05*x")).unwrap();
    let r = sturm_picone(&tilde, &target, &sine(&tilde), 32, 1e-10).unwrap();
    assert_eq!(r.certificate.verdict, Verdict::StrictlyNegative);
    let s = r.stieltjes.unwrap();
    assert!(s.agrees, "{s:?}");
    assert!(r.consistent);
}

#[test]
fn sturm_picone_rejects_larger_q() {
    let tilde = harmonic(-1.0);
    let e = sturm_picone(&tilde, &harmonic(-0.5), &sine(&tilde), 8, 1e-10).unwrap_err();
    assert!(e.is_hypothesis_violation());
}

#[test]
fn separation_certificate_vanishes() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..4 {
        let c = SmoothParams::random(&mut rng).build_vanishing();
        let tilde_u = shoot_vanishing(&c, 1e-11).unwrap();
        let (a, _) = c.interval();
        let u = solve_ivp(&c, a, 1.0, 0.3, 1e-11).unwrap();
        let r = separation(&c, &tilde_u, &u, 1e-10).unwrap();
        assert!(r.certificate.value.abs() <= 1e-8, "{}", r.certificate.value);
        let ev = r.separation.unwrap();
        assert_eq!(ev.zeros.len(), 1);
        assert!(r.consistent);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn gauge_identity_vanishes(seed in any::<u64>(), slope in -2.0f64..2.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = SmoothParams::random(&mut rng).build_vanishing();
        let u = shoot_vanishing(&c, 1e-11).unwrap();
        let (a, b) = c.interval();
        let g = GaugeFunction::linear(a, b, slope).unwrap();
        let e = gauge_identity_residual(&c, &u, &g, 1e-10).unwrap();
        prop_assert!(e.value.abs() <= 1e-7, "{}", e.value);
    }

    /// Same `p, r, s`, `F = 0`, `G = S - R`: the certificate is
    /// `∫ (q - q̃) e^{S-R} ũ²`.
    #[test]
    fn same_leading_terms_reduce_to_potential_difference(seed in any::<u64>(), delta in -1.0f64..1.0) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = SmoothParams::random(&mut rng);
        let tilde = params.build_vanishing();
        let (a, b) = tilde.interval();
        let target = SmoothParams { lambda: params.lambda + delta, ..params }.build(a, b);
        let u = shoot_vanishing(&tilde, 1e-11).unwrap();
        let prob = ComparisonProblem::new(
            tilde.clone(),
            target.clone(),
            GaugeFunction::zero(a, b).unwrap(),
            s_minus_r(&tilde),
        )
        .unwrap();
        let cert = evaluate_con(&prob, &u, 1e-11).unwrap();
        let [oracle] = integrate_vec(
            |x| {
                let w = (tilde.big_s(x) - tilde.big_r(x)).exp();
                let uu = u.u(x);
                [-delta * w * uu * uu]
            },
            &tilde.domain(),
            &QuadOptions::default(),
        )
        .unwrap();
        let scale = oracle.value.abs().max(1.0);
        prop_assert!((cert.value - oracle.value).abs() <= 1e-8 * scale, "{} vs {}", cert.value, oracle.value);
        if delta > 0.05 {
            prop_assert_eq!(cert.verdict, Verdict::StrictlyNegative);
        }
    }
}
