//! One pass/fail line per acceptance criterion. Run with
//! `cargo test --test acceptance -- --nocapture` to see the lines.

mod common;

use std::f64::consts::PI;
use std::time::{Duration, Instant};

use common::{expr, SmoothParams};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sturmcmp::coeffs::{Expr, Func, GaugeFunction};
use sturmcmp::comparison::{compare, gauge_identity_residual, ComparisonProblem, Verdict};
use sturmcmp::distributional::{
    build_coefficients, distributional_compare, jump_residual, DistributionalProblem, Jump, PotentialAntiderivative,
};
use sturmcmp::jacobi::{
    crossing, dcon_value, embed_on, embedded_certificate, embedded_solution, solve_recurrence, JacobiProblem,
    JacobiSolution,
};
use sturmcmp::search::{leighton_driver, shoot_vanishing};
use sturmcmp::solver::{find_zeros, solve_ivp, wronskian_drift, QuasiSolution};

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(id: u32, name: &str, tolerance: &str, budget: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let out = f();
    let elapsed = start.elapsed();
    let in_time = budget.map_or(true, |b| elapsed <= b);
    let pass = out.pass && in_time;
    let budget_text = budget.map_or(String::new(), |b| format!(", budget {:.0?}", b));
    println!(
        "criterion {id} {}: {name} [tol {tolerance}] {} ({elapsed:.2?}{budget_text})",
        if pass { "PASS" } else { "FAIL" },
        out.detail
    );
    pass
}

fn leighton_closed_form() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut slowest = Duration::ZERO;
    for k in [0.0, 1.0, PI / 2.0, 2.0] {
        let t = Instant::now();
        let r = leighton_driver(k, 0.0, 64, 1e-10).unwrap();
        slowest = slowest.max(t.elapsed());
        worst = worst.max((r.certificate.value - PI * (2.0 * k - PI) / 4.0).abs());
    }
    Outcome {
        pass: worst <= 1e-8 && slowest < Duration::from_secs(1),
        detail: format!("max error {worst:.2e}, slowest k {slowest:.2?}"),
    }
}

fn leighton_improvement() -> Outcome {
    let r = leighton_driver(1.672, 0.6, 64, 1e-10).unwrap();
    let sweep = r.sweep.as_ref().unwrap();
    Outcome {
        pass: r.certificate.verdict == Verdict::StrictlyNegative && sweep.all_have_zeros(),
        detail: format!(
            "certificate {:.6e} {}, {}/{} swept solutions vanish",
            r.certificate.value,
            r.certificate.verdict.name(),
            sweep.with_zero,
            sweep.total()
        ),
    }
}

fn leighton_sharpness() -> Outcome {
    let r = leighton_driver(1.676, 0.6, 64, 1e-10).unwrap();
    let sweep = r.sweep.as_ref().unwrap();
    Outcome {
        pass: r.certificate.verdict != Verdict::StrictlyNegative && !sweep.zero_free.is_empty(),
        detail: format!(
            "certificate {:.6e} {}, {} zero-free solutions, first at angle {:?}",
            r.certificate.value,
            r.certificate.verdict.name(),
            sweep.zero_free.len(),
            sweep.zero_free.first()
        ),
    }
}

fn gauge_identity(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    for _ in 0..20 {
        let c = SmoothParams::random(rng).build_vanishing();
        let u = shoot_vanishing(&c, 1e-11).unwrap();
        let (a, b) = c.interval();
        for _ in 0..5 {
            let g = GaugeFunction::linear(a, b, rng.gen_range(-2.0..2.0)).unwrap();
            let e = gauge_identity_residual(&c, &u, &g, 1e-10).unwrap();
            worst = worst.max(e.value.abs());
        }
    }
    Outcome {
        pass: worst <= 1e-7,
        detail: format!("100 residuals, max {worst:.2e}"),
    }
}

fn random_jacobi(rng: &mut ChaCha8Rng) -> Option<(JacobiProblem, JacobiProblem, JacobiSolution)> {
    let len = rng.gen_range(2..=12);
    let n0 = rng.gen_range(-5..5);
    let alpha: Vec<f64> = (0..len).map(|_| rng.gen_range(0.5..2.0)).collect();
    let mut v: Vec<f64> = (0..len - 1).map(|_| rng.gen_range(-1.5..1.5)).collect();
    // choose the last v so that the tilde solution crosses zero in the last cell
    let p = JacobiProblem::new(n0, n0 + len as i64, alpha.clone(), v.clone()).ok()?;
    let u = solve_recurrence(&p, 0.0, 1.0).ok()?;
    let m = p.n1() - 1;
    let (prev, last) = (u.at(m - 1), u.at(m));
    if last.abs() < 1e-3 {
        return None;
    }
    let want = -rng.gen_range(0.0..2.0) * last;
    let k = v.len() - 1;
    v[k] = ((want - last) * p.alpha(m) - p.alpha(m - 1) * (last - prev)) / last;
    let tilde = JacobiProblem::new(n0, n0 + len as i64, alpha.clone(), v.clone()).ok()?;
    let u = solve_recurrence(&tilde, 0.0, 1.0).ok()?;
    let scale = u.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let u = JacobiSolution::from_values(n0, u.values().iter().map(|x| x / scale).collect());
    let target = JacobiProblem::new(
        n0,
        n0 + len as i64,
        alpha.iter().map(|a| a * rng.gen_range(0.5..2.0)).collect(),
        v.iter().map(|x| x + rng.gen_range(-1.5..1.5)).collect(),
    )
    .ok()?;
    Some((tilde, target, u))
}

fn jacobi_fidelity(rng: &mut ChaCha8Rng) -> Outcome {
    let (mut node_err, mut cert_err): (f64, f64) = (0.0, 0.0);
    let mut done = 0;
    while done < 50 {
        let Some((tilde, target, u)) = random_jacobi(rng) else { continue };
        done += 1;
        // a free solution of the target, normalised to max |w| = 1
        let t = rng.gen_range(0.0..PI);
        let w = solve_recurrence(&target, t.cos(), t.sin()).unwrap();
        let scale = w.values().iter().fold(0.0f64, |m, x| m.max(x.abs()));
        let w = JacobiSolution::from_values(w.n0(), w.values().iter().map(|x| x / scale).collect());
        let c = embed_on(&target, target.n1() as f64).unwrap();
        let sol = embedded_solution(&c, &w, 1e-13).unwrap();
        for n in target.n0()..=target.n1() {
            node_err = node_err.max((sol.u(n as f64) - w.at(n)).abs());
        }
        let d = dcon_value(&tilde, &target, &u).unwrap();
        let b = crossing(&u).unwrap();
        let con = embedded_certificate(&tilde, &target, &u, b, 1e-13).unwrap();
        cert_err = cert_err.max((d - con.value).abs());
    }
    Outcome {
        pass: node_err <= 1e-9 && cert_err <= 1e-8,
        detail: format!("50 problems (solutions scaled to max 1), node error {node_err:.2e}, |dcon - con| {cert_err:.2e}"),
    }
}

fn dense_sign_changes(u: &impl QuasiSolution, a: f64, b: f64, n: usize) -> usize {
    let xs: Vec<f64> = (1..n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    xs.windows(2).filter(|w| u.u(w[0]) * u.u(w[1]) < 0.0).count()
}

fn separation_interlacing(rng: &mut ChaCha8Rng) -> Outcome {
    let mut failures = 0;
    let mut pairs = 0;
    for _ in 0..20 {
        let c = SmoothParams::random(rng).build(0.0, 8.0);
        let t = rng.gen_range(0.2..PI - 0.2);
        let u1 = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-11).unwrap();
        let u2 = solve_ivp(&c, 0.0, t.cos(), t.sin(), 1e-11).unwrap();
        let z1 = find_zeros(&u1, 0.0, 8.0, 1e-12).locations();
        let z2 = find_zeros(&u2, 0.0, 8.0, 1e-12).locations();
        if z1.len() != dense_sign_changes(&u1, 0.0, 8.0, 20_000)
            || z2.len() != dense_sign_changes(&u2, 0.0, 8.0, 20_000)
        {
            failures += 1;
            continue;
        }
        for (outer, inner) in [(&z1, &z2), (&z2, &z1)] {
            for w in outer.windows(2) {
                pairs += 1;
                if inner.iter().filter(|&&z| z > w[0] && z < w[1]).count() != 1 {
                    failures += 1;
                }
            }
        }
    }
    Outcome {
        pass: failures == 0 && pairs > 0,
        detail: format!("{pairs} consecutive-zero intervals, {failures} failures"),
    }
}

fn step(c: f64) -> Expr {
    Expr::call(Func::Step, Expr::x() - Expr::num(c))
}

fn distributional_tent() -> Outcome {
    let tent =
        PotentialAntiderivative::from_expr(0.0, 1.0, Expr::num(-4.0) * step(0.5), vec![Jump { at: 0.5, weight: -4.0 }])
            .unwrap();
    let target = PotentialAntiderivative::from_expr(
        0.0,
        1.0,
        Expr::num(-4.0) * step(0.5) - step(0.25),
        vec![Jump { at: 0.25, weight: -1.0 }, Jump { at: 0.5, weight: -4.0 }],
    )
    .unwrap();
    let u = shoot_vanishing(&build_coefficients(&tent).unwrap(), 1e-12).unwrap();
    let residual = jump_residual(&tent, &u, tent.jumps()[0]);
    let prob = DistributionalProblem::new(tent, target).unwrap();
    let u = shoot_vanishing(prob.tilde(), 1e-12).unwrap();
    let r = distributional_compare(&prob, &u, 64, 1e-10).unwrap();
    let sweep_ok = r.sweep.as_ref().is_some_and(|s| s.all_have_zeros());
    Outcome {
        pass: residual <= 1e-12 && r.certificate.value == -1.0 / 16.0 && sweep_ok,
        detail: format!(
            "jump residual {residual:.2e}, certificate {:e}, sweep passes {sweep_ok}",
            r.certificate.value
        ),
    }
}

fn conservation(rng: &mut ChaCha8Rng) -> Outcome {
    let tol = 1e-10;
    let mut drift: f64 = 0.0;
    let mut self_worst: f64 = 0.0;
    let mut self_ok = true;
    for _ in 0..20 {
        let params = SmoothParams::random(rng);
        let c = params.build(0.0, 6.0);
        let t1 = rng.gen_range(0.0..PI);
        let t2 = rng.gen_range(0.0..PI);
        let a = solve_ivp(&c, 0.0, t1.cos(), t1.sin(), tol).unwrap();
        let b = solve_ivp(&c, 0.0, t2.cos(), t2.sin(), tol).unwrap();
        drift = drift.max(wronskian_drift(&a, &b, 400).unwrap());

        let cv = params.build_vanishing();
        let u = shoot_vanishing(&cv, 1e-11).unwrap();
        let r = compare(&ComparisonProblem::ungauged(cv.clone(), cv).unwrap(), &u, 4, tol).unwrap();
        self_worst = self_worst.max(r.certificate.value.abs());
        self_ok &= r.certificate.value.abs() <= r.certificate.err.max(f64::MIN_POSITIVE);
    }
    // the harmonic problem from the command-line samples as well
    let h = sturmcmp::coeffs::CoefficientSet::from_exprs(0.0, PI, expr("1"), expr("-1"), expr("0"), expr("0")).unwrap();
    let u = shoot_vanishing(&h, 1e-11).unwrap();
    let r = compare(&ComparisonProblem::ungauged(h.clone(), h).unwrap(), &u, 4, tol).unwrap();
    self_ok &= r.certificate.value.abs() <= r.certificate.err.max(f64::MIN_POSITIVE);
    Outcome {
        pass: drift <= 100.0 * tol && self_ok,
        detail: format!("Wronskian drift {drift:.2e} (limit {:.0e}), self-comparison max |con| {self_worst:.2e}", 100.0 * tol),
    }
}

#[test]
fn acceptance() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_2026);
    let results = [
        check(1, "Leighton closed form at c = 0", "1e-8", None, leighton_closed_form),
        check(2, "Leighton k = 1.672, c = 0.6 certifies", "verdict band", Some(Duration::from_secs(5)), leighton_improvement),
        check(3, "Leighton k = 1.676, c = 0.6 is sharp", "verdict band", Some(Duration::from_secs(10)), leighton_sharpness),
        check(4, "gauge identity, 20 problems x 5 gauges", "1e-7", None, || gauge_identity(&mut rng)),
        check(5, "Jacobi embedding fidelity, 50 problems", "1e-9 / 1e-8", None, || jacobi_fidelity(&mut rng)),
        check(6, "separation interlacing, 20 coefficient sets", "exact count", None, || {
            separation_interlacing(&mut rng)
        }),
        check(7, "distributional tent", "1e-12 / exact", None, distributional_tent),
        check(8, "conservation and self-comparison", "100 tol / err", None, || conservation(&mut rng)),
    ];
    let failed: Vec<usize> = results.iter().enumerate().filter(|(_, &p)| !p).map(|(i, _)| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
