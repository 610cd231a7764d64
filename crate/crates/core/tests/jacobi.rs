use proptest::prelude::*;
use sturmcmp::comparison::Verdict;
use sturmcmp::jacobi::{
    changes_sign, crossing, dcon_value, discrete_compare, embed, embed_on, embedded_certificate, embedded_solution,
    solve_recurrence, JacobiProblem, JacobiSolution,
};
use sturmcmp::search::shoot_vanishing;
use sturmcmp::solver::QuasiSolution;

#[test]
fn period_four_by_hand() {
    // u_{n+1} = -u_{n-1} when α = 1, β = 0
    let p = JacobiProblem::from_beta(0, 8, vec![1.0; 8], vec![0.0; 7]).unwrap();
    let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
    assert_eq!(u.values(), &[0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0, -1.0, 0.0]);
    for n in 1..8 {
        assert_eq!(p.residual(&u, n), 0.0);
    }
}

#[test]
fn discrete_instance_every_target_solution_changes_sign() {
    let tilde = JacobiProblem::new(0, 3, vec![1.0; 3], vec![-2.0; 2]).unwrap();
    let target = JacobiProblem::new(0, 3, vec![1.0; 3], vec![-3.0; 2]).unwrap();
    let u = solve_recurrence(&tilde, 0.0, 1.0).unwrap();
    assert_eq!(dcon_value(&tilde, &target, &u).unwrap(), -1.0);
    // oracle: with v = -3 the recurrence is u_{n+1} = -u_n - u_{n-1}, so a
    // solution is (c, s, -c - s, c); it keeps its sign only if c, s and
    // -c - s share a sign, which is impossible unless c = s = 0
    for j in 0..360 {
        let t = std::f64::consts::PI * j as f64 / 360.0;
        let w = solve_recurrence(&target, t.cos(), t.sin()).unwrap();
        assert!(changes_sign(&w), "θ = {t}");
    }
    let r = discrete_compare(&tilde, &target, &u, 128, 1e-12).unwrap();
    assert_eq!(r.verdict, Verdict::StrictlyNegative);
    assert_eq!(r.sign_changing, 128);
}

#[test]
fn smaller_v_gives_nonpositive_certificate() {
    let tilde = JacobiProblem::new(2, 7, vec![1.0, 0.5, 2.0, 1.0, 1.5], vec![-2.5, -1.0, -4.0, -1.0]).unwrap();
    let u = solve_recurrence(&tilde, 0.0, 1.0).unwrap();
    let mut end = u.values().to_vec();
    // force the end condition by replacing the last value with a crossing
    let n = end.len();
    end[n - 1] = -end[n - 2];
    let u = JacobiSolution::from_values(2, end);
    let target = JacobiProblem::new(2, 7, tilde.alphas().to_vec(), tilde.vs().iter().map(|v| v - 0.5).collect()).unwrap();
    // u is no longer a solution at the last index, but dcon only needs the
    // end sign condition
    let d = dcon_value(&tilde, &target, &u).unwrap();
    let expected: f64 = -(0.5) * u.values()[1..n - 1].iter().map(|x| x * x).sum::<f64>();
    assert!((d - expected).abs() < 1e-14);
}

#[test]
fn embedding_crossing_cases() {
    let u = JacobiSolution::from_values(0, vec![0.0, 1.0, 0.0, -1.0]);
    assert_eq!(crossing(&u).unwrap(), 2.0);
    let u = JacobiSolution::from_values(0, vec![0.0, 1.0, 2.0, 0.0]);
    assert_eq!(crossing(&u).unwrap(), 3.0);
    let u = JacobiSolution::from_values(0, vec![0.0, 1.0, 3.0, -1.0]);
    assert_eq!(crossing(&u).unwrap(), 2.75);
    let u = JacobiSolution::from_values(0, vec![0.0, 1.0, 3.0, 1.0]);
    assert!(crossing(&u).is_err());
}

#[test]
fn free_embedding_is_linear() {
    let p = JacobiProblem::new(0, 3, vec![1.0; 3], vec![0.0; 2]).unwrap();
    let c = embed_on(&p, 3.0).unwrap();
    for x in [0.5, 1.5, 2.5] {
        let e = c.eval(x);
        assert_eq!((e.p, e.q, e.r, e.s), (1.0, 0.0, 0.0, 0.0));
    }
}

#[test]
fn shooting_on_embedding_matches_recurrence() {
    let alpha = vec![2.0, 1.0, 1.0, 1.0];
    let tilde = JacobiProblem::from_beta(0, 4, alpha, vec![0.0; 3]).unwrap();
    let u = solve_recurrence(&tilde, 0.0, 1.0).unwrap();
    let (c, b) = embed(&tilde, &u).unwrap();
    let shot = shoot_vanishing(&c, 1e-12).unwrap();
    // (u, v)(N0) = (0, 1) means u(N0 + 1) = 1/α_{N0}
    let scale = tilde.alpha(0);
    for n in 0..=(b.floor() as i64) {
        assert!((shot.u(n as f64) * scale - u.at(n)).abs() < 1e-9, "n = {n}");
    }
}

fn problem(n0: i64, alpha: Vec<f64>, v: Vec<f64>) -> JacobiProblem {
    let n1 = n0 + alpha.len() as i64;
    JacobiProblem::new(n0, n1, alpha, v).unwrap()
}

/// A random tilde problem whose last `v` is adjusted so that the solution
/// from `(0, 1)` satisfies `ũ_{N1-1} ũ_{N1} <= 0` with `ũ_{N1} = -t ũ_{N1-1}`.
fn tilde_with_end_condition(n0: i64, alpha: Vec<f64>, mut v: Vec<f64>, t: f64) -> Option<(JacobiProblem, JacobiSolution)> {
    let p = problem(n0, alpha.clone(), v.clone());
    let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
    let m = p.n1() - 1;
    let (prev, last) = (u.at(m - 1), u.at(m));
    if last.abs() < 1e-3 {
        return None;
    }
    let want = -t * last;
    // want = last + (α_{m-1}(last - prev) + v_m last)/α_m
    let k = v.len() - 1;
    v[k] = ((want - last) * p.alpha(m) - p.alpha(m - 1) * (last - prev)) / last;
    let p = problem(n0, alpha, v);
    let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
    Some((p, u))
}

fn coeff_rows(len: std::ops::Range<usize>) -> impl Strategy<Value = (Vec<f64>, Vec<f64>)> {
    len.prop_flat_map(|n| (prop::collection::vec(0.5f64..2.0, n), prop::collection::vec(-1.5f64..1.5, n - 1)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn embedded_solution_matches_recurrence(
        n0 in -5i64..5, (alpha, v) in coeff_rows(2..13), t in 0.0f64..std::f64::consts::PI,
    ) {
        let p = problem(n0, alpha, v);
        let u = solve_recurrence(&p, t.cos(), t.sin()).unwrap();
        let c = embed_on(&p, p.n1() as f64).unwrap();
        let sol = embedded_solution(&c, &u, 1e-13).unwrap();
        let scale = u.values().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for n in p.n0()..=p.n1() {
            prop_assert!((sol.u(n as f64) - u.at(n)).abs() <= 1e-9 * scale, "n = {n}");
        }
    }

    #[test]
    fn discrete_and_embedded_certificates_agree(
        n0 in -5i64..5, (alpha, v) in coeff_rows(2..13), t in 0.0f64..2.0,
        (dalpha, dv) in coeff_rows(12..13),
    ) {
        let Some((tilde, u)) = tilde_with_end_condition(n0, alpha, v, t) else { return Ok(()) };
        let len = tilde.alphas().len();
        let target = problem(
            n0,
            tilde.alphas().iter().zip(&dalpha).map(|(a, d)| a * d).collect(),
            tilde.vs().iter().zip(&dv).map(|(v, d)| v + d).take(len - 1).collect(),
        );
        let d = dcon_value(&tilde, &target, &u).unwrap();
        let b = crossing(&u).unwrap();
        let con = embedded_certificate(&tilde, &target, &u, b, 1e-13).unwrap();
        let scale = u.values().iter().fold(1.0f64, |m, x| m.max(x * x));
        prop_assert!((d - con.value).abs() <= 1e-8 * scale, "dcon {d} vs con {}", con.value);
    }

    #[test]
    fn interior_zero_forces_sign_change(
        n0 in -5i64..5, (alpha, mut v) in coeff_rows(3..13), pick in 0usize..100, t in 0.1f64..3.0,
    ) {
        let len = alpha.len();
        // choose an interior index m in (N0, N1) and make u_m = 0
        let m = 1 + pick % (len - 1);
        let init = if m == 1 { (t.cos(), 0.0) } else { (t.cos(), t.sin()) };
        if m >= 2 {
            let p = problem(n0, alpha.clone(), v.clone());
            let u = solve_recurrence(&p, init.0, init.1).unwrap();
            let k = n0 + m as i64 - 1;
            let (prev, last) = (u.at(k - 1), u.at(k));
            if last.abs() < 1e-6 {
                return Ok(());
            }
            // 0 = last + (α_{k-1}(last - prev) + v_k last)/α_k
            v[m - 2] = (-last * p.alpha(k) - p.alpha(k - 1) * (last - prev)) / last;
        }
        let p = problem(n0, alpha, v);
        let u = solve_recurrence(&p, init.0, init.1).unwrap();
        prop_assert!(u.at(n0 + m as i64).abs() < 1e-9);
        prop_assert!(changes_sign(&u));
    }
}
