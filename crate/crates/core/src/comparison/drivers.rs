use super::report::{Exceptional, Report, StieltjesCheck};
use super::stieltjes::stieltjes_integral;
use super::sweep::sweep_target;
use super::{check_vanishing, evaluate_con, solution_scale, ComparisonProblem, Verdict};
use crate::coeffs::{sample_grid, CoefficientSet, GaugeFunction, PiecewiseFunction};
use crate::error::{Error, Result};
use crate::solver::{find_zeros, solve_ivp, QuasiSolution};

/// Evaluate the certificate and test its conclusion on a sweep of target
/// solutions. In the non-strict case also check whether `ũ e^F` is itself
/// a target solution (the exceptional multiple).
pub fn compare(prob: &ComparisonProblem, tilde_u: &impl QuasiSolution, sweep_n: usize, tol: f64) -> Result<Report> {
    let certificate = evaluate_con(prob, tilde_u, tol)?;
    let mut report = Report::new(certificate);
    attach_sweep(&mut report, prob, tilde_u, sweep_n, tol)?;
    Ok(report)
}

/// Run the target sweep for `report.certificate` and record whether its
/// outcome agrees with the certified conclusion.
pub(crate) fn attach_sweep(
    report: &mut Report,
    prob: &ComparisonProblem,
    tilde_u: &impl QuasiSolution,
    sweep_n: usize,
    tol: f64,
) -> Result<()> {
    let verdict = report.certificate.verdict;
    let sweep = sweep_target(prob.target(), sweep_n, tol)?;
    if verdict == Verdict::WeakNonpositive || !sweep.all_have_zeros() {
        report.exceptional = Some(exceptional_multiple(prob, tilde_u, tol)?);
    }
    report.consistent = match verdict {
        Verdict::StrictlyNegative => sweep.all_have_zeros(),
        Verdict::WeakNonpositive => sweep.all_have_zeros() || report.exceptional.is_some_and(|e| e.is_multiple),
        Verdict::Positive | Verdict::Inconclusive => true,
    };
    if !report.consistent {
        report.notes.push(format!(
            "numerical inconsistency: certificate is {} but {} swept solution(s) have no zero",
            verdict,
            sweep.zero_free.len()
        ));
    }
    report.sweep = Some(sweep);
    Ok(())
}

/// Solve the target equation through the data of `φ = ũ e^F` at the
/// midpoint and measure how far the result is from `φ`.
fn exceptional_multiple(prob: &ComparisonProblem, tilde_u: &impl QuasiSolution, tol: f64) -> Result<Exceptional> {
    let (a, b) = prob.interval();
    let target = prob.target();
    let phi = |x: f64| {
        let [u, v] = tilde_u.state(x);
        let ef = prob.f().value(x).exp();
        let k = prob.tilde().eval(x);
        let t = target.eval(x);
        let w = v / k.p;
        let shift = prob.f().deriv(x) + t.s - k.s;
        [u * ef, t.p * ef * (w + shift * u)]
    };
    let xm = 0.5 * (a + b);
    let [u0, v0] = phi(xm);
    let sol = solve_ivp(target, xm, u0, v0, tol)?;
    let mut dev: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 0..=64 {
        let x = a + (b - a) * i as f64 / 64.0;
        let expected = phi(x)[0];
        dev = dev.max((sol.u(x) - expected).abs());
        scale = scale.max(expected.abs());
    }
    let residual = if scale > 0.0 { dev / scale } else { f64::INFINITY };
    Ok(Exceptional {
        residual,
        is_multiple: residual <= (1e3 * tol).max(1e-6),
    })
}

fn sample_points(tilde: &CoefficientSet, target: &CoefficientSet) -> Vec<f64> {
    let (a, b) = tilde.interval();
    let mut cuts = tilde.breakpoints().to_vec();
    cuts.extend_from_slice(target.breakpoints());
    sample_grid(a, b, &cuts, 64)
}

fn check_equal(f: &PiecewiseFunction, g: &PiecewiseFunction, what: &str, xs: &[f64], tol: f64) -> Result<()> {
    for &x in xs {
        let (u, v) = (f.eval(x), g.eval(x));
        if (u - v).abs() > tol * (1.0 + u.abs().max(v.abs())) {
            return Err(Error::hypothesis(format!("{what}: {u} vs {v}"), x));
        }
    }
    Ok(())
}

/// Sturm-Picone comparison with drift terms: requires `r = s`, `r̃ = s̃`,
/// `0 < p <= p̃`, `q <= q̃` and `μ = p̃(s - s̃)e^{-2S}` non-decreasing, then
/// runs [`compare`] with `G = 2F = 2S̃ - 2S` and checks the `B` part
/// against `-∫ (ũ e^{S̃})² dμ`.
pub fn sturm_picone(
    tilde: &CoefficientSet,
    target: &CoefficientSet,
    tilde_u: &impl QuasiSolution,
    sweep_n: usize,
    tol: f64,
) -> Result<Report> {
    if tilde.interval() != target.interval() {
        return Err(Error::invalid("tilde and target problems must share the interval"));
    }
    if !tilde_u.coefficients().same_as(tilde) {
        return Err(Error::MismatchedCoefficients);
    }
    let xs = sample_points(tilde, target);
    check_equal(target.r(), target.s(), "r = s fails", &xs, tol)?;
    check_equal(tilde.r(), tilde.s(), "r~ = s~ fails", &xs, tol)?;
    for &x in &xs {
        let (t, k) = (target.eval(x), tilde.eval(x));
        if !(t.p <= k.p + tol * k.p.abs().max(1.0)) {
            return Err(Error::hypothesis(format!("p <= p~ fails: {} > {}", t.p, k.p), x));
        }
        if !(t.q <= k.q + tol * k.q.abs().max(1.0)) {
            return Err(Error::hypothesis(format!("q <= q~ fails: {} > {}", t.q, k.q), x));
        }
    }
    let mu = |x: f64| {
        let (t, k) = (target.eval(x), tilde.eval(x));
        k.p * (t.s - k.s) * (-2.0 * target.big_s(x)).exp()
    };
    let mu_left = |x: f64| {
        let pt = tilde.p().eval_left(x);
        (pt * (target.s().eval_left(x) - tilde.s().eval_left(x))) * (-2.0 * target.big_s(x)).exp()
    };
    let mut cuts = tilde.breakpoints().to_vec();
    cuts.extend_from_slice(target.breakpoints());
    for w in xs.windows(2) {
        if mu(w[1]) - mu(w[0]) < -tol {
            return Err(Error::hypothesis("mu is not non-decreasing", w[1]));
        }
    }
    for &c in &cuts {
        if mu(c) - mu_left(c) < -tol {
            return Err(Error::hypothesis("mu has a negative jump", c));
        }
    }

    let (a, b) = tilde.interval();
    let f_deriv = tilde.s().combine(target.s(), |ks, ts| ks.clone() - ts.clone())?;
    let f = GaugeFunction::new(f_deriv, 0.0)?;
    let g = f.scaled(2.0)?;
    let prob = ComparisonProblem::new(tilde.clone(), target.clone(), f, g)?;
    let mut report = compare(&prob, tilde_u, sweep_n, tol)?;

    let v2 = |x: f64| {
        let v = tilde_u.u(x) * tilde.big_s(x).exp();
        v * v
    };
    let integral = stieltjes_integral(v2, mu, mu_left, a, b, &cuts, tol)?;
    let stieltjes = crate::coeffs::Estimate {
        value: -integral.value,
        error: integral.error,
    };
    let quadrature = report.certificate.breakdown.b_part;
    let slack = 10.0 * tol + stieltjes.error + quadrature.error + report.certificate.err;
    let agrees = (stieltjes.value - quadrature.value).abs() <= slack;
    if !agrees {
        report.consistent = false;
        report.notes.push("B part disagrees with the Stieltjes form".into());
    }
    report.stieltjes = Some(StieltjesCheck {
        stieltjes,
        quadrature,
        agrees,
    });
    Ok(report)
}

/// Separation evidence: zeros of `u` and the weighted Wronskian with `ũ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SeparationEvidence {
    pub zeros: Vec<f64>,
    /// `W(x0) e^{S(x0) - R(x0)}` at the midpoint, `W = ũ v - u ṽ`.
    pub weighted_wronskian: f64,
    pub is_multiple: bool,
}

/// Separation of zeros: `ũ` vanishes at `a` and `b`, `u` solves the same
/// equation; then `u` vanishes in `(a, b)` or is a multiple of `ũ`. The
/// certificate with `F = 0`, `G = S - R` is identically zero.
pub fn separation(c: &CoefficientSet, tilde_u: &impl QuasiSolution, u: &impl QuasiSolution, tol: f64) -> Result<Report> {
    if !tilde_u.coefficients().same_as(c) || !u.coefficients().same_as(c) {
        return Err(Error::MismatchedCoefficients);
    }
    let tilde_scale = check_vanishing(tilde_u, tol)?;
    let u_scale = solution_scale(u);
    if !(u_scale > 0.0) {
        return Err(Error::TrivialFunction);
    }
    let (a, b) = c.interval();
    let f = GaugeFunction::zero(a, b)?;
    let g_deriv = c.s().combine(c.r(), |s, r| s.clone() - r.clone())?;
    let g = GaugeFunction::new(g_deriv, 0.0)?;
    let prob = ComparisonProblem::new(c.clone(), c.clone(), f, g)?;
    let certificate = evaluate_con(&prob, tilde_u, tol)?;

    let zeros = find_zeros(u, a, b, tol).locations();
    let xm = 0.5 * (a + b);
    let [tu, tv] = tilde_u.state(xm);
    let [uu, uv] = u.state(xm);
    let weighted_wronskian = (tu * uv - uu * tv) * (c.big_s(xm) - c.big_r(xm)).exp();
    let limit = 100.0 * tol.max(u.accuracy()).max(tilde_u.accuracy()) * tilde_scale.max(1.0) * u_scale.max(1.0);
    let is_multiple = weighted_wronskian.abs() <= limit;
    let mut report = Report::new(certificate);
    report.consistent = !zeros.is_empty() || is_multiple;
    if !report.consistent {
        report.notes.push("u has no zero and is not a multiple of u~".into());
    }
    report.separation = Some(SeparationEvidence {
        zeros,
        weighted_wronskian,
        is_multiple,
    });
    Ok(report)
}
