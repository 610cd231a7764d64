//! Schrödinger equations `-u'' + v u = 0` with potentials `v = V'` given by
//! a square-integrable antiderivative `V`. Such an equation is the
//! quasi-derivative equation with `p = 1`, `q = -V²`, `r = s = -V`, whose
//! quasi-derivative is `u' - V u`. Point masses of `v` are jumps of `V`.

use crate::coeffs::{integrate, sample_grid, CoefficientSet, Domain, Estimate, Expr, PiecewiseFunction, QuadOptions};
use crate::comparison::{
    attach_sweep, check_vanishing, evaluate_con, solution_scale, stieltjes_integral, Certificate, ComparisonProblem,
    Report, StieltjesCheck,
};
use crate::error::{Error, Result};
use crate::solver::QuasiSolution;

/// A point mass `weight · δ_at` of the potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jump {
    pub at: f64,
    pub weight: f64,
}

#[derive(Debug, Clone)]
pub struct PotentialAntiderivative {
    v: PiecewiseFunction,
    jumps: Vec<Jump>,
}

fn jump_tol(f: &PiecewiseFunction, x: f64) -> f64 {
    1e-12 * (1.0 + f.eval(x).abs().max(f.eval_left(x).abs()))
}

impl PotentialAntiderivative {
    /// Checks that `V²` is integrable and that the declared jumps are
    /// exactly the discontinuities of `V`.
    pub fn new(v: PiecewiseFunction, jumps: Vec<Jump>) -> Result<Self> {
        let (a, b) = v.interval();
        for j in &jumps {
            if !(j.at > a && j.at < b) {
                return Err(Error::invalid(format!("jump at {} is outside ({a}, {b})", j.at)));
            }
            if !v.breakpoints().contains(&j.at) {
                return Err(Error::invalid(format!("jump at {} is not a breakpoint of V", j.at)));
            }
            let actual = v.eval(j.at) - v.eval_left(j.at);
            if (actual - j.weight).abs() > jump_tol(&v, j.at) {
                return Err(Error::invalid(format!(
                    "jump at {} has weight {} but V jumps by {actual}",
                    j.at, j.weight
                )));
            }
        }
        for &c in v.breakpoints() {
            let actual = v.eval(c) - v.eval_left(c);
            if actual.abs() > jump_tol(&v, c) && !jumps.iter().any(|j| j.at == c) {
                return Err(Error::invalid(format!("V jumps by {actual} at {c} but no jump is declared there")));
            }
        }
        let domain = Domain::new(a, b)
            .with_breakpoints(v.breakpoints())
            .with_singular(v.singular());
        let opts = QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-6,
            max_intervals: 4000,
        };
        if integrate(|x| v.eval(x).powi(2), &domain, &opts).is_err() {
            return Err(Error::NotIntegrable {
                which: "V²".into(),
                a,
                b,
            });
        }
        Ok(PotentialAntiderivative { v, jumps })
    }

    /// `V` from one expression; the jump positions become breakpoints.
    pub fn from_expr(a: f64, b: f64, v: Expr, jumps: Vec<Jump>) -> Result<Self> {
        let at: Vec<f64> = jumps.iter().map(|j| j.at).collect();
        PotentialAntiderivative::new(PiecewiseFunction::from_expr(a, b, v, &at)?, jumps)
    }

    pub fn v(&self) -> &PiecewiseFunction {
        &self.v
    }

    pub fn jumps(&self) -> &[Jump] {
        &self.jumps
    }

    pub fn interval(&self) -> (f64, f64) {
        self.v.interval()
    }
}

/// `(p, q, r, s) = (1, -V², -V, -V)`.
pub fn build_coefficients(v: &PotentialAntiderivative) -> Result<CoefficientSet> {
    let (a, b) = v.interval();
    let f = v.v();
    let p = PiecewiseFunction::constant(a, b, 1.0)?;
    let q = f.map(|e| -(e.clone() * e.clone()));
    let s = f.map(|e| -e.clone());
    CoefficientSet::new(p, q, s.clone(), s)
}

/// Outcome of [`measure_nonneg`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureCheck {
    pub nonneg: bool,
    /// First point where `μ = Ṽ - V` decreases.
    pub witness: Option<f64>,
}

/// Whether `μ = Ṽ - V` is non-decreasing, checked at its jumps and between
/// consecutive points of a grid with `samples` cells per piece.
pub fn measure_nonneg(tilde_v: &PotentialAntiderivative, v: &PotentialAntiderivative, samples: usize) -> Result<MeasureCheck> {
    if tilde_v.interval() != v.interval() {
        return Err(Error::invalid("potentials must share the interval"));
    }
    let mu = tilde_v.v().combine(v.v(), |x, y| x.clone() - y.clone())?;
    let (a, b) = mu.interval();
    let xs = sample_grid(a, b, mu.breakpoints(), samples.max(1));
    let scale = xs.iter().fold(1.0f64, |m, &x| m.max(mu.eval(x).abs()));
    let slack = 1e-12 * scale;
    let jump_at = |x: f64| mu.breakpoints().contains(&x) && mu.eval(x) - mu.eval_left(x) < -slack;
    let mut prev = a;
    for &x in &xs {
        if jump_at(x) {
            return Ok(MeasureCheck {
                nonneg: false,
                witness: Some(x),
            });
        }
        if x > prev && mu.eval_left(x) - mu.eval(prev) < -slack {
            return Ok(MeasureCheck {
                nonneg: false,
                witness: Some(x),
            });
        }
        prev = x;
    }
    Ok(MeasureCheck {
        nonneg: true,
        witness: None,
    })
}

/// `|u'(c+) - u'(c-) - w u(c)|` for a solution of the equation built from
/// `V`, with `u' = v - s u` evaluated from each side.
pub fn jump_residual(potential: &PotentialAntiderivative, sol: &impl QuasiSolution, jump: Jump) -> f64 {
    let [u, qd] = sol.state(jump.at);
    let s_right = -potential.v().eval(jump.at);
    let s_left = -potential.v().eval_left(jump.at);
    let right = qd - s_right * u;
    let left = qd - s_left * u;
    (right - left - jump.weight * u).abs()
}

/// Both coefficient sets of a distributional comparison.
#[derive(Debug, Clone)]
pub struct DistributionalProblem {
    tilde_v: PotentialAntiderivative,
    v: PotentialAntiderivative,
    tilde: CoefficientSet,
    target: CoefficientSet,
}

impl DistributionalProblem {
    pub fn new(tilde_v: PotentialAntiderivative, v: PotentialAntiderivative) -> Result<Self> {
        if tilde_v.interval() != v.interval() {
            return Err(Error::invalid("potentials must share the interval"));
        }
        let tilde = build_coefficients(&tilde_v)?;
        let target = build_coefficients(&v)?;
        Ok(DistributionalProblem {
            tilde_v,
            v,
            tilde,
            target,
        })
    }

    pub fn tilde(&self) -> &CoefficientSet {
        &self.tilde
    }

    pub fn target(&self) -> &CoefficientSet {
        &self.target
    }

    pub fn tilde_potential(&self) -> &PotentialAntiderivative {
        &self.tilde_v
    }

    pub fn potential(&self) -> &PotentialAntiderivative {
        &self.v
    }
}

/// The certificate `-∫ ũ² dμ`, `μ = Ṽ - V`, with point masses summed
/// exactly, cross-checked against the quadrature certificate with
/// `F = G = 0`, plus the sweep verification of [`crate::comparison::compare`].
pub fn distributional_compare(
    prob: &DistributionalProblem,
    tilde_u: &impl QuasiSolution,
    sweep_n: usize,
    tol: f64,
) -> Result<Report> {
    if !tilde_u.coefficients().same_as(prob.tilde()) {
        return Err(Error::MismatchedCoefficients);
    }
    let check = measure_nonneg(&prob.tilde_v, &prob.v, 64)?;
    if let Some(x) = check.witness {
        return Err(Error::hypothesis("V~ - V is not non-decreasing", x));
    }
    check_vanishing(tilde_u, tol)?;

    let mu = prob.tilde_v.v().combine(prob.v.v(), |x, y| x.clone() - y.clone())?;
    let (a, b) = mu.interval();
    let u2 = |x: f64| tilde_u.u(x).powi(2);
    let integral = stieltjes_integral(u2, |x| mu.eval(x), |x| mu.eval_left(x), a, b, mu.breakpoints(), tol)?;

    let grid = sample_grid(a, b, mu.breakpoints(), 64);
    let mut variation: f64 = mu
        .breakpoints()
        .iter()
        .map(|&c| (mu.eval(c) - mu.eval_left(c)).abs())
        .sum();
    for w in grid.windows(2) {
        variation += (mu.eval_left(w[1]) - mu.eval(w[0])).abs();
    }
    let scale = solution_scale(tilde_u);
    let value = -integral.value;
    let err = integral.error + 2.0 * scale * tilde_u.accuracy() * variation + 16.0 * f64::EPSILON * value.abs();

    let ungauged = ComparisonProblem::ungauged(prob.tilde.clone(), prob.target.clone())?;
    let quad = evaluate_con(&ungauged, tilde_u, tol)?;
    let certificate = Certificate::from_parts(value, err, quad.breakdown);
    let mut report = Report::new(certificate);
    attach_sweep(&mut report, &ungauged, tilde_u, sweep_n, tol)?;

    let stieltjes = Estimate { value, error: err };
    let quadrature = Estimate {
        value: quad.value,
        error: quad.err,
    };
    let agrees = (value - quad.value).abs() <= 10.0 * tol + err + quad.err;
    if !agrees {
        report.consistent = false;
        report.notes.push("quadrature certificate disagrees with the Stieltjes form".into());
    }
    report.stieltjes = Some(StieltjesCheck {
        stieltjes,
        quadrature,
        agrees,
    });
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::{Func, Expr};
    use crate::comparison::Verdict;
    use crate::solver::solve_ivp;

    fn step(c: f64) -> Expr {
        Expr::call(Func::Step, Expr::x() - Expr::num(c))
    }

    fn tent_potential() -> PotentialAntiderivative {
        PotentialAntiderivative::from_expr(0.0, 1.0, Expr::num(-4.0) * step(0.5), vec![Jump { at: 0.5, weight: -4.0 }])
            .unwrap()
    }

    #[test]
    fn free_equation() {
        let v = PotentialAntiderivative::from_expr(0.0, 1.0, Expr::num(0.0), vec![]).unwrap();
        let c = build_coefficients(&v).unwrap();
        let e = c.eval(0.3);
        assert_eq!((e.p, e.q, e.r, e.s), (1.0, 0.0, 0.0, 0.0));
    }

    #[test]
    fn tent_solution() {
        let v = tent_potential();
        let c = build_coefficients(&v).unwrap();
        assert_eq!(c.s().eval(0.75), 4.0);
        assert_eq!(c.q().eval(0.75), -16.0);
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-12).unwrap();
        for x in [0.1, 0.25, 0.5, 0.7, 0.9, 1.0] {
            assert!((sol.u(x) - x.min(1.0 - x)).abs() < 1e-12, "x = {x}");
        }
        assert!(jump_residual(&v, &sol, v.jumps()[0]) <= 1e-12);
    }

    #[test]
    fn undeclared_jump_is_rejected() {
        assert!(PotentialAntiderivative::from_expr(0.0, 1.0, step(0.5), vec![]).is_err());
        assert!(PotentialAntiderivative::from_expr(0.0, 1.0, step(0.5), vec![Jump { at: 0.5, weight: 2.0 }]).is_err());
    }

    #[test]
    fn measure_sign() {
        let v = tent_potential();
        assert!(measure_nonneg(&v, &v, 16).unwrap().nonneg);
        let lower = PotentialAntiderivative::from_expr(
            0.0,
            1.0,
            Expr::num(-4.0) * step(0.5) - step(0.25),
            vec![Jump { at: 0.25, weight: -1.0 }, Jump { at: 0.5, weight: -4.0 }],
        )
        .unwrap();
        assert!(measure_nonneg(&v, &lower, 16).unwrap().nonneg);
        let bad = measure_nonneg(&lower, &v, 16).unwrap();
        assert_eq!(bad.witness, Some(0.25));
    }

    #[test]
    fn tent_certificate() {
        let tv = tent_potential();
        let v = PotentialAntiderivative::from_expr(
            0.0,
            1.0,
            Expr::num(-4.0) * step(0.5) - step(0.25),
            vec![Jump { at: 0.25, weight: -1.0 }, Jump { at: 0.5, weight: -4.0 }],
        )
        .unwrap();
        let prob = DistributionalProblem::new(tv, v).unwrap();
        let u = solve_ivp(prob.tilde(), 0.0, 0.0, 1.0, 1e-12).unwrap();
        let r = distributional_compare(&prob, &u, 64, 1e-10).unwrap();
        assert_eq!(r.certificate.value, -1.0 / 16.0);
        assert_eq!(r.certificate.verdict, Verdict::StrictlyNegative);
        assert!(r.consistent, "{}", r.table());
    }
}
