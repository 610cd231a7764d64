//! The comparison certificate
//!
//! ```text
//! ∫ [A w² + B w ũ + C ũ²],   w = ũ' + s̃ũ = ṽ/p̃,
//! A = p e^{2F+S-R} - p̃ e^G
//! B = 2p(f+s-s̃) e^{2F+S-R} - p̃(g+r̃-s̃) e^G
//! C = (q + p(f+s-s̃)²) e^{2F+S-R} - q̃ e^G
//! ```
//!
//! for a tilde solution `ũ` vanishing at both ends. A non-positive value
//! forces every solution of the target equation to vanish inside `(a, b)`,
//! except (in the non-strict case) a multiple of `ũ e^F`.

mod drivers;
mod report;
mod stieltjes;
mod sweep;

pub(crate) use drivers::attach_sweep;
pub use drivers::{compare, separation, sturm_picone, SeparationEvidence};
pub use report::{Exceptional, Report, StieltjesCheck, REPORT_CSV_HEADER};
pub use stieltjes::stieltjes_integral;
pub use sweep::{sweep_target, SweepSummary};

use std::fmt;

use crate::coeffs::{integrate_vec, merge_breakpoints, CoefficientSet, Domain, Estimate, GaugeFunction, QuadOptions};
use crate::error::{Error, Result};
use crate::solver::QuasiSolution;

/// Two coefficient sets on one interval plus the gauge pair `(F, G)`.
#[derive(Debug, Clone)]
pub struct ComparisonProblem {
    tilde: CoefficientSet,
    target: CoefficientSet,
    f: GaugeFunction,
    g: GaugeFunction,
}

impl ComparisonProblem {
    pub fn new(tilde: CoefficientSet, target: CoefficientSet, f: GaugeFunction, g: GaugeFunction) -> Result<Self> {
        let i = tilde.interval();
        if target.interval() != i || f.interval() != i || g.interval() != i {
            return Err(Error::invalid(format!(
                "tilde problem, target problem and gauges must share [{}, {}]",
                i.0, i.1
            )));
        }
        Ok(ComparisonProblem { tilde, target, f, g })
    }

    /// `F = 0`, `G = 0`.
    pub fn ungauged(tilde: CoefficientSet, target: CoefficientSet) -> Result<Self> {
        let (a, b) = tilde.interval();
        ComparisonProblem::new(tilde, target, GaugeFunction::zero(a, b)?, GaugeFunction::zero(a, b)?)
    }

    pub fn tilde(&self) -> &CoefficientSet {
        &self.tilde
    }

    pub fn target(&self) -> &CoefficientSet {
        &self.target
    }

    pub fn f(&self) -> &GaugeFunction {
        &self.f
    }

    pub fn g(&self) -> &GaugeFunction {
        &self.g
    }

    pub fn interval(&self) -> (f64, f64) {
        self.tilde.interval()
    }

    /// Union of all breakpoints, and singular flags, as an integration
    /// domain.
    pub fn domain(&self) -> Domain {
        let (a, b) = self.interval();
        let cuts = merge_breakpoints(&[
            self.tilde.breakpoints(),
            self.target.breakpoints(),
            self.f.derivative().breakpoints(),
            self.g.derivative().breakpoints(),
        ]);
        Domain::new(a, b)
            .with_breakpoints(&cuts)
            .with_singular(self.tilde.singular().union(self.target.singular()))
    }

    /// `(A, B, C)` at `x`, right-continuous.
    pub fn abc(&self, x: f64) -> [f64; 3] {
        let t = self.target.eval(x);
        let k = self.tilde.eval(x);
        let f = self.f.deriv(x);
        let g = self.g.deriv(x);
        let big_f = self.f.value(x);
        let big_g = self.g.value(x);
        let w_target = (2.0 * big_f + self.target.big_s(x) - self.target.big_r(x)).exp();
        let w_tilde = big_g.exp();
        let shift = f + t.s - k.s;
        [
            t.p * w_target - k.p * w_tilde,
            2.0 * t.p * shift * w_target - k.p * (g + k.r - k.s) * w_tilde,
            (t.q + t.p * shift * shift) * w_target - k.q * w_tilde,
        ]
    }

    /// Absolute error of the exponential weights coming from the
    /// antiderivative tables.
    fn weight_error(&self) -> f64 {
        2.0 * self.f.error_bound()
            + self.target.s_antiderivative().error_bound()
            + self.target.r_antiderivative().error_bound()
            + self.g.error_bound()
    }
}

/// `A`, `B`, `C` after checking that `A/p̃²`, `B/p̃` and `C` are integrable.
#[derive(Debug, Clone)]
pub struct AbcCoefficients {
    problem: ComparisonProblem,
}

impl AbcCoefficients {
    pub fn eval(&self, x: f64) -> [f64; 3] {
        self.problem.abc(x)
    }

    pub fn a(&self, x: f64) -> f64 {
        self.eval(x)[0]
    }

    pub fn b(&self, x: f64) -> f64 {
        self.eval(x)[1]
    }

    pub fn c(&self, x: f64) -> f64 {
        self.eval(x)[2]
    }
}

pub fn abc_coefficients(prob: &ComparisonProblem) -> Result<AbcCoefficients> {
    let domain = prob.domain();
    let opts = QuadOptions {
        abs_tol: 1e-10,
        rel_tol: 1e-6,
        max_intervals: 4000,
    };
    let checks = integrate_vec(
        |x| {
            let [a, b, c] = prob.abc(x);
            let pt = prob.tilde.p().eval(x);
            [(a / (pt * pt)).abs(), (b / pt).abs(), c.abs()]
        },
        &domain,
        &opts,
    );
    if checks.is_err() {
        // name the offending coefficient
        for (i, which) in ["A/p̃²", "B/p̃", "C"].iter().enumerate() {
            let single = integrate_vec(
                |x| {
                    let v = prob.abc(x);
                    let pt = prob.tilde.p().eval(x);
                    [[v[0] / (pt * pt), v[1] / pt, v[2]][i].abs()]
                },
                &domain,
                &opts,
            );
            if single.is_err() {
                let (a, b) = prob.interval();
                return Err(Error::NotIntegrable {
                    which: (*which).into(),
                    a,
                    b,
                });
            }
        }
    }
    Ok(AbcCoefficients { problem: prob.clone() })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    /// `value + err < 0`.
    StrictlyNegative,
    /// `|value| <= err`.
    WeakNonpositive,
    /// The value could not be classified (non-finite result).
    Inconclusive,
    /// `value - err > 0`.
    Positive,
}

impl Verdict {
    pub fn classify(value: f64, err: f64) -> Verdict {
        if !(value.is_finite() && err.is_finite()) {
            Verdict::Inconclusive
        } else if value + err < 0.0 {
            Verdict::StrictlyNegative
        } else if value - err > 0.0 {
            Verdict::Positive
        } else if value.abs() <= err {
            Verdict::WeakNonpositive
        } else {
            Verdict::Inconclusive
        }
    }

    /// Whether the certificate is `<= 0` within its error.
    pub fn certifies(self) -> bool {
        matches!(self, Verdict::StrictlyNegative | Verdict::WeakNonpositive)
    }

    pub fn name(self) -> &'static str {
        match self {
            Verdict::StrictlyNegative => "StrictlyNegative",
            Verdict::WeakNonpositive => "WeakNonpositive",
            Verdict::Inconclusive => "Inconclusive",
            Verdict::Positive => "Positive",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// The three integrals `∫ A w²`, `∫ B w ũ`, `∫ C ũ²`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Breakdown {
    pub a_part: Estimate,
    pub b_part: Estimate,
    pub c_part: Estimate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Certificate {
    pub value: f64,
    /// Quadrature error plus the propagated uncertainty of `ũ` and of the
    /// antiderivative tables.
    pub err: f64,
    pub verdict: Verdict,
    pub breakdown: Breakdown,
}

impl Certificate {
    pub fn from_parts(value: f64, err: f64, breakdown: Breakdown) -> Certificate {
        Certificate {
            value,
            err,
            verdict: Verdict::classify(value, err),
            breakdown,
        }
    }
}

/// `max(|u|, |v|)` over the mesh of `sol`.
pub fn solution_scale(sol: &impl QuasiSolution) -> f64 {
    sol.mesh()
        .into_iter()
        .map(|x| {
            let [u, v] = sol.state(x);
            u.abs().max(v.abs())
        })
        .fold(0.0, f64::max)
}

/// Checks that `sol` is nontrivial and vanishes at both ends; returns its
/// scale.
pub fn check_vanishing(sol: &impl QuasiSolution, tol: f64) -> Result<f64> {
    let scale = solution_scale(sol);
    if !(scale > 0.0) {
        return Err(Error::TrivialFunction);
    }
    let (a, b) = sol.coefficients().interval();
    let limit = 100.0 * tol.max(sol.accuracy()) * scale.max(1.0);
    for (which, x) in [("left", a), ("right", b)] {
        let value = sol.u(x).abs();
        if !(value <= limit) {
            return Err(Error::EndpointNotVanishing { which, value, limit });
        }
    }
    Ok(scale)
}

fn quad_opts(tol: f64) -> QuadOptions {
    QuadOptions {
        abs_tol: tol,
        rel_tol: 0.0,
        max_intervals: 8000,
    }
}

/// Evaluate the certificate for `tilde_u`, a solution of the tilde equation
/// (a dense [`crate::solver::Solution`] or a validated
/// [`crate::solver::ClosedForm`]) vanishing at both ends.
pub fn evaluate_con(prob: &ComparisonProblem, tilde_u: &impl QuasiSolution, tol: f64) -> Result<Certificate> {
    if !tilde_u.coefficients().same_as(&prob.tilde) {
        return Err(Error::MismatchedCoefficients);
    }
    check_vanishing(tilde_u, tol)?;
    let delta = tilde_u.accuracy();
    let eta = prob.weight_error() + 16.0 * f64::EPSILON;
    let parts = integrate_vec(
        |x| {
            let [u, v] = tilde_u.state(x);
            let pt = prob.tilde.p().eval(x);
            let w = v / pt;
            let [a, b, c] = prob.abc(x);
            let (ta, tb, tc) = (a * w * w, b * w * u, c * u * u);
            let dw = delta / pt.abs();
            let propagated = 2.0 * (a * w).abs() * dw + b.abs() * (u.abs() * dw + w.abs() * delta) + 2.0 * (c * u).abs() * delta;
            [ta, tb, tc, ta + tb + tc, propagated, ta.abs() + tb.abs() + tc.abs()]
        },
        &prob.domain(),
        &quad_opts(tol),
    )?;
    let [a_part, b_part, c_part, total, propagated, magnitude] = parts;
    let err = total.error + propagated.value + eta * magnitude.value;
    Ok(Certificate::from_parts(
        total.value,
        err,
        Breakdown {
            a_part,
            b_part,
            c_part,
        },
    ))
}

/// `∫ e^{S-R} (p(φ' + sφ)² + qφ²)` for a trial function vanishing at both
/// ends. `phi(x)` returns `(φ(x), φ'(x) + s(x) φ(x))`.
pub fn quadratic_form(c: &CoefficientSet, phi: impl Fn(f64) -> (f64, f64), tol: f64) -> Result<Estimate> {
    let (a, b) = c.interval();
    let scale = (0..=64)
        .map(|i| {
            let (u, w) = phi(a + (b - a) * i as f64 / 64.0);
            u.abs().max(w.abs())
        })
        .fold(0.0, f64::max);
    if !(scale > 0.0) {
        return Err(Error::TrivialFunction);
    }
    let limit = 100.0 * tol * scale.max(1.0);
    for (which, x) in [("left", a), ("right", b)] {
        let value = phi(x).0.abs();
        if !(value <= limit) {
            return Err(Error::EndpointNotVanishing { which, value, limit });
        }
    }
    let [e] = integrate_vec(
        |x| {
            let (u, w) = phi(x);
            let k = c.eval(x);
            [(c.big_s(x) - c.big_r(x)).exp() * (k.p * w * w + k.q * u * u)]
        },
        &c.domain(),
        &quad_opts(tol),
    )?;
    Ok(e)
}

/// Quadratic form of a solution-like object, using `φ' + sφ = v/p`.
pub fn quadratic_form_of(sol: &impl QuasiSolution, tol: f64) -> Result<Estimate> {
    let c = sol.coefficients();
    quadratic_form(c, |x| (sol.u(x), sol.quasi_over_p(x)), tol)
}

/// `∫ e^G [p̃ w² + p̃(g + r̃ - s̃) w ũ + q̃ ũ²]`, which vanishes for every
/// tilde solution with zeros at both ends and every gauge `G`.
pub fn gauge_identity_residual(
    tilde: &CoefficientSet,
    tilde_u: &impl QuasiSolution,
    g: &GaugeFunction,
    tol: f64,
) -> Result<Estimate> {
    if !tilde_u.coefficients().same_as(tilde) {
        return Err(Error::MismatchedCoefficients);
    }
    if g.interval() != tilde.interval() {
        return Err(Error::invalid("gauge and coefficients live on different intervals"));
    }
    check_vanishing(tilde_u, tol)?;
    let domain = tilde.domain().with_breakpoints(g.derivative().breakpoints());
    let [e] = integrate_vec(
        |x| {
            let [u, v] = tilde_u.state(x);
            let k = tilde.eval(x);
            let w = v / k.p;
            let gd = g.deriv(x);
            [g.value(x).exp() * (k.p * w * w + k.p * (gd + k.r - k.s) * w * u + k.q * u * u)]
        },
        &domain,
        &quad_opts(tol),
    )?;
    Ok(e)
}
