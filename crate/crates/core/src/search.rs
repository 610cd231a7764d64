//! Finding ingredients for the certificate: endpoint-vanishing tilde
//! solutions, and a scan over the linear gauge family `G = c x`, `F = G/2`,
//! which removes the `A` and `B` terms when the leading coefficients agree.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::coeffs::{CoefficientSet, Expr, Func, GaugeFunction};
use crate::comparison::{compare, evaluate_con, solution_scale, Certificate, ComparisonProblem, Report};
use crate::error::{Error, Result};
use crate::solver::{solve_ivp, ClosedForm, QuasiSolution, Solution};

/// The solution with `(u, v)(a) = (0, 1)`, provided it also vanishes at
/// `b`. Starts from `b` instead when `a` is a singular endpoint.
///
/// The vanishing test is the one applied by
/// [`evaluate_con`](crate::comparison::evaluate_con), so a returned
/// solution is always accepted there.
pub fn shoot_vanishing(c: &CoefficientSet, tol: f64) -> Result<Solution> {
    let (a, b) = c.interval();
    let sing = c.singular();
    let (start, other) = match (sing.at_a, sing.at_b) {
        (false, _) => (a, b),
        (true, false) => (b, a),
        (true, true) => return Err(Error::SingularInitialPoint { x0: a }),
    };
    let sol = solve_ivp(c, start, 0.0, 1.0, tol)?;
    let scale = solution_scale(&sol).max(1.0);
    let residual = sol.u(other);
    if residual.abs() > 100.0 * tol.max(sol.accuracy()) * scale {
        return Err(Error::NoVanishingSolution { residual, scale });
    }
    Ok(sol)
}

/// Fixed ingredients of a gauge scan.
pub struct GaugeTemplate<'a, U: QuasiSolution> {
    pub tilde: &'a CoefficientSet,
    pub target: &'a CoefficientSet,
    pub tilde_u: &'a U,
}

impl<U: QuasiSolution> GaugeTemplate<'_, U> {
    /// The problem with `G = c x`, `F = c x / 2`.
    pub fn problem(&self, c: f64) -> Result<ComparisonProblem> {
        let (a, b) = self.tilde.interval();
        let g = GaugeFunction::linear(a, b, c)?;
        let f = GaugeFunction::linear(a, b, 0.5 * c)?;
        ComparisonProblem::new(self.tilde.clone(), self.target.clone(), f, g)
    }

    pub fn certificate(&self, c: f64, tol: f64) -> Result<Certificate> {
        evaluate_con(&self.problem(c)?, self.tilde_u, tol)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaugeScan {
    /// The grid, in increasing `c`.
    pub table: Vec<(f64, Certificate)>,
    pub best_c: f64,
    pub best: Certificate,
}

pub const SCAN_CSV_HEADER: &str = "c,value,err,verdict";

impl GaugeScan {
    /// Grid rows followed by the refined optimum as the last record.
    pub fn csv(&self) -> String {
        let mut out = format!("{SCAN_CSV_HEADER}\n");
        for (c, cert) in self.table.iter().chain(std::iter::once(&(self.best_c, self.best))) {
            let _ = writeln!(out, "{},{},{},{}", c, cert.value, cert.err, cert.verdict);
        }
        out
    }

    pub fn table_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{:>14}  {:>20}  {:>10}  verdict", "c", "value", "err");
        for (c, cert) in &self.table {
            let _ = writeln!(out, "{:>14.8}  {:>20.12e}  {:>10.3e}  {}", c, cert.value, cert.err, cert.verdict);
        }
        let _ = writeln!(
            out,
            "best c = {:.10}  value = {:.12e}  err = {:.3e}  {}",
            self.best_c, self.best.value, self.best.err, self.best.verdict
        );
        out
    }
}

/// Evaluate the certificate on `steps` equally spaced `c` in `[lo, hi]`,
/// then refine around the best grid point by golden-section search down to
/// width `tol`. Ties go to the smallest `c`.
pub fn linear_gauge_scan<U: QuasiSolution>(
    template: &GaugeTemplate<'_, U>,
    (lo, hi): (f64, f64),
    steps: usize,
    tol: f64,
) -> Result<GaugeScan> {
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::invalid(format!("scan range [{lo}, {hi}] is not an interval")));
    }
    let steps = if lo == hi { 1 } else { steps.max(2) };
    let grid: Vec<f64> = (0..steps)
        .map(|i| if steps == 1 { lo } else { lo + (hi - lo) * i as f64 / (steps - 1) as f64 })
        .collect();
    let table: Vec<(f64, Certificate)> = grid
        .par_iter()
        .map(|&c| template.certificate(c, tol).map(|cert| (c, cert)))
        .collect::<Result<_>>()?;
    let mut best = 0;
    for (i, (_, cert)) in table.iter().enumerate() {
        if cert.value < table[best].1.value {
            best = i;
        }
    }
    let (mut best_c, mut best_cert) = table[best];
    if steps > 1 {
        let left = grid[best.saturating_sub(1)];
        let right = grid[(best + 1).min(steps - 1)];
        let (c, cert) = golden_section(|c| template.certificate(c, tol), left, right, tol)?;
        if cert.value < best_cert.value {
            best_c = c;
            best_cert = cert;
        }
    }
    Ok(GaugeScan {
        table,
        best_c,
        best: best_cert,
    })
}

fn golden_section(f: impl Fn(f64) -> Result<Certificate>, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, Certificate)> {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut iterations = 0;
    while hi - lo > tol && iterations < 200 {
        iterations += 1;
        if f1.value <= f2.value {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1.value <= f2.value { (x1, f1) } else { (x2, f2) })
}

/// Leighton's example on `(0, π)`: tilde `-u'' - u = 0` with `ũ = sin`,
/// target `-u'' + (k - 1 - x) u = 0`.
pub fn leighton_coefficients(k: f64) -> Result<(CoefficientSet, CoefficientSet)> {
    let tilde = CoefficientSet::constant(0.0, PI, 1.0, -1.0, 0.0, 0.0)?;
    let zero = Expr::num(0.0);
    let target = CoefficientSet::from_exprs(
        0.0,
        PI,
        Expr::num(1.0),
        Expr::num(k - 1.0) - Expr::x(),
        zero.clone(),
        zero,
    )?;
    Ok((tilde, target))
}

/// `ũ = sin x`, `ṽ = cos x` on the tilde problem.
pub fn leighton_tilde_solution(tilde: &CoefficientSet) -> Result<ClosedForm> {
    ClosedForm::new(tilde, Expr::call(Func::Sin, Expr::x()), Expr::call(Func::Cos, Expr::x()))
}

/// Leighton's example with `G = c x`, `F = c x / 2`: the certificate is
/// `∫_0^π (k - x + c²/4) e^{cx} sin² x dx`. Runs the sweep with `sweep_n`
/// directions.
pub fn leighton_driver(k: f64, c: f64, sweep_n: usize, tol: f64) -> Result<Report> {
    let (tilde, target) = leighton_coefficients(k)?;
    let u = leighton_tilde_solution(&tilde)?;
    let template = GaugeTemplate {
        tilde: &tilde,
        target: &target,
        tilde_u: &u,
    };
    compare(&template.problem(c)?, &u, sweep_n, tol)
}

/// The certificate of Leighton's example without the sweep.
pub fn leighton_certificate(k: f64, c: f64, tol: f64) -> Result<Certificate> {
    let (tilde, target) = leighton_coefficients(k)?;
    let u = leighton_tilde_solution(&tilde)?;
    GaugeTemplate {
        tilde: &tilde,
        target: &target,
        tilde_u: &u,
    }
    .certificate(c, tol)
}

/// The `k` at which Leighton's certificate with gauge parameter `c`
/// changes sign. The certificate is affine in `k`.
pub fn certificate_threshold(c: f64, tol: f64) -> Result<f64> {
    let v0 = leighton_certificate(0.0, c, tol)?.value;
    let v1 = leighton_certificate(1.0, c, tol)?.value;
    Ok(-v0 / (v1 - v0))
}

/// A bracket `[lo, hi]` around the oscillation threshold of
/// `-u'' + (k - 1 - x) u = 0` on `(0, π)`: the smallest `k` for which some
/// solution has no zero in `(0, π)`. That solution is the one vanishing at
/// `0`, so the threshold is the root of `k ↦ u_k(π)` for `u(0) = 0`,
/// `u'(0) = 1`.
pub fn oscillation_threshold(lo: f64, hi: f64, width: f64, tol: f64) -> Result<(f64, f64)> {
    let end = |k: f64| -> Result<f64> {
        let (_, target) = leighton_coefficients(k)?;
        Ok(solve_ivp(&target, 0.0, 0.0, 1.0, tol)?.u(PI))
    };
    let (mut lo, mut hi) = (lo, hi);
    let (f_lo, f_hi) = (end(lo)?, end(hi)?);
    if f_lo.signum() == f_hi.signum() {
        return Err(Error::invalid(format!(
            "u(π) has the same sign at k = {lo} and k = {hi}; no threshold bracketed"
        )));
    }
    while hi - lo > width {
        let mid = 0.5 * (lo + hi);
        if end(mid)?.signum() == f_lo.signum() {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok((lo, hi))
}
