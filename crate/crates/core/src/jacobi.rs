//! Jacobi difference equations
//!
//! ```text
//! -α_n (u_{n+1} - u_n) + α_{n-1} (u_n - u_{n-1}) + v_n u_n = 0,   N0 < n < N1,
//! ```
//!
//! equivalently `α_{n-1} u_{n-1} + β_n u_n + α_n u_{n+1} = 0` with
//! `v_n = -β_n - α_n - α_{n-1}`, and their embedding into a continuous
//! problem with piecewise-constant coefficients whose solutions are the
//! piecewise-linear interpolants of the sequences.

use std::f64::consts::PI;
use std::fmt::Write as _;

use rayon::prelude::*;

use crate::coeffs::{CoefficientSet, Expr, PiecewiseFunction};
use crate::comparison::{evaluate_con, Certificate, ComparisonProblem, Verdict};
use crate::error::{Error, Result};
use crate::solver::{solve_ivp, Solution};

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiProblem {
    n0: i64,
    n1: i64,
    /// `α_n` for `n = N0, …, N1-1`.
    alpha: Vec<f64>,
    /// `v_n` for `n = N0+1, …, N1-1`.
    v: Vec<f64>,
}

impl JacobiProblem {
    pub fn new(n0: i64, n1: i64, alpha: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if n1 - n0 < 2 {
            return Err(Error::invalid(format!("need N1 - N0 >= 2, got N0 = {n0}, N1 = {n1}")));
        }
        let len = (n1 - n0) as usize;
        if alpha.len() != len {
            return Err(Error::invalid(format!(
                "alpha must have {len} entries (indices {n0}..={}), got {}",
                n1 - 1,
                alpha.len()
            )));
        }
        if v.len() != len - 1 {
            return Err(Error::invalid(format!(
                "v must have {} entries (indices {}..={}), got {}",
                len - 1,
                n0 + 1,
                n1 - 1,
                v.len()
            )));
        }
        for (i, &a) in alpha.iter().enumerate() {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::invalid(format!("alpha[{}] = {a} must be positive", n0 + i as i64)));
            }
        }
        for (i, &x) in v.iter().enumerate() {
            if !x.is_finite() {
                return Err(Error::invalid(format!("v[{}] = {x} is not finite", n0 + 1 + i as i64)));
            }
        }
        Ok(JacobiProblem { n0, n1, alpha, v })
    }

    /// `beta` indexed `N0+1, …, N1-1`.
    pub fn from_beta(n0: i64, n1: i64, alpha: Vec<f64>, beta: Vec<f64>) -> Result<Self> {
        if alpha.len() < 2 || beta.len() + 1 != alpha.len() {
            // let `new` produce the precise message
            return JacobiProblem::new(n0, n1, alpha, beta);
        }
        let v = beta
            .iter()
            .enumerate()
            .map(|(i, b)| -b - alpha[i + 1] - alpha[i])
            .collect();
        JacobiProblem::new(n0, n1, alpha, v)
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn n1(&self) -> i64 {
        self.n1
    }

    /// `α_n`, `N0 <= n < N1`.
    pub fn alpha(&self, n: i64) -> f64 {
        self.alpha[(n - self.n0) as usize]
    }

    /// `v_n`, `N0 < n < N1`.
    pub fn v(&self, n: i64) -> f64 {
        self.v[(n - self.n0 - 1) as usize]
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alpha
    }

    pub fn vs(&self) -> &[f64] {
        &self.v
    }

    /// Residual of the recurrence at `n` for the sequence `u`.
    pub fn residual(&self, u: &JacobiSolution, n: i64) -> f64 {
        -self.alpha(n) * (u.at(n + 1) - u.at(n)) + self.alpha(n - 1) * (u.at(n) - u.at(n - 1)) + self.v(n) * u.at(n)
    }
}

/// A sequence `u_{N0}, …, u_{N1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JacobiSolution {
    n0: i64,
    values: Vec<f64>,
}

impl JacobiSolution {
    pub fn from_values(n0: i64, values: Vec<f64>) -> Self {
        JacobiSolution { n0, values }
    }

    pub fn n0(&self) -> i64 {
        self.n0
    }

    pub fn n1(&self) -> i64 {
        self.n0 + self.values.len() as i64 - 1
    }

    pub fn at(&self, n: i64) -> f64 {
        self.values[(n - self.n0) as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn is_trivial(&self) -> bool {
        self.values.iter().all(|&u| u == 0.0)
    }
}

pub fn solve_recurrence(p: &JacobiProblem, u_n0: f64, u_n0_plus_1: f64) -> Result<JacobiSolution> {
    if u_n0 == 0.0 && u_n0_plus_1 == 0.0 {
        return Err(Error::TrivialSolution);
    }
    let mut values = Vec::with_capacity((p.n1 - p.n0 + 1) as usize);
    values.push(u_n0);
    values.push(u_n0_plus_1);
    for n in p.n0 + 1..p.n1 {
        let i = (n - p.n0) as usize;
        let (prev, cur) = (values[i - 1], values[i]);
        values.push(cur + (p.alpha(n - 1) * (cur - prev) + p.v(n) * cur) / p.alpha(n));
    }
    Ok(JacobiSolution { n0: p.n0, values })
}

/// True iff `u_n u_m < 0` for some `n`, `m`.
pub fn changes_sign(u: &JacobiSolution) -> bool {
    u.values.iter().any(|&x| x > 0.0) && u.values.iter().any(|&x| x < 0.0)
}

fn check_same_range(a: &JacobiProblem, b: &JacobiProblem) -> Result<()> {
    if a.n0 != b.n0 || a.n1 != b.n1 {
        return Err(Error::invalid(format!(
            "index ranges differ: [{}, {}] vs [{}, {}]",
            a.n0, a.n1, b.n0, b.n1
        )));
    }
    Ok(())
}

fn check_tilde_solution(p: &JacobiProblem, u: &JacobiSolution) -> Result<()> {
    if u.n0 != p.n0 || u.n1() != p.n1 {
        return Err(Error::invalid(format!(
            "solution is indexed [{}, {}], problem is [{}, {}]",
            u.n0,
            u.n1(),
            p.n0,
            p.n1
        )));
    }
    if u.is_trivial() {
        return Err(Error::TrivialFunction);
    }
    if u.at(p.n0) != 0.0 {
        return Err(Error::hypothesis(format!("u~[{}] = {} must vanish", p.n0, u.at(p.n0)), p.n0 as f64));
    }
    let (last, end) = (u.at(p.n1 - 1), u.at(p.n1));
    if last * end > 0.0 {
        return Err(Error::hypothesis(
            format!("u~[{}] u~[{}] = {} must be <= 0", p.n1 - 1, p.n1, last * end),
            p.n1 as f64,
        ));
    }
    Ok(())
}

/// The individual terms of the discrete certificate; the last entry is the
/// boundary term.
fn dcon_terms(tilde: &JacobiProblem, target: &JacobiProblem, u: &JacobiSolution) -> Vec<f64> {
    let mut terms = Vec::new();
    for n in tilde.n0 + 1..tilde.n1 {
        let d = u.at(n) - u.at(n - 1);
        terms.push((target.alpha(n - 1) - tilde.alpha(n - 1)) * d * d);
        terms.push((target.v(n) - tilde.v(n)) * u.at(n) * u.at(n));
    }
    let m = tilde.n1 - 1;
    terms.push((target.alpha(m) - tilde.alpha(m)) * (u.at(m) * u.at(m) - u.at(m) * u.at(m + 1)));
    terms
}

/// The discrete certificate
///
/// ```text
/// Σ_{n=N0+1}^{N1-1} [(α_{n-1} - α̃_{n-1})(ũ_n - ũ_{n-1})² + (v_n - ṽ_n) ũ_n²]
///   + (α_{N1-1} - α̃_{N1-1})(ũ_{N1-1}² - ũ_{N1-1} ũ_{N1}).
/// ```
pub fn dcon_value(tilde: &JacobiProblem, target: &JacobiProblem, tilde_u: &JacobiSolution) -> Result<f64> {
    check_same_range(tilde, target)?;
    check_tilde_solution(tilde, tilde_u)?;
    Ok(dcon_terms(tilde, target, tilde_u).iter().sum())
}

/// Where the last linear segment of `ũ` meets the axis.
pub fn crossing(tilde_u: &JacobiSolution) -> Result<f64> {
    let n1 = tilde_u.n1();
    let (last, end) = (tilde_u.at(n1 - 1), tilde_u.at(n1));
    if last == 0.0 {
        Ok((n1 - 1) as f64)
    } else if end == 0.0 {
        Ok(n1 as f64)
    } else if last * end < 0.0 {
        Ok((n1 - 1) as f64 + last / (last - end))
    } else {
        Err(Error::hypothesis(
            format!("u~[{}] u~[{}] = {} must be <= 0", n1 - 1, n1, last * end),
            n1 as f64,
        ))
    }
}

/// The embedded coefficients restricted to `[N0, b]`, `N0 + 1 <= b <= N1`.
///
/// On `[n, n+1)`: `p = α_n`, `s = r = -Σ_{k=N0+1}^{n} v_k / α_n`,
/// `q = -p s²`.
pub fn embed_on(p: &JacobiProblem, b: f64) -> Result<CoefficientSet> {
    let a = p.n0 as f64;
    if !(b >= a + 1.0 && b <= p.n1 as f64) {
        return Err(Error::invalid(format!("embedding end {b} outside [{}, {}]", p.n0 + 1, p.n1)));
    }
    let mut breaks = Vec::new();
    let (mut ps, mut qs, mut ss) = (Vec::new(), Vec::new(), Vec::new());
    let mut sum_v = 0.0;
    for n in p.n0..p.n1 {
        if n as f64 >= b {
            break;
        }
        if n > p.n0 {
            breaks.push(n as f64);
            sum_v += p.v(n);
        }
        let alpha = p.alpha(n);
        let s = -sum_v / alpha;
        ps.push(Expr::num(alpha));
        ss.push(Expr::num(s));
        qs.push(Expr::num(-alpha * s * s));
    }
    let pw = |pieces: Vec<Expr>| PiecewiseFunction::new(a, b, breaks.clone(), pieces);
    let s = pw(ss)?;
    CoefficientSet::new(pw(ps)?, pw(qs)?, s.clone(), s)
}

/// The embedded problem on `[N0, b]` with `b` the crossing of `ũ`.
pub fn embed(p: &JacobiProblem, tilde_u: &JacobiSolution) -> Result<(CoefficientSet, f64)> {
    check_tilde_solution(p, tilde_u)?;
    let b = crossing(tilde_u)?;
    Ok((embed_on(p, b)?, b))
}

/// Solve the embedded problem through the data of `u` at `N0`.
pub fn embedded_solution(c: &CoefficientSet, u: &JacobiSolution, tol: f64) -> Result<Solution> {
    let n0 = u.n0();
    let p0 = c.p().eval(n0 as f64);
    // s = 0 on the first cell, so v = p u'
    solve_ivp(c, n0 as f64, u.at(n0), p0 * (u.at(n0 + 1) - u.at(n0)), tol)
}

#[derive(Debug, Clone, PartialEq)]
pub struct JacobiReport {
    pub dcon: f64,
    /// `Σ |terms|`, the rounding scale of `dcon`.
    pub magnitude: f64,
    pub verdict: Verdict,
    pub b: f64,
    /// The continuous certificate on the embedding, when it could be
    /// evaluated.
    pub con: Option<Certificate>,
    pub con_agrees: bool,
    pub sweep_n: usize,
    pub sign_changing: usize,
    /// Initial angles of `(u_{N0}, u_{N0+1})` whose solution keeps its sign.
    pub no_sign_change: Vec<f64>,
    /// `ũ` solves the target recurrence.
    pub proportional: bool,
    pub consistent: bool,
    pub notes: Vec<String>,
}

pub const JACOBI_CSV_HEADER: &str = "dcon,magnitude,verdict,b,con,con_err,sweep_n,sign_changing,no_sign_change";

impl JacobiReport {
    pub fn csv(&self) -> String {
        let (con, err) = match &self.con {
            Some(c) => (c.value.to_string(), c.err.to_string()),
            None => Default::default(),
        };
        format!(
            "{JACOBI_CSV_HEADER}\n{},{},{},{},{},{},{},{},{}\n",
            self.dcon,
            self.magnitude,
            self.verdict,
            self.b,
            con,
            err,
            self.sweep_n,
            self.sign_changing,
            self.no_sign_change.len()
        )
    }

    pub fn table(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "discrete certificate {:.12e}", self.dcon);
        let _ = writeln!(out, "rounding scale       {:.3e}", self.magnitude);
        let _ = writeln!(out, "verdict              {}", self.verdict);
        let _ = writeln!(out, "embedding end b      {}", self.b);
        if let Some(c) = &self.con {
            let _ = writeln!(
                out,
                "embedded certificate {:.12e} ({})",
                c.value,
                if self.con_agrees { "agrees" } else { "DISAGREES" }
            );
        }
        let _ = writeln!(
            out,
            "sweep                {} directions, {} change sign",
            self.sweep_n, self.sign_changing
        );
        for theta in &self.no_sign_change {
            let _ = writeln!(out, "  no sign change at angle {theta:.12}");
        }
        let _ = writeln!(out, "u~ solves target     {}", self.proportional);
        let _ = writeln!(out, "consistent           {}", self.consistent);
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}

/// Discrete comparison: evaluate the certificate, sweep the target over
/// initial directions for sign changes on `[N0, N1]`, and cross-check
/// against the continuous certificate of the embedding on `[N0, b]`.
pub fn discrete_compare(
    tilde: &JacobiProblem,
    target: &JacobiProblem,
    tilde_u: &JacobiSolution,
    sweep_n: usize,
    tol: f64,
) -> Result<JacobiReport> {
    check_same_range(tilde, target)?;
    check_tilde_solution(tilde, tilde_u)?;
    if sweep_n == 0 {
        return Err(Error::invalid("sweep size must be positive"));
    }
    let terms = dcon_terms(tilde, target, tilde_u);
    let dcon: f64 = terms.iter().sum();
    let magnitude: f64 = terms.iter().map(|t| t.abs()).sum();
    let verdict = Verdict::classify(dcon, 64.0 * f64::EPSILON * magnitude);

    let thetas: Vec<f64> = (0..sweep_n).map(|j| PI * j as f64 / sweep_n as f64).collect();
    let changes: Vec<bool> = thetas
        .par_iter()
        .map(|&t| {
            let (c, s) = if t == 0.0 { (1.0, 0.0) } else { (t.cos(), t.sin()) };
            solve_recurrence(target, c, s).map(|u| changes_sign(&u))
        })
        .collect::<Result<_>>()?;
    let no_sign_change: Vec<f64> = thetas.iter().zip(&changes).filter(|(_, c)| !**c).map(|(t, _)| *t).collect();

    let scale = tilde_u.values().iter().fold(0.0f64, |m, u| m.max(u.abs()));
    let worst = (target.n0 + 1..target.n1)
        .map(|n| target.residual(tilde_u, n).abs() / (target.alpha(n) + target.alpha(n - 1) + target.v(n).abs()))
        .fold(0.0f64, f64::max);
    let proportional = worst <= 1e-12 * scale;

    let b = crossing(tilde_u)?;
    let mut notes = Vec::new();
    let con = embedded_certificate(tilde, target, tilde_u, b, tol);
    let (con, con_agrees) = match con {
        Ok(c) => {
            let agrees = (c.value - dcon).abs() <= 1e-8f64.max(c.err);
            if !agrees {
                notes.push(format!("embedded certificate {} differs from dcon {}", c.value, dcon));
            }
            (Some(c), agrees)
        }
        Err(e) => {
            notes.push(format!("embedded certificate unavailable: {e}"));
            (None, false)
        }
    };

    let all = no_sign_change.is_empty();
    let consistent = match verdict {
        Verdict::StrictlyNegative => all,
        Verdict::WeakNonpositive => all || proportional,
        _ => true,
    } && (con.is_none() || con_agrees);
    if !all && verdict.certifies() {
        notes.push(format!("{} swept solution(s) keep their sign", no_sign_change.len()));
    }
    Ok(JacobiReport {
        dcon,
        magnitude,
        verdict,
        b,
        con,
        con_agrees,
        sweep_n,
        sign_changing: changes.iter().filter(|c| **c).count(),
        no_sign_change,
        proportional,
        consistent,
        notes,
    })
}

/// The continuous certificate with `F = G = 0` on the embeddings over
/// `[N0, b]`.
pub fn embedded_certificate(
    tilde: &JacobiProblem,
    target: &JacobiProblem,
    tilde_u: &JacobiSolution,
    b: f64,
    tol: f64,
) -> Result<Certificate> {
    let kt = embed_on(tilde, b)?;
    let kg = embed_on(target, b)?;
    let u = embedded_solution(&kt, tilde_u, tol)?;
    let prob = ComparisonProblem::ungauged(kt, kg)?;
    evaluate_con(&prob, &u, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::QuasiSolution;

    fn unit(n0: i64, n1: i64, v: f64) -> JacobiProblem {
        let len = (n1 - n0) as usize;
        JacobiProblem::new(n0, n1, vec![1.0; len], vec![v; len - 1]).unwrap()
    }

    #[test]
    fn linear_and_periodic_recurrences() {
        let u = solve_recurrence(&unit(0, 5, 0.0), 0.0, 1.0).unwrap();
        assert_eq!(u.values(), &[0.0, 1.0, 2.0, 3.0, 4.0, 5.0]);
        let p = JacobiProblem::from_beta(0, 6, vec![1.0; 6], vec![0.0; 5]).unwrap();
        let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
        assert_eq!(u.values(), &[0.0, 1.0, 0.0, -1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn validation_names_the_index() {
        let e = JacobiProblem::new(3, 6, vec![1.0, 0.0, 1.0], vec![0.0, 0.0]).unwrap_err();
        assert!(e.to_string().contains("alpha[4]"), "{e}");
        assert!(JacobiProblem::new(0, 1, vec![1.0], vec![]).is_err());
    }

    #[test]
    fn sign_changes() {
        assert!(changes_sign(&JacobiSolution::from_values(0, vec![0.0, 1.0, 0.0, -1.0])));
        assert!(!changes_sign(&JacobiSolution::from_values(0, vec![0.0, 1.0, 2.0, 3.0])));
    }

    #[test]
    fn period_four_instance() {
        let tilde = unit(0, 3, -2.0);
        let target = unit(0, 3, -3.0);
        let u = solve_recurrence(&tilde, 0.0, 1.0).unwrap();
        assert_eq!(dcon_value(&tilde, &target, &u).unwrap(), -1.0);
        assert_eq!(crossing(&u).unwrap(), 2.0);
        let r = discrete_compare(&tilde, &target, &u, 64, 1e-10).unwrap();
        assert_eq!(r.verdict, Verdict::StrictlyNegative);
        assert!(r.no_sign_change.is_empty());
        assert!(r.con_agrees, "{:?}", r.con);
        assert!(r.consistent);
    }

    #[test]
    fn embedding_coefficients() {
        let p = JacobiProblem::new(0, 2, vec![1.0, 1.0], vec![1.0]).unwrap();
        let c = embed_on(&p, 2.0).unwrap();
        assert_eq!((c.s().eval(0.5), c.q().eval(0.5)), (0.0, 0.0));
        assert_eq!((c.s().eval(1.5), c.q().eval(1.5)), (-1.0, -1.0));
    }

    #[test]
    fn embedded_solution_interpolates() {
        let p = JacobiProblem::new(-1, 5, vec![1.0, 2.0, 0.5, 1.5, 3.0, 1.0], vec![0.3, -1.2, 0.7, -0.4, 2.0]).unwrap();
        let u = solve_recurrence(&p, 0.4, -0.9).unwrap();
        let c = embed_on(&p, 5.0).unwrap();
        let sol = embedded_solution(&c, &u, 1e-12).unwrap();
        for n in -1..=5 {
            assert!((sol.u(n as f64) - u.at(n)).abs() < 1e-9, "n = {n}");
        }
        // linear between nodes
        let mid = sol.u(2.5);
        assert!((mid - 0.5 * (u.at(2) + u.at(3))).abs() < 1e-9);
    }

    #[test]
    fn weak_case_is_proportional() {
        let p = unit(0, 3, -2.0);
        let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
        let r = discrete_compare(&p, &p, &u, 32, 1e-10).unwrap();
        assert_eq!(r.verdict, Verdict::WeakNonpositive);
        assert!(r.proportional);
        assert!(r.consistent);
    }

    #[test]
    fn boundary_condition_violation_names_index() {
        let p = unit(0, 3, 0.0);
        let u = solve_recurrence(&p, 0.0, 1.0).unwrap();
        let e = dcon_value(&p, &p, &u).unwrap_err();
        assert!(e.to_string().contains("u~[2] u~[3]"), "{e}");
    }
}
