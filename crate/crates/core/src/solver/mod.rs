//! Initial-value problems for the first-order system `U' = M U`,
//! `U = (u, v)`, `v = p(u' + su)`, `M = [[-s, 1/p], [q, r]]`.

mod dopri;
pub mod expm;
mod sweep;
mod zeros;

pub use sweep::{theta_state, theta_sweep};
pub use zeros::{find_zeros, Zero, ZeroList};

use std::f64::consts::FRAC_PI_4;

use crate::coeffs::{integrate_vec, CoefficientSet, Domain, Endpoints, Expr, QuadOptions};
use crate::error::{Error, Result};
use dopri::DenseStep;
use expm::{expm, mat_vec, Mat2};

/// Point value of a solution and its quasi-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuasiState {
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

/// Anything that can be queried as a solution `(u, v)` of the equation
/// given by its coefficient set.
pub trait QuasiSolution: Send + Sync {
    fn coefficients(&self) -> &CoefficientSet;

    /// `(u(x), v(x))`.
    fn state(&self, x: f64) -> [f64; 2];

    /// Absolute accuracy of `state`.
    fn accuracy(&self) -> f64;

    /// Points at which the solution is well resolved, increasing, from `a`
    /// to `b`.
    fn mesh(&self) -> Vec<f64> {
        let (a, b) = self.coefficients().interval();
        let mut out: Vec<f64> = (0..=64).map(|i| a + (b - a) * i as f64 / 64.0).collect();
        out.extend_from_slice(self.coefficients().breakpoints());
        out.sort_by(f64::total_cmp);
        out.dedup();
        out
    }

    /// Where the Wronskian drift is measured from.
    fn reference_point(&self) -> f64 {
        self.coefficients().interval().0
    }

    fn u(&self, x: f64) -> f64 {
        self.state(x)[0]
    }

    fn v(&self, x: f64) -> f64 {
        self.state(x)[1]
    }

    /// `u' + su`, computed as `v / p`.
    fn quasi_over_p(&self, x: f64) -> f64 {
        self.state(x)[1] / self.coefficients().p().eval(x)
    }

    /// `u' = v/p - su`.
    fn derivative(&self, x: f64) -> f64 {
        let [u, v] = self.state(x);
        let c = self.coefficients().eval(x);
        v / c.p - c.s * u
    }
}

#[derive(Debug, Clone)]
enum Piece {
    Dense(DenseStep),
    /// Constant coefficients: `U(x) = exp(m (x - x0)) u0`.
    Exact { x0: f64, u0: [f64; 2], m: Mat2 },
    /// Short tail next to a singular endpoint.
    Linear { x0: f64, u0: [f64; 2], x1: f64, u1: [f64; 2] },
}

#[derive(Debug, Clone)]
struct Node {
    lo: f64,
    hi: f64,
    piece: Piece,
}

impl Node {
    fn eval(&self, x: f64) -> [f64; 2] {
        match &self.piece {
            Piece::Dense(d) => d.eval(x),
            Piece::Exact { x0, u0, m } => {
                if x == *x0 {
                    *u0
                } else {
                    mat_vec(&expm(m, x - x0), *u0)
                }
            }
            Piece::Linear { x0, u0, x1, u1 } => {
                if x == *x0 {
                    return *u0;
                }
                let t = (x - x0) / (x1 - x0);
                [u0[0] + t * (u1[0] - u0[0]), u0[1] + t * (u1[1] - u0[1])]
            }
        }
    }
}

/// Options for [`solve_ivp_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub tol: f64,
    /// Return the zero solution for `(A, B) = (0, 0)` instead of failing.
    pub allow_trivial: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: 1e-10,
            allow_trivial: false,
        }
    }
}

/// Dense solution on the whole interval of its coefficient set.
#[derive(Debug, Clone)]
pub struct Solution {
    coeffs: CoefficientSet,
    x0: f64,
    init: [f64; 2],
    tol: f64,
    nodes: Vec<Node>,
    accuracy: f64,
}

/// Solve with `u(x0) = a_val`, `v(x0) = b_val` on all of `[a, b]`.
pub fn solve_ivp(c: &CoefficientSet, x0: f64, a_val: f64, b_val: f64, tol: f64) -> Result<Solution> {
    solve_ivp_with(
        c,
        x0,
        [a_val, b_val],
        &SolveOptions {
            tol,
            ..Default::default()
        },
    )
}

pub fn solve_ivp_with(c: &CoefficientSet, x0: f64, init: [f64; 2], opts: &SolveOptions) -> Result<Solution> {
    let (a, b) = c.interval();
    let tol = opts.tol;
    if !(tol > 0.0) {
        return Err(Error::invalid(format!("solver tolerance must be positive, got {tol}")));
    }
    if !(x0 >= a && x0 <= b) {
        return Err(Error::invalid(format!("initial point {x0} outside [{a}, {b}]")));
    }
    if !(init[0].is_finite() && init[1].is_finite()) {
        return Err(Error::invalid("initial values must be finite"));
    }
    let singular = c.singular();
    if (x0 == a && singular.at_a) || (x0 == b && singular.at_b) {
        return Err(Error::SingularInitialPoint { x0 });
    }
    if init == [0.0, 0.0] {
        if !opts.allow_trivial {
            return Err(Error::TrivialSolution);
        }
        let zero = Node {
            lo: a,
            hi: b,
            piece: Piece::Exact {
                x0: a,
                u0: [0.0, 0.0],
                m: [[0.0; 2]; 2],
            },
        };
        return Ok(Solution {
            coeffs: c.clone(),
            x0,
            init,
            tol,
            nodes: vec![zero],
            accuracy: 0.0,
        });
    }
    let mut nodes = Vec::new();
    if x0 > a {
        let mut back = march(c, x0, init, a, tol)?;
        back.reverse();
        nodes.extend(back);
    }
    if x0 < b {
        nodes.extend(march(c, x0, init, b, tol)?);
    }
    let peak = nodes
        .iter()
        .flat_map(|n| [n.eval(n.lo), n.eval(n.hi)])
        .map(|u| u[0].abs().max(u[1].abs()))
        .fold(init[0].abs().max(init[1].abs()), f64::max);
    Ok(Solution {
        coeffs: c.clone(),
        x0,
        init,
        tol,
        nodes,
        accuracy: tol * peak.max(1.0),
    })
}

fn coefficient_matrix(e: &[Expr; 4], x: f64) -> Mat2 {
    let p = e[0].eval(x);
    [[-e[3].eval(x), 1.0 / p], [e[1].eval(x), e[2].eval(x)]]
}

/// Integrate from `x0` towards `end`, one coefficient segment at a time.
/// Nodes are returned in marching order.
fn march(c: &CoefficientSet, x0: f64, init: [f64; 2], end: f64, tol: f64) -> Result<Vec<Node>> {
    let (a, b) = c.interval();
    let length = b - a;
    let forward = end > x0;
    let mut segments = c.segments(x0, end);
    if !forward {
        segments.reverse();
    }
    let singular = c.singular();
    let mut nodes = Vec::new();
    let mut y = init;
    for (lo, hi, exprs) in segments {
        let (start, stop) = if forward { (lo, hi) } else { (hi, lo) };
        let consts: Option<Vec<f64>> = exprs.iter().map(Expr::constant_value).collect();
        if let Some(k) = consts {
            let m = [[-k[3], 1.0 / k[0]], [k[1], k[2]]];
            nodes.push(Node {
                lo,
                hi,
                piece: Piece::Exact { x0: start, u0: y, m },
            });
            y = mat_vec(&expm(&m, stop - start), y);
            continue;
        }
        let at_singular = (stop == a && singular.at_a) || (stop == b && singular.at_b);
        let tail = if at_singular {
            Some(singular_tail(c, start, stop, tol)?)
        } else {
            None
        };
        let target = tail.as_ref().map_or(stop, |t| t.0);
        let mfun = |x: f64| coefficient_matrix(&exprs, x);
        y = dopri_segment(&mfun, start, target, y, tol, length, &mut nodes)?;
        if let Some((cut, integral)) = tail {
            let y_end = mat_vec(&expm(&integral, 1.0), y);
            nodes.push(Node {
                lo: cut.min(stop),
                hi: cut.max(stop),
                piece: Piece::Linear {
                    x0: cut,
                    u0: y,
                    x1: stop,
                    u1: y_end,
                },
            });
            y = y_end;
        }
    }
    Ok(nodes)
}

/// Cut point next to a singular endpoint `stop` and `∫ M` over the tail,
/// with the tail short enough that one Magnus step is accurate to `tol`.
fn singular_tail(c: &CoefficientSet, start: f64, stop: f64, tol: f64) -> Result<(f64, Mat2)> {
    let budget = 0.1 * tol.sqrt();
    let mut width = 0.25 * (stop - start).abs();
    for _ in 0..200 {
        let cut = if stop > start { stop - width } else { stop + width };
        let (lo, hi) = (cut.min(stop), cut.max(stop));
        let domain = Domain::new(lo, hi)
            .with_breakpoints(c.breakpoints())
            .with_singular(Endpoints {
                at_a: stop == lo,
                at_b: stop == hi,
            });
        let opts = QuadOptions {
            abs_tol: 0.1 * tol,
            rel_tol: 1e-10,
            max_intervals: 2000,
        };
        let [ip, iq, ir, is, total] = integrate_vec(
            |x| {
                let k = c.eval(x);
                let ip = 1.0 / k.p;
                [ip, k.q, k.r, k.s, ip.abs() + k.q.abs() + k.r.abs() + k.s.abs()]
            },
            &domain,
            &opts,
        )?;
        if total.value <= budget {
            // ∫ M over [cut, stop] in marching direction
            let sign = if stop > start { 1.0 } else { -1.0 };
            let m = [[-is.value * sign, ip.value * sign], [iq.value * sign, ir.value * sign]];
            return Ok((cut, m));
        }
        width *= 0.5;
    }
    Err(Error::StepUnderflow { x: stop })
}

fn dopri_segment(
    m: &impl Fn(f64) -> Mat2,
    start: f64,
    target: f64,
    y0: [f64; 2],
    tol: f64,
    length: f64,
    nodes: &mut Vec<Node>,
) -> Result<[f64; 2]> {
    let dir = if target > start { 1.0 } else { -1.0 };
    let mut x = start;
    let mut y = y0;
    let mut k1 = mat_vec(&m(x), y);
    let mut h = dir * (target - start).abs().min(length / 64.0);
    while x != target {
        let remaining = target - x;
        let last = h.abs() >= remaining.abs();
        if last {
            h = remaining;
        }
        let att = dopri::attempt(m, x, y, k1, h, tol);
        // error per unit step keeps the global error near tol
        let ratio = att.err * length / h.abs();
        let ok = ratio <= 1.0 && att.y_new.iter().all(|v| v.is_finite());
        let fac = if ratio.is_finite() {
            (0.9 * ratio.max(1e-12).powf(-0.25)).clamp(0.2, 5.0)
        } else {
            0.2
        };
        if ok {
            let x_new = if last { target } else { x + h };
            nodes.push(Node {
                lo: x.min(x_new),
                hi: x.max(x_new),
                piece: Piece::Dense(att.dense),
            });
            x = x_new;
            y = att.y_new;
            k1 = att.k_last;
            h *= fac;
        } else {
            h *= fac.min(1.0);
        }
        if h.abs() <= 16.0 * f64::EPSILON * x.abs().max(f64::MIN_POSITIVE) {
            return Err(Error::StepUnderflow { x });
        }
    }
    Ok(y)
}

impl Solution {
    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn initial_state(&self) -> [f64; 2] {
        self.init
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn is_trivial(&self) -> bool {
        self.init == [0.0, 0.0]
    }

    /// Number of stored pieces (accepted steps plus exact segments).
    pub fn step_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn at(&self, x: f64) -> QuasiState {
        let [u, v] = self.state(x);
        QuasiState { x, u, v }
    }

    /// Samples `(x, u, v)` at the given points.
    pub fn sample(&self, xs: &[f64]) -> Vec<QuasiState> {
        xs.iter().map(|&x| self.at(x)).collect()
    }

    /// Pointwise linear combination `α·self + β·other` evaluated at `x`.
    pub fn combine_at(&self, alpha: f64, other: &Solution, beta: f64, x: f64) -> [f64; 2] {
        let [u1, v1] = self.state(x);
        let [u2, v2] = other.state(x);
        [alpha * u1 + beta * u2, alpha * v1 + beta * v2]
    }
}

impl QuasiSolution for Solution {
    fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    fn state(&self, x: f64) -> [f64; 2] {
        if x == self.x0 {
            return self.init;
        }
        let (a, b) = self.coeffs.interval();
        let x = x.clamp(a, b);
        let i = self.nodes.partition_point(|n| n.lo <= x).saturating_sub(1);
        self.nodes[i].eval(x)
    }

    fn accuracy(&self) -> f64 {
        self.accuracy
    }

    fn mesh(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.nodes.len() + 1);
        for n in &self.nodes {
            out.push(n.lo);
            if let Piece::Exact { m, .. } = &n.piece {
                // |d/dx arg U| <= ||M||, so this spacing keeps every cell below
                // a quarter turn
                let norm = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt();
                let pieces = ((n.hi - n.lo) * norm / FRAC_PI_4).ceil().clamp(1.0, 4096.0) as usize;
                out.extend((1..pieces).map(|i| n.lo + (n.hi - n.lo) * i as f64 / pieces as f64));
            }
        }
        out.push(self.coeffs.interval().1);
        out.dedup();
        out
    }

    fn reference_point(&self) -> f64 {
        self.x0
    }
}

/// A solution known in closed form, e.g. `u = sin x`, `v = cos x`.
#[derive(Debug, Clone)]
pub struct ClosedForm {
    coeffs: CoefficientSet,
    u: Expr,
    v: Expr,
}

impl ClosedForm {
    /// Accepts the pair only if it solves the equation (integral-form
    /// relative residual below `1e-8`).
    pub fn new(coeffs: &CoefficientSet, u: Expr, v: Expr) -> Result<Self> {
        let cf = ClosedForm {
            coeffs: coeffs.clone(),
            u,
            v,
        };
        let residual = integral_residual(&cf, 64)?;
        if !(residual <= 1e-8) {
            return Err(Error::NotASolution { residual });
        }
        Ok(cf)
    }
}

impl QuasiSolution for ClosedForm {
    fn coefficients(&self) -> &CoefficientSet {
        &self.coeffs
    }

    fn state(&self, x: f64) -> [f64; 2] {
        [self.u.eval(x), self.v.eval(x)]
    }

    fn accuracy(&self) -> f64 {
        1e-14
    }
}

/// Largest defect of `U(x_{i+1}) - U(x_i) = ∫ M U` over `samples` equal
/// cells, relative to the largest `|U|` seen.
pub fn integral_residual(sol: &impl QuasiSolution, samples: usize) -> Result<f64> {
    let c = sol.coefficients();
    let (a, b) = c.interval();
    let n = samples.max(2);
    let xs: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    let singular = c.singular();
    for w in xs.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let domain = Domain::new(lo, hi)
            .with_breakpoints(c.breakpoints())
            .with_singular(Endpoints {
                at_a: singular.at_a && lo == a,
                at_b: singular.at_b && hi == b,
            });
        let [du, dv] = integrate_vec(
            |x| {
                let m = coefficient_matrix_at(c, x);
                mat_vec(&m, sol.state(x))
            },
            &domain,
            &QuadOptions {
                abs_tol: 1e-13,
                rel_tol: 1e-11,
                max_intervals: 2000,
            },
        )?;
        let ul = sol.state(lo);
        let uh = sol.state(hi);
        worst = worst.max((uh[0] - ul[0] - du.value).abs()).max((uh[1] - ul[1] - dv.value).abs());
        scale = scale.max(ul[0].abs()).max(ul[1].abs()).max(uh[0].abs()).max(uh[1].abs());
    }
    if scale == 0.0 {
        return Err(Error::TrivialFunction);
    }
    Ok(worst / scale)
}

fn coefficient_matrix_at(c: &CoefficientSet, x: f64) -> Mat2 {
    let k = c.eval(x);
    [[-k.s, 1.0 / k.p], [k.q, k.r]]
}

/// `max |W(x) e^{S(x)-R(x)} - W(x0) e^{S(x0)-R(x0)}|` over `samples`
/// equally spaced points, `W = u1 v2 - u2 v1`.
pub fn wronskian_drift(sol1: &impl QuasiSolution, sol2: &impl QuasiSolution, samples: usize) -> Result<f64> {
    let c = sol1.coefficients();
    if !c.same_as(sol2.coefficients()) {
        return Err(Error::MismatchedCoefficients);
    }
    let weighted = |x: f64| {
        let [u1, v1] = sol1.state(x);
        let [u2, v2] = sol2.state(x);
        (u1 * v2 - u2 * v1) * (c.big_s(x) - c.big_r(x)).exp()
    };
    let x0 = sol1.reference_point();
    let w0 = weighted(x0);
    let (a, b) = c.interval();
    let n = samples.max(2);
    Ok((0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .map(|x| (weighted(x) - w0).abs())
        .fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn harmonic(b: f64) -> CoefficientSet {
        CoefficientSet::constant(0.0, b, 1.0, -1.0, 0.0, 0.0).unwrap()
    }

    #[test]
    fn harmonic_oscillator() {
        let c = harmonic(PI);
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        assert!((sol.u(PI / 2.0) - 1.0).abs() < 1e-10);
        assert!(sol.v(PI / 2.0).abs() < 1e-10);
        assert_eq!(sol.state(0.0), [0.0, 1.0]);
    }

    #[test]
    fn smooth_coefficients_use_dopri() {
        let c = CoefficientSet::from_exprs(
            0.0,
            PI,
            Expr::Num(1.0),
            Expr::Num(-1.0) + Expr::Num(0.0) * Expr::x(),
            Expr::Num(0.0),
            Expr::Num(0.0),
        )
        .unwrap();
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        assert!(sol.step_count() > 10);
        for i in 0..=20 {
            let x = PI * i as f64 / 20.0;
            assert!((sol.u(x) - x.sin()).abs() < 1e-9, "x={x}");
            assert!((sol.v(x) - x.cos()).abs() < 1e-9, "x={x}");
        }
    }

    #[test]
    fn free_equation_is_linear() {
        let c = CoefficientSet::constant(0.0, 2.0, 1.0, 0.0, 0.0, 0.0).unwrap();
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        for x in [0.25, 1.0, 2.0] {
            assert!((sol.u(x) - x).abs() < 1e-14);
        }
    }

    #[test]
    fn trivial_needs_flag() {
        let c = harmonic(1.0);
        assert!(matches!(solve_ivp(&c, 0.0, 0.0, 0.0, 1e-8), Err(Error::TrivialSolution)));
        let opts = SolveOptions {
            allow_trivial: true,
            ..Default::default()
        };
        let z = solve_ivp_with(&c, 0.0, [0.0, 0.0], &opts).unwrap();
        assert_eq!(z.state(0.7), [0.0, 0.0]);
    }

    #[test]
    fn closed_form_checks_residual() {
        let c = harmonic(PI);
        let sin = Expr::call(crate::coeffs::Func::Sin, Expr::x());
        let cos = Expr::call(crate::coeffs::Func::Cos, Expr::x());
        assert!(ClosedForm::new(&c, sin.clone(), cos.clone()).is_ok());
        assert!(matches!(
            ClosedForm::new(&c, sin.clone(), sin),
            Err(Error::NotASolution { .. })
        ));
    }

    #[test]
    fn sine_zeros() {
        let c = harmonic(10.0);
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        let z = find_zeros(&sol, 0.0, 10.0, 1e-12);
        assert_eq!(z.len(), 3);
        for (k, zero) in z.iter().enumerate() {
            assert!((zero.midpoint() - (k + 1) as f64 * PI).abs() < 1e-9);
            assert!(zero.min_abs_v > 0.99);
        }
        let c = harmonic(PI);
        let sol = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        assert!(find_zeros(&sol, 0.0, PI, 1e-12).is_empty());
    }

    #[test]
    fn sweep_axis_directions() {
        let c = harmonic(PI);
        let sols = theta_sweep(&c, 0.0, 2, 1e-10).unwrap();
        assert_eq!(sols[0].initial_state(), [1.0, 0.0]);
        assert_eq!(sols[1].initial_state(), [0.0, 1.0]);
        let sols = theta_sweep(&c, 0.0, 4, 1e-10).unwrap();
        assert!((sols[0].u(1.0) - 1.0f64.cos()).abs() < 1e-12);
        assert!((sols[2].u(1.0) - 1.0f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn wronskian_of_sine_and_cosine() {
        let c = harmonic(PI);
        let s = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-10).unwrap();
        let k = solve_ivp(&c, 0.0, 1.0, 0.0, 1e-10).unwrap();
        assert!(wronskian_drift(&s, &k, 200).unwrap() <= 1e-9);
        assert_eq!(wronskian_drift(&s, &s, 200).unwrap(), 0.0);
        let other = harmonic(PI);
        let o = solve_ivp(&other, 0.0, 0.0, 1.0, 1e-10).unwrap();
        assert!(matches!(wronskian_drift(&s, &o, 10), Err(Error::MismatchedCoefficients)));
    }

    #[test]
    fn singular_initial_point_rejected() {
        use crate::coeffs::PiecewiseFunction;
        let p = PiecewiseFunction::from_expr(0.0, 1.0, Expr::call(crate::coeffs::Func::Sqrt, Expr::x()), &[])
            .unwrap()
            .with_singular(Endpoints {
                at_a: true,
                at_b: false,
            });
        let z = || PiecewiseFunction::constant(0.0, 1.0, 0.0).unwrap();
        let c = CoefficientSet::new(p, z(), z(), z()).unwrap();
        assert!(matches!(solve_ivp(&c, 0.0, 0.0, 1.0, 1e-8), Err(Error::SingularInitialPoint { .. })));
        // p = sqrt(x), q = r = s = 0: u = u(1) + v·(2 sqrt(x) - 2), v constant
        let sol = solve_ivp(&c, 1.0, 0.0, 1.0, 1e-10).unwrap();
        for x in [0.0, 1e-9, 0.01, 0.5] {
            assert!((sol.u(x) - (2.0 * x.sqrt() - 2.0)).abs() < 1e-7, "x={x}: {}", sol.u(x));
        }
    }
}
