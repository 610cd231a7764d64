//! Coefficient representation: expressions, piecewise functions,
//! quadrature and cumulative integrals.

mod antiderivative;
mod expr;
mod gauge;
mod piecewise;
pub mod quad;

use std::cell::Cell;
use std::sync::Arc;

pub use antiderivative::Antiderivative;
pub use expr::{parse_expr, BinOp, Expr, Func};
pub use gauge::GaugeFunction;
pub use piecewise::{merge_breakpoints, Endpoints, PiecewiseFunction};
pub use quad::{integrate, integrate_vec, Domain, Estimate, QuadOptions};

use crate::error::{Error, Result};

/// Default accuracy of the cached `S` and `R` tables.
pub const ANTIDERIVATIVE_TOL: f64 = 1e-12;

/// Build the cumulative integral of `f` vanishing at its left endpoint.
pub fn antiderivative(f: &PiecewiseFunction, tol: f64) -> Result<Antiderivative> {
    Antiderivative::new(f, tol)
}

/// Sample points for pointwise hypothesis checks: `cells` equal cells split
/// at `breakpoints`, the Kronrod nodes of each, and the cell ends.
pub fn sample_grid(a: f64, b: f64, breakpoints: &[f64], cells: usize) -> Vec<f64> {
    let n = cells.max(1);
    let mut cuts: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    cuts.extend(breakpoints.iter().copied().filter(|&c| c > a && c < b));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut out = Vec::with_capacity(cuts.len() * 22);
    for w in cuts.windows(2) {
        out.push(w[0]);
        out.extend(quad::kronrod_nodes(w[0], w[1]));
    }
    out.push(b);
    out
}

/// Values of `(p, q, r, s)` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Coefs {
    pub p: f64,
    pub q: f64,
    pub r: f64,
    pub s: f64,
}

#[derive(Debug)]
struct Inner {
    a: f64,
    b: f64,
    p: PiecewiseFunction,
    q: PiecewiseFunction,
    r: PiecewiseFunction,
    s: PiecewiseFunction,
    big_s: Antiderivative,
    big_r: Antiderivative,
    breakpoints: Vec<f64>,
    singular: Endpoints,
}

/// The coefficients `(p, q, r, s)` of
/// `-(p(u' + su))' + rp(u' + su) + qu = 0` on `[a, b]`, validated, with the
/// antiderivatives `S` and `R` of `s` and `r` (vanishing at `a`).
///
/// Cloning is cheap; clones compare equal under [`CoefficientSet::same_as`].
#[derive(Debug, Clone)]
pub struct CoefficientSet(Arc<Inner>);

impl CoefficientSet {
    pub fn new(p: PiecewiseFunction, q: PiecewiseFunction, r: PiecewiseFunction, s: PiecewiseFunction) -> Result<Self> {
        let (a, b) = p.interval();
        for (name, f) in [("q", &q), ("r", &r), ("s", &s)] {
            if f.interval() != (a, b) {
                let (fa, fb) = f.interval();
                return Err(Error::invalid(format!(
                    "{name} is defined on [{fa}, {fb}] but p on [{a}, {b}]"
                )));
            }
        }
        let breakpoints = merge_breakpoints(&[p.breakpoints(), q.breakpoints(), r.breakpoints(), s.breakpoints()]);
        let singular = p.singular().union(q.singular()).union(r.singular()).union(s.singular());
        let domain = Domain::new(a, b).with_breakpoints(&breakpoints).with_singular(singular);
        let opts = QuadOptions {
            abs_tol: 1e-10,
            rel_tol: 1e-6,
            max_intervals: 4000,
        };

        // every quadrature node doubles as a positivity sample for p
        let bad = Cell::new(None::<(f64, f64)>);
        let check = integrate(
            |x| {
                let v = p.eval(x);
                if !(v > 0.0) && bad.get().is_none() {
                    bad.set(Some((x, v)));
                }
                (1.0 / v).abs()
            },
            &domain,
            &opts,
        );
        if let Some((x, value)) = bad.get() {
            return Err(Error::NonPositiveP { x, value });
        }
        let not_integrable = |which: &str| Error::NotIntegrable {
            which: which.into(),
            a,
            b,
        };
        check.map_err(|_| not_integrable("1/p"))?;
        for (name, f) in [("q", &q), ("r", &r), ("s", &s)] {
            integrate(|x| f.eval(x).abs(), &domain, &opts).map_err(|_| not_integrable(name))?;
        }
        let big_s = Antiderivative::new(&s, ANTIDERIVATIVE_TOL)?;
        let big_r = Antiderivative::new(&r, ANTIDERIVATIVE_TOL)?;
        Ok(CoefficientSet(Arc::new(Inner {
            a,
            b,
            p,
            q,
            r,
            s,
            big_s,
            big_r,
            breakpoints,
            singular,
        })))
    }

    /// Coefficients given by single expressions on `[a, b]`; breakpoints
    /// come from the switch points of `step`s with affine arguments.
    pub fn from_exprs(a: f64, b: f64, p: Expr, q: Expr, r: Expr, s: Expr) -> Result<Self> {
        let pw = |e: Expr| PiecewiseFunction::from_expr(a, b, e, &[]);
        CoefficientSet::new(pw(p)?, pw(q)?, pw(r)?, pw(s)?)
    }

    /// Constant coefficients.
    pub fn constant(a: f64, b: f64, p: f64, q: f64, r: f64, s: f64) -> Result<Self> {
        CoefficientSet::from_exprs(a, b, Expr::Num(p), Expr::Num(q), Expr::Num(r), Expr::Num(s))
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.0.a, self.0.b)
    }

    pub fn p(&self) -> &PiecewiseFunction {
        &self.0.p
    }

    pub fn q(&self) -> &PiecewiseFunction {
        &self.0.q
    }

    pub fn r(&self) -> &PiecewiseFunction {
        &self.0.r
    }

    pub fn s(&self) -> &PiecewiseFunction {
        &self.0.s
    }

    /// Union of the breakpoints of all four coefficients.
    pub fn breakpoints(&self) -> &[f64] {
        &self.0.breakpoints
    }

    pub fn singular(&self) -> Endpoints {
        self.0.singular
    }

    /// Right-continuous coefficient values at `x`.
    pub fn eval(&self, x: f64) -> Coefs {
        Coefs {
            p: self.0.p.eval(x),
            q: self.0.q.eval(x),
            r: self.0.r.eval(x),
            s: self.0.s.eval(x),
        }
    }

    /// `S(x) = ∫_a^x s`.
    pub fn big_s(&self, x: f64) -> f64 {
        self.0.big_s.eval(x)
    }

    /// `R(x) = ∫_a^x r`.
    pub fn big_r(&self, x: f64) -> f64 {
        self.0.big_r.eval(x)
    }

    pub fn s_antiderivative(&self) -> &Antiderivative {
        &self.0.big_s
    }

    pub fn r_antiderivative(&self) -> &Antiderivative {
        &self.0.big_r
    }

    /// Whether `self` and `other` are clones of one validated set.
    pub fn same_as(&self, other: &CoefficientSet) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
    }

    /// `[lo, hi]` split at the breakpoints, with the four coefficient
    /// expressions specialized to each piece.
    pub fn segments(&self, lo: f64, hi: f64) -> Vec<(f64, f64, [Expr; 4])> {
        let (lo, hi) = (lo.min(hi), lo.max(hi));
        let mut cuts: Vec<f64> = vec![lo];
        cuts.extend(self.0.breakpoints.iter().copied().filter(|&c| c > lo && c < hi));
        cuts.push(hi);
        cuts.windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| {
                let (l, h) = (w[0], w[1]);
                let e = [
                    self.0.p.piece_on(l, h),
                    self.0.q.piece_on(l, h),
                    self.0.r.piece_on(l, h),
                    self.0.s.piece_on(l, h),
                ];
                (l, h, e)
            })
            .collect()
    }

    /// The same equation on a subinterval (antiderivatives restart at `lo`).
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<CoefficientSet> {
        CoefficientSet::new(
            self.0.p.restrict(lo, hi)?,
            self.0.q.restrict(lo, hi)?,
            self.0.r.restrict(lo, hi)?,
            self.0.s.restrict(lo, hi)?,
        )
    }

    /// Quadrature domain for integrands built from these coefficients.
    pub fn domain(&self) -> Domain {
        Domain::new(self.0.a, self.0.b)
            .with_breakpoints(&self.0.breakpoints)
            .with_singular(self.0.singular)
    }
}
