use super::expr::Expr;
use crate::error::{Error, Result};

/// Which interval endpoints carry an integrable singularity.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Endpoints {
    pub at_a: bool,
    pub at_b: bool,
}

impl Endpoints {
    pub const NONE: Endpoints = Endpoints {
        at_a: false,
        at_b: false,
    };

    pub fn union(self, other: Endpoints) -> Endpoints {
        Endpoints {
            at_a: self.at_a || other.at_a,
            at_b: self.at_b || other.at_b,
        }
    }
}

/// A function on `[a, b]` given by one expression per subinterval.
///
/// Pieces are half-open `[c_i, c_{i+1})` except the last, which includes
/// `b`, matching the right-continuous `step` convention.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseFunction {
    a: f64,
    b: f64,
    breakpoints: Vec<f64>,
    pieces: Vec<Expr>,
    singular: Endpoints,
}

impl PiecewiseFunction {
    pub fn new(a: f64, b: f64, breakpoints: Vec<f64>, pieces: Vec<Expr>) -> Result<Self> {
        if !(a.is_finite() && b.is_finite() && a < b) {
            return Err(Error::invalid(format!("interval [{a}, {b}] must be finite with a < b")));
        }
        if pieces.len() != breakpoints.len() + 1 {
            return Err(Error::invalid(format!(
                "{} breakpoints need {} pieces, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                pieces.len()
            )));
        }
        let mut prev = a;
        for &c in &breakpoints {
            if !(c > prev && c < b) {
                return Err(Error::invalid(format!(
                    "breakpoints must increase strictly inside ({a}, {b}); offending value {c}"
                )));
            }
            prev = c;
        }
        // pieces are stored specialized to their own subinterval so that
        // one-sided evaluation at a breakpoint never sees the neighbour's branch
        let n = pieces.len();
        let pieces = pieces
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let lo = if i == 0 { a } else { breakpoints[i - 1] };
                let hi = if i + 1 == n { b } else { breakpoints[i] };
                e.restrict(lo, hi)
            })
            .collect();
        Ok(PiecewiseFunction {
            a,
            b,
            breakpoints,
            pieces,
            singular: Endpoints::NONE,
        })
    }

    /// One expression on the whole interval, split at the interior switch
    /// points of its affine `step`s and at `extra` breakpoints.
    pub fn from_expr(a: f64, b: f64, expr: Expr, extra: &[f64]) -> Result<Self> {
        let mut cuts: Vec<f64> = expr
            .step_roots()
            .into_iter()
            .chain(extra.iter().copied())
            .filter(|&c| c > a && c < b)
            .collect();
        cuts.sort_by(f64::total_cmp);
        cuts.dedup();
        let pieces = vec![expr; cuts.len() + 1];
        PiecewiseFunction::new(a, b, cuts, pieces)
    }

    pub fn constant(a: f64, b: f64, value: f64) -> Result<Self> {
        PiecewiseFunction::new(a, b, Vec::new(), vec![Expr::Num(value)])
    }

    pub fn with_singular(mut self, singular: Endpoints) -> Self {
        self.singular = singular;
        self
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[Expr] {
        &self.pieces
    }

    pub fn singular(&self) -> Endpoints {
        self.singular
    }

    /// Index of the piece used at `x` (right-continuous).
    pub fn piece_index(&self, x: f64) -> usize {
        self.breakpoints.partition_point(|&c| c <= x)
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.pieces[self.piece_index(x)].eval(x)
    }

    /// Left limit at `x`: the piece ending at `x` when `x` is a breakpoint.
    pub fn eval_left(&self, x: f64) -> f64 {
        let i = self.breakpoints.partition_point(|&c| c < x);
        self.pieces[i].eval(x)
    }

    /// The subintervals `(lo, hi, piece)` in increasing order.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, &Expr)> + '_ {
        let n = self.pieces.len();
        (0..n).map(move |i| {
            let lo = if i == 0 { self.a } else { self.breakpoints[i - 1] };
            let hi = if i + 1 == n { self.b } else { self.breakpoints[i] };
            (lo, hi, &self.pieces[i])
        })
    }

    /// The expression valid on `[lo, hi]`, specialized to that interval.
    /// `[lo, hi]` must lie inside a single piece.
    pub fn piece_on(&self, lo: f64, hi: f64) -> Expr {
        self.pieces[self.piece_index(0.5 * (lo + hi))].restrict(lo, hi)
    }

    /// Apply `f` to every piece, keeping the breakpoints.
    pub fn map(&self, f: impl Fn(&Expr) -> Expr) -> PiecewiseFunction {
        PiecewiseFunction {
            pieces: self.pieces.iter().map(f).collect(),
            ..self.clone()
        }
    }

    /// Pointwise combination on the union of both breakpoint sets.
    pub fn combine(&self, other: &PiecewiseFunction, f: impl Fn(&Expr, &Expr) -> Expr) -> Result<PiecewiseFunction> {
        if self.interval() != other.interval() {
            return Err(Error::invalid("cannot combine functions on different intervals"));
        }
        let cuts = merge_breakpoints(&[&self.breakpoints, &other.breakpoints]);
        let mut pieces = Vec::with_capacity(cuts.len() + 1);
        let mut lo = self.a;
        for hi in cuts.iter().copied().chain(std::iter::once(self.b)) {
            let mid = 0.5 * (lo + hi);
            pieces.push(f(
                &self.pieces[self.piece_index(mid)],
                &other.pieces[other.piece_index(mid)],
            ));
            lo = hi;
        }
        Ok(PiecewiseFunction::new(self.a, self.b, cuts, pieces)?.with_singular(self.singular.union(other.singular)))
    }

    /// The same function on a subinterval `[lo, hi]` of `[a, b]`.
    pub fn restrict(&self, lo: f64, hi: f64) -> Result<PiecewiseFunction> {
        if !(lo >= self.a && hi <= self.b && lo < hi) {
            return Err(Error::invalid(format!(
                "[{lo}, {hi}] is not a subinterval of [{}, {}]",
                self.a, self.b
            )));
        }
        let first = self.piece_index(lo);
        let cuts: Vec<f64> = self.breakpoints.iter().copied().filter(|&c| c > lo && c < hi).collect();
        let pieces = self.pieces[first..first + cuts.len() + 1].to_vec();
        let singular = Endpoints {
            at_a: self.singular.at_a && lo == self.a,
            at_b: self.singular.at_b && hi == self.b,
        };
        Ok(PiecewiseFunction::new(lo, hi, cuts, pieces)?.with_singular(singular))
    }
}

/// Sorted, de-duplicated union of several breakpoint lists.
pub fn merge_breakpoints(lists: &[&[f64]]) -> Vec<f64> {
    let mut all: Vec<f64> = lists.iter().flat_map(|l| l.iter().copied()).collect();
    all.sort_by(f64::total_cmp);
    all.dedup();
    all
}
