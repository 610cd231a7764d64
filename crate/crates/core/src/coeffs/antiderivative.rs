use super::expr::Expr;
use super::piecewise::PiecewiseFunction;
use super::quad::{gauss10, local_cells, tail_decays, wynn_epsilon, Estimate};
use crate::error::{Error, Result};

#[derive(Debug, Clone)]
enum CellKind {
    /// Constant integrand: exact linear growth.
    Linear(f64),
    /// Smooth integrand: Gauss rule from the cell start at query time.
    Gauss(usize),
    /// Extrapolated remainder next to a singular endpoint, interpolated
    /// linearly.
    Tail,
}

#[derive(Debug, Clone)]
struct Cell {
    lo: f64,
    hi: f64,
    start: f64,
    total: f64,
    kind: CellKind,
}

/// Cumulative integral `x -> ∫_a^x f` on an adaptive grid.
///
/// Cell boundaries include every breakpoint of `f`, so values are exact
/// sums across discontinuities; inside a cell the partial integral is
/// recomputed with a 10-point Gauss rule on the restricted piece.
#[derive(Debug, Clone)]
pub struct Antiderivative {
    a: f64,
    b: f64,
    exprs: Vec<Expr>,
    cells: Vec<Cell>,
    error_bound: f64,
}

impl Antiderivative {
    pub fn new(f: &PiecewiseFunction, tol: f64) -> Result<Self> {
        if !(tol > 0.0) {
            return Err(Error::invalid("antiderivative tolerance must be positive"));
        }
        let (a, b) = f.interval();
        let density = tol / (b - a) / 4.0;
        let singular = f.singular();
        let mut exprs = Vec::new();
        let mut raw: Vec<(f64, f64, Estimate, CellKind)> = Vec::new();
        let mut tail_error = 0.0;
        let segments: Vec<(f64, f64, Expr)> = f.segments().map(|(lo, hi, e)| (lo, hi, e.restrict(lo, hi))).collect();
        for (lo, hi, expr) in segments {
            if let Some(c) = expr.constant_value() {
                let exact = Estimate {
                    value: c * (hi - lo),
                    error: 0.0,
                };
                raw.push((lo, hi, exact, CellKind::Linear(c)));
                continue;
            }
            let idx = exprs.len();
            exprs.push(expr.clone());
            let g = |x: f64| expr.eval(x);
            let mut lo_reg = lo;
            let mut hi_reg = hi;
            let mut left_tail = Vec::new();
            let mut right_tail = Vec::new();
            if singular.at_a && lo == a {
                lo_reg = lo + 0.25 * (hi - lo);
                let (cells, err) = tail_cells(&g, lo, lo_reg, density, tol / 8.0, idx)?;
                left_tail = cells;
                tail_error += err;
            }
            if singular.at_b && hi == b {
                hi_reg = hi - 0.25 * (hi - lo);
                let (cells, err) = tail_cells(&g, hi, hi_reg, density, tol / 8.0, idx)?;
                right_tail = cells;
                tail_error += err;
            }
            raw.extend(left_tail);
            for (l, h, est) in local_cells(&g, lo_reg, hi_reg, density, 200_000)? {
                raw.push((l, h, est, CellKind::Gauss(idx)));
            }
            raw.extend(right_tail);
        }
        raw.sort_by(|x, y| x.0.total_cmp(&y.0));
        let mut cells = Vec::with_capacity(raw.len());
        let mut running = 0.0;
        let mut error_bound = tail_error;
        let mut magnitude = 0.0;
        for (lo, hi, est, kind) in raw {
            cells.push(Cell {
                lo,
                hi,
                start: running,
                total: est.value,
                kind,
            });
            running += est.value;
            error_bound += est.error;
            magnitude += est.value.abs();
        }
        error_bound += 4.0 * f64::EPSILON * magnitude;
        if !running.is_finite() {
            return Err(Error::NotIntegrable {
                which: "integrand".into(),
                a,
                b,
            });
        }
        Ok(Antiderivative {
            a,
            b,
            exprs,
            cells,
            error_bound,
        })
    }

    pub fn interval(&self) -> (f64, f64) {
        (self.a, self.b)
    }

    /// Estimated bound on `|S(x) - ∫_a^x f|` over the interval.
    pub fn error_bound(&self) -> f64 {
        self.error_bound
    }

    /// Number of table cells.
    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(self.a, self.b);
        let i = self.cells.partition_point(|c| c.lo <= x).saturating_sub(1);
        let cell = &self.cells[i];
        if x == cell.lo {
            return cell.start;
        }
        match cell.kind {
            CellKind::Linear(c) => cell.start + c * (x - cell.lo),
            CellKind::Gauss(e) => {
                if x == cell.hi {
                    return cell.start + cell.total;
                }
                let expr = &self.exprs[e];
                cell.start + gauss10(|t| expr.eval(t), cell.lo, x)
            }
            CellKind::Tail => cell.start + cell.total * (x - cell.lo) / (cell.hi - cell.lo),
        }
    }

    /// Total integral over `[a, b]`.
    pub fn total(&self) -> f64 {
        self.cells.last().map_or(0.0, |c| c.start + c.total)
    }
}

/// Geometric cells from `cut` towards the singular point `end`, each
/// refined to `density`; the unresolved remainder next to `end` becomes a
/// single extrapolated tail cell. Returns the cells (any order) and the
/// extrapolation error.
fn tail_cells(
    g: &impl Fn(f64) -> f64,
    end: f64,
    cut: f64,
    density: f64,
    tol: f64,
    idx: usize,
) -> Result<(Vec<(f64, f64, Estimate, CellKind)>, f64)> {
    let h = cut - end;
    let mut out = Vec::new();
    let mut partial = Vec::new();
    let mut running = 0.0;
    let mut prev_est: Option<f64> = None;
    let mut inner = cut;
    for k in 0..400 {
        let near = end + h * 0.5f64.powi(k + 1);
        if near == end || near == inner {
            break;
        }
        let (lo, hi) = if near < inner { (near, inner) } else { (inner, near) };
        let mut sum = 0.0;
        for (l, hh, est) in local_cells(g, lo, hi, density, 200_000)? {
            sum += est.value;
            out.push((l, hh, est, CellKind::Gauss(idx)));
        }
        running += sum;
        partial.push(running);
        inner = near;
        if partial.len() < 3 {
            continue;
        }
        let est = wynn_epsilon(&partial);
        if let Some(prev) = prev_est {
            let change = (est - prev).abs();
            let remainder = est - running;
            if change <= tol && remainder.abs() <= tol && tail_decays(&partial) {
                let (lo, hi) = if inner < end { (inner, end) } else { (end, inner) };
                out.push((
                    lo,
                    hi,
                    Estimate {
                        value: remainder,
                        error: change,
                    },
                    CellKind::Tail,
                ));
                return Ok((out, change));
            }
        }
        prev_est = Some(est);
    }
    Err(Error::NotIntegrable {
        which: "integrand near singular endpoint".into(),
        a: end.min(cut),
        b: end.max(cut),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coeffs::piecewise::Endpoints;
    use std::collections::BTreeMap;
    use std::f64::consts::PI;

    fn pw(text: &str, a: f64, b: f64) -> PiecewiseFunction {
        PiecewiseFunction::from_expr(a, b, Expr::parse(text, &BTreeMap::new()).unwrap(), &[]).unwrap()
    }

    #[test]
    fn zero_integrand() {
        let s = Antiderivative::new(&pw("0", 0.0, 1.0), 1e-10).unwrap();
        for x in [0.0, 0.3, 1.0] {
            assert_eq!(s.eval(x), 0.0);
        }
    }

    #[test]
    fn cosine() {
        let s = Antiderivative::new(&pw("cos(x)", 0.0, PI), 1e-10).unwrap();
        assert!((s.eval(PI / 2.0) - 1.0).abs() < 1e-10);
        assert_eq!(s.eval(0.0), 0.0);
        for i in 0..50 {
            let x = PI * i as f64 / 49.0;
            assert!((s.eval(x) - x.sin()).abs() < 1e-10);
        }
    }

    #[test]
    fn step_integrand_is_exact() {
        // closed-form oracle: ∫_0^x 4 step(t - 1/2) dt = 4 max(x - 1/2, 0)
        let s = Antiderivative::new(&pw("4*step(x-0.5)", 0.0, 1.0), 1e-10).unwrap();
        assert!((s.eval(1.0) - 2.0).abs() < 1e-10);
        for x in [0.1, 0.5, 0.51, 0.9] {
            assert!((s.eval(x) - 4.0 * (x - 0.5f64).max(0.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn singular_endpoint() {
        let f = pw("x^(-0.5)", 0.0, 1.0).with_singular(Endpoints {
            at_a: true,
            at_b: false,
        });
        let s = Antiderivative::new(&f, 1e-9).unwrap();
        for x in [1e-12, 1e-6, 0.01, 0.25, 0.7, 1.0] {
            assert!((s.eval(x) - 2.0 * x.sqrt()).abs() < 1e-8, "x={x}: {}", s.eval(x));
        }
        assert!(s.error_bound() < 1e-8);
    }
}
