use std::f64::consts::{FRAC_PI_2, PI};

use super::QuasiSolution;

/// Enclosure `[lo, hi]` of a simple zero of `u`; `min_abs_v` is the smaller
/// `|v|` at the two ends (bounded away from 0 for a nontrivial solution).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Zero {
    pub lo: f64,
    pub hi: f64,
    pub min_abs_v: f64,
}

impl Zero {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }
}

/// Zeros in an open interval, increasing.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ZeroList {
    zeros: Vec<Zero>,
}

impl ZeroList {
    pub fn len(&self) -> usize {
        self.zeros.len()
    }

    pub fn is_empty(&self) -> bool {
        self.zeros.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Zero> {
        self.zeros.iter()
    }

    pub fn as_slice(&self) -> &[Zero] {
        &self.zeros
    }

    pub fn locations(&self) -> Vec<f64> {
        self.zeros.iter().map(Zero::midpoint).collect()
    }
}

impl<'a> IntoIterator for &'a ZeroList {
    type Item = &'a Zero;
    type IntoIter = std::slice::Iter<'a, Zero>;

    fn into_iter(self) -> Self::IntoIter {
        self.zeros.iter()
    }
}

fn median(mut v: Vec<f64>) -> f64 {
    if v.is_empty() {
        return 0.0;
    }
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// All zeros of `u` in the open interval `(lo, hi)`, each enclosed to
/// width `tol`.
///
/// The solution mesh is refined until the phase `atan2(v, u·scale)` moves
/// by less than a quarter turn between neighbours, so every sign change of
/// `u` shows up between two grid points. Zeros closer to `lo` or `hi` than
/// the solution's own accuracy allows to resolve are treated as endpoint
/// zeros and left out.
pub fn find_zeros(sol: &impl QuasiSolution, lo: f64, hi: f64, tol: f64) -> ZeroList {
    let (lo, hi) = (lo.min(hi), lo.max(hi));
    let mut xs: Vec<f64> = sol.mesh().into_iter().filter(|&x| x > lo && x < hi).collect();
    xs.insert(0, lo);
    xs.push(hi);
    let states: Vec<[f64; 2]> = xs.iter().map(|&x| sol.state(x)).collect();
    let mu = median(states.iter().map(|s| s[0].abs()).collect());
    let mv = median(states.iter().map(|s| s[1].abs()).collect());
    let scale = if mu > 0.0 && mv > 0.0 && (mv / mu).is_finite() {
        mv / mu
    } else {
        1.0
    };
    let phase = |s: [f64; 2]| s[1].atan2(s[0] * scale);

    let mut grid: Vec<(f64, [f64; 2])> = vec![(xs[0], states[0])];
    for i in 1..xs.len() {
        refine(sol, &phase, grid[grid.len() - 1], (xs[i], states[i]), &mut grid, 0);
    }

    let edge = tol.max(64.0 * f64::EPSILON * (hi - lo)).max(10.0 * sol.accuracy());
    let inside = |x: f64| x - lo > edge && hi - x > edge;
    let mut zeros = Vec::new();
    for i in 0..grid.len() {
        let (x, s) = grid[i];
        if s[0] == 0.0 && inside(x) {
            zeros.push(Zero {
                lo: x,
                hi: x,
                min_abs_v: s[1].abs(),
            });
            continue;
        }
        let Some(&(xr, sr)) = grid.get(i + 1) else { break };
        if s[0] * sr[0] < 0.0 {
            let z = bisect(sol, x, s, xr, sr, tol);
            if inside(z.midpoint()) {
                zeros.push(z);
            }
        }
    }
    ZeroList { zeros }
}

fn wrapped(d: f64) -> f64 {
    let mut d = d % (2.0 * PI);
    if d > PI {
        d -= 2.0 * PI;
    } else if d < -PI {
        d += 2.0 * PI;
    }
    d
}

fn refine(
    sol: &impl QuasiSolution,
    phase: &impl Fn([f64; 2]) -> f64,
    left: (f64, [f64; 2]),
    right: (f64, [f64; 2]),
    out: &mut Vec<(f64, [f64; 2])>,
    depth: u32,
) {
    let mid = 0.5 * (left.0 + right.0);
    let resolved = wrapped(phase(right.1) - phase(left.1)).abs() < FRAC_PI_2;
    if resolved || depth >= 48 || mid <= left.0 || mid >= right.0 {
        out.push(right);
        return;
    }
    let m = (mid, sol.state(mid));
    refine(sol, phase, left, m, out, depth + 1);
    refine(sol, phase, m, right, out, depth + 1);
}

fn bisect(sol: &impl QuasiSolution, mut l: f64, mut sl: [f64; 2], mut r: f64, mut sr: [f64; 2], tol: f64) -> Zero {
    while r - l > tol {
        let m = 0.5 * (l + r);
        if m <= l || m >= r {
            break;
        }
        let sm = sol.state(m);
        if sm[0] == 0.0 {
            return Zero {
                lo: m,
                hi: m,
                min_abs_v: sm[1].abs(),
            };
        }
        if sm[0] * sl[0] < 0.0 {
            r = m;
            sr = sm;
        } else {
            l = m;
            sl = sm;
        }
    }
    Zero {
        lo: l,
        hi: r,
        min_abs_v: sl[1].abs().min(sr[1].abs()),
    }
}
