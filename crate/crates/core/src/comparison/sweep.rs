use std::f64::consts::PI;

use rayon::prelude::*;

use crate::coeffs::CoefficientSet;
use crate::error::Result;
use crate::solver::{find_zeros, solve_ivp, theta_sweep, QuasiSolution, Solution};

/// Zero census of the target equation over initial directions.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepSummary {
    pub x0: f64,
    /// Number of directions in the uniform sweep.
    pub n: usize,
    /// Extra directions tried near the critical angle.
    pub refined: usize,
    /// Solutions (uniform plus refined) with at least one interior zero.
    pub with_zero: usize,
    /// Initial angles of solutions without an interior zero.
    pub zero_free: Vec<f64>,
    /// Smallest distance from an interior zero to an endpoint, over all
    /// solutions tested.
    pub closest_zero: Option<f64>,
}

impl SweepSummary {
    pub fn total(&self) -> usize {
        self.n + self.refined
    }

    pub fn all_have_zeros(&self) -> bool {
        self.zero_free.is_empty()
    }
}

/// Distance from the interior zeros of `sol` to the nearer endpoint
/// (`None` if there are no interior zeros).
fn margin(sol: &impl QuasiSolution, tol: f64) -> Option<f64> {
    let (a, b) = sol.coefficients().interval();
    let zeros = find_zeros(sol, a, b, tol);
    let first = zeros.as_slice().first()?.midpoint();
    let last = zeros.as_slice().last()?.midpoint();
    Some((first - a).min(b - last))
}

fn start_point(c: &CoefficientSet) -> f64 {
    let (a, b) = c.interval();
    if c.singular().at_a {
        if c.singular().at_b {
            0.5 * (a + b)
        } else {
            b
        }
    } else {
        a
    }
}

/// Sweep `n` initial directions of the target equation, then zoom in
/// around the direction whose zero sits closest to an endpoint, where a
/// zero-free solution would first appear.
pub fn sweep_target(c: &CoefficientSet, n: usize, tol: f64) -> Result<SweepSummary> {
    let x0 = start_point(c);
    let sols = theta_sweep(c, x0, n, tol)?;
    let thetas: Vec<f64> = (0..n).map(|j| PI * j as f64 / n as f64).collect();
    let margins: Vec<Option<f64>> = sols.par_iter().map(|s| margin(s, tol)).collect();

    let mut summary = SweepSummary {
        x0,
        n,
        refined: 0,
        with_zero: 0,
        zero_free: Vec::new(),
        closest_zero: None,
    };
    let record = |theta: f64, m: Option<f64>, summary: &mut SweepSummary| match m {
        Some(d) => {
            summary.with_zero += 1;
            summary.closest_zero = Some(summary.closest_zero.map_or(d, |c: f64| c.min(d)));
        }
        None => summary.zero_free.push(theta),
    };
    for (theta, m) in thetas.iter().zip(&margins) {
        record(*theta, *m, &mut summary);
    }

    // deterministic choice: smallest margin, lowest index on ties
    let mut best = 0;
    for j in 1..n {
        let key = |m: Option<f64>| m.unwrap_or(-1.0);
        if key(margins[j]) < key(margins[best]) {
            best = j;
        }
    }
    let mut tested = thetas.clone();
    let mut center = thetas[best];
    let mut half_width = PI / n as f64;
    for _level in 0..4 {
        let k = 16;
        let trial: Vec<f64> = (0..=k)
            .map(|i| center - half_width + 2.0 * half_width * i as f64 / k as f64)
            .filter(|t| !tested.contains(&t.rem_euclid(PI)))
            .collect();
        let found: Vec<Result<Option<f64>>> = trial
            .par_iter()
            .map(|&t| solve_ivp(c, x0, t.cos(), t.sin(), tol).map(|s: Solution| margin(&s, tol)))
            .collect();
        let mut local_best = (center, f64::INFINITY);
        for (&t, m) in trial.iter().zip(found) {
            let m = m?;
            summary.refined += 1;
            tested.push(t.rem_euclid(PI));
            record(t.rem_euclid(PI), m, &mut summary);
            let d = m.unwrap_or(-1.0);
            if d < local_best.1 {
                local_best = (t, d);
            }
        }
        center = local_best.0;
        half_width /= 8.0;
    }
    summary.zero_free.sort_by(f64::total_cmp);
    Ok(summary)
}
