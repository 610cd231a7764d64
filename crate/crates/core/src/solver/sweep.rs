use std::f64::consts::PI;

use rayon::prelude::*;

use super::{solve_ivp, Solution};
use crate::coeffs::CoefficientSet;
use crate::error::{Error, Result};

/// `(cos θ, sin θ)` for `θ = jπ/n`, exact on the axes.
pub fn theta_state(j: usize, n: usize) -> [f64; 2] {
    if j == 0 {
        [1.0, 0.0]
    } else if 2 * j == n {
        [0.0, 1.0]
    } else {
        let theta = PI * j as f64 / n as f64;
        [theta.cos(), theta.sin()]
    }
}

/// Solutions with `(u, v)(x0) = (cos θ_j, sin θ_j)`, `θ_j = jπ/n`,
/// `j = 0..n`. Up to sign and scale these are all real solutions.
pub fn theta_sweep(c: &CoefficientSet, x0: f64, n: usize, tol: f64) -> Result<Vec<Solution>> {
    if n < 2 {
        return Err(Error::invalid(format!("sweep needs at least 2 directions, got {n}")));
    }
    (0..n)
        .into_par_iter()
        .map(|j| {
            let [u, v] = theta_state(j, n);
            solve_ivp(c, x0, u, v, tol)
        })
        .collect()
}
