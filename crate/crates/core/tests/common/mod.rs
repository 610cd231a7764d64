#![allow(dead_code)]

use std::collections::BTreeMap;

use rand::Rng;
use sturmcmp::coeffs::{CoefficientSet, Expr};
use sturmcmp::solver::{find_zeros, solve_ivp};

pub fn expr(text: &str) -> Expr {
    Expr::parse(text, &BTreeMap::new()).unwrap()
}

/// Smooth coefficients with `p > 0` and `q` negative enough to oscillate.
#[derive(Debug, Clone, Copy)]
pub struct SmoothParams {
    pub p_growth: f64,
    pub p_wiggle: f64,
    pub lambda: f64,
    pub q_wiggle: f64,
    pub r0: f64,
    pub r1: f64,
    pub s0: f64,
}

impl SmoothParams {
    pub fn random(rng: &mut impl Rng) -> Self {
        SmoothParams {
            p_growth: rng.gen_range(-0.3..0.3),
            p_wiggle: rng.gen_range(-0.4..0.4),
            lambda: rng.gen_range(2.0..12.0),
            q_wiggle: rng.gen_range(-1.5..1.5),
            r0: rng.gen_range(-0.5..0.5),
            r1: rng.gen_range(-0.2..0.2),
            s0: rng.gen_range(-0.5..0.5),
        }
    }

    pub fn build(&self, a: f64, b: f64) -> CoefficientSet {
        let p = expr(&format!("exp({}*x)*(1.5 + {}*sin(2*x))", self.p_growth, self.p_wiggle));
        let q = expr(&format!("-({} + {}*cos(3*x))", self.lambda, self.q_wiggle));
        let r = expr(&format!("{} + {}*x", self.r0, self.r1));
        let s = expr(&format!("{}*sin(x)", self.s0));
        CoefficientSet::from_exprs(a, b, p, q, r, s).unwrap()
    }

    /// The same coefficients on `[0, z]`, `z` the first zero after 0 of the
    /// solution with `(u, v)(0) = (0, 1)`, so that a solution vanishing at
    /// both ends exists.
    pub fn build_vanishing(&self) -> CoefficientSet {
        let long = self.build(0.0, 8.0);
        let u = solve_ivp(&long, 0.0, 0.0, 1.0, 1e-13).unwrap();
        let z = find_zeros(&u, 0.0, 8.0, 1e-14).as_slice()[0].midpoint();
        self.build(0.0, z)
    }
}
