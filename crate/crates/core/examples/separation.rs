//! Sturm separation: the zeros of independent solutions interlace. The
//! solution of -u'' - 9u = 0 vanishing at both ends of (0, π) is compared
//! with a second solution, then two solutions of -(e^{0.3x} u')' - (6 + x)u = 0
//! are listed side by side.

use std::f64::consts::PI;

use sturmcmp::coeffs::{CoefficientSet, Expr, Func};
use sturmcmp::comparison::separation;
use sturmcmp::search::shoot_vanishing;
use sturmcmp::solver::{find_zeros, solve_ivp};

fn main() -> sturmcmp::Result<()> {
    // -u'' - 9u = 0 on (0, π): sin 3x vanishes at both ends
    let c = CoefficientSet::constant(0.0, PI, 1.0, -9.0, 0.0, 0.0)?;
    let tilde_u = shoot_vanishing(&c, 1e-12)?;
    let u = solve_ivp(&c, 0.0, 1.0, 0.5, 1e-12)?;
    let report = separation(&c, &tilde_u, &u, 1e-12)?;
    print!("{}", report.table());

    // variable coefficients: zeros of two solutions alternate
    let p = Expr::call(Func::Exp, Expr::x() * Expr::num(0.3));
    let q = Expr::num(-6.0) - Expr::x();
    let c = CoefficientSet::from_exprs(0.0, 2.0 * PI, p, q, Expr::num(0.0), Expr::num(0.0))?;
    let u1 = solve_ivp(&c, 0.0, 0.0, 1.0, 1e-12)?;
    let u2 = solve_ivp(&c, 0.0, 1.0, 0.0, 1e-12)?;
    let z1 = find_zeros(&u1, 0.0, 2.0 * PI, 1e-12).locations();
    let z2 = find_zeros(&u2, 0.0, 2.0 * PI, 1e-12).locations();
    println!("zeros of u1: {z1:.4?}");
    println!("zeros of u2: {z2:.4?}");
    Ok(())
}
