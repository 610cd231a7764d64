//! A point interaction: -u'' - 4δ(x - 1/2) u = 0 on (0, 1) has the tent
//! solution min(x, 1 - x). Adding a further unit point mass to the
//! difference of potentials at 1/4 gives the certificate -ũ(1/4)² = -1/16.

use sturmcmp::coeffs::{Expr, Func};
use sturmcmp::distributional::{distributional_compare, jump_residual, DistributionalProblem, Jump, PotentialAntiderivative};
use sturmcmp::search::shoot_vanishing;
use sturmcmp::solver::QuasiSolution;

fn step(c: f64) -> Expr {
    Expr::call(Func::Step, Expr::x() - Expr::num(c))
}

fn main() -> sturmcmp::Result<()> {
    let tilde_v = PotentialAntiderivative::from_expr(0.0, 1.0, Expr::num(-4.0) * step(0.5), vec![Jump { at: 0.5, weight: -4.0 }])?;
    let v = PotentialAntiderivative::from_expr(
        0.0,
        1.0,
        Expr::num(-4.0) * step(0.5) - step(0.25),
        vec![Jump { at: 0.25, weight: -1.0 }, Jump { at: 0.5, weight: -4.0 }],
    )?;
    let prob = DistributionalProblem::new(tilde_v.clone(), v)?;
    let u = shoot_vanishing(prob.tilde(), 1e-12)?;
    for x in [0.25, 0.5, 0.75, 1.0] {
        println!("u~({x}) = {:+.15}", u.u(x));
    }
    println!("jump residual at 1/2: {:.1e}", jump_residual(&tilde_v, &u, tilde_v.jumps()[0]));
    let report = distributional_compare(&prob, &u, 64, 1e-12)?;
    print!("{}", report.table());
    Ok(())
}
