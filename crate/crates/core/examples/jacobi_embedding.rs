//! A Jacobi recurrence, its discrete certificate, and the continuous
//! problem with piecewise-constant coefficients that reproduces it.

use sturmcmp::jacobi::{discrete_compare, embed, embedded_solution, solve_recurrence, JacobiProblem};
use sturmcmp::solver::QuasiSolution;

fn main() -> sturmcmp::Result<()> {
    // α = 1, β = 0 gives u = 0, 1, 0, -1, 0, …
    let tilde = JacobiProblem::from_beta(0, 3, vec![1.0; 3], vec![0.0; 2])?;
    let target = JacobiProblem::new(0, 3, vec![1.0; 3], vec![-3.0; 2])?;
    let u = solve_recurrence(&tilde, 0.0, 1.0)?;
    println!("u~ = {:?}", u.values());
    let report = discrete_compare(&tilde, &target, &u, 64, 1e-12)?;
    print!("{}", report.table());

    // a less regular recurrence and its embedding
    let p = JacobiProblem::new(0, 6, vec![1.0, 2.0, 0.5, 1.5, 3.0, 1.0], vec![0.3, -1.2, -2.5, -0.4, -3.0])?;
    let u = solve_recurrence(&p, 0.0, 1.0)?;
    println!("u = {:.6?}", u.values());
    match embed(&p, &u) {
        Ok((c, b)) => {
            let sol = embedded_solution(&c, &u, 1e-12)?;
            println!("embedding on [0, {b:.6}]");
            for n in 0..=(b.floor() as i64) {
                println!("    n = {n}: recurrence {:+.12}  continuous {:+.12}", u.at(n), sol.u(n as f64));
            }
        }
        Err(e) => println!("no embedding: {e}"),
    }
    Ok(())
}
