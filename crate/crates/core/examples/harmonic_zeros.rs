//! Solve -u'' - 4u = 0 on (0, 2π) and list the zeros of a few solutions.

use std::f64::consts::PI;

use sturmcmp::coeffs::CoefficientSet;
use sturmcmp::solver::{find_zeros, solve_ivp, QuasiSolution};

fn main() -> sturmcmp::Result<()> {
    let c = CoefficientSet::constant(0.0, 2.0 * PI, 1.0, -4.0, 0.0, 0.0)?;
    for theta in [0.0, 0.4, PI / 2.0] {
        let sol = solve_ivp(&c, 0.0, f64::cos(theta), f64::sin(theta), 1e-12)?;
        let zeros = find_zeros(&sol, 0.0, 2.0 * PI, 1e-12);
        println!("θ = {theta:.3}: {} zeros", zeros.len());
        for z in zeros.iter() {
            println!("    {:.12}", z.midpoint());
        }
        println!("    u(π/4) = {:+.12}", sol.u(PI / 4.0));
    }
    Ok(())
}
