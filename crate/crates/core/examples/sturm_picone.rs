//! Sturm-Picone comparison with a drift term: the target has smaller p,
//! smaller q and r = s = 0.05 x, so it oscillates at least as fast as
//! -u'' - u = 0 on (0, π).

use std::f64::consts::PI;

use sturmcmp::coeffs::{CoefficientSet, Expr};
use sturmcmp::comparison::sturm_picone;
use sturmcmp::search::shoot_vanishing;

fn main() -> sturmcmp::Result<()> {
    let tilde = CoefficientSet::constant(0.0, PI, 1.0, -1.0, 0.0, 0.0)?;
    let drift = Expr::num(0.05) * Expr::x();
    let target = CoefficientSet::from_exprs(0.0, PI, Expr::num(0.9), Expr::num(-1.5), drift.clone(), drift)?;
    let u = shoot_vanishing(&tilde, 1e-11)?;
    let report = sturm_picone(&tilde, &target, &u, 64, 1e-11)?;
    print!("{}", report.table());

    // a target with q > q~ is outside the theorem
    let weaker = CoefficientSet::constant(0.0, PI, 0.9, -0.5, 0.0, 0.0)?;
    match sturm_picone(&tilde, &weaker, &u, 64, 1e-11) {
        Err(e) => println!("q = -0.5: {e}"),
        Ok(_) => println!("q = -0.5: accepted"),
    }
    Ok(())
}
