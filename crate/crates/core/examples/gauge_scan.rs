//! Scan the gauge family G = c x, F = c x / 2 for Leighton's example and
//! print the CSV table.

use sturmcmp::search::{leighton_coefficients, leighton_tilde_solution, linear_gauge_scan, GaugeTemplate};

fn main() -> sturmcmp::Result<()> {
    let (tilde, target) = leighton_coefficients(1.672)?;
    let u = leighton_tilde_solution(&tilde)?;
    let template = GaugeTemplate {
        tilde: &tilde,
        target: &target,
        tilde_u: &u,
    };
    let scan = linear_gauge_scan(&template, (0.0, 1.2), 25, 1e-8)?;
    print!("{}", scan.csv());
    println!("# best c = {:.8}, value = {:.6e}", scan.best_c, scan.best.value);
    Ok(())
}
