//! Adaptive Gauss-Kronrod quadrature with integrable endpoint
//! singularities, and the integrability test behind coefficient validation.

use sturmcmp::coeffs::{integrate, Domain, QuadOptions};
use sturmcmp::coeffs::{CoefficientSet, Endpoints, Expr, PiecewiseFunction};

fn main() {
    let opts = QuadOptions::default();
    let singular = Domain::new(0.0, 1.0).with_singular(Endpoints { at_a: true, at_b: false });
    let r = integrate(|x| 1.0 / x.sqrt(), &singular, &opts).unwrap();
    println!("∫ x^(-1/2) = {:.12} ± {:.1e}", r.value, r.error);
    let r = integrate(|x| x.ln(), &singular, &opts).unwrap();
    println!("∫ ln x     = {:.12} ± {:.1e}", r.value, r.error);
    match integrate(|x| 1.0 / x, &singular, &opts) {
        Ok(r) => println!("∫ 1/x      = {}", r.value),
        Err(e) => println!("∫ 1/x      : {e}"),
    }

    // p = sqrt(x) is allowed (1/p integrable); q = 1/x is rejected
    let a = |e: &str| PiecewiseFunction::from_expr(0.0, 1.0, Expr::parse(e, &Default::default()).unwrap(), &[])
        .unwrap()
        .with_singular(Endpoints { at_a: true, at_b: false });
    let ok = CoefficientSet::new(a("sqrt(x)"), a("0"), a("0"), a("0"));
    println!("p = sqrt(x): {}", if ok.is_ok() { "accepted" } else { "rejected" });
    if let Err(e) = CoefficientSet::new(a("1"), a("1/x"), a("0"), a("0")) {
        println!("q = 1/x: {e}");
    }
}
