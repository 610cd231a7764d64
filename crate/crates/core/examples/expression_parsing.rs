//! Coefficient expressions: parsing, parameters, evaluation and the
//! breakpoints implied by `step`.

use std::collections::BTreeMap;

use sturmcmp::coeffs::{Expr, PiecewiseFunction};

fn main() {
    let mut params = BTreeMap::new();
    params.insert("k".to_string(), 1.672);
    for text in ["k - 1 - x", "exp(0.6*x)*sin(x)^2", "-4*step(x - 1/2) + sqrt(abs(x - pi/4))", "1 +", "y * 2"] {
        match Expr::parse(text, &params) {
            Ok(e) => println!("{text:<42} -> {e}   f(1) = {:.6}", e.eval(1.0)),
            Err(err) => println!("{text:<42} -> error: {err}"),
        }
    }

    let e = Expr::parse("x + step(x - 0.3) - 2*step(x - 0.7)", &params).unwrap();
    let f = PiecewiseFunction::from_expr(0.0, 1.0, e, &[]).unwrap();
    println!("breakpoints {:?}", f.breakpoints());
    for x in [0.3, 0.7] {
        println!("f({x}-) = {:.3}  f({x}) = {:.3}", f.eval_left(x), f.eval(x));
    }
}
