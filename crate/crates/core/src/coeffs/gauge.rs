use super::antiderivative::Antiderivative;
use super::expr::Expr;
use super::piecewise::PiecewiseFunction;
use crate::error::Result;

/// Absolutely continuous function `F(x) = F(a) + ∫_a^x f`, stored through
/// its derivative.
#[derive(Debug, Clone)]
pub struct GaugeFunction {
    derivative: PiecewiseFunction,
    value_at_a: f64,
    anti: Antiderivative,
}

impl GaugeFunction {
    pub fn new(derivative: PiecewiseFunction, value_at_a: f64) -> Result<Self> {
        let anti = Antiderivative::new(&derivative, 1e-12)?;
        Ok(GaugeFunction {
            derivative,
            value_at_a,
            anti,
        })
    }

    pub fn zero(a: f64, b: f64) -> Result<Self> {
        GaugeFunction::new(PiecewiseFunction::constant(a, b, 0.0)?, 0.0)
    }

    /// `x -> c·x`.
    pub fn linear(a: f64, b: f64, c: f64) -> Result<Self> {
        GaugeFunction::new(PiecewiseFunction::constant(a, b, c)?, c * a)
    }

    /// Gauge with derivative given by `expr`, vanishing at `a`.
    pub fn from_derivative_expr(a: f64, b: f64, expr: Expr) -> Result<Self> {
        GaugeFunction::new(PiecewiseFunction::from_expr(a, b, expr, &[])?, 0.0)
    }

    /// `k·self`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        let derivative = self.derivative.map(|e| Expr::Num(k) * e.clone());
        GaugeFunction::new(derivative, k * self.value_at_a)
    }

    pub fn interval(&self) -> (f64, f64) {
        self.derivative.interval()
    }

    pub fn derivative(&self) -> &PiecewiseFunction {
        &self.derivative
    }

    pub fn value_at_a(&self) -> f64 {
        self.value_at_a
    }

    pub fn value(&self, x: f64) -> f64 {
        self.value_at_a + self.anti.eval(x)
    }

    /// Right-continuous derivative.
    pub fn deriv(&self, x: f64) -> f64 {
        self.derivative.eval(x)
    }

    pub fn error_bound(&self) -> f64 {
        self.anti.error_bound()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_gauge() {
        let g = GaugeFunction::linear(0.0, 3.0, 0.6).unwrap();
        assert!((g.value(2.0) - 1.2).abs() < 1e-14);
        assert_eq!(g.deriv(1.0), 0.6);
        let g = GaugeFunction::linear(1.0, 3.0, 2.0).unwrap();
        assert_eq!(g.value(1.0), 2.0);
        assert!((g.scaled(0.5).unwrap().value(3.0) - 3.0).abs() < 1e-14);
    }
}
