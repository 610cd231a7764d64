//! Closed-form exponential of a real 2×2 matrix.

pub type Mat2 = [[f64; 2]; 2];

pub fn mat_vec(m: &Mat2, u: [f64; 2]) -> [f64; 2] {
    [m[0][0] * u[0] + m[0][1] * u[1], m[1][0] * u[0] + m[1][1] * u[1]]
}

/// `exp(m t)`.
///
/// Writes `m = (τ/2) I + N` with `N² = δ I`, so that
/// `exp(m t) = e^{τt/2} (C I + S N)` where `C, S` are `cosh, sinh/√δ`
/// (or `cos, sin/√-δ`) of `t√|δ|`. Near `δ = 0` (nilpotent `N`, as in the
/// Jacobi embedding) both are evaluated by their Taylor series.
pub fn expm(m: &Mat2, t: f64) -> Mat2 {
    let half_tr = 0.5 * (m[0][0] + m[1][1]);
    let n = [[m[0][0] - half_tr, m[0][1]], [m[1][0], m[1][1] - half_tr]];
    let delta = n[0][0] * n[0][0] + n[0][1] * n[1][0];
    let z = delta * t * t;
    let (c, s) = if z.abs() < 1e-2 {
        // C = Σ z^k/(2k)!, S = t Σ z^k/(2k+1)!
        let mut c = 1.0;
        let mut s = 1.0;
        let mut term_c = 1.0;
        let mut term_s = 1.0;
        for k in 1..10 {
            let k = k as f64;
            term_c *= z / ((2.0 * k - 1.0) * (2.0 * k));
            term_s *= z / ((2.0 * k) * (2.0 * k + 1.0));
            c += term_c;
            s += term_s;
        }
        (c, s * t)
    } else if delta > 0.0 {
        let w = delta.sqrt();
        ((w * t).cosh(), (w * t).sinh() / w)
    } else {
        let w = (-delta).sqrt();
        ((w * t).cos(), (w * t).sin() / w)
    };
    let g = (half_tr * t).exp();
    [
        [g * (c + s * n[0][0]), g * s * n[0][1]],
        [g * s * n[1][0], g * (c + s * n[1][1])],
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn taylor(m: &Mat2, t: f64) -> Mat2 {
        let mut out = [[1.0, 0.0], [0.0, 1.0]];
        let mut term = out;
        for k in 1..60 {
            let mut next = [[0.0; 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    next[i][j] = (term[i][0] * m[0][j] + term[i][1] * m[1][j]) * t / k as f64;
                }
            }
            term = next;
            for i in 0..2 {
                for j in 0..2 {
                    out[i][j] += term[i][j];
                }
            }
        }
        out
    }

    #[test]
    fn matches_taylor_series() {
        let cases: [Mat2; 5] = [
            [[0.0, 1.0], [-1.0, 0.0]],
            [[0.3, 2.0], [0.5, -0.1]],
            [[-0.2, 1.0], [-4.0, 0.7]],
            [[1.0, 1.0], [-1.0, -1.0]],
            [[0.0, 0.0], [0.0, 0.0]],
        ];
        for m in &cases {
            for t in [0.0, 0.1, 1.0, 1.7] {
                let a = expm(m, t);
                let b = taylor(m, t);
                for i in 0..2 {
                    for j in 0..2 {
                        assert!((a[i][j] - b[i][j]).abs() < 1e-13 * (1.0 + b[i][j].abs()), "{m:?} {t}");
                    }
                }
            }
        }
    }

    #[test]
    fn nilpotent_is_linear() {
        // s = r = -2, p = 1, q = -p s²: the Jacobi embedding pattern
        let m = [[2.0, 1.0], [-4.0, -2.0]];
        let e = expm(&m, 1.0);
        assert_eq!(e, [[3.0, 1.0], [-4.0, -1.0]]);
    }
}
