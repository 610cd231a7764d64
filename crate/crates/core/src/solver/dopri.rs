//! Dormand-Prince 5(4) with Hairer's continuous extension, specialized to
//! linear 2×2 systems `U' = M(x) U`.

use super::expm::{mat_vec, Mat2};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Dense interpolant of one accepted step from `x_old` with step `h`.
#[derive(Debug, Clone, Copy)]
pub struct DenseStep {
    pub x_old: f64,
    pub h: f64,
    rcont: [[f64; 2]; 5],
}

impl DenseStep {
    pub fn eval(&self, x: f64) -> [f64; 2] {
        let theta = (x - self.x_old) / self.h;
        let theta1 = 1.0 - theta;
        let r = &self.rcont;
        let mut out = [0.0; 2];
        for i in 0..2 {
            out[i] = r[0][i] + theta * (r[1][i] + theta1 * (r[2][i] + theta * (r[3][i] + theta1 * r[4][i])));
        }
        out
    }
}

pub struct Attempt {
    pub y_new: [f64; 2],
    /// RMS error scaled by `atol + rtol·|y|`.
    pub err: f64,
    pub dense: DenseStep,
    pub k_last: [f64; 2],
}

/// One trial step; `k1 = M(x) y` is passed in (first-same-as-last).
pub fn attempt(m: &impl Fn(f64) -> Mat2, x: f64, y: [f64; 2], k1: [f64; 2], h: f64, tol: f64) -> Attempt {
    let f = |t: f64, u: [f64; 2]| mat_vec(&m(t), u);
    let comb = |terms: &[(f64, [f64; 2])]| {
        let mut out = y;
        for &(c, k) in terms {
            out[0] += h * c * k[0];
            out[1] += h * c * k[1];
        }
        out
    };
    let k2 = f(x + C2 * h, comb(&[(A21, k1)]));
    let k3 = f(x + C3 * h, comb(&[(A31, k1), (A32, k2)]));
    let k4 = f(x + C4 * h, comb(&[(A41, k1), (A42, k2), (A43, k3)]));
    let k5 = f(x + C5 * h, comb(&[(A51, k1), (A52, k2), (A53, k3), (A54, k4)]));
    let k6 = f(x + h, comb(&[(A61, k1), (A62, k2), (A63, k3), (A64, k4), (A65, k5)]));
    let y_new = comb(&[(A71, k1), (A73, k3), (A74, k4), (A75, k5), (A76, k6)]);
    let k7 = f(x + h, y_new);

    let mut err_sq = 0.0;
    let mut rcont = [[0.0; 2]; 5];
    for i in 0..2 {
        let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
        let sk = tol + tol * y[i].abs().max(y_new[i].abs());
        err_sq += (e / sk).powi(2);

        let ydiff = y_new[i] - y[i];
        let bspl = h * k1[i] - ydiff;
        rcont[0][i] = y[i];
        rcont[1][i] = ydiff;
        rcont[2][i] = bspl;
        rcont[3][i] = ydiff - h * k7[i] - bspl;
        rcont[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
    }
    Attempt {
        y_new,
        err: (err_sq / 2.0).sqrt(),
        dense: DenseStep { x_old: x, h, rcont },
        k_last: k7,
    }
}
