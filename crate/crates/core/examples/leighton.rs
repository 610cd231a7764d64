//! Leighton's example: -u'' + (k - 1 - x) u = 0 on (0, π) compared with
//! -u'' - u = 0. With G = 0 the certificate is π(2k - π)/4; the gauge
//! G = 0.6 x pushes the certified range of k up to about 1.672, close to
//! the true threshold near 1.6757.

use std::f64::consts::PI;

use sturmcmp::search::{certificate_threshold, leighton_driver, oscillation_threshold};

fn main() -> sturmcmp::Result<()> {
    let tol = 1e-10;
    for (k, c) in [(2.0, 0.0), (1.672, 0.6), (1.676, 0.6)] {
        let report = leighton_driver(k, c, 64, tol)?;
        let cert = &report.certificate;
        println!("k = {k:<6} c = {c:<4} certificate = {:+.6e}  {}", cert.value, cert.verdict);
        if let Some(sweep) = &report.sweep {
            println!(
                "    {} of {} swept solutions vanish inside (0, π)",
                sweep.with_zero,
                sweep.total()
            );
        }
    }
    println!("closed form at k = 2, c = 0: {:.6e}", PI * (4.0 - PI) / 4.0);

    println!("certificate threshold for c = 0.6: k = {:.6}", certificate_threshold(0.6, tol)?);
    let (lo, hi) = oscillation_threshold(1.6, 1.7, 1e-8, 1e-12)?;
    println!("oscillation threshold:             k in [{lo:.8}, {hi:.8}]");
    Ok(())
}
