//! The `sturmcmp` command line.
//!
//! Exit codes: `0` when a verdict (or the requested output) was produced,
//! including inconclusive verdicts; `1` when a hypothesis of the invoked
//! theorem fails for the supplied data; `2` for malformed input.

mod problem_file;

pub use problem_file::{FileError, ProblemFile, ProblemKind};

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::coeffs::{CoefficientSet, Expr, GaugeFunction};
use crate::comparison::{compare, separation, sturm_picone, ComparisonProblem};
use crate::distributional::{distributional_compare, DistributionalProblem};
use crate::error::Error;
use crate::jacobi::{changes_sign, discrete_compare, solve_recurrence};
use crate::search::{
    certificate_threshold, leighton_coefficients, leighton_driver, leighton_tilde_solution, linear_gauge_scan,
    oscillation_threshold, shoot_vanishing, GaugeTemplate,
};
use crate::solver::{find_zeros, solve_ivp, QuasiSolution};

pub const EXIT_OK: i32 = 0;
pub const EXIT_HYPOTHESIS: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "sturmcmp",
    version,
    about = "Oscillation certificates for -(p(u'+su))' + rp(u'+su) + qu = 0"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Clone)]
pub struct Common {
    /// Target accuracy of solver and quadrature.
    #[arg(long, default_value_t = 1e-10, value_parser = positive)]
    pub tol: f64,
    /// Also write the CSV output to this file.
    #[arg(long, value_name = "PATH")]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Solve the initial-value problem with (u, v) = (cos θ, sin θ) at the
    /// left endpoint (right endpoint if the left one is singular).
    Solve {
        /// Problem file with a [coefficients] section.
        file: PathBuf,
        /// Initial direction θ; accepts expressions such as `pi/2`.
        #[arg(long, default_value = "pi/2", value_parser = angle)]
        theta: f64,
        /// Report the solution at these points instead of a uniform grid.
        #[arg(long, value_delimiter = ',', value_parser = number)]
        at: Vec<f64>,
        #[command(flatten)]
        common: Common,
    },
    /// Locate the interior zeros of the solution started from θ.
    Zeros {
        /// Problem file with a [coefficients] section.
        file: PathBuf,
        /// Initial direction θ.
        #[arg(long, default_value = "pi/2", value_parser = angle)]
        theta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Main comparison theorem: evaluate the certificate for a tilde and a
    /// target problem, with the gauges of the [gauge] section (zero if
    /// absent), and check it against a sweep of target solutions.
    Compare {
        /// Problem file of the tilde (reference) equation.
        tilde: PathBuf,
        /// Problem file of the target equation.
        target: PathBuf,
        /// Number of initial directions in the sweep.
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Sturm separation theorem: the solution vanishing at both endpoints
    /// against the solution started from θ.
    Separation {
        /// Problem file with a [coefficients] section.
        file: PathBuf,
        /// Initial direction θ of the second solution.
        #[arg(long, default_value = "0", value_parser = angle)]
        theta: f64,
        #[command(flatten)]
        common: Common,
    },
    /// Sturm-Picone comparison theorem with drift terms.
    Picone {
        /// Problem file of the tilde (reference) equation.
        tilde: PathBuf,
        /// Problem file of the target equation.
        target: PathBuf,
        /// Number of initial directions in the sweep.
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison theorem for Jacobi difference equations. With one file,
    /// print the solution started from (cos θ, sin θ); with two, compare.
    Jacobi {
        /// [jacobi] problem file of the tilde recurrence.
        tilde: PathBuf,
        /// [jacobi] problem file of the target recurrence.
        target: Option<PathBuf>,
        /// Initial direction θ of (u_N0, u_N0+1) for a single file.
        #[arg(long, default_value = "pi/2", value_parser = angle)]
        theta: f64,
        /// Number of initial directions in the sweep.
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Comparison theorem for Schrödinger equations with distributional
    /// potentials.
    Distro {
        /// Problem file of the tilde (reference) equation.
        tilde: PathBuf,
        /// Problem file of the target equation.
        target: PathBuf,
        /// Number of initial directions in the sweep.
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        #[command(flatten)]
        common: Common,
    },
    /// Leighton's example -u'' + (k - 1 - x)u = 0 on (0, π) against sin,
    /// with gauges G = c x, F = c x / 2.
    Leighton {
        /// Parameter k of the target equation.
        #[arg(long, default_value_t = 2.0, value_parser = number)]
        k: f64,
        /// Gauge slope.
        #[arg(long, default_value_t = 0.0, value_parser = number)]
        c: f64,
        /// Number of initial directions in the sweep.
        #[arg(long, default_value_t = 64)]
        sweep: usize,
        /// Also bracket the certificate threshold for this c and the true
        /// oscillation threshold in k.
        #[arg(long)]
        threshold: bool,
        #[command(flatten)]
        common: Common,
    },
    /// Scan the linear gauge family G = c x, F = c x / 2. Without files,
    /// scans Leighton's example at --k.
    Scan {
        /// Problem file of the tilde (reference) equation.
        tilde: Option<PathBuf>,
        /// Problem file of the target equation.
        target: Option<PathBuf>,
        /// Parameter k of Leighton's example, used without files.
        #[arg(long, default_value_t = 1.672, value_parser = number)]
        k: f64,
        /// Range of c as `lo,hi`.
        #[arg(long, default_value = "0,1.2", value_parser = range)]
        range: (f64, f64),
        /// Number of grid points before refinement.
        #[arg(long, default_value_t = 25)]
        steps: usize,
        #[command(flatten)]
        common: Common,
    },
}

fn number(s: &str) -> Result<f64, String> {
    let e = Expr::parse(s.trim(), &BTreeMap::new()).map_err(|e| e.to_string())?;
    e.constant_value()
        .filter(|v| v.is_finite())
        .ok_or_else(|| format!("`{s}` is not a finite constant"))
}

fn positive(s: &str) -> Result<f64, String> {
    let v = number(s)?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("{v} must be positive"))
    }
}

fn angle(s: &str) -> Result<f64, String> {
    number(s)
}

fn range(s: &str) -> Result<(f64, f64), String> {
    let (lo, hi) = s.split_once(',').ok_or_else(|| format!("expected `lo,hi`, got `{s}`"))?;
    let (lo, hi) = (number(lo)?, number(hi)?);
    if lo > hi {
        return Err(format!("lo = {lo} exceeds hi = {hi}"));
    }
    Ok((lo, hi))
}

/// `(cos θ, sin θ)`, exact at multiples of `π/2`.
fn direction(theta: f64) -> (f64, f64) {
    let quarter = theta / (PI / 2.0);
    if quarter == quarter.round() {
        match (quarter as i64).rem_euclid(4) {
            0 => (1.0, 0.0),
            1 => (0.0, 1.0),
            2 => (-1.0, 0.0),
            _ => (0.0, -1.0),
        }
    } else {
        (theta.cos(), theta.sin())
    }
}

/// What went wrong, and how the process should exit.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<FileError> for Failure {
    fn from(e: FileError) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        }
    }
}

fn failure(context: &str, e: Error) -> Failure {
    Failure {
        code: if e.is_hypothesis_violation() { EXIT_HYPOTHESIS } else { EXIT_INPUT },
        message: format!("{context}: {e}"),
    }
}

fn ctx(path: &Path) -> String {
    path.display().to_string()
}

fn pair(tilde: &Path, target: &Path) -> String {
    format!("{} vs {}", tilde.display(), target.display())
}

/// Output of a successful command.
pub struct Output {
    pub text: String,
    pub csv: String,
}

fn start_point(c: &CoefficientSet) -> Result<f64, Error> {
    let (a, b) = c.interval();
    match (c.singular().at_a, c.singular().at_b) {
        (false, _) => Ok(a),
        (true, false) => Ok(b),
        (true, true) => Err(Error::SingularInitialPoint { x0: a }),
    }
}

fn gauges(
    tilde: &ProblemFile,
    target: &ProblemFile,
    a: f64,
    b: f64,
) -> Result<(GaugeFunction, GaugeFunction), Failure> {
    let (_, g1) = tilde.coefficients()?;
    let (_, g2) = target.coefficients()?;
    match (g1, g2) {
        (Some(_), Some(_)) => Err(Failure {
            code: EXIT_INPUT,
            message: format!(
                "{}: [gauge] is given in both files; keep it in one",
                tilde.path.display()
            ),
        }),
        (Some(g), None) | (None, Some(g)) => Ok(g.clone()),
        (None, None) => {
            let z = GaugeFunction::zero(a, b).map_err(|e| failure("gauge", e))?;
            Ok((z.clone(), z))
        }
    }
}

pub fn execute(command: &Command) -> Result<Output, Failure> {
    match command {
        Command::Solve {
            file,
            theta,
            at,
            common,
        } => {
            let pf = ProblemFile::read(file)?;
            let (c, _) = pf.coefficients()?;
            let e = |err| failure(&ctx(file), err);
            let x0 = start_point(c).map_err(e)?;
            let (u0, v0) = direction(*theta);
            let sol = solve_ivp(c, x0, u0, v0, common.tol).map_err(e)?;
            let (a, b) = c.interval();
            let xs: Vec<f64> = if at.is_empty() {
                (0..=10).map(|i| a + (b - a) * i as f64 / 10.0).collect()
            } else {
                for &x in at {
                    if !(x >= a && x <= b) {
                        return Err(Failure {
                            code: EXIT_INPUT,
                            message: format!("--at: {x} is outside [{a}, {b}]"),
                        });
                    }
                }
                at.clone()
            };
            let mut text = format!("{:>22}  {:>22}  {:>22}\n", "x", "u", "v");
            let mut csv = String::from("x,u,v\n");
            for x in xs {
                let [u, v] = sol.state(x);
                let _ = writeln!(text, "{x:>22.15e}  {u:>22.15e}  {v:>22.15e}");
                let _ = writeln!(csv, "{x},{u},{v}");
            }
            let _ = writeln!(text, "steps {}  accuracy {:.3e}", sol.step_count(), sol.accuracy());
            Ok(Output { text, csv })
        }
        Command::Zeros { file, theta, common } => {
            let pf = ProblemFile::read(file)?;
            let (c, _) = pf.coefficients()?;
            let e = |err| failure(&ctx(file), err);
            let x0 = start_point(c).map_err(e)?;
            let (u0, v0) = direction(*theta);
            let sol = solve_ivp(c, x0, u0, v0, common.tol).map_err(e)?;
            let (a, b) = c.interval();
            let zeros = find_zeros(&sol, a, b, common.tol);
            let mut text = format!("{} interior zero(s)\n", zeros.len());
            let mut csv = String::from("lo,hi,midpoint\n");
            for z in zeros.iter() {
                let _ = writeln!(text, "  {:.15}  (bracket width {:.1e})", z.midpoint(), z.hi - z.lo);
                let _ = writeln!(csv, "{},{},{}", z.lo, z.hi, z.midpoint());
            }
            Ok(Output { text, csv })
        }
        Command::Compare {
            tilde,
            target,
            sweep,
            common,
        } => {
            let (tf, gf) = (ProblemFile::read(tilde)?, ProblemFile::read(target)?);
            let (kt, _) = tf.coefficients()?;
            let (kg, _) = gf.coefficients()?;
            let (a, b) = kt.interval();
            let (f, g) = gauges(&tf, &gf, a, b)?;
            let u = shoot_vanishing(kt, common.tol).map_err(|e| failure(&ctx(tilde), e))?;
            let e = |err| failure(&pair(tilde, target), err);
            let prob = ComparisonProblem::new(kt.clone(), kg.clone(), f, g).map_err(e)?;
            let report = compare(&prob, &u, *sweep, common.tol).map_err(e)?;
            Ok(Output {
                text: report.table(),
                csv: report.csv(),
            })
        }
        Command::Separation { file, theta, common } => {
            let pf = ProblemFile::read(file)?;
            let (c, _) = pf.coefficients()?;
            let e = |err| failure(&ctx(file), err);
            let tilde_u = shoot_vanishing(c, common.tol).map_err(e)?;
            let x0 = start_point(c).map_err(e)?;
            let (u0, v0) = direction(*theta);
            let u = solve_ivp(c, x0, u0, v0, common.tol).map_err(e)?;
            let report = separation(c, &tilde_u, &u, common.tol).map_err(e)?;
            Ok(Output {
                text: report.table(),
                csv: report.csv(),
            })
        }
        Command::Picone {
            tilde,
            target,
            sweep,
            common,
        } => {
            let (tf, gf) = (ProblemFile::read(tilde)?, ProblemFile::read(target)?);
            let (kt, _) = tf.coefficients()?;
            let (kg, _) = gf.coefficients()?;
            let u = shoot_vanishing(kt, common.tol).map_err(|e| failure(&ctx(tilde), e))?;
            let report =
                sturm_picone(kt, kg, &u, *sweep, common.tol).map_err(|e| failure(&pair(tilde, target), e))?;
            Ok(Output {
                text: report.table(),
                csv: report.csv(),
            })
        }
        Command::Jacobi {
            tilde,
            target,
            theta,
            sweep,
            common,
        } => {
            let tf = ProblemFile::read(tilde)?;
            let p = tf.jacobi()?;
            match target {
                None => {
                    let (u0, u1) = direction(*theta);
                    let u = solve_recurrence(p, u0, u1).map_err(|e| failure(&ctx(tilde), e))?;
                    let mut text = String::new();
                    let mut csv = String::from("n,u\n");
                    for (i, x) in u.values().iter().enumerate() {
                        let n = p.n0() + i as i64;
                        let _ = writeln!(text, "{n:>6}  {x:>22.15e}");
                        let _ = writeln!(csv, "{n},{x}");
                    }
                    let _ = writeln!(text, "changes sign: {}", changes_sign(&u));
                    Ok(Output { text, csv })
                }
                Some(target) => {
                    let gf = ProblemFile::read(target)?;
                    let q = gf.jacobi()?;
                    let e = |err| failure(&pair(tilde, target), err);
                    let u = solve_recurrence(p, 0.0, 1.0).map_err(e)?;
                    let report = discrete_compare(p, q, &u, *sweep, common.tol).map_err(e)?;
                    Ok(Output {
                        text: report.table(),
                        csv: report.csv(),
                    })
                }
            }
        }
        Command::Distro {
            tilde,
            target,
            sweep,
            common,
        } => {
            let (tf, gf) = (ProblemFile::read(tilde)?, ProblemFile::read(target)?);
            let e = |err| failure(&pair(tilde, target), err);
            let prob = DistributionalProblem::new(tf.potential()?.clone(), gf.potential()?.clone()).map_err(e)?;
            let u = shoot_vanishing(prob.tilde(), common.tol).map_err(|e| failure(&ctx(tilde), e))?;
            let report = distributional_compare(&prob, &u, *sweep, common.tol).map_err(e)?;
            Ok(Output {
                text: report.table(),
                csv: report.csv(),
            })
        }
        Command::Leighton {
            k,
            c,
            sweep,
            threshold,
            common,
        } => {
            let e = |err| failure("leighton", err);
            let report = leighton_driver(*k, *c, *sweep, common.tol).map_err(e)?;
            let mut text = format!("Leighton example, k = {k}, G = {c}*x, F = G/2\n");
            text.push_str(&report.table());
            if *threshold {
                let kc = certificate_threshold(*c, common.tol).map_err(e)?;
                let (lo, hi) = oscillation_threshold(1.0, 2.0, 1e-9, common.tol.min(1e-12)).map_err(e)?;
                let _ = writeln!(text, "certificate threshold for this c   k = {kc:.9}");
                let _ = writeln!(text, "oscillation threshold bracket      k in [{lo:.9}, {hi:.9}]");
            }
            Ok(Output {
                text,
                csv: report.csv(),
            })
        }
        Command::Scan {
            tilde,
            target,
            k,
            range,
            steps,
            common,
        } => {
            let scan = match (tilde, target) {
                (Some(tilde), Some(target)) => {
                    let (tf, gf) = (ProblemFile::read(tilde)?, ProblemFile::read(target)?);
                    let (kt, _) = tf.coefficients()?;
                    let (kg, _) = gf.coefficients()?;
                    let u = shoot_vanishing(kt, common.tol).map_err(|e| failure(&ctx(tilde), e))?;
                    let t = GaugeTemplate {
                        tilde: kt,
                        target: kg,
                        tilde_u: &u,
                    };
                    linear_gauge_scan(&t, *range, *steps, common.tol).map_err(|e| failure(&pair(tilde, target), e))?
                }
                (None, None) => {
                    let e = |err| failure("scan", err);
                    let (kt, kg) = leighton_coefficients(*k).map_err(e)?;
                    let u = leighton_tilde_solution(&kt).map_err(e)?;
                    let t = GaugeTemplate {
                        tilde: &kt,
                        target: &kg,
                        tilde_u: &u,
                    };
                    linear_gauge_scan(&t, *range, *steps, common.tol).map_err(e)?
                }
                _ => {
                    return Err(Failure {
                        code: EXIT_INPUT,
                        message: "scan: give both a tilde and a target file, or neither".into(),
                    })
                }
            };
            Ok(Output {
                text: scan.table_text(),
                csv: scan.csv(),
            })
        }
    }
}

fn csv_path(command: &Command) -> Option<&Path> {
    let common = match command {
        Command::Solve { common, .. }
        | Command::Zeros { common, .. }
        | Command::Compare { common, .. }
        | Command::Separation { common, .. }
        | Command::Picone { common, .. }
        | Command::Jacobi { common, .. }
        | Command::Distro { common, .. }
        | Command::Leighton { common, .. }
        | Command::Scan { common, .. } => common,
    };
    common.csv.as_deref()
}

/// Parse `argv` (including the program name), run the command and write
/// the report to `out`, errors to `err`. Returns the exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                out.write_all(rendered.as_bytes())
            } else {
                err.write_all(rendered.as_bytes())
            };
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(output) => {
            let _ = out.write_all(output.text.as_bytes());
            if let Some(path) = csv_path(&cli.command) {
                if let Err(e) = std::fs::write(path, output.csv.as_bytes()) {
                    let _ = writeln!(err, "error: --csv {}: {e}", path.display());
                    return EXIT_INPUT;
                }
            }
            EXIT_OK
        }
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}
