//! Problem files.
//!
//! ```text
//! # comment to end of line
//! [interval]
//! a = 0
//! b = pi
//!
//! [params]
//! k = 1.672
//!
//! [coefficients]
//! p = 1
//! q = k - 1 - x
//! r = 0
//! s = 0
//! breakpoints = 0.5, 1      # optional
//! singular = a              # optional: a, b or both
//!
//! [gauge]                   # optional; F and G vanish at a
//! F_deriv = 0.3
//! G_deriv = 0.6
//! ```
//!
//! Instead of `[coefficients]` a file may hold a `[potential]` section
//!
//! ```text
//! [potential]
//! V = -4*step(x - 0.5)
//! jump at=0.5 weight=-4
//! ```
//!
//! or, without `[interval]`, a `[jacobi]` section
//!
//! ```text
//! [jacobi]
//! N0 = 0
//! N1 = 3
//! alpha = 1 1 1
//! v = -2 -2                 # or beta = ...
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};

use crate::coeffs::{CoefficientSet, Endpoints, Expr, GaugeFunction, PiecewiseFunction};
use crate::distributional::{Jump, PotentialAntiderivative};
use crate::jacobi::JacobiProblem;

/// A malformed problem file: which file, line and section, and why.
#[derive(Debug, Clone, PartialEq)]
pub struct FileError {
    pub path: PathBuf,
    pub line: Option<usize>,
    pub section: Option<String>,
    pub message: String,
}

impl fmt::Display for FileError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.path.display())?;
        if let Some(line) = self.line {
            write!(f, ":{line}")?;
        }
        if let Some(s) = &self.section {
            write!(f, ": [{s}]")?;
        }
        write!(f, ": {}", self.message)
    }
}

impl std::error::Error for FileError {}

/// `(F, G)` from a `[gauge]` section.
pub type GaugePair = (GaugeFunction, GaugeFunction);

#[derive(Debug, Clone)]
#[allow(clippy::large_enum_variant)]
pub enum ProblemKind {
    Coefficients {
        coeffs: CoefficientSet,
        gauge: Option<GaugePair>,
    },
    Potential(PotentialAntiderivative),
    Jacobi(JacobiProblem),
}

impl ProblemKind {
    pub fn name(&self) -> &'static str {
        match self {
            ProblemKind::Coefficients { .. } => "coefficients",
            ProblemKind::Potential(_) => "potential",
            ProblemKind::Jacobi(_) => "jacobi",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ProblemFile {
    pub path: PathBuf,
    pub params: BTreeMap<String, f64>,
    pub kind: ProblemKind,
}

const SECTIONS: [&str; 6] = ["interval", "params", "coefficients", "gauge", "potential", "jacobi"];

struct Entry {
    line: usize,
    key: String,
    value: String,
}

struct Section {
    line: usize,
    entries: Vec<Entry>,
}

struct Reader<'a> {
    path: &'a Path,
    sections: BTreeMap<String, Section>,
}

impl Reader<'_> {
    fn err(&self, line: Option<usize>, section: Option<&str>, message: impl Into<String>) -> FileError {
        FileError {
            path: self.path.to_path_buf(),
            line,
            section: section.map(str::to_string),
            message: message.into(),
        }
    }

    fn section(&self, name: &str) -> Option<&Section> {
        self.sections.get(name)
    }

    fn require(&self, name: &str) -> Result<&Section, FileError> {
        self.section(name)
            .ok_or_else(|| self.err(None, Some(name), "section is missing"))
    }

    fn get<'s>(&self, sec: &'s Section, name: &str, key: &str) -> Result<&'s Entry, FileError> {
        sec.entries
            .iter()
            .find(|e| e.key == key)
            .ok_or_else(|| self.err(Some(sec.line), Some(name), format!("missing `{key}`")))
    }

    fn check_keys(&self, sec: &Section, name: &str, allowed: &[&str]) -> Result<(), FileError> {
        for e in &sec.entries {
            if !allowed.contains(&e.key.as_str()) {
                return Err(self.err(Some(e.line), Some(name), format!("unknown key `{}`", e.key)));
            }
        }
        Ok(())
    }

    fn expr(&self, e: &Entry, name: &str, params: &BTreeMap<String, f64>) -> Result<Expr, FileError> {
        Expr::parse(&e.value, params).map_err(|p| self.err(Some(e.line), Some(name), format!("`{}`: {p}", e.key)))
    }

    fn constant(&self, e: &Entry, name: &str, params: &BTreeMap<String, f64>) -> Result<f64, FileError> {
        let ex = self.expr(e, name, params)?;
        ex.constant_value()
            .filter(|v| v.is_finite())
            .ok_or_else(|| self.err(Some(e.line), Some(name), format!("`{}` must be a finite constant", e.key)))
    }
}

fn split_sections<'a>(path: &'a Path, text: &str) -> Result<Reader<'a>, FileError> {
    let mut reader = Reader {
        path,
        sections: BTreeMap::new(),
    };
    let mut current: Option<String> = None;
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(rest) = content.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| reader.err(Some(line), None, "unterminated section header"))?
                .trim()
                .to_string();
            if !SECTIONS.contains(&name.as_str()) {
                return Err(reader.err(Some(line), None, format!("unknown section [{name}]")));
            }
            if reader.sections.contains_key(&name) {
                return Err(reader.err(Some(line), Some(&name), "section appears twice"));
            }
            reader.sections.insert(
                name.clone(),
                Section {
                    line,
                    entries: Vec::new(),
                },
            );
            current = Some(name);
            continue;
        }
        let Some(name) = current.clone() else {
            return Err(reader.err(Some(line), None, "content before the first section header"));
        };
        let (key, value) = if let Some(rest) = content.strip_prefix("jump ").or_else(|| content.strip_prefix("jump\t")) {
            ("jump".to_string(), rest.trim().to_string())
        } else {
            let (k, v) = content
                .split_once('=')
                .ok_or_else(|| reader.err(Some(line), Some(&name), format!("expected `key = value`, got `{content}`")))?;
            (k.trim().to_string(), v.trim().to_string())
        };
        let sec = reader.sections.get_mut(&name).expect("section was inserted");
        if key != "jump" && sec.entries.iter().any(|e| e.key == key) {
            return Err(FileError {
                path: path.to_path_buf(),
                line: Some(line),
                section: Some(name),
                message: format!("`{key}` is set twice"),
            });
        }
        sec.entries.push(Entry { line, key, value });
    }
    Ok(reader)
}

fn parse_list(s: &str) -> Vec<&str> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .collect()
}

impl ProblemFile {
    pub fn read(path: &Path) -> Result<ProblemFile, FileError> {
        let text = std::fs::read_to_string(path).map_err(|e| FileError {
            path: path.to_path_buf(),
            line: None,
            section: None,
            message: e.to_string(),
        })?;
        ProblemFile::parse(path, &text)
    }

    /// `path` is only used in error messages.
    pub fn parse(path: &Path, text: &str) -> Result<ProblemFile, FileError> {
        let r = split_sections(path, text)?;

        let mut params = BTreeMap::new();
        if let Some(sec) = r.section("params") {
            for e in &sec.entries {
                if e.key == "x" || e.key == "pi" || !e.key.chars().all(|c| c.is_alphanumeric() || c == '_') {
                    return Err(r.err(Some(e.line), Some("params"), format!("`{}` is not a valid name", e.key)));
                }
                let v = r.constant(e, "params", &params)?;
                params.insert(e.key.clone(), v);
            }
        }

        let kinds: Vec<&str> = ["coefficients", "potential", "jacobi"]
            .into_iter()
            .filter(|k| r.section(k).is_some())
            .collect();
        if kinds.len() != 1 {
            return Err(r.err(
                None,
                None,
                format!(
                    "exactly one of [coefficients], [potential], [jacobi] is required, found {}",
                    if kinds.is_empty() { "none".to_string() } else { kinds.join(", ") }
                ),
            ));
        }
        if kinds[0] != "coefficients" {
            if let Some(sec) = r.section("gauge") {
                return Err(r.err(Some(sec.line), Some("gauge"), "gauges apply to [coefficients] problems only"));
            }
        }

        let kind = match kinds[0] {
            "jacobi" => {
                if let Some(sec) = r.section("interval") {
                    return Err(r.err(Some(sec.line), Some("interval"), "not used by [jacobi] problems"));
                }
                ProblemKind::Jacobi(read_jacobi(&r, &params)?)
            }
            kind => {
                let sec = r.require("interval")?;
                r.check_keys(sec, "interval", &["a", "b"])?;
                let a = r.constant(r.get(sec, "interval", "a")?, "interval", &params)?;
                let b = r.constant(r.get(sec, "interval", "b")?, "interval", &params)?;
                if !(a < b) {
                    return Err(r.err(Some(sec.line), Some("interval"), format!("need a < b, got a = {a}, b = {b}")));
                }
                if kind == "potential" {
                    ProblemKind::Potential(read_potential(&r, &params, a, b)?)
                } else {
                    read_coefficients(&r, &params, a, b)?
                }
            }
        };
        Ok(ProblemFile {
            path: path.to_path_buf(),
            params,
            kind,
        })
    }

    fn err(&self, message: impl Into<String>) -> FileError {
        FileError {
            path: self.path.clone(),
            line: None,
            section: None,
            message: message.into(),
        }
    }

    pub fn coefficients(&self) -> Result<(&CoefficientSet, Option<&GaugePair>), FileError> {
        match &self.kind {
            ProblemKind::Coefficients { coeffs, gauge } => Ok((coeffs, gauge.as_ref())),
            other => Err(self.err(format!("expected a [coefficients] problem, found [{}]", other.name()))),
        }
    }

    pub fn potential(&self) -> Result<&PotentialAntiderivative, FileError> {
        match &self.kind {
            ProblemKind::Potential(p) => Ok(p),
            other => Err(self.err(format!("expected a [potential] problem, found [{}]", other.name()))),
        }
    }

    pub fn jacobi(&self) -> Result<&JacobiProblem, FileError> {
        match &self.kind {
            ProblemKind::Jacobi(p) => Ok(p),
            other => Err(self.err(format!("expected a [jacobi] problem, found [{}]", other.name()))),
        }
    }
}

fn read_coefficients(r: &Reader<'_>, params: &BTreeMap<String, f64>, a: f64, b: f64) -> Result<ProblemKind, FileError> {
    const NAME: &str = "coefficients";
    let sec = r.require(NAME)?;
    r.check_keys(sec, NAME, &["p", "q", "r", "s", "breakpoints", "singular"])?;
    let mut cuts = Vec::new();
    if let Some(e) = sec.entries.iter().find(|e| e.key == "breakpoints") {
        for tok in parse_list(&e.value) {
            let ex = Expr::parse(tok, params).map_err(|p| r.err(Some(e.line), Some(NAME), format!("breakpoints: {p}")))?;
            let v = ex
                .constant_value()
                .ok_or_else(|| r.err(Some(e.line), Some(NAME), format!("breakpoint `{tok}` is not a constant")))?;
            if !(v > a && v < b) {
                return Err(r.err(Some(e.line), Some(NAME), format!("breakpoint {v} is outside ({a}, {b})")));
            }
            cuts.push(v);
        }
    }
    let singular = match sec.entries.iter().find(|e| e.key == "singular") {
        None => Endpoints::NONE,
        Some(e) => match e.value.as_str() {
            "a" => Endpoints { at_a: true, at_b: false },
            "b" => Endpoints { at_a: false, at_b: true },
            "both" | "a, b" | "a,b" | "a b" => Endpoints { at_a: true, at_b: true },
            "none" => Endpoints::NONE,
            other => {
                return Err(r.err(
                    Some(e.line),
                    Some(NAME),
                    format!("singular must be a, b, both or none, got `{other}`"),
                ))
            }
        },
    };
    let mut funcs = Vec::new();
    for key in ["p", "q", "r", "s"] {
        let e = r.get(sec, NAME, key)?;
        let ex = r.expr(e, NAME, params)?;
        let f = PiecewiseFunction::from_expr(a, b, ex, &cuts)
            .map_err(|err| r.err(Some(e.line), Some(NAME), format!("`{key}`: {err}")))?
            .with_singular(singular);
        funcs.push(f);
    }
    let [p, q, rr, s]: [PiecewiseFunction; 4] = funcs.try_into().expect("four coefficients");
    let coeffs = CoefficientSet::new(p, q, rr, s).map_err(|e| r.err(Some(sec.line), Some(NAME), e.to_string()))?;

    let gauge = match r.section("gauge") {
        None => None,
        Some(g) => {
            r.check_keys(g, "gauge", &["F_deriv", "G_deriv"])?;
            let mut out = Vec::new();
            for key in ["F_deriv", "G_deriv"] {
                let e = r.get(g, "gauge", key)?;
                let ex = r.expr(e, "gauge", params)?;
                let f = GaugeFunction::from_derivative_expr(a, b, ex)
                    .map_err(|err| r.err(Some(e.line), Some("gauge"), format!("`{key}`: {err}")))?;
                out.push(f);
            }
            let g = out.pop().expect("two gauges");
            let f = out.pop().expect("two gauges");
            Some((f, g))
        }
    };
    Ok(ProblemKind::Coefficients { coeffs, gauge })
}

fn read_potential(
    r: &Reader<'_>,
    params: &BTreeMap<String, f64>,
    a: f64,
    b: f64,
) -> Result<PotentialAntiderivative, FileError> {
    const NAME: &str = "potential";
    let sec = r.require(NAME)?;
    r.check_keys(sec, NAME, &["V", "jump"])?;
    let v_entry = r.get(sec, NAME, "V")?;
    let v = r.expr(v_entry, NAME, params)?;
    let mut jumps = Vec::new();
    for e in sec.entries.iter().filter(|e| e.key == "jump") {
        let mut at = None;
        let mut weight = None;
        for tok in e.value.split_whitespace() {
            let (k, val) = tok
                .split_once('=')
                .ok_or_else(|| r.err(Some(e.line), Some(NAME), format!("expected `at=<x> weight=<w>`, got `{tok}`")))?;
            let ex = Expr::parse(val, params).map_err(|p| r.err(Some(e.line), Some(NAME), format!("jump {k}: {p}")))?;
            let num = ex
                .constant_value()
                .ok_or_else(|| r.err(Some(e.line), Some(NAME), format!("jump {k} must be a constant")))?;
            match k {
                "at" => at = Some(num),
                "weight" => weight = Some(num),
                _ => return Err(r.err(Some(e.line), Some(NAME), format!("unknown jump field `{k}`"))),
            }
        }
        match (at, weight) {
            (Some(at), Some(weight)) => jumps.push(Jump { at, weight }),
            _ => return Err(r.err(Some(e.line), Some(NAME), "a jump needs both `at=` and `weight=`")),
        }
    }
    PotentialAntiderivative::from_expr(a, b, v, jumps).map_err(|e| r.err(Some(sec.line), Some(NAME), e.to_string()))
}

fn read_jacobi(r: &Reader<'_>, params: &BTreeMap<String, f64>) -> Result<JacobiProblem, FileError> {
    const NAME: &str = "jacobi";
    let sec = r.require(NAME)?;
    r.check_keys(sec, NAME, &["N0", "N1", "alpha", "v", "beta"])?;
    let int = |key: &str| -> Result<i64, FileError> {
        let e = r.get(sec, NAME, key)?;
        e.value
            .parse::<i64>()
            .map_err(|_| r.err(Some(e.line), Some(NAME), format!("`{key}` must be an integer, got `{}`", e.value)))
    };
    let (n0, n1) = (int("N0")?, int("N1")?);
    let row = |e: &Entry| -> Result<Vec<f64>, FileError> {
        parse_list(&e.value)
            .into_iter()
            .map(|tok| {
                Expr::parse(tok, params)
                    .ok()
                    .and_then(|x| x.constant_value())
                    .ok_or_else(|| r.err(Some(e.line), Some(NAME), format!("`{}`: bad entry `{tok}`", e.key)))
            })
            .collect()
    };
    let alpha_entry = r.get(sec, NAME, "alpha")?;
    let alpha = row(alpha_entry)?;
    let v = sec.entries.iter().find(|e| e.key == "v");
    let beta = sec.entries.iter().find(|e| e.key == "beta");
    let (line, built) = match (v, beta) {
        (Some(e), None) => (e.line, JacobiProblem::new(n0, n1, alpha, row(e)?)),
        (None, Some(e)) => (e.line, JacobiProblem::from_beta(n0, n1, alpha, row(e)?)),
        _ => return Err(r.err(Some(sec.line), Some(NAME), "exactly one of `v` and `beta` is required")),
    };
    built.map_err(|e| {
        let line = if e.to_string().contains("alpha") { alpha_entry.line } else { line };
        r.err(Some(line), Some(NAME), e.to_string())
    })
}
