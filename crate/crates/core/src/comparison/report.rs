use std::fmt::Write as _;

use super::drivers::SeparationEvidence;
use super::sweep::SweepSummary;
use super::Certificate;
use crate::coeffs::Estimate;

/// Whether `ũ e^F` itself solves the target equation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exceptional {
    /// Relative deviation between `ũ e^F` and the target solution with the
    /// same data at the interval midpoint.
    pub residual: f64,
    pub is_multiple: bool,
}

/// Cross-check of a quadrature value against an independent Stieltjes sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StieltjesCheck {
    pub stieltjes: Estimate,
    /// The `B` part (Sturm-Picone) or the whole certificate (measure
    /// potentials) computed by ordinary quadrature.
    pub quadrature: Estimate,
    pub agrees: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub certificate: Certificate,
    pub sweep: Option<SweepSummary>,
    pub exceptional: Option<Exceptional>,
    pub stieltjes: Option<StieltjesCheck>,
    pub separation: Option<SeparationEvidence>,
    /// False when the numerical evidence contradicts the certified
    /// conclusion.
    pub consistent: bool,
    pub notes: Vec<String>,
}

pub const REPORT_CSV_HEADER: &str = "value,err,verdict,a_part,b_part,c_part,sweep_n,sweep_with_zero,sweep_zero_free";

impl Report {
    pub fn new(certificate: Certificate) -> Report {
        Report {
            certificate,
            sweep: None,
            exceptional: None,
            stieltjes: None,
            separation: None,
            consistent: true,
            notes: Vec::new(),
        }
    }

    pub fn csv_header() -> &'static str {
        REPORT_CSV_HEADER
    }

    /// One CSV record matching [`Report::csv_header`]; sweep columns are
    /// empty when no sweep was run.
    pub fn csv_record(&self) -> String {
        let c = &self.certificate;
        let (n, with, free) = match &self.sweep {
            Some(s) => (
                s.total().to_string(),
                s.with_zero.to_string(),
                s.zero_free.len().to_string(),
            ),
            None => Default::default(),
        };
        format!(
            "{},{},{},{},{},{},{},{},{}",
            c.value,
            c.err,
            c.verdict,
            c.breakdown.a_part.value,
            c.breakdown.b_part.value,
            c.breakdown.c_part.value,
            n,
            with,
            free
        )
    }

    pub fn csv(&self) -> String {
        format!("{}\n{}\n", REPORT_CSV_HEADER, self.csv_record())
    }

    /// Human-readable summary.
    pub fn table(&self) -> String {
        let c = &self.certificate;
        let mut out = String::new();
        let _ = writeln!(out, "certificate     {:.12e}", c.value);
        let _ = writeln!(out, "error bound     {:.3e}", c.err);
        let _ = writeln!(out, "verdict         {}", c.verdict);
        let _ = writeln!(out, "  A part        {:.12e}", c.breakdown.a_part.value);
        let _ = writeln!(out, "  B part        {:.12e}", c.breakdown.b_part.value);
        let _ = writeln!(out, "  C part        {:.12e}", c.breakdown.c_part.value);
        if let Some(s) = &self.sweep {
            let _ = writeln!(
                out,
                "sweep           {} solutions from x0 = {} ({} uniform, {} refined)",
                s.total(),
                s.x0,
                s.n,
                s.refined
            );
            let _ = writeln!(out, "  with zero     {}", s.with_zero);
            let _ = writeln!(out, "  zero-free     {}", s.zero_free.len());
            if let Some(theta) = s.zero_free.first() {
                let _ = writeln!(out, "  first zero-free angle {theta:.12}");
            }
            if let Some(d) = s.closest_zero {
                let _ = writeln!(out, "  closest zero to an endpoint {d:.3e}");
            }
        }
        if let Some(e) = &self.exceptional {
            let _ = writeln!(
                out,
                "exceptional     {} (relative residual {:.3e})",
                if e.is_multiple { "u~ e^F solves the target equation" } else { "none" },
                e.residual
            );
        }
        if let Some(s) = &self.stieltjes {
            let _ = writeln!(
                out,
                "stieltjes       {:.12e} vs quadrature {:.12e} ({})",
                s.stieltjes.value,
                s.quadrature.value,
                if s.agrees { "agree" } else { "DISAGREE" }
            );
        }
        if let Some(s) = &self.separation {
            let _ = writeln!(out, "zeros of u      {}", s.zeros.len());
            for z in &s.zeros {
                let _ = writeln!(out, "  {z:.12}");
            }
            let _ = writeln!(out, "weighted W      {:.3e}", s.weighted_wronskian);
            let _ = writeln!(out, "multiple of u~  {}", s.is_multiple);
        }
        let _ = writeln!(out, "consistent      {}", self.consistent);
        for n in &self.notes {
            let _ = writeln!(out, "note: {n}");
        }
        out
    }
}
