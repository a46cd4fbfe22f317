//! Versioned JSON report. Every residual sits next to the tolerance it was
//! compared against; matrices are rows of `[re, im]` pairs.

use std::collections::BTreeMap;

use chyp_core::classify::{ClassLabel, Evidence, Pattern, Support};
use chyp_core::conngeo::{OracleResiduals, SymmetricReport};
use chyp_core::homdesc::Violation;
use chyp_core::ktensor::DecompositionResiduals;
use chyp_core::Tolerances;
use serde::Serialize;

use crate::config::{Matrix, SpecEntry};

pub const SCHEMA: &str = "chyp-report/1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Verify,
    Sweep,
    Classify,
}

/// One residual compared against one threshold.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Check {
    pub residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl Check {
    pub fn below(residual: f64, tolerance: f64) -> Self {
        Self { residual, tolerance, passed: residual <= tolerance }
    }

    /// As [`Check::below`], additionally requiring `condition`.
    pub fn below_and(residual: f64, tolerance: f64, condition: bool) -> Self {
        Self { residual, tolerance, passed: condition && residual <= tolerance }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConfigEcho {
    pub n: usize,
    pub mu: f64,
    pub seed: u64,
    pub tolerances: Tolerances,
    pub conjugate: bool,
    pub frame_changes: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct BracketRelation {
    pub n: usize,
    pub relation: String,
    /// Holds in rational arithmetic.
    pub exact: bool,
    pub check: Check,
}

#[derive(Debug, Clone, Serialize)]
pub struct Validation {
    pub admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<Violation>,
}

#[derive(Debug, Clone, Serialize)]
pub struct PhiEcho {
    pub a0: Matrix,
    pub n2: Matrix,
    pub hr: Matrix,
}

#[derive(Debug, Clone, Serialize)]
pub struct HolonomyRecord {
    /// Observed from the holonomy algebra.
    pub dim_k: usize,
    pub r: usize,
    pub s: usize,
    pub dim_ss: usize,
    pub center_dim: usize,
    /// `dim span{[m, m]_h}` against `dim phi(n)`.
    pub dim_span: usize,
    pub dim_phi: usize,
    /// Mutual containment distance of the two spans.
    pub span_equals_phi: Check,
}

#[derive(Debug, Clone, Serialize)]
pub struct OracleRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub residuals: Option<OracleResiduals>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetric: Option<SymmetricReport>,
    pub check: Check,
    /// `max ||R̃ Ã0||, ||R̃ Ñ2||`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parallel_fields: Option<Check>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TraceRecord {
    /// `c12(S) = coefficient * alpha`, residual relative to `max(1, ||S||)`.
    pub coefficient: f64,
    pub check: Check,
    /// The coefficient `4n` of the published trace law and its residual
    /// (reported, not gated).
    pub stated_coefficient: f64,
    pub stated_residual: f64,
    /// `c12` commutes with random unitary frame changes.
    pub frame_independence: Check,
}

#[derive(Debug, Clone, Serialize)]
pub struct DecompositionRecord {
    /// `||S1||, ..., ||S4||`.
    pub norms: [f64; 4],
    pub theta2: Vec<f64>,
    pub theta4: Vec<f64>,
    pub c12: Vec<f64>,
    pub scale: f64,
    pub residuals: DecompositionResiduals,
    pub sum: Check,
    pub orthogonality: Check,
    pub identities: Check,
}

#[derive(Debug, Clone, Serialize)]
pub struct ClassRecord {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label: Option<ClassLabel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub evidence: Option<Evidence>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<Support>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub numeric_pattern: Option<Pattern>,
    pub agree: bool,
    /// A `K1` perturbation of size `1e-3 max(1, ||S||)` changed the verdict.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fault_detected: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub passed: bool,
    pub verdict: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct Record {
    pub key: String,
    pub n: usize,
    pub mu: f64,
    pub spec: SpecEntry,
    pub validation: Validation,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub phi: Option<PhiEcho>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub holonomy: Option<HolonomyRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub oracle: Option<OracleRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub trace_law: Option<TraceRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub decomposition: Option<DecompositionRecord>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classification: Option<ClassRecord>,
    /// `S[b][c][d] = g(S_{e_b} e_c, e_d)` in the standard frame, row-major.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tensor: Option<TensorExport>,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct TensorExport {
    pub shape: [usize; 3],
    /// Frame ordering: `e_0 .. e_{n-1}` then `J e_0 .. J e_{n-1}`, with
    /// `e_{n-1}` along `Ã0` and `J e_{n-1}` along `Ñ2`.
    pub frame: String,
    pub data: Vec<f64>,
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct SuiteSummary {
    pub passed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
}

impl SuiteSummary {
    fn add(&mut self, passed: bool) {
        if passed {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
    }

    fn add_check(&mut self, c: &Check) {
        self.add(c.passed);
        self.max_residual = Some(self.max_residual.map_or(c.residual, |m| m.max(c.residual)));
        self.tolerance = Some(c.tolerance);
    }
}

#[derive(Debug, Clone, Default, Serialize)]
pub struct Summary {
    pub records: usize,
    pub passed: usize,
    pub failed: usize,
    pub suites: BTreeMap<String, SuiteSummary>,
    /// Present only for timed runs, so that untimed reports are reproducible.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_s: Option<f64>,
    pub passed_all: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub schema: &'static str,
    pub command: Command,
    pub config: ConfigEcho,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub bracket_table: Vec<BracketRelation>,
    pub records: Vec<Record>,
    /// Class label counts (sweeps).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub label_counts: Option<BTreeMap<String, usize>>,
    pub summary: Summary,
}

impl Report {
    pub fn new(command: Command, config: ConfigEcho, bracket_table: Vec<BracketRelation>, records: Vec<Record>) -> Self {
        let mut r = Self { schema: SCHEMA, command, config, bracket_table, records, label_counts: None, summary: Summary::default() };
        r.summarize();
        r
    }

    pub fn passed(&self) -> bool {
        self.summary.passed_all
    }

    /// 0 when every suite passed, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        i32::from(!self.passed())
    }

    pub fn with_wall_time(mut self, seconds: f64) -> Self {
        self.summary.wall_time_s = Some(seconds);
        self
    }

    pub fn with_label_counts(mut self) -> Self {
        let mut counts = BTreeMap::new();
        for rec in &self.records {
            let name = match rec.classification.as_ref().and_then(|c| c.label) {
                Some(l) => label_name(&l).to_string(),
                None => "unclassified".to_string(),
            };
            *counts.entry(name).or_insert(0) += 1;
        }
        self.label_counts = Some(counts);
        self
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    fn summarize(&mut self) {
        let mut suites: BTreeMap<String, SuiteSummary> = BTreeMap::new();

        for b in &self.bracket_table {
            let s = suite(&mut suites, "bracket_table");
            s.add_check(&b.check);
            if !b.exact {
                s.passed -= usize::from(b.check.passed);
                s.failed += usize::from(b.check.passed);
            }
        }
        for rec in &self.records {
            suite(&mut suites, "validation").add(rec.validation.admissible);
            if let Some(h) = &rec.holonomy {
                suite(&mut suites, "holonomy").add_check(&h.span_equals_phi);
            }
            if let Some(o) = &rec.oracle {
                suite(&mut suites, "oracle").add_check(&o.check);
                if let Some(p) = &o.parallel_fields {
                    suite(&mut suites, "parallel_fields").add_check(p);
                }
            }
            if let Some(t) = &rec.trace_law {
                suite(&mut suites, "trace_law").add_check(&t.check);
                suite(&mut suites, "frame_independence").add_check(&t.frame_independence);
            }
            if let Some(d) = &rec.decomposition {
                let s = suite(&mut suites, "decomposition");
                for c in [&d.sum, &d.orthogonality, &d.identities] {
                    s.add_check(c);
                }
            }
            if let Some(c) = &rec.classification {
                suite(&mut suites, "classification").add(c.passed);
            }
        }
        let passed = self.records.iter().filter(|r| r.passed).count();
        let bracket_ok = self.bracket_table.iter().all(|b| b.exact && b.check.passed);
        self.summary = Summary {
            records: self.records.len(),
            passed,
            failed: self.records.len() - passed,
            passed_all: bracket_ok && passed == self.records.len(),
            suites,
            wall_time_s: self.summary.wall_time_s,
        };
    }
}

fn suite<'a>(suites: &'a mut BTreeMap<String, SuiteSummary>, name: &str) -> &'a mut SuiteSummary {
    suites.entry(name.to_string()).or_default()
}

pub fn label_name(l: &ClassLabel) -> &'static str {
    match l {
        ClassLabel::Symmetric => "Symmetric",
        ClassLabel::StrictK24 => "StrictK24",
        ClassLabel::StrictK234HolDim1 { .. } => "StrictK234_HolDim1",
        ClassLabel::StrictK234HolTrivial { .. } => "StrictK234_HolTrivial",
        ClassLabel::General => "General",
    }
}
