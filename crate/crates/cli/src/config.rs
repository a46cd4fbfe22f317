//! Run configuration: the JSON document read by `--spec` and built from flags.
//!
//! ```json
//! {
//!   "n": 3,
//!   "mu": 2.0,
//!   "specs": [
//!     {"r": 0, "s": 1, "factors": [], "variant": "n2-image"},
//!     {"r": 1, "s": 0, "variant": "n2-kernel", "hr": [[[0.0, 1.0], ...], ...]},
//!     {"n": 4, "special": {"kind": "k234-lambda", "lambda": 2.0}},
//!     {"symmetric": true}
//!   ],
//!   "tolerances": {"oracle": 1e-11},
//!   "seed": 7
//! }
//! ```
//!
//! `specs` may also be the marker `"sweep"` (every admissible spec for `n`)
//! or `"default"` (the sweep plus the special families and the symmetric
//! description), which is what an absent field means.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use chyp_core::linalg::CMat;
use chyp_core::{HolonomySpec, SpecialKind, Tolerances, Variant};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Complex matrix as rows of `[re, im]` pairs.
pub type Matrix = Vec<Vec<[f64; 2]>>;

pub const DEFAULT_MU: f64 = 2.0;
pub const DEFAULT_SWEEP_CAP: usize = 8;
pub const DEFAULT_FRAME_CHANGES: usize = 20;

pub fn matrix_to_json(m: &CMat) -> Matrix {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
}

pub fn matrix_from_json(m: &Matrix) -> CliResult<CMat> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    if m.iter().any(|r| r.len() != cols) {
        return Err(CliError::Usage("matrix rows have different lengths".into()));
    }
    Ok(CMat::from_fn(rows, cols, |i, j| Complex64::new(m[i][j][0], m[i][j][1])))
}

/// One description to verify. Exactly one of `variant` (a holonomy spec),
/// `special` or `symmetric` selects the family.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecEntry {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    #[serde(default)]
    pub r: usize,
    #[serde(default)]
    pub s: usize,
    #[serde(default)]
    pub factors: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub variant: Option<Variant>,
    /// Shift `H_r` on `C^(n-1)`, skew-hermitian.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hr: Option<Matrix>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub special: Option<SpecialKind>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub symmetric: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Family {
    Symmetric,
    Special(SpecialKind),
    Spec { spec: HolonomySpec, hr: Option<CMat> },
}

impl SpecEntry {
    pub fn spec(spec: &HolonomySpec) -> Self {
        Self { r: spec.r, s: spec.s, factors: spec.factors.clone(), variant: Some(spec.variant), ..Self::default() }
    }

    pub fn special(kind: SpecialKind) -> Self {
        Self { special: Some(kind), ..Self::default() }
    }

    pub fn symmetric() -> Self {
        Self { symmetric: true, ..Self::default() }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn family(&self) -> CliResult<Family> {
        let chosen = usize::from(self.symmetric) + usize::from(self.special.is_some()) + usize::from(self.variant.is_some());
        if chosen != 1 {
            return Err(CliError::Usage(
                "each spec needs exactly one of \"variant\", \"special\" or \"symmetric\"".into(),
            ));
        }
        let has_spec_fields = self.r != 0 || self.s != 0 || !self.factors.is_empty() || self.hr.is_some();
        if self.variant.is_none() && has_spec_fields {
            return Err(CliError::Usage("r, s, factors and hr only apply to holonomy specs".into()));
        }
        Ok(match (self.symmetric, self.special, self.variant) {
            (true, _, _) => Family::Symmetric,
            (_, Some(kind), _) => Family::Special(kind),
            (_, _, Some(variant)) => Family::Spec {
                spec: HolonomySpec::new(self.r, self.s, self.factors.clone(), variant),
                hr: self.hr.as_ref().map(matrix_from_json).transpose()?,
            },
            _ => unreachable!(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SpecMarker {
    Sweep,
    Default,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Specs {
    Marker(SpecMarker),
    List(Vec<SpecEntry>),
}

impl Default for Specs {
    fn default() -> Self {
        Specs::Marker(SpecMarker::Default)
    }
}

fn default_mu() -> f64 {
    DEFAULT_MU
}

fn default_true() -> bool {
    true
}

fn default_cap() -> usize {
    DEFAULT_SWEEP_CAP
}

fn default_frames() -> usize {
    DEFAULT_FRAME_CHANGES
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub n: usize,
    #[serde(default = "default_mu")]
    pub mu: f64,
    #[serde(default)]
    pub specs: Specs,
    /// Overrides for the named thresholds `rank`, `oracle`, `component`, `strict`.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_path: Option<PathBuf>,
    /// Apply a seeded random unitary change of coordinates to every spec.
    #[serde(default = "default_true")]
    pub conjugate: bool,
    #[serde(default = "default_cap")]
    pub sweep_cap: usize,
    /// Random unitary frames used for the frame-independence check of `c12`.
    #[serde(default = "default_frames")]
    pub frame_changes: usize,
    /// Include `S` as a flat row-major array in each record.
    #[serde(default)]
    pub export_tensor: bool,
}

impl RunConfig {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            mu: DEFAULT_MU,
            specs: Specs::default(),
            tolerances: BTreeMap::new(),
            seed: 0,
            output_path: None,
            conjugate: true,
            sweep_cap: DEFAULT_SWEEP_CAP,
            frame_changes: DEFAULT_FRAME_CHANGES,
            export_tensor: false,
        }
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|source| CliError::Read { path: path.display().to_string(), source })?;
        let cfg: RunConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::Usage(format!("invalid config {}: {e}", path.display())))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.n < 2 {
            return Err(CliError::Usage(format!("n must be at least 2, got {}", self.n)));
        }
        check_mu(self.mu)?;
        self.tolerances()?;
        Ok(())
    }

    /// Defaults with the configured overrides applied.
    pub fn tolerances(&self) -> CliResult<Tolerances> {
        let mut t = Tolerances::default();
        for (name, &value) in &self.tolerances {
            if !(value.is_finite() && value > 0.0) {
                return Err(CliError::Usage(format!("tolerance {name} must be positive, got {value}")));
            }
            if !t.set(name, value) {
                return Err(CliError::Usage(format!(
                    "unknown tolerance {name:?}; expected one of {}",
                    Tolerances::NAMES.join(", ")
                )));
            }
        }
        Ok(t)
    }

    pub fn set_tolerance(&mut self, assignment: &str) -> CliResult<()> {
        let (name, value) = parse_tol(assignment)?;
        self.tolerances.insert(name, value);
        self.tolerances().map(|_| ())
    }
}

pub(crate) fn check_mu(mu: f64) -> CliResult<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(CliError::Usage(format!("mu must be positive, got {mu}")))
    }
}

/// Parses `name=value`.
pub fn parse_tol(s: &str) -> CliResult<(String, f64)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::Usage(format!("expected --tol name=value, got {s:?}")))?;
    let value: f64 =
        value.trim().parse().map_err(|_| CliError::Usage(format!("tolerance value {value:?} is not a number")))?;
    Ok((name.trim().to_string(), value))
}
