//! The four named thresholds shared by every check.

use serde::{Deserialize, Serialize};

/// Named numeric thresholds. Residual comparisons are relative to
/// `max(1, ||S||)` where a tensor scale is available.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank and null-space decisions.
    pub rank: f64,
    /// Closed form versus oracle agreement.
    pub oracle: f64,
    /// Defining identities of decomposition components.
    pub component: f64,
    /// A component counts as present above this (relative) norm.
    pub strict: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { rank: 1e-8, oracle: 1e-11, component: 1e-9, strict: 1e-6 }
    }
}

impl Tolerances {
    pub const NAMES: [&'static str; 4] = ["rank", "oracle", "component", "strict"];

    /// Overrides one threshold by name. Returns `false` for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "rank" => self.rank = value,
            "oracle" => self.oracle = value,
            "component" => self.component = value,
            "strict" => self.strict = value,
            _ => return false,
        }
        true
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        match name {
            "rank" => Some(self.rank),
            "oracle" => Some(self.oracle),
            "component" => Some(self.component),
            "strict" => Some(self.strict),
            _ => None,
        }
    }
}
