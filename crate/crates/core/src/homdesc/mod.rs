//! Holonomy specifications of non-symmetric descriptions `G/H` and the
//! equivariant map `phi: a + n -> h` (plus the shift `H_r`) realizing them.

mod assembly;
mod phi;
pub mod sample;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use assembly::{assemble_modules, su_onb, Block, BlockKind, GenKind, Generator, ModuleAssembly};
pub(crate) use phi::check_mu;
pub use phi::{construct_phi, special_phi_linear, Origin, PhiMap, Signature, SpecialKind};

/// Whether `phi(N2)` vanishes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Variant {
    N2Kernel,
    N2Image,
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::N2Kernel => "n2-kernel",
            Variant::N2Image => "n2-image",
        })
    }
}

/// Discrete data of a holonomy algebra `k = C^r + R^s + k_ss` with
/// `k_ss = sum su(k_i)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct HolonomySpec {
    pub r: usize,
    pub s: usize,
    /// `k` of each `su(k)` factor.
    #[serde(default)]
    pub factors: Vec<usize>,
    pub variant: Variant,
}

impl HolonomySpec {
    pub fn new(r: usize, s: usize, factors: Vec<usize>, variant: Variant) -> Self {
        Self { r, s, factors, variant }
    }

    pub fn dim_ss(&self) -> usize {
        self.factors.iter().map(|&k| (k * k).saturating_sub(1)).sum()
    }

    /// `dim k = 2r + s + dim k_ss`.
    pub fn dim_k(&self) -> usize {
        2 * self.r + self.s + self.dim_ss()
    }

    /// Left-hand side of the applicable inequality (`<= n - 1`). This is
    /// also the number of complex coordinates the assembly occupies.
    pub fn required(&self) -> usize {
        match self.variant {
            Variant::N2Kernel => 3 * self.r + 2 * self.s + self.dim_ss(),
            Variant::N2Image => 3 * self.r + 2 * self.s.saturating_sub(1) + 1 + self.dim_ss(),
        }
    }

    /// Canonical key used to order records: factors sorted decreasingly.
    pub fn canonical(&self) -> Self {
        let mut f = self.factors.clone();
        f.sort_unstable_by(|a, b| b.cmp(a));
        Self { factors: f, ..self.clone() }
    }

    pub fn label(&self) -> String {
        let f: Vec<String> = self.factors.iter().map(|k| format!("su({k})")).collect();
        format!("r={} s={} [{}] {}", self.r, self.s, f.join(","), self.variant)
    }
}

/// A failed admissibility condition, with both sides evaluated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub condition: String,
    pub lhs: usize,
    pub rhs: usize,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} fails: lhs = {}, rhs = {}", self.condition, self.lhs, self.rhs)
    }
}

/// Checks the dimension inequality of the spec's variant.
pub fn validate_spec(spec: &HolonomySpec, n: usize) -> Result<(), Violation> {
    if n < 2 {
        return Err(Violation { condition: "n >= 2".into(), lhs: n, rhs: 2 });
    }
    if let Some(&k) = spec.factors.iter().find(|&&k| k < 2) {
        return Err(Violation { condition: "factor su(k) with k >= 2".into(), lhs: k, rhs: 2 });
    }
    if spec.variant == Variant::N2Image && spec.s < 1 {
        return Err(Violation { condition: "s >= 1".into(), lhs: spec.s, rhs: 1 });
    }
    let lhs = spec.required();
    if lhs > n - 1 {
        let condition = match spec.variant {
            Variant::N2Kernel => "3r + 2s + dim(k_ss) <= n - 1",
            Variant::N2Image => "3r + 2(s - 1) + 1 + dim(k_ss) <= n - 1",
        };
        return Err(Violation { condition: condition.into(), lhs, rhs: n - 1 });
    }
    Ok(())
}

/// All admissible specs of one variant for `n`, with simple factors drawn
/// from `pool` (as multisets, listed decreasingly). Sorted by spec order.
pub fn enumerate_admissible(n: usize, variant: Variant, pool: &[usize]) -> Vec<HolonomySpec> {
    if n < 2 {
        return Vec::new();
    }
    let budget = n - 1;
    let mut pool: Vec<usize> = pool.iter().copied().filter(|&k| k >= 2).collect();
    pool.sort_unstable_by(|a, b| b.cmp(a));
    pool.dedup();

    let mut multisets = Vec::new();
    collect_multisets(&pool, budget, &mut Vec::new(), &mut multisets);

    let mut out = Vec::new();
    for factors in multisets {
        for r in 0..=budget / 3 {
            for s in 0..=budget {
                let spec = HolonomySpec::new(r, s, factors.clone(), variant);
                if validate_spec(&spec, n).is_ok() {
                    out.push(spec);
                }
            }
        }
    }
    out.sort();
    out
}

fn collect_multisets(pool: &[usize], budget: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    out.push(cur.clone());
    for (i, &k) in pool.iter().enumerate() {
        let d = k * k - 1;
        if d <= budget && cur.last().map_or(true, |&last| k <= last) {
            cur.push(k);
            collect_multisets(&pool[i..], budget - d, cur, out);
            cur.pop();
        }
    }
}
