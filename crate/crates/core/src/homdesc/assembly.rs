//! Block layout of `n1 = C^{n-1}` as a module over the holonomy algebra.
//!
//! Complex coordinates are laid out as: `V0` lines (one per `C` factor, then
//! one per `R` factor not carried by `N2`), the `sl(k,C)` blocks of the
//! simple factors, the `V1` phases, then the trivial `C^m`. Real subspaces are
//! recorded in realified coordinates `(Re u, Im u)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, realify_action, CMat, RMat, RVec, I};
use crate::matlie::check_n;

use super::{validate_spec, HolonomySpec, Variant};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum BlockKind {
    V0,
    #[serde(rename = "V_ss")]
    Vss,
    V1,
    W,
    #[serde(rename = "R^s")]
    RealTrivial,
    #[serde(rename = "C^m")]
    ComplexTrivial,
}

/// A real subspace of `n1`, given by orthonormal vectors in realified coordinates.
#[derive(Debug, Clone)]
pub struct Block {
    pub kind: BlockKind,
    pub basis: Vec<RVec>,
}

impl Block {
    pub fn real_dim(&self) -> usize {
        self.basis.len()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum GenKind {
    /// One of the two generators of a `C` factor.
    Complex { factor: usize, index: usize },
    Real { factor: usize },
    /// Basis element `index` of the simple factor `factor` (`su(k)`).
    Simple { factor: usize, k: usize, index: usize },
}

/// An abstract generator of `k` with its skew-hermitian action on `C^{n-1}`.
#[derive(Debug, Clone)]
pub struct Generator {
    pub kind: GenKind,
    pub action: CMat,
}

#[derive(Debug, Clone)]
pub struct ModuleAssembly {
    pub n: usize,
    pub spec: HolonomySpec,
    pub blocks: Vec<Block>,
    pub generators: Vec<Generator>,
    /// `psi: V_k -> k` as (direction in `V0 + V_ss`, generator index).
    pub psi: Vec<(RVec, usize)>,
    /// Each `R` line of `V0` paired with its `J`-partner in `R^s`.
    pub j_pairing: Vec<(RVec, RVec)>,
    /// Generator equal to `phi(N2)` in the image variant.
    pub n2_generator: Option<usize>,
}

impl ModuleAssembly {
    pub fn block(&self, kind: BlockKind) -> Option<&Block> {
        self.blocks.iter().find(|b| b.kind == kind)
    }

    /// Orthonormal basis of a block, empty if absent.
    pub fn block_basis(&self, kind: BlockKind) -> Vec<RVec> {
        self.block(kind).map(|b| b.basis.clone()).unwrap_or_default()
    }

    pub fn total_real_dim(&self) -> usize {
        self.blocks.iter().map(Block::real_dim).sum()
    }

    /// Indices of the generators spanning the center `k0`.
    pub fn center_generators(&self) -> Vec<usize> {
        self.generators
            .iter()
            .enumerate()
            .filter(|(_, g)| !matches!(g.kind, GenKind::Simple { .. }))
            .map(|(i, _)| i)
            .collect()
    }

    /// Transports the assembly by the unitary `u` acting on `C^{n-1}`.
    pub fn conjugate(&self, u: &CMat) -> ModuleAssembly {
        let ru = realify_action(u);
        let ud = u.adjoint();
        let tv = |v: &RVec| &ru * v;
        ModuleAssembly {
            n: self.n,
            spec: self.spec.clone(),
            blocks: self
                .blocks
                .iter()
                .map(|b| Block { kind: b.kind, basis: b.basis.iter().map(tv).collect() })
                .collect(),
            generators: self
                .generators
                .iter()
                .map(|g| Generator { kind: g.kind, action: u * &g.action * &ud })
                .collect(),
            psi: self.psi.iter().map(|(v, i)| (tv(v), *i)).collect(),
            j_pairing: self.j_pairing.iter().map(|(a, b)| (tv(a), tv(b))).collect(),
            n2_generator: self.n2_generator,
        }
    }
}

/// Orthonormal basis of `su(k)` for `<X, Y> = -tr(XY)`.
pub fn su_onb(k: usize) -> Vec<CMat> {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut out = Vec::with_capacity(k * k - 1);
    for j in 0..k {
        for l in j + 1..k {
            let mut e = CMat::zeros(k, k);
            e[(j, l)] = c(h, 0.0);
            e[(l, j)] = c(-h, 0.0);
            out.push(e);
            let mut e = CMat::zeros(k, k);
            e[(j, l)] = c(0.0, h);
            e[(l, j)] = c(0.0, h);
            out.push(e);
        }
    }
    for m in 1..k {
        let norm = ((m * (m + 1)) as f64).sqrt();
        let mut e = CMat::zeros(k, k);
        for j in 0..m {
            e[(j, j)] = c(0.0, 1.0 / norm);
        }
        e[(m, m)] = c(0.0, -(m as f64) / norm);
        out.push(e);
    }
    out
}

/// Real antisymmetric matrices of `ad` in the basis `onb`:
/// `(ad T_a)_{cb} = -tr(T_c [T_a, T_b])`.
fn ad_matrices(onb: &[CMat]) -> Vec<RMat> {
    let d = onb.len();
    onb.iter()
        .map(|ta| {
            RMat::from_fn(d, d, |cc, b| {
                let br = ta * &onb[b] - &onb[b] * ta;
                -(&onb[cc] * br).trace().re
            })
        })
        .collect()
}

fn unit(len: usize, i: usize) -> RVec {
    let mut v = RVec::zeros(len);
    v[i] = 1.0;
    v
}

/// Lays out `C^{n-1}` for `spec` and builds the action of every generator.
pub fn assemble_modules(spec: &HolonomySpec, n: usize) -> Result<ModuleAssembly> {
    check_n(n)?;
    validate_spec(spec, n).map_err(Error::Spec)?;
    let k = n - 1;
    let re = |j: usize| unit(2 * k, j);
    let im = |j: usize| unit(2 * k, k + j);

    let image = spec.variant == Variant::N2Image;
    let r_in_v0 = if image { spec.s - 1 } else { spec.s };
    let d = spec.dim_ss();

    let v0_start = 0;
    let ss_start = spec.r + r_in_v0;
    let v1_start = ss_start + d;
    let triv_start = v1_start + 2 * spec.r + spec.s;
    debug_assert_eq!(triv_start, spec.required());

    let mut generators = Vec::new();
    let mut psi = Vec::new();
    let mut j_pairing = Vec::new();
    let mut v0 = Vec::new();
    let mut real_trivial = Vec::new();

    for f in 0..spec.r {
        let (p, q) = (v1_start + 2 * f, v1_start + 2 * f + 1);
        for (index, slot) in [p, q].into_iter().enumerate() {
            let mut a = CMat::zeros(k, k);
            a[(slot, slot)] = I;
            generators.push(Generator { kind: GenKind::Complex { factor: f, index }, action: a });
        }
        let line = v0_start + f;
        psi.push((re(line), 2 * f));
        psi.push((im(line), 2 * f + 1));
        v0.push(re(line));
        v0.push(im(line));
    }

    let mut n2_generator = None;
    for f in 0..spec.s {
        let slot = v1_start + 2 * spec.r + f;
        let mut a = CMat::zeros(k, k);
        a[(slot, slot)] = I;
        let g = generators.len();
        generators.push(Generator { kind: GenKind::Real { factor: f }, action: a });
        if image && f == 0 {
            n2_generator = Some(g);
            continue;
        }
        let line = v0_start + spec.r + if image { f - 1 } else { f };
        psi.push((re(line), g));
        v0.push(re(line));
        real_trivial.push(im(line));
        j_pairing.push((re(line), im(line)));
    }

    let mut vss = Vec::new();
    let mut w = Vec::new();
    let mut offset = ss_start;
    for (fi, &kk) in spec.factors.iter().enumerate() {
        let onb = su_onb(kk);
        let ads = ad_matrices(&onb);
        let dim = onb.len();
        for (index, ad) in ads.iter().enumerate() {
            let mut a = CMat::zeros(k, k);
            for i in 0..dim {
                for j in 0..dim {
                    a[(offset + i, offset + j)] = c(ad[(i, j)], 0.0);
                }
            }
            let g = generators.len();
            generators.push(Generator { kind: GenKind::Simple { factor: fi, k: kk, index }, action: a });
            psi.push((re(offset + index), g));
        }
        for i in 0..dim {
            vss.push(re(offset + i));
            w.push(im(offset + i));
        }
        offset += dim;
    }

    let v1: Vec<RVec> = (v1_start..triv_start).flat_map(|j| [re(j), im(j)]).collect();
    let triv: Vec<RVec> = (triv_start..k).flat_map(|j| [re(j), im(j)]).collect();

    let blocks = vec![
        Block { kind: BlockKind::V0, basis: v0 },
        Block { kind: BlockKind::Vss, basis: vss },
        Block { kind: BlockKind::V1, basis: v1 },
        Block { kind: BlockKind::W, basis: w },
        Block { kind: BlockKind::RealTrivial, basis: real_trivial },
        Block { kind: BlockKind::ComplexTrivial, basis: triv },
    ];

    Ok(ModuleAssembly { n, spec: spec.clone(), blocks, generators, psi, j_pairing, n2_generator })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{columns, rank, realify, skew_hermitian_residual, RANK_TOL};

    fn spec(r: usize, s: usize, f: Vec<usize>, v: Variant) -> HolonomySpec {
        HolonomySpec::new(r, s, f, v)
    }

    #[test]
    fn su2_block_is_adjoint() {
        let a = assemble_modules(&spec(0, 0, vec![2], Variant::N2Kernel), 4).unwrap();
        assert_eq!(a.block_basis(BlockKind::Vss).len(), 3);
        assert_eq!(a.block_basis(BlockKind::W).len(), 3);
        assert!(a.block_basis(BlockKind::V1).is_empty());
        assert!(a.block_basis(BlockKind::ComplexTrivial).is_empty());
        // [action(T_a), action(T_b)] = action([T_a, T_b]) via su(2) structure constants.
        let onb = su_onb(2);
        for i in 0..3 {
            for j in 0..3 {
                let lhs = crate::linalg::commutator(&a.generators[i].action, &a.generators[j].action);
                let br = &onb[i] * &onb[j] - &onb[j] * &onb[i];
                let mut rhs = CMat::zeros(3, 3);
                for (l, t) in onb.iter().enumerate() {
                    let coef = -(t * &br).trace().re;
                    rhs += &a.generators[l].action * c(coef, 0.0);
                }
                assert!(crate::linalg::cnorm(&(lhs - rhs)) < 1e-14);
            }
        }
    }

    #[test]
    fn c_factor_layout() {
        let a = assemble_modules(&spec(1, 0, vec![], Variant::N2Kernel), 5).unwrap();
        assert_eq!(a.block_basis(BlockKind::V0).len(), 2);
        assert_eq!(a.block_basis(BlockKind::V1).len(), 4);
        assert_eq!(a.block_basis(BlockKind::ComplexTrivial).len(), 2);
        // effectiveness: the generator actions are linearly independent
        let vecs: Vec<_> = a.generators.iter().map(|g| realify(&g.action)).collect();
        assert_eq!(rank(&columns(&vecs), RANK_TOL), 2);
        // the action on V0 is zero
        for g in &a.generators {
            assert_eq!(g.action[(0, 0)], c(0.0, 0.0));
        }
    }

    #[test]
    fn n2_image_smallest() {
        let a = assemble_modules(&spec(0, 1, vec![], Variant::N2Image), 2).unwrap();
        assert_eq!(a.n2_generator, Some(0));
        assert!(a.block_basis(BlockKind::V0).is_empty());
        assert_eq!(a.block_basis(BlockKind::V1).len(), 2);
        assert_eq!(a.generators[0].action[(0, 0)], I);
    }

    #[test]
    fn dimensions_and_skewness() {
        for (sp, n) in [
            (spec(1, 1, vec![2], Variant::N2Kernel), 9),
            (spec(1, 2, vec![2], Variant::N2Image), 12),
            (spec(0, 0, vec![3], Variant::N2Kernel), 9),
            (spec(0, 2, vec![], Variant::N2Kernel), 6),
        ] {
            let a = assemble_modules(&sp, n).unwrap();
            assert_eq!(a.total_real_dim(), 2 * (n - 1));
            assert_eq!(a.generators.len(), sp.dim_k());
            let j = realify_action(&CMat::identity(n - 1, n - 1).map(|z| z * I));
            for g in &a.generators {
                assert!(skew_hermitian_residual(&g.action) < 1e-15);
                let ra = realify_action(&g.action);
                assert!((&ra * &j - &j * &ra).norm() < 1e-15);
            }
            let all: Vec<RVec> = a.blocks.iter().flat_map(|b| b.basis.clone()).collect();
            assert_eq!(rank(&columns(&all), RANK_TOL), 2 * (n - 1));
        }
    }

    #[test]
    fn rejects_inadmissible() {
        assert!(matches!(
            assemble_modules(&spec(0, 0, vec![2], Variant::N2Kernel), 3),
            Err(Error::Spec(_))
        ));
    }
}
