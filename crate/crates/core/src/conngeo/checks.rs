//! Point-level verification: parallel fields, holonomy span, the module
//! lemmas and the algebraic Ambrose–Singer conditions.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homdesc::BlockKind;
use crate::linalg::{columns, complexify, distance_to_span, null_space, orth_basis, rank, realify, realify_action, CMat, RMat, RVec, I, RANK_TOL};
use crate::matlie::SuMatrix;

use super::{ConnectionData, CurvatureOperator};

#[derive(Debug, Clone, Serialize)]
pub struct ParallelFields {
    /// `max ||R̃_{BC} Ã0||` over frame pairs.
    pub max_a0: f64,
    pub max_n2: f64,
    /// Gram determinant of the unit directions `Ã0 / sqrt(mu)` and `-2 Ñ2 / sqrt(mu)`.
    pub gram_det: f64,
    /// The two parallel directions in frame coordinates.
    pub directions: [Vec<f64>; 2],
}

pub fn parallel_fields_check(conn: &ConnectionData) -> ParallelFields {
    let r = conn.curvature();
    let f = &conn.frame;
    let (ia, inn) = (f.a0_index(), f.n2_index());
    let mut max_a0 = 0.0_f64;
    let mut max_n2 = 0.0_f64;
    for m in &r.matrices {
        max_a0 = max_a0.max(m.column(ia).norm());
        max_n2 = max_n2.max(m.column(inn).norm());
    }
    let ea = f.coords(&f.vector(ia));
    let en = f.coords(&f.vector(inn));
    let gram_det = ea.dot(&ea) * en.dot(&en) - ea.dot(&en).powi(2);
    ParallelFields { max_a0, max_n2, gram_det, directions: [ea.iter().copied().collect(), en.iter().copied().collect()] }
}

/// Orthonormal basis of `span{[e_a, e_b]_h}`.
pub fn holonomy_span(conn: &ConnectionData, tol: f64) -> Vec<SuMatrix> {
    let n = conn.n();
    let e = conn.frame.vectors();
    let mut vecs = Vec::new();
    for (a, ea) in e.iter().enumerate() {
        for eb in &e[a + 1..] {
            vecs.push(realify(conn.nomizu_bracket_h(ea, eb).matrix()));
        }
    }
    orth_basis(&vecs, tol, None)
        .into_iter()
        .map(|v| SuMatrix::from_raw(n, complexify(&v, n + 1, n + 1)))
        .collect()
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HolonomyComparison {
    pub dim_span: usize,
    pub dim_phi: usize,
    /// Largest distance of a span vector to `phi(n)`.
    pub span_in_phi: f64,
    pub phi_in_span: f64,
    pub equal: bool,
}

/// Mutual containment of `span{[m, m]_h}` and `phi(n)` at the rank threshold.
pub fn holonomy_equals_phi_n(conn: &ConnectionData, tol: f64) -> HolonomyComparison {
    let span: Vec<RVec> = holonomy_span(conn, tol).iter().map(|h| realify(h.matrix())).collect();
    let phi: Vec<RVec> = conn.phi.holonomy_basis(tol).iter().map(|h| realify(h.matrix())).collect();
    let worst = |from: &[RVec], to: &[RVec]| from.iter().map(|v| distance_to_span(to, v)).fold(0.0, f64::max);
    let span_in_phi = worst(&span, &phi);
    let phi_in_span = worst(&phi, &span);
    HolonomyComparison {
        dim_span: span.len(),
        dim_phi: phi.len(),
        span_in_phi,
        phi_in_span,
        equal: span.len() == phi.len() && span_in_phi < tol && phi_in_span < tol,
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Intertwiner {
    pub dim: usize,
    pub rank: usize,
    /// `max ||T A_V(H) - A_W(H) T|| / ||T||` over generators.
    pub residual: f64,
    /// Largest `||phi(X)||` for unit `X` in `W`.
    pub w_in_kernel: f64,
    /// Largest overlap of `W` with `V0 + V_ss`.
    pub w_overlap_vk: f64,
    /// Complex coordinates of `n1` on which `W` is supported.
    pub w_coordinates: Vec<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct ModuleActionReport {
    /// `k` on `V0 + J V0 + n2 + a`.
    pub trivial_on_v0: f64,
    /// `k0` on `V_ss + J V_ss`; `None` when `k0 = 0`.
    pub center_on_vss: Option<f64>,
    /// `None` when `V_ss = 0`.
    pub intertwiner: Option<Intertwiner>,
}

impl ModuleActionReport {
    pub fn max_residual(&self) -> f64 {
        let mut r = self.trivial_on_v0.max(self.center_on_vss.unwrap_or(0.0));
        if let Some(t) = &self.intertwiner {
            r = r.max(t.residual).max(t.w_in_kernel).max(t.w_overlap_vk);
        }
        r
    }
}

fn restricted(basis: &[RVec], a: &RMat) -> RMat {
    let p = columns(basis);
    p.transpose() * a * p
}

pub fn module_action_checks(conn: &ConnectionData) -> Result<ModuleActionReport> {
    let asm = conn
        .phi
        .assembly
        .as_ref()
        .ok_or_else(|| Error::InvalidSpecial("module checks need a description built from a holonomy spec".into()))?;
    let k = conn.n() - 1;
    let jm = realify_action(&CMat::identity(k, k).map(|z| z * I));
    let with_j = |basis: Vec<RVec>| -> Vec<RVec> {
        let mut out = basis.clone();
        out.extend(basis.iter().map(|x| &jm * x));
        out
    };

    let v0 = with_j(asm.block_basis(BlockKind::V0));
    let e = &conn.frame;
    let (a0, n2) = (e.vector(e.a0_index()), e.vector(e.n2_index()));
    let mut trivial_on_v0 = 0.0_f64;
    for h in conn.phi.holonomy_basis(RANK_TOL) {
        let act = realify_action(&h.stabilizer_action());
        for x in &v0 {
            trivial_on_v0 = trivial_on_v0.max((&act * x).norm());
        }
        trivial_on_v0 = trivial_on_v0.max(conn.h_action(&h, &a0).norm()).max(conn.h_action(&h, &n2).norm());
    }

    let vss_basis = asm.block_basis(BlockKind::Vss);
    let center = asm.center_generators();
    let center_on_vss = if center.is_empty() {
        None
    } else {
        let vss = with_j(vss_basis.clone());
        let mut worst = 0.0_f64;
        for &g in &center {
            let act = realify_action(&asm.generators[g].action);
            for x in &vss {
                worst = worst.max((&act * x).norm());
            }
        }
        Some(worst)
    };

    let intertwiner = if vss_basis.is_empty() {
        None
    } else {
        let w_basis = asm.block_basis(BlockKind::W);
        let m = vss_basis.len();
        let acts: Vec<(RMat, RMat)> = asm
            .generators
            .iter()
            .map(|g| {
                let a = realify_action(&g.action);
                (restricted(&vss_basis, &a), restricted(&w_basis, &a))
            })
            .collect();
        // vec(T A_V - A_W T) = (A_V^T (x) I - I (x) A_W) vec(T), column-major.
        let mut sys = RMat::zeros(m * m * acts.len(), m * m);
        for (gi, (av, aw)) in acts.iter().enumerate() {
            let block = av.transpose().kronecker(&RMat::identity(m, m)) - RMat::identity(m, m).kronecker(aw);
            sys.view_mut((gi * m * m, 0), (m * m, m * m)).copy_from(&block);
        }
        let ns = null_space(&sys, RANK_TOL);
        let mut t = RMat::zeros(m, m);
        for j in 0..ns.ncols() {
            let w = 1.0 + 0.37 * j as f64;
            for idx in 0..m * m {
                t[(idx % m, idx / m)] += w * ns[(idx, j)];
            }
        }
        let tn = t.norm().max(f64::MIN_POSITIVE);
        let residual = acts.iter().map(|(av, aw)| (&t * av - aw * &t).norm() / tn).fold(0.0, f64::max);

        let phi_cols: Vec<RVec> = conn.phi.n1_values().iter().map(|x| realify(x.matrix())).collect();
        let phi = columns(&phi_cols);
        let w_in_kernel = w_basis.iter().map(|x| (&phi * x).norm()).fold(0.0, f64::max);
        let vk: Vec<RVec> = asm.block_basis(BlockKind::V0).into_iter().chain(vss_basis.iter().cloned()).collect();
        let w_overlap_vk =
            w_basis.iter().flat_map(|x| vk.iter().map(move |y| x.dot(y).abs())).fold(0.0, f64::max);
        let mut coords: Vec<usize> = w_basis
            .iter()
            .flat_map(|x| x.iter().enumerate().filter(|(_, v)| v.abs() > 1e-12).map(|(i, _)| i % k).collect::<Vec<_>>())
            .collect();
        coords.sort_unstable();
        coords.dedup();
        Some(Intertwiner {
            dim: m,
            rank: rank(&t, RANK_TOL),
            residual,
            w_in_kernel,
            w_overlap_vk,
            w_coordinates: coords,
        })
    };

    Ok(ModuleActionReport { trivial_on_v0, center_on_vss, intertwiner })
}

/// Residuals of the algebraic Ambrose–Singer conditions: every holonomy
/// generator acts on `m` as a derivation killing `g`, `J`, `R̃` and `T̃`.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct AmbroseSinger {
    pub generators: usize,
    pub metric: f64,
    pub complex: f64,
    pub curvature: f64,
    pub torsion: f64,
}

impl AmbroseSinger {
    pub fn max(&self) -> f64 {
        self.metric.max(self.complex).max(self.curvature).max(self.torsion)
    }
}

/// `U . R` on frame pairs: `[A, R_ab] - sum_c A_ca R_cb - sum_c A_cb R_ac`.
pub(crate) fn derivation_on_curvature(a: &RMat, r: &CurvatureOperator) -> f64 {
    let d = r.dim;
    let mut worst = 0.0_f64;
    for x in 0..d {
        for y in 0..d {
            let mut m = a * r.get(x, y) - r.get(x, y) * a;
            for cc in 0..d {
                m -= r.get(cc, y) * a[(cc, x)];
                m -= r.get(x, cc) * a[(cc, y)];
            }
            worst = worst.max(m.norm());
        }
    }
    worst
}

/// `U . T` for `T[a][b][c] = g(T(e_a, e_b), e_c)`.
pub(crate) fn derivation_on_torsion(a: &RMat, t: &[f64], d: usize) -> f64 {
    let at = |x: usize, y: usize, z: usize| t[(x * d + y) * d + z];
    let mut worst = 0.0_f64;
    for x in 0..d {
        for y in 0..d {
            for z in 0..d {
                let mut s = 0.0;
                for w in 0..d {
                    s += a[(z, w)] * at(x, y, w);
                    s -= a[(w, x)] * at(w, y, z);
                    s -= a[(w, y)] * at(x, w, z);
                }
                worst = worst.max(s.abs());
            }
        }
    }
    worst
}

pub fn ambrose_singer(conn: &ConnectionData) -> AmbroseSinger {
    let hol = holonomy_span(conn, RANK_TOL);
    let r = conn.curvature();
    let t = conn.torsion_tensor();
    let d = conn.frame.dim();
    let j = conn.frame.j_matrix();
    let mut out = AmbroseSinger { generators: hol.len(), ..Default::default() };
    for h in &hol {
        let a = conn.h_action_matrix(h);
        out.metric = out.metric.max((&a + a.transpose()).norm());
        out.complex = out.complex.max((&a * &j - &j * &a).norm());
        out.curvature = out.curvature.max(derivation_on_curvature(&a, &r));
        out.torsion = out.torsion.max(derivation_on_torsion(&a, &t, d));
    }
    out
}
