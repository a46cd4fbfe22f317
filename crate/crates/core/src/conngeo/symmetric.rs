//! The symmetric description `su(n,1) = k + m` and its canonical connection.

use serde::Serialize;

use crate::error::Result;
use crate::homdesc::check_mu;
use crate::linalg::{c, columns, distance_to_span, orth_basis, rank, realify, CVec, RANK_TOL};
use crate::matlie::{bracket_unchecked, cartan_involution, cartan_pair, g0, symmetric_m_element, SuMatrix};

#[derive(Debug, Clone, Copy, Serialize)]
pub struct SymmetricReport {
    pub n: usize,
    /// `max ||[X, Y]_m||` over basis pairs: the torsion `-[X, Y]_m`.
    pub torsion_max: f64,
    /// Largest distance of a bracket `[X, Y]` to `k`.
    pub mm_in_k: f64,
    pub span_rank: usize,
    pub dim_k: usize,
}

impl SymmetricReport {
    pub fn holonomy_is_full(&self) -> bool {
        self.span_rank == self.dim_k
    }
}

/// `m` part for the Cartan decomposition: `(X - theta X) / 2`.
fn m_part(x: &SuMatrix) -> SuMatrix {
    (x - &cartan_involution(x)).scale(0.5)
}

pub fn symmetric_checks(n: usize) -> Result<SymmetricReport> {
    let pair = cartan_pair(n)?;
    let k: Vec<_> = orth_basis(&pair.k_basis.iter().map(|x| realify(x.matrix())).collect::<Vec<_>>(), RANK_TOL, None);
    let mut torsion_max = 0.0_f64;
    let mut mm_in_k = 0.0_f64;
    let mut brackets = Vec::new();
    for (i, x) in pair.m_basis.iter().enumerate() {
        for y in &pair.m_basis[i + 1..] {
            let b = bracket_unchecked(x, y);
            torsion_max = torsion_max.max(m_part(&b).norm());
            let v = realify(b.matrix());
            mm_in_k = mm_in_k.max(distance_to_span(&k, &v));
            brackets.push(v);
        }
    }
    Ok(SymmetricReport { n, torsion_max, mm_in_k, span_rank: rank(&columns(&brackets), RANK_TOL), dim_k: k.len() })
}

/// Holomorphic sectional curvature `g(R(X, JX) JX, X) / g(X, X)^2` of the
/// symmetric connection at `X = (a, b, v)`, with `R(X, Y) = -ad([X, Y])` and
/// `g = mu (a a' + b b' + 2 g0(v, v'))`.
pub fn symmetric_holomorphic_curvature(a: f64, b: f64, v: &CVec, mu: f64) -> Result<f64> {
    check_mu(mu)?;
    let metric = |x: &SuMatrix, y: &SuMatrix| {
        let (xa, xb, xv) = display(x);
        let (ya, yb, yv) = display(y);
        mu * (xa * ya + xb * yb + 2.0 * g0(&xv, &yv))
    };
    let x = symmetric_m_element(a, b, v);
    let jx = symmetric_m_element(b, -a, &(v * c(0.0, 1.0)));
    let r = bracket_unchecked(&bracket_unchecked(&x, &jx), &jx).scale(-1.0);
    let gx = metric(&x, &x);
    Ok(metric(&r, &x) / (gx * gx))
}

fn display(x: &SuMatrix) -> (f64, f64, CVec) {
    let n = x.n();
    let m = x.matrix();
    let p = n - 1;
    (m[(p, p)].re, m[(p, n)].im, CVec::from_fn(p, |j, _| m[(j, p)]))
}
