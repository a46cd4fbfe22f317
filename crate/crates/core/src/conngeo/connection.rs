//! The canonical connection of a reductive description `g = h + m`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::homdesc::PhiMap;
use crate::linalg::{c, realify_action, singular_values, CMat, CVec, RMat};
use crate::matlie::{a0, bracket_unchecked, embed_unchecked, n1_element, n2, omega0, SuMatrix};

use super::{raw_metric, symplectic, Frame, TangentVector};

#[derive(Debug, Clone)]
pub struct ConnectionData {
    pub phi: PhiMap,
    /// `H0 = phi(A0)`.
    pub h0: SuMatrix,
    /// `H_r0 = H_r + H0`.
    pub hr0: SuMatrix,
    /// `f = Id + ad_{H_r0}` on realified `n1` coordinates.
    pub f: RMat,
    pub frame: Frame,
}

/// `R̃_{e_a e_b}` as matrices on frame coordinates, indexed `a * dim + b`,
/// together with the `h` elements producing them.
#[derive(Debug, Clone)]
pub struct CurvatureOperator {
    pub dim: usize,
    pub matrices: Vec<RMat>,
    pub elements: Vec<SuMatrix>,
}

impl CurvatureOperator {
    pub fn get(&self, a: usize, b: usize) -> &RMat {
        &self.matrices[a * self.dim + b]
    }

    pub fn element(&self, a: usize, b: usize) -> &SuMatrix {
        &self.elements[a * self.dim + b]
    }

    /// `R[a][b][c][d] = g(R̃_{e_a e_b} e_c, e_d)`.
    pub fn entry(&self, a: usize, b: usize, cc: usize, d: usize) -> f64 {
        self.get(a, b)[(d, cc)]
    }
}

/// Largest deviations between closed forms and the matrix oracles over all
/// frame pairs.
#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct OracleResiduals {
    pub bracket_m: f64,
    pub curvature_element: f64,
    pub curvature_action: f64,
    pub torsion: f64,
    /// Distance of the oracle `h` parts from the stabilizer.
    pub h_membership: f64,
}

impl OracleResiduals {
    pub fn max(&self) -> f64 {
        self.bracket_m.max(self.curvature_element).max(self.curvature_action).max(self.torsion).max(self.h_membership)
    }
}

impl ConnectionData {
    pub fn new(phi: PhiMap) -> Result<Self> {
        let n = phi.n();
        let frame = Frame::new(n, phi.mu())?;
        let h0 = phi.phi_a0().clone();
        let hr0 = phi.hr0();
        let k = n - 1;
        let f = RMat::identity(2 * k, 2 * k) + realify_action(&hr0.stabilizer_action());
        let smin = singular_values(&f).last().copied().unwrap_or(1.0);
        if smin < 1e-12 {
            return Err(Error::NumericalDegeneracy { condition: f64::INFINITY });
        }
        Ok(Self { phi, h0, hr0, f, frame })
    }

    pub fn n(&self) -> usize {
        self.phi.n()
    }

    pub fn mu(&self) -> f64 {
        self.phi.mu()
    }

    /// `Ã0 = A0 + H_r0`.
    pub fn a0_tilde(&self) -> SuMatrix {
        &a0(self.n()) + &self.hr0
    }

    /// `Ñ2 = N2 + phi(N2)`.
    pub fn n2_tilde(&self) -> SuMatrix {
        &n2(self.n()) + self.phi.phi_n2()
    }

    /// `X̃(u) = X(u) + phi(X(u))`.
    pub fn x_tilde(&self, u: &CVec) -> SuMatrix {
        &n1_element(u) + &self.phi.phi_n1(u)
    }

    /// The element of `m` represented by `b`.
    pub fn lift(&self, b: &TangentVector) -> SuMatrix {
        let mut out = self.x_tilde(&b.u());
        out = &out + &self.a0_tilde().scale(b.alpha);
        &out + &self.n2_tilde().scale(b.eta)
    }

    /// `m` component of an element of `g = h + m`.
    pub fn project_m(&self, y: &SuMatrix) -> TangentVector {
        let n = self.n();
        let m = y.matrix();
        let k = n - 1;
        let v = CVec::from_fn(k, |i, _| m[(i, n)] * c(-0.5, 0.0));
        TangentVector { alpha: m[(k, k)].re, eta: m[(k, n)].im, v, mu: self.mu() }
    }

    /// `h` component of an element of `g = h + m`.
    pub fn project_h(&self, y: &SuMatrix) -> SuMatrix {
        y - &self.lift(&self.project_m(y))
    }

    /// `B' = alpha_B phi(A0) + eta_B phi(N2) + phi(X_B)`.
    pub fn b_prime(&self, b: &TangentVector) -> SuMatrix {
        self.phi.eval(b.alpha, b.eta, &b.u())
    }

    /// Action of an element of the stabilizer on `m`: only the `n1` part moves.
    fn act_h(&self, h: &SuMatrix, b: &TangentVector) -> TangentVector {
        TangentVector::from_v(h.stabilizer_action() * &b.v, b.mu)
    }

    /// `[B, C]_m` by the closed formula.
    pub fn nomizu_bracket_m(&self, b: &TangentVector, cc: &TangentVector) -> Result<TangentVector> {
        let w = symplectic(b, cc)?;
        let hr = self.phi.hr();
        let nt = TangentVector::n2(self.n(), self.mu());
        let c_r = self.act_h(hr, cc);
        let b_r = self.act_h(hr, b);
        let first = &(&(cc + &c_r) - &nt.scale(cc.eta)).scale(b.alpha) - &(&(b + &b_r) - &nt.scale(b.eta)).scale(cc.alpha);
        let second = &self.act_h(&self.b_prime(b), cc) - &self.act_h(&self.b_prime(cc), b);
        Ok(&(&first + &second) + &nt.scale(4.0 / self.mu() * w))
    }

    /// `[B, C]_m` by matrix bracket of the lifts and projection.
    pub fn nomizu_bracket_m_oracle(&self, b: &TangentVector, cc: &TangentVector) -> TangentVector {
        self.project_m(&bracket_unchecked(&self.lift(b), &self.lift(cc)))
    }

    /// `[B, C]_h`.
    pub fn nomizu_bracket_h(&self, b: &TangentVector, cc: &TangentVector) -> SuMatrix {
        self.project_h(&bracket_unchecked(&self.lift(b), &self.lift(cc)))
    }

    /// Action of an `h` element on `m` by bracket with the lift, then projection.
    pub fn h_action(&self, h: &SuMatrix, b: &TangentVector) -> TangentVector {
        self.project_m(&bracket_unchecked(h, &self.lift(b)))
    }

    /// Matrix of `h_action` on frame coordinates.
    pub fn h_action_matrix(&self, h: &SuMatrix) -> RMat {
        let d = self.frame.dim();
        let mut out = RMat::zeros(d, d);
        for (j, e) in self.frame.vectors().iter().enumerate() {
            out.set_column(j, &self.frame.coords(&self.h_action(h, e)));
        }
        out
    }

    /// `phi(f X(u)) = phi(X(u + D_{H_r0} u))`.
    fn phi_f(&self, u: &CVec) -> SuMatrix {
        let fu = u + self.hr0.stabilizer_action() * u;
        self.phi.phi_n1(&fu)
    }

    /// The `h` element `R̃_{BC}` by the closed forms on `Ã0, Ñ2, X̃`.
    pub fn curvature_element(&self, b: &TangentVector, cc: &TangentVector) -> SuMatrix {
        let (ub, uc) = (b.u(), cc.u());
        let pn2 = self.phi.phi_n2();
        let r_an = pn2.scale(-2.0);
        let r_ax = |u: &CVec| self.phi_f(u).scale(-1.0);
        let (pb, pc) = (self.phi.phi_n1(&ub), self.phi.phi_n1(&uc));
        let r_xx = &pn2.scale(-2.0 * omega0(&ub, &uc)) - &bracket_unchecked(&pb, &pc);
        let mut out = r_an.scale(b.alpha * cc.eta - cc.alpha * b.eta);
        out = &out + &r_ax(&uc).scale(b.alpha);
        out = &out - &r_ax(&ub).scale(cc.alpha);
        &out + &r_xx
    }

    /// `R̃_{BC} D = [R̃_{BC}, D]` acting on `m`.
    pub fn curvature_apply(&self, b: &TangentVector, cc: &TangentVector, d: &TangentVector) -> TangentVector {
        self.h_action(&self.curvature_element(b, cc), d)
    }

    pub fn curvature(&self) -> CurvatureOperator {
        let e = self.frame.vectors();
        let dim = e.len();
        let mut elements = Vec::with_capacity(dim * dim);
        let mut matrices = Vec::with_capacity(dim * dim);
        for a in &e {
            for b in &e {
                let el = self.curvature_element(a, b);
                matrices.push(self.h_action_matrix(&el));
                elements.push(el);
            }
        }
        CurvatureOperator { dim, matrices, elements }
    }

    /// Nomizu curvature `R(B, C) = ad([B, C]_h)` on `m`.
    pub fn curvature_oracle(&self) -> CurvatureOperator {
        let e = self.frame.vectors();
        let dim = e.len();
        let mut elements = Vec::with_capacity(dim * dim);
        let mut matrices = Vec::with_capacity(dim * dim);
        for a in &e {
            for b in &e {
                let el = self.nomizu_bracket_h(a, b);
                matrices.push(self.h_action_matrix(&el));
                elements.push(el);
            }
        }
        CurvatureOperator { dim, matrices, elements }
    }

    /// `T̃(B, C)` by the closed forms.
    pub fn torsion(&self, b: &TangentVector, cc: &TangentVector) -> TangentVector {
        let (n, mu) = (self.n(), self.mu());
        let nt = TangentVector::n2(n, mu);
        let dr = self.hr0.stabilizer_action();
        let t_ax = |t: &TangentVector| TangentVector::from_v(-(&t.v + &dr * &t.v), mu);
        let t_an = nt.scale(-2.0);
        let dn = self.phi.phi_n2().stabilizer_action();
        let t_nx = |t: &TangentVector| TangentVector::from_v(-(&dn * &t.v), mu);
        let (ub, uc) = (b.u(), cc.u());
        let db = self.phi.phi_n1(&ub).stabilizer_action();
        let dc = self.phi.phi_n1(&uc).stabilizer_action();
        let xx_v = -(&db * &cc.v) + &dc * &b.v;
        let t_xx = &TangentVector::from_v(xx_v, mu) - &nt.scale(2.0 * omega0(&ub, &uc));

        let mut out = t_an.scale(b.alpha * cc.eta - cc.alpha * b.eta);
        out = &out + &t_ax(cc).scale(b.alpha);
        out = &out - &t_ax(b).scale(cc.alpha);
        out = &out + &t_nx(cc).scale(b.eta);
        out = &out - &t_nx(b).scale(cc.eta);
        &out + &t_xx
    }

    /// `T[a][b][c] = g(T̃(e_a, e_b), e_c)`.
    pub fn torsion_tensor(&self) -> Vec<f64> {
        let e = self.frame.vectors();
        let d = e.len();
        let mut out = vec![0.0; d * d * d];
        for (a, ea) in e.iter().enumerate() {
            for (b, eb) in e.iter().enumerate() {
                let t = self.frame.coords(&self.torsion(ea, eb));
                for cc in 0..d {
                    out[(a * d + b) * d + cc] = t[cc];
                }
            }
        }
        out
    }

    /// Compares every closed form with its matrix oracle on the frame.
    pub fn oracle_residuals(&self) -> OracleResiduals {
        let e = self.frame.vectors();
        let mut r = OracleResiduals::default();
        for a in &e {
            for b in &e {
                let oracle_m = self.nomizu_bracket_m_oracle(a, b);
                let closed = self.nomizu_bracket_m(a, b).expect("frame vectors are compatible");
                r.bracket_m = r.bracket_m.max((&closed - &oracle_m).norm());
                r.torsion = r.torsion.max((&self.torsion(a, b) + &oracle_m).norm());

                let oracle_h = self.nomizu_bracket_h(a, b);
                r.h_membership = r.h_membership.max(stabilizer_residual(&oracle_h));
                let el = self.curvature_element(a, b);
                r.curvature_element = r.curvature_element.max((&el - &oracle_h).norm());
                let diff = self.h_action_matrix(&el) - self.h_action_matrix(&oracle_h);
                r.curvature_action = r.curvature_action.max(diff.norm());
            }
        }
        r
    }

    pub fn metric(&self, b: &TangentVector, cc: &TangentVector) -> f64 {
        raw_metric(b, cc)
    }
}

/// Distance of `y` from the embedded stabilizer `s(u(n-1) + u(1))`.
pub(crate) fn stabilizer_residual(y: &SuMatrix) -> f64 {
    let n = y.n();
    let m = y.matrix();
    let k = n - 1;
    let t = m[(n, n)];
    let block: CMat = m.view((0, 0), (k, k)) - CMat::identity(k, k) * t;
    let rebuilt = embed_unchecked(&block);
    (m - rebuilt.matrix()).norm()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homdesc::sample::random_phi;
    use crate::homdesc::{construct_phi, special_phi_linear, HolonomySpec, SpecialKind, Variant};
    use crate::conngeo::complex_j;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn zero_conn(n: usize) -> ConnectionData {
        let spec = HolonomySpec::new(0, 0, vec![], Variant::N2Kernel);
        ConnectionData::new(construct_phi(&spec, n, None, 2.0).unwrap()).unwrap()
    }

    #[test]
    fn flat_case() {
        let conn = zero_conn(3);
        let a = TangentVector::a0(3, 2.0);
        let nt = TangentVector::n2(3, 2.0);
        assert!((&conn.nomizu_bracket_m(&a, &nt).unwrap() - &nt.scale(2.0)).norm() < 1e-14);
        let r = conn.curvature();
        assert!(r.matrices.iter().all(|m| m.norm() == 0.0));
        let x = TangentVector::from_v(CVec::from_vec(vec![c(1.0, 2.0), c(0.0, -1.0)]), 2.0);
        assert!((&conn.torsion(&a, &x) + &x).norm() < 1e-14);
    }

    #[test]
    fn bracket_with_itself_vanishes() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let conn = ConnectionData::new(random_phi(4, &mut rng, true).unwrap()).unwrap();
        let e = conn.frame.vectors();
        let b = &(&e[0] + &e[3].scale(0.7)) + &e[7].scale(-1.1);
        assert!(conn.nomizu_bracket_m(&b, &b).unwrap().norm() < 1e-13);
    }

    #[test]
    fn k24_curvature_is_j_on_n1() {
        let conn = ConnectionData::new(special_phi_linear(4, SpecialKind::K24, 2.0).unwrap()).unwrap();
        let a = TangentVector::a0(4, 2.0);
        let nt = TangentVector::n2(4, 2.0);
        for e in conn.frame.vectors() {
            if e.alpha != 0.0 || e.eta != 0.0 {
                continue;
            }
            let r = conn.curvature_apply(&a, &nt, &e);
            assert!((&r - &complex_j(&e)).norm() < 1e-13);
        }
    }

    #[test]
    fn closed_forms_match_oracles() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for n in 2..=6 {
            for _ in 0..4 {
                let conn = ConnectionData::new(random_phi(n, &mut rng, true).unwrap()).unwrap();
                let r = conn.oracle_residuals();
                assert!(r.max() < 1e-11, "n={n} {r:?}");
            }
        }
    }

    #[test]
    fn projections_split_g() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let conn = ConnectionData::new(random_phi(5, &mut rng, true).unwrap()).unwrap();
        let e = conn.frame.vectors();
        for a in &e {
            assert!((&conn.project_m(&conn.lift(a)) - a).norm() < 1e-13);
            assert!(conn.project_h(&conn.lift(a)).norm() < 1e-13);
        }
    }
}
