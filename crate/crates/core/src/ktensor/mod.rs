//! Kähler homogeneous structure tensors on `m` and their decomposition into
//! the four modules `K1 .. K4`.
//!
//! Tensors are stored on the orthonormal frame of [`Frame`]: entry
//! `(b, c, d)` is `g(S_{e_b} e_c, e_d)`.

mod decompose;

use std::ops::{Add, Mul, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::conngeo::{ConnectionData, Frame, TangentVector};
use crate::linalg::{RMat, RVec};

pub use decompose::{
    ansatz, ker_c12_perp_projection, project, random_component, DecompositionResiduals, KDecomposition,
};

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KTensor {
    n: usize,
    data: Vec<f64>,
}

/// `J` on frame coordinates, independent of `mu`.
pub fn j_matrix(n: usize) -> RMat {
    let mut j = RMat::zeros(2 * n, 2 * n);
    for a in 0..n {
        j[(n + a, a)] = 1.0;
        j[(a, n + a)] = -1.0;
    }
    j
}

impl KTensor {
    pub fn zeros(n: usize) -> Self {
        let d = 2 * n;
        Self { n, data: vec![0.0; d * d * d] }
    }

    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize, usize) -> f64) -> Self {
        let d = 2 * n;
        let mut data = Vec::with_capacity(d * d * d);
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    data.push(f(a, b, c));
                }
            }
        }
        Self { n, data }
    }

    /// Row-major `(2n)^3` entries.
    pub fn from_entries(n: usize, data: Vec<f64>) -> Option<Self> {
        (data.len() == 8 * n * n * n).then_some(Self { n, data })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn entries(&self) -> &[f64] {
        &self.data
    }

    #[inline]
    fn idx(&self, a: usize, b: usize, c: usize) -> usize {
        let d = self.dim();
        (a * d + b) * d + c
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize, c: usize) -> f64 {
        self.data[self.idx(a, b, c)]
    }

    pub fn set(&mut self, a: usize, b: usize, c: usize, v: f64) {
        let i = self.idx(a, b, c);
        self.data[i] = v;
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, data: self.data.iter().map(|x| s * x).collect() }
    }

    /// `<S, S'> = sum S_ijk S'_ijk`.
    pub fn inner(&self, o: &KTensor) -> f64 {
        self.data.iter().zip(&o.data).map(|(a, b)| a * b).sum()
    }

    pub fn norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    /// `S'_{abc} = sum S_xyz m1[x,a] m2[y,b] m3[z,c]`, identity where `None`.
    pub fn transform_slots(&self, m: [Option<&RMat>; 3]) -> KTensor {
        let d = self.dim();
        let mut cur = self.data.clone();
        for (slot, mat) in m.iter().enumerate() {
            let Some(mat) = mat else { continue };
            let mut next = vec![0.0; cur.len()];
            for a in 0..d {
                for b in 0..d {
                    for c in 0..d {
                        let mut s = 0.0;
                        for x in 0..d {
                            let (i, coef) = match slot {
                                0 => ((x * d + b) * d + c, mat[(x, a)]),
                                1 => ((a * d + x) * d + c, mat[(x, b)]),
                                _ => ((a * d + b) * d + x, mat[(x, c)]),
                            };
                            if coef != 0.0 {
                                s += coef * cur[i];
                            }
                        }
                        next[(a * d + b) * d + c] = s;
                    }
                }
            }
            cur = next;
        }
        KTensor { n: self.n, data: cur }
    }

    /// Components in the frame `e'_a = sum o[x,a] e_x`.
    pub fn change_frame(&self, o: &RMat) -> KTensor {
        self.transform_slots([Some(o), Some(o), Some(o)])
    }

    /// `max |S_XYZ + S_XZY|`.
    pub fn skew_residual(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0_f64;
        for a in 0..d {
            for b in 0..d {
                for c in 0..d {
                    worst = worst.max((self.get(a, b, c) + self.get(a, c, b)).abs());
                }
            }
        }
        worst
    }

    /// `max |S_{X,JY,JZ} - S_XYZ|`.
    pub fn j_residual(&self) -> f64 {
        let j = j_matrix(self.n);
        (&self.transform_slots([None, Some(&j), Some(&j)]) - self).max_abs()
    }

    /// Largest violation of the defining symmetries of `K(V)`.
    pub fn k_residual(&self) -> f64 {
        self.skew_residual().max(self.j_residual())
    }

    /// Orthogonal projection onto `K(V)`.
    pub fn project_k(&self) -> KTensor {
        let skew = KTensor::from_fn(self.n, |a, b, c| 0.5 * (self.get(a, b, c) - self.get(a, c, b)));
        let j = j_matrix(self.n);
        (&skew + &skew.transform_slots([None, Some(&j), Some(&j)])).scale(0.5)
    }

    /// `c12(S)(e_c) = sum_i S_{e_i e_i e_c}`.
    pub fn c12(&self) -> RVec {
        let d = self.dim();
        RVec::from_fn(d, |c, _| (0..d).map(|i| self.get(i, i, c)).sum())
    }

    /// `L(S)_XYZ = (S_YZX + S_ZXY + S_{JY,JZ,X} + S_{JZ,X,JY}) / 2`.
    pub fn symmetrizer(&self) -> KTensor {
        let j = j_matrix(self.n);
        // A[a,b,c] = S_{Ja, Jb, c} and B[a,b,c] = S_{Ja, b, Jc}
        let sj = self.transform_slots([Some(&j), Some(&j), None]);
        let sk = self.transform_slots([Some(&j), None, Some(&j)]);
        KTensor::from_fn(self.n, |x, y, z| {
            0.5 * (self.get(y, z, x) + self.get(z, x, y) + sj.get(y, z, x) + sk.get(z, x, y))
        })
    }

    /// Residual of the derivation action of `a` (frame matrix of a
    /// holonomy element): `-(S(A., ., .) + S(., A., .) + S(., ., A.))`.
    pub fn derivation_residual(&self, a: &RMat) -> f64 {
        let t = &(&self.transform_slots([Some(a), None, None]) + &self.transform_slots([None, Some(a), None]))
            + &self.transform_slots([None, None, Some(a)]);
        t.max_abs()
    }

    pub fn random<R: Rng + ?Sized>(n: usize, rng: &mut R) -> KTensor {
        KTensor::from_fn(n, |_, _, _| rng.sample(StandardNormal))
    }
}

impl Add for &KTensor {
    type Output = KTensor;
    fn add(self, o: &KTensor) -> KTensor {
        KTensor { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }
}

impl Sub for &KTensor {
    type Output = KTensor;
    fn sub(self, o: &KTensor) -> KTensor {
        KTensor { n: self.n, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }
}

impl Mul<&KTensor> for f64 {
    type Output = KTensor;
    fn mul(self, t: &KTensor) -> KTensor {
        t.scale(self)
    }
}

/// `alpha(e_a)`: the `Ã0` coefficient of each frame vector.
pub fn alpha_form(frame: &Frame) -> RVec {
    RVec::from_iterator(frame.dim(), frame.vectors().iter().map(|e| e.alpha))
}

fn x_part(t: &TangentVector) -> TangentVector {
    TangentVector::from_v(t.v.clone(), t.mu)
}

/// The four summands of the structure tensor of a canonical connection:
/// `E1 = a_D g(B,C) - a_C g(B,D) + a_JD g(B,JC) - a_JC g(B,JD)`,
/// `E2 = a_JB g(X_JC, X_D)`, `E3 = g([B', C], D)`, `E4 = a_B g(C_r, D)`.
pub fn e_split(conn: &ConnectionData) -> [KTensor; 4] {
    let n = conn.n();
    let f = &conn.frame;
    let e = f.vectors();
    let je: Vec<TangentVector> = e.iter().map(crate::conngeo::complex_j).collect();
    let al: Vec<f64> = e.iter().map(|t| t.alpha).collect();
    let jal: Vec<f64> = je.iter().map(|t| t.alpha).collect();
    let g = |a: &TangentVector, b: &TangentVector| conn.metric(a, b);

    // gram[b][c] = g(e_b, e_c), gj[b][c] = g(e_b, J e_c)
    let gram: Vec<Vec<f64>> = e.iter().map(|b| e.iter().map(|c| g(b, c)).collect()).collect();
    let gj: Vec<Vec<f64>> = e.iter().map(|b| je.iter().map(|c| g(b, c)).collect()).collect();
    let xd: Vec<TangentVector> = e.iter().map(x_part).collect();
    let xjc: Vec<TangentVector> = je.iter().map(x_part).collect();
    let hr = conn.phi.hr().stabilizer_action();
    // bp[b][c] = coordinates of [B', e_c]; cr[c] = coordinates of [H_r, X_c]~
    let bp: Vec<Vec<RVec>> = e
        .iter()
        .map(|b| {
            let act = conn.b_prime(b).stabilizer_action();
            e.iter().map(|c| f.coords(&TangentVector::from_v(&act * &c.v, c.mu))).collect()
        })
        .collect();
    let cr: Vec<RVec> = e.iter().map(|c| f.coords(&TangentVector::from_v(&hr * &c.v, c.mu))).collect();

    let e1 = KTensor::from_fn(n, |b, c, dd| {
        al[dd] * gram[b][c] - al[c] * gram[b][dd] + jal[dd] * gj[b][c] - jal[c] * gj[b][dd]
    });
    let e2 = KTensor::from_fn(n, |b, c, dd| jal[b] * g(&xjc[c], &xd[dd]));
    let e3 = KTensor::from_fn(n, |b, c, dd| bp[b][c][dd]);
    let e4 = KTensor::from_fn(n, |b, c, dd| al[b] * cr[c][dd]);
    [e1, e2, e3, e4]
}

/// The structure tensor `S = E1 + E2 + E3 + E4`.
pub fn build_s(conn: &ConnectionData) -> KTensor {
    let [e1, e2, e3, e4] = e_split(conn);
    &(&(&e1 + &e2) + &e3) + &e4
}

/// `2 g(S_B C, D) = g([B,C]_m, D) - g([C,D]_m, B) + g([D,B]_m, C)` with the
/// brackets taken as matrices and projected.
pub fn build_s_oracle(conn: &ConnectionData) -> KTensor {
    let f = &conn.frame;
    let e = f.vectors();
    let br: Vec<Vec<RVec>> =
        e.iter().map(|b| e.iter().map(|c| f.coords(&conn.nomizu_bracket_m_oracle(b, c))).collect()).collect();
    KTensor::from_fn(conn.n(), |b, c, dd| 0.5 * (br[b][c][dd] - br[c][dd][b] + br[dd][b][c]))
}

/// Holomorphic sectional curvature of the Levi-Civita connection recovered
/// from `S`: `R = [S_X, S_Y] - S_{[X,Y]_m} - ad([X,Y]_h)` at `X, JX`.
pub fn levi_civita_holomorphic_curvature(conn: &ConnectionData, s: &KTensor, x: &RVec) -> f64 {
    let f = &conn.frame;
    let d = f.dim();
    let op = |y: &RVec| {
        let mut m = RMat::zeros(d, d);
        for a in 0..d {
            if y[a] == 0.0 {
                continue;
            }
            for b in 0..d {
                for c in 0..d {
                    m[(c, b)] += y[a] * s.get(a, b, c);
                }
            }
        }
        m
    };
    let jx = f.j_matrix() * x;
    let (bx, by) = (f.from_coords(x), f.from_coords(&jx));
    let (lx, ly) = (op(x), op(&jx));
    let mbr = f.coords(&conn.nomizu_bracket_m_oracle(&bx, &by));
    let r = &lx * &ly - &ly * &lx - op(&mbr) - conn.h_action_matrix(&conn.nomizu_bracket_h(&bx, &by));
    (&r * &jx).dot(x) / x.dot(x).powi(2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homdesc::sample::{random_phi, random_unitary};
    use crate::homdesc::{construct_phi, HolonomySpec, Variant};
    use crate::linalg::realify_action;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn conn_of(n: usize, seed: u64) -> ConnectionData {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        ConnectionData::new(random_phi(n, &mut rng, true).unwrap()).unwrap()
    }

    #[test]
    fn dual_routes_agree() {
        for n in 2..=6 {
            for seed in 0..3 {
                let c = conn_of(n, seed);
                let s = build_s(&c);
                let o = build_s_oracle(&c);
                assert!((&s - &o).max_abs() < 1e-11, "n={n}");
                assert!(s.k_residual() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_map_has_only_e1_e2() {
        let spec = HolonomySpec::new(0, 0, vec![], Variant::N2Kernel);
        let c = ConnectionData::new(construct_phi(&spec, 2, None, 2.0).unwrap()).unwrap();
        let [_, _, e3, e4] = e_split(&c);
        assert_eq!(e3.max_abs(), 0.0);
        assert_eq!(e4.max_abs(), 0.0);
    }

    #[test]
    fn trace_is_2n_alpha() {
        for n in 2..=5 {
            let c = conn_of(n, 40 + n as u64);
            let s = build_s(&c);
            let want = alpha_form(&c.frame) * (2.0 * n as f64);
            assert!((s.c12() - want).norm() < 1e-10);
            let [_, e2, e3, e4] = e_split(&c);
            for t in [e2, e3, e4] {
                assert!(t.c12().norm() < 1e-10);
            }
        }
    }

    #[test]
    fn c12_is_frame_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = conn_of(4, 9);
        let s = build_s(&c);
        for _ in 0..5 {
            let o = realify_action(&random_unitary(4, &mut rng));
            let moved = s.change_frame(&o);
            assert!((moved.c12() - o.transpose() * s.c12()).norm() < 1e-11);
            assert!(moved.k_residual() < 1e-12);
        }
    }

    #[test]
    fn levi_civita_curvature_is_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for n in 2..=4 {
            let c = conn_of(n, 100 + n as u64);
            let s = build_s(&c);
            for _ in 0..3 {
                let x = RVec::from_fn(2 * n, |_, _| rng.sample(StandardNormal));
                let k = levi_civita_holomorphic_curvature(&c, &s, &x);
                assert!((k + 4.0 / c.mu()).abs() < 1e-10, "{k}");
            }
        }
    }

    #[test]
    fn symmetrizer_preserves_k() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let s = KTensor::random(3, &mut rng).project_k();
        assert!(s.k_residual() < 1e-12);
        assert!(s.symmetrizer().k_residual() < 1e-12);
    }
}
