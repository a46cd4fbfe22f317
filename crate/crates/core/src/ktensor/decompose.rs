//! Orthogonal projection onto `K1 + K2 + K3 + K4`.
//!
//! `K2` and `K4` are fitted by least squares against the ansatz tensors
//! generated by the dual frame; the remainder splits into the `+1` and `-1`
//! eigenspaces of the symmetrizer `L`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rand::Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{condition_number, RMat, RVec};

use super::{j_matrix, KTensor};

/// `<X,Y> th(Z) - <X,Z> th(Y) + <X,JY> th(JZ) - <X,JZ> th(JY) + sign 2 <JY,Z> th(JX)`;
/// `sign = -1` spans `K2`, `sign = +1` spans `K4`.
pub fn ansatz(n: usize, theta: &RVec, sign: f64) -> KTensor {
    let j = j_matrix(n);
    let tj = j.transpose() * theta;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    KTensor::from_fn(n, |x, y, z| {
        delta(x, y) * theta[z] - delta(x, z) * theta[y] + j[(x, y)] * tj[z] - j[(x, z)] * tj[y]
            + sign * 2.0 * j[(z, y)] * tj[x]
    })
}

/// `g(B,C) s(D) - g(B,D) s(C) + g(B,JC) s(JD) - g(B,JD) s(JC)`.
fn kerperp_ansatz(n: usize, sigma: &RVec) -> KTensor {
    let j = j_matrix(n);
    let sj = j.transpose() * sigma;
    let delta = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    KTensor::from_fn(n, |b, c, d| {
        delta(b, c) * sigma[d] - delta(b, d) * sigma[c] + j[(b, c)] * sj[d] - j[(b, d)] * sj[c]
    })
}

struct Family {
    tensors: Vec<KTensor>,
    gram: RMat,
    condition: f64,
}

impl Family {
    fn new(tensors: Vec<KTensor>) -> Self {
        let m = tensors.len();
        let gram = RMat::from_fn(m, m, |i, j| tensors[i].inner(&tensors[j]));
        let condition = condition_number(&gram);
        Self { tensors, gram, condition }
    }

    fn check(&self) -> Result<()> {
        if self.condition > 1e8 || !self.condition.is_finite() {
            return Err(Error::NumericalDegeneracy { condition: self.condition });
        }
        Ok(())
    }

    /// Coefficients of the orthogonal projection of `s` onto `range`.
    fn solve(&self, s: &KTensor, range: std::ops::Range<usize>) -> Result<RVec> {
        let m = range.len();
        let g = self.gram.view((range.start, range.start), (m, m)).into_owned();
        let b = RVec::from_iterator(m, self.tensors[range].iter().map(|t| t.inner(s)));
        g.lu().solve(&b).ok_or(Error::NumericalDegeneracy { condition: f64::INFINITY })
    }

    fn combine(&self, coeffs: &RVec, offset: usize) -> KTensor {
        let n = self.tensors[0].n();
        let mut out = KTensor::zeros(n);
        for (i, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                out = &out + &self.tensors[offset + i].scale(c);
            }
        }
        out
    }
}

fn unit(d: usize, i: usize) -> RVec {
    let mut v = RVec::zeros(d);
    v[i] = 1.0;
    v
}

/// The `K2`/`K4` ansatz family for `n`, built once and shared.
fn family(n: usize) -> Arc<Family> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Family>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut map = cache.lock().unwrap_or_else(|e| e.into_inner());
    map.entry(n)
        .or_insert_with(|| {
            let d = 2 * n;
            let tensors =
                [-1.0, 1.0].iter().flat_map(|&sg| (0..d).map(move |i| ansatz(n, &unit(d, i), sg))).collect();
            Arc::new(Family::new(tensors))
        })
        .clone()
}

#[derive(Debug, Clone, Copy, Default, Serialize)]
pub struct DecompositionResiduals {
    /// `||S - (S1 + S2 + S3 + S4)||`.
    pub reconstruction: f64,
    /// `max |<Si, Sj>|`, `i != j`.
    pub orthogonality: f64,
    /// `||L S1 - S1||`.
    pub k1: f64,
    /// Distance of `S2` to the `K2` ansatz span.
    pub k2: f64,
    /// `||L S3 + S3||`.
    pub k3: f64,
    pub k4: f64,
    /// `||L(L R) - R||` on `R = S1 + S3`.
    pub l_squared: f64,
    /// `K(V)` symmetry residual of the input.
    pub input: f64,
}

impl DecompositionResiduals {
    pub fn identities(&self) -> f64 {
        self.k1.max(self.k2).max(self.k3).max(self.k4)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct KDecomposition {
    pub s1: KTensor,
    pub s2: KTensor,
    pub s3: KTensor,
    pub s4: KTensor,
    /// `theta(e_a)` in frame coordinates.
    pub theta2: Vec<f64>,
    pub theta4: Vec<f64>,
    pub c12: Vec<f64>,
    pub residuals: DecompositionResiduals,
    /// `max(1, ||S||)`, the scale the residuals are compared against.
    pub scale: f64,
}

impl KDecomposition {
    pub fn components(&self) -> [&KTensor; 4] {
        [&self.s1, &self.s2, &self.s3, &self.s4]
    }

    pub fn norms(&self) -> [f64; 4] {
        self.components().map(KTensor::norm)
    }
}

pub fn project(s: &KTensor) -> Result<KDecomposition> {
    let n = s.n();
    let d = 2 * n;
    let fam = family(n);
    fam.check()?;
    let c2 = fam.solve(s, 0..d)?;
    let c4 = fam.solve(s, d..2 * d)?;
    let s2 = fam.combine(&c2, 0);
    let s4 = fam.combine(&c4, d);
    let r = &(s - &s2) - &s4;
    let lr = r.symmetrizer();
    let s1 = (&r + &lr).scale(0.5);
    let s3 = (&r - &lr).scale(0.5);

    let comps = [&s1, &s2, &s3, &s4];
    let mut orthogonality = 0.0_f64;
    for i in 0..4 {
        for j in i + 1..4 {
            orthogonality = orthogonality.max(comps[i].inner(comps[j]).abs());
        }
    }
    let refit = |t: &KTensor, range: std::ops::Range<usize>, off: usize| -> Result<f64> {
        let c = fam.solve(t, range)?;
        Ok((t - &fam.combine(&c, off)).norm())
    };
    let residuals = DecompositionResiduals {
        reconstruction: (&(&(&(&s1 + &s2) + &s3) + &s4) - s).norm(),
        orthogonality,
        k1: (&s1.symmetrizer() - &s1).norm(),
        k2: refit(&s2, 0..d, 0)?,
        k3: (&s3.symmetrizer() + &s3).norm(),
        k4: refit(&s4, d..2 * d, d)?,
        l_squared: (&lr.symmetrizer() - &r).norm(),
        input: s.k_residual(),
    };
    Ok(KDecomposition {
        s1,
        s2,
        s3,
        s4,
        theta2: c2.iter().copied().collect(),
        theta4: c4.iter().copied().collect(),
        c12: s.c12().iter().copied().collect(),
        residuals,
        scale: s.norm().max(1.0),
    })
}

/// Orthogonal projection onto `ker(c12)^perp`, the span of
/// `g(B,C) s(D) - g(B,D) s(C) + g(B,JC) s(JD) - g(B,JD) s(JC)`.
pub fn ker_c12_perp_projection(s: &KTensor) -> Result<(KTensor, RVec)> {
    let n = s.n();
    let d = 2 * n;
    let fam = Family::new((0..d).map(|i| kerperp_ansatz(n, &unit(d, i))).collect());
    fam.check()?;
    let sigma = fam.solve(s, 0..d)?;
    Ok((fam.combine(&sigma, 0), sigma))
}

/// A random tensor lying in `K_i` (`i` in `1..=4`).
pub fn random_component<R: Rng + ?Sized>(n: usize, i: usize, rng: &mut R) -> Result<KTensor> {
    match i {
        2 | 4 => {
            let th = RVec::from_fn(2 * n, |_, _| rng.sample(StandardNormal));
            Ok(ansatz(n, &th, if i == 2 { -1.0 } else { 1.0 }))
        }
        1 | 3 => {
            let dec = project(&KTensor::random(n, rng).project_k())?;
            Ok(if i == 1 { dec.s1 } else { dec.s3 })
        }
        _ => Err(Error::InvalidSpecial(format!("no module K{i}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conngeo::ConnectionData;
    use crate::homdesc::sample::random_phi;
    use crate::homdesc::{construct_phi, HolonomySpec, Variant};
    use crate::ktensor::{alpha_form, build_s, e_split};
    use proptest::prelude::{any, prop_assert, proptest, ProptestConfig};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn ansatz_tensors_lie_in_k() {
        let fam = family(3);
        assert!(fam.tensors.iter().all(|t| t.k_residual() < 1e-14));
        assert!(fam.condition < 1e3);
        // K2 and K4 are orthogonal
        for a in 0..6 {
            for b in 6..12 {
                assert!(fam.gram[(a, b)].abs() < 1e-12);
            }
        }
    }

    #[test]
    fn symmetrizer_eigenvalues() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let s1 = random_component(3, 1, &mut rng).unwrap();
        let s3 = random_component(3, 3, &mut rng).unwrap();
        assert!(s1.norm() > 0.1 && s3.norm() > 0.1);
        assert!((&s1.symmetrizer() - &s1).max_abs() < 1e-12);
        assert!((&s3.symmetrizer() + &s3).max_abs() < 1e-12);
    }

    #[test]
    fn round_trip_recovers_theta() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let th = RVec::from_fn(8, |_, _| rng.sample(StandardNormal));
        let dec = project(&ansatz(4, &th, -1.0)).unwrap();
        assert!((RVec::from_vec(dec.theta2.clone()) - &th).norm() < 1e-10);
        assert!(dec.s1.norm() < 1e-10 && dec.s3.norm() < 1e-10 && dec.s4.norm() < 1e-10);
    }

    #[test]
    fn e1_is_half_sum_of_k2_k4() {
        let c = ConnectionData::new(construct_phi(&HolonomySpec::new(0, 0, vec![2], Variant::N2Kernel), 4, None, 2.0).unwrap())
            .unwrap();
        let [e1, e2, ..] = e_split(&c);
        let dec = project(&e1).unwrap();
        let half = alpha_form(&c.frame) * 0.5;
        assert!((RVec::from_vec(dec.theta2.clone()) - &half).norm() < 1e-10);
        assert!((RVec::from_vec(dec.theta4.clone()) - &half).norm() < 1e-10);
        assert!(dec.s1.norm() < 1e-10 && dec.s3.norm() < 1e-10);
        assert!(project(&e2).unwrap().s1.norm() < 1e-9);

        let s = build_s(&c);
        let (p, _) = ker_c12_perp_projection(&s).unwrap();
        assert!((&p - &e1).max_abs() < 1e-10);
        assert!(project(&s).unwrap().s1.norm() > 1e-3);
    }

    #[test]
    fn decompositions_are_sound() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        for n in 2..=5 {
            let c = ConnectionData::new(random_phi(n, &mut rng, true).unwrap()).unwrap();
            let dec = project(&build_s(&c)).unwrap();
            let r = dec.residuals;
            assert!(r.reconstruction < 1e-10 && r.orthogonality < 1e-9 && r.identities() < 1e-9, "{r:?}");
            assert!(r.l_squared < 1e-10);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(16))]
        #[test]
        fn projection_of_random_k_tensor(seed in any::<u64>(), n in 2usize..5) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let s = KTensor::random(n, &mut rng).project_k();
            let dec = project(&s).unwrap();
            let r = dec.residuals;
            prop_assert!(r.reconstruction < 1e-10 * dec.scale);
            prop_assert!(r.orthogonality < 1e-9 * dec.scale);
            prop_assert!(r.identities() < 1e-9 * dec.scale);
            for t in dec.components() {
                prop_assert!(t.k_residual() < 1e-10 * dec.scale);
            }
        }
    }
}
