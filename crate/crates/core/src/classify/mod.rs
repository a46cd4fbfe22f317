//! Algebraic classification of canonical connections by their `(phi, H_r)`
//! data, and its numeric counterpart read off the `K1 .. K4` support.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::conngeo::{symmetric_checks, ConnectionData};
use crate::error::{Error, Result};
use crate::ktensor::{build_s, project, random_component, KDecomposition, KTensor};
use crate::linalg::{distance_to_span, realify, realify_action, CMat, RMat, RVec, I};
use crate::tol::Tolerances;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "label")]
pub enum ClassLabel {
    Symmetric,
    StrictK24,
    #[serde(rename = "StrictK234_HolDim1")]
    StrictK234HolDim1 { lambda: f64 },
    #[serde(rename = "StrictK234_HolTrivial")]
    StrictK234HolTrivial { beta: f64 },
    General,
}

/// The module pattern a label predicts for `S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pattern {
    Symmetric,
    K24,
    K234,
    General,
}

impl ClassLabel {
    pub fn pattern(&self) -> Pattern {
        match self {
            ClassLabel::Symmetric => Pattern::Symmetric,
            ClassLabel::StrictK24 => Pattern::K24,
            ClassLabel::StrictK234HolDim1 { .. } | ClassLabel::StrictK234HolTrivial { .. } => Pattern::K234,
            ClassLabel::General => Pattern::General,
        }
    }
}

impl fmt::Display for ClassLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassLabel::Symmetric => write!(f, "Symmetric"),
            ClassLabel::StrictK24 => write!(f, "StrictK24"),
            ClassLabel::StrictK234HolDim1 { lambda } => write!(f, "StrictK234_HolDim1({lambda})"),
            ClassLabel::StrictK234HolTrivial { beta } => write!(f, "StrictK234_HolTrivial({beta})"),
            ClassLabel::General => write!(f, "General"),
        }
    }
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Pattern::Symmetric => "Symmetric",
            Pattern::K24 => "K24",
            Pattern::K234 => "K234",
            Pattern::General => "General",
        };
        f.write_str(s)
    }
}

/// What the classifier looked at.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Evidence {
    pub hol_dim: usize,
    /// `R̃_{Ã0 Ñ2} = lambda J` on `n1` (least squares), with relative residual.
    pub lambda: Option<f64>,
    pub lambda_residual: Option<f64>,
    /// `[phi(A0) + H_r, X̃] = beta J X̃` (least squares), with relative residual.
    pub beta: Option<f64>,
    pub beta_residual: Option<f64>,
    pub hr_zero: bool,
    pub phi_a0_zero: bool,
    pub phi_n1_zero: bool,
    /// Distance of `phi(A0)` to the holonomy algebra.
    pub phi_a0_to_hol: f64,
    /// Conditions that held, in test order.
    pub fired: Vec<String>,
}

/// Least-squares fit `m = c J` on realified `n1`; returns `(c, residual / max(1, ||m||))`.
fn fit_j(m: &RMat) -> (f64, f64) {
    let k = m.nrows() / 2;
    let j = realify_action(&CMat::identity(k, k).map(|z| z * I));
    let c = m.dot(&j) / j.dot(&j);
    (c, (m - &j * c).norm() / m.norm().max(1.0))
}

fn proportional(residual: f64, tol: &Tolerances, what: &str, value: f64) -> Result<bool> {
    if residual <= tol.component {
        Ok(true)
    } else if residual <= tol.strict {
        Err(Error::Ambiguous(format!(
            "{what}: fitted constant {value:.6} leaves residual {residual:.3e}, between {:.1e} and {:.1e}",
            tol.component, tol.strict
        )))
    } else {
        Ok(false)
    }
}

/// Decision procedure of the classification theorem for a non-symmetric
/// description.
pub fn algebraic_class(conn: &ConnectionData, tol: &Tolerances) -> Result<(ClassLabel, Evidence)> {
    let phi = &conn.phi;
    let hol = phi.holonomy_basis(tol.rank);
    let zero = |m: &crate::matlie::SuMatrix| m.is_zero(tol.rank);
    let basis: Vec<RVec> = hol.iter().map(|h| realify(h.matrix())).collect();
    let mut ev = Evidence {
        hol_dim: hol.len(),
        hr_zero: zero(phi.hr()),
        phi_a0_zero: zero(phi.phi_a0()),
        phi_n1_zero: phi.n1_values().iter().all(zero),
        phi_a0_to_hol: distance_to_span(&basis, &realify(phi.phi_a0().matrix())),
        ..Default::default()
    };

    let curv = realify_action(&phi.phi_n2().scale(-2.0).stabilizer_action());
    let (lambda, lres) = fit_j(&curv);
    ev.lambda = Some(lambda);
    ev.lambda_residual = Some(lres);

    if ev.hol_dim == 1 && ev.phi_n1_zero && ev.hr_zero {
        ev.fired.push("hol one dimensional, generated by phi(N2)".into());
        if proportional(lres, tol, "R(A0,N2) against J", lambda)? {
            ev.fired.push("R(A0,N2) = lambda J on n1".into());
            if lambda.abs() <= tol.strict {
                return Err(Error::Ambiguous(format!("nonzero phi(N2) acts as lambda J with lambda = {lambda:.3e}")));
            }
            if (lambda - 1.0).abs() <= tol.strict && ev.phi_a0_zero {
                ev.fired.push("lambda = 1 and a in ker phi".into());
                return Ok((ClassLabel::StrictK24, ev));
            }
            if ev.phi_a0_to_hol <= tol.rank * phi.phi_a0().norm().max(1.0) {
                ev.fired.push("phi(a) contained in phi(n2) = hol".into());
                return Ok((ClassLabel::StrictK234HolDim1 { lambda }, ev));
            }
        }
    }

    if ev.hol_dim == 0 {
        ev.fired.push("hol trivial".into());
        let shift = realify_action(&phi.hr0().stabilizer_action());
        let (beta, bres) = fit_j(&shift);
        ev.beta = Some(beta);
        ev.beta_residual = Some(bres);
        if proportional(bres, tol, "phi(A0) + H_r against J", beta)? {
            ev.fired.push("[phi(A0) + H_r, X] = beta J X".into());
            return Ok((ClassLabel::StrictK234HolTrivial { beta }, ev));
        }
    }

    ev.fired.push("general".into());
    Ok((ClassLabel::General, ev))
}

/// The symmetric description, after checking its defining properties.
pub fn symmetric_class(n: usize) -> Result<(ClassLabel, Evidence)> {
    let r = symmetric_checks(n)?;
    let mut ev = Evidence { hol_dim: r.span_rank, hr_zero: true, phi_a0_zero: true, phi_n1_zero: true, ..Default::default() };
    if r.torsion_max < 1e-12 && r.holonomy_is_full() {
        ev.fired.push("torsion free with hol = s(u(n) + u(1))".into());
        Ok((ClassLabel::Symmetric, ev))
    } else {
        Err(Error::Ambiguous(format!("Cartan pair check failed: {r:?}")))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct Support {
    pub norms: [f64; 4],
    pub threshold: f64,
    pub present: [bool; 4],
    pub pattern: Pattern,
    /// `K1` present without `K3`: excluded by the theorem.
    pub forbidden: bool,
}

impl Support {
    /// Module indices `1..=4` above the threshold.
    pub fn indices(&self) -> Vec<usize> {
        (0..4).filter(|&i| self.present[i]).map(|i| i + 1).collect()
    }
}

/// Support pattern of a decomposition: a component counts when its norm
/// exceeds `strict * max(1, ||S||)`.
pub fn numeric_class(dec: &KDecomposition, tol: &Tolerances) -> Support {
    let norms = dec.norms();
    let threshold = tol.strict * dec.scale;
    let present = norms.map(|x| x > threshold);
    let pattern = if !present.iter().any(|&p| p) {
        Pattern::Symmetric
    } else if present[0] {
        Pattern::General
    } else if present[2] {
        Pattern::K234
    } else {
        Pattern::K24
    };
    Support { norms, threshold, present, pattern, forbidden: present[0] && !present[2] }
}

#[derive(Debug, Clone, Serialize)]
pub struct CrossValidation {
    pub label: ClassLabel,
    pub evidence: Evidence,
    pub support: Support,
    pub agree: bool,
}

impl CrossValidation {
    pub fn passed(&self) -> bool {
        self.agree && !self.support.forbidden
    }
}

fn compare(label: ClassLabel, evidence: Evidence, dec: &KDecomposition, tol: &Tolerances) -> CrossValidation {
    let support = numeric_class(dec, tol);
    let agree = label.pattern() == support.pattern;
    CrossValidation { label, evidence, support, agree }
}

/// Algebraic label against the numeric support of `S`.
pub fn cross_validate(conn: &ConnectionData, tol: &Tolerances) -> Result<CrossValidation> {
    let (label, ev) = algebraic_class(conn, tol)?;
    Ok(compare(label, ev, &project(&build_s(conn))?, tol))
}

/// As [`cross_validate`] with `perturbation` added to `S` first.
pub fn cross_validate_perturbed(conn: &ConnectionData, perturbation: &KTensor, tol: &Tolerances) -> Result<CrossValidation> {
    let (label, ev) = algebraic_class(conn, tol)?;
    let s = &build_s(conn) + perturbation;
    Ok(compare(label, ev, &project(&s)?, tol))
}

pub fn cross_validate_symmetric(n: usize, tol: &Tolerances) -> Result<CrossValidation> {
    let (label, ev) = symmetric_class(n)?;
    Ok(compare(label, ev, &project(&KTensor::zeros(n))?, tol))
}

/// Random `K1` noise of Frobenius norm `size`.
pub fn k1_fault<R: Rng + ?Sized>(n: usize, size: f64, rng: &mut R) -> Result<KTensor> {
    let t = random_component(n, 1, rng)?;
    Ok(t.scale(size / t.norm().max(f64::MIN_POSITIVE)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::homdesc::sample::random_phi;
    use crate::homdesc::{construct_phi, special_phi_linear, HolonomySpec, SpecialKind, Variant};
    use crate::matlie::{embed_stabilizer, SuMatrix};
    use crate::homdesc::PhiMap;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn special(n: usize, kind: SpecialKind) -> ConnectionData {
        ConnectionData::new(special_phi_linear(n, kind, 2.0).unwrap()).unwrap()
    }

    fn tol() -> Tolerances {
        Tolerances::default()
    }

    #[test]
    fn special_families() {
        for n in 2..=5 {
            let cv = cross_validate(&special(n, SpecialKind::K24), &tol()).unwrap();
            assert_eq!(cv.label, ClassLabel::StrictK24);
            assert_eq!(cv.support.indices(), vec![2, 4]);
            assert!(cv.passed());
        }
        let c = special(3, SpecialKind::K234Lambda { lambda: 3.0 });
        let (l, _) = algebraic_class(&c, &tol()).unwrap();
        match l {
            ClassLabel::StrictK234HolDim1 { lambda } => assert!((lambda - 3.0).abs() < 1e-9),
            other => panic!("{other}"),
        }
        let c = special(3, SpecialKind::K234Beta { beta: 0.0 });
        assert_eq!(algebraic_class(&c, &tol()).unwrap().0, ClassLabel::StrictK234HolTrivial { beta: 0.0 });
        for kind in [SpecialKind::K234Lambda { lambda: -1.0 }, SpecialKind::K234Beta { beta: 1.5 }] {
            let cv = cross_validate(&special(4, kind), &tol()).unwrap();
            assert!(cv.passed(), "{cv:?}");
        }
    }

    #[test]
    fn symmetric_and_general() {
        let cv = cross_validate_symmetric(3, &tol()).unwrap();
        assert_eq!(cv.label, ClassLabel::Symmetric);
        assert!(cv.passed());

        let spec = HolonomySpec::new(0, 0, vec![2], Variant::N2Kernel);
        let c = ConnectionData::new(construct_phi(&spec, 4, None, 2.0).unwrap()).unwrap();
        let cv = cross_validate(&c, &tol()).unwrap();
        assert_eq!(cv.label, ClassLabel::General);
        assert!(cv.support.present[0]);
        assert!(cv.passed());
    }

    #[test]
    fn random_descriptions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for n in 2..=5 {
            for _ in 0..4 {
                let c = ConnectionData::new(random_phi(n, &mut rng, true).unwrap()).unwrap();
                let cv = cross_validate(&c, &tol()).unwrap();
                assert!(cv.passed(), "{cv:?}");
            }
        }
    }

    #[test]
    fn fault_is_detected() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let c = special(3, SpecialKind::K24);
        let noise = k1_fault(3, 1e-3 * build_s(&c).norm(), &mut rng).unwrap();
        let cv = cross_validate_perturbed(&c, &noise, &tol()).unwrap();
        assert!(!cv.agree);
        assert!(cv.support.forbidden);
    }

    #[test]
    fn near_proportional_action_is_ambiguous() {
        let n = 3;
        let k = n - 1;
        let mut d = CMat::identity(k, k).map(|z| z * I * -0.5);
        d[(0, 0)] += I * 1e-8;
        let n2v = embed_stabilizer(&d).unwrap();
        let zero = SuMatrix::zero(n);
        let phi = PhiMap::from_values(
            n,
            2.0,
            zero.clone(),
            n2v,
            vec![zero.clone(); 2 * k],
            zero,
            crate::homdesc::Origin::Special(SpecialKind::K24),
        )
        .unwrap();
        let c = ConnectionData::new(phi).unwrap();
        assert!(matches!(algebraic_class(&c, &tol()), Err(Error::Ambiguous(_))));
    }
}
