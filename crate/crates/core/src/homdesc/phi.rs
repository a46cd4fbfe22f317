use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    c, cnorm, columns, complexify, distance_to_span, null_space, orth_basis, rank, realify, realify_action,
    row_space, CMat, CVec, RMat, RVec, I, RANK_TOL,
};
use crate::matlie::{a0, bracket_unchecked, check_n, embed_stabilizer, embed_unchecked, n1_coordinate_basis, n2, SuMatrix};

use super::{assemble_modules, HolonomySpec, ModuleAssembly, Variant};

const COMMUTE_TOL: f64 = 1e-10;

/// Special linear-type families of the classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SpecialKind {
    K24,
    K234Lambda { lambda: f64 },
    K234Beta { beta: f64 },
}

/// Where a [`PhiMap`] came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Origin {
    Spec(HolonomySpec),
    Special(SpecialKind),
}

/// The equivariant map `phi: a + n -> h`, the shift `H_r` and the metric scale.
///
/// Values are stored on the domain basis `A0, N2, X(e_1..), X(i e_1..)`.
#[derive(Debug, Clone)]
pub struct PhiMap {
    n: usize,
    mu: f64,
    a0_value: SuMatrix,
    n2_value: SuMatrix,
    n1_values: Vec<SuMatrix>,
    hr: SuMatrix,
    pub origin: Origin,
    pub assembly: Option<ModuleAssembly>,
}

/// Numbers read back from the image algebra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub dim_k: usize,
    pub center_dim: usize,
    pub r: usize,
    pub s: usize,
    pub dim_ss: usize,
}

pub(crate) fn check_mu(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidScale { mu })
    }
}

impl PhiMap {
    /// Builds a map from raw values; no equivariance check is made.
    pub fn from_values(
        n: usize,
        mu: f64,
        a0_value: SuMatrix,
        n2_value: SuMatrix,
        n1_values: Vec<SuMatrix>,
        hr: SuMatrix,
        origin: Origin,
    ) -> Result<Self> {
        check_n(n)?;
        check_mu(mu)?;
        if n1_values.len() != 2 * (n - 1) {
            return Err(Error::DimensionMismatch { left: 2 * (n - 1), right: n1_values.len() });
        }
        for v in std::iter::once(&a0_value).chain([&n2_value, &hr]).chain(&n1_values) {
            if v.n() != n {
                return Err(Error::DimensionMismatch { left: n, right: v.n() });
            }
        }
        Ok(Self { n, mu, a0_value, n2_value, n1_values, hr, origin, assembly: None })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn with_mu(mut self, mu: f64) -> Result<Self> {
        check_mu(mu)?;
        self.mu = mu;
        Ok(self)
    }

    pub fn phi_a0(&self) -> &SuMatrix {
        &self.a0_value
    }

    pub fn phi_n2(&self) -> &SuMatrix {
        &self.n2_value
    }

    pub fn n1_values(&self) -> &[SuMatrix] {
        &self.n1_values
    }

    pub fn hr(&self) -> &SuMatrix {
        &self.hr
    }

    /// `H_{r0} = H_r + phi(A0)`.
    pub fn hr0(&self) -> SuMatrix {
        &self.hr + &self.a0_value
    }

    /// `phi(X(u))`.
    pub fn phi_n1(&self, u: &CVec) -> SuMatrix {
        let k = self.n - 1;
        let mut coeffs = vec![0.0; 2 * k];
        for j in 0..k {
            coeffs[j] = u[j].re;
            coeffs[k + j] = u[j].im;
        }
        SuMatrix::combination(self.n, &self.n1_values, &coeffs)
    }

    /// `phi(alpha A0 + eta N2 + X(u))`.
    pub fn eval(&self, alpha: f64, eta: f64, u: &CVec) -> SuMatrix {
        let mut out = self.phi_n1(u);
        out = &out + &self.a0_value.scale(alpha);
        &out + &self.n2_value.scale(eta)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.a0_value.is_zero(tol) && self.n2_value.is_zero(tol) && self.n1_values.iter().all(|v| v.is_zero(tol))
    }

    /// Orthonormal (realified Frobenius) basis of `phi(n) = span{phi(N2), phi(n1)}`.
    pub fn holonomy_basis(&self, tol: f64) -> Vec<SuMatrix> {
        let vecs: Vec<RVec> =
            std::iter::once(&self.n2_value).chain(&self.n1_values).map(|x| realify(x.matrix())).collect();
        span_basis(self.n, &vecs, tol)
    }

    /// Max over holonomy basis `H` and domain basis `X` of `||phi([H,X]) - [H,phi(X)]||`.
    pub fn equivariance_residual(&self, tol: f64) -> f64 {
        let hol = self.holonomy_basis(tol);
        let coords = n1_coordinate_basis(self.n);
        let mut worst = 0.0_f64;
        for h in &hol {
            worst = worst.max(bracket_unchecked(h, &self.a0_value).norm());
            worst = worst.max(bracket_unchecked(h, &self.n2_value).norm());
            // also [H, A0] = [H, N2] = 0 in g, which holds for stabilizer elements
            worst = worst.max(bracket_unchecked(h, &a0(self.n)).norm());
            worst = worst.max(bracket_unchecked(h, &n2(self.n)).norm());
            let d = h.stabilizer_action();
            for (u, val) in coords.iter().zip(&self.n1_values) {
                let lhs = self.phi_n1(&(&d * u));
                let rhs = bracket_unchecked(h, val);
                worst = worst.max((&lhs - &rhs).norm());
            }
        }
        worst
    }

    /// Max distance of pairwise brackets of the image to its span.
    pub fn closure_residual(&self, tol: f64) -> f64 {
        let hol = self.holonomy_basis(tol);
        let basis: Vec<RVec> = hol.iter().map(|h| realify(h.matrix())).collect();
        let mut worst = 0.0_f64;
        for (i, a) in hol.iter().enumerate() {
            for b in &hol[i + 1..] {
                let v = realify(bracket_unchecked(a, b).matrix());
                worst = worst.max(distance_to_span(&basis, &v));
            }
        }
        worst
    }

    /// Max of `||[H, phi(A0)]||`, `||[H, phi(N2)]||` over the image.
    pub fn center_residual(&self, tol: f64) -> f64 {
        self.holonomy_basis(tol)
            .iter()
            .map(|h| bracket_unchecked(h, &self.a0_value).norm().max(bracket_unchecked(h, &self.n2_value).norm()))
            .fold(0.0, f64::max)
    }

    /// Distance of `phi(A0)` to the image `phi(n)`.
    pub fn phi_a0_outside_hol(&self, tol: f64) -> f64 {
        let basis: Vec<RVec> = self.holonomy_basis(tol).iter().map(|h| realify(h.matrix())).collect();
        distance_to_span(&basis, &realify(self.a0_value.matrix()))
    }

    /// Distance of `H_r` to the image `phi(n)`; zero shift counts as valid.
    pub fn shift_valid(&self, tol: f64) -> bool {
        if self.hr.is_zero(tol) {
            return true;
        }
        let basis: Vec<RVec> = self.holonomy_basis(tol).iter().map(|h| realify(h.matrix())).collect();
        distance_to_span(&basis, &realify(self.hr.matrix())) > tol * self.hr.norm().max(1.0)
    }

    /// Reads `(r, s, dim k_ss)` back from the image algebra and the map.
    pub fn signature(&self, tol: f64) -> Signature {
        let hol = self.holonomy_basis(tol);
        let dk = hol.len();
        let rows = 2 * (self.n + 1) * (self.n + 1);

        let mut brackets = Vec::new();
        let mut center_sys = RMat::zeros(rows * dk.max(1), dk);
        for (i, a) in hol.iter().enumerate() {
            for (j, b) in hol.iter().enumerate() {
                let v = realify(bracket_unchecked(a, b).matrix());
                center_sys.view_mut((j * rows, i), (rows, 1)).copy_from(&v);
                if i < j {
                    brackets.push(v);
                }
            }
        }
        let dim_ss = if brackets.is_empty() { 0 } else { rank(&columns(&brackets), tol) };
        let center = if dk == 0 { RMat::zeros(0, 0) } else { null_space(&center_sys, tol) };
        let center_dim = center.ncols();
        let center_vecs: Vec<RVec> = (0..center_dim)
            .map(|c| {
                let mut v = RVec::zeros(rows);
                for (i, h) in hol.iter().enumerate() {
                    v.axpy(center[(i, c)], &realify(h.matrix()), 1.0);
                }
                v
            })
            .collect();
        let center_basis = orth_basis(&center_vecs, tol, None);

        // Preimage of the center inside ker(phi|n1)^perp, and its J-invariant part.
        let phi_cols: Vec<RVec> = self.n1_values.iter().map(|x| realify(x.matrix())).collect();
        let phi = columns(&phi_cols);
        let k2 = phi.ncols();
        let q = row_space(&phi, tol);
        let mut r = 0;
        if !q.is_empty() {
            let qm = columns(&q);
            let mut off_center = &phi * &qm;
            for b in &center_basis {
                let proj = b * (b.transpose() * &off_center);
                off_center -= proj;
            }
            let ns = null_space(&off_center, tol);
            if ns.ncols() > 0 {
                let p = &qm * ns;
                let jm = realify_action(&CMat::identity(k2 / 2, k2 / 2).map(|z| z * I));
                let jp = &jm * &p;
                let mut both = RMat::zeros(k2, 2 * p.ncols());
                both.view_mut((0, 0), (k2, p.ncols())).copy_from(&p);
                both.view_mut((0, p.ncols()), (k2, p.ncols())).copy_from(&jp);
                let inter = 2 * p.ncols() - rank(&both, tol);
                r = inter / 2;
            }
        }
        Signature { dim_k: dk, center_dim, r, s: center_dim.saturating_sub(2 * r), dim_ss }
    }

    /// Transports everything by `Ad(diag(U, 1, 1))` with `U` unitary on `C^{n-1}`.
    pub fn conjugate(&self, u: &CMat) -> Result<PhiMap> {
        let k = self.n - 1;
        if u.nrows() != k || u.ncols() != k {
            return Err(Error::DimensionMismatch { left: k, right: u.nrows() });
        }
        let mut g = CMat::identity(k + 2, k + 2);
        g.view_mut((0, 0), (k, k)).copy_from(u);
        let gi = g.adjoint();
        let ad = |x: &SuMatrix| SuMatrix::from_raw(self.n, &g * x.matrix() * &gi);
        let inv = realify_action(&u.adjoint());
        let moved: Vec<SuMatrix> = self.n1_values.iter().map(ad).collect();
        let n1_values = (0..2 * k)
            .map(|i| {
                let coeffs: Vec<f64> = (0..2 * k).map(|j| inv[(j, i)]).collect();
                SuMatrix::combination(self.n, &moved, &coeffs)
            })
            .collect();
        Ok(PhiMap {
            n: self.n,
            mu: self.mu,
            a0_value: ad(&self.a0_value),
            n2_value: ad(&self.n2_value),
            n1_values,
            hr: ad(&self.hr),
            origin: self.origin.clone(),
            assembly: self.assembly.as_ref().map(|a| a.conjugate(u)),
        })
    }
}

fn span_basis(n: usize, vecs: &[RVec], tol: f64) -> Vec<SuMatrix> {
    orth_basis(vecs, tol, None)
        .into_iter()
        .map(|v| SuMatrix::from_raw(n, complexify(&v, n + 1, n + 1)))
        .collect()
}

/// Builds `phi` for an admissible spec: `psi` on `V_k`, zero on the rest of
/// `n1` and on `a`; `phi(N2)` is the first `R` generator in the image variant.
///
/// A provided shift must commute with the holonomy algebra; its component
/// inside the algebra is projected away and a shift that vanishes after the
/// projection is rejected.
pub fn construct_phi(spec: &HolonomySpec, n: usize, hr: Option<&CMat>, mu: f64) -> Result<PhiMap> {
    check_mu(mu)?;
    let asm = assemble_modules(spec, n)?;
    let k = n - 1;
    let embedded: Vec<SuMatrix> = asm.generators.iter().map(|g| embed_unchecked(&g.action)).collect();

    let n1_values: Vec<SuMatrix> = (0..2 * k)
        .map(|i| {
            let coeffs: Vec<f64> = {
                let mut cf = vec![0.0; embedded.len()];
                for (dir, g) in &asm.psi {
                    cf[*g] += dir[i];
                }
                cf
            };
            SuMatrix::combination(n, &embedded, &coeffs)
        })
        .collect();
    let n2_value = match (spec.variant, asm.n2_generator) {
        (Variant::N2Image, Some(g)) => embedded[g].clone(),
        _ => SuMatrix::zero(n),
    };

    let hr_value = match hr {
        None => SuMatrix::zero(n),
        Some(d) => project_shift(d, &asm, &embedded)?,
    };

    let mut phi = PhiMap::from_values(n, mu, SuMatrix::zero(n), n2_value, n1_values, hr_value, Origin::Spec(spec.clone()))?;
    phi.assembly = Some(asm);
    Ok(phi)
}

fn project_shift(d: &CMat, asm: &ModuleAssembly, embedded: &[SuMatrix]) -> Result<SuMatrix> {
    let e = embed_stabilizer(d)?;
    let scale = cnorm(d).max(1.0);
    for g in &asm.generators {
        let res = cnorm(&(d * &g.action - &g.action * d));
        if res > COMMUTE_TOL * scale {
            return Err(Error::InvalidShift(format!(
                "H_r must commute with the holonomy algebra (commutator norm {res:.3e})"
            )));
        }
    }
    let basis = orth_basis(&embedded.iter().map(|x| realify(x.matrix())).collect::<Vec<_>>(), RANK_TOL, None);
    let mut v = realify(e.matrix());
    for b in &basis {
        let cf = b.dot(&v);
        v.axpy(-cf, b, 1.0);
    }
    if v.norm() <= COMMUTE_TOL * scale {
        return Err(Error::InvalidShift("H_r lies inside the holonomy algebra".into()));
    }
    let n = asm.n;
    Ok(SuMatrix::from_raw(n, complexify(&v, n + 1, n + 1)))
}

/// The linear-type families: `K24`, `K234` with one-dimensional holonomy
/// (parameter `lambda`), `K234` with trivial holonomy (parameter `beta`).
pub fn special_phi_linear(n: usize, kind: SpecialKind, mu: f64) -> Result<PhiMap> {
    check_n(n)?;
    let k = n - 1;
    let scalar = |z: num_complex::Complex64| embed_unchecked(&(CMat::identity(k, k) * z));
    let zeros = vec![SuMatrix::zero(n); 2 * k];
    let (a0v, n2v, hr) = match kind {
        SpecialKind::K24 => (SuMatrix::zero(n), scalar(c(0.0, -0.5)), SuMatrix::zero(n)),
        SpecialKind::K234Lambda { lambda } => {
            if !lambda.is_finite() {
                return Err(Error::InvalidSpecial(format!("lambda must be finite, got {lambda}")));
            }
            if lambda == 1.0 {
                return Err(Error::InvalidSpecial("K234 with one-dimensional holonomy needs λ ≠ 1 (λ = 1 is K24)".into()));
            }
            if lambda == 0.0 {
                return Err(Error::InvalidSpecial(
                    "λ = 0 would need a nonzero phi(N2) acting trivially on n1; not constructible".into(),
                ));
            }
            let v = scalar(c(0.0, -lambda / 2.0));
            (v.clone(), v, SuMatrix::zero(n))
        }
        SpecialKind::K234Beta { beta } => {
            if !beta.is_finite() {
                return Err(Error::InvalidSpecial(format!("beta must be finite, got {beta}")));
            }
            (SuMatrix::zero(n), SuMatrix::zero(n), scalar(c(0.0, beta)))
        }
    };
    PhiMap::from_values(n, mu, a0v, n2v, zeros, hr, Origin::Special(kind))
}
