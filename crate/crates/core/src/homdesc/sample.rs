//! Randomized admissible descriptions for property tests and sweeps.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::linalg::{c, columns, null_space, realify, CMat, RVec, RANK_TOL};
use crate::matlie::u_basis;

use super::{assemble_modules, construct_phi, enumerate_admissible, HolonomySpec, PhiMap, Variant};

/// Factor pool used by sampling and sweeps.
pub const FACTOR_POOL: [usize; 2] = [2, 3];

/// A uniformly chosen admissible spec over both variants.
pub fn random_spec<R: Rng + ?Sized>(n: usize, rng: &mut R) -> HolonomySpec {
    let mut all = enumerate_admissible(n, Variant::N2Kernel, &FACTOR_POOL);
    all.extend(enumerate_admissible(n, Variant::N2Image, &FACTOR_POOL));
    all.swap_remove(rng.random_range(0..all.len()))
}

/// Haar-distributed unitary via QR of a complex Gaussian matrix.
pub fn random_unitary<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(k, k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..k {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { c(1.0, 0.0) };
        for i in 0..k {
            q[(i, j)] *= phase;
        }
    }
    q
}

pub fn random_skew_hermitian<R: Rng + ?Sized>(k: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(k, k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    (&g - g.adjoint()) * c(0.5, 0.0)
}

pub fn random_cvec<R: Rng + ?Sized>(k: usize, rng: &mut R) -> crate::linalg::CVec {
    crate::linalg::CVec::from_fn(k, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// A random element of `u(n-1)` commuting with the holonomy action of `spec`.
pub fn random_commuting<R: Rng + ?Sized>(spec: &HolonomySpec, n: usize, rng: &mut R) -> Result<CMat> {
    let asm = assemble_modules(spec, n)?;
    let k = n - 1;
    let basis = u_basis(k);
    let cols: Vec<RVec> = basis
        .iter()
        .map(|b| {
            let mut parts = Vec::new();
            for g in &asm.generators {
                parts.extend(realify(&(b * &g.action - &g.action * b)).iter().copied());
            }
            RVec::from_vec(parts)
        })
        .collect();
    let ns = if asm.generators.is_empty() {
        crate::linalg::RMat::identity(basis.len(), basis.len())
    } else {
        null_space(&columns(&cols), RANK_TOL)
    };
    let mut out = CMat::zeros(k, k);
    for j in 0..ns.ncols() {
        let w: f64 = rng.sample(StandardNormal);
        for (i, b) in basis.iter().enumerate() {
            out += b * c(w * ns[(i, j)], 0.0);
        }
    }
    Ok(out)
}

/// Random admissible description: random spec, optional commuting shift,
/// random unitary change of coordinates and random scale `mu` in `[0.5, 3)`.
pub fn random_phi<R: Rng + ?Sized>(n: usize, rng: &mut R, with_shift: bool) -> Result<PhiMap> {
    let spec = random_spec(n, rng);
    let mu = rng.random_range(0.5..3.0);
    let phi = if with_shift {
        let d = random_commuting(&spec, n, rng)?;
        match construct_phi(&spec, n, Some(&d), mu) {
            Err(Error::InvalidShift(_)) => construct_phi(&spec, n, None, mu)?,
            other => other?,
        }
    } else {
        construct_phi(&spec, n, None, mu)?
    };
    phi.conjugate(&random_unitary(n - 1, rng))
}
