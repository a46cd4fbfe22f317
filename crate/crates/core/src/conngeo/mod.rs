//! Kähler linear algebra on `m`, canonical connections of reductive
//! descriptions, their curvature and torsion, and the point-level checks.
//!
//! A tangent vector `(alpha, eta, v)` stands for `alpha Ã0 + eta Ñ2 + X̃(-2v)`:
//! `v` is the coordinate of the `m` display, in which the `n1` matrix element
//! carries `-2v`.

mod checks;
mod connection;
mod symmetric;

use std::ops::{Add, Mul, Neg, Sub};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{c, CVec, RMat, RVec, I};
use crate::matlie::{g0, omega0};

pub use checks::{
    ambrose_singer, holonomy_equals_phi_n, holonomy_span, module_action_checks, parallel_fields_check,
    AmbroseSinger, HolonomyComparison, ModuleActionReport, ParallelFields,
};
pub use connection::{ConnectionData, CurvatureOperator, OracleResiduals};
pub use symmetric::{symmetric_checks, symmetric_holomorphic_curvature, SymmetricReport};

#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub alpha: f64,
    pub eta: f64,
    pub v: CVec,
    pub mu: f64,
}

impl TangentVector {
    pub fn new(alpha: f64, eta: f64, v: CVec, mu: f64) -> Result<Self> {
        crate::homdesc::check_mu(mu)?;
        Ok(Self { alpha, eta, v, mu })
    }

    pub fn zero(n: usize, mu: f64) -> Self {
        Self { alpha: 0.0, eta: 0.0, v: CVec::zeros(n - 1), mu }
    }

    /// `Ã0` itself.
    pub fn a0(n: usize, mu: f64) -> Self {
        Self { alpha: 1.0, ..Self::zero(n, mu) }
    }

    /// `Ñ2` itself.
    pub fn n2(n: usize, mu: f64) -> Self {
        Self { eta: 1.0, ..Self::zero(n, mu) }
    }

    pub fn from_v(v: CVec, mu: f64) -> Self {
        Self { alpha: 0.0, eta: 0.0, v, mu }
    }

    pub fn n(&self) -> usize {
        self.v.len() + 1
    }

    /// The `n1` matrix coordinate `u = -2v` of `X̃_B`.
    pub fn u(&self) -> CVec {
        &self.v * c(-2.0, 0.0)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { alpha: s * self.alpha, eta: s * self.eta, v: &self.v * c(s, 0.0), mu: self.mu }
    }

    pub fn norm(&self) -> f64 {
        raw_metric(self, self).max(0.0).sqrt()
    }
}

impl Add for &TangentVector {
    type Output = TangentVector;
    fn add(self, o: &TangentVector) -> TangentVector {
        TangentVector { alpha: self.alpha + o.alpha, eta: self.eta + o.eta, v: &self.v + &o.v, mu: self.mu }
    }
}

impl Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, o: &TangentVector) -> TangentVector {
        TangentVector { alpha: self.alpha - o.alpha, eta: self.eta - o.eta, v: &self.v - &o.v, mu: self.mu }
    }
}

impl Neg for &TangentVector {
    type Output = TangentVector;
    fn neg(self) -> TangentVector {
        self.scale(-1.0)
    }
}

impl Mul<&TangentVector> for f64 {
    type Output = TangentVector;
    fn mul(self, t: &TangentVector) -> TangentVector {
        t.scale(self)
    }
}

fn compatible(b: &TangentVector, c: &TangentVector) -> Result<()> {
    if b.v.len() != c.v.len() {
        return Err(Error::DimensionMismatch { left: b.n(), right: c.n() });
    }
    if b.mu != c.mu {
        return Err(Error::InvalidScale { mu: c.mu });
    }
    Ok(())
}

pub(crate) fn raw_metric(b: &TangentVector, cc: &TangentVector) -> f64 {
    b.mu * (b.alpha * cc.alpha + b.eta * cc.eta / 4.0 + 2.0 * g0(&b.v, &cc.v))
}

/// `g(B, C) = mu (alpha_B alpha_C + eta_B eta_C / 4 + 2 Re(v_C* v_B))`.
pub fn metric(b: &TangentVector, cc: &TangentVector) -> Result<f64> {
    compatible(b, cc)?;
    Ok(raw_metric(b, cc))
}

/// `J(alpha, eta, v) = (eta / 2, -2 alpha, i v)`.
pub fn complex_j(b: &TangentVector) -> TangentVector {
    TangentVector { alpha: b.eta / 2.0, eta: -2.0 * b.alpha, v: &b.v * I, mu: b.mu }
}

/// `omega(B, C) = g(B, J C)`.
pub fn symplectic(b: &TangentVector, cc: &TangentVector) -> Result<f64> {
    compatible(b, cc)?;
    Ok(raw_metric(b, &complex_j(cc)))
}

/// Direct evaluation `mu (alpha_B eta_C / 2 - alpha_C eta_B / 2 + 2 omega0(v_B, v_C))`.
pub fn symplectic_display(b: &TangentVector, cc: &TangentVector) -> Result<f64> {
    compatible(b, cc)?;
    Ok(b.mu * (b.alpha * cc.eta / 2.0 - cc.alpha * b.eta / 2.0 + 2.0 * omega0(&b.v, &cc.v)))
}

/// The orthonormal frame `e_i = v-unit / sqrt(2mu)`, `e_n = Ã0 / sqrt(mu)`,
/// `e_{i+n} = J e_i`, `e_{2n} = -2 Ñ2 / sqrt(mu)` (0-based in code).
#[derive(Debug, Clone, Serialize)]
pub struct Frame {
    pub n: usize,
    pub mu: f64,
}

impl Frame {
    pub fn new(n: usize, mu: f64) -> Result<Self> {
        crate::matlie::check_n(n)?;
        crate::homdesc::check_mu(mu)?;
        Ok(Self { n, mu })
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn vector(&self, a: usize) -> TangentVector {
        let (n, mu) = (self.n, self.mu);
        let k = n - 1;
        let mut t = TangentVector::zero(n, mu);
        let s = 1.0 / (2.0 * mu).sqrt();
        if a < k {
            t.v[a] = c(s, 0.0);
        } else if a == k {
            t.alpha = 1.0 / mu.sqrt();
        } else if a < 2 * n - 1 {
            t.v[a - n] = c(0.0, s);
        } else {
            t.eta = -2.0 / mu.sqrt();
        }
        t
    }

    pub fn vectors(&self) -> Vec<TangentVector> {
        (0..self.dim()).map(|a| self.vector(a)).collect()
    }

    /// Frame coordinates `x_a = g(B, e_a)`.
    pub fn coords(&self, b: &TangentVector) -> RVec {
        let (n, mu) = (self.n, self.mu);
        let k = n - 1;
        let r2 = (2.0 * mu).sqrt();
        let mut x = RVec::zeros(2 * n);
        for j in 0..k {
            x[j] = r2 * b.v[j].re;
            x[n + j] = r2 * b.v[j].im;
        }
        x[k] = mu.sqrt() * b.alpha;
        x[2 * n - 1] = -b.eta * mu.sqrt() / 2.0;
        x
    }

    pub fn from_coords(&self, x: &RVec) -> TangentVector {
        let (n, mu) = (self.n, self.mu);
        let k = n - 1;
        let r2 = (2.0 * mu).sqrt();
        let v = CVec::from_fn(k, |j, _| c(x[j] / r2, x[n + j] / r2));
        TangentVector { alpha: x[k] / mu.sqrt(), eta: -2.0 * x[2 * n - 1] / mu.sqrt(), v, mu }
    }

    /// Matrix of `J` in the frame: column `b` holds the coordinates of `J e_b`.
    pub fn j_matrix(&self) -> RMat {
        let n = self.n;
        let mut j = RMat::zeros(2 * n, 2 * n);
        for a in 0..n {
            j[(n + a, a)] = 1.0;
            j[(a, n + a)] = -1.0;
        }
        j
    }

    /// Frame coordinates of `alpha`: the index of `Ã0 / sqrt(mu)`.
    pub fn a0_index(&self) -> usize {
        self.n - 1
    }

    pub fn n2_index(&self) -> usize {
        2 * self.n - 1
    }
}
