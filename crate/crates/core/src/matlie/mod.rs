//! The matrix Lie algebra su(n,1) in the second hermitian form
//! `F = diag(Id_{n-1}, [[0,1],[1,0]])`, together with its Iwasawa pieces
//! `a + n1 + n2`, the stabilizer `s(u(n-1)+u(1))` and the Cartan pair `k + m`.
//!
//! Index layout of an `(n+1) x (n+1)` matrix: rows/columns `0..n-1` carry the
//! `C^{n-1}` block, `n-1` is the first special index and `n` the second.

pub mod exact;

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{c, cnorm, skew_hermitian_residual, CMat, CVec, I};

/// Membership tolerance used by the checked constructor.
const MEMBERSHIP_TOL: f64 = 1e-10;

/// An element of su(n,1) in the second hermitian form.
#[derive(Debug, Clone, PartialEq)]
pub struct SuMatrix {
    n: usize,
    m: CMat,
}

impl SuMatrix {
    /// Checked constructor: shape `(n+1) x (n+1)`, `X*F + FX = 0`, `tr X = 0`.
    pub fn new(n: usize, m: CMat) -> Result<Self> {
        check_n(n)?;
        if m.nrows() != n + 1 || m.ncols() != n + 1 {
            return Err(Error::DimensionMismatch { left: n + 1, right: m.nrows() });
        }
        let x = Self { n, m };
        let scale = x.norm().max(1.0);
        if x.membership_residual() > MEMBERSHIP_TOL * scale {
            return Err(Error::NotSkewHermitian { residual: x.membership_residual() });
        }
        Ok(x)
    }

    pub(crate) fn from_raw(n: usize, m: CMat) -> Self {
        debug_assert_eq!(m.nrows(), n + 1);
        Self { n, m }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, m: CMat::zeros(n + 1, n + 1) }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &CMat {
        &self.m
    }

    pub fn into_matrix(self) -> CMat {
        self.m
    }

    /// `||X*F + FX|| + |tr X|`; zero exactly for elements of su(n,1).
    pub fn membership_residual(&self) -> f64 {
        let f = hermitian_form(self.n);
        cnorm(&(self.m.adjoint() * &f + &f * &self.m)) + self.m.trace().norm()
    }

    pub fn norm(&self) -> f64 {
        cnorm(&self.m)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.norm() <= tol
    }

    /// Action `D` on `C^{n-1}` of an element of the stabilizer
    /// `s(u(n-1)+u(1))` written as `diag(D + t Id, t, t)`.
    ///
    /// Only meaningful for stabilizer elements; other blocks are ignored.
    pub fn stabilizer_action(&self) -> CMat {
        let k = self.n - 1;
        let t = self.m[(self.n, self.n)];
        let mut d = self.m.view((0, 0), (k, k)).into_owned();
        for i in 0..k {
            d[(i, i)] -= t;
        }
        d
    }

    /// The `C^{n-1}` vector `u` of the `n1` component `X(u)`.
    pub fn n1_component(&self) -> CVec {
        self.m.view((0, self.n), (self.n - 1, 1)).column(0).into_owned()
    }

    /// Coefficient of `A0` (real part of the first special diagonal entry).
    pub fn a0_component(&self) -> f64 {
        self.m[(self.n - 1, self.n - 1)].re
    }

    /// Coefficient of `N2` (imaginary part of the corner entry).
    pub fn n2_component(&self) -> f64 {
        self.m[(self.n - 1, self.n)].im
    }

    pub fn scale(&self, f: f64) -> Self {
        Self { n: self.n, m: &self.m * c(f, 0.0) }
    }

    /// Real-linear combination `sum coeffs[i] * elems[i]`.
    pub fn combination(n: usize, elems: &[SuMatrix], coeffs: &[f64]) -> Self {
        let mut m = CMat::zeros(n + 1, n + 1);
        for (e, &k) in elems.iter().zip(coeffs) {
            if k != 0.0 {
                m += &e.m * c(k, 0.0);
            }
        }
        Self { n, m }
    }
}

impl Add for &SuMatrix {
    type Output = SuMatrix;
    fn add(self, rhs: &SuMatrix) -> SuMatrix {
        debug_assert_eq!(self.n, rhs.n);
        SuMatrix { n: self.n, m: &self.m + &rhs.m }
    }
}

impl Add for SuMatrix {
    type Output = SuMatrix;
    fn add(self, rhs: SuMatrix) -> SuMatrix {
        &self + &rhs
    }
}

impl Sub for &SuMatrix {
    type Output = SuMatrix;
    fn sub(self, rhs: &SuMatrix) -> SuMatrix {
        debug_assert_eq!(self.n, rhs.n);
        SuMatrix { n: self.n, m: &self.m - &rhs.m }
    }
}

impl Sub for SuMatrix {
    type Output = SuMatrix;
    fn sub(self, rhs: SuMatrix) -> SuMatrix {
        &self - &rhs
    }
}

impl Neg for &SuMatrix {
    type Output = SuMatrix;
    fn neg(self) -> SuMatrix {
        SuMatrix { n: self.n, m: -&self.m }
    }
}

impl Mul<&SuMatrix> for f64 {
    type Output = SuMatrix;
    fn mul(self, rhs: &SuMatrix) -> SuMatrix {
        rhs.scale(self)
    }
}

pub(crate) fn check_n(n: usize) -> Result<()> {
    if n < 2 {
        Err(Error::InvalidDimension { n })
    } else {
        Ok(())
    }
}

/// The second hermitian form `diag(Id_{n-1}, [[0,1],[1,0]])`.
pub fn hermitian_form(n: usize) -> CMat {
    let mut f = CMat::zeros(n + 1, n + 1);
    for i in 0..n - 1 {
        f[(i, i)] = c(1.0, 0.0);
    }
    f[(n - 1, n)] = c(1.0, 0.0);
    f[(n, n - 1)] = c(1.0, 0.0);
    f
}

/// `XY - YX`.
pub fn bracket(x: &SuMatrix, y: &SuMatrix) -> Result<SuMatrix> {
    if x.n != y.n {
        return Err(Error::DimensionMismatch { left: x.n, right: y.n });
    }
    Ok(bracket_unchecked(x, y))
}

pub(crate) fn bracket_unchecked(x: &SuMatrix, y: &SuMatrix) -> SuMatrix {
    SuMatrix { n: x.n, m: &x.m * &y.m - &y.m * &x.m }
}

/// Canonical Kähler form on `C^k`: `omega0(v, w) = Im(w* v)`.
pub fn omega0(v: &CVec, w: &CVec) -> f64 {
    w.dotc(v).im
}

/// Canonical metric on `C^k`: `g0(v, w) = Re(w* v)`.
pub fn g0(v: &CVec, w: &CVec) -> f64 {
    w.dotc(v).re
}

/// `A0 = diag(0, ..., 0, 1, -1)`.
pub fn a0(n: usize) -> SuMatrix {
    let mut m = CMat::zeros(n + 1, n + 1);
    m[(n - 1, n - 1)] = c(1.0, 0.0);
    m[(n, n)] = c(-1.0, 0.0);
    SuMatrix { n, m }
}

/// `N2`: the single entry `i` in the corner between the two special indices.
pub fn n2(n: usize) -> SuMatrix {
    let mut m = CMat::zeros(n + 1, n + 1);
    m[(n - 1, n)] = I;
    SuMatrix { n, m }
}

/// `X(u)` in `n1`: `u` in the last column, `-u*` in the first special row.
pub fn n1_element(u: &CVec) -> SuMatrix {
    let n = u.len() + 1;
    let mut m = CMat::zeros(n + 1, n + 1);
    for j in 0..n - 1 {
        m[(j, n)] = u[j];
        m[(n - 1, j)] = -u[j].conj();
    }
    SuMatrix { n, m }
}

/// Standard real basis `e_1, i e_1, ..., e_{n-1}, i e_{n-1}` of `C^{n-1}`,
/// ordered as all real directions first, then all imaginary ones.
pub fn n1_coordinate_basis(n: usize) -> Vec<CVec> {
    let k = n - 1;
    let mut out = Vec::with_capacity(2 * k);
    for scale in [c(1.0, 0.0), I] {
        for j in 0..k {
            let mut v = CVec::zeros(k);
            v[j] = scale;
            out.push(v);
        }
    }
    out
}

/// Embeds a skew-hermitian `D` acting on `C^{n-1}` into `s(u(n-1)+u(1))` as
/// `diag(D + t Id, t, t)` with `t = -tr D / (n+1)`, so that
/// `[embed(D), X(v)] = X(D v)`.
pub fn embed_stabilizer(d: &CMat) -> Result<SuMatrix> {
    let k = d.nrows();
    if d.ncols() != k {
        return Err(Error::DimensionMismatch { left: k, right: d.ncols() });
    }
    let n = k + 1;
    check_n(n)?;
    let res = skew_hermitian_residual(d);
    if res > MEMBERSHIP_TOL * cnorm(d).max(1.0) {
        return Err(Error::NotSkewHermitian { residual: res });
    }
    Ok(embed_unchecked(d))
}

pub(crate) fn embed_unchecked(d: &CMat) -> SuMatrix {
    let k = d.nrows();
    let n = k + 1;
    let t = -d.trace() / c((n + 1) as f64, 0.0);
    let mut m = CMat::zeros(n + 1, n + 1);
    for i in 0..k {
        for j in 0..k {
            m[(i, j)] = d[(i, j)];
        }
        m[(i, i)] += t;
    }
    m[(n - 1, n - 1)] = t;
    m[(n, n)] = t;
    SuMatrix { n, m }
}

/// Real basis of `u(k)`: `i E_jj`, `E_jl - E_lj`, `i (E_jl + E_lj)` for `j < l`.
pub fn u_basis(k: usize) -> Vec<CMat> {
    let mut out = Vec::with_capacity(k * k);
    for j in 0..k {
        let mut e = CMat::zeros(k, k);
        e[(j, j)] = I;
        out.push(e);
    }
    for j in 0..k {
        for l in j + 1..k {
            let mut e = CMat::zeros(k, k);
            e[(j, l)] = c(1.0, 0.0);
            e[(l, j)] = c(-1.0, 0.0);
            out.push(e);
            let mut e = CMat::zeros(k, k);
            e[(j, l)] = I;
            e[(l, j)] = I;
            out.push(e);
        }
    }
    out
}

/// Real basis of su(n,1) read off the block form
/// `[[B, v1, v2], [-v2*, z, ib], [-v1*, ia, -conj z]]` with
/// `z - conj z + tr B = 0`. Length `(n+1)^2 - 1`.
pub fn su_basis(n: usize) -> Result<Vec<SuMatrix>> {
    check_n(n)?;
    let k = n - 1;
    let (p, q) = (n - 1, n);
    let mut out = Vec::with_capacity((n + 1) * (n + 1) - 1);
    // B in u(n-1), compensated by the imaginary part of z.
    for b in u_basis(k) {
        let z = -b.trace() / c(2.0, 0.0);
        let mut m = CMat::zeros(n + 1, n + 1);
        m.view_mut((0, 0), (k, k)).copy_from(&b);
        m[(p, p)] = z;
        m[(q, q)] = -z.conj();
        out.push(SuMatrix { n, m });
    }
    out.push(a0(n));
    for scale in [c(1.0, 0.0), I] {
        for j in 0..k {
            let mut m = CMat::zeros(n + 1, n + 1);
            m[(j, p)] = scale;
            m[(q, j)] = -scale.conj();
            out.push(SuMatrix { n, m });
            let mut m = CMat::zeros(n + 1, n + 1);
            m[(j, q)] = scale;
            m[(p, j)] = -scale.conj();
            out.push(SuMatrix { n, m });
        }
    }
    out.push(n2(n));
    let mut m = CMat::zeros(n + 1, n + 1);
    m[(q, p)] = I;
    out.push(SuMatrix { n, m });
    Ok(out)
}

/// Iwasawa data `a + n1 + n2` and the stabilizer of `A0` inside `k`.
#[derive(Debug, Clone)]
pub struct IwasawaBasis {
    pub n: usize,
    pub a0: SuMatrix,
    pub n2: SuMatrix,
    /// `X(e_j)` for all `j`, then `X(i e_j)`.
    pub n1_basis: Vec<SuMatrix>,
    /// `embed_stabilizer` of the `u(n-1)` basis; spans `s(u(n-1)+u(1))`.
    pub stab_basis: Vec<SuMatrix>,
}

impl IwasawaBasis {
    pub fn dim_a(&self) -> usize {
        1
    }

    pub fn dim_n(&self) -> usize {
        self.n1_basis.len() + 1
    }
}

pub fn iwasawa(n: usize) -> Result<IwasawaBasis> {
    check_n(n)?;
    Ok(IwasawaBasis {
        n,
        a0: a0(n),
        n2: n2(n),
        n1_basis: n1_coordinate_basis(n).iter().map(n1_element).collect(),
        stab_basis: u_basis(n - 1).iter().map(embed_unchecked).collect(),
    })
}

/// Max residual of one relation of the bracket table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub residual: f64,
}

/// Checks the eight bracket relations of the Iwasawa pieces on full bases.
/// Relation `[n1, n1] = n2` is checked in its sharp form `2 omega0(v,w) N2`.
pub fn bracket_table(n: usize) -> Result<Vec<RelationCheck>> {
    let iw = iwasawa(n)?;
    let coords = n1_coordinate_basis(n);
    let stab_d = u_basis(n - 1);
    let zero = SuMatrix::zero(n);
    let maxr = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0_f64, f64::max);
    let res = |a: &SuMatrix, b: &SuMatrix, want: &SuMatrix| (&bracket_unchecked(a, b) - want).norm();

    let mut out = Vec::new();
    out.push(RelationCheck {
        relation: "[A0, X] = X",
        residual: maxr(&mut iw.n1_basis.iter().map(|x| res(&iw.a0, x, x))),
    });
    out.push(RelationCheck {
        relation: "[A0, N2] = 2 N2",
        residual: res(&iw.a0, &iw.n2, &iw.n2.scale(2.0)),
    });
    out.push(RelationCheck {
        relation: "[A0, s(u(n-1)+u(1))] = 0",
        residual: maxr(&mut iw.stab_basis.iter().map(|s| res(&iw.a0, s, &zero))),
    });
    out.push(RelationCheck {
        relation: "[s(u(n-1)+u(1)), X(v)] = X(Dv)",
        residual: maxr(&mut iw.stab_basis.iter().zip(&stab_d).flat_map(|(s, d)| {
            coords.iter().map(move |v| res(s, &n1_element(v), &n1_element(&(d * v))))
        })),
    });
    out.push(RelationCheck {
        relation: "[N2, s(u(n-1)+u(1))] = 0",
        residual: maxr(&mut iw.stab_basis.iter().map(|s| res(&iw.n2, s, &zero))),
    });
    out.push(RelationCheck {
        relation: "[n1, N2] = 0",
        residual: maxr(&mut iw.n1_basis.iter().map(|x| res(x, &iw.n2, &zero))),
    });
    out.push(RelationCheck {
        relation: "[N2, N2] = 0",
        residual: res(&iw.n2, &iw.n2, &zero),
    });
    out.push(RelationCheck {
        relation: "[X(v), X(w)] = 2 omega0(v,w) N2",
        residual: maxr(&mut coords.iter().flat_map(|v| {
            coords.iter().map(|w| {
                let want = iw.n2.scale(2.0 * omega0(v, w));
                res(&n1_element(v), &n1_element(w), &want)
            })
        })),
    });
    Ok(out)
}

/// Cartan involution `theta(A) = F A F`.
pub fn cartan_involution(x: &SuMatrix) -> SuMatrix {
    let f = hermitian_form(x.n);
    SuMatrix { n: x.n, m: &f * &x.m * &f }
}

/// Element of the `(-1)`-eigenspace `m` of the Cartan involution:
/// `[[0, v, -v], [v*, a, ib], [-v*, -ib, -a]]`.
pub fn symmetric_m_element(a: f64, b: f64, v: &CVec) -> SuMatrix {
    let n = v.len() + 1;
    let (p, q) = (n - 1, n);
    let mut m = CMat::zeros(n + 1, n + 1);
    for j in 0..n - 1 {
        m[(j, p)] = v[j];
        m[(j, q)] = -v[j];
        m[(p, j)] = v[j].conj();
        m[(q, j)] = -v[j].conj();
    }
    m[(p, p)] = c(a, 0.0);
    m[(p, q)] = c(0.0, b);
    m[(q, p)] = c(0.0, -b);
    m[(q, q)] = c(-a, 0.0);
    SuMatrix { n, m }
}

/// Matrix display of a reductive-complement element of a non-symmetric
/// description with zero stabilizer block:
/// `[[0, 0, -2v], [2v*, a + ic, 2ib], [0, 0, -a + ic]]`.
///
/// `c` is an unconstrained diagonal shift; it only moves the vector along the
/// fibre direction and drops out of the tangent identification.
pub fn reductive_m_display(a: f64, b: f64, v: &CVec, c_shift: f64) -> CMat {
    let n = v.len() + 1;
    let (p, q) = (n - 1, n);
    let mut m = CMat::zeros(n + 1, n + 1);
    for j in 0..n - 1 {
        m[(j, q)] = -v[j] * 2.0;
        m[(p, j)] = v[j].conj() * 2.0;
    }
    m[(p, p)] = c(a, c_shift);
    m[(p, q)] = c(0.0, 2.0 * b);
    m[(q, q)] = c(-a, c_shift);
    m
}

/// The hermitian product `h(X, Y)` of the second form on `C^{n+1}`.
pub fn hermitian_product(x: &CVec, y: &CVec) -> Complex64 {
    let n = x.len() - 1;
    let mut s = Complex64::new(0.0, 0.0);
    for j in 0..n - 1 {
        s += y[j].conj() * x[j];
    }
    s + y[n].conj() * x[n - 1] + y[n - 1].conj() * x[n]
}

/// Base point `z = (0, ..., 0, sqrt(mu/2), -sqrt(mu/2))` on the level set `h(z,z) = -mu`.
pub fn base_point(n: usize, mu: f64) -> CVec {
    let mut z = CVec::zeros(n + 1);
    let s = (mu / 2.0).sqrt();
    z[n - 1] = c(s, 0.0);
    z[n] = c(-s, 0.0);
    z
}

/// Tangent identification `X -> X z - (h(X z, z) / h(z, z)) z` into the
/// horizontal space at the base point.
pub fn tangent_image(x: &CMat, mu: f64) -> CVec {
    let n = x.nrows() - 1;
    let z = base_point(n, mu);
    let xz = x * &z;
    let coef = hermitian_product(&xz, &z) / hermitian_product(&z, &z);
    &xz - &z * coef
}

/// Bases of the `(+1)` and `(-1)` eigenspaces of the Cartan involution.
#[derive(Debug, Clone)]
pub struct CartanPair {
    pub n: usize,
    /// Basis of `k = s(u(n)+u(1))`; dimension `n^2`.
    pub k_basis: Vec<SuMatrix>,
    /// Basis of `m`: `v = e_j`, `v = i e_j`, then `a = 1`, then `b = 1`; dimension `2n`.
    pub m_basis: Vec<SuMatrix>,
}

pub fn cartan_pair(n: usize) -> Result<CartanPair> {
    check_n(n)?;
    let k = n - 1;
    let (p, q) = (n - 1, n);
    let zero = CVec::zeros(k);
    let mut m_basis: Vec<SuMatrix> = n1_coordinate_basis(n)
        .iter()
        .map(|v| symmetric_m_element(0.0, 0.0, v))
        .collect();
    m_basis.push(symmetric_m_element(1.0, 0.0, &zero));
    m_basis.push(symmetric_m_element(0.0, 1.0, &zero));

    // k = [[B, v, v], [-v*, i(a+b), i(a-b)], [-v*, i(a-b), i(a+b)]].
    let mut k_basis: Vec<SuMatrix> = u_basis(k).iter().map(embed_unchecked).collect();
    for v in n1_coordinate_basis(n) {
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for j in 0..k {
            m[(j, p)] = v[j];
            m[(j, q)] = v[j];
            m[(p, j)] = -v[j].conj();
            m[(q, j)] = -v[j].conj();
        }
        k_basis.push(SuMatrix { n, m });
    }
    let mut m = CMat::zeros(n + 1, n + 1);
    m[(p, q)] = I;
    m[(q, p)] = I;
    k_basis.push(SuMatrix { n, m });
    Ok(CartanPair { n, k_basis, m_basis })
}
