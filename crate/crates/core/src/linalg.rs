//! Dense real/complex helpers: realification, rank, spans, null spaces and
//! least squares. Everything is SVD based with a relative cutoff.

use nalgebra::{DMatrix, DVector};

use num_complex::Complex64;

pub type CMat = DMatrix<Complex64>;
pub type CVec = DVector<Complex64>;
pub type RMat = DMatrix<f64>;
pub type RVec = DVector<f64>;

/// Singular values below `RANK_TOL * sigma_max` count as zero.
pub const RANK_TOL: f64 = 1e-8;

pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

pub(crate) fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Frobenius norm of a complex matrix.
pub fn cnorm(m: &CMat) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Stack real and imaginary parts of every entry (column-major) into a real vector.
pub fn realify(m: &CMat) -> RVec {
    let k = m.len();
    let mut out = RVec::zeros(2 * k);
    for (i, z) in m.iter().enumerate() {
        out[i] = z.re;
        out[k + i] = z.im;
    }
    out
}

/// Inverse of [`realify`] for an `rows x cols` matrix.
pub fn complexify(v: &RVec, rows: usize, cols: usize) -> CMat {
    let k = rows * cols;
    debug_assert_eq!(v.len(), 2 * k);
    CMat::from_iterator(rows, cols, (0..k).map(|i| c(v[i], v[k + i])))
}

/// Real 2k x 2k matrix of the complex-linear map `z -> D z` in the
/// coordinates `(Re z, Im z)`.
pub fn realify_action(d: &CMat) -> RMat {
    let k = d.nrows();
    let mut out = RMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        for j in 0..k {
            let z = d[(i, j)];
            out[(i, j)] = z.re;
            out[(i, k + j)] = -z.im;
            out[(k + i, j)] = z.im;
            out[(k + i, k + j)] = z.re;
        }
    }
    out
}

/// SVD through faer: singular values (non-increasing), `U` and `V`.
/// `full` selects square `U`, `V`; otherwise thin factors.
pub fn svd(a: &RMat, full: bool) -> (Vec<f64>, RMat, RMat) {
    let (r, c) = a.shape();
    if r == 0 || c == 0 {
        return (Vec::new(), RMat::identity(r, r), RMat::identity(c, c));
    }
    let fa = faer::Mat::<f64>::from_fn(r, c, |i, j| a[(i, j)]);
    let dec = if full { fa.svd() } else { fa.thin_svd() }.expect("svd converges");
    let s = dec.S().column_vector();
    let sv: Vec<f64> = (0..s.nrows()).map(|i| s[i]).collect();
    let (u, v) = (dec.U(), dec.V());
    let um = RMat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)]);
    let vm = RMat::from_fn(v.nrows(), v.ncols(), |i, j| v[(i, j)]);
    (sv, um, vm)
}

/// Singular values in decreasing order.
pub fn singular_values(a: &RMat) -> Vec<f64> {
    if a.is_empty() {
        return Vec::new();
    }
    let fa = faer::Mat::<f64>::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)]);
    let mut s = fa.singular_values().expect("svd converges");
    s.sort_by(|x, y| y.total_cmp(x));
    s
}

/// Numerical rank with the relative cutoff `tol`.
pub fn rank(a: &RMat, tol: f64) -> usize {
    let s = singular_values(a);
    match s.first() {
        None => 0,
        Some(&max) if max <= f64::MIN_POSITIVE => 0,
        Some(&max) => s.iter().filter(|&&x| x > tol * max).count(),
    }
}

/// Matrix whose columns are the given vectors.
pub fn columns(vectors: &[RVec]) -> RMat {
    let rows = vectors.first().map_or(0, |v| v.len());
    RMat::from_fn(rows, vectors.len(), |i, j| vectors[j][i])
}

/// Orthonormal basis of the span of `vectors`.
///
/// The cutoff is relative to `scale` when given, otherwise to the largest
/// singular value. An absolute floor of `tol` guards the all-zero case.
pub fn orth_basis(vectors: &[RVec], tol: f64, scale: Option<f64>) -> Vec<RVec> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (s, u, _) = svd(&columns(vectors), false);
    let smax = s.first().copied().unwrap_or(0.0);
    let cut = tol * scale.unwrap_or(smax).max(1.0);
    s.iter().enumerate().filter(|(_, &x)| x > cut).map(|(i, _)| u.column(i).into_owned()).collect()
}

/// Orthonormal basis of the row space of `a` (right singular vectors above the cutoff).
pub fn row_space(a: &RMat, tol: f64) -> Vec<RVec> {
    let (s, _, v) = svd(a, false);
    let smax = s.first().copied().unwrap_or(0.0);
    let cut = tol * smax.max(1.0);
    s.iter().enumerate().filter(|(_, &x)| x > cut).map(|(i, _)| v.column(i).into_owned()).collect()
}

/// Orthonormal basis (as columns) of the null space of `a`.
pub fn null_space(a: &RMat, tol: f64) -> RMat {
    let cols = a.ncols();
    if a.nrows() == 0 {
        return RMat::identity(cols, cols);
    }
    let (s, _, v) = svd(a, true);
    let smax = s.first().copied().unwrap_or(0.0);
    let cut = tol * smax.max(1.0);
    let kept = s.iter().filter(|&&x| x > cut).count();
    v.columns(kept, cols - kept).into_owned()
}

/// Least-squares solution of `a x = b` and its residual norm.
pub fn lstsq(a: &RMat, b: &RVec) -> (RVec, f64) {
    let (s, u, v) = svd(a, false);
    let smax = s.first().copied().unwrap_or(0.0);
    let cut = 1e-13 * smax.max(f64::MIN_POSITIVE);
    let mut x = RVec::zeros(a.ncols());
    for (i, &si) in s.iter().enumerate() {
        if si > cut {
            let coef = u.column(i).dot(b) / si;
            x.axpy(coef, &v.column(i).into_owned(), 1.0);
        }
    }
    let r = (a * &x - b).norm();
    (x, r)
}

/// Distance from `v` to the span of the orthonormal vectors in `basis`.
pub fn distance_to_span(basis: &[RVec], v: &RVec) -> f64 {
    let mut r = v.clone();
    for b in basis {
        let c = b.dot(&r);
        r.axpy(-c, b, 1.0);
    }
    r.norm()
}

/// 2-norm condition number of a square matrix.
pub fn condition_number(a: &RMat) -> f64 {
    let s = singular_values(a);
    match (s.first(), s.last()) {
        (Some(&hi), Some(&lo)) if lo > 0.0 => hi / lo,
        _ => f64::INFINITY,
    }
}

/// Residual `||D + D*||` measuring how far `d` is from skew-hermitian.
pub fn skew_hermitian_residual(d: &CMat) -> f64 {
    cnorm(&(d + d.adjoint()))
}

pub fn commutator(a: &CMat, b: &CMat) -> CMat {
    a * b - b * a
}
