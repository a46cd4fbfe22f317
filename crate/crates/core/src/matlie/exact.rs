//! Exact Gaussian-rational arithmetic for the bracket table and the
//! membership identity. Small dense matrices only.

use num_complex::Complex;
use num_rational::Rational64;
use num_traits::{One, Zero};

use crate::error::Result;

use super::check_n;

pub type Q = Complex<Rational64>;

fn q(re: i64, im: i64) -> Q {
    Complex::new(Rational64::from_integer(re), Rational64::from_integer(im))
}

/// Dense square matrix over `Q(i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QMat {
    dim: usize,
    data: Vec<Q>,
}

impl QMat {
    pub fn zeros(dim: usize) -> Self {
        Self { dim, data: vec![Q::zero(); dim * dim] }
    }

    pub fn get(&self, i: usize, j: usize) -> Q {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Q) {
        self.data[i * self.dim + j] = v;
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|z| z.is_zero())
    }

    pub fn mul(&self, o: &QMat) -> QMat {
        let d = self.dim;
        let mut out = QMat::zeros(d);
        for i in 0..d {
            for k in 0..d {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..d {
                    let idx = i * d + j;
                    out.data[idx] += a * o.get(k, j);
                }
            }
        }
        out
    }

    pub fn add(&self, o: &QMat) -> QMat {
        QMat { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a + b).collect() }
    }

    pub fn sub(&self, o: &QMat) -> QMat {
        QMat { dim: self.dim, data: self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect() }
    }

    pub fn scale(&self, s: Q) -> QMat {
        QMat { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn adjoint(&self) -> QMat {
        let d = self.dim;
        let mut out = QMat::zeros(d);
        for i in 0..d {
            for j in 0..d {
                out.set(j, i, self.get(i, j).conj());
            }
        }
        out
    }

    pub fn trace(&self) -> Q {
        (0..self.dim).map(|i| self.get(i, i)).fold(Q::zero(), |a, b| a + b)
    }

    pub fn bracket(&self, o: &QMat) -> QMat {
        self.mul(o).sub(&o.mul(self))
    }
}

fn form(n: usize) -> QMat {
    let mut f = QMat::zeros(n + 1);
    for i in 0..n - 1 {
        f.set(i, i, Q::one());
    }
    f.set(n - 1, n, Q::one());
    f.set(n, n - 1, Q::one());
    f
}

fn a0(n: usize) -> QMat {
    let mut m = QMat::zeros(n + 1);
    m.set(n - 1, n - 1, q(1, 0));
    m.set(n, n, q(-1, 0));
    m
}

fn n2(n: usize) -> QMat {
    let mut m = QMat::zeros(n + 1);
    m.set(n - 1, n, q(0, 1));
    m
}

fn n1(n: usize, u: &[Q]) -> QMat {
    let mut m = QMat::zeros(n + 1);
    for (j, &z) in u.iter().enumerate() {
        m.set(j, n, z);
        m.set(n - 1, j, -z.conj());
    }
    m
}

fn embed(n: usize, d: &QMat) -> QMat {
    let t = -d.trace() / Q::from(Rational64::from_integer(n as i64 + 1));
    let mut m = QMat::zeros(n + 1);
    for i in 0..n - 1 {
        for j in 0..n - 1 {
            m.set(i, j, d.get(i, j));
        }
        m.set(i, i, d.get(i, i) + t);
    }
    m.set(n - 1, n - 1, t);
    m.set(n, n, t);
    m
}

fn u_basis(k: usize) -> Vec<QMat> {
    let mut out = Vec::new();
    for j in 0..k {
        let mut e = QMat::zeros(k);
        e.set(j, j, q(0, 1));
        out.push(e);
    }
    for j in 0..k {
        for l in j + 1..k {
            let mut e = QMat::zeros(k);
            e.set(j, l, q(1, 0));
            e.set(l, j, q(-1, 0));
            out.push(e);
            let mut e = QMat::zeros(k);
            e.set(j, l, q(0, 1));
            e.set(l, j, q(0, 1));
            out.push(e);
        }
    }
    out
}

fn coord_vectors(k: usize) -> Vec<Vec<Q>> {
    let mut out = Vec::new();
    for unit in [q(1, 0), q(0, 1)] {
        for j in 0..k {
            let mut v = vec![Q::zero(); k];
            v[j] = unit;
            out.push(v);
        }
    }
    out
}

fn apply(d: &QMat, v: &[Q]) -> Vec<Q> {
    (0..d.dim)
        .map(|i| (0..d.dim).map(|j| d.get(i, j) * v[j]).fold(Q::zero(), |a, b| a + b))
        .collect()
}

/// Exact `omega0(v, w) = Im(w* v)`.
fn omega0(v: &[Q], w: &[Q]) -> Rational64 {
    v.iter().zip(w).map(|(a, b)| b.conj() * a).fold(Q::zero(), |x, y| x + y).im
}

/// Outcome of one exact relation check.
#[derive(Debug, Clone, serde::Serialize)]
pub struct ExactCheck {
    pub relation: &'static str,
    pub holds: bool,
}

/// Exact versions of the eight bracket relations plus membership of every
/// element used (`X*F + FX = 0`, `tr X = 0`).
pub fn bracket_table_exact(n: usize) -> Result<Vec<ExactCheck>> {
    check_n(n)?;
    let k = n - 1;
    let f = form(n);
    let (a, nn) = (a0(n), n2(n));
    let coords = coord_vectors(k);
    let n1s: Vec<QMat> = coords.iter().map(|v| n1(n, v)).collect();
    let ds = u_basis(k);
    let stabs: Vec<QMat> = ds.iter().map(|d| embed(n, d)).collect();

    let member = |x: &QMat| x.adjoint().mul(&f).add(&f.mul(x)).is_zero() && x.trace().is_zero();
    let all_members = std::iter::once(&a)
        .chain(std::iter::once(&nn))
        .chain(&n1s)
        .chain(&stabs)
        .all(member);

    let mut out = vec![ExactCheck { relation: "membership in su(n,1)", holds: all_members }];
    out.push(ExactCheck {
        relation: "[A0, X] = X",
        holds: n1s.iter().all(|x| a.bracket(x) == *x),
    });
    out.push(ExactCheck {
        relation: "[A0, N2] = 2 N2",
        holds: a.bracket(&nn) == nn.scale(q(2, 0)),
    });
    out.push(ExactCheck {
        relation: "[A0, s(u(n-1)+u(1))] = 0",
        holds: stabs.iter().all(|s| a.bracket(s).is_zero()),
    });
    out.push(ExactCheck {
        relation: "[s(u(n-1)+u(1)), X(v)] = X(Dv)",
        holds: stabs
            .iter()
            .zip(&ds)
            .all(|(s, d)| coords.iter().all(|v| s.bracket(&n1(n, v)) == n1(n, &apply(d, v)))),
    });
    out.push(ExactCheck {
        relation: "[N2, s(u(n-1)+u(1))] = 0",
        holds: stabs.iter().all(|s| nn.bracket(s).is_zero()),
    });
    out.push(ExactCheck {
        relation: "[n1, N2] = 0",
        holds: n1s.iter().all(|x| x.bracket(&nn).is_zero()),
    });
    out.push(ExactCheck { relation: "[N2, N2] = 0", holds: nn.bracket(&nn).is_zero() });
    out.push(ExactCheck {
        relation: "[X(v), X(w)] = 2 omega0(v,w) N2",
        holds: coords.iter().all(|v| {
            coords.iter().all(|w| {
                let c = Q::new(omega0(v, w) * 2, Rational64::zero());
                n1(n, v).bracket(&n1(n, w)) == nn.scale(c)
            })
        }),
    });
    Ok(out)
}

/// Exact membership check of the block-form basis of su(n,1).
pub fn su_basis_exact_membership(n: usize) -> Result<bool> {
    check_n(n)?;
    let f = form(n);
    let k = n - 1;
    let (p, r) = (n - 1, n);
    let half = Q::new(Rational64::new(1, 2), Rational64::zero());
    let mut basis = Vec::new();
    for b in u_basis(k) {
        let z = -b.trace() * half;
        let mut m = QMat::zeros(n + 1);
        for i in 0..k {
            for j in 0..k {
                m.set(i, j, b.get(i, j));
            }
        }
        m.set(p, p, z);
        m.set(r, r, -z.conj());
        basis.push(m);
    }
    basis.push(a0(n));
    for unit in [q(1, 0), q(0, 1)] {
        for j in 0..k {
            let mut m = QMat::zeros(n + 1);
            m.set(j, p, unit);
            m.set(r, j, -unit.conj());
            basis.push(m);
            let mut m = QMat::zeros(n + 1);
            m.set(j, r, unit);
            m.set(p, j, -unit.conj());
            basis.push(m);
        }
    }
    basis.push(n2(n));
    let mut m = QMat::zeros(n + 1);
    m.set(r, p, q(0, 1));
    basis.push(m);
    Ok(basis.len() == (n + 1) * (n + 1) - 1
        && basis
            .iter()
            .all(|x| x.adjoint().mul(&f).add(&f.mul(x)).is_zero() && x.trace().is_zero()))
}
