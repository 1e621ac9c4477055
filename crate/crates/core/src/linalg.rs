//! Small dense symmetric matrices and the spectral tools built on them.

use std::fmt;
use std::ops::{Add, Sub};

use crate::scalar::Real;

/// Real symmetric `n x n` matrix; only the upper triangle is stored.
#[derive(Clone, PartialEq)]
pub struct SymMatrix<T> {
    n: usize,
    upper: Vec<T>,
}

#[inline]
fn packed(n: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * n - i * (i + 1) / 2 + j
}

impl<T: Real> SymMatrix<T> {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            upper: vec![T::zero(); n * (n + 1) / 2],
        }
    }

    pub fn identity(n: usize) -> Self {
        Self::scaled_identity(n, T::one())
    }

    pub fn scaled_identity(n: usize, s: T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.set(i, i, s);
        }
        m
    }

    pub fn diagonal(values: &[T]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.set(i, i, v);
        }
        m
    }

    /// Builds from `f(i, j)` evaluated on the upper triangle.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Row-major upper triangle `a11, a12, .., a1n, a22, ..`.
    pub fn from_upper(n: usize, upper: Vec<T>) -> Option<Self> {
        (upper.len() == n * (n + 1) / 2).then_some(Self { n, upper })
    }

    /// `v v^T`, optionally scaled.
    pub fn outer(v: &[T], scale: T) -> Self {
        let mut m = Self::zeros(v.len());
        m.add_outer(v, scale);
        m
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn upper(&self) -> &[T] {
        &self.upper
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> T {
        self.upper[packed(self.n, i, j)]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: T) {
        let k = packed(self.n, i, j);
        self.upper[k] = v;
    }

    /// `self += scale * v v^T`.
    pub fn add_outer(&mut self, v: &[T], scale: T) {
        debug_assert_eq!(v.len(), self.n);
        for i in 0..self.n {
            let si = scale * v[i];
            for j in i..self.n {
                let k = packed(self.n, i, j);
                self.upper[k] += si * v[j];
            }
        }
    }

    pub fn scaled(&self, s: T) -> Self {
        Self {
            n: self.n,
            upper: self.upper.iter().map(|&x| x * s).collect(),
        }
    }

    pub fn trace(&self) -> T {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_norm(&self) -> T {
        let mut acc = T::zero();
        for i in 0..self.n {
            for j in 0..self.n {
                let x = self.get(i, j);
                acc += x * x;
            }
        }
        acc.sqrt()
    }

    pub fn max_abs(&self) -> T {
        self.upper.iter().fold(T::zero(), |m, x| m.max(x.abs()))
    }

    pub fn mul_vec(&self, x: &[T]) -> Vec<T> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j) * x[j]).sum())
            .collect()
    }

    pub fn quad_form(&self, p: &[T], q: &[T]) -> T {
        let aq = self.mul_vec(q);
        dot(p, &aq)
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.n)
            .map(|i| (0..self.n).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn is_finite(&self) -> bool {
        self.upper.iter().all(|x| x.is_finite())
    }

    pub fn eigen(&self) -> SymEigen<T> {
        SymEigen::new(self)
    }

    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().values
    }

    pub fn max_eigenvalue(&self) -> T {
        self.eigenvalues().last().copied().unwrap_or_else(T::zero)
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues().first().copied().unwrap_or_else(T::zero)
    }

    /// Number of eigenvalues above `rel * max(lambda_max, tiny)`.
    pub fn rank(&self, rel: T) -> usize {
        let ev = self.eigenvalues();
        let thr = rel * ev.last().copied().unwrap_or_else(T::zero).max(T::min_positive_value());
        ev.iter().filter(|&&l| l > thr).count()
    }

    /// PSD test: every eigenvalue at least `-rel * lambda_max`.
    pub fn is_psd(&self, rel: T) -> bool {
        let ev = self.eigenvalues();
        match (ev.first(), ev.last()) {
            (Some(&lo), Some(&hi)) => lo >= -rel * hi.abs().max(T::min_positive_value()),
            _ => true,
        }
    }
}

impl<T: Real> Add for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn add(self, rhs: Self) -> SymMatrix<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&rhs.upper).map(|(&a, &b)| a + b).collect(),
        }
    }
}

impl<T: Real> Sub for &SymMatrix<T> {
    type Output = SymMatrix<T>;
    fn sub(self, rhs: Self) -> SymMatrix<T> {
        assert_eq!(self.n, rhs.n, "dimension mismatch");
        SymMatrix {
            n: self.n,
            upper: self.upper.iter().zip(&rhs.upper).map(|(&a, &b)| a - b).collect(),
        }
    }
}

impl<T: fmt::Debug> fmt::Debug for SymMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.n;
        let rows = (0..n).map(|i| (0..n).map(move |j| &self.upper[packed(n, i, j)]).collect::<Vec<_>>());
        f.debug_list().entries(rows).finish()
    }
}

/// Eigen-decomposition `A = V diag(values) V^T` with ascending eigenvalues.
/// `vectors[i]` is the unit eigenvector of `values[i]`.
#[derive(Debug, Clone)]
pub struct SymEigen<T> {
    pub values: Vec<T>,
    pub vectors: Vec<Vec<T>>,
}

impl<T: Real> SymEigen<T> {
    /// Cyclic Jacobi rotations; exact enough for the small matrices here.
    pub fn new(m: &SymMatrix<T>) -> Self {
        let n = m.dim();
        let mut a = m.to_rows();
        let mut v: Vec<Vec<T>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
            .collect();
        let scale = m.frobenius_norm();
        if scale > T::zero() {
            let two = T::lit(2.0);
            for _sweep in 0..64 {
                let mut off = T::zero();
                for p in 0..n {
                    for q in (p + 1)..n {
                        off += a[p][q] * a[p][q];
                    }
                }
                if off.sqrt() <= T::epsilon() * T::lit(1e-3) * scale {
                    break;
                }
                for p in 0..n {
                    for q in (p + 1)..n {
                        let apq = a[p][q];
                        if apq == T::zero() {
                            continue;
                        }
                        let theta = (a[q][q] - a[p][p]) / (two * apq);
                        let t = theta.signum() / (theta.abs() + (theta * theta + T::one()).sqrt());
                        let c = T::one() / (t * t + T::one()).sqrt();
                        let s = t * c;
                        for k in 0..n {
                            let akp = a[k][p];
                            let akq = a[k][q];
                            a[k][p] = c * akp - s * akq;
                            a[k][q] = s * akp + c * akq;
                        }
                        for k in 0..n {
                            let apk = a[p][k];
                            let aqk = a[q][k];
                            a[p][k] = c * apk - s * aqk;
                            a[q][k] = s * apk + c * aqk;
                        }
                        for row in v.iter_mut() {
                            let vkp = row[p];
                            let vkq = row[q];
                            row[p] = c * vkp - s * vkq;
                            row[q] = s * vkp + c * vkq;
                        }
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).unwrap_or(std::cmp::Ordering::Equal));
        let values = order.iter().map(|&i| a[i][i]).collect();
        let vectors = order
            .iter()
            .map(|&i| (0..n).map(|k| v[k][i]).collect())
            .collect();
        Self { values, vectors }
    }
}

/// Orthonormal basis of the eigenspace with eigenvalues at most
/// `tol_rank * max(lambda_max, floor)`, where `floor` is the smallest positive
/// normal number. The zero matrix yields the full standard basis.
pub fn kernel_basis<T: Real>(a: &SymMatrix<T>, tol_rank: T) -> Vec<Vec<T>> {
    let n = a.dim();
    if a.max_abs() == T::zero() {
        return standard_basis(n);
    }
    let eig = a.eigen();
    let lmax = eig.values.last().copied().unwrap_or_else(T::zero);
    let thr = tol_rank * lmax.max(T::min_positive_value());
    eig.values
        .iter()
        .zip(eig.vectors)
        .filter(|(&l, _)| l <= thr)
        .map(|(_, v)| v)
        .collect()
}

pub fn standard_basis<T: Real>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

#[inline]
pub fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

#[inline]
pub fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Modified Gram-Schmidt with re-orthogonalization; vectors whose residual
/// norm drops below `tol` times their original norm are discarded.
pub fn orthonormalize<T: Real>(vectors: &[Vec<T>], tol: T) -> Vec<Vec<T>> {
    let mut basis: Vec<Vec<T>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == T::zero() {
            continue;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for b in &basis {
                let c = dot(&w, b);
                w.iter_mut().zip(b).for_each(|(x, &y)| *x -= c * y);
            }
        }
        let nw = norm(&w);
        if nw > tol * n0 {
            basis.push(w.into_iter().map(|x| x / nw).collect());
        }
    }
    basis
}

/// Orthonormal basis of the orthogonal complement of `span(vectors)` in `R^n`.
pub fn orthogonal_complement<T: Real>(vectors: &[Vec<T>], n: usize) -> Vec<Vec<T>> {
    let tol = T::lit(1e-6);
    let span = orthonormalize(vectors, tol);
    let mut all = span.clone();
    all.extend(standard_basis(n));
    let full = orthonormalize(&all, tol);
    full[span.len()..].to_vec()
}

/// Largest principal angle between the spans of two orthonormal families.
///
/// Returns `pi/2` when the dimensions differ. Computed as the arcsine of the
/// largest singular value of `(I - V V^T) U`, which stays accurate for tiny
/// angles.
pub fn largest_principal_angle<T: Real>(u: &[Vec<T>], v: &[Vec<T>]) -> T {
    if u.len() != v.len() {
        return T::lit(std::f64::consts::FRAC_PI_2);
    }
    if u.is_empty() {
        return T::zero();
    }
    let k = u.len();
    let residual: Vec<Vec<T>> = u
        .iter()
        .map(|ui| {
            let mut r = ui.clone();
            for vj in v {
                let c = dot(ui, vj);
                r.iter_mut().zip(vj).for_each(|(x, &y)| *x -= c * y);
            }
            r
        })
        .collect();
    let gram = SymMatrix::from_fn(k, |i, j| dot(&residual[i], &residual[j]));
    let s2 = gram.max_eigenvalue().max(T::zero());
    s2.sqrt().min(T::one()).asin()
}
