//! Weighted graph Laplacians and conjugate gradients on them.

use crate::error::{Error, Result};
use crate::linalg::dot;
use crate::scalar::Real;

/// `(L x)_i = sum_j c_ij (x_i - x_j)` in compressed row form.
#[derive(Debug, Clone)]
pub struct Laplacian<T> {
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<T>,
    diag: Vec<T>,
}

impl<T: Real> Laplacian<T> {
    /// Self-loops (`u == v`) contribute nothing and are skipped.
    pub fn new(nodes: usize, links: impl IntoIterator<Item = (usize, usize, T)>) -> Self {
        let mut rows: Vec<Vec<(usize, T)>> = vec![Vec::new(); nodes];
        let mut diag = vec![T::zero(); nodes];
        for (u, v, c) in links {
            if u == v {
                continue;
            }
            rows[u].push((v, c));
            rows[v].push((u, c));
            diag[u] += c;
            diag[v] += c;
        }
        let mut row_ptr = Vec::with_capacity(nodes + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut r in rows {
            r.sort_by_key(|&(j, _)| j);
            // Merge parallel links.
            let mut last: Option<usize> = None;
            for (j, c) in r {
                if last == Some(j) {
                    *vals.last_mut().unwrap() += c;
                } else {
                    cols.push(j);
                    vals.push(c);
                    last = Some(j);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            row_ptr,
            cols,
            vals,
            diag,
        }
    }

    pub fn size(&self) -> usize {
        self.diag.len()
    }

    pub fn diag(&self) -> &[T] {
        &self.diag
    }

    pub fn apply(&self, x: &[T], y: &mut [T]) {
        for i in 0..self.size() {
            let mut acc = self.diag[i] * x[i];
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                acc -= self.vals[k] * x[self.cols[k]];
            }
            y[i] = acc;
        }
    }

    /// Rows restricted to `free` unknowns: `(L_FF x)_i` for free `i`, treating
    /// non-free entries as zero.
    fn apply_masked(&self, x: &[T], y: &mut [T], free: Option<&[bool]>) {
        self.apply(x, y);
        if let Some(free) = free {
            for i in 0..y.len() {
                if !free[i] {
                    y[i] = T::zero();
                }
            }
        }
    }
}

/// Removes the per-component mean; `labels[i] == None` pins entry `i` to 0.
pub fn project_components<T: Real>(x: &mut [T], labels: &[Option<usize>], count: usize) {
    let mut sum = vec![T::zero(); count];
    let mut cnt = vec![0usize; count];
    for (i, l) in labels.iter().enumerate() {
        if let Some(c) = *l {
            sum[c] += x[i];
            cnt[c] += 1;
        }
    }
    for (i, l) in labels.iter().enumerate() {
        match *l {
            Some(c) => x[i] -= sum[c] / T::from_usize(cnt[c]).unwrap(),
            None => x[i] = T::zero(),
        }
    }
}

#[derive(Debug, Clone)]
pub struct CgOptions<T> {
    pub rel_tol: T,
    pub max_iter: usize,
}

#[derive(Debug, Clone)]
pub struct CgSolution<T> {
    pub x: Vec<T>,
    /// `|b - L x| / |b|` (0 when `b = 0`).
    pub residual: T,
    pub iterations: usize,
}

/// Conjugate gradients for `L x = b`.
///
/// `projection` restricts iterates to the complement of the per-component
/// constants (the kernel of a periodic Laplacian); `free` masks pinned
/// unknowns of a Dirichlet problem, whose entries of `x0` stay fixed and must
/// already be folded into `b`.
pub fn conjugate_gradient<T: Real>(
    lap: &Laplacian<T>,
    b: &[T],
    x0: Option<Vec<T>>,
    projection: Option<(&[Option<usize>], usize)>,
    free: Option<&[bool]>,
    opts: &CgOptions<T>,
) -> Result<CgSolution<T>> {
    let n = lap.size();
    let mut b = b.to_vec();
    if let Some(mask) = free {
        for i in 0..n {
            if !mask[i] {
                b[i] = T::zero();
            }
        }
    }
    if let Some((labels, count)) = projection {
        project_components(&mut b, labels, count);
    }
    let bnorm = dot(&b, &b).sqrt();
    let mut x = x0.unwrap_or_else(|| vec![T::zero(); n]);
    let mut fixed = vec![T::zero(); n];
    if let Some(mask) = free {
        for i in 0..n {
            if !mask[i] {
                fixed[i] = x[i];
                x[i] = T::zero();
            }
        }
    }
    if bnorm == T::zero() && x.iter().all(|&v| v == T::zero()) {
        for i in 0..n {
            x[i] += fixed[i];
        }
        return Ok(CgSolution {
            x,
            residual: T::zero(),
            iterations: 0,
        });
    }
    let scale = if bnorm > T::zero() { bnorm } else { T::one() };
    let mut ax = vec![T::zero(); n];
    lap.apply_masked(&x, &mut ax, free);
    let mut r: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    if let Some((labels, count)) = projection {
        project_components(&mut r, labels, count);
    }
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let mut ap = vec![T::zero(); n];
    let mut iterations = 0;
    while rr.sqrt() > opts.rel_tol * scale && iterations < opts.max_iter {
        lap.apply_masked(&p, &mut ap, free);
        let pap = dot(&p, &ap);
        if pap <= T::zero() {
            break;
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if let Some((labels, count)) = projection {
            project_components(&mut r, labels, count);
        }
        let rr_new = dot(&r, &r);
        let beta = rr_new / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_new;
        iterations += 1;
    }
    if let Some((labels, count)) = projection {
        project_components(&mut x, labels, count);
    }
    // True residual.
    lap.apply_masked(&x, &mut ax, free);
    let mut res: Vec<T> = b.iter().zip(&ax).map(|(&bi, &ai)| bi - ai).collect();
    if let Some((labels, count)) = projection {
        project_components(&mut res, labels, count);
    }
    let residual = dot(&res, &res).sqrt() / scale;
    if !(residual <= opts.rel_tol) {
        return Err(Error::SolveFailure {
            residual: residual.as_f64(),
            iterations,
        });
    }
    for i in 0..n {
        x[i] += fixed[i];
    }
    Ok(CgSolution {
        x,
        residual,
        iterations,
    })
}
