//! Mass tensors, realizable dimension and decomposition of trace-one PSD
//! matrices into mixtures of scaled k-plane projections.

use crate::error::{Error, Result};
use crate::linalg::{dot, SymMatrix};
use crate::network::{Anisotropy, NetworkMedium};
use crate::scalar::{Real, Tolerances};

/// Total matrix mass `theta(T^n)` of a network medium.
pub fn mass_tensor<T: Real>(medium: &NetworkMedium<T>) -> SymMatrix<T> {
    let tol = Tolerances::standard();
    let net = &medium.network;
    let n = net.dimension();
    let mut m = SymMatrix::zeros(n);
    for e in net.support_edges(&tol) {
        let a = net.edges()[e].weight;
        match medium.mode {
            Anisotropy::Isotropic => {
                let s = a * net.length(e);
                for i in 0..n {
                    m.set(i, i, m.get(i, i) + s);
                }
            }
            Anisotropy::Tangential => {
                // a l T T^T = (a / l) d d^T
                let d = net.displacement(e);
                let l = net.length(e);
                m.add_outer(&d, a / l);
            }
        }
    }
    m
}

/// `tr(A) / lambda_max(A)`.
pub fn realizable_dimension<T: Real>(a: &SymMatrix<T>) -> Result<T> {
    let tol = Tolerances::<T>::standard();
    let ev = a.eigenvalues();
    let lmax = ev.last().copied().unwrap_or_else(T::zero);
    if lmax <= T::zero() && a.max_abs() == T::zero() {
        return Err(Error::ZeroMatrix);
    }
    let lmin = ev[0];
    if lmin < -tol.psd * lmax.abs() || lmax <= T::zero() {
        return Err(Error::NotPsd(lmin.as_f64()));
    }
    Ok(a.trace() / lmax)
}

/// One atom `lambda * (1/k) P_tau` of a projection mixture.
#[derive(Debug, Clone, PartialEq)]
pub struct MixtureAtom<T> {
    pub lambda: T,
    /// `k` orthonormal vectors spanning `tau`.
    pub basis: Vec<Vec<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionMixture<T> {
    pub k: usize,
    pub n: usize,
    pub atoms: Vec<MixtureAtom<T>>,
}

impl<T: Real> ProjectionMixture<T> {
    /// `(1/k) sum_i lambda_i P_{tau_i}`.
    pub fn reconstruct(&self) -> SymMatrix<T> {
        let mut m = SymMatrix::zeros(self.n);
        let inv_k = T::one() / T::from_usize(self.k).unwrap();
        for atom in &self.atoms {
            for b in &atom.basis {
                m.add_outer(b, atom.lambda * inv_k);
            }
        }
        m
    }

    pub fn total_weight(&self) -> T {
        self.atoms.iter().map(|a| a.lambda).sum()
    }

    /// Checks unit total weight, positive weights and orthonormal bases within `tol`.
    pub fn is_valid(&self, tol: T) -> bool {
        if (self.total_weight() - T::one()).abs() > tol {
            return false;
        }
        self.atoms.iter().all(|a| {
            a.lambda > T::zero()
                && a.basis.len() == self.k
                && a.basis.iter().enumerate().all(|(i, bi)| {
                    a.basis.iter().enumerate().all(|(j, bj)| {
                        let target = if i == j { T::one() } else { T::zero() };
                        (dot(bi, bj) - target).abs() <= tol
                    })
                })
        })
    }
}

/// Writes a trace-one PSD matrix as `(1/k) sum lambda_i P_{tau_i}`.
///
/// Works in the eigenbasis: the eigenvalue vector is peeled into extreme
/// points `(1/k) 1_J` of `{0 <= x_i <= 1/k, sum x = 1}`, always taking `J` as
/// the `k` largest residual coordinates and moving until a coordinate in `J`
/// empties or one outside `J` reaches the cap. Each step retires at least one
/// coordinate, so at most `n` atoms are produced.
pub fn realize_as_mixture<T: Real>(a: &SymMatrix<T>, k: usize) -> Result<ProjectionMixture<T>> {
    let tol = Tolerances::<T>::standard();
    let n = a.dim();
    if k == 0 || k > n {
        return Err(Error::BadDimension { k, n });
    }
    let tr = a.trace();
    if (tr - T::one()).abs() > tol.mix {
        return Err(Error::BadTrace(tr.as_f64()));
    }
    let eig = a.eigen();
    let lmin = eig.values[0];
    let lmax = eig.values[n - 1];
    if lmin < -tol.psd * lmax.abs().max(T::one()) {
        return Err(Error::NotPsd(lmin.as_f64()));
    }
    let kk = T::from_usize(k).unwrap();
    let cap = T::one() / kk;
    if lmax > cap + tol.mix {
        return Err(Error::NotRealizable {
            k,
            lambda_max: lmax.as_f64(),
        });
    }

    // Clip into the polytope and renormalize.
    let mut r: Vec<T> = eig.values.iter().map(|&l| l.max(T::zero()).min(cap)).collect();
    let s: T = r.iter().copied().sum();
    r.iter_mut().for_each(|x| *x = *x / s);
    for x in r.iter_mut() {
        *x = x.min(cap);
    }

    let mut remaining: T = r.iter().copied().sum();
    let mut atoms: Vec<MixtureAtom<T>> = Vec::new();
    let stop = T::epsilon() * T::lit(64.0);
    for _ in 0..=n {
        if remaining <= stop {
            break;
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| r[j].partial_cmp(&r[i]).unwrap().then(i.cmp(&j)));
        let (chosen, rest) = order.split_at(k);
        let mut mu = remaining;
        for &i in chosen {
            mu = mu.min(kk * r[i]);
        }
        for &i in rest {
            mu = mu.min(remaining - kk * r[i]);
        }
        let mu = mu.max(T::zero());
        if mu <= stop {
            break;
        }
        for &i in chosen {
            r[i] = (r[i] - mu / kk).max(T::zero());
        }
        remaining -= mu;
        let mut idx: Vec<usize> = chosen.to_vec();
        idx.sort_unstable();
        let basis = idx.iter().map(|&i| eig.vectors[i].clone()).collect();
        atoms.push(MixtureAtom { lambda: mu, basis });
    }
    // Absorb roundoff so weights sum to one exactly up to the last ulp.
    let total: T = atoms.iter().map(|a| a.lambda).sum();
    if total > T::zero() {
        atoms.iter_mut().for_each(|a| a.lambda = a.lambda / total);
    }
    Ok(ProjectionMixture { k, n, atoms })
}
