//! Effective conductance tensors from the periodic cell problem on the
//! quotient graph.
//!
//! On a straight edge the one-dimensional Dirichlet energy is minimized by an
//! affine profile, so the cell problem reduces to one potential per node: for
//! a drift `p`,
//!
//! ```text
//! E_p(phi) = sum_e (a_e / l_e) (phi_v - phi_u + p . d_e)^2
//! ```
//!
//! and `p . Q p = min E_p`. The tensor is assembled from the minimizers for
//! the coordinate drifts through the polarization identity.

pub mod cg;
mod homogenize;

use rayon::prelude::*;

pub use homogenize::{homogenize_window, homogenize_window_with, HomogenizationTrace, WindowResult};

use crate::error::Result;
use crate::linalg::SymMatrix;
use crate::network::{Edge, NetworkMedium, PeriodicNetwork, TorusPoint};
use crate::scalar::{Real, Tolerances};
use crate::topology::component_labels;
use cg::{conjugate_gradient, CgOptions, Laplacian};

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveTensor<T> {
    pub q: SymMatrix<T>,
    /// Largest relative residual over the coordinate solves.
    pub residual: T,
    pub component_count: usize,
    /// `sum_e (a_e / l_e) |d_e|^2`, the trace of the tangential mass tensor
    /// and an upper bound for every eigenvalue of `q`. Rank decisions are
    /// made relative to it, so a tensor that is zero up to roundoff is zero.
    pub scale: T,
}

impl<T: Real> EffectiveTensor<T> {
    fn threshold(&self, tol_rank: T) -> T {
        tol_rank * self.scale.max(T::min_positive_value())
    }

    /// Number of eigenvalues above `tol_rank * scale`.
    pub fn rank(&self, tol_rank: T) -> usize {
        let thr = self.threshold(tol_rank);
        self.q.eigenvalues().iter().filter(|&&l| l > thr).count()
    }

    /// Orthonormal eigenvectors with eigenvalue at most `tol_rank * scale`.
    pub fn kernel(&self, tol_rank: T) -> Vec<Vec<T>> {
        let thr = self.threshold(tol_rank);
        let eig = self.q.eigen();
        eig.values
            .iter()
            .zip(eig.vectors)
            .filter(|(&l, _)| l <= thr)
            .map(|(_, v)| v)
            .collect()
    }
}

/// The discrete cell problem of a network: support edges, conductances and
/// the component structure.
#[derive(Debug, Clone)]
pub struct CellProblem<T> {
    dim: usize,
    links: Vec<Link<T>>,
    laplacian: Laplacian<T>,
    labels: Vec<Option<usize>>,
    components: usize,
    opts: CgOptions<T>,
}

#[derive(Debug, Clone)]
struct Link<T> {
    u: usize,
    v: usize,
    conductance: T,
    displacement: Vec<T>,
}

impl<T: Real> CellProblem<T> {
    pub fn new(net: &PeriodicNetwork<T>) -> Self {
        Self::with_tolerances(net, &Tolerances::standard())
    }

    pub fn with_tolerances(net: &PeriodicNetwork<T>, tol: &Tolerances<T>) -> Self {
        let links: Vec<Link<T>> = net
            .support_edges(tol)
            .into_iter()
            .map(|e| {
                let edge = &net.edges()[e];
                Link {
                    u: edge.u,
                    v: edge.v,
                    conductance: edge.weight / net.length(e),
                    displacement: net.displacement(e),
                }
            })
            .collect();
        let laplacian = Laplacian::new(
            net.node_count(),
            links.iter().map(|l| (l.u, l.v, l.conductance)),
        );
        let (labels, components) = component_labels(net);
        Self {
            dim: net.dimension(),
            links,
            laplacian,
            labels,
            components,
            opts: CgOptions {
                rel_tol: tol.solve,
                max_iter: 20 * net.node_count().max(1),
            },
        }
    }

    pub fn component_count(&self) -> usize {
        self.components
    }

    /// Per-edge gradients `phi_v - phi_u + p . d_e` of the minimizer for drift `p`.
    pub fn corrected_gradients(&self, p: &[T]) -> Result<(Vec<T>, T)> {
        let n = self.laplacian.size();
        let mut b = vec![T::zero(); n];
        let drops: Vec<T> = self
            .links
            .iter()
            .map(|l| crate::linalg::dot(&l.displacement, p))
            .collect();
        for (l, &q) in self.links.iter().zip(&drops) {
            let s = l.conductance * q;
            b[l.u] += s;
            b[l.v] -= s;
        }
        let sol = conjugate_gradient(
            &self.laplacian,
            &b,
            None,
            Some((&self.labels, self.components)),
            None,
            &self.opts,
        )?;
        let grads = self
            .links
            .iter()
            .zip(&drops)
            .map(|(l, &q)| sol.x[l.v] - sol.x[l.u] + q)
            .collect();
        Ok((grads, sol.residual))
    }

    fn pair(&self, gp: &[T], gq: &[T]) -> T {
        self.links
            .iter()
            .zip(gp.iter().zip(gq))
            .map(|(l, (&a, &b))| l.conductance * a * b)
            .sum()
    }

    pub fn solve(&self) -> Result<EffectiveTensor<T>> {
        let n = self.dim;
        let grads: Vec<(Vec<T>, T)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut p = vec![T::zero(); n];
                p[i] = T::one();
                self.corrected_gradients(&p)
            })
            .collect::<Result<_>>()?;
        let q = SymMatrix::from_fn(n, |i, j| self.pair(&grads[i].0, &grads[j].0));
        let residual = grads.iter().fold(T::zero(), |m, g| m.max(g.1));
        let scale = self
            .links
            .iter()
            .map(|l| l.conductance * l.displacement.iter().map(|&x| x * x).sum::<T>())
            .sum();
        Ok(EffectiveTensor {
            q,
            residual,
            component_count: self.components,
            scale,
        })
    }

    /// `p . Q q` from the two minimizers.
    pub fn bilinear(&self, p: &[T], q: &[T]) -> Result<T> {
        let (gp, _) = self.corrected_gradients(p)?;
        let (gq, _) = self.corrected_gradients(q)?;
        Ok(self.pair(&gp, &gq))
    }
}

/// Effective conductance tensor `Q(theta)`.
///
/// Isotropic and tangential media on the same network give the same tensor:
/// only tangential gradients along straight edges carry energy.
pub fn effective_tensor<T: Real>(medium: &NetworkMedium<T>) -> Result<EffectiveTensor<T>> {
    CellProblem::new(&medium.network).solve()
}

pub fn effective_bilinear<T: Real>(medium: &NetworkMedium<T>, p: &[T], q: &[T]) -> Result<T> {
    CellProblem::new(&medium.network).bilinear(p, q)
}

/// Splits edge `e` into `parts[e]` collinear pieces of equal length.
///
/// Interpolated nodes are appended after the original ones; the crossing
/// vectors of the pieces add up to the original shift.
pub fn subdivide<T: Real>(net: &PeriodicNetwork<T>, parts: &[usize]) -> PeriodicNetwork<T> {
    assert_eq!(parts.len(), net.edge_count(), "one part count per edge");
    let n = net.dimension();
    let mut out = PeriodicNetwork::empty(n);
    for p in net.nodes() {
        out.push_node(p.clone()).expect("same dimension");
    }
    for (e, &m) in parts.iter().enumerate() {
        let edge = &net.edges()[e];
        if m <= 1 {
            out.push_edge(edge.clone()).expect("valid edge");
            continue;
        }
        let xu = net.nodes()[edge.u].coords().to_vec();
        let d = net.displacement(e);
        let mf = T::from_usize(m).unwrap();
        let mut prev = edge.u;
        let mut prev_offset = vec![0i64; n];
        for j in 1..=m {
            let (id, off) = if j == m {
                (edge.v, edge.shift.clone())
            } else {
                let t = T::from_usize(j).unwrap() / mf;
                let lifted: Vec<T> = (0..n).map(|c| xu[c] + t * d[c]).collect();
                let point = TorusPoint::new(lifted.clone());
                let off = (0..n)
                    .map(|c| (lifted[c] - point.coords()[c]).round().to_i64().unwrap())
                    .collect();
                (out.push_node(point).expect("same dimension"), off)
            };
            let shift = (0..n).map(|c| off[c] - prev_offset[c]).collect();
            out.push_edge(Edge::new(prev, id, shift, edge.weight))
                .expect("piece of a valid edge");
            prev = id;
            prev_offset = off;
        }
    }
    out
}
