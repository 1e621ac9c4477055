use crate::cellsolver::effective_tensor;
use crate::error::Result;
use crate::linalg::{norm, SymMatrix};
use crate::mixture::mass_tensor;
use crate::network::{Anisotropy, NetworkMedium, PeriodicNetwork};
use crate::scalar::{Real, Tolerances};

#[derive(Debug, Clone, PartialEq)]
pub struct NodeBalance<T> {
    pub node: usize,
    /// `sum over incident e of a_e T_e`, tangents pointing away from the node.
    pub residual: Vec<T>,
    pub norm: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceReport<T> {
    pub per_node: Vec<NodeBalance<T>>,
    pub max_residual: T,
    pub balanced: bool,
    /// The medium is isotropic: the residual describes its tangential part only.
    pub isotropic_note: bool,
}

/// Weighted outgoing unit tangents at every node.
pub fn node_residuals<T: Real>(net: &PeriodicNetwork<T>, tol: &Tolerances<T>) -> Vec<Vec<T>> {
    let n = net.dimension();
    let mut res = vec![vec![T::zero(); n]; net.node_count()];
    for e in net.support_edges(tol) {
        let edge = &net.edges()[e];
        let t = net.tangent(e);
        for c in 0..n {
            let f = edge.weight * t[c];
            res[edge.u][c] += f;
            res[edge.v][c] -= f;
        }
    }
    res
}

pub fn balance_report<T: Real>(medium: &NetworkMedium<T>) -> BalanceReport<T> {
    let tol = Tolerances::<T>::standard();
    let net = &medium.network;
    let per_node: Vec<NodeBalance<T>> = node_residuals(net, &tol)
        .into_iter()
        .enumerate()
        .map(|(node, residual)| NodeBalance {
            node,
            norm: norm(&residual),
            residual,
        })
        .collect();
    let max_residual = per_node.iter().fold(T::zero(), |m, b| m.max(b.norm));
    let max_weight = net.edges().iter().fold(T::zero(), |m, e| m.max(e.weight));
    BalanceReport {
        balanced: max_residual <= tol.balance * max_weight,
        max_residual,
        per_node,
        isotropic_note: medium.mode == Anisotropy::Isotropic,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MaximalityReport<T> {
    pub is_maximal: bool,
    /// `mass_tensor - Q`; PSD up to solver tolerance.
    pub gap: SymMatrix<T>,
    pub gap_norm: T,
    pub mass: SymMatrix<T>,
    pub q: SymMatrix<T>,
}

/// Compares `Q` with the total mass; maximal means the upper bound is attained.
pub fn maximality_check<T: Real>(medium: &NetworkMedium<T>) -> Result<MaximalityReport<T>> {
    let tol = Tolerances::<T>::standard();
    let q = effective_tensor(medium)?.q;
    let mass = mass_tensor(medium);
    let gap = &mass - &q;
    let gap_norm = gap.frobenius_norm();
    Ok(MaximalityReport {
        is_maximal: gap_norm <= tol.wiener * (T::one() + mass.frobenius_norm()),
        gap,
        gap_norm,
        mass,
        q,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValencyReport {
    pub per_node: Vec<usize>,
    pub max: usize,
}

/// Incident edge-ends per node; a self-loop counts twice.
pub fn valency<T: Real>(net: &PeriodicNetwork<T>) -> ValencyReport {
    let tol = Tolerances::<T>::standard();
    let mut per_node = vec![0usize; net.node_count()];
    for e in net.support_edges(&tol) {
        per_node[net.edges()[e].u] += 1;
        per_node[net.edges()[e].v] += 1;
    }
    let max = per_node.iter().copied().max().unwrap_or(0);
    ValencyReport { per_node, max }
}
