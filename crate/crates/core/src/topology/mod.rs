//! Connectivity and homotopy data of the support of a network medium.

mod lattice;
mod planarize;

use std::collections::VecDeque;

pub use lattice::{hermite_normal_form, in_lattice, primitive};
pub use planarize::planarize;

use crate::linalg::orthogonal_complement;
use crate::network::{Edge, PeriodicNetwork};
use crate::scalar::{Real, Tolerances};

/// Component label of every node; `None` for nodes without support edges.
pub fn component_labels<T: Real>(net: &PeriodicNetwork<T>) -> (Vec<Option<usize>>, usize) {
    let tol = Tolerances::<T>::standard();
    let n = net.node_count();
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n];
    for e in net.support_edges(&tol) {
        let edge = &net.edges()[e];
        adj[edge.u].push(edge.v);
        adj[edge.v].push(edge.u);
    }
    let mut label = vec![None; n];
    let mut count = 0;
    for start in 0..n {
        if label[start].is_some() || adj[start].is_empty() {
            continue;
        }
        label[start] = Some(count);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &y in &adj[x] {
                if label[y].is_none() {
                    label[y] = Some(count);
                    queue.push_back(y);
                }
            }
        }
        count += 1;
    }
    (label, count)
}

/// Splits the support into connected components of the quotient graph.
///
/// Components are ordered by their smallest node index; isolated nodes and
/// sub-threshold edges are dropped.
pub fn components<T: Real>(net: &PeriodicNetwork<T>) -> Vec<PeriodicNetwork<T>> {
    let tol = Tolerances::<T>::standard();
    let (label, count) = component_labels(net);
    let mut local = vec![usize::MAX; net.node_count()];
    let mut out: Vec<PeriodicNetwork<T>> = (0..count).map(|_| PeriodicNetwork::empty(net.dimension())).collect();
    for (i, l) in label.iter().enumerate() {
        if let Some(c) = *l {
            local[i] = out[c].push_node(net.nodes()[i].clone()).expect("same dimension");
        }
    }
    for e in net.support_edges(&tol) {
        let edge = &net.edges()[e];
        let c = label[edge.u].expect("support edge endpoints are labelled");
        out[c]
            .push_edge(Edge::new(local[edge.u], local[edge.v], edge.shift.clone(), edge.weight))
            .expect("edge copied from a valid network");
    }
    out
}

/// Homotopy classes carried by the closed paths of a network.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleLattice {
    /// One class per fundamental cycle (non-tree edge).
    pub generators: Vec<Vec<i64>>,
    pub rank: usize,
    /// Hermite normal form basis of the integer span.
    pub basis: Vec<Vec<i64>>,
}

impl CycleLattice {
    fn from_generators(generators: Vec<Vec<i64>>, n: usize) -> Self {
        let basis = hermite_normal_form(&generators, n);
        Self {
            rank: basis.len(),
            generators,
            basis,
        }
    }

    pub fn contains(&self, v: &[i64]) -> bool {
        in_lattice(&self.basis, v)
    }
}

/// Generators from a BFS spanning forest: the class of the fundamental cycle
/// of each non-tree edge `e = (u, v, z)` is `o(u) + z - o(v)`, where `o` is the
/// accumulated shift along tree paths from the component root.
pub fn cycle_lattice<T: Real>(net: &PeriodicNetwork<T>) -> CycleLattice {
    let generators = component_generators(net).into_iter().flatten().collect();
    CycleLattice::from_generators(generators, net.dimension())
}

fn component_generators<T: Real>(net: &PeriodicNetwork<T>) -> Vec<Vec<Vec<i64>>> {
    let tol = Tolerances::<T>::standard();
    let n = net.dimension();
    let (label, count) = component_labels(net);
    let support = net.support_edges(&tol);
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); net.node_count()];
    for &e in &support {
        let edge = &net.edges()[e];
        incident[edge.u].push(e);
        if edge.v != edge.u {
            incident[edge.v].push(e);
        }
    }
    let mut offset: Vec<Option<Vec<i64>>> = vec![None; net.node_count()];
    let mut tree = vec![false; net.edge_count()];
    for start in 0..net.node_count() {
        if label[start].is_none() || offset[start].is_some() {
            continue;
        }
        offset[start] = Some(vec![0; n]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            let ox = offset[x].clone().unwrap();
            for &e in &incident[x] {
                let edge = &net.edges()[e];
                let (y, oy) = if edge.u == x {
                    (edge.v, ox.iter().zip(&edge.shift).map(|(a, z)| a + z).collect::<Vec<_>>())
                } else {
                    (edge.u, ox.iter().zip(&edge.shift).map(|(a, z)| a - z).collect::<Vec<_>>())
                };
                if offset[y].is_none() {
                    offset[y] = Some(oy);
                    tree[e] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    let mut per: Vec<Vec<Vec<i64>>> = vec![Vec::new(); count];
    for &e in &support {
        if tree[e] {
            continue;
        }
        let edge = &net.edges()[e];
        let ou = offset[edge.u].as_ref().unwrap();
        let ov = offset[edge.v].as_ref().unwrap();
        let g = (0..n).map(|i| ou[i] + edge.shift[i] - ov[i]).collect();
        per[label[edge.u].unwrap()].push(g);
    }
    per
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeKind {
    /// No closed path winds around the torus.
    Trivial,
    /// Rank one, with primitive direction `q`.
    QuasiLaminate { direction: Vec<i64> },
    /// Rank `n`.
    Loopy,
    /// Rank strictly between 1 and `n`.
    Intermediate { rank: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Classification<T> {
    pub kind: LatticeKind,
    pub lattice: CycleLattice,
    pub per_component: Vec<(usize, CycleLattice)>,
    /// Orthonormal basis of the complement of the real span of the lattice;
    /// the kernel of the effective tensor must equal it.
    pub predicted_kernel: Vec<Vec<T>>,
    /// Some single component is loopy.
    pub reticulate: bool,
}

pub fn classify<T: Real>(net: &PeriodicNetwork<T>) -> Classification<T> {
    let n = net.dimension();
    let per = component_generators(net);
    let per_component: Vec<(usize, CycleLattice)> = per
        .iter()
        .enumerate()
        .map(|(c, g)| (c, CycleLattice::from_generators(g.clone(), n)))
        .collect();
    let lattice = CycleLattice::from_generators(per.into_iter().flatten().collect(), n);
    let kind = match lattice.rank {
        0 => LatticeKind::Trivial,
        1 => LatticeKind::QuasiLaminate {
            direction: primitive(&lattice.basis[0]),
        },
        r if r == n => LatticeKind::Loopy,
        r => LatticeKind::Intermediate { rank: r },
    };
    let span: Vec<Vec<T>> = lattice
        .basis
        .iter()
        .map(|b| b.iter().map(|&x| T::from_i64(x).unwrap()).collect())
        .collect();
    let predicted_kernel = orthogonal_complement(&span, n);
    let reticulate = per_component.iter().any(|(_, l)| l.rank == n);
    Classification {
        kind,
        lattice,
        per_component,
        predicted_kernel,
        reticulate,
    }
}
