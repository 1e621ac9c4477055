//! Periodic straight-edge networks on the flat torus `R^n / Z^n` and the
//! conductive media they carry.

use crate::error::{Error, Result};
use crate::scalar::{Real, Tolerances};

/// A point of the unit torus, stored by its representative in `[0, 1)^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusPoint<T> {
    coords: Vec<T>,
}

/// Reduces `x` into `[0, 1)`.
#[inline]
pub fn wrap_unit<T: Real>(x: T) -> T {
    let r = x - x.floor();
    if r >= T::one() {
        T::zero()
    } else {
        r
    }
}

impl<T: Real> TorusPoint<T> {
    pub fn new(coords: Vec<T>) -> Self {
        Self {
            coords: coords.into_iter().map(wrap_unit).collect(),
        }
    }

    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Displacement from `self` to the nearest lift of `other`.
    pub fn nearest_offset(&self, other: &Self) -> Vec<T> {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(&a, &b)| {
                let d = b - a;
                d - d.round()
            })
            .collect()
    }

    pub fn distance(&self, other: &Self) -> T {
        crate::linalg::norm(&self.nearest_offset(other))
    }
}

/// Straight edge from node `u` to the lift `x_v + shift` of node `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    pub u: usize,
    pub v: usize,
    pub shift: Vec<i64>,
    pub weight: T,
}

impl<T> Edge<T> {
    pub fn new(u: usize, v: usize, shift: Vec<i64>, weight: T) -> Self {
        Self { u, v, shift, weight }
    }

    pub fn is_loop(&self) -> bool {
        self.u == self.v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodicNetwork<T> {
    dimension: usize,
    nodes: Vec<TorusPoint<T>>,
    edges: Vec<Edge<T>>,
}

impl<T: Real> PeriodicNetwork<T> {
    pub fn empty(dimension: usize) -> Self {
        Self {
            dimension,
            nodes: Vec::new(),
            edges: Vec::new(),
        }
    }

    pub fn new(dimension: usize, nodes: Vec<TorusPoint<T>>, edges: Vec<Edge<T>>) -> Result<Self> {
        let mut net = Self::empty(dimension);
        if dimension == 0 {
            return Err(Error::InvalidNetwork("dimension must be at least 1".into()));
        }
        for p in nodes {
            net.push_node(p)?;
        }
        for e in edges {
            net.push_edge(e)?;
        }
        Ok(net)
    }

    /// Convenience constructor from raw coordinates and `(u, v, shift, weight)` tuples.
    pub fn from_parts(
        dimension: usize,
        nodes: &[&[f64]],
        edges: &[(usize, usize, &[i64], f64)],
    ) -> Result<Self> {
        let nodes = nodes
            .iter()
            .map(|c| TorusPoint::new(c.iter().map(|&x| T::lit(x)).collect()))
            .collect();
        let edges = edges
            .iter()
            .map(|&(u, v, z, a)| Edge::new(u, v, z.to_vec(), T::lit(a)))
            .collect();
        Self::new(dimension, nodes, edges)
    }

    pub fn push_node(&mut self, p: TorusPoint<T>) -> Result<usize> {
        if p.dim() != self.dimension {
            return Err(Error::InvalidNetwork(format!(
                "node {} has {} coordinates, expected {}",
                self.nodes.len(),
                p.dim(),
                self.dimension
            )));
        }
        if p.coords().iter().any(|x| !x.is_finite()) {
            return Err(Error::InvalidNetwork(format!(
                "node {} has a non-finite coordinate",
                self.nodes.len()
            )));
        }
        self.nodes.push(p);
        Ok(self.nodes.len() - 1)
    }

    pub fn push_edge(&mut self, e: Edge<T>) -> Result<usize> {
        let idx = self.edges.len();
        let bad = |msg: String| Err(Error::InvalidNetwork(format!("edge {idx}: {msg}")));
        if e.u >= self.nodes.len() || e.v >= self.nodes.len() {
            return bad(format!(
                "node index out of range ({}, {}) with {} nodes",
                e.u,
                e.v,
                self.nodes.len()
            ));
        }
        if e.shift.len() != self.dimension {
            return bad(format!("shift has {} components, expected {}", e.shift.len(), self.dimension));
        }
        if !e.weight.is_finite() || e.weight < T::zero() {
            return bad(format!("weight {} must be finite and nonnegative", e.weight));
        }
        self.edges.push(e);
        if self.length(idx) <= T::zero() {
            self.edges.pop();
            return bad("zero-length edge".into());
        }
        Ok(idx)
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nodes(&self) -> &[TorusPoint<T>] {
        &self.nodes
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Lifted displacement `x_v + z - x_u`.
    pub fn displacement(&self, e: usize) -> Vec<T> {
        let edge = &self.edges[e];
        let xu = self.nodes[edge.u].coords();
        let xv = self.nodes[edge.v].coords();
        (0..self.dimension)
            .map(|i| xv[i] + T::from_i64(edge.shift[i]).unwrap() - xu[i])
            .collect()
    }

    pub fn length(&self, e: usize) -> T {
        crate::linalg::norm(&self.displacement(e))
    }

    /// Unit tangent pointing from `u` to `v`.
    pub fn tangent(&self, e: usize) -> Vec<T> {
        let d = self.displacement(e);
        let l = crate::linalg::norm(&d);
        d.into_iter().map(|x| x / l).collect()
    }

    pub fn in_support(&self, e: usize, tol: &Tolerances<T>) -> bool {
        self.edges[e].weight >= tol.support
    }

    /// Indices of edges whose weight reaches the support threshold.
    pub fn support_edges(&self, tol: &Tolerances<T>) -> Vec<usize> {
        (0..self.edges.len()).filter(|&e| self.in_support(e, tol)).collect()
    }

    pub fn total_length(&self) -> T {
        (0..self.edges.len()).map(|e| self.length(e)).sum()
    }

    /// `sum a_e l_e` over all edges.
    pub fn total_mass(&self) -> T {
        (0..self.edges.len())
            .map(|e| self.edges[e].weight * self.length(e))
            .sum()
    }

    pub fn set_weight(&mut self, e: usize, w: T) {
        assert!(w.is_finite() && w >= T::zero(), "weight must be finite and nonnegative");
        self.edges[e].weight = w;
    }

    pub fn with_weights(&self, weights: &[T]) -> Self {
        assert_eq!(weights.len(), self.edges.len());
        let mut out = self.clone();
        for (e, &w) in weights.iter().enumerate() {
            out.set_weight(e, w);
        }
        out
    }

    pub fn weights(&self) -> Vec<T> {
        self.edges.iter().map(|e| e.weight).collect()
    }

    /// Disjoint union; node and edge indices of `other` are offset.
    pub fn disjoint_union(&self, other: &Self) -> Self {
        assert_eq!(self.dimension, other.dimension);
        let mut out = self.clone();
        let off = self.nodes.len();
        out.nodes.extend(other.nodes.iter().cloned());
        out.edges.extend(other.edges.iter().map(|e| Edge {
            u: e.u + off,
            v: e.v + off,
            shift: e.shift.clone(),
            weight: e.weight,
        }));
        out
    }

    pub fn convert<S: Real>(&self) -> PeriodicNetwork<S> {
        PeriodicNetwork {
            dimension: self.dimension,
            nodes: self
                .nodes
                .iter()
                .map(|p| TorusPoint::new(p.coords().iter().map(|x| S::lit(x.as_f64())).collect()))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|e| Edge::new(e.u, e.v, e.shift.clone(), S::lit(e.weight.as_f64())))
                .collect(),
        }
    }

    /// Rigid translation by `offset`; shifts are adjusted for nodes that wrap.
    pub fn translated(&self, offset: &[T]) -> Self {
        assert_eq!(offset.len(), self.dimension);
        let mut cells = Vec::with_capacity(self.nodes.len());
        let nodes = self
            .nodes
            .iter()
            .map(|p| {
                let raw: Vec<T> = p.coords().iter().zip(offset).map(|(x, o)| *x + *o).collect();
                let wrapped = TorusPoint::new(raw.clone());
                cells.push(
                    raw.iter()
                        .zip(wrapped.coords())
                        .map(|(r, w)| (*r - *w).round().to_i64().unwrap())
                        .collect::<Vec<i64>>(),
                );
                wrapped
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let shift = (0..self.dimension)
                    .map(|c| e.shift[c] + cells[e.v][c] - cells[e.u][c])
                    .collect();
                Edge::new(e.u, e.v, shift, e.weight)
            })
            .collect();
        Self {
            dimension: self.dimension,
            nodes,
            edges,
        }
    }

    /// Drops edges below the support threshold and nodes without incident edges.
    pub fn support_network(&self, tol: &Tolerances<T>) -> Self {
        let keep = self.support_edges(tol);
        let mut map = vec![usize::MAX; self.nodes.len()];
        let mut out = Self::empty(self.dimension);
        for &e in &keep {
            for n in [self.edges[e].u, self.edges[e].v] {
                if map[n] == usize::MAX {
                    map[n] = out.nodes.len();
                    out.nodes.push(self.nodes[n].clone());
                }
            }
        }
        for &e in &keep {
            let edge = &self.edges[e];
            out.edges.push(Edge::new(map[edge.u], map[edge.v], edge.shift.clone(), edge.weight));
        }
        out
    }
}

/// How the conductance matrix is distributed along each edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Anisotropy {
    /// `d theta = I a dH^1`.
    Isotropic,
    /// `d theta = (T (x) T) a dH^1`.
    Tangential,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkMedium<T> {
    pub network: PeriodicNetwork<T>,
    pub mode: Anisotropy,
}

impl<T: Real> NetworkMedium<T> {
    pub fn new(network: PeriodicNetwork<T>, mode: Anisotropy) -> Self {
        Self { network, mode }
    }

    pub fn tangential(network: PeriodicNetwork<T>) -> Self {
        Self::new(network, Anisotropy::Tangential)
    }

    pub fn isotropic(network: PeriodicNetwork<T>) -> Self {
        Self::new(network, Anisotropy::Isotropic)
    }

    pub fn dimension(&self) -> usize {
        self.network.dimension()
    }

    /// Trace of the per-edge matrix density: `n` when isotropic, 1 when tangential.
    pub fn trace_factor(&self) -> T {
        match self.mode {
            Anisotropy::Isotropic => T::from_usize(self.dimension()).unwrap(),
            Anisotropy::Tangential => T::one(),
        }
    }
}
