use std::collections::VecDeque;

use super::balance::node_residuals;
use crate::error::{Error, Result};
use crate::network::PeriodicNetwork;
use crate::scalar::{Real, Tolerances};

pub const DEFAULT_EDGE_BUDGET: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum IrreducibilityVerdict {
    Irreducible,
    /// Two proper balanced edge subsets whose union is every edge.
    Reducible { first: Vec<usize>, second: Vec<usize> },
    Unknown,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IrreducibilityReport {
    pub verdict: IrreducibilityVerdict,
    /// Partial assignments visited by the search.
    pub checked_subsets: u64,
}

/// Decides whether a stationary network splits into two stationary
/// sub-networks (edge subsets with their weights, sharing nodes allowed).
///
/// Balance is linear in the weights, so the complement of a balanced subset
/// of a balanced network is balanced too: the network is reducible exactly
/// when some proper nonempty edge subset is balanced. The search enumerates
/// subsets edge by edge in breadth-first order and rejects a branch as soon
/// as a node whose incident edges are all decided fails to balance.
pub fn irreducible<T: Real>(net: &PeriodicNetwork<T>, budget_edges: usize) -> Result<IrreducibilityReport> {
    let tol = Tolerances::<T>::standard();
    let residuals = node_residuals(net, &tol);
    let max_weight = net.edges().iter().fold(T::zero(), |m, e| m.max(e.weight));
    let thr = tol.balance * max_weight;
    let worst = residuals
        .iter()
        .map(|r| crate::linalg::norm(r))
        .fold(T::zero(), T::max);
    if worst > thr {
        return Err(Error::NotStationary(worst.as_f64()));
    }
    let edges = net.support_edges(&tol);
    if edges.len() > budget_edges {
        return Ok(IrreducibilityReport {
            verdict: IrreducibilityVerdict::Unknown,
            checked_subsets: 0,
        });
    }
    if edges.len() < 2 {
        return Ok(IrreducibilityReport {
            verdict: IrreducibilityVerdict::Irreducible,
            checked_subsets: 0,
        });
    }

    let order = bfs_edge_order(net, &edges);
    let n = net.dimension();
    // Node closes after the last incident edge in the order.
    let mut closes_at: Vec<Vec<usize>> = vec![Vec::new(); order.len()];
    let mut last = vec![None; net.node_count()];
    for (pos, &e) in order.iter().enumerate() {
        last[net.edges()[e].u] = Some(pos);
        last[net.edges()[e].v] = Some(pos);
    }
    for (node, l) in last.iter().enumerate() {
        if let Some(pos) = *l {
            closes_at[pos].push(node);
        }
    }
    let contributions: Vec<(usize, usize, Vec<T>)> = order
        .iter()
        .map(|&e| {
            let edge = &net.edges()[e];
            let t = net.tangent(e);
            (edge.u, edge.v, t.iter().map(|&x| x * edge.weight).collect())
        })
        .collect();

    let mut search = Search {
        n,
        thr,
        closes_at,
        contributions,
        partial: vec![vec![T::zero(); n]; net.node_count()],
        chosen: vec![false; order.len()],
        visited: 0,
        found: None,
    };
    search.descend(0);
    let verdict = match search.found {
        Some(mask) => {
            let first: Vec<usize> = (0..order.len()).filter(|&i| mask[i]).map(|i| order[i]).collect();
            let second: Vec<usize> = (0..order.len()).filter(|&i| !mask[i]).map(|i| order[i]).collect();
            let (mut first, mut second) = (first, second);
            first.sort_unstable();
            second.sort_unstable();
            IrreducibilityVerdict::Reducible { first, second }
        }
        None => IrreducibilityVerdict::Irreducible,
    };
    Ok(IrreducibilityReport {
        verdict,
        checked_subsets: search.visited,
    })
}

fn bfs_edge_order<T: Real>(net: &PeriodicNetwork<T>, edges: &[usize]) -> Vec<usize> {
    let mut incident: Vec<Vec<usize>> = vec![Vec::new(); net.node_count()];
    for &e in edges {
        incident[net.edges()[e].u].push(e);
        if net.edges()[e].v != net.edges()[e].u {
            incident[net.edges()[e].v].push(e);
        }
    }
    let mut seen_edge = vec![false; net.edge_count()];
    let mut seen_node = vec![false; net.node_count()];
    let mut order = Vec::with_capacity(edges.len());
    for &start_edge in edges {
        let start = net.edges()[start_edge].u;
        if seen_node[start] {
            continue;
        }
        seen_node[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &e in &incident[x] {
                if !seen_edge[e] {
                    seen_edge[e] = true;
                    order.push(e);
                }
                for y in [net.edges()[e].u, net.edges()[e].v] {
                    if !seen_node[y] {
                        seen_node[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
    }
    order
}

struct Search<T> {
    n: usize,
    thr: T,
    closes_at: Vec<Vec<usize>>,
    contributions: Vec<(usize, usize, Vec<T>)>,
    partial: Vec<Vec<T>>,
    chosen: Vec<bool>,
    visited: u64,
    found: Option<Vec<bool>>,
}

impl<T: Real> Search<T> {
    fn closed_nodes_balance(&self, pos: usize) -> bool {
        self.closes_at[pos].iter().all(|&node| {
            let r = &self.partial[node];
            r.iter().map(|&x| x * x).sum::<T>().sqrt() <= self.thr
        })
    }

    fn apply(&mut self, pos: usize, sign: T) {
        let (u, v, ref f) = self.contributions[pos];
        for c in 0..self.n {
            let x = f[c] * sign;
            self.partial[u][c] += x;
            self.partial[v][c] -= x;
        }
    }

    fn descend(&mut self, pos: usize) {
        if self.found.is_some() {
            return;
        }
        self.visited += 1;
        if pos == self.chosen.len() {
            let count = self.chosen.iter().filter(|&&c| c).count();
            if count > 0 && count < self.chosen.len() {
                self.found = Some(self.chosen.clone());
            }
            return;
        }
        for take in [false, true] {
            if take {
                self.apply(pos, T::one());
                self.chosen[pos] = true;
            }
            if self.closed_nodes_balance(pos) {
                self.descend(pos + 1);
            }
            if take {
                self.apply(pos, -T::one());
                self.chosen[pos] = false;
            }
            if self.found.is_some() {
                return;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::valency;
    use crate::fixtures;

    #[test]
    fn square_grid_splits_into_its_loops() {
        let r = irreducible(&fixtures::square_grid::<f64>(1.0), DEFAULT_EDGE_BUDGET).unwrap();
        match r.verdict {
            IrreducibilityVerdict::Reducible { first, second } => {
                let mut all = [first, second].concat();
                all.sort_unstable();
                assert_eq!(all, vec![0, 1]);
            }
            v => panic!("unexpected {v:?}"),
        }
    }

    #[test]
    fn honeycomb_is_irreducible() {
        let r = irreducible(&fixtures::honeycomb::<f64>(1.0), DEFAULT_EDGE_BUDGET).unwrap();
        assert_eq!(r.verdict, IrreducibilityVerdict::Irreducible);
        assert!(r.checked_subsets > 0);
    }

    #[test]
    fn diamond_chain_is_irreducible_with_valency_four() {
        let net = fixtures::diamond_chain::<f64>(7);
        let r = irreducible(&net, 64).unwrap();
        assert_eq!(r.verdict, IrreducibilityVerdict::Irreducible);
        assert_eq!(valency(&net).max, 4);
    }

    #[test]
    fn budget_and_stationarity_guards() {
        let net = fixtures::diamond_chain::<f64>(7);
        assert_eq!(irreducible(&net, 16).unwrap().verdict, IrreducibilityVerdict::Unknown);
        assert!(matches!(
            irreducible(&fixtures::t_junction::<f64>(), 16),
            Err(Error::NotStationary(_))
        ));
    }
}
