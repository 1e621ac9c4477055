//! Mesoscopic tensors of the periodic extension on growing windows.
//!
//! For a half-width `R` the network is tiled over the translates
//! `{-R, .., R-1}^n` and restricted to the window `[-R, R)^n`. Nodes on the
//! window boundary and points where edges leave the window are pinned to the
//! affine datum `p . x`; the remaining potentials minimize the same edge
//! energy. The energy divided by `(2R)^n` is `p . Q_R p`.

use std::collections::HashMap;
use std::time::{Duration, Instant};

use rayon::prelude::*;

use super::cg::{conjugate_gradient, CgOptions, Laplacian};
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::network::{NetworkMedium, PeriodicNetwork};
use crate::scalar::{Real, Tolerances};

#[derive(Debug, Clone)]
pub struct WindowResult<T> {
    pub r: usize,
    pub q: SymMatrix<T>,
    pub node_count: usize,
    pub solve_time: Duration,
}

#[derive(Debug, Clone)]
pub struct HomogenizationTrace<T> {
    /// Sorted by increasing `r`.
    pub windows: Vec<WindowResult<T>>,
}

/// Default cap on the number of window nodes.
pub const DEFAULT_NODE_BUDGET: usize = 2_000_000;

pub fn homogenize_window<T: Real>(medium: &NetworkMedium<T>, radii: &[usize]) -> Result<HomogenizationTrace<T>> {
    homogenize_window_with(medium, radii, DEFAULT_NODE_BUDGET)
}

pub fn homogenize_window_with<T: Real>(
    medium: &NetworkMedium<T>,
    radii: &[usize],
    node_budget: usize,
) -> Result<HomogenizationTrace<T>> {
    if let Some(&bad) = radii.iter().find(|&&r| r == 0) {
        return Err(Error::InvalidArgument(format!("window half-width must be >= 1, got {bad}")));
    }
    let mut sorted = radii.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let windows = sorted
        .par_iter()
        .map(|&r| solve_window(&medium.network, r, node_budget))
        .collect::<Result<Vec<_>>>()?;
    Ok(HomogenizationTrace { windows })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum PointKey {
    /// Node index and its tile.
    Lattice(usize, [i64; 4]),
    /// Cut point of a lifted edge: edge, tile, which end.
    Cut(usize, [i64; 4], bool),
}

struct Window<T> {
    positions: Vec<Vec<T>>,
    pinned: Vec<bool>,
    pieces: Vec<(usize, usize, T)>,
}

fn tile_key(k: &[i64]) -> [i64; 4] {
    let mut out = [0i64; 4];
    out[..k.len()].copy_from_slice(k);
    out
}

fn build_window<T: Real>(net: &PeriodicNetwork<T>, r: usize, budget: usize) -> Result<Window<T>> {
    let n = net.dimension();
    assert!(n <= 4, "windowed homogenization supports n <= 4");
    let tol = Tolerances::<T>::standard();
    let rr = T::from_usize(r).unwrap();
    let ri = r as i64;
    let eps = tol.geom;
    let tiles_per_axis = 2 * r as u128;
    let estimate = tiles_per_axis.pow(n as u32) * net.node_count() as u128;
    if estimate > budget as u128 {
        return Err(Error::BudgetExceeded {
            r,
            nodes: usize::try_from(estimate).unwrap_or(usize::MAX),
            budget,
        });
    }

    let mut pts = Points::<T>::default();
    let mut pieces = Vec::new();
    let on_boundary = |x: &[T]| x.iter().any(|&c| (c + rr).abs() <= eps || (c - rr).abs() <= eps);

    for e in net.support_edges(&tol) {
        let edge = &net.edges()[e];
        let d = net.displacement(e);
        let len = net.length(e);
        let xu = net.nodes()[edge.u].coords();
        // Tiles whose lift of e can reach the window.
        let reach: Vec<i64> = d.iter().map(|x| x.abs().ceil().to_i64().unwrap() + 1).collect();
        let ranges: Vec<(i64, i64)> = (0..n).map(|c| (-ri - reach[c], ri - 1 + reach[c])).collect();
        let mut k: Vec<i64> = ranges.iter().map(|r| r.0).collect();
        'tiles: loop {
            let start: Vec<T> = (0..n).map(|c| xu[c] + T::from_i64(k[c]).unwrap()).collect();
            if let Some((t0, t1)) = clip(&start, &d, rr) {
                let a: Vec<T> = (0..n).map(|c| start[c] + t0 * d[c]).collect();
                let b: Vec<T> = (0..n).map(|c| start[c] + t1 * d[c]).collect();
                let upper_face = (0..n).any(|c| (a[c] - rr).abs() <= eps && (b[c] - rr).abs() <= eps);
                if (t1 - t0) * len > eps && !upper_face {
                    let ia = if t0 == T::zero() {
                        let pin = on_boundary(&a);
                        pts.intern(PointKey::Lattice(edge.u, tile_key(&k)), a, pin)
                    } else {
                        pts.intern(PointKey::Cut(e, tile_key(&k), false), a, true)
                    };
                    let ib = if t1 == T::one() {
                        let kv: Vec<i64> = (0..n).map(|c| k[c] + edge.shift[c]).collect();
                        let pin = on_boundary(&b);
                        pts.intern(PointKey::Lattice(edge.v, tile_key(&kv)), b, pin)
                    } else {
                        pts.intern(PointKey::Cut(e, tile_key(&k), true), b, true)
                    };
                    pieces.push((ia, ib, edge.weight / (len * (t1 - t0))));
                    if pts.positions.len() > budget {
                        return Err(Error::BudgetExceeded {
                            r,
                            nodes: pts.positions.len(),
                            budget,
                        });
                    }
                }
            }
            let mut c = 0;
            loop {
                if c == n {
                    break 'tiles;
                }
                k[c] += 1;
                if k[c] <= ranges[c].1 {
                    break;
                }
                k[c] = ranges[c].0;
                c += 1;
            }
        }
    }
    Ok(Window {
        positions: pts.positions,
        pinned: pts.pinned,
        pieces,
    })
}

struct Points<T> {
    index: HashMap<PointKey, usize>,
    positions: Vec<Vec<T>>,
    pinned: Vec<bool>,
}

impl<T> Default for Points<T> {
    fn default() -> Self {
        Self {
            index: HashMap::new(),
            positions: Vec::new(),
            pinned: Vec::new(),
        }
    }
}

impl<T> Points<T> {
    fn intern(&mut self, key: PointKey, pos: Vec<T>, pin: bool) -> usize {
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.positions.push(pos);
        self.pinned.push(pin);
        let i = self.positions.len() - 1;
        self.index.insert(key, i);
        i
    }
}

/// Parameter interval of `start + t d`, `t in [0, 1]`, inside `[-r, r]^n`.
fn clip<T: Real>(start: &[T], d: &[T], r: T) -> Option<(T, T)> {
    let mut t0 = T::zero();
    let mut t1 = T::one();
    for c in 0..start.len() {
        if d[c] == T::zero() {
            if start[c] < -r || start[c] > r {
                return None;
            }
            continue;
        }
        let a = (-r - start[c]) / d[c];
        let b = (r - start[c]) / d[c];
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        t0 = t0.max(lo);
        t1 = t1.min(hi);
        if t0 >= t1 {
            return None;
        }
    }
    Some((t0, t1))
}

fn solve_window<T: Real>(net: &PeriodicNetwork<T>, r: usize, budget: usize) -> Result<WindowResult<T>> {
    let started = Instant::now();
    let n = net.dimension();
    let window = build_window(net, r, budget)?;
    let count = window.positions.len();
    let tol = Tolerances::<T>::standard();
    let lap = Laplacian::new(count, window.pieces.iter().copied());
    let free: Vec<bool> = window.pinned.iter().map(|p| !p).collect();
    let opts = CgOptions {
        rel_tol: tol.solve,
        max_iter: 20 * count.max(1),
    };
    let solves: Vec<Vec<T>> = (0..n)
        .into_par_iter()
        .map(|i| {
            // Affine datum everywhere: exact on pinned nodes, initial guess elsewhere.
            let u0: Vec<T> = window.positions.iter().map(|x| x[i]).collect();
            let mut b = vec![T::zero(); count];
            for &(a, bb, c) in &window.pieces {
                if free[a] && !free[bb] {
                    b[a] += c * u0[bb];
                }
                if free[bb] && !free[a] {
                    b[bb] += c * u0[a];
                }
            }
            conjugate_gradient(&lap, &b, Some(u0), None, Some(&free), &opts).map(|s| s.x)
        })
        .collect::<Result<_>>()?;
    let volume = T::from_usize(2 * r).unwrap().powi(n as i32);
    let grads: Vec<Vec<T>> = solves
        .iter()
        .map(|u| window.pieces.iter().map(|&(a, b, _)| u[b] - u[a]).collect())
        .collect();
    let q = SymMatrix::from_fn(n, |i, j| {
        window
            .pieces
            .iter()
            .enumerate()
            .map(|(k, &(_, _, c))| c * grads[i][k] * grads[j][k])
            .sum::<T>()
            / volume
    });
    Ok(WindowResult {
        r,
        q,
        node_count: count,
        solve_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cellsolver::effective_tensor;
    use crate::fixtures;

    #[test]
    fn square_grid_windows_are_exact() {
        let medium = NetworkMedium::tangential(fixtures::square_grid::<f64>(1.0));
        let trace = homogenize_window(&medium, &[4, 1, 2]).unwrap();
        let rs: Vec<usize> = trace.windows.iter().map(|w| w.r).collect();
        assert_eq!(rs, vec![1, 2, 4]);
        for w in &trace.windows {
            assert!((&w.q - &SymMatrix::identity(2)).frobenius_norm() <= 1e-12, "{:?}", w.q);
        }
    }

    #[test]
    fn empty_medium_gives_zero() {
        let medium = NetworkMedium::tangential(PeriodicNetwork::<f64>::empty(2));
        let trace = homogenize_window(&medium, &[1, 2]).unwrap();
        assert!(trace.windows.iter().all(|w| w.q.frobenius_norm() == 0.0));
    }

    #[test]
    fn stationary_honeycomb_is_exact_on_every_window() {
        let medium = NetworkMedium::tangential(fixtures::honeycomb::<f64>(1.0));
        let q = effective_tensor(&medium).unwrap().q;
        for w in homogenize_window(&medium, &[1, 3]).unwrap().windows {
            assert!((&w.q - &q).frobenius_norm() <= 1e-12);
        }
    }

    #[test]
    fn budget_is_enforced() {
        let medium = NetworkMedium::tangential(fixtures::square_grid::<f64>(1.0));
        let err = homogenize_window_with(&medium, &[50], 100).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded { r: 50, .. }));
    }
}
