//! Canonical networks on the 2-torus used by tests, examples and the CLI.

use rand::Rng;

use crate::error::Result;
use crate::network::{Edge, PeriodicNetwork, TorusPoint};
use crate::scalar::Real;
use crate::topology::planarize;

fn build<T: Real>(nodes: Vec<[f64; 2]>, edges: Vec<(usize, usize, [i64; 2], f64)>) -> PeriodicNetwork<T> {
    PeriodicNetwork::new(
        2,
        nodes
            .into_iter()
            .map(|p| TorusPoint::new(vec![T::lit(p[0]), T::lit(p[1])]))
            .collect(),
        edges
            .into_iter()
            .map(|(u, v, z, a)| Edge::new(u, v, z.to_vec(), T::lit(a)))
            .collect(),
    )
    .expect("fixture is valid")
}

/// Horizontal closed geodesic through the origin.
pub fn axis_loop<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    build(vec![[0.0, 0.0]], vec![(0, 0, [1, 0], weight)])
}

/// One node with horizontal and vertical self-loops.
pub fn square_grid<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    build(vec![[0.0, 0.0]], vec![(0, 0, [1, 0], weight), (0, 0, [0, 1], weight)])
}

/// Closed geodesic of homotopy class (1, 1).
pub fn diagonal_loop<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    build(vec![[0.0, 0.0]], vec![(0, 0, [1, 1], weight)])
}

/// Segment from the origin to (1/2, 0); carries no cycle.
pub fn open_segment<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    build(vec![[0.0, 0.0], [0.5, 0.0]], vec![(0, 1, [0, 0], weight)])
}

/// Horizontal loops at heights 0 and 1/2.
pub fn parallel_loops<T: Real>(w0: f64, w1: f64) -> PeriodicNetwork<T> {
    build(
        vec![[0.0, 0.0], [0.0, 0.5]],
        vec![(0, 0, [1, 0], w0), (1, 1, [1, 0], w1)],
    )
}

/// The loop `x2 = 1/2` and the loop `x1 = 1/4`, authored without their crossing.
pub fn crossing_loops<T: Real>() -> PeriodicNetwork<T> {
    build(
        vec![[0.0, 0.5], [0.25, 0.0]],
        vec![(0, 0, [1, 0], 1.0), (1, 1, [0, 1], 1.0)],
    )
}

/// Horizontal coordinate of the second honeycomb node, `(3 - sqrt 3) / 6`.
///
/// With nodes at the origin and at `(b, b)` joined by edges with shifts
/// `(0,0)`, `(-1,0)` and `(0,-1)`, the three edges meet at 120 degrees.
pub fn honeycomb_offset() -> f64 {
    (3.0 - 3f64.sqrt()) / 6.0
}

/// Two-node, three-edge honeycomb on the square torus with the given weights.
pub fn honeycomb_weighted<T: Real>(weights: [f64; 3]) -> PeriodicNetwork<T> {
    let b = honeycomb_offset();
    build(
        vec![[0.0, 0.0], [b, b]],
        vec![
            (0, 1, [0, 0], weights[0]),
            (0, 1, [-1, 0], weights[1]),
            (0, 1, [0, -1], weights[2]),
        ],
    )
}

/// Equal-weight honeycomb; stationary.
pub fn honeycomb<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    honeycomb_weighted([weight; 3])
}

/// Honeycomb with weights (1, 2, 3), translated by (0.3, 0.1) so that window
/// boundaries at integer coordinates cut through its edges.
pub fn skewed_honeycomb<T: Real>() -> PeriodicNetwork<T> {
    honeycomb_weighted::<T>([1.0, 2.0, 3.0]).translated(&[T::lit(0.3), T::lit(0.1)])
}

/// Horizontal loop at height 1/2 with a dead-end stem of length 1/4 rising
/// from `(0, 1/2)` to `(0, 3/4)`.
pub fn t_junction<T: Real>() -> PeriodicNetwork<T> {
    build(
        vec![[0.0, 0.5], [0.0, 0.75]],
        vec![(0, 0, [1, 0], 1.0), (0, 1, [0, 0], 1.0)],
    )
}

/// Axis loop whose first piece `[0, delta]` has weight 0.
///
/// For `delta > 0` the support is an open arc; `delta == 0` returns the plain
/// axis loop.
pub fn gap_family<T: Real>(weight: f64, delta: f64) -> PeriodicNetwork<T> {
    if delta == 0.0 {
        return axis_loop(weight);
    }
    build(
        vec![[0.0, 0.0], [delta, 0.0]],
        vec![(0, 1, [0, 0], 0.0), (1, 0, [1, 0], weight)],
    )
}

/// `k` diamonds (rhombi with angles pi/3 and 2 pi/3) chained along `x2 = 1/2`,
/// each threaded by a vertical loop through its obtuse corners.
///
/// Shared acute corners have valency 4 (two straight crossings), obtuse
/// corners are 120-degree triple junctions; unit weights balance every node.
pub fn diamond_chain<T: Real>(k: usize) -> PeriodicNetwork<T> {
    assert!(k >= 1);
    let kf = k as f64;
    let side = 1.0 / (kf * 3f64.sqrt());
    let mut nodes = Vec::with_capacity(3 * k);
    for i in 0..k {
        let x = i as f64 / kf;
        let xm = (i as f64 + 0.5) / kf;
        nodes.push([x, 0.5]);
        nodes.push([xm, 0.5 + side / 2.0]);
        nodes.push([xm, 0.5 - side / 2.0]);
    }
    let acute = |i: usize| 3 * (i % k);
    let top = |i: usize| 3 * i + 1;
    let bottom = |i: usize| 3 * i + 2;
    let mut edges = Vec::with_capacity(5 * k);
    for i in 0..k {
        let wrap = if i + 1 == k { 1 } else { 0 };
        edges.push((acute(i), top(i), [0, 0], 1.0));
        edges.push((acute(i), bottom(i), [0, 0], 1.0));
        edges.push((top(i), acute(i + 1), [wrap, 0], 1.0));
        edges.push((bottom(i), acute(i + 1), [wrap, 0], 1.0));
        edges.push((top(i), bottom(i), [0, 1], 1.0));
    }
    build(nodes, edges)
}

/// Periodic `m x m` grid with right, up and up-right diagonal edges.
pub fn triangulated_grid<T: Real>(m: usize, weight: f64) -> PeriodicNetwork<T> {
    let h = 1.0 / m as f64;
    let id = |i: usize, j: usize| (i % m) * m + (j % m);
    let mut nodes = Vec::with_capacity(m * m);
    for i in 0..m {
        for j in 0..m {
            nodes.push([i as f64 * h, j as f64 * h]);
        }
    }
    let mut edges = Vec::with_capacity(3 * m * m);
    for i in 0..m {
        for j in 0..m {
            let zi = i64::from(i + 1 == m);
            let zj = i64::from(j + 1 == m);
            edges.push((id(i, j), id(i + 1, j), [zi, 0], weight));
            edges.push((id(i, j), id(i, j + 1), [0, zj], weight));
            edges.push((id(i, j), id(i + 1, j + 1), [zi, zj], weight));
        }
    }
    build(nodes, edges)
}

/// Closed geodesics through the origin of classes (1, 1) and (1, -1); they
/// also cross at (1/2, 1/2), so planarize before topological use.
pub fn diagonal_grid<T: Real>(weight: f64) -> PeriodicNetwork<T> {
    build(
        vec![[0.0, 0.0]],
        vec![(0, 0, [1, 1], weight), (0, 0, [1, -1], weight)],
    )
}

/// `‖θ‖(B_r((x0, y)))` for the medium `dθ = μ(dx) dy`, with `μ` the middle-thirds
/// Cantor measure on `[0, 1)`: a strip of vertical lines, not a network.
///
/// Evaluated by recursive refinement until the Cantor intervals are shorter
/// than `r * 1e-7`, then by the midpoint rule; `r < 1/2`.
pub fn cantor_strip_ball_mass(x0: f64, r: f64) -> f64 {
    fn go(a: f64, len: f64, w: f64, x0: f64, r: f64) -> f64 {
        if a > x0 + r || a + len < x0 - r {
            return 0.0;
        }
        if len < r * 1e-7 {
            let d = a + len / 2.0 - x0;
            return w * 2.0 * (r * r - d * d).max(0.0).sqrt();
        }
        let t = len / 3.0;
        go(a, t, w / 2.0, x0, r) + go(a + 2.0 * t, t, w / 2.0, x0, r)
    }
    (-1..=1).map(|k| go(k as f64, 1.0, 1.0, x0, r)).sum()
}

/// Random graph on the 2-torus with `nodes` uniform points and `edges` edges
/// between uniform endpoints, weights uniform in `weights`.
///
/// Each edge crosses the unit cell with probability `wrap`, its shift then
/// being uniform in `{-1, 0, 1}^2`; edges of zero length are redrawn.
pub fn random_network<T: Real, R: Rng + ?Sized>(
    rng: &mut R,
    nodes: usize,
    edges: usize,
    weights: (f64, f64),
    wrap: f64,
) -> PeriodicNetwork<T> {
    let pts: Vec<[f64; 2]> = (0..nodes).map(|_| [rng.gen(), rng.gen()]).collect();
    let mut list = Vec::with_capacity(edges);
    while list.len() < edges {
        let u = rng.gen_range(0..nodes);
        let v = rng.gen_range(0..nodes);
        let z = if rng.gen_bool(wrap) {
            [rng.gen_range(-1..=1), rng.gen_range(-1..=1)]
        } else {
            [0, 0]
        };
        if u == v && z == [0, 0] {
            continue;
        }
        list.push((u, v, z, rng.gen_range(weights.0..=weights.1)));
    }
    build(pts, list)
}

/// Primitive directions used by [`random_geodesics`].
pub const GEODESIC_DIRECTIONS: [[i64; 2]; 6] = [[1, 0], [0, 1], [1, 1], [1, -1], [2, 1], [1, 2]];

/// Planarized union of `count` closed geodesics with random directions from
/// [`GEODESIC_DIRECTIONS`] through random points, all of unit weight.
pub fn random_geodesics<T: Real, R: Rng + ?Sized>(rng: &mut R, count: usize) -> Result<PeriodicNetwork<T>> {
    let mut pts = Vec::with_capacity(count);
    let mut list = Vec::with_capacity(count);
    for i in 0..count {
        pts.push([rng.gen(), rng.gen()]);
        let dir = GEODESIC_DIRECTIONS[rng.gen_range(0..GEODESIC_DIRECTIONS.len())];
        list.push((i, i, dir, 1.0));
    }
    planarize(&build::<T>(pts, list), T::lit(1e-9))
}
