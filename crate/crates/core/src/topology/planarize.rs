use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::network::{wrap_unit, Edge, PeriodicNetwork, TorusPoint};
use crate::scalar::{Real, Tolerances};

/// Inserts nodes at every crossing and touching point of the support on the
/// 2-torus, merges nodes closer than `eps`, and fuses overlapping collinear
/// pieces (their weights add).
///
/// Edges below the support threshold and nodes without support edges are
/// dropped. The output is canonical: nodes sorted lexicographically, edges
/// stored with `u <= v` and sorted by `(u, v, shift)`.
pub fn planarize<T: Real>(net: &PeriodicNetwork<T>, eps: T) -> Result<PeriodicNetwork<T>> {
    if net.dimension() != 2 {
        return Err(Error::DimensionUnsupported(net.dimension()));
    }
    let tol = Tolerances::<T>::standard();
    let support = net.support_edges(&tol);
    let segs: Vec<Segment<T>> = support
        .iter()
        .map(|&e| {
            let p = net.nodes()[net.edges()[e].u].coords();
            let d = net.displacement(e);
            Segment {
                p: [p[0], p[1]],
                d: [d[0], d[1]],
                weight: net.edges()[e].weight,
            }
        })
        .collect();

    let mut cuts: Vec<Vec<T>> = vec![vec![T::zero(), T::one()]; segs.len()];

    // Nodes touching edge interiors.
    let mut node_used = vec![false; net.node_count()];
    for &e in &support {
        node_used[net.edges()[e].u] = true;
        node_used[net.edges()[e].v] = true;
    }
    let support_nodes: Vec<[T; 2]> = (0..net.node_count())
        .filter(|&i| node_used[i])
        .map(|i| {
            let c = net.nodes()[i].coords();
            [c[0], c[1]]
        })
        .collect();
    for (i, s) in segs.iter().enumerate() {
        let (lo, hi) = s.bbox();
        for x in &support_nodes {
            for k in lift_range(lo, hi, *x, *x, eps) {
                let q = [x[0] + k[0], x[1] + k[1]];
                if let Some(t) = s.project_within(q, eps) {
                    cuts[i].push(t);
                }
            }
        }
    }

    // Transversal crossings against every lift.
    for i in 0..segs.len() {
        let (lo_i, hi_i) = segs[i].bbox();
        for j in i..segs.len() {
            let (lo_j, hi_j) = segs[j].bbox();
            for k in lift_range(lo_i, hi_i, lo_j, hi_j, eps) {
                if i == j && k == [T::zero(), T::zero()] {
                    continue;
                }
                let other = Segment {
                    p: [segs[j].p[0] + k[0], segs[j].p[1] + k[1]],
                    ..segs[j]
                };
                if let Some((s, t)) = segs[i].crossing(&other, eps) {
                    cuts[i].push(s);
                    cuts[j].push(t);
                }
            }
        }
    }

    // Points on the torus, merged within eps; original nodes first.
    let mut points: Vec<[T; 2]> = Vec::new();
    for x in &support_nodes {
        locate(&mut points, *x, eps);
    }

    let mut pieces: Vec<(usize, usize, [i64; 2], T)> = Vec::new();
    for (i, s) in segs.iter().enumerate() {
        let len = s.length();
        let c = &mut cuts[i];
        for t in c.iter_mut() {
            *t = t.max(T::zero()).min(T::one());
        }
        c.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let mut params: Vec<T> = Vec::with_capacity(c.len());
        for &t in c.iter() {
            match params.last() {
                Some(&last) if (t - last) * len < eps => {}
                _ => params.push(t),
            }
        }
        // Keep the exact endpoint.
        if let Some(last) = params.last_mut() {
            if (T::one() - *last) * len < eps {
                *last = T::one();
            } else {
                params.push(T::one());
            }
        }
        let lifted: Vec<[T; 2]> = params.iter().map(|&t| s.at(t)).collect();
        let ids: Vec<usize> = lifted.iter().map(|&q| locate(&mut points, q, eps)).collect();
        for w in 0..lifted.len() - 1 {
            pieces.push((ids[w], ids[w + 1], [0, 0], s.weight));
            let last = pieces.len() - 1;
            pieces[last].2 = [
                offset(lifted[w + 1][0], points[ids[w + 1]][0]) - offset(lifted[w][0], points[ids[w]][0]),
                offset(lifted[w + 1][1], points[ids[w + 1]][1]) - offset(lifted[w][1], points[ids[w]][1]),
            ];
        }
    }

    // Canonical node order, on an eps grid so that roundoff left by the
    // intersection order cannot swap nodes that share a coordinate.
    let key = |p: &[T; 2]| {
        let q = |x: T| (x / eps).round().to_i64().expect("finite coordinate");
        (q(p[0]), q(p[1]))
    };
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        key(&points[a]).cmp(&key(&points[b])).then_with(|| {
            points[a][0]
                .partial_cmp(&points[b][0])
                .unwrap()
                .then(points[a][1].partial_cmp(&points[b][1]).unwrap())
        })
    });
    let mut rank = vec![0; points.len()];
    for (r, &p) in order.iter().enumerate() {
        rank[p] = r;
    }

    let mut merged: BTreeMap<(usize, usize, [i64; 2]), T> = BTreeMap::new();
    for (u, v, z, w) in pieces {
        let (u, v) = (rank[u], rank[v]);
        if u == v && z == [0, 0] {
            continue;
        }
        let key = canonical_key(u, v, z);
        *merged.entry(key).or_insert_with(T::zero) += w;
    }

    let mut used = vec![false; points.len()];
    for &(u, v, _) in merged.keys() {
        used[u] = true;
        used[v] = true;
    }
    let mut remap = vec![usize::MAX; points.len()];
    let mut nodes = Vec::new();
    for (r, &p) in order.iter().enumerate() {
        if used[r] {
            remap[r] = nodes.len();
            nodes.push(TorusPoint::new(points[p].to_vec()));
        }
    }
    let mut edges: Vec<Edge<T>> = merged
        .into_iter()
        .map(|((u, v, z), w)| Edge::new(remap[u], remap[v], z.to_vec(), w))
        .collect();
    edges.sort_by(|a, b| (a.u, a.v, &a.shift).cmp(&(b.u, b.v, &b.shift)));
    PeriodicNetwork::new(2, nodes, edges)
}

fn locate<T: Real>(points: &mut Vec<[T; 2]>, q: [T; 2], eps: T) -> usize {
    let w = [wrap_unit(q[0]), wrap_unit(q[1])];
    for (idx, p) in points.iter().enumerate() {
        let dx = w[0] - p[0];
        let dy = w[1] - p[1];
        let dx = dx - dx.round();
        let dy = dy - dy.round();
        if (dx * dx + dy * dy).sqrt() < eps {
            return idx;
        }
    }
    points.push(w);
    points.len() - 1
}

/// `(u, v, z)` and `(v, u, -z)` describe the same edge; pick one.
fn canonical_key(u: usize, v: usize, z: [i64; 2]) -> (usize, usize, [i64; 2]) {
    let neg = [-z[0], -z[1]];
    if u < v || (u == v && z > neg) {
        (u, v, z)
    } else {
        (v, u, neg)
    }
}

fn offset<T: Real>(lifted: T, rep: T) -> i64 {
    (lifted - rep).round().to_i64().expect("finite offset")
}

/// Integer translates `k` for which the box `[lo_b, hi_b] + k` meets `[lo_a, hi_a]`.
fn lift_range<T: Real>(lo_a: [T; 2], hi_a: [T; 2], lo_b: [T; 2], hi_b: [T; 2], eps: T) -> Vec<[T; 2]> {
    let range = |c: usize| {
        let from = (lo_a[c] - hi_b[c] - eps).ceil().to_i64().unwrap();
        let to = (hi_a[c] - lo_b[c] + eps).floor().to_i64().unwrap();
        from..=to
    };
    let mut out = Vec::new();
    for kx in range(0) {
        for ky in range(1) {
            out.push([T::from_i64(kx).unwrap(), T::from_i64(ky).unwrap()]);
        }
    }
    out
}

#[derive(Debug, Clone, Copy)]
struct Segment<T> {
    p: [T; 2],
    d: [T; 2],
    weight: T,
}

impl<T: Real> Segment<T> {
    fn at(&self, t: T) -> [T; 2] {
        [self.p[0] + t * self.d[0], self.p[1] + t * self.d[1]]
    }

    fn length(&self) -> T {
        (self.d[0] * self.d[0] + self.d[1] * self.d[1]).sqrt()
    }

    fn bbox(&self) -> ([T; 2], [T; 2]) {
        let q = self.at(T::one());
        (
            [self.p[0].min(q[0]), self.p[1].min(q[1])],
            [self.p[0].max(q[0]), self.p[1].max(q[1])],
        )
    }

    /// Parameter of the foot of `q` when `q` lies within `eps` of the segment.
    fn project_within(&self, q: [T; 2], eps: T) -> Option<T> {
        let l2 = self.d[0] * self.d[0] + self.d[1] * self.d[1];
        let rx = q[0] - self.p[0];
        let ry = q[1] - self.p[1];
        let t = (rx * self.d[0] + ry * self.d[1]) / l2;
        let l = l2.sqrt();
        if t * l < -eps || (t - T::one()) * l > eps {
            return None;
        }
        let dist = (rx * self.d[1] - ry * self.d[0]).abs() / l;
        (dist < eps).then_some(t)
    }

    /// Transversal intersection parameters `(s, t)` on `self` and `other`.
    fn crossing(&self, other: &Self, eps: T) -> Option<(T, T)> {
        let cross = self.d[0] * other.d[1] - self.d[1] * other.d[0];
        let li = self.length();
        let lj = other.length();
        if cross.abs() <= eps * li * lj {
            return None;
        }
        let wx = other.p[0] - self.p[0];
        let wy = other.p[1] - self.p[1];
        let s = (wx * other.d[1] - wy * other.d[0]) / cross;
        let t = (wx * self.d[1] - wy * self.d[0]) / cross;
        let inside = |x: T, l: T| x * l >= -eps && (x - T::one()) * l <= eps;
        (inside(s, li) && inside(t, lj)).then_some((s, t))
    }
}
