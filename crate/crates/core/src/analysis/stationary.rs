use minilp::{ComparisonOp, LinearExpr, OptimizationDirection, Problem};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::linalg::{dot, norm, orthogonal_complement, orthonormalize};
use crate::network::PeriodicNetwork;
use crate::scalar::Real;

/// Minimum weight relative to the largest, required of a stationary sample.
pub const WEIGHT_MARGIN: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub enum StationaryOutcome<T> {
    Weights(PeriodicNetwork<T>),
    Infeasible,
}

impl<T> StationaryOutcome<T> {
    pub fn into_network(self) -> Option<PeriodicNetwork<T>> {
        match self {
            Self::Weights(n) => Some(n),
            Self::Infeasible => None,
        }
    }
}

/// Rows of the balance operator, mapping edge weights to stacked node residuals.
fn balance_rows<T: Real>(net: &PeriodicNetwork<T>) -> Vec<Vec<f64>> {
    let n = net.dimension();
    let m = net.edge_count();
    let mut rows = vec![vec![0.0; m]; n * net.node_count()];
    for e in 0..m {
        let edge = &net.edges()[e];
        let t = net.tangent(e);
        for c in 0..n {
            rows[edge.u * n + c][e] += t[c].as_f64();
            rows[edge.v * n + c][e] -= t[c].as_f64();
        }
    }
    rows
}

/// Maximizes over `w = sum_j y_j n_j` in the span of the orthonormal `null`
/// basis, so balance holds by construction and only the box constraints
/// `floor <= w_e <= 1` reach the solver. Without an objective the smallest
/// weight is maximized and returned as the margin.
fn solve_lp(null: &[Vec<f64>], m: usize, floor: f64, objective: Option<&[f64]>) -> Option<(Vec<f64>, f64)> {
    let mut lp = Problem::new(OptimizationDirection::Maximize);
    let y: Vec<_> = null
        .iter()
        .map(|n| lp.add_var(objective.map_or(0.0, |c| dot(c, n)), (f64::NEG_INFINITY, f64::INFINITY)))
        .collect();
    let t = objective.is_none().then(|| lp.add_var(1.0, (0.0, 1.0)));
    for e in 0..m {
        let weight = || {
            let mut expr = LinearExpr::empty();
            for (j, n) in null.iter().enumerate() {
                if n[e] != 0.0 {
                    expr.add(y[j], n[e]);
                }
            }
            expr
        };
        lp.add_constraint(weight(), ComparisonOp::Le, 1.0);
        match t {
            Some(t) => {
                let mut expr = weight();
                expr.add(t, -1.0);
                lp.add_constraint(expr, ComparisonOp::Ge, 0.0);
            }
            None => lp.add_constraint(weight(), ComparisonOp::Ge, floor),
        }
    }
    let sol = lp.solve().ok()?;
    let weights = (0..m)
        .map(|e| null.iter().zip(&y).map(|(n, &v)| n[e] * sol[v]).sum())
        .collect();
    let margin = t.map_or(floor, |t| sol[t]);
    Some((weights, margin))
}

/// Samples strictly positive weights that balance every node of `net`.
///
/// Weights are parametrized by an orthonormal basis of the kernel of the
/// balance operator. A first linear program maximizes the smallest weight
/// (capped at 1); if it stays below [`WEIGHT_MARGIN`] the kernel meets the
/// positive orthant only at zero and the network is reported infeasible.
/// A second program with a seeded random objective picks another balanced
/// vertex; the average of both is scaled so the largest weight is 1.
pub fn stationary_weights<T: Real>(net: &PeriodicNetwork<T>, seed: u64) -> StationaryOutcome<T> {
    let m = net.edge_count();
    if m == 0 {
        return StationaryOutcome::Infeasible;
    }
    let rows = balance_rows(net);
    // A row made only of roundoff (a tangent component of 1e-16) would
    // otherwise be normalized into a spurious constraint.
    let largest = rows.iter().map(|r| norm(r)).fold(0.0, f64::max);
    let rows: Vec<Vec<f64>> = rows.into_iter().filter(|r| norm(r) > 1e-9 * largest).collect();
    let rows = orthonormalize(&rows, 1e-9);
    let null = orthogonal_complement(&rows, m);
    if null.is_empty() {
        return StationaryOutcome::Infeasible;
    }
    let Some((w1, margin)) = solve_lp(&null, m, 0.0, None) else {
        return StationaryOutcome::Infeasible;
    };
    if margin < WEIGHT_MARGIN {
        return StationaryOutcome::Infeasible;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c: Vec<f64> = (0..m).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let w2 = solve_lp(&null, m, margin / 2.0, Some(&c)).map_or_else(|| w1.clone(), |s| s.0);
    let w: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| 0.5 * (a + b)).collect();
    let max = w.iter().copied().fold(0.0f64, f64::max);
    if !(max > 0.0) || w.iter().any(|&x| x < WEIGHT_MARGIN * max) {
        return StationaryOutcome::Infeasible;
    }
    let weights: Vec<T> = w.iter().map(|&x| T::lit(x / max)).collect();
    StationaryOutcome::Weights(net.with_weights(&weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::balance_report;
    use crate::fixtures;
    use crate::network::NetworkMedium;

    #[test]
    fn honeycomb_weights_are_equal() {
        let net = stationary_weights(&fixtures::honeycomb_weighted::<f64>([0.1, 1.0, 3.0]), 7)
            .into_network()
            .unwrap();
        let w = net.weights();
        for x in &w {
            assert!((x - 1.0).abs() < 1e-12, "{w:?}");
        }
    }

    #[test]
    fn square_grid_sample_is_balanced() {
        let net = stationary_weights(&fixtures::square_grid::<f64>(1.0), 3).into_network().unwrap();
        let r = balance_report(&NetworkMedium::tangential(net));
        assert!(r.max_residual <= 1e-12);
    }

    #[test]
    fn t_junction_is_infeasible() {
        assert_eq!(stationary_weights(&fixtures::t_junction::<f64>(), 1), StationaryOutcome::Infeasible);
    }

    #[test]
    fn diamond_chain_is_feasible() {
        let net = stationary_weights(&fixtures::diamond_chain::<f64>(7), 11).into_network().unwrap();
        let r = balance_report(&NetworkMedium::tangential(net));
        assert!(r.balanced);
    }
}
