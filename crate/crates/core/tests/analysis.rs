use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reticulate_core::analysis::{geometric_radii, node_residuals};
use reticulate_core::{
    ball_mass_profile, estimate_local_dimension, fixtures, irreducible, maximality_check, planarize,
    realizable_dimension, realize_as_mixture, stationary_weights, BallMassProfile, IrreducibilityVerdict, Medium,
    Network, Point, SymMatrix64, Tolerances,
};

fn maximal_fixtures() -> Vec<Network> {
    vec![
        fixtures::square_grid(1.0),
        fixtures::honeycomb(1.0),
        fixtures::diamond_chain(5),
        fixtures::triangulated_grid(4, 1.0),
        planarize(&fixtures::diagonal_grid(1.0), 1e-9).unwrap(),
    ]
}

/// Point at parameter `t` along edge `e`.
fn on_edge(net: &Network, e: usize, t: f64) -> Point {
    let p = net.nodes()[net.edges()[e].u].coords();
    let d = net.displacement(e);
    Point::new(p.iter().zip(&d).map(|(x, y)| x + t * y).collect())
}

#[test]
fn maximal_fixtures_have_dimension_at_least_one() {
    let radii = geometric_radii(1e-5, 1e-2, 16);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for net in maximal_fixtures() {
        let medium = Medium::tangential(net.clone());
        assert!(maximality_check(&medium).unwrap().is_maximal);
        for _ in 0..10 {
            let e = rng.gen_range(0..net.edge_count());
            let center = on_edge(&net, e, rng.gen());
            let profile = ball_mass_profile(&medium, &center, &radii).unwrap();
            let dim = estimate_local_dimension(&profile).unwrap();
            assert!(dim.lower >= 0.98, "lower dimension {} at {:?}", dim.lower, center.coords());
        }
        let node = net.nodes()[0].clone();
        let dim = estimate_local_dimension(&ball_mass_profile(&medium, &node, &radii).unwrap()).unwrap();
        assert!(dim.lower >= 0.98);
    }
}

#[test]
fn ratio_is_constant_on_a_straight_line() {
    let medium = Medium::tangential(fixtures::diagonal_loop(1.7));
    let center = on_edge(&medium.network, 0, 0.3);
    let radii = geometric_radii(1e-3, 0.45, 30);
    let profile = ball_mass_profile(&medium, &center, &radii).unwrap();
    for (r, m) in profile.radii.iter().zip(&profile.masses) {
        assert!((m / r - 2.0 * 1.7).abs() <= 1e-12, "r = {r}");
    }
}

#[test]
fn cantor_strip_has_dimension_log6_over_log3() {
    let center = Point::new(vec![0.0, 0.5]);
    let radii = geometric_radii(1e-5, 1e-1, 24);
    let masses = radii.iter().map(|&r| fixtures::cantor_strip_ball_mass(0.0, r)).collect();
    let dim = estimate_local_dimension(&BallMassProfile { center, radii, masses }).unwrap();
    let expected = 1.0 + 2f64.ln() / 3f64.ln();
    for slope in [dim.lower, dim.upper] {
        assert!((slope - expected).abs() <= 0.05, "{dim:?}");
    }
}

#[test]
fn balance_residual_is_linear_in_weights() {
    let tol = Tolerances::standard();
    for seed in 0..30 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let raw: Network = fixtures::random_network(&mut rng, 6, 10, (0.1, 2.0), 0.3);
        let net = planarize(&raw, 1e-9).unwrap();
        let doubled: Vec<f64> = net.weights().iter().map(|w| 2.0 * w).collect();
        let a = node_residuals(&net, &tol);
        let b = node_residuals(&net.with_weights(&doubled), &tol);
        for (x, y) in a.iter().flatten().zip(b.iter().flatten()) {
            assert_eq!(2.0 * x, *y);
        }
    }
}

fn verdict_kind(v: &IrreducibilityVerdict) -> &'static str {
    match v {
        IrreducibilityVerdict::Irreducible => "irreducible",
        IrreducibilityVerdict::Reducible { .. } => "reducible",
        IrreducibilityVerdict::Unknown => "unknown",
    }
}

fn reindexed(net: &Network, rng: &mut ChaCha8Rng) -> Network {
    use rand::seq::SliceRandom;
    let mut perm: Vec<usize> = (0..net.node_count()).collect();
    perm.shuffle(rng);
    let mut nodes = net.nodes().to_vec();
    for (old, &new) in perm.iter().enumerate() {
        nodes[new] = net.nodes()[old].clone();
    }
    let mut edges = net.edges().to_vec();
    edges.shuffle(rng);
    for e in &mut edges {
        e.u = perm[e.u];
        e.v = perm[e.v];
    }
    Network::new(net.dimension(), nodes, edges).unwrap()
}

#[test]
fn irreducibility_ignores_indexing_and_scale() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut nets = vec![
        fixtures::square_grid(1.0),
        fixtures::honeycomb(1.0),
        fixtures::diamond_chain(3),
        fixtures::diamond_chain(7),
        planarize(&fixtures::diagonal_grid(1.0), 1e-9).unwrap(),
    ];
    for _ in 0..10 {
        let count = rng.gen_range(2..=3);
        let topo: Network = fixtures::random_geodesics(&mut rng, count).unwrap();
        nets.push(stationary_weights(&topo, rng.gen()).into_network().unwrap());
    }
    for net in nets {
        let base = verdict_kind(&irreducible(&net, 64).unwrap().verdict);
        let scaled: Vec<f64> = net.weights().iter().map(|w| 3.5 * w).collect();
        assert_eq!(base, verdict_kind(&irreducible(&net.with_weights(&scaled), 64).unwrap().verdict));
        for _ in 0..3 {
            let other = reindexed(&net, &mut rng);
            assert_eq!(base, verdict_kind(&irreducible(&other, 64).unwrap().verdict));
        }
    }
}

fn random_trace_one(rng: &mut ChaCha8Rng, n: usize) -> SymMatrix64 {
    let mut a = SymMatrix64::zeros(n);
    for _ in 0..n {
        let v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        a.add_outer(&v, rng.gen());
    }
    let t = a.trace();
    a.scaled(1.0 / t)
}

#[test]
fn every_trace_one_matrix_is_a_line_mixture() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for n in 1..=4 {
        for _ in 0..200 {
            let a = random_trace_one(&mut rng, n);
            let mix = realize_as_mixture(&a, 1).unwrap();
            assert!(mix.atoms.len() <= n);
            assert!((&mix.reconstruct() - &a).frobenius_norm() <= 1e-10);
        }
    }
}

#[test]
fn realizable_dimension_lies_between_one_and_rank() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for n in 1..=4 {
        for _ in 0..200 {
            let a = random_trace_one(&mut rng, n);
            let d = realizable_dimension(&a).unwrap();
            assert!(d >= 1.0 - 1e-12 && d <= a.rank(1e-12) as f64 + 1e-12, "{d}");
        }
    }
    let id = SymMatrix64::scaled_identity(3, 1.0 / 3.0);
    assert!((realizable_dimension(&id).unwrap() - 3.0).abs() <= 1e-12);
}
