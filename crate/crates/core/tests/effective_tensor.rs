use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reticulate_core::{
    components, effective_tensor, fixtures, mass_tensor, planarize, subdivide, Medium, Network, SymMatrix64,
};

fn q(net: &Network) -> SymMatrix64 {
    effective_tensor(&Medium::tangential(net.clone())).unwrap().q
}

fn random_planar(seed: u64) -> Network {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nodes = rng.gen_range(3..=10);
    let edges = rng.gen_range(4..=16);
    let raw: Network = fixtures::random_network(&mut rng, nodes, edges, (0.1, 2.0), 0.3);
    planarize(&raw, 1e-9).unwrap()
}

fn random_weights(rng: &mut ChaCha8Rng, m: usize) -> Vec<f64> {
    (0..m).map(|_| rng.gen_range(0.1..2.0)).collect()
}

#[test]
fn wiener_sandwich_holds_on_random_networks() {
    for seed in 0..50 {
        let net = random_planar(seed);
        for medium in [Medium::tangential(net.clone()), Medium::isotropic(net)] {
            let q = effective_tensor(&medium).unwrap().q;
            let mass = mass_tensor(&medium);
            let slack = 1e-9 * (1.0 + mass.frobenius_norm());
            assert!(q.min_eigenvalue() >= -slack, "seed {seed}: Q not PSD");
            assert!((&mass - &q).min_eigenvalue() >= -slack, "seed {seed}: Q exceeds mass");
        }
    }
}

#[test]
fn lowering_weights_never_raises_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for seed in 0..40 {
        let net = random_planar(seed);
        let lowered: Vec<f64> = net.weights().iter().map(|w| w * rng.gen_range(0.0..=1.0)).collect();
        let diff = &q(&net) - &q(&net.with_weights(&lowered));
        assert!(diff.min_eigenvalue() >= -1e-9, "seed {seed}: {:e}", diff.min_eigenvalue());
    }
}

#[test]
fn q_is_superadditive_in_the_weights() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for seed in 0..40 {
        let net = random_planar(seed);
        let w1 = random_weights(&mut rng, net.edge_count());
        let w2 = random_weights(&mut rng, net.edge_count());
        let sum: Vec<f64> = w1.iter().zip(&w2).map(|(a, b)| a + b).collect();
        let q1 = q(&net.with_weights(&w1));
        let q2 = q(&net.with_weights(&w2));
        let diff = &q(&net.with_weights(&sum)) - &(&q1 + &q2);
        assert!(diff.min_eigenvalue() >= -1e-9, "seed {seed}: {:e}", diff.min_eigenvalue());
    }
}

#[test]
fn disjoint_supports_add_exactly() {
    let q1 = q(&fixtures::axis_loop(0.7));
    let q2 = q(&fixtures::diagonal_loop(1.3));
    let union = fixtures::axis_loop::<f64>(0.7).disjoint_union(&fixtures::diagonal_loop(1.3));
    assert!((&q(&union) - &(&q1 + &q2)).frobenius_norm() <= 1e-12);
}

#[test]
fn q_is_the_sum_over_components() {
    let mut total_components = 0;
    for seed in 0..60 {
        let net = random_planar(seed);
        let parts = components(&net);
        total_components += parts.len();
        let sum = parts
            .iter()
            .fold(SymMatrix64::zeros(2), |acc, c| &acc + &q(c));
        assert!((&q(&net) - &sum).frobenius_norm() <= 1e-9, "seed {seed}");
    }
    assert!(total_components > 60, "fixtures never split into components");
}

#[test]
fn isotropic_and_tangential_modes_agree() {
    for seed in 0..30 {
        let net = random_planar(seed);
        let t = effective_tensor(&Medium::tangential(net.clone())).unwrap().q;
        let i = effective_tensor(&Medium::isotropic(net)).unwrap().q;
        assert!((&t - &i).frobenius_norm() <= 1e-10 * (1.0 + t.frobenius_norm()), "seed {seed}");
    }
}

#[test]
fn subdivision_does_not_change_q() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for seed in 0..30 {
        let net = random_planar(seed);
        let parts: Vec<usize> = (0..net.edge_count()).map(|_| rng.gen_range(1..=5)).collect();
        let fine = subdivide(&net, &parts);
        assert!((&q(&fine) - &q(&net)).frobenius_norm() <= 1e-9, "seed {seed}");
    }
}

#[test]
fn single_precision_tracks_double() {
    for net in [
        fixtures::square_grid::<f64>(1.0),
        fixtures::skewed_honeycomb(),
        fixtures::triangulated_grid(5, 1.0),
        fixtures::diamond_chain(4),
        random_planar(3),
    ] {
        let q64 = q(&net);
        let q32 = effective_tensor(&reticulate_core::NetworkMedium::tangential(net.convert::<f32>())).unwrap().q;
        for (a, b) in q64.upper().iter().zip(q32.upper()) {
            assert!((a - *b as f64).abs() <= 1e-4 * (1.0 + a.abs()), "{a} vs {b}");
        }
    }
}
