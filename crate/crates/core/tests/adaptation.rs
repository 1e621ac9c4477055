use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use reticulate_core::{adapt, darcy_solve, fixtures, AdaptOptions, FluctuationModel, Medium, Network, SinkMode};

fn model(mode: SinkMode, seed: u64) -> FluctuationModel<f64> {
    FluctuationModel {
        source: 0,
        patch_count: 3,
        patch_strength: 1.0,
        mode,
        seed,
    }
}

fn opts(steps: usize, dt: f64) -> AdaptOptions {
    AdaptOptions {
        steps,
        samples_per_step: 6,
        dt,
        trace_stride: 1,
    }
}

/// Connected fixtures with random weights in [0.5, 2].
fn weighted_fixtures() -> Vec<Network> {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let bases: Vec<Network> = vec![
        fixtures::triangulated_grid(3, 1.0),
        fixtures::triangulated_grid(4, 1.0),
        fixtures::triangulated_grid(5, 1.0),
        fixtures::triangulated_grid(6, 1.0),
        fixtures::triangulated_grid(7, 1.0),
        fixtures::diamond_chain(3),
        fixtures::diamond_chain(4),
        fixtures::diamond_chain(5),
        fixtures::diamond_chain(6),
        fixtures::diamond_chain(7),
    ];
    bases
        .into_iter()
        .map(|net| {
            let w: Vec<f64> = (0..net.edge_count()).map(|_| rng.gen_range(0.5..2.0)).collect();
            net.with_weights(&w)
        })
        .collect()
}

fn dissipation(net: &Network, injections: &[Vec<f64>]) -> f64 {
    let total: f64 = injections
        .iter()
        .map(|m| {
            let phi = darcy_solve(net, m).unwrap();
            net.edges()
                .iter()
                .enumerate()
                .map(|(e, edge)| {
                    let dphi = phi[edge.v] - phi[edge.u];
                    edge.weight / net.length(e) * dphi * dphi
                })
                .sum::<f64>()
        })
        .sum();
    total / injections.len() as f64
}

#[test]
fn traces_do_not_depend_on_thread_count() {
    let medium = Medium::tangential(fixtures::triangulated_grid(5, 1.0));
    let runs: Vec<_> = [1, 3, 8]
        .iter()
        .map(|&threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| adapt(&medium, &model(SinkMode::Random, 42), &opts(15, 0.3)).unwrap())
        })
        .collect();
    assert_eq!(runs[0], runs[1]);
    assert_eq!(runs[1], runs[2]);
}

#[test]
fn recorded_dissipation_matches_injection_work() {
    let net = weighted_fixtures().swap_remove(2);
    let m = model(SinkMode::Random, 7);
    let trace = adapt(&Medium::tangential(net.clone()), &m, &opts(1, 0.0)).unwrap();
    let injections: Vec<Vec<f64>> = (0..6).map(|s| m.draw(net.node_count(), 0, s)).collect();
    let work: f64 = injections
        .iter()
        .map(|inj| {
            let phi = darcy_solve(&net, inj).unwrap();
            inj.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>()
        })
        .sum::<f64>()
        / 6.0;
    let recorded = trace.steps[1].dissipation;
    assert!((recorded - work).abs() <= 1e-9 * work, "{recorded} vs {work}");
    assert!((recorded - dissipation(&net, &injections)).abs() <= 1e-9 * work);
}

#[test]
fn small_steps_lower_the_dissipation() {
    for (i, net) in weighted_fixtures().into_iter().enumerate() {
        let m = model(SinkMode::Random, i as u64);
        let injections: Vec<Vec<f64>> = (0..6).map(|s| m.draw(net.node_count(), 0, s)).collect();
        // Stability threshold from the mean squared gradients at these injections.
        let mut g = vec![0.0; net.edge_count()];
        for inj in &injections {
            let phi = darcy_solve(&net, inj).unwrap();
            for (e, edge) in net.edges().iter().enumerate() {
                g[e] += ((phi[edge.v] - phi[edge.u]) / net.length(e)).powi(2) / 6.0;
            }
        }
        let rate = g.iter().zip(net.weights()).map(|(x, a)| x / a).fold(0.0, f64::max);
        let dt = 0.1 / rate;
        let before = dissipation(&net, &injections);
        let trace = adapt(&Medium::tangential(net.clone()), &m, &opts(1, dt)).unwrap();
        let after = dissipation(&net.with_weights(&trace.steps[1].weights), &injections);
        assert!(after < before, "fixture {i}: {before} -> {after}");
    }
}

#[test]
fn mass_is_conserved_every_step() {
    let net = weighted_fixtures().swap_remove(4);
    let mass = net.total_mass();
    let trace = adapt(&Medium::tangential(net), &model(SinkMode::Fixed(5), 0), &opts(40, 0.5)).unwrap();
    for step in &trace.steps {
        assert!((step.total_mass - mass).abs() <= 1e-9 * mass, "step {}", step.t);
    }
}
