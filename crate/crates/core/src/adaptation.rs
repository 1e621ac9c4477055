//! Conductance adaptation driven by fluctuating Darcy flows.
//!
//! Each step draws random injection patterns (a source node and sink patches),
//! solves the network Darcy problem for each, and grows every edge weight by
//! the mean squared tangential pressure gradient it carried. Weights are then
//! rescaled so the total mass `sum a_e l_e` is conserved.

use log::{info, warn};
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cellsolver::cg::{conjugate_gradient, project_components, CgOptions, Laplacian};
use crate::cellsolver::effective_tensor;
use crate::error::{Error, Result};
use crate::linalg::SymMatrix;
use crate::network::{NetworkMedium, PeriodicNetwork};
use crate::scalar::{Real, Tolerances};
use crate::topology::component_labels;

/// Smallest weight kept during adaptation; lower values are clamped.
pub const WEIGHT_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SinkMode {
    /// `patch_count` sinks drawn uniformly without replacement per sample.
    Random,
    /// All withdrawal at one node.
    Fixed(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct FluctuationModel<T> {
    pub source: usize,
    pub patch_count: usize,
    /// Mass withdrawn per active sink.
    pub patch_strength: T,
    pub mode: SinkMode,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdaptOptions {
    pub steps: usize,
    pub samples_per_step: usize,
    pub dt: f64,
    /// Record the effective tensor every `trace_stride` steps (and at the end).
    pub trace_stride: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep<T> {
    pub t: usize,
    pub weights: Vec<T>,
    pub q: SymMatrix<T>,
    pub lambda_min_ratio: T,
    /// Mean of `sum_e c_e (dphi_e)^2` over the samples of the step before `t`.
    pub dissipation: T,
    pub total_mass: T,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdaptationTrace<T> {
    pub steps: Vec<TraceStep<T>>,
    /// `(step, edge)` pairs clamped at [`WEIGHT_FLOOR`].
    pub underflows: Vec<(usize, usize)>,
}

impl<T: Real> AdaptationTrace<T> {
    pub fn last(&self) -> Option<&TraceStep<T>> {
        self.steps.last()
    }
}

/// Weighted Laplacian of the network with conductances `a_e / l_e`.
struct Darcy<T> {
    laplacian: Laplacian<T>,
    labels: Vec<Option<usize>>,
    components: usize,
    ends: Vec<(usize, usize)>,
    conductance: Vec<T>,
    opts: CgOptions<T>,
}

impl<T: Real> Darcy<T> {
    fn new(net: &PeriodicNetwork<T>) -> Self {
        let tol = Tolerances::<T>::standard();
        let ends: Vec<(usize, usize)> = net.edges().iter().map(|e| (e.u, e.v)).collect();
        let conductance: Vec<T> = (0..net.edge_count())
            .map(|e| net.edges()[e].weight / net.length(e))
            .collect();
        let links = net
            .support_edges(&tol)
            .into_iter()
            .map(|e| (ends[e].0, ends[e].1, conductance[e]));
        let laplacian = Laplacian::new(net.node_count(), links);
        let (labels, components) = component_labels(net);
        Self {
            laplacian,
            labels,
            components,
            ends,
            conductance,
            opts: CgOptions {
                rel_tol: tol.solve,
                max_iter: 20 * net.node_count().max(1),
            },
        }
    }

    fn solve(&self, injection: &[T]) -> Result<Vec<T>> {
        let mut net = vec![T::zero(); self.components];
        let mut scale = T::zero();
        for (i, &m) in injection.iter().enumerate() {
            scale = scale.max(m.abs());
            match self.labels[i] {
                Some(c) => net[c] += m,
                None if m != T::zero() => {
                    return Err(Error::UnbalancedInjection {
                        component: usize::MAX,
                        net: m.as_f64(),
                    })
                }
                None => {}
            }
        }
        let tol = T::lit(1e-12) * scale.max(T::one());
        if let Some((c, &m)) = net.iter().enumerate().find(|(_, m)| m.abs() > tol) {
            return Err(Error::UnbalancedInjection {
                component: c,
                net: m.as_f64(),
            });
        }
        let mut b = injection.to_vec();
        project_components(&mut b, &self.labels, self.components);
        let sol = conjugate_gradient(
            &self.laplacian,
            &b,
            None,
            Some((&self.labels, self.components)),
            None,
            &self.opts,
        )?;
        Ok(sol.x)
    }
}

/// Potential `phi` with `L(a) phi = m`, zero mean on every component.
pub fn darcy_solve<T: Real>(net: &PeriodicNetwork<T>, injection: &[T]) -> Result<Vec<T>> {
    if injection.len() != net.node_count() {
        return Err(Error::InvalidArgument(format!(
            "injection has {} entries for {} nodes",
            injection.len(),
            net.node_count()
        )));
    }
    Darcy::new(net).solve(injection)
}

/// Stateless sub-seed for sample `r` of step `s`.
pub fn sub_seed(seed: u64, step: u64, sample: u64) -> u64 {
    fn mix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
        z ^ (z >> 31)
    }
    mix(mix(mix(seed) ^ step) ^ sample)
}

impl<T: Real> FluctuationModel<T> {
    fn validate(&self, net: &PeriodicNetwork<T>) -> Result<()> {
        let n = net.node_count();
        if self.source >= n {
            return Err(Error::InvalidArgument(format!("source node {} out of range", self.source)));
        }
        if self.patch_count == 0 || !(self.patch_strength > T::zero()) {
            return Err(Error::InvalidArgument("patch_count and patch_strength must be positive".into()));
        }
        match self.mode {
            SinkMode::Fixed(s) if s >= n || s == self.source => {
                Err(Error::InvalidArgument(format!("fixed sink {s} must be a node other than the source")))
            }
            SinkMode::Random if self.patch_count >= n => Err(Error::InvalidArgument(format!(
                "{} sinks need more than {n} nodes",
                self.patch_count
            ))),
            _ => Ok(()),
        }
    }

    /// Injection pattern for one sample.
    pub fn draw(&self, node_count: usize, step: usize, sample_index: usize) -> Vec<T> {
        let k = T::from_usize(self.patch_count).unwrap();
        let mut m = vec![T::zero(); node_count];
        m[self.source] = k * self.patch_strength;
        match self.mode {
            SinkMode::Fixed(s) => m[s] -= k * self.patch_strength,
            SinkMode::Random => {
                let mut rng = ChaCha8Rng::seed_from_u64(sub_seed(self.seed, step as u64, sample_index as u64));
                // Sinks among the nodes other than the source.
                for j in sample(&mut rng, node_count - 1, self.patch_count) {
                    let node = if j >= self.source { j + 1 } else { j };
                    m[node] -= self.patch_strength;
                }
            }
        }
        m
    }
}

fn record<T: Real>(
    medium: &NetworkMedium<T>,
    t: usize,
    dissipation: T,
) -> Result<TraceStep<T>> {
    let q = effective_tensor(medium)?.q;
    let ev = q.eigenvalues();
    let max = ev[ev.len() - 1];
    let ratio = if max > T::zero() { ev[0] / max } else { T::zero() };
    Ok(TraceStep {
        t,
        weights: medium.network.weights(),
        q,
        lambda_min_ratio: ratio,
        dissipation,
        total_mass: medium.network.total_mass(),
    })
}

/// Explicit Euler steps of the mass-renormalized dissipation flow.
pub fn adapt<T: Real>(
    medium: &NetworkMedium<T>,
    model: &FluctuationModel<T>,
    opts: &AdaptOptions,
) -> Result<AdaptationTrace<T>> {
    let mut current = medium.clone();
    let net0 = &medium.network;
    model.validate(net0)?;
    if !(opts.dt >= 0.0) || opts.samples_per_step == 0 {
        return Err(Error::InvalidArgument("dt must be >= 0 and samples_per_step >= 1".into()));
    }
    if net0.edges().iter().any(|e| !(e.weight > T::zero())) {
        return Err(Error::InvalidArgument("initial weights must be strictly positive".into()));
    }
    let stride = opts.trace_stride.max(1);
    let dt = T::lit(opts.dt);
    let floor = T::lit(WEIGHT_FLOOR);
    let mass0 = net0.total_mass();
    let lengths: Vec<T> = (0..net0.edge_count()).map(|e| net0.length(e)).collect();
    let samples = T::from_usize(opts.samples_per_step).unwrap();

    let mut trace = AdaptationTrace {
        steps: vec![record(&current, 0, T::zero())?],
        underflows: Vec::new(),
    };
    let mut logged_threshold = false;
    for step in 0..opts.steps {
        let darcy = Darcy::new(&current.network);
        let per_sample: Vec<(Vec<T>, T)> = (0..opts.samples_per_step)
            .into_par_iter()
            .map(|s| {
                let m = model.draw(current.network.node_count(), step, s);
                let phi = darcy.solve(&m)?;
                let mut g = vec![T::zero(); lengths.len()];
                let mut diss = T::zero();
                for (e, &(u, v)) in darcy.ends.iter().enumerate() {
                    let dphi = phi[v] - phi[u];
                    g[e] = (dphi / lengths[e]).powi(2);
                    diss += darcy.conductance[e] * dphi * dphi;
                }
                Ok((g, diss))
            })
            .collect::<Result<_>>()?;
        // Ordered reduction keeps results independent of the thread count.
        let mut g = vec![T::zero(); lengths.len()];
        let mut dissipation = T::zero();
        for (ge, d) in &per_sample {
            for (acc, x) in g.iter_mut().zip(ge) {
                *acc += *x;
            }
            dissipation += *d;
        }
        g.iter_mut().for_each(|x| *x /= samples);
        dissipation /= samples;

        if !logged_threshold {
            // Growth is relative: steps with dt * g_e comparable to a_e overshoot.
            let rate = g
                .iter()
                .zip(current.network.edges())
                .map(|(x, e)| *x / e.weight)
                .fold(T::zero(), T::max);
            if rate > T::zero() {
                info!("adaptation stability threshold dt ~ {:.3e}", (T::one() / rate).as_f64());
            }
            logged_threshold = true;
        }

        let mut weights: Vec<T> = current
            .network
            .edges()
            .iter()
            .zip(&g)
            .map(|(e, x)| e.weight + dt * *x)
            .collect();
        let mass: T = weights.iter().zip(&lengths).map(|(a, l)| *a * *l).sum();
        let scale = mass0 / mass;
        for (e, w) in weights.iter_mut().enumerate() {
            *w *= scale;
            if *w < floor {
                warn!("edge {e} weight underflow at step {}", step + 1);
                trace.underflows.push((step + 1, e));
                *w = floor;
            }
        }
        current = NetworkMedium::new(current.network.with_weights(&weights), current.mode);
        let t = step + 1;
        if t % stride == 0 || t == opts.steps {
            trace.steps.push(record(&current, t, dissipation)?);
        }
    }
    Ok(trace)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn model(mode: SinkMode, seed: u64) -> FluctuationModel<f64> {
        FluctuationModel {
            source: 0,
            patch_count: 2,
            patch_strength: 1.0,
            mode,
            seed,
        }
    }

    #[test]
    fn darcy_examples() {
        let grid = fixtures::square_grid::<f64>(1.0);
        assert_eq!(darcy_solve(&grid, &[0.0]).unwrap(), vec![0.0]);

        // Segment of length 1/2 with weight 2 has conductance 4.
        let seg = fixtures::open_segment::<f64>(2.0);
        let phi = darcy_solve(&seg, &[1.0, -1.0]).unwrap();
        assert!((phi[0] - phi[1] - 0.25).abs() < 1e-12);

        assert!(matches!(
            darcy_solve(&seg, &[1.0, 0.0]),
            Err(Error::UnbalancedInjection { component: 0, .. })
        ));
    }

    #[test]
    fn zero_step_keeps_the_trace_constant() {
        let m = NetworkMedium::tangential(fixtures::triangulated_grid::<f64>(3, 1.0));
        let opts = AdaptOptions {
            steps: 4,
            samples_per_step: 3,
            dt: 0.0,
            trace_stride: 1,
        };
        let trace = adapt(&m, &model(SinkMode::Random, 1), &opts).unwrap();
        assert_eq!(trace.steps.len(), 5);
        for s in &trace.steps {
            assert_eq!(s.weights, trace.steps[0].weights);
            assert!((&s.q - &trace.steps[0].q).frobenius_norm() == 0.0);
        }
    }

    #[test]
    fn single_edge_is_fixed_by_renormalization() {
        let net = PeriodicNetwork::<f64>::from_parts(2, &[&[0.0, 0.0], &[0.3, 0.0]], &[(0, 1, &[0, 0], 0.7)]).unwrap();
        let m = NetworkMedium::tangential(net);
        let fm = FluctuationModel {
            source: 0,
            patch_count: 1,
            patch_strength: 1.0,
            mode: SinkMode::Fixed(1),
            seed: 0,
        };
        let opts = AdaptOptions {
            steps: 3,
            samples_per_step: 2,
            dt: 0.5,
            trace_stride: 1,
        };
        let trace = adapt(&m, &fm, &opts).unwrap();
        for s in &trace.steps {
            assert!((s.weights[0] - 0.7).abs() < 1e-15);
        }
    }

    #[test]
    fn mass_is_conserved_and_dissipation_matches_work() {
        let net = fixtures::triangulated_grid::<f64>(4, 1.0);
        let mass0 = net.total_mass();
        let m = NetworkMedium::tangential(net.clone());
        let opts = AdaptOptions {
            steps: 5,
            samples_per_step: 4,
            dt: 0.05,
            trace_stride: 1,
        };
        let fm = model(SinkMode::Random, 9);
        let trace = adapt(&m, &fm, &opts).unwrap();
        for s in &trace.steps {
            assert!((s.total_mass - mass0).abs() <= 1e-9 * mass0);
        }
        // First step dissipation equals the mean of m . phi at the initial weights.
        let work: f64 = (0..4)
            .map(|s| {
                let inj = fm.draw(net.node_count(), 0, s);
                let phi = darcy_solve(&net, &inj).unwrap();
                inj.iter().zip(&phi).map(|(a, b)| a * b).sum::<f64>()
            })
            .sum::<f64>()
            / 4.0;
        assert!((trace.steps[1].dissipation - work).abs() <= 1e-9 * work);
    }

    #[test]
    fn sub_seeds_differ() {
        assert_ne!(sub_seed(1, 0, 0), sub_seed(1, 0, 1));
        assert_ne!(sub_seed(1, 0, 1), sub_seed(1, 1, 0));
        assert_eq!(sub_seed(5, 2, 3), sub_seed(5, 2, 3));
    }

    #[test]
    fn draw_conserves_mass() {
        let fm = model(SinkMode::Random, 4);
        for s in 0..20 {
            let m = fm.draw(10, 0, s);
            assert!(m.iter().sum::<f64>().abs() < 1e-15);
            assert_eq!(m.iter().filter(|&&x| x < 0.0).count(), 2);
        }
    }
}
