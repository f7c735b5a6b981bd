//! Metropolis–Hastings dyad-toggle samplers for ERGMs, on the full network
//! space and on the completions of a partial network.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attrs::NodeAttributes;
use crate::graph::{Dyad, Network, PartialNetwork};
use crate::montecarlo::StatSample;
use crate::stats::{dot, StatVector, StatisticSpec, Statistics, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{specs} statistics but {eta} parameters")]
    Dimension { specs: usize, eta: usize },
    #[error("parameter {0} is not finite")]
    NonFinite(usize),
    #[error("network has {got} nodes (directed: {got_directed}), model expects {expected} (directed: {expected_directed})")]
    NetworkMismatch {
        got: usize,
        got_directed: bool,
        expected: usize,
        expected_directed: bool,
    },
}

/// An ERGM `P_η(y) ∝ exp(η·Z(y))` on networks of a fixed size.
#[derive(Debug, Clone)]
pub struct ErgmModel {
    specs: Vec<StatisticSpec>,
    eta: Vec<f64>,
    attrs: NodeAttributes,
    stats: Statistics,
}

impl ErgmModel {
    pub fn new(
        specs: Vec<StatisticSpec>,
        eta: Vec<f64>,
        attrs: NodeAttributes,
        n: usize,
        directed: bool,
    ) -> Result<Self, ModelError> {
        if specs.len() != eta.len() {
            return Err(ModelError::Dimension {
                specs: specs.len(),
                eta: eta.len(),
            });
        }
        if let Some(k) = eta.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(k));
        }
        let stats = Statistics::new(&specs, &attrs, n, directed)?;
        Ok(ErgmModel {
            specs,
            eta,
            attrs,
            stats,
        })
    }

    /// Same statistics, different natural parameters.
    pub fn with_eta(&self, eta: Vec<f64>) -> Result<Self, ModelError> {
        if eta.len() != self.specs.len() {
            return Err(ModelError::Dimension {
                specs: self.specs.len(),
                eta: eta.len(),
            });
        }
        if let Some(k) = eta.iter().position(|v| !v.is_finite()) {
            return Err(ModelError::NonFinite(k));
        }
        Ok(ErgmModel {
            eta,
            ..self.clone()
        })
    }

    pub fn specs(&self) -> &[StatisticSpec] {
        &self.specs
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    pub fn attrs(&self) -> &NodeAttributes {
        &self.attrs
    }

    pub fn statistics(&self) -> &Statistics {
        &self.stats
    }

    pub fn n(&self) -> usize {
        self.stats.n()
    }

    pub fn is_directed(&self) -> bool {
        self.stats.is_directed()
    }

    pub fn dim(&self) -> usize {
        self.specs.len()
    }

    pub(crate) fn check_network(&self, y: &Network) -> Result<(), ModelError> {
        if y.n() != self.n() || y.is_directed() != self.is_directed() {
            return Err(ModelError::NetworkMismatch {
                got: y.n(),
                got_directed: y.is_directed(),
                expected: self.n(),
                expected_directed: self.is_directed(),
            });
        }
        Ok(())
    }

    pub fn stats_of(&self, y: &Network) -> Result<StatVector, ModelError> {
        self.check_network(y)?;
        Ok(self.stats.compute(y))
    }

    /// `η·Z(y)`, the log-probability up to `κ(η)`.
    pub fn log_unnormalized(&self, y: &Network) -> Result<f64, ModelError> {
        Ok(self.stats_of(y)?.dot(&self.eta))
    }
}

/// Chain length controls. Counts are in single-dyad proposals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct McmcConfig {
    pub burn_in: usize,
    pub thin: usize,
    pub n_draws: usize,
    pub rng_seed: u64,
}

impl McmcConfig {
    /// Defaults scaled to the network: burn-in `10 n²`, thinning `n²`.
    pub fn for_size(n: usize, n_draws: usize, rng_seed: u64) -> Self {
        McmcConfig {
            burn_in: 10 * n * n,
            thin: (n * n).max(1),
            n_draws,
            rng_seed,
        }
    }

    pub fn with_seed(self, rng_seed: u64) -> Self {
        McmcConfig { rng_seed, ..self }
    }
}

/// Retained chain output.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub stats: StatSample,
    pub networks: Option<Vec<Network>>,
    pub acceptance_rate: f64,
    pub final_state: Network,
}

impl ChainOutput {
    pub fn effective_sizes(&self) -> Vec<f64> {
        self.stats.effective_sizes()
    }
}

/// Runs a toggle chain from `start`, proposing uniformly among `free` dyads.
///
/// With no free dyads the chain cannot move; every draw is `start`.
pub fn run_chain(
    model: &ErgmModel,
    start: Network,
    free: &[Dyad],
    config: &McmcConfig,
    keep_networks: bool,
) -> Result<ChainOutput, ModelError> {
    model.check_network(&start)?;
    let stats = model.statistics();
    let eta = model.eta();
    let p = model.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut y = start;
    let mut current = stats.compute(&y).0;
    let mut change = vec![0.0; p];
    let mut sample = StatSample::with_capacity(p, config.n_draws);
    let mut networks = keep_networks.then(|| Vec::with_capacity(config.n_draws));
    let mut proposals = 0u64;
    let mut accepted = 0u64;

    let mut step = |y: &mut Network, current: &mut Vec<f64>, rng: &mut ChaCha8Rng| {
        let d = free[rng.gen_range(0..free.len())];
        stats.change_into(y, d.i, d.j, &mut change);
        let sign = if y.has_edge(d.i, d.j) { -1.0 } else { 1.0 };
        let log_ratio = sign * dot(eta, &change);
        proposals += 1;
        if log_ratio >= 0.0 || rng.gen::<f64>() < log_ratio.exp() {
            y.toggle(d.i, d.j);
            for (c, dz) in current.iter_mut().zip(&change) {
                *c += sign * dz;
            }
            accepted += 1;
        }
    };

    if !free.is_empty() {
        for _ in 0..config.burn_in {
            step(&mut y, &mut current, &mut rng);
        }
    }
    for _ in 0..config.n_draws {
        if !free.is_empty() {
            for _ in 0..config.thin.max(1) {
                step(&mut y, &mut current, &mut rng);
            }
        }
        // resynchronise to avoid floating drift in the running sums
        current = stats.compute(&y).0;
        sample.push(&current);
        if let Some(nets) = networks.as_mut() {
            nets.push(y.clone());
        }
    }
    Ok(ChainOutput {
        stats: sample,
        networks,
        acceptance_rate: if proposals == 0 {
            0.0
        } else {
            accepted as f64 / proposals as f64
        },
        final_state: y,
    })
}

/// Draws statistic vectors from the unconstrained model.
pub fn simulate_full(
    model: &ErgmModel,
    start: Network,
    config: &McmcConfig,
    keep_networks: bool,
) -> Result<ChainOutput, ModelError> {
    let free: Vec<Dyad> = start.dyads().collect();
    run_chain(model, start, &free, config, keep_networks)
}

/// Draws from `P_η(Y_mis = v | Y_obs = y_obs)`; only missing dyads move.
pub fn simulate_constrained(
    model: &ErgmModel,
    partial: &PartialNetwork,
    start: Option<Network>,
    config: &McmcConfig,
    keep_networks: bool,
) -> Result<ChainOutput, ModelError> {
    let free = partial.missing_dyads();
    let start = match start {
        Some(y) => {
            model.check_network(&y)?;
            let mut y = y;
            for d in partial.pattern().observed_dyads() {
                y.set(d.i, d.j, partial.observed_ties().has_edge(d.i, d.j));
            }
            y
        }
        None => partial.zero_completion(),
    };
    run_chain(model, start, &free, config, keep_networks)
}

/// `n_draws` networks from the model, starting from the empty graph.
pub fn sample_full(model: &ErgmModel, config: &McmcConfig) -> Result<Vec<Network>, ModelError> {
    let start = Network::empty(model.n(), model.is_directed());
    Ok(simulate_full(model, start, config, true)?
        .networks
        .unwrap_or_default())
}

/// `n_draws` completions of `partial` drawn from the conditional model.
pub fn sample_constrained(
    model: &ErgmModel,
    partial: &PartialNetwork,
    config: &McmcConfig,
) -> Result<Vec<Network>, ModelError> {
    Ok(simulate_constrained(model, partial, None, config, true)?
        .networks
        .unwrap_or_default())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{NodeSet, ObservationPattern};

    fn edges_model(n: usize, theta: f64) -> ErgmModel {
        ErgmModel::new(
            vec![StatisticSpec::Edges],
            vec![theta],
            NodeAttributes::new(n),
            n,
            false,
        )
        .unwrap()
    }

    #[test]
    fn model_construction_errors() {
        let attrs = NodeAttributes::new(3);
        assert!(matches!(
            ErgmModel::new(vec![StatisticSpec::Edges], vec![], attrs.clone(), 3, false),
            Err(ModelError::Dimension { .. })
        ));
        assert!(matches!(
            ErgmModel::new(vec![StatisticSpec::Edges], vec![f64::NEG_INFINITY], attrs, 3, false),
            Err(ModelError::NonFinite(0))
        ));
    }

    #[test]
    fn log_unnormalized_values() {
        let y = Network::from_edges(4, false, [(0, 1), (2, 3), (1, 2)]).unwrap();
        assert_eq!(edges_model(4, 0.0).log_unnormalized(&y).unwrap(), 0.0);
        assert_eq!(edges_model(4, -0.5).log_unnormalized(&y).unwrap(), -1.5);
        assert!(edges_model(5, 1.0).log_unnormalized(&y).is_err());
    }

    #[test]
    fn acceptance_ratio_matches_log_density_difference() {
        let attrs = NodeAttributes::new(6)
            .with("g", vec![0.0, 1.0, 0.0, 1.0, 1.0, 0.0])
            .unwrap();
        let model = ErgmModel::new(
            vec![
                StatisticSpec::Edges,
                StatisticSpec::gwesp(0.7781),
                StatisticSpec::matching("g"),
            ],
            vec![-0.4, 0.6, 0.3],
            attrs,
            6,
            false,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut y = Network::empty(6, false);
        for _ in 0..200 {
            let i = rng.gen_range(0..6);
            let j = rng.gen_range(0..6);
            if i == j {
                continue;
            }
            let before = model.log_unnormalized(&y).unwrap();
            let sign = if y.has_edge(i, j) { -1.0 } else { 1.0 };
            let ratio = sign * model.statistics().change(&y, i, j).dot(model.eta());
            y.toggle(i, j);
            let after = model.log_unnormalized(&y).unwrap();
            assert!((after - before - ratio).abs() < 1e-10);
        }
    }

    #[test]
    fn chains_are_reproducible() {
        let model = edges_model(6, -0.3);
        let cfg = McmcConfig::for_size(6, 50, 99);
        let a = sample_full(&model, &cfg).unwrap();
        let b = sample_full(&model, &cfg).unwrap();
        assert_eq!(a, b);
        let c = sample_full(&model, &cfg.with_seed(100)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniform_model_has_half_density() {
        let model = edges_model(4, 0.0);
        let out = simulate_full(
            &model,
            Network::empty(4, false),
            &McmcConfig::for_size(4, 100_000, 5),
            false,
        )
        .unwrap();
        let mean = out.stats.mean()[0];
        let se = out.stats.mean_standard_errors()[0];
        assert!((mean - 3.0).abs() < 3.0 * se + 1e-3, "{mean} ± {se}");
        assert_eq!(out.acceptance_rate, 1.0);
    }

    #[test]
    fn edges_only_density_is_logistic() {
        let model = edges_model(8, (1.0f64 / 3.0).ln());
        let out = simulate_full(
            &model,
            Network::empty(8, false),
            &McmcConfig::for_size(8, 20_000, 6),
            false,
        )
        .unwrap();
        let density = out.stats.mean()[0] / 28.0;
        let se = out.stats.mean_standard_errors()[0] / 28.0;
        assert!((density - 0.25).abs() < 4.0 * se, "{density} ± {se}");
    }

    #[test]
    fn constrained_draws_respect_observed_dyads() {
        let y = Network::from_edges(6, false, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 5)]).unwrap();
        let pattern = ObservationPattern::from_selected(NodeSet::from_nodes(6, [1, 4]).unwrap(), false);
        let partial = PartialNetwork::restrict(&y, pattern).unwrap();
        let draws = sample_constrained(&edges_model(6, 0.2), &partial, &McmcConfig::for_size(6, 200, 1)).unwrap();
        assert_eq!(draws.len(), 200);
        for net in &draws {
            for d in partial.pattern().observed_dyads() {
                assert_eq!(Some(net.has_edge(d.i, d.j)), partial.value(d.i, d.j));
            }
        }
        assert!(draws.iter().any(|d| d != &draws[0]));
    }

    #[test]
    fn fully_observed_constrained_chain_is_static() {
        let y = Network::from_edges(4, false, [(0, 1), (2, 3)]).unwrap();
        let partial = PartialNetwork::full(&y);
        let draws = sample_constrained(&edges_model(4, 1.0), &partial, &McmcConfig::for_size(4, 10, 2)).unwrap();
        assert!(draws.iter().all(|d| d == &y));
    }
}
