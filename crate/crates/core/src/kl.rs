//! Mean-value parameters and KL divergence between two ERGMs on the same
//! statistics, by simulation.

use serde::{Deserialize, Serialize};

use crate::attrs::NodeAttributes;
use crate::graph::Network;
use crate::mcmc::{simulate_full, ErgmModel, McmcConfig, ModelError};
use crate::montecarlo::{batch_means_se, derive_seed, log_mean_exp, mean};
use crate::stats::{dot, StatisticSpec};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MeanValue {
    pub mean: Vec<f64>,
    pub standard_errors: Vec<f64>,
}

/// `E_η[Z(Y)]` estimated from a full-model chain.
pub fn mean_value_params(
    eta: &[f64],
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    config: &McmcConfig,
) -> Result<MeanValue, ModelError> {
    let model = ErgmModel::new(specs.to_vec(), eta.to_vec(), attrs.clone(), n, directed)?;
    let out = simulate_full(&model, Network::empty(n, directed), config, false)?;
    Ok(MeanValue {
        mean: out.stats.mean(),
        standard_errors: out.stats.mean_standard_errors(),
    })
}

/// Natural-to-mean-value map; an alias of [`mean_value_params`].
pub fn natural_to_mean_value(
    eta: &[f64],
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    config: &McmcConfig,
) -> Result<MeanValue, ModelError> {
    mean_value_params(eta, specs, attrs, n, directed, config)
}

/// A Monte Carlo estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub se: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KlConfig {
    pub mcmc: McmcConfig,
    /// Intermediate parameter points on the straight line from ξ to η.
    pub bridge_steps: usize,
}

impl KlConfig {
    pub fn new(mcmc: McmcConfig) -> Self {
        KlConfig { mcmc, bridge_steps: 8 }
    }
}

/// `κ(to) − κ(from)` as a sum of `log E_{θ_s}[exp((θ_{s+1} − θ_s)·Z)]` over
/// evenly spaced points `θ_s` between the two parameters.
#[allow(clippy::too_many_arguments)]
pub fn log_partition_difference(
    from: &[f64],
    to: &[f64],
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    config: &KlConfig,
    stream: u64,
) -> Result<Estimate, ModelError> {
    let steps = config.bridge_steps.max(1);
    let point = |s: usize| -> Vec<f64> {
        let t = s as f64 / steps as f64;
        from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect()
    };
    let mut value = 0.0;
    let mut var = 0.0;
    for s in 0..steps {
        let theta = point(s);
        let next = point(s + 1);
        let delta: Vec<f64> = next.iter().zip(&theta).map(|(a, b)| a - b).collect();
        let model = ErgmModel::new(specs.to_vec(), theta, attrs.clone(), n, directed)?;
        let cfg = config.mcmc.with_seed(derive_seed(config.mcmc.rng_seed, stream * 1024 + s as u64));
        let out = simulate_full(&model, Network::empty(n, directed), &cfg, false)?;
        let logs: Vec<f64> = out.stats.rows().map(|z| dot(&delta, z)).collect();
        let (v, se) = log_mean_exp(&logs);
        value += v;
        var += se * se;
    }
    Ok(Estimate { value, se: var.sqrt() })
}

/// `KL(ξ‖η) = (ξ − η)·E_ξ[Z] + κ(η) − κ(ξ)`.
pub fn kl_divergence(
    xi: &[f64],
    eta: &[f64],
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    config: &KlConfig,
) -> Result<Estimate, ModelError> {
    let model = ErgmModel::new(specs.to_vec(), xi.to_vec(), attrs.clone(), n, directed)?;
    let cfg = config.mcmc.with_seed(derive_seed(config.mcmc.rng_seed, u64::MAX));
    let out = simulate_full(&model, Network::empty(n, directed), &cfg, false)?;
    let diff: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a - b).collect();
    let series: Vec<f64> = out.stats.rows().map(|z| dot(&diff, z)).collect();
    let first = mean(&series);
    let first_se = if diff.iter().all(|d| *d == 0.0) {
        0.0
    } else {
        batch_means_se(&series)
    };
    let kappa = log_partition_difference(xi, eta, specs, attrs, n, directed, config, 0)?;
    Ok(Estimate {
        value: first + kappa.value,
        se: (first_se * first_se + kappa.se * kappa.se).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{exact_kl, log_partition, StatTable};
    use crate::stats::Statistics;

    fn specs() -> Vec<StatisticSpec> {
        vec![StatisticSpec::Edges, StatisticSpec::gwesp(0.5)]
    }

    #[test]
    fn uniform_mean_value() {
        let m = mean_value_params(
            &[0.0],
            &[StatisticSpec::Edges],
            &NodeAttributes::new(10),
            10,
            false,
            &McmcConfig::for_size(10, 4000, 2),
        )
        .unwrap();
        assert!((m.mean[0] - 22.5).abs() < 3.0 * m.standard_errors[0] + 1e-9, "{m:?}");
    }

    #[test]
    fn self_divergence_is_zero() {
        let cfg = KlConfig::new(McmcConfig::for_size(5, 500, 4));
        let kl = kl_divergence(&[-0.5, 0.2], &[-0.5, 0.2], &specs(), &NodeAttributes::new(5), 5, false, &cfg).unwrap();
        assert_eq!(kl.value, 0.0);
    }

    #[test]
    fn kl_matches_enumeration_and_bridging_is_antisymmetric() {
        let attrs = NodeAttributes::new(5);
        let stats = Statistics::new(&specs(), &attrs, 5, false).unwrap();
        let table = StatTable::full(&stats).unwrap();
        let (xi, eta) = ([-0.8, 0.3], [0.2, -0.1]);
        let cfg = KlConfig::new(McmcConfig::for_size(5, 4000, 9));
        let kl = kl_divergence(&xi, &eta, &specs(), &attrs, 5, false, &cfg).unwrap();
        let exact = exact_kl(&table, &xi, &eta);
        assert!((kl.value - exact).abs() < 3.0 * kl.se, "{kl:?} vs {exact}");

        let forward = log_partition_difference(&xi, &eta, &specs(), &attrs, 5, false, &cfg, 1).unwrap();
        let backward = log_partition_difference(&eta, &xi, &specs(), &attrs, 5, false, &cfg, 2).unwrap();
        let combined_se = (forward.se.powi(2) + backward.se.powi(2)).sqrt();
        assert!((forward.value + backward.value).abs() < 3.0 * combined_se);
        let truth = log_partition(&specs(), &attrs, 5, false, &eta).unwrap()
            - log_partition(&specs(), &attrs, 5, false, &xi).unwrap();
        assert!((forward.value - truth).abs() < 3.0 * forward.se);
    }
}
