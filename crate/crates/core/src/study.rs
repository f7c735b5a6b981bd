//! The seed-pair sampling study: every (or a seeded subsample of) two-wave
//! link-tracing sample from a pair of seeds, refitted and compared with the
//! complete-data fit.

use rand::seq::index::sample as sample_indices;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attrs::NodeAttributes;
use crate::design::{trace, DesignError, DesignSpec};
use crate::graph::{GraphError, Network, NodeSet, PartialNetwork};
use crate::kl::{kl_divergence, Estimate, KlConfig};
use crate::mcmc::{sample_full, ErgmModel, McmcConfig, ModelError};
use crate::mle::{mle_complete, mle_missing, FitConfig, FitError, FitResult};
use crate::montecarlo::derive_seed;
use crate::stats::{StatisticSpec, Statistics, StatsError};

/// Environment variable capping the worker count.
pub const THREADS_ENV: &str = "ERGM_SAMPLED_THREADS";

#[derive(Debug, Error)]
pub enum StudyError {
    #[error(transparent)]
    Fit(#[from] FitError),
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("the study needs an undirected network")]
    Directed,
    #[error("complete-data fit is not usable (degenerate or not converged)")]
    UnusableCompleteFit,
    #[error("bootstrap needs at least 2 replicates, got {0}")]
    TooFewReplicates(usize),
    #[error("only {usable} of {requested} bootstrap replicates gave usable fits")]
    BootstrapDegenerate { usable: usize, requested: usize },
    #[error("every record is excluded")]
    AllExcluded,
    #[error("thread pool: {0}")]
    Threads(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StudyConfig {
    pub fit: FitConfig,
    pub kl: KlConfig,
    /// Number of tracing waves from each seed pair.
    pub waves: usize,
    /// Seeded uniform subsample of seed pairs; `None` runs them all.
    pub subsample: Option<usize>,
    pub master_seed: u64,
}

impl StudyConfig {
    pub fn new(n: usize, master_seed: u64) -> Self {
        StudyConfig {
            fit: FitConfig::default(),
            kl: KlConfig::new(McmcConfig::for_size(n, 1000, master_seed)),
            waves: 2,
            subsample: Some(50),
            master_seed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudyRecord {
    pub seed_pair: (usize, usize),
    pub n_sampled_nodes: usize,
    pub n_observed_dyads: usize,
    pub n_observed_edges: usize,
    pub fit: FitResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub kl_from_complete: Option<Estimate>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub excluded: Option<String>,
}

impl StudyRecord {
    pub fn is_excluded(&self) -> bool {
        self.excluded.is_some()
    }
}

/// Worker pool honouring [`THREADS_ENV`].
pub fn thread_pool() -> Result<rayon::ThreadPool, StudyError> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(k) = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()) {
        builder = builder.num_threads(k.max(1));
    }
    builder.build().map_err(|e| StudyError::Threads(e.to_string()))
}

/// Unordered seed pairs in row-major order, optionally subsampled.
pub fn study_pairs(n: usize, subsample: Option<usize>, master_seed: u64) -> Vec<(usize, usize)> {
    let all: Vec<(usize, usize)> = (0..n).flat_map(|i| ((i + 1)..n).map(move |j| (i, j))).collect();
    match subsample {
        Some(m) if m < all.len() => {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(master_seed, 0x5eed));
            let mut picked = sample_indices(&mut rng, all.len(), m).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|k| all[k]).collect()
        }
        _ => all,
    }
}

fn pair_stream(n: usize, (i, j): (usize, usize)) -> u64 {
    (i * n + j) as u64
}

/// Fits one seed-pair sample. Degenerate fits become excluded records.
pub fn study_record(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    complete_eta: &[f64],
    pair: (usize, usize),
    config: &StudyConfig,
) -> Result<StudyRecord, StudyError> {
    let n = y.n();
    let seed = derive_seed(config.master_seed, pair_stream(n, pair));
    let s0 = NodeSet::from_nodes(n, [pair.0, pair.1])?;
    let realization = trace(&DesignSpec::seed_pair(config.waves), y, &s0)?;
    let n_sampled_nodes = realization.sampled_nodes();
    let n_observed_dyads = realization.observed_dyads();
    let partial = PartialNetwork::restrict(y, realization.pattern)?;
    let fit = mle_missing(&partial, attrs, specs, &config.fit.with_seed(seed))?;
    let (kl_from_complete, excluded) = match &fit.eta_hat {
        Some(eta) if !fit.degenerate => {
            let mut kl_cfg = config.kl;
            kl_cfg.mcmc = kl_cfg.mcmc.with_seed(derive_seed(seed, 1));
            let kl = kl_divergence(complete_eta, eta, specs, attrs, n, false, &kl_cfg)?;
            (Some(kl), None)
        }
        _ => (None, Some("degenerate MLE: observed statistics on the boundary of the convex hull".to_string())),
    };
    Ok(StudyRecord {
        seed_pair: pair,
        n_sampled_nodes,
        n_observed_dyads,
        n_observed_edges: partial.observed_edge_count(),
        fit,
        kl_from_complete,
        excluded,
    })
}

/// Runs every selected seed pair in parallel; records come back in pair order.
pub fn run_study(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    complete: &FitResult,
    config: &StudyConfig,
) -> Result<Vec<StudyRecord>, StudyError> {
    if y.is_directed() {
        return Err(StudyError::Directed);
    }
    let complete_eta = complete
        .eta_hat
        .as_ref()
        .filter(|_| !complete.degenerate)
        .ok_or(StudyError::UnusableCompleteFit)?;
    let pairs = study_pairs(y.n(), config.subsample, config.master_seed);
    thread_pool()?.install(|| {
        pairs
            .par_iter()
            .map(|&pair| study_record(y, attrs, specs, complete_eta, pair, config))
            .collect()
    })
}

/// Per-parameter spread of the complete-data estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapSd {
    pub natural: Vec<f64>,
    pub mean_value: Vec<f64>,
    pub usable: usize,
    pub dropped: usize,
}

fn sd(columns: &[Vec<f64>], k: usize) -> f64 {
    let xs: Vec<f64> = columns.iter().map(|r| r[k]).collect();
    crate::montecarlo::variance(&xs).sqrt()
}

/// Parametric bootstrap: `B` networks simulated at `η̂`, each refitted.
/// The mean-value MLE of a complete network is its own statistic vector.
pub fn complete_sampling_sd(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    eta_hat: &[f64],
    replicates: usize,
    config: &FitConfig,
) -> Result<BootstrapSd, StudyError> {
    if replicates < 2 {
        return Err(StudyError::TooFewReplicates(replicates));
    }
    let n = y.n();
    let model = ErgmModel::new(specs.to_vec(), eta_hat.to_vec(), attrs.clone(), n, y.is_directed())?;
    let mut mcmc = McmcConfig::for_size(n, replicates, derive_seed(config.seed, 0xb007));
    mcmc.burn_in = mcmc.burn_in.max(20 * n * n);
    let networks = sample_full(&model, &mcmc)?;
    let stats = Statistics::new(specs, attrs, n, y.is_directed())?;
    let fits: Vec<Option<(Vec<f64>, Vec<f64>)>> = thread_pool()?.install(|| {
        networks
            .par_iter()
            .enumerate()
            .map(|(b, net)| {
                let fit = mle_complete(net, attrs, specs, &config.with_seed(derive_seed(config.seed, b as u64)))?;
                Ok(fit
                    .is_usable()
                    .then(|| (fit.eta_hat.expect("usable"), stats.compute(net).0)))
            })
            .collect::<Result<_, FitError>>()
    })?;
    let usable: Vec<(Vec<f64>, Vec<f64>)> = fits.into_iter().flatten().collect();
    if usable.len() < 2 || 2 * usable.len() < replicates {
        return Err(StudyError::BootstrapDegenerate {
            usable: usable.len(),
            requested: replicates,
        });
    }
    let natural: Vec<Vec<f64>> = usable.iter().map(|(e, _)| e.clone()).collect();
    let means: Vec<Vec<f64>> = usable.iter().map(|(_, z)| z.clone()).collect();
    let p = specs.len();
    Ok(BootstrapSd {
        natural: (0..p).map(|k| sd(&natural, k)).collect(),
        mean_value: (0..p).map(|k| sd(&means, k)).collect(),
        usable: usable.len(),
        dropped: replicates - usable.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParameterSummary {
    pub parameter: String,
    pub complete_value: f64,
    pub bias_pct: f64,
    pub rmse_pct: f64,
    /// `100 · MSE / Var_full`; absent without a sampling-variance estimate.
    pub eff_loss_pct: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StudySummary {
    pub natural: Vec<ParameterSummary>,
    pub mean_value: Vec<ParameterSummary>,
    pub n_included: usize,
    pub n_excluded: usize,
}

fn summarise_parameter(
    parameter: String,
    reference: f64,
    estimates: &[f64],
    sd: Option<f64>,
) -> ParameterSummary {
    let m = estimates.len() as f64;
    let bias = estimates.iter().map(|e| e - reference).sum::<f64>() / m;
    let mse = estimates.iter().map(|e| (e - reference).powi(2)).sum::<f64>() / m;
    ParameterSummary {
        parameter,
        complete_value: reference,
        bias_pct: 100.0 * bias / reference,
        rmse_pct: 100.0 * mse.sqrt() / reference.abs(),
        eff_loss_pct: sd.map(|s| 100.0 * mse / (s * s)),
    }
}

/// Bias, RMSE and efficiency loss over the included records, relative to
/// the complete-data natural parameters and the observed statistics.
pub fn summarize(
    records: &[StudyRecord],
    complete: &FitResult,
    observed_stats: &[f64],
    sds: Option<&BootstrapSd>,
) -> Result<StudySummary, StudyError> {
    let complete_eta = complete.eta_hat.as_ref().ok_or(StudyError::UnusableCompleteFit)?;
    let included: Vec<&StudyRecord> = records
        .iter()
        .filter(|r| !r.is_excluded() && r.fit.eta_hat.is_some() && r.fit.mean_value.is_some())
        .collect();
    if included.is_empty() {
        return Err(StudyError::AllExcluded);
    }
    let p = complete_eta.len();
    let column = |k: usize, mean_value: bool| -> Vec<f64> {
        included
            .iter()
            .map(|r| {
                if mean_value {
                    r.fit.mean_value.as_ref().expect("filtered")[k]
                } else {
                    r.fit.eta_hat.as_ref().expect("filtered")[k]
                }
            })
            .collect()
    };
    let label = |k: usize| complete.terms.get(k).cloned().unwrap_or_else(|| format!("theta{k}"));
    Ok(StudySummary {
        natural: (0..p)
            .map(|k| summarise_parameter(label(k), complete_eta[k], &column(k, false), sds.map(|s| s.natural[k])))
            .collect(),
        mean_value: (0..p)
            .map(|k| summarise_parameter(label(k), observed_stats[k], &column(k, true), sds.map(|s| s.mean_value[k])))
            .collect(),
        n_included: included.len(),
        n_excluded: records.len() - included.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Figure2Row {
    pub seed_pair: (usize, usize),
    pub n_observed_dyads: usize,
    pub kl: f64,
    pub kl_se: f64,
    /// Above the plotting cutoff.
    pub outlier: bool,
}

/// `(observed dyads, KL)` for included records, sorted by dyad count.
pub fn figure2_data(records: &[StudyRecord], outlier_cutoff: f64) -> Vec<Figure2Row> {
    let mut rows: Vec<Figure2Row> = records
        .iter()
        .filter(|r| !r.is_excluded())
        .filter_map(|r| {
            r.kl_from_complete.map(|kl| Figure2Row {
                seed_pair: r.seed_pair,
                n_observed_dyads: r.n_observed_dyads,
                kl: kl.value,
                kl_se: kl.se,
                outlier: kl.value > outlier_cutoff,
            })
        })
        .collect();
    rows.sort_by_key(|r| (r.n_observed_dyads, r.seed_pair));
    rows
}
