//! Exponential-family random graph models for networks observed through
//! sampling designs.
//!
//! The crate covers the full pipeline: sufficient statistics and
//! dyad-toggle MCMC for ERGMs, simulation and exact probabilities of
//! ego-centric and link-tracing designs, Horvitz–Thompson estimation where
//! inclusion probabilities are observable, face-value likelihood inference
//! for partially observed networks, and the seed-pair sampling study.

pub mod amenability;
pub mod attrs;
pub mod design;
pub mod exact;
pub mod graph;
pub mod horvitz_thompson;
pub mod io;
pub mod kl;
pub mod mcmc;
pub mod mle;
pub mod montecarlo;
pub mod stats;
pub mod study;

pub use amenability::{amenability_check, design_parameter_mle, AmenabilityError, AmenabilityReport};
pub use attrs::{AttributeError, NodeAttributes};
pub use design::{
    design_probability, trace, DesignError, DesignRealization, DesignSpec, InitialSample, SamplingDesign,
    WaveBound,
};
pub use horvitz_thompson::{
    egocentric_dyad_prob, ht_edge_total, ht_estimate, ht_variance, ht_variance_estimate, observability,
    pairwise_inclusion_prob, HtError, ObservabilityReport,
};
pub use exact::{exact_kl, exact_loglik, exact_mean_value, log_partition, ExactError, ExactLikelihood, StatTable};
pub use graph::{Dyad, GraphError, Network, NodeSet, ObservationPattern, PartialNetwork};
pub use io::{load_dataset, load_lazega, DatasetBundle, DatasetPaths, IoError};
pub use kl::{kl_divergence, mean_value_params, Estimate, KlConfig, MeanValue};
pub use mle::{mle_complete, mle_missing, FitConfig, FitError, FitResult};
pub use mcmc::{sample_constrained, sample_full, ErgmModel, McmcConfig, ModelError};
pub use stats::{
    change_stats, compute_stats, esp_histogram, lazega_specs, parse_specs, StatVector,
    StatisticSpec, StatsError,
};
pub use study::{
    complete_sampling_sd, figure2_data, run_study, summarize, BootstrapSd, Figure2Row, StudyConfig, StudyError,
    StudyRecord, StudySummary,
};
