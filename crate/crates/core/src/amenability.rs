//! Numerical check that a design can be ignored for likelihood inference:
//! the full-information likelihood `Σ_v P(D = d | y_obs + v) P_η(y_obs + v)`
//! should be a constant multiple of the face-value likelihood
//! `Σ_v P_η(y_obs + v)` as `η` varies.

use serde::Serialize;
use thiserror::Error;

use crate::attrs::NodeAttributes;
use crate::design::{DesignError, DesignRealization, DesignSpec, InitialSample, SamplingDesign};
use crate::exact::{ExactError, StatTable, DEFAULT_DYAD_BOUND};
use crate::graph::PartialNetwork;
use crate::montecarlo::log_sum_exp;
use crate::stats::{dot, StatisticSpec, Statistics};

/// Tolerance on the spread of the log-ratio.
pub const AMENABILITY_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmenabilityError {
    #[error(transparent)]
    Design(#[from] DesignError),
    #[error(transparent)]
    Exact(#[from] ExactError),
    #[error("the observed data has probability zero under the design")]
    ImpossibleData,
    #[error("empty parameter grid")]
    EmptyGrid,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmenabilityReport {
    /// Full-information minus face-value log-likelihood at each grid point.
    pub log_ratios: Vec<f64>,
    pub max_deviation: f64,
    pub proportional: bool,
}

/// Computes both likelihoods exhaustively over the completions of `partial`
/// at every `η` on the grid.
pub fn amenability_check<D: SamplingDesign + ?Sized>(
    design: &D,
    partial: &PartialNetwork,
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    eta_grid: &[Vec<f64>],
) -> Result<AmenabilityReport, AmenabilityError> {
    if eta_grid.is_empty() {
        return Err(AmenabilityError::EmptyGrid);
    }
    let stats = Statistics::new(specs, attrs, partial.n(), partial.is_directed()).map_err(ExactError::from)?;
    let missing = partial.missing_dyads();
    if missing.len() > DEFAULT_DYAD_BOUND {
        return Err(ExactError::TooManyDyads {
            dyads: missing.len(),
            bound: DEFAULT_DYAD_BOUND,
        }
        .into());
    }
    let full = StatTable::full(&stats)?;
    let completions: Vec<(Vec<f64>, f64)> = (0..1u64 << missing.len())
        .map(|code| {
            let y = partial.overlay_values(&missing, (0..missing.len()).map(|k| (code >> k) & 1 == 1));
            Ok((stats.compute(&y).0, design.probability(partial.pattern(), &y)?))
        })
        .collect::<Result<_, DesignError>>()?;
    if completions.iter().all(|(_, p)| *p == 0.0) {
        return Err(AmenabilityError::ImpossibleData);
    }
    let log_ratios: Vec<f64> = eta_grid
        .iter()
        .map(|eta| {
            let kappa = full.log_partition(eta);
            let face_value = log_sum_exp(completions.iter().map(|(z, _)| dot(eta, z))) - kappa;
            let full_information = log_sum_exp(completions.iter().map(|(z, p)| p.ln() + dot(eta, z))) - kappa;
            full_information - face_value
        })
        .collect();
    let lo = log_ratios.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = log_ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let max_deviation = hi - lo;
    Ok(AmenabilityReport {
        log_ratios,
        max_deviation,
        proportional: max_deviation <= AMENABILITY_TOLERANCE,
    })
}

/// `ψ̂ = 1·s_0 / n`, maximising `ψ^{1·s_0}(1 − ψ)^{n − 1·s_0}`; needs no
/// network model.
pub fn design_parameter_mle(realization: &DesignRealization, spec: &DesignSpec) -> Result<f64, DesignError> {
    match spec.initial {
        InitialSample::Bernoulli { .. } => {
            let s0 = realization.initial();
            Ok(s0.count() as f64 / s0.len() as f64)
        }
        InitialSample::FixedSeeds { .. } => Err(DesignError::NotBernoulli),
    }
}
