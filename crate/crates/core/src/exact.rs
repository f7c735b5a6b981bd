//! Exact ERGM quantities by enumerating networks: normalising constants,
//! face-value log-likelihoods, moments, KL divergences and the exact MLE.
//! Only for tiny networks; these serve as oracles for the Monte Carlo code.

use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::attrs::NodeAttributes;
use crate::graph::{Dyad, Network, PartialNetwork};
use crate::montecarlo::log_sum_exp;
use crate::stats::{dot, StatisticSpec, Statistics, StatsError};

/// Largest number of free dyads enumerated by default.
pub const DEFAULT_DYAD_BOUND: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("{dyads} free dyads exceed the enumeration bound {bound}")]
    TooManyDyads { dyads: usize, bound: usize },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("{expected} parameters expected, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("exact Newton iteration did not converge (max |gradient| {0:e})")]
    NotConverged(f64),
}

/// Distinct statistic vectors over a set of networks, with multiplicities.
#[derive(Debug, Clone)]
pub struct StatTable {
    dim: usize,
    entries: Vec<(Vec<f64>, f64)>,
}

impl StatTable {
    /// Every network on the statistics' node set.
    pub fn full(stats: &Statistics) -> Result<Self, ExactError> {
        let y = Network::empty(stats.n(), stats.is_directed());
        let free: Vec<Dyad> = y.dyads().collect();
        Self::enumerate(stats, y, &free, DEFAULT_DYAD_BOUND)
    }

    /// Every completion of `partial`.
    pub fn completions(stats: &Statistics, partial: &PartialNetwork) -> Result<Self, ExactError> {
        Self::enumerate(stats, partial.zero_completion(), &partial.missing_dyads(), DEFAULT_DYAD_BOUND)
    }

    /// Gray-code walk over all settings of `free`, starting from `base`.
    pub fn enumerate(stats: &Statistics, base: Network, free: &[Dyad], bound: usize) -> Result<Self, ExactError> {
        if free.len() > bound {
            return Err(ExactError::TooManyDyads {
                dyads: free.len(),
                bound,
            });
        }
        let dim = stats.len();
        let mut y = base;
        let mut z = stats.compute(&y).0;
        let mut change = vec![0.0; dim];
        let mut index: HashMap<Vec<i64>, usize> = HashMap::new();
        let mut entries: Vec<(Vec<f64>, f64)> = Vec::new();
        let mut record = |z: &[f64]| {
            let key: Vec<i64> = z.iter().map(|v| (v * 1e8).round() as i64).collect();
            let slot = *index.entry(key).or_insert_with(|| {
                entries.push((z.to_vec(), 0.0));
                entries.len() - 1
            });
            entries[slot].1 += 1.0;
        };
        record(&z);
        for t in 1u64..(1u64 << free.len()) {
            let d = free[t.trailing_zeros() as usize];
            stats.change_into(&y, d.i, d.j, &mut change);
            let sign = if y.has_edge(d.i, d.j) { -1.0 } else { 1.0 };
            y.toggle(d.i, d.j);
            for (v, dz) in z.iter_mut().zip(&change) {
                *v += sign * dz;
            }
            record(&z);
        }
        Ok(StatTable { dim, entries })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of networks enumerated.
    pub fn size(&self) -> f64 {
        self.entries.iter().map(|(_, c)| c).sum()
    }

    pub fn entries(&self) -> &[(Vec<f64>, f64)] {
        &self.entries
    }

    /// `log Σ exp(η·Z(y))` over the enumerated networks.
    pub fn log_partition(&self, eta: &[f64]) -> f64 {
        log_sum_exp(self.entries.iter().map(|(z, c)| c.ln() + dot(eta, z)))
    }

    /// Mean and covariance of `Z` under the tilted distribution.
    pub fn moments(&self, eta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>) {
        let kappa = self.log_partition(eta);
        let p = self.dim;
        let probs: Vec<f64> = self
            .entries
            .iter()
            .map(|(z, c)| (c.ln() + dot(eta, z) - kappa).exp())
            .collect();
        let mut mean = vec![0.0; p];
        for ((z, _), w) in self.entries.iter().zip(&probs) {
            for (m, v) in mean.iter_mut().zip(z) {
                *m += w * v;
            }
        }
        let mut cov = vec![vec![0.0; p]; p];
        for ((z, _), w) in self.entries.iter().zip(&probs) {
            for a in 0..p {
                for b in 0..p {
                    cov[a][b] += w * (z[a] - mean[a]) * (z[b] - mean[b]);
                }
            }
        }
        (mean, cov)
    }

    /// `P_η(Z = z)` for every distinct statistic vector.
    pub fn probabilities(&self, eta: &[f64]) -> Vec<f64> {
        let kappa = self.log_partition(eta);
        self.entries
            .iter()
            .map(|(z, c)| (c.ln() + dot(eta, z) - kappa).exp())
            .collect()
    }
}

fn check_dim(expected: usize, eta: &[f64]) -> Result<(), ExactError> {
    if eta.len() == expected {
        Ok(())
    } else {
        Err(ExactError::Dimension {
            expected,
            got: eta.len(),
        })
    }
}

/// `κ(η)` over all networks on `n` nodes.
pub fn log_partition(
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    eta: &[f64],
) -> Result<f64, ExactError> {
    check_dim(specs.len(), eta)?;
    let stats = Statistics::new(specs, attrs, n, directed)?;
    Ok(StatTable::full(&stats)?.log_partition(eta))
}

/// `E_η[Z(Y)]` by enumeration.
pub fn exact_mean_value(
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    n: usize,
    directed: bool,
    eta: &[f64],
) -> Result<Vec<f64>, ExactError> {
    check_dim(specs.len(), eta)?;
    let stats = Statistics::new(specs, attrs, n, directed)?;
    Ok(StatTable::full(&stats)?.moments(eta).0)
}

/// `KL(ξ‖η) = (ξ − η)·E_ξ[Z] + κ(η) − κ(ξ)` from a full table.
pub fn exact_kl(table: &StatTable, xi: &[f64], eta: &[f64]) -> f64 {
    let (mean, _) = table.moments(xi);
    let diff: Vec<f64> = xi.iter().zip(eta).map(|(a, b)| a - b).collect();
    dot(&diff, &mean) + table.log_partition(eta) - table.log_partition(xi)
}

/// Face-value log-likelihood `κ(η | y_obs) − κ(η)` with both normalising
/// constants enumerated.
#[derive(Debug, Clone)]
pub struct ExactLikelihood {
    pub full: StatTable,
    pub constrained: StatTable,
}

impl ExactLikelihood {
    pub fn new(stats: &Statistics, partial: &PartialNetwork) -> Result<Self, ExactError> {
        Ok(ExactLikelihood {
            full: StatTable::full(stats)?,
            constrained: StatTable::completions(stats, partial)?,
        })
    }

    pub fn from_specs(
        specs: &[StatisticSpec],
        attrs: &NodeAttributes,
        partial: &PartialNetwork,
    ) -> Result<Self, ExactError> {
        let stats = Statistics::new(specs, attrs, partial.n(), partial.is_directed())?;
        Self::new(&stats, partial)
    }

    pub fn loglik(&self, eta: &[f64]) -> f64 {
        self.constrained.log_partition(eta) - self.full.log_partition(eta)
    }

    /// `E_η[Z | Y_obs] − E_η[Z]`.
    pub fn gradient(&self, eta: &[f64]) -> Vec<f64> {
        let (c, _) = self.constrained.moments(eta);
        let (f, _) = self.full.moments(eta);
        c.iter().zip(&f).map(|(a, b)| a - b).collect()
    }

    /// `Cov_η[Z | Y_obs] − Cov_η[Z]`.
    pub fn hessian(&self, eta: &[f64]) -> Vec<Vec<f64>> {
        let (_, c) = self.constrained.moments(eta);
        let (_, f) = self.full.moments(eta);
        c.iter()
            .zip(&f)
            .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a - b).collect())
            .collect()
    }

    /// Damped Newton ascent to `|gradient| < tol`.
    pub fn newton_mle(&self, start: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>, ExactError> {
        check_dim(self.full.dim(), start)?;
        let p = start.len();
        let mut eta = start.to_vec();
        let mut value = self.loglik(&eta);
        for _ in 0..max_iter {
            let g = self.gradient(&eta);
            let max_g = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if max_g < tol {
                return Ok(eta);
            }
            let h = self.hessian(&eta);
            let neg_h = DMatrix::from_fn(p, p, |a, b| -h[a][b]);
            let grad = DVector::from_vec(g.clone());
            let step = match neg_h.clone().cholesky() {
                Some(chol) => chol.solve(&grad),
                None => grad.clone(),
            };
            let mut scale = 1.0;
            loop {
                let trial: Vec<f64> = eta.iter().zip(step.iter()).map(|(e, s)| e + scale * s).collect();
                let trial_value = self.loglik(&trial);
                if trial_value >= value - 1e-14 || scale < 1e-10 {
                    eta = trial;
                    value = trial_value;
                    break;
                }
                scale *= 0.5;
            }
        }
        let g = self.gradient(&eta);
        let max_g = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_g < tol {
            Ok(eta)
        } else {
            Err(ExactError::NotConverged(max_g))
        }
    }
}

/// `log Σ_v exp(η·Z(y_obs + v)) − κ(η)`.
pub fn exact_loglik(
    specs: &[StatisticSpec],
    attrs: &NodeAttributes,
    eta: &[f64],
    partial: &PartialNetwork,
) -> Result<f64, ExactError> {
    check_dim(specs.len(), eta)?;
    Ok(ExactLikelihood::from_specs(specs, attrs, partial)?.loglik(eta))
}
