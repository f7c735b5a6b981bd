//! Monte Carlo maximum likelihood for ERGMs from complete and from
//! partially observed networks.
//!
//! Each anchor `η₀` contributes a sample of `Z` from the full model (and,
//! with missing data, a sample of completions from the conditional model).
//! The importance-sampled log-likelihood ratio
//!
//! ```text
//! complete:  (η − η₀)·Z(y) − log Ê_{η₀}[exp((η − η₀)·Z)]
//! missing:   log Ê_{η₀}[exp((η − η₀)·Z) | y_obs] − log Ê_{η₀}[exp((η − η₀)·Z)]
//! ```
//!
//! is maximised by damped Newton steps that stop before the effective
//! sample size of the weights falls below a fraction of the draws; the
//! optimum becomes the next anchor.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attrs::NodeAttributes;
use crate::graph::{Dyad, Network, PartialNetwork};
use crate::mcmc::{simulate_constrained, simulate_full, ChainOutput, ErgmModel, McmcConfig, ModelError};
use crate::montecarlo::{derive_seed, log_mean_exp, log_sum_exp, normalised_weights, weighted_moments, StatSample};
use crate::stats::{dot, StatisticSpec, Statistics, StatsError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FitError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error("no dyad is observed")]
    AllMissing,
    #[error("invalid fit configuration: {0}")]
    Config(String),
}

const SECOND_START_STREAMS: u64 = 10_000;
const GAIN_BRIDGE_STREAMS: u64 = 20_000;
const GAIN_BRIDGE_STEPS: usize = 16;

/// Controls for the MCMC-MLE iterations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitConfig {
    /// Retained draws per chain at each anchor.
    pub draws: usize,
    /// Proposals before the first retained draw; `None` scales with `n²`.
    pub burn_in: Option<usize>,
    /// Proposals between retained draws; `None` uses `n²`.
    pub thin: Option<usize>,
    pub max_anchors: usize,
    /// Newton steps keep the weight ESS above this fraction of the draws.
    pub ess_fraction: f64,
    /// Convergence: every coordinate of the mean-value discrepancy at the
    /// anchor within this many Monte Carlo standard errors.
    pub convergence_se: f64,
    /// Draw multiplier for the final estimate.
    pub final_multiplier: usize,
    /// Any `|η̂_k|` above this marks the fit degenerate.
    pub eta_bound: f64,
    pub seed: u64,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            draws: 1000,
            burn_in: None,
            thin: None,
            max_anchors: 20,
            ess_fraction: 0.1,
            convergence_se: 3.0,
            final_multiplier: 2,
            eta_bound: 20.0,
            seed: 1,
        }
    }
}

impl FitConfig {
    pub fn with_seed(self, seed: u64) -> Self {
        FitConfig { seed, ..self }
    }

    fn validate(&self) -> Result<(), FitError> {
        if self.draws < 16 {
            return Err(FitError::Config("need at least 16 draws per chain".into()));
        }
        if self.max_anchors == 0 || self.final_multiplier == 0 {
            return Err(FitError::Config("max_anchors and final_multiplier must be positive".into()));
        }
        if !(0.0..1.0).contains(&self.ess_fraction) {
            return Err(FitError::Config("ess_fraction must lie in [0, 1)".into()));
        }
        Ok(())
    }

    fn mcmc(&self, n: usize, draws: usize, seed: u64) -> McmcConfig {
        let mut cfg = McmcConfig::for_size(n, draws, seed);
        if let Some(b) = self.burn_in {
            cfg.burn_in = b;
        }
        if let Some(t) = self.thin {
            cfg.thin = t;
        }
        cfg
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct McDiagnostics {
    pub acceptance_rate: f64,
    /// Per-statistic effective sample size of the final full-model chain.
    pub effective_sizes: Vec<f64>,
    pub anchors: usize,
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub terms: Vec<String>,
    /// Absent when the fit is degenerate.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta_hat: Option<Vec<f64>>,
    /// `E_η̂[Z]` from a fresh chain at `η̂`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_value: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_value_se: Option<Vec<f64>>,
    /// Moment-equation target: `Z(y)`, or the conditional mean of `Z` given
    /// `y_obs` at `η̂` for missing data.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target: Option<Vec<f64>>,
    pub converged: bool,
    pub degenerate: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_errors: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diagnostics: Option<McDiagnostics>,
    pub seed: u64,
}

impl FitResult {
    /// Usable for downstream summaries.
    pub fn is_usable(&self) -> bool {
        self.converged && !self.degenerate && self.eta_hat.is_some()
    }

    fn degenerate(specs: &[StatisticSpec], seed: u64, anchors: usize) -> Self {
        FitResult {
            terms: specs.iter().map(StatisticSpec::label).collect(),
            eta_hat: None,
            mean_value: None,
            mean_value_se: None,
            target: None,
            converged: false,
            degenerate: true,
            std_errors: None,
            diagnostics: (anchors > 0).then(|| McDiagnostics {
                acceptance_rate: 0.0,
                effective_sizes: Vec::new(),
                anchors,
                draws: 0,
            }),
            seed,
        }
    }
}

/// Logistic-regression fit of each dyad on its change statistics, used as
/// the starting anchor. `y` supplies the conditioning ties.
pub fn mple(stats: &Statistics, y: &Network, dyads: &[Dyad], bound: f64) -> Vec<f64> {
    let p = stats.len();
    let mut rows = Vec::with_capacity(dyads.len());
    let mut change = vec![0.0; p];
    for d in dyads {
        stats.change_into(y, d.i, d.j, &mut change);
        rows.push((change.clone(), if y.has_edge(d.i, d.j) { 1.0 } else { 0.0 }));
    }
    let mut beta = vec![0.0; p];
    for _ in 0..100 {
        let mut grad = DVector::<f64>::zeros(p);
        let mut info = DMatrix::<f64>::identity(p, p) * 1e-6;
        for (x, resp) in &rows {
            let mu = 1.0 / (1.0 + (-dot(&beta, x)).exp());
            let w = mu * (1.0 - mu);
            for a in 0..p {
                grad[a] += (resp - mu) * x[a];
                for b in 0..p {
                    info[(a, b)] += w * x[a] * x[b];
                }
            }
        }
        let Some(step) = info.cholesky().map(|c| c.solve(&grad)) else {
            break;
        };
        for (b, s) in beta.iter_mut().zip(step.iter()) {
            *b = (*b + s).clamp(-bound, bound);
        }
        if step.amax() < 1e-8 {
            break;
        }
    }
    beta
}

/// Trivial hull-boundary cases with an edges term: no observed ties, or
/// every observed dyad a tie.
fn trivially_degenerate(specs: &[StatisticSpec], observed_edges: usize, observed_dyads: usize) -> bool {
    specs.iter().any(|s| matches!(s, StatisticSpec::Edges)) && (observed_edges == 0 || observed_edges == observed_dyads)
}

struct Chains {
    full: ChainOutput,
    constrained: Option<ChainOutput>,
}

/// Importance-sampling objective around an anchor.
struct Surface<'a> {
    full: &'a StatSample,
    constrained: Option<&'a StatSample>,
    target: &'a [f64],
    min_ess: f64,
}

impl Surface<'_> {
    fn log_mean(sample: &StatSample, delta: &[f64]) -> f64 {
        log_sum_exp(sample.rows().map(|z| dot(delta, z))) - (sample.len() as f64).ln()
    }

    fn value(&self, delta: &[f64]) -> f64 {
        let lhs = match self.constrained {
            Some(c) => Self::log_mean(c, delta),
            None => dot(delta, self.target),
        };
        lhs - Self::log_mean(self.full, delta)
    }

    fn moments(sample: &StatSample, delta: &[f64]) -> (Vec<f64>, Vec<Vec<f64>>, f64) {
        let logw: Vec<f64> = sample.rows().map(|z| dot(delta, z)).collect();
        let (w, ess) = normalised_weights(&logw);
        let (m, c) = weighted_moments(sample, &w);
        (m, c, ess)
    }

    /// Gradient, negative Hessian, and the smallest weight ESS.
    fn local(&self, delta: &[f64]) -> (Vec<f64>, DMatrix<f64>, f64) {
        let p = delta.len();
        let (mf, cf, essf) = Self::moments(self.full, delta);
        let (target, cc, essc) = match self.constrained {
            Some(c) => Self::moments(c, delta),
            None => (self.target.to_vec(), vec![vec![0.0; p]; p], f64::INFINITY),
        };
        let grad = target.iter().zip(&mf).map(|(a, b)| a - b).collect();
        let neg_hess = DMatrix::from_fn(p, p, |a, b| cf[a][b] - cc[a][b]);
        (grad, neg_hess, essf.min(essc))
    }

    fn ess(&self, delta: &[f64]) -> f64 {
        let ess = |s: &StatSample| normalised_weights(&s.rows().map(|z| dot(delta, z)).collect::<Vec<_>>()).1;
        let e = ess(self.full);
        self.constrained.map_or(e, |c| e.min(ess(c)))
    }

    /// Damped Newton ascent from `δ = 0`; returns the offset from the anchor.
    fn maximise(&self, p: usize) -> Vec<f64> {
        let mut delta = vec![0.0; p];
        let mut value = self.value(&delta);
        for _ in 0..100 {
            let (grad, neg_hess, _) = self.local(&delta);
            let step = solve_spd(&neg_hess, &grad)
                .or_else(|| {
                    // fall back to the full-model curvature when the
                    // missing-data observed information is not positive
                    let (_, cf, _) = Self::moments(self.full, &delta);
                    solve_spd(&DMatrix::from_fn(p, p, |a, b| cf[a][b]), &grad)
                })
                .unwrap_or_else(|| grad.clone());
            let mut scale = 1.0;
            let mut moved = false;
            while scale > 1e-6 {
                let trial: Vec<f64> = delta.iter().zip(&step).map(|(d, s)| d + scale * s).collect();
                if self.ess(&trial) >= self.min_ess {
                    let v = self.value(&trial);
                    if v >= value - 1e-12 {
                        delta = trial;
                        value = v;
                        moved = true;
                        break;
                    }
                }
                scale *= 0.5;
            }
            if !moved || step.iter().map(|s| (scale * s).abs()).fold(0.0, f64::max) < 1e-9 {
                break;
            }
        }
        delta
    }
}

fn solve_spd(m: &DMatrix<f64>, rhs: &[f64]) -> Option<Vec<f64>> {
    let p = rhs.len();
    let scale = (0..p).map(|k| m[(k, k)].abs()).fold(0.0, f64::max).max(1e-12);
    let ridged = m + DMatrix::identity(p, p) * (1e-10 * scale);
    ridged
        .cholesky()
        .map(|c| c.solve(&DVector::from_column_slice(rhs)).iter().copied().collect())
}

fn inverse_sqrt_diag(info: &[Vec<f64>]) -> Option<Vec<f64>> {
    let p = info.len();
    let m = DMatrix::from_fn(p, p, |a, b| info[a][b]);
    let inv = m.cholesky()?.inverse();
    Some((0..p).map(|k| inv[(k, k)].sqrt()).collect())
}

struct Problem<'a> {
    specs: &'a [StatisticSpec],
    attrs: &'a NodeAttributes,
    partial: &'a PartialNetwork,
    missing: bool,
    config: &'a FitConfig,
}

impl Problem<'_> {
    fn n(&self) -> usize {
        self.partial.n()
    }

    fn model(&self, eta: &[f64]) -> Result<ErgmModel, ModelError> {
        ErgmModel::new(
            self.specs.to_vec(),
            eta.to_vec(),
            self.attrs.clone(),
            self.n(),
            self.partial.is_directed(),
        )
    }

    fn run(&self, eta: &[f64], draws: usize, stream: u64, starts: (Network, Network)) -> Result<Chains, ModelError> {
        let model = self.model(eta)?;
        let full_cfg = self.config.mcmc(self.n(), draws, derive_seed(self.config.seed, 2 * stream));
        let cons_cfg = self.config.mcmc(self.n(), draws, derive_seed(self.config.seed, 2 * stream + 1));
        let (full_start, cons_start) = starts;
        if self.missing {
            let (full, constrained) = rayon::join(
                || simulate_full(&model, full_start, &full_cfg, false),
                || simulate_constrained(&model, self.partial, Some(cons_start), &cons_cfg, false),
            );
            Ok(Chains {
                full: full?,
                constrained: Some(constrained?),
            })
        } else {
            Ok(Chains {
                full: simulate_full(&model, full_start, &full_cfg, false)?,
                constrained: None,
            })
        }
    }

    /// Mean-value discrepancy at the anchor, in Monte Carlo standard errors.
    fn discrepancy_ok(&self, chains: &Chains, target: &[f64]) -> bool {
        let mf = chains.full.stats.mean();
        let sef = chains.full.stats.mean_standard_errors();
        let (goal, sec) = match &chains.constrained {
            Some(c) => (c.stats.mean(), c.stats.mean_standard_errors()),
            None => (target.to_vec(), vec![0.0; target.len()]),
        };
        (0..mf.len()).all(|k| {
            let gap = (mf[k] - goal[k]).abs();
            let se = (sef[k].powi(2) + sec[k].powi(2)).sqrt();
            // constant coordinates have zero spread and must agree exactly
            gap <= self.config.convergence_se * se || gap < 1e-9
        })
    }

    fn fit(&self) -> Result<FitResult, FitError> {
        let config = self.config;
        config.validate()?;
        let stats = Statistics::new(self.specs, self.attrs, self.n(), self.partial.is_directed())?;
        let observed = self.partial.pattern().observed_dyads().collect::<Vec<_>>();
        if observed.is_empty() {
            return Err(FitError::AllMissing);
        }
        if trivially_degenerate(self.specs, self.partial.observed_edge_count(), observed.len()) {
            return Ok(FitResult::degenerate(self.specs, config.seed, 0));
        }
        let start_net = self.partial.zero_completion();
        let z_obs = stats.compute(&start_net).0;
        let mple_start = mple(&stats, &start_net, &observed, config.eta_bound);
        let first = self.fit_from(mple_start.clone(), 0, &z_obs)?;
        if !self.missing {
            return Ok(first);
        }
        // The face-value likelihood need not be concave, and the MPLE can
        // land on a plateau where every gradient vanishes (a term pushed so
        // far that its statistic is frozen). A second fit from the
        // density-only start catches that; the better of the two wins.
        let density_start = self.density_start(observed.len());
        if density_start == mple_start {
            return Ok(first);
        }
        let second = self.fit_from(density_start, SECOND_START_STREAMS, &z_obs)?;
        self.better(first, second)
    }

    /// Edges at the logit of the observed density, every other term zero.
    fn density_start(&self, observed_dyads: usize) -> Vec<f64> {
        let ties = self.partial.observed_edge_count() as f64;
        let density = ties / observed_dyads as f64;
        self.specs
            .iter()
            .map(|s| match s {
                StatisticSpec::Edges if density > 0.0 && density < 1.0 => (density / (1.0 - density)).ln(),
                _ => 0.0,
            })
            .collect()
    }

    fn better(&self, first: FitResult, second: FitResult) -> Result<FitResult, FitError> {
        let (a, b) = match (&first.eta_hat, &second.eta_hat) {
            (Some(a), Some(b)) if first.is_usable() && second.is_usable() => (a, b),
            _ if second.is_usable() && !first.is_usable() => return Ok(second),
            _ => return Ok(first),
        };
        // Same optimum up to Monte Carlo noise.
        if let Some(se) = &first.std_errors {
            if a.iter().zip(b).zip(se).all(|((x, y), s)| (x - y).abs() <= *s) {
                return Ok(first);
            }
        }
        let gain = self.log_likelihood_gain(a, b)?;
        Ok(if gain > 0.0 { second } else { first })
    }

    /// `ℓ(to) − ℓ(from)` along the segment, by two-sided geometric bridges
    /// between neighbouring points: each log-normaliser step is
    /// `log Ê_{θ_s}[exp(δ·Z/2)] − log Ê_{θ_{s+1}}[exp(−δ·Z/2)]`, taken for the
    /// conditional and the full model alike.
    fn log_likelihood_gain(&self, from: &[f64], to: &[f64]) -> Result<f64, FitError> {
        let start_net = self.partial.zero_completion();
        let half: Vec<f64> = from.iter().zip(to).map(|(a, b)| 0.5 * (b - a) / GAIN_BRIDGE_STEPS as f64).collect();
        let tilt = |sample: &StatSample, sign: f64| {
            log_mean_exp(&sample.rows().map(|z| sign * dot(&half, z)).collect::<Vec<_>>()).0
        };
        let mut gain = 0.0;
        let mut previous: Option<Chains> = None;
        for s in 0..=GAIN_BRIDGE_STEPS {
            let t = s as f64 / GAIN_BRIDGE_STEPS as f64;
            let theta: Vec<f64> = from.iter().zip(to).map(|(a, b)| a + t * (b - a)).collect();
            let chains = self.run(
                &theta,
                self.config.draws,
                GAIN_BRIDGE_STREAMS + s as u64,
                (start_net.clone(), start_net.clone()),
            )?;
            if let Some(prev) = &previous {
                let (pc, cc) = (
                    &prev.constrained.as_ref().expect("missing-data chains").stats,
                    &chains.constrained.as_ref().expect("missing-data chains").stats,
                );
                let step_c = tilt(pc, 1.0) - tilt(cc, -1.0);
                let step_f = tilt(&prev.full.stats, 1.0) - tilt(&chains.full.stats, -1.0);
                gain += step_c - step_f;
            }
            previous = Some(chains);
        }
        Ok(gain)
    }

    /// MCMC-MLE iterations from `start`; chain streams are offset by `streams`.
    fn fit_from(&self, start: Vec<f64>, streams: u64, z_obs: &[f64]) -> Result<FitResult, FitError> {
        let config = self.config;
        let p = self.specs.len();
        let terms: Vec<String> = self.specs.iter().map(StatisticSpec::label).collect();
        let start_net = self.partial.zero_completion();
        let z_obs = z_obs.to_vec();
        let mut eta = start;
        let mut starts = (start_net.clone(), start_net.clone());
        let min_ess = config.ess_fraction * config.draws as f64;

        let mut anchors = 0;
        let mut converged = false;
        while anchors < config.max_anchors {
            let chains = self.run(&eta, config.draws, streams + anchors as u64, starts.clone())?;
            anchors += 1;
            starts = (
                chains.full.final_state.clone(),
                chains.constrained.as_ref().map_or(start_net.clone(), |c| c.final_state.clone()),
            );
            if self.discrepancy_ok(&chains, &z_obs) {
                converged = true;
                break;
            }
            let surface = Surface {
                full: &chains.full.stats,
                constrained: chains.constrained.as_ref().map(|c| &c.stats),
                target: &z_obs,
                min_ess,
            };
            let delta = surface.maximise(p);
            eta.iter_mut().zip(&delta).for_each(|(e, d)| *e += d);
            if eta.iter().any(|e| e.abs() > config.eta_bound) {
                return Ok(FitResult::degenerate(self.specs, config.seed, anchors));
            }
        }

        // final refinement from a larger sample at the last anchor
        let big = config.draws * config.final_multiplier;
        let chains = self.run(&eta, big, streams + 1000 + anchors as u64, starts.clone())?;
        let surface = Surface {
            full: &chains.full.stats,
            constrained: chains.constrained.as_ref().map(|c| &c.stats),
            target: &z_obs,
            min_ess: config.ess_fraction * big as f64,
        };
        let delta = surface.maximise(p);
        eta.iter_mut().zip(&delta).for_each(|(e, d)| *e += d);
        if eta.iter().any(|e| e.abs() > config.eta_bound) {
            return Ok(FitResult::degenerate(self.specs, config.seed, anchors));
        }

        let starts = (
            chains.full.final_state.clone(),
            chains.constrained.as_ref().map_or(start_net.clone(), |c| c.final_state.clone()),
        );
        let check = self.run(&eta, big, streams + 2000 + anchors as u64, starts)?;
        let mean_value = check.full.stats.mean();
        let mean_value_se = check.full.stats.mean_standard_errors();
        let cov_full = check.full.stats.covariance();
        let (target, info) = match &check.constrained {
            Some(c) => {
                let cc = c.stats.covariance();
                let info = cov_full
                    .iter()
                    .zip(&cc)
                    .map(|(ra, rb)| ra.iter().zip(rb).map(|(a, b)| a - b).collect())
                    .collect::<Vec<Vec<f64>>>();
                (c.stats.mean(), info)
            }
            None => (z_obs.clone(), cov_full),
        };
        Ok(FitResult {
            terms,
            eta_hat: Some(eta),
            mean_value: Some(mean_value),
            mean_value_se: Some(mean_value_se),
            target: Some(target),
            converged,
            degenerate: false,
            std_errors: inverse_sqrt_diag(&info),
            diagnostics: Some(McDiagnostics {
                acceptance_rate: check.full.acceptance_rate,
                effective_sizes: check.full.effective_sizes(),
                anchors,
                draws: big,
            }),
            seed: config.seed,
        })
    }
}

/// MLE from a fully observed network.
pub fn mle_complete(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    config: &FitConfig,
) -> Result<FitResult, FitError> {
    let partial = PartialNetwork::full(y);
    Problem {
        specs,
        attrs,
        partial: &partial,
        missing: false,
        config,
    }
    .fit()
}

/// Face-value MLE from a partially observed network. With nothing missing
/// this is exactly `mle_complete`.
pub fn mle_missing(
    partial: &PartialNetwork,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    config: &FitConfig,
) -> Result<FitResult, FitError> {
    if partial.pattern().missing_count() == 0 {
        return mle_complete(partial.observed_ties(), attrs, specs, config);
    }
    Problem {
        specs,
        attrs,
        partial,
        missing: true,
        config,
    }
    .fit()
}
