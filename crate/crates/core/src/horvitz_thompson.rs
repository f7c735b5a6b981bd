//! Horvitz–Thompson estimation of the edge total under ego-centric
//! sampling, and which inclusion probabilities each design reveals.
//!
//! For three distinct nodes with a shared endpoint, the probability that
//! both dyads are observed is `ψ + ψ² − ψ³`: the shared node is sampled, or
//! it is not and both other endpoints are. The occasionally quoted
//! `ψ³ − 3ψ²` is negative on (0, 1] and is not used.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::design::{DesignFamily, DesignSpec, InitialSample, WaveBound};
use crate::graph::{Dyad, Network, NodeSet, PartialNetwork};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HtError {
    #[error("psi = {0} must lie in (0, 1]")]
    Psi(f64),
    #[error("dyadic inclusion probabilities are not observable under {0}")]
    Unobservable(Scheme),
    #[error("Horvitz-Thompson estimation needs a Bernoulli initial sample")]
    NotBernoulli,
    #[error("partial network is {partial} but design is {design}")]
    Directedness {
        partial: &'static str,
        design: &'static str,
    },
}

fn check_psi(psi: f64) -> Result<(), HtError> {
    if psi > 0.0 && psi <= 1.0 {
        Ok(())
    } else {
        Err(HtError::Psi(psi))
    }
}

/// `π_ij = 1 − (1 − ψ)²`.
pub fn egocentric_dyad_prob(psi: f64) -> f64 {
    1.0 - (1.0 - psi).powi(2)
}

/// Dyadic inclusion probability of an ego-centric design; a directed dyad
/// is observed exactly when its sender is sampled.
pub fn dyad_prob(psi: f64, directed: bool) -> f64 {
    if directed {
        psi
    } else {
        egocentric_dyad_prob(psi)
    }
}

/// `π_ij,kl` for two undirected dyads under Bernoulli(ψ) ego-centric sampling.
pub fn pairwise_inclusion_prob(psi: f64, a: Dyad, b: Dyad) -> f64 {
    let a = Dyad::unordered(a.i, a.j);
    let b = Dyad::unordered(b.i, b.j);
    if a == b {
        return egocentric_dyad_prob(psi);
    }
    let shared = [a.i, a.j].iter().filter(|v| **v == b.i || **v == b.j).count();
    if shared == 0 {
        egocentric_dyad_prob(psi).powi(2)
    } else {
        psi + psi * psi - psi.powi(3)
    }
}

/// Directed analogue: both dyads are observed iff both senders are sampled.
pub fn pairwise_inclusion_prob_directed(psi: f64, a: Dyad, b: Dyad) -> f64 {
    if a.i == b.i {
        psi
    } else {
        psi * psi
    }
}

fn pairwise(psi: f64, a: Dyad, b: Dyad, directed: bool) -> f64 {
    if directed {
        pairwise_inclusion_prob_directed(psi, a, b)
    } else {
        pairwise_inclusion_prob(psi, a, b)
    }
}

/// `τ̂ = π^{-1} Σ_{observed} y_ij` for an ego-centric sample.
pub fn ht_edge_total(partial: &PartialNetwork, psi: f64) -> Result<f64, HtError> {
    check_psi(psi)?;
    Ok(partial.observed_edge_count() as f64 / dyad_prob(psi, partial.is_directed()))
}

fn variance_sum(edges: &[Dyad], psi: f64, directed: bool, estimate: bool) -> f64 {
    let pi = dyad_prob(psi, directed);
    let mut total = 0.0;
    for &a in edges {
        for &b in edges {
            let joint = pairwise(psi, a, b, directed);
            let term = joint / (pi * pi) - 1.0;
            total += if estimate { term / joint } else { term };
        }
    }
    total
}

/// Design variance of `τ̂` given the full network.
pub fn ht_variance(y: &Network, psi: f64) -> Result<f64, HtError> {
    check_psi(psi)?;
    let edges: Vec<Dyad> = y.edges().collect();
    Ok(variance_sum(&edges, psi, y.is_directed(), false))
}

/// Horvitz–Thompson estimate of the design variance from the sample alone.
pub fn ht_variance_estimate(partial: &PartialNetwork, psi: f64) -> Result<f64, HtError> {
    check_psi(psi)?;
    let edges: Vec<Dyad> = partial.observed_ties().edges().collect();
    Ok(variance_sum(&edges, psi, partial.is_directed(), true))
}

/// `N(i,j)`: the nodes whose selection in `S_0` reveals dyad `(i,j)` under
/// one-wave tracing.
pub fn dyad_neighborhood(y: &Network, dyad: Dyad) -> NodeSet {
    let mut set = NodeSet::empty(y.n());
    set.insert(dyad.i);
    set.insert(dyad.j);
    for k in 0..y.n() {
        if y.has_edge(dyad.i, k) || y.has_edge(dyad.j, k) || y.has_edge(k, dyad.i) || y.has_edge(k, dyad.j) {
            set.insert(k);
        }
    }
    set
}

/// One-wave undirected dyadic inclusion probability `1 − (1 − ψ)^{|N(i,j)|}`.
/// Requires the full network.
pub fn one_wave_dyad_prob(y: &Network, dyad: Dyad, psi: f64) -> f64 {
    1.0 - (1.0 - psi).powi(dyad_neighborhood(y, dyad).count() as i32)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    EgoCentric,
    OneWave,
    KWave(usize),
    Saturated,
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Scheme::EgoCentric => write!(f, "ego-centric sampling"),
            Scheme::OneWave => write!(f, "one-wave link tracing"),
            Scheme::KWave(k) => write!(f, "{k}-wave link tracing"),
            Scheme::Saturated => write!(f, "saturated link tracing"),
        }
    }
}

impl Scheme {
    pub fn of(spec: &DesignSpec) -> Scheme {
        match (spec.family, spec.waves) {
            (DesignFamily::EgoCentric, _) => Scheme::EgoCentric,
            (DesignFamily::LinkTracing, WaveBound::Finite(1)) => Scheme::OneWave,
            (DesignFamily::LinkTracing, WaveBound::Finite(k)) => Scheme::KWave(k),
            (DesignFamily::LinkTracing, WaveBound::Saturated) => Scheme::Saturated,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObservabilityReport {
    pub scheme: Scheme,
    pub directed: bool,
    pub nodal_observable: bool,
    pub dyadic_observable: bool,
}

/// Which inclusion probabilities can be computed from the sample alone.
pub fn observability(spec: &DesignSpec) -> ObservabilityReport {
    let scheme = Scheme::of(spec);
    let (nodal, dyadic) = match (scheme, spec.directed) {
        (Scheme::EgoCentric, _) => (true, true),
        (Scheme::OneWave | Scheme::Saturated, false) => (true, false),
        _ => (false, false),
    };
    ObservabilityReport {
        scheme,
        directed: spec.directed,
        nodal_observable: nodal,
        dyadic_observable: dyadic,
    }
}

/// Inclusion probabilities available for an observed sample; `None` marks
/// a probability the sample does not determine.
#[derive(Debug, Clone, PartialEq)]
pub struct InclusionProbs {
    pub psi: f64,
    pub directed: bool,
    /// Per observed dyad, in `ObservationPattern::observed_dyads` order.
    pub dyadic: Vec<(Dyad, Option<f64>)>,
    pub nodal: Vec<Option<f64>>,
}

impl InclusionProbs {
    /// `π_ij,kl` when dyadic probabilities are observable.
    pub fn pairwise(&self, a: Dyad, b: Dyad) -> Option<f64> {
        self.dyadic
            .first()
            .and_then(|(_, p)| *p)
            .map(|_| pairwise(self.psi, a, b, self.directed))
    }
}

/// Inclusion probabilities determined by a sample drawn under `spec`.
pub fn inclusion_probs(spec: &DesignSpec, partial: &PartialNetwork) -> Result<InclusionProbs, HtError> {
    let InitialSample::Bernoulli { psi } = spec.initial else {
        return Err(HtError::NotBernoulli);
    };
    check_psi(psi)?;
    let report = observability(spec);
    let n = partial.n();
    let selected = partial.pattern().selected();
    let y = partial.observed_ties();
    let nodal: Vec<Option<f64>> = (0..n)
        .map(|i| match report.scheme {
            Scheme::EgoCentric => Some(psi),
            // a sampled node's ties are all observed, so its degree is known
            Scheme::OneWave if report.nodal_observable && selected.contains(i) => {
                Some(1.0 - (1.0 - psi).powi(y.degree(i) as i32 + 1))
            }
            // a sampled node's whole component is traced
            Scheme::Saturated if report.nodal_observable && selected.contains(i) => {
                Some(1.0 - (1.0 - psi).powi(component_size(y, i) as i32))
            }
            _ => None,
        })
        .collect();
    let dyadic = partial
        .pattern()
        .observed_dyads()
        .map(|d| (d, report.dyadic_observable.then(|| dyad_prob(psi, spec.directed))))
        .collect();
    Ok(InclusionProbs {
        psi,
        directed: spec.directed,
        dyadic,
        nodal,
    })
}

fn component_size(y: &Network, start: usize) -> usize {
    let mut seen = NodeSet::empty(y.n());
    seen.insert(start);
    let mut stack = vec![start];
    while let Some(i) = stack.pop() {
        for j in y.neighbors(i) {
            if !seen.contains(j) {
                seen.insert(j);
                stack.push(j);
            }
        }
    }
    seen.count()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HtEstimate {
    pub total: f64,
    pub variance_estimate: f64,
    pub standard_error: f64,
}

/// Edge-total estimate, refusing designs whose dyadic inclusion
/// probabilities the sample does not reveal.
pub fn ht_estimate(spec: &DesignSpec, partial: &PartialNetwork) -> Result<HtEstimate, HtError> {
    let report = observability(spec);
    if !report.dyadic_observable {
        return Err(HtError::Unobservable(report.scheme));
    }
    if partial.is_directed() != spec.directed {
        let kind = |d: bool| if d { "directed" } else { "undirected" };
        return Err(HtError::Directedness {
            partial: kind(partial.is_directed()),
            design: kind(spec.directed),
        });
    }
    let psi = spec.psi().ok_or(HtError::NotBernoulli)?;
    let total = ht_edge_total(partial, psi)?;
    let variance_estimate = ht_variance_estimate(partial, psi)?;
    Ok(HtEstimate {
        total,
        variance_estimate,
        standard_error: variance_estimate.max(0.0).sqrt(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::design::trace;
    use crate::graph::ObservationPattern;

    fn path(n: usize) -> Network {
        Network::from_edges(n, false, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    // brute force over the selection states of the involved nodes
    fn joint_oracle(psi: f64, a: Dyad, b: Dyad) -> f64 {
        let mut nodes = vec![a.i, a.j, b.i, b.j];
        nodes.sort_unstable();
        nodes.dedup();
        let mut total = 0.0;
        for state in 0..(1u32 << nodes.len()) {
            let on = |v: usize| (state >> nodes.iter().position(|&x| x == v).unwrap()) & 1 == 1;
            if (on(a.i) || on(a.j)) && (on(b.i) || on(b.j)) {
                let k = state.count_ones() as i32;
                total += psi.powi(k) * (1.0 - psi).powi(nodes.len() as i32 - k);
            }
        }
        total
    }

    #[test]
    fn dyad_probabilities() {
        assert_eq!(egocentric_dyad_prob(0.0), 0.0);
        assert_eq!(egocentric_dyad_prob(1.0), 1.0);
        assert_eq!(egocentric_dyad_prob(0.5), 0.75);
    }

    #[test]
    fn pairwise_cases() {
        let d = Dyad::new;
        assert_eq!(pairwise_inclusion_prob(0.5, d(0, 1), d(0, 1)), 0.75);
        assert_eq!(pairwise_inclusion_prob(0.5, d(0, 1), d(2, 3)), 0.5625);
        assert_eq!(pairwise_inclusion_prob(0.5, d(0, 1), d(1, 2)), 0.625);
        for psi in [0.05, 0.2, 0.5, 0.9, 1.0] {
            for (a, b) in [(d(0, 1), d(0, 1)), (d(0, 1), d(1, 0)), (d(0, 1), d(2, 3)), (d(0, 1), d(0, 2)), (d(1, 2), d(0, 1))] {
                assert!((pairwise_inclusion_prob(psi, a, b) - joint_oracle(psi, a, b)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn arithmetic_and_census() {
        let y = Network::from_edges(6, false, (0..5).map(|i| (i, i + 1)).chain([(0, 2), (1, 3), (2, 4), (3, 5)])).unwrap();
        assert_eq!(y.edge_count(), 9);
        let census = PartialNetwork::full(&y);
        assert_eq!(ht_edge_total(&census, 0.5).unwrap(), 12.0);
        assert_eq!(ht_edge_total(&census, 1.0).unwrap(), 9.0);
        assert_eq!(ht_variance(&y, 1.0).unwrap(), 0.0);
        assert!(matches!(ht_edge_total(&census, 0.0), Err(HtError::Psi(_))));
    }

    #[test]
    fn path_unbiasedness_by_enumeration() {
        let y = path(5);
        let psi = 0.4;
        let spec = DesignSpec::ego_centric(false, psi);
        let (mut e_tau, mut e_tau2, mut e_var) = (0.0, 0.0, 0.0);
        for s in 0..32u64 {
            let r = trace(&spec, &y, &NodeSet::from_mask(5, s)).unwrap();
            let k = s.count_ones() as i32;
            let w = psi.powi(k) * (1.0 - psi).powi(5 - k);
            let partial = PartialNetwork::restrict(&y, r.pattern).unwrap();
            let t = ht_edge_total(&partial, psi).unwrap();
            e_tau += w * t;
            e_tau2 += w * t * t;
            e_var += w * ht_variance_estimate(&partial, psi).unwrap();
        }
        assert!((e_tau - 4.0).abs() < 1e-12);
        let var = ht_variance(&y, psi).unwrap();
        assert!((e_tau2 - e_tau * e_tau - var).abs() < 1e-10);
        assert!((e_var - var).abs() < 1e-10);
    }

    #[test]
    fn directed_unbiasedness_by_enumeration() {
        let y = Network::from_edges(4, true, [(0, 1), (1, 0), (2, 3), (3, 1), (0, 3)]).unwrap();
        let psi = 0.3;
        let spec = DesignSpec::ego_centric(true, psi);
        let (mut e_tau, mut e_tau2, mut e_var) = (0.0, 0.0, 0.0);
        for s in 0..16u64 {
            let k = s.count_ones() as i32;
            let w = psi.powi(k) * (1.0 - psi).powi(4 - k);
            let pattern = ObservationPattern::from_selected(NodeSet::from_mask(4, s), true);
            let partial = PartialNetwork::restrict(&y, pattern).unwrap();
            let est = ht_estimate(&spec, &partial).unwrap();
            e_tau += w * est.total;
            e_tau2 += w * est.total * est.total;
            e_var += w * est.variance_estimate;
        }
        let var = ht_variance(&y, psi).unwrap();
        assert!((e_tau - 5.0).abs() < 1e-12);
        assert!((e_tau2 - e_tau * e_tau - var).abs() < 1e-10);
        assert!((e_var - var).abs() < 1e-10);
    }

    #[test]
    fn neighborhoods() {
        assert_eq!(dyad_neighborhood(&Network::empty(4, false), Dyad::new(0, 1)).count(), 2);
        let tri = Network::complete(3, false);
        assert_eq!(dyad_neighborhood(&tri, Dyad::new(0, 1)).iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        let y = path(5);
        assert_eq!(dyad_neighborhood(&y, Dyad::new(1, 2)).iter().collect::<Vec<_>>(), vec![0, 1, 2, 3]);
        let psi = 0.3;
        // enumeration cross-check of the one-wave probability
        let spec = DesignSpec::link_tracing(false, WaveBound::Finite(1), InitialSample::Bernoulli { psi });
        let mut p = 0.0;
        for s in 0..32u64 {
            if trace(&spec, &y, &NodeSet::from_mask(5, s)).unwrap().pattern.is_observed(1, 2) {
                let k = s.count_ones() as i32;
                p += psi.powi(k) * (1.0 - psi).powi(5 - k);
            }
        }
        assert!((one_wave_dyad_prob(&y, Dyad::new(1, 2), psi) - p).abs() < 1e-12);
        assert!((p - (1.0 - 0.7f64.powi(4))).abs() < 1e-12);
    }

    #[test]
    fn observability_table() {
        let b = InitialSample::Bernoulli { psi: 0.3 };
        let row = |spec: DesignSpec| {
            let r = observability(&spec);
            (r.nodal_observable, r.dyadic_observable)
        };
        for directed in [false, true] {
            assert_eq!(row(DesignSpec::ego_centric(directed, 0.3)), (true, true));
            assert_eq!(row(DesignSpec::link_tracing(directed, WaveBound::Finite(3), b)), (false, false));
        }
        assert_eq!(row(DesignSpec::link_tracing(false, WaveBound::Finite(1), b)), (true, false));
        assert_eq!(row(DesignSpec::link_tracing(false, WaveBound::Saturated, b)), (true, false));
        assert_eq!(row(DesignSpec::link_tracing(true, WaveBound::Finite(1), b)), (false, false));
        assert_eq!(row(DesignSpec::link_tracing(true, WaveBound::Saturated, b)), (false, false));
    }

    #[test]
    fn refusal_for_link_tracing() {
        let y = path(5);
        let spec = DesignSpec::link_tracing(false, WaveBound::Finite(1), InitialSample::Bernoulli { psi: 0.3 });
        let r = trace(&spec, &y, &NodeSet::from_nodes(5, [0]).unwrap()).unwrap();
        let partial = PartialNetwork::restrict(&y, r.pattern).unwrap();
        assert_eq!(ht_estimate(&spec, &partial), Err(HtError::Unobservable(Scheme::OneWave)));
        let probs = inclusion_probs(&spec, &partial).unwrap();
        assert!(probs.dyadic.iter().all(|(_, p)| p.is_none()));
        assert!((probs.nodal[0].unwrap() - (1.0 - 0.7f64.powi(2))).abs() < 1e-15);
        assert_eq!(probs.nodal[4], None);
        assert_eq!(probs.pairwise(Dyad::new(0, 1), Dyad::new(1, 2)), None);
    }
}
