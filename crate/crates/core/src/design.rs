//! Ego-centric and link-tracing sampling designs: realisations and exact
//! design probabilities `P(D = d | Y = y; ψ)`.
//!
//! Every design here is node-determined. An initial node sample `S_0` is
//! drawn, link tracing adds waves
//! `S_m = [y·S_{m−1} × (1 − Σ_{t<m} S_t) > 0]`, and the observed dyads are
//! those incident to a sampled node (undirected) or leaving one (directed).
//! In the directed case a wave enrols the nodes that receive an arc from the
//! previous wave.

use rand::seq::index::sample as sample_indices;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{GraphError, Network, NodeSet, ObservationPattern, PartialNetwork};

/// Default bound on `n` for exact enumeration over initial samples.
pub const DEFAULT_ENUMERATION_BOUND: usize = 20;
/// Default bound on missing dyads when enumerating completions.
pub const DEFAULT_COMPLETION_BOUND: usize = 22;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DesignError {
    #[error("invalid design: {0}")]
    Invalid(String),
    #[error("exact enumeration needs n <= {bound}, got n = {n}")]
    EnumerationBound { n: usize, bound: usize },
    #[error("{missing} missing dyads exceed the completion enumeration bound {bound}")]
    CompletionBound { missing: usize, bound: usize },
    #[error("operation requires a Bernoulli initial sample")]
    NotBernoulli,
    #[error("design is {design} but network is {network}")]
    Directedness {
        design: &'static str,
        network: &'static str,
    },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

fn kind(directed: bool) -> &'static str {
    if directed {
        "directed"
    } else {
        "undirected"
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignFamily {
    EgoCentric,
    LinkTracing,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WaveBound {
    Finite(usize),
    /// Trace until a wave comes back empty.
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitialSample {
    /// Each node independently with probability ψ.
    Bernoulli { psi: f64 },
    /// A uniform m-subset drawn without replacement.
    FixedSeeds { m: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DesignSpec {
    pub family: DesignFamily,
    pub directed: bool,
    pub waves: WaveBound,
    pub initial: InitialSample,
}

impl DesignSpec {
    pub fn ego_centric(directed: bool, psi: f64) -> Self {
        DesignSpec {
            family: DesignFamily::EgoCentric,
            directed,
            waves: WaveBound::Finite(0),
            initial: InitialSample::Bernoulli { psi },
        }
    }

    pub fn link_tracing(directed: bool, waves: WaveBound, initial: InitialSample) -> Self {
        DesignSpec {
            family: DesignFamily::LinkTracing,
            directed,
            waves,
            initial,
        }
    }

    /// The seed-pair study design: `k` waves from two uniformly drawn seeds.
    pub fn seed_pair(k: usize) -> Self {
        DesignSpec::link_tracing(false, WaveBound::Finite(k), InitialSample::FixedSeeds { m: 2 })
    }

    pub fn psi(&self) -> Option<f64> {
        match self.initial {
            InitialSample::Bernoulli { psi } => Some(psi),
            InitialSample::FixedSeeds { .. } => None,
        }
    }

    /// Number of tracing waves; `None` when saturated.
    pub fn wave_limit(&self) -> Option<usize> {
        match (self.family, self.waves) {
            (DesignFamily::EgoCentric, _) => Some(0),
            (DesignFamily::LinkTracing, WaveBound::Finite(k)) => Some(k),
            (DesignFamily::LinkTracing, WaveBound::Saturated) => None,
        }
    }

    pub fn validate(&self, n: usize) -> Result<(), DesignError> {
        match self.initial {
            InitialSample::Bernoulli { psi } if !(0.0..=1.0).contains(&psi) => {
                return Err(DesignError::Invalid(format!("psi = {psi} outside [0, 1]")));
            }
            InitialSample::FixedSeeds { m } if m > n => {
                return Err(DesignError::Invalid(format!("{m} seeds for {n} nodes")));
            }
            _ => {}
        }
        match (self.family, self.waves) {
            (DesignFamily::EgoCentric, WaveBound::Saturated) => Err(DesignError::Invalid(
                "saturation only applies to link tracing".into(),
            )),
            (DesignFamily::LinkTracing, WaveBound::Finite(0)) => Err(DesignError::Invalid(
                "link tracing needs at least one wave".into(),
            )),
            _ => Ok(()),
        }
    }

    fn check_network(&self, y: &Network) -> Result<(), DesignError> {
        self.validate(y.n())?;
        if y.is_directed() != self.directed {
            return Err(DesignError::Directedness {
                design: kind(self.directed),
                network: kind(y.is_directed()),
            });
        }
        Ok(())
    }
}

/// One execution of a design on a network.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignRealization {
    pub pattern: ObservationPattern,
    /// Some wave came back empty before the wave bound was reached.
    pub exhausted: bool,
}

impl DesignRealization {
    pub fn sampled_nodes(&self) -> usize {
        self.pattern.selected().count()
    }

    pub fn observed_dyads(&self) -> usize {
        self.pattern.observed_count()
    }

    pub fn initial(&self) -> &NodeSet {
        &self.pattern.waves()[0]
    }
}

pub fn draw_initial<R: Rng + ?Sized>(
    spec: &DesignSpec,
    n: usize,
    rng: &mut R,
) -> Result<NodeSet, DesignError> {
    spec.validate(n)?;
    Ok(match spec.initial {
        InitialSample::Bernoulli { psi } => {
            NodeSet::from_bools((0..n).map(|_| rng.gen::<f64>() < psi).collect())
        }
        InitialSample::FixedSeeds { m } => NodeSet::from_nodes(n, sample_indices(rng, n, m))?,
    })
}

/// Applies the wave recursion to `s0`. Deterministic given `(y, s0)`.
pub fn trace(spec: &DesignSpec, y: &Network, s0: &NodeSet) -> Result<DesignRealization, DesignError> {
    spec.check_network(y)?;
    if s0.len() != y.n() {
        return Err(GraphError::Mismatch("initial sample length").into());
    }
    let n = y.n();
    let limit = spec.wave_limit().unwrap_or(n);
    let mut selected = s0.clone();
    let mut waves = vec![s0.clone()];
    let mut exhausted = false;
    for _ in 0..limit {
        let prev = waves.last().expect("nonempty");
        let mut next = NodeSet::empty(n);
        for i in prev.iter() {
            for j in y.neighbors(i) {
                if !selected.contains(j) {
                    next.insert(j);
                }
            }
        }
        if next.is_empty() {
            exhausted = true;
            break;
        }
        selected = selected.union(&next);
        waves.push(next);
    }
    Ok(DesignRealization {
        pattern: ObservationPattern::from_waves(n, spec.directed, waves)?,
        exhausted,
    })
}

/// Draws an initial sample and traces it.
pub fn realize<R: Rng + ?Sized>(
    spec: &DesignSpec,
    y: &Network,
    rng: &mut R,
) -> Result<DesignRealization, DesignError> {
    let s0 = draw_initial(spec, y.n(), rng)?;
    trace(spec, y, &s0)
}

/// [`realize`] with a ChaCha8 stream seeded from `seed`.
pub fn realize_seeded(spec: &DesignSpec, y: &Network, seed: u64) -> Result<DesignRealization, DesignError> {
    realize(spec, y, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Any design with computable probabilities `P(D = d | Y = y)`.
pub trait SamplingDesign {
    fn is_directed(&self) -> bool;
    fn probability(&self, d: &ObservationPattern, y: &Network) -> Result<f64, DesignError>;
}

impl SamplingDesign for DesignSpec {
    fn is_directed(&self) -> bool {
        self.directed
    }

    fn probability(&self, d: &ObservationPattern, y: &Network) -> Result<f64, DesignError> {
        design_probability(self, d, y)
    }
}

/// The nodes behind a node-determined pattern, or `None` for masks no node
/// set produces.
fn selected_nodes(d: &ObservationPattern) -> Option<NodeSet> {
    let mut keep = vec![true; d.n()];
    for dyad in d.missing_dyads() {
        keep[dyad.i] = false;
        if !d.is_directed() {
            keep[dyad.j] = false;
        }
    }
    let selected = NodeSet::from_bools(keep);
    ObservationPattern::from_selected(selected.clone(), d.is_directed())
        .same_mask(d)
        .then_some(selected)
}

fn node_bits(s: &NodeSet) -> u64 {
    s.iter().fold(0, |acc, i| acc | (1 << i))
}

/// Undirected patterns with at most one unselected node all observe every
/// dyad, so they share the all-nodes key.
fn pattern_key(d: &ObservationPattern) -> Option<u64> {
    selected_nodes(d).map(|s| canonical_key(node_bits(&s), d.n(), d.is_directed()))
}

fn low_bits(n: usize) -> u64 {
    if n >= 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

fn canonical_key(selected: u64, n: usize, directed: bool) -> u64 {
    let unselected = n - selected.count_ones() as usize;
    if (!directed && unselected <= 1) || n <= 1 {
        low_bits(n)
    } else {
        selected
    }
}

/// Bit-level trace for `n <= 64`; returns the selected node set.
fn trace_bits(rows: &[u64], s0: u64, limit: usize) -> u64 {
    let mut selected = s0;
    let mut wave = s0;
    for _ in 0..limit {
        let mut reach = 0u64;
        let mut rest = wave;
        while rest != 0 {
            let i = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            reach |= rows[i];
        }
        let next = reach & !selected;
        if next == 0 {
            break;
        }
        selected |= next;
        wave = next;
    }
    selected
}

fn adjacency_rows(y: &Network) -> Vec<u64> {
    (0..y.n()).map(|i| y.row_bits(i)[0]).collect()
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, t| acc * (n - t) as f64 / (t + 1) as f64)
}

fn seed_weight(initial: &InitialSample, n: usize, s0: u64) -> f64 {
    let size = s0.count_ones() as usize;
    match *initial {
        InitialSample::Bernoulli { psi } => psi.powi(size as i32) * (1.0 - psi).powi((n - size) as i32),
        InitialSample::FixedSeeds { m } => {
            if size == m {
                1.0 / binomial(n, m)
            } else {
                0.0
            }
        }
    }
}

/// Exact `P(D = d | Y = y; ψ)` with the default enumeration bound.
pub fn design_probability(spec: &DesignSpec, d: &ObservationPattern, y: &Network) -> Result<f64, DesignError> {
    design_probability_bounded(spec, d, y, DEFAULT_ENUMERATION_BOUND)
}

/// Exact design probability by summing the initial-sample probability over
/// every `s_0` whose trace yields `d`. Bernoulli ego-centric designs use
/// the closed form.
pub fn design_probability_bounded(
    spec: &DesignSpec,
    d: &ObservationPattern,
    y: &Network,
    bound: usize,
) -> Result<f64, DesignError> {
    spec.check_network(y)?;
    let n = y.n();
    if d.n() != n || d.is_directed() != y.is_directed() {
        return Err(GraphError::Mismatch("pattern vs network").into());
    }
    if let (DesignFamily::EgoCentric, InitialSample::Bernoulli { psi }) = (spec.family, spec.initial) {
        return Ok(ego_closed_form(psi, d));
    }
    if n > bound.min(63) {
        return Err(DesignError::EnumerationBound { n, bound });
    }
    let Some(target) = pattern_key(d) else {
        return Ok(0.0);
    };
    let rows = adjacency_rows(y);
    let limit = spec.wave_limit().unwrap_or(n);
    let mut total = 0.0;
    for s0 in 0..(1u64 << n) {
        let weight = seed_weight(&spec.initial, n, s0);
        if weight == 0.0 {
            continue;
        }
        if canonical_key(trace_bits(&rows, s0, limit), n, spec.directed) == target {
            total += weight;
        }
    }
    Ok(total)
}

/// `ψ^{1·s}(1−ψ)^{n−1·s}` for the unique `s` behind `d`; the all-observed
/// undirected mask also arises when exactly one node is unselected.
fn ego_closed_form(psi: f64, d: &ObservationPattern) -> f64 {
    let n = d.n();
    if n <= 1 {
        return 1.0;
    }
    let Some(nodes) = selected_nodes(d) else {
        return 0.0;
    };
    let selected = nodes.count() as i32;
    let unselected = n as i32 - selected;
    if !d.is_directed() && unselected == 0 {
        psi.powi(n as i32) + n as f64 * psi.powi(n as i32 - 1) * (1.0 - psi)
    } else {
        psi.powi(selected) * (1.0 - psi).powi(unselected)
    }
}

/// Monte Carlo design probability for networks too large to enumerate.
/// Returns the estimate and its binomial standard error.
pub fn design_probability_mc(
    spec: &DesignSpec,
    d: &ObservationPattern,
    y: &Network,
    draws: usize,
    seed: u64,
) -> Result<(f64, f64), DesignError> {
    spec.check_network(y)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut hits = 0usize;
    for _ in 0..draws {
        if realize(spec, y, &mut rng)?.pattern.same_mask(d) {
            hits += 1;
        }
    }
    let p = hits as f64 / draws as f64;
    Ok((p, (p * (1.0 - p) / draws as f64).sqrt()))
}

/// Every distinct observation pattern the design can produce on `y`.
pub fn reachable_patterns(spec: &DesignSpec, y: &Network) -> Result<Vec<ObservationPattern>, DesignError> {
    spec.check_network(y)?;
    let n = y.n();
    if n > DEFAULT_ENUMERATION_BOUND {
        return Err(DesignError::EnumerationBound {
            n,
            bound: DEFAULT_ENUMERATION_BOUND,
        });
    }
    let mut seen = std::collections::BTreeSet::new();
    for s0 in 0..(1u64 << n) {
        if seed_weight(&spec.initial, n, s0) == 0.0 && matches!(spec.initial, InitialSample::FixedSeeds { .. }) {
            continue;
        }
        let realization = trace(spec, y, &NodeSet::from_mask(n, s0))?;
        seen.insert(canonical_key(node_bits(realization.pattern.selected()), n, spec.directed));
    }
    Ok(seen
        .into_iter()
        .map(|key| ObservationPattern::from_selected(NodeSet::from_mask(n, key), spec.directed))
        .collect())
}

/// Ego-centric design whose inclusion probability depends on whether a node
/// is isolated in the complete network. Isolation of an unsampled node can
/// hinge on unobserved dyads, so this design is generally not adaptive.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegreeBiasedEgo {
    pub psi_connected: f64,
    pub psi_isolated: f64,
}

impl SamplingDesign for DegreeBiasedEgo {
    fn is_directed(&self) -> bool {
        false
    }

    fn probability(&self, d: &ObservationPattern, y: &Network) -> Result<f64, DesignError> {
        if y.is_directed() {
            return Err(DesignError::Directedness {
                design: "undirected",
                network: "directed",
            });
        }
        let n = y.n();
        if n > DEFAULT_ENUMERATION_BOUND {
            return Err(DesignError::EnumerationBound {
                n,
                bound: DEFAULT_ENUMERATION_BOUND,
            });
        }
        let Some(target) = pattern_key(d) else {
            return Ok(0.0);
        };
        let inclusion: Vec<f64> = (0..n)
            .map(|i| {
                if y.degree(i) == 0 {
                    self.psi_isolated
                } else {
                    self.psi_connected
                }
            })
            .collect();
        let mut total = 0.0;
        for s in 0..(1u64 << n) {
            if canonical_key(s, n, false) != target {
                continue;
            }
            total += (0..n)
                .map(|i| {
                    if (s >> i) & 1 == 1 {
                        inclusion[i]
                    } else {
                        1.0 - inclusion[i]
                    }
                })
                .product::<f64>();
        }
        Ok(total)
    }
}

/// Outcome of checking `P(D = d | y_obs + v)` across all completions `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct AdaptivityReport {
    pub adaptive: bool,
    /// Two completions whose design probabilities differ.
    pub witness: Option<((Network, f64), (Network, f64))>,
    pub completions_checked: usize,
}

/// Checks the missing-at-random condition for the observed data by
/// enumerating every completion.
pub fn is_adaptive<D: SamplingDesign + ?Sized>(
    design: &D,
    partial: &PartialNetwork,
) -> Result<AdaptivityReport, DesignError> {
    let missing = partial.missing_dyads();
    if missing.len() > DEFAULT_COMPLETION_BOUND {
        return Err(DesignError::CompletionBound {
            missing: missing.len(),
            bound: DEFAULT_COMPLETION_BOUND,
        });
    }
    let count = 1usize << missing.len();
    let mut first: Option<(Network, f64)> = None;
    for code in 0..count {
        let y = partial.overlay_values(&missing, (0..missing.len()).map(|k| (code >> k) & 1 == 1));
        let p = design.probability(partial.pattern(), &y)?;
        match &first {
            None => first = Some((y, p)),
            Some((_, p0)) if (p - p0).abs() > 1e-13 * p0.abs().max(1e-300) && (p - p0).abs() > 1e-300 => {
                return Ok(AdaptivityReport {
                    adaptive: false,
                    witness: Some((first.expect("set"), (y, p))),
                    completions_checked: code + 1,
                });
            }
            Some(_) => {}
        }
    }
    Ok(AdaptivityReport {
        adaptive: true,
        witness: None,
        completions_checked: count,
    })
}

pub type SeedPairSample = ((usize, usize), DesignRealization);

/// The deterministic `k`-wave realisation from every unordered seed pair.
pub fn all_seed_pair_samples(
    y: &Network,
    k: usize,
) -> Result<Vec<SeedPairSample>, DesignError> {
    if y.is_directed() {
        return Err(DesignError::Directedness {
            design: "undirected",
            network: "directed",
        });
    }
    let spec = DesignSpec::seed_pair(k);
    let n = y.n();
    let mut out = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let s0 = NodeSet::from_nodes(n, [i, j])?;
            out.push(((i, j), trace(&spec, y, &s0)?));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path(n: usize) -> Network {
        Network::from_edges(n, false, (0..n - 1).map(|i| (i, i + 1))).unwrap()
    }

    fn one_wave(psi: f64) -> DesignSpec {
        DesignSpec::link_tracing(false, WaveBound::Finite(1), InitialSample::Bernoulli { psi })
    }

    #[test]
    fn extreme_psi_initial_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..20 {
            assert!(draw_initial(&DesignSpec::ego_centric(false, 0.0), 7, &mut rng).unwrap().is_empty());
            assert_eq!(draw_initial(&DesignSpec::ego_centric(false, 1.0), 7, &mut rng).unwrap().count(), 7);
            assert_eq!(draw_initial(&DesignSpec::seed_pair(2), 7, &mut rng).unwrap().count(), 2);
        }
    }

    #[test]
    fn spec_validation() {
        assert!(DesignSpec::ego_centric(false, 1.5).validate(4).is_err());
        assert!(DesignSpec::link_tracing(false, WaveBound::Finite(0), InitialSample::Bernoulli { psi: 0.5 })
            .validate(4)
            .is_err());
        let mut ego_sat = DesignSpec::ego_centric(false, 0.5);
        ego_sat.waves = WaveBound::Saturated;
        assert!(ego_sat.validate(4).is_err());
        assert!(DesignSpec::link_tracing(false, WaveBound::Saturated, InitialSample::FixedSeeds { m: 5 })
            .validate(4)
            .is_err());
    }

    #[test]
    fn one_wave_trace_on_a_path() {
        let y = path(5);
        let s0 = NodeSet::from_nodes(5, [0]).unwrap();
        let r = trace(&one_wave(0.5), &y, &s0).unwrap();
        assert_eq!(r.pattern.selected().iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(!r.exhausted);
        // dyads incident to {0, 1}: 4 + 3
        assert_eq!(r.observed_dyads(), 7);
        for d in r.pattern.observed_dyads() {
            assert!(d.i <= 1 || d.j <= 1);
        }
    }

    #[test]
    fn saturated_trace_stops_when_exhausted() {
        let y = Network::from_edges(6, false, [(0, 1), (1, 2), (3, 4)]).unwrap();
        let spec = DesignSpec::link_tracing(false, WaveBound::Saturated, InitialSample::Bernoulli { psi: 0.5 });
        let r = trace(&spec, &y, &NodeSet::from_nodes(6, [0]).unwrap()).unwrap();
        assert_eq!(r.pattern.selected().iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(r.pattern.waves().len(), 3);
        assert!(r.exhausted);
    }

    #[test]
    fn directed_trace_follows_out_arcs() {
        let y = Network::from_edges(4, true, [(0, 1), (2, 0), (1, 3)]).unwrap();
        let spec = DesignSpec::link_tracing(true, WaveBound::Finite(1), InitialSample::Bernoulli { psi: 0.5 });
        let r = trace(&spec, &y, &NodeSet::from_nodes(4, [0]).unwrap()).unwrap();
        assert_eq!(r.pattern.selected().iter().collect::<Vec<_>>(), vec![0, 1]);
        assert!(r.pattern.is_observed(1, 2) && !r.pattern.is_observed(2, 1));
    }

    #[test]
    fn all_nodes_observes_everything() {
        let y = path(5);
        let r = trace(&one_wave(0.3), &y, &NodeSet::full(5)).unwrap();
        assert_eq!(r.observed_dyads(), 10);
    }

    #[test]
    fn ego_probability_closed_form() {
        let y = path(5);
        let psi = 0.3;
        let spec = DesignSpec::ego_centric(false, psi);
        let s = NodeSet::from_nodes(5, [1, 3]).unwrap();
        let d = ObservationPattern::from_selected(s, false);
        let p = design_probability(&spec, &d, &y).unwrap();
        assert!((p - psi.powi(2) * (1.0 - psi).powi(3)).abs() < 1e-15);
        let full = ObservationPattern::full(5, false);
        assert_eq!(design_probability(&DesignSpec::ego_centric(false, 1.0), &full, &y).unwrap(), 1.0);
    }

    #[test]
    fn ego_closed_form_agrees_with_enumeration() {
        // a FixedSeeds-free enumeration through the generic path
        for directed in [false, true] {
            let y = Network::empty(5, directed);
            let psi = 0.35;
            let ego = DesignSpec::ego_centric(directed, psi);
            for s in 0..32u64 {
                let d = ObservationPattern::from_selected(NodeSet::from_mask(5, s), directed);
                let mut brute = 0.0;
                for t in 0..32u64 {
                    if ObservationPattern::from_selected(NodeSet::from_mask(5, t), directed).same_mask(&d) {
                        brute += seed_weight(&InitialSample::Bernoulli { psi }, 5, t);
                    }
                }
                let p = design_probability(&ego, &d, &y).unwrap();
                assert!((p - brute).abs() < 1e-15, "{directed} {s}: {p} vs {brute}");
            }
        }
    }

    #[test]
    fn one_wave_probabilities_normalise_on_path() {
        let y = path(5);
        let spec = one_wave(0.4);
        let total: f64 = reachable_patterns(&spec, &y)
            .unwrap()
            .iter()
            .map(|d| design_probability(&spec, d, &y).unwrap())
            .sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn enumeration_bound_is_enforced() {
        let y = Network::empty(21, false);
        let d = ObservationPattern::full(21, false);
        assert!(matches!(
            design_probability(&one_wave(0.5), &d, &y),
            Err(DesignError::EnumerationBound { n: 21, .. })
        ));
        let (p, se) = design_probability_mc(&one_wave(1.0), &d, &y, 10, 3).unwrap();
        assert_eq!((p, se), (1.0, 0.0));
    }

    #[test]
    fn adaptivity_of_standard_and_biased_designs() {
        let y = path(5);
        let r = trace(&one_wave(0.3), &y, &NodeSet::from_nodes(5, [0]).unwrap()).unwrap();
        let partial = PartialNetwork::restrict(&y, r.pattern).unwrap();
        assert!(is_adaptive(&one_wave(0.3), &partial).unwrap().adaptive);
        assert!(is_adaptive(&DesignSpec::ego_centric(false, 0.3), &partial).unwrap().adaptive);

        // node 4 is unselected with no observed ties; its isolation is unobserved
        let biased = DegreeBiasedEgo {
            psi_connected: 0.6,
            psi_isolated: 0.2,
        };
        let report = is_adaptive(&biased, &partial).unwrap();
        assert!(!report.adaptive);
        let ((_, p1), (_, p2)) = report.witness.unwrap();
        assert_ne!(p1, p2);
    }

    #[test]
    fn seed_pairs_on_small_graphs() {
        let k4 = Network::complete(4, false);
        let samples = all_seed_pair_samples(&k4, 1).unwrap();
        assert_eq!(samples.len(), 6);
        assert!(samples.iter().all(|(_, r)| r.observed_dyads() == 6));
        assert_eq!(all_seed_pair_samples(&Network::empty(36, false), 2).unwrap().len(), 630);
    }

    #[test]
    fn fixed_seed_draws_are_uniform_over_pairs() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let spec = DesignSpec::seed_pair(2);
        let mut counts = std::collections::HashMap::new();
        let draws = 60_000;
        for _ in 0..draws {
            let s = draw_initial(&spec, 6, &mut rng).unwrap();
            *counts.entry(s.iter().collect::<Vec<_>>()).or_insert(0usize) += 1;
        }
        assert_eq!(counts.len(), 15);
        let expected = draws as f64 / 15.0;
        let chi2: f64 = counts.values().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
        // 14 degrees of freedom, 0.999 quantile ≈ 36.1
        assert!(chi2 < 36.1, "{chi2}");
    }
}
