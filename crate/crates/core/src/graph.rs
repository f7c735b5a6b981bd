//! Complete and partially observed binary networks.
//!
//! Dyad states live in a dense row-major bit matrix so that tie lookups are
//! O(1) and shared-partner counts reduce to popcounts over two rows.
//! Undirected networks are stored symmetrically but every count in this
//! crate is taken over unordered pairs.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node index {index} out of range for a network of {n} nodes")]
    OutOfRange { index: usize, n: usize },
    #[error("networks disagree in size or directedness ({0})")]
    Mismatch(&'static str),
    #[error("completion assigns a value to observed dyad {0}")]
    CompletionOnObservedDyad(Dyad),
    #[error("observed tie listed on unobserved dyad {0}")]
    TieOnMissingDyad(Dyad),
    #[error("2^{0} completions do not fit in a 128-bit count")]
    CountOverflow(usize),
    #[error("wave vectors overlap at node {0}")]
    OverlappingWaves(usize),
}

/// A dyad `(i, j)`, `i != j`. Undirected dyads are normalised to `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Dyad {
    pub i: usize,
    pub j: usize,
}

impl Dyad {
    pub fn new(i: usize, j: usize) -> Self {
        Dyad { i, j }
    }

    /// The undirected representative with the smaller index first.
    pub fn unordered(i: usize, j: usize) -> Self {
        if i < j {
            Dyad { i, j }
        } else {
            Dyad { i: j, j: i }
        }
    }
}

impl fmt::Display for Dyad {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.i, self.j)
    }
}

/// Row-major n x n bit matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub(crate) struct BitMatrix {
    n: usize,
    words: usize,
    bits: Vec<u64>,
}

impl BitMatrix {
    pub(crate) fn zeros(n: usize) -> Self {
        let words = n.div_ceil(64).max(1);
        BitMatrix {
            n,
            words,
            bits: vec![0; n * words],
        }
    }

    #[inline]
    pub(crate) fn get(&self, i: usize, j: usize) -> bool {
        (self.bits[i * self.words + j / 64] >> (j % 64)) & 1 == 1
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, value: bool) {
        let word = &mut self.bits[i * self.words + j / 64];
        let mask = 1u64 << (j % 64);
        if value {
            *word |= mask;
        } else {
            *word &= !mask;
        }
    }

    #[inline]
    pub(crate) fn row(&self, i: usize) -> &[u64] {
        &self.bits[i * self.words..(i + 1) * self.words]
    }

    #[inline]
    fn row_count(&self, i: usize) -> usize {
        self.row(i).iter().map(|w| w.count_ones() as usize).sum()
    }

    #[inline]
    fn and_count(&self, i: usize, j: usize) -> usize {
        self.row(i)
            .iter()
            .zip(self.row(j))
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    fn row_ones(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        ones(self.row(i))
    }
}

/// Iterates the set bit positions of a bit row.
pub(crate) fn ones(row: &[u64]) -> impl Iterator<Item = usize> + '_ {
    row.iter().enumerate().flat_map(|(w, &word)| {
        let mut rest = word;
        std::iter::from_fn(move || {
            if rest == 0 {
                None
            } else {
                let bit = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(w * 64 + bit)
            }
        })
    })
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.n {
            let line: String = (0..self.n)
                .map(|j| if self.get(i, j) { '1' } else { '0' })
                .collect();
            writeln!(f, "{line}")?;
        }
        Ok(())
    }
}

/// A complete binary network without self-ties.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Network {
    directed: bool,
    adj: BitMatrix,
}

impl fmt::Debug for Network {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Network")
            .field("n", &self.n())
            .field("directed", &self.directed)
            .field("edges", &self.edge_count())
            .finish()
    }
}

impl Network {
    pub fn empty(n: usize, directed: bool) -> Self {
        Network {
            directed,
            adj: BitMatrix::zeros(n),
        }
    }

    /// Builds a network with exactly the listed ties (symmetrised when undirected).
    pub fn from_edges(
        n: usize,
        directed: bool,
        edges: impl IntoIterator<Item = (usize, usize)>,
    ) -> Result<Self, GraphError> {
        let mut net = Network::empty(n, directed);
        for (i, j) in edges {
            net.check_dyad(i, j)?;
            net.set(i, j, true);
        }
        Ok(net)
    }

    pub fn complete(n: usize, directed: bool) -> Self {
        let mut net = Network::empty(n, directed);
        for d in net.dyads() {
            net.set(d.i, d.j, true);
        }
        net
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.adj.n
    }

    #[inline]
    pub fn is_directed(&self) -> bool {
        self.directed
    }

    pub(crate) fn check_dyad(&self, i: usize, j: usize) -> Result<(), GraphError> {
        let n = self.n();
        for index in [i, j] {
            if index >= n {
                return Err(GraphError::OutOfRange { index, n });
            }
        }
        if i == j {
            return Err(GraphError::SelfLoop(i));
        }
        Ok(())
    }

    #[inline]
    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj.get(i, j)
    }

    /// Sets dyad `(i, j)`; the mirror entry is updated for undirected networks.
    ///
    /// Panics in debug builds on a self-loop.
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        debug_assert!(i != j, "self-loop");
        self.adj.set(i, j, value);
        if !self.directed {
            self.adj.set(j, i, value);
        }
    }

    #[inline]
    pub fn toggle(&mut self, i: usize, j: usize) {
        let value = !self.has_edge(i, j);
        self.set(i, j, value);
    }

    /// Number of free dyads: n(n-1)/2 undirected, n(n-1) directed.
    pub fn dyad_count(&self) -> usize {
        dyad_count(self.n(), self.directed)
    }

    /// All free dyads in row-major order.
    pub fn dyads(&self) -> impl Iterator<Item = Dyad> {
        all_dyads(self.n(), self.directed)
    }

    pub fn edge_count(&self) -> usize {
        let total: usize = (0..self.n()).map(|i| self.adj.row_count(i)).sum();
        if self.directed {
            total
        } else {
            total / 2
        }
    }

    pub fn edges(&self) -> impl Iterator<Item = Dyad> + '_ {
        self.dyads().filter(|d| self.has_edge(d.i, d.j))
    }

    /// Out-neighbours (all neighbours when undirected).
    pub fn neighbors(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row_ones(i)
    }

    pub(crate) fn row_bits(&self, i: usize) -> &[u64] {
        self.adj.row(i)
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj.row_count(i)
    }

    pub fn in_degree(&self, j: usize) -> usize {
        (0..self.n()).filter(|&i| self.has_edge(i, j)).count()
    }

    /// Number of nodes adjacent to both `i` and `j` (undirected sense).
    #[inline]
    pub fn shared_partners(&self, i: usize, j: usize) -> usize {
        self.adj.and_count(i, j)
    }

    pub fn common_neighbors(&self, i: usize, j: usize) -> impl Iterator<Item = usize> + '_ {
        self.adj.row_ones(i).filter(move |&k| self.adj.get(j, k))
    }

    /// Nodes with no incident ties in either direction.
    pub fn isolates(&self) -> NodeSet {
        let n = self.n();
        let mut touched = vec![false; n];
        for d in self.edges() {
            touched[d.i] = true;
            touched[d.j] = true;
        }
        NodeSet::from_bools(touched.into_iter().map(|t| !t).collect())
    }

    pub(crate) fn same_space(&self, other: &Network) -> bool {
        self.n() == other.n() && self.directed == other.directed
    }
}

pub fn dyad_count(n: usize, directed: bool) -> usize {
    let ordered = n * n.saturating_sub(1);
    if directed {
        ordered
    } else {
        ordered / 2
    }
}

pub fn all_dyads(n: usize, directed: bool) -> impl Iterator<Item = Dyad> {
    (0..n).flat_map(move |i| {
        let start = if directed { 0 } else { i + 1 };
        (start..n).filter(move |&j| j != i).map(move |j| Dyad { i, j })
    })
}

/// Indicator vector over nodes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NodeSet(Vec<bool>);

impl NodeSet {
    pub fn empty(n: usize) -> Self {
        NodeSet(vec![false; n])
    }

    pub fn full(n: usize) -> Self {
        NodeSet(vec![true; n])
    }

    pub fn from_bools(bits: Vec<bool>) -> Self {
        NodeSet(bits)
    }

    pub fn from_nodes(n: usize, nodes: impl IntoIterator<Item = usize>) -> Result<Self, GraphError> {
        let mut set = NodeSet::empty(n);
        for index in nodes {
            if index >= n {
                return Err(GraphError::OutOfRange { index, n });
            }
            set.0[index] = true;
        }
        Ok(set)
    }

    /// The set whose members are the set bits of `mask` (node `i` is bit `i`).
    pub fn from_mask(n: usize, mask: u64) -> Self {
        NodeSet((0..n).map(|i| (mask >> i) & 1 == 1).collect())
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.count() == 0
    }

    #[inline]
    pub fn contains(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn insert(&mut self, i: usize) {
        self.0[i] = true;
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn as_bools(&self) -> &[bool] {
        &self.0
    }

    pub fn union(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.iter().zip(&other.0).map(|(a, b)| *a || *b).collect())
    }

    pub fn intersects(&self, other: &NodeSet) -> bool {
        self.0.iter().zip(&other.0).any(|(a, b)| *a && *b)
    }
}

/// Which dyads were observed, plus the node waves that determined them.
///
/// Node-determined patterns satisfy `mask = 1∘S + S∘1 − S∘S` (undirected)
/// or `mask = S∘1` (directed). Patterns built from an arbitrary mask carry
/// no waves.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ObservationPattern {
    directed: bool,
    mask: BitMatrix,
    waves: Vec<NodeSet>,
    selected: NodeSet,
}

impl ObservationPattern {
    /// Pattern determined by disjoint node waves `S_0..S_k`.
    pub fn from_waves(n: usize, directed: bool, waves: Vec<NodeSet>) -> Result<Self, GraphError> {
        let mut selected = NodeSet::empty(n);
        for wave in &waves {
            if wave.len() != n {
                return Err(GraphError::Mismatch("wave length"));
            }
            if let Some(i) = wave.iter().find(|&i| selected.contains(i)) {
                return Err(GraphError::OverlappingWaves(i));
            }
            selected = selected.union(wave);
        }
        let mask = node_mask(&selected, directed);
        Ok(ObservationPattern {
            directed,
            mask,
            waves,
            selected,
        })
    }

    /// Pattern for a single selected node set.
    pub fn from_selected(selected: NodeSet, directed: bool) -> Self {
        let n = selected.len();
        ObservationPattern::from_waves(n, directed, vec![selected]).expect("single wave")
    }

    /// Pattern from an explicit list of observed dyads.
    pub fn from_observed_dyads(
        n: usize,
        directed: bool,
        dyads: impl IntoIterator<Item = Dyad>,
    ) -> Result<Self, GraphError> {
        let probe = Network::empty(n, directed);
        let mut mask = BitMatrix::zeros(n);
        for d in dyads {
            probe.check_dyad(d.i, d.j)?;
            mask.set(d.i, d.j, true);
            if !directed {
                mask.set(d.j, d.i, true);
            }
        }
        Ok(ObservationPattern {
            directed,
            mask,
            waves: Vec::new(),
            selected: NodeSet::empty(n),
        })
    }

    pub fn full(n: usize, directed: bool) -> Self {
        ObservationPattern::from_selected(NodeSet::full(n), directed)
    }

    pub fn n(&self) -> usize {
        self.mask.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    #[inline]
    pub fn is_observed(&self, i: usize, j: usize) -> bool {
        self.mask.get(i, j)
    }

    pub fn waves(&self) -> &[NodeSet] {
        &self.waves
    }

    pub fn selected(&self) -> &NodeSet {
        &self.selected
    }

    pub fn observed_dyads(&self) -> impl Iterator<Item = Dyad> + '_ {
        all_dyads(self.n(), self.directed).filter(|d| self.is_observed(d.i, d.j))
    }

    pub fn missing_dyads(&self) -> impl Iterator<Item = Dyad> + '_ {
        all_dyads(self.n(), self.directed).filter(|d| !self.is_observed(d.i, d.j))
    }

    pub fn observed_count(&self) -> usize {
        self.observed_dyads().count()
    }

    pub fn missing_count(&self) -> usize {
        dyad_count(self.n(), self.directed) - self.observed_count()
    }

    /// True when the two patterns observe the same dyads.
    pub fn same_mask(&self, other: &ObservationPattern) -> bool {
        self.directed == other.directed && self.mask == other.mask
    }
}

fn node_mask(selected: &NodeSet, directed: bool) -> BitMatrix {
    let n = selected.len();
    let mut mask = BitMatrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let observed = if directed {
                selected.contains(i)
            } else {
                selected.contains(i) || selected.contains(j)
            };
            if observed {
                mask.set(i, j, true);
            }
        }
    }
    mask
}

/// Observed data `{y_obs, D}`: tie values on masked dyads only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PartialNetwork {
    pattern: ObservationPattern,
    // zero on every unmasked dyad
    observed: Network,
}

impl PartialNetwork {
    /// Restricts a complete network to the dyads observed under `pattern`.
    pub fn restrict(y: &Network, pattern: ObservationPattern) -> Result<Self, GraphError> {
        if y.n() != pattern.n() || y.is_directed() != pattern.is_directed() {
            return Err(GraphError::Mismatch("network vs pattern"));
        }
        let mut observed = Network::empty(y.n(), y.is_directed());
        for d in y.edges() {
            if pattern.is_observed(d.i, d.j) {
                observed.set(d.i, d.j, true);
            }
        }
        Ok(PartialNetwork { pattern, observed })
    }

    /// Builds observed data from a pattern and the ties seen on it.
    /// Ties listed on unobserved dyads are rejected.
    pub fn new(pattern: ObservationPattern, observed_ties: &Network) -> Result<Self, GraphError> {
        if let Some(d) = observed_ties
            .edges()
            .find(|d| !pattern.is_observed(d.i, d.j))
        {
            return Err(GraphError::TieOnMissingDyad(d));
        }
        PartialNetwork::restrict(observed_ties, pattern)
    }

    pub fn full(y: &Network) -> Self {
        PartialNetwork::restrict(y, ObservationPattern::full(y.n(), y.is_directed()))
            .expect("same space")
    }

    pub fn n(&self) -> usize {
        self.pattern.n()
    }

    pub fn is_directed(&self) -> bool {
        self.pattern.is_directed()
    }

    pub fn pattern(&self) -> &ObservationPattern {
        &self.pattern
    }

    /// Observed value of a dyad, `None` when it is missing.
    pub fn value(&self, i: usize, j: usize) -> Option<bool> {
        self.pattern
            .is_observed(i, j)
            .then(|| self.observed.has_edge(i, j))
    }

    /// Observed ties as a network with every missing dyad set to 0.
    pub fn observed_ties(&self) -> &Network {
        &self.observed
    }

    pub fn observed_edge_count(&self) -> usize {
        self.observed.edge_count()
    }

    /// Missing dyads, in row-major order. This order indexes completions.
    pub fn missing_dyads(&self) -> Vec<Dyad> {
        self.pattern.missing_dyads().collect()
    }

    /// `|𝒴(y_obs)| = 2^(missing free dyads)`.
    pub fn completions_count(&self) -> Result<u128, GraphError> {
        let missing = self.pattern.missing_count();
        if missing >= 128 {
            return Err(GraphError::CountOverflow(missing));
        }
        Ok(1u128 << missing)
    }

    /// `y_obs + v` for a completion given as a network whose ties all lie on
    /// missing dyads.
    pub fn overlay(&self, completion: &Network) -> Result<Network, GraphError> {
        if !completion.same_space(&self.observed) {
            return Err(GraphError::Mismatch("completion vs partial"));
        }
        if let Some(d) = completion
            .edges()
            .find(|d| self.pattern.is_observed(d.i, d.j))
        {
            return Err(GraphError::CompletionOnObservedDyad(d));
        }
        let mut y = self.observed.clone();
        for d in completion.edges() {
            y.set(d.i, d.j, true);
        }
        Ok(y)
    }

    /// `y_obs + v` where `values[k]` is the state of `missing[k]`.
    pub fn overlay_values(&self, missing: &[Dyad], values: impl IntoIterator<Item = bool>) -> Network {
        let mut y = self.observed.clone();
        for (d, v) in missing.iter().zip(values) {
            y.set(d.i, d.j, v);
        }
        y
    }

    /// The completion that leaves every missing dyad empty.
    pub fn zero_completion(&self) -> Network {
        self.observed.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn triangle_plus(n: usize) -> Network {
        Network::from_edges(n, false, [(0, 1), (1, 2), (0, 2)]).unwrap()
    }

    #[test]
    fn empty_network_has_no_edges() {
        let y = Network::from_edges(3, false, []).unwrap();
        assert_eq!(y.edge_count(), 0);
        assert_eq!(y.dyad_count(), 3);
    }

    #[test]
    fn undirected_edges_are_symmetrised() {
        let y = Network::from_edges(3, false, [(0, 1)]).unwrap();
        assert!(y.has_edge(0, 1) && y.has_edge(1, 0));
        assert_eq!(y.edge_count(), 1);
        let d = Network::from_edges(3, true, [(0, 1)]).unwrap();
        assert!(d.has_edge(0, 1) && !d.has_edge(1, 0));
    }

    #[test]
    fn bad_edges_are_rejected() {
        assert_eq!(
            Network::from_edges(3, false, [(1, 1)]),
            Err(GraphError::SelfLoop(1))
        );
        assert_eq!(
            Network::from_edges(3, false, [(0, 3)]),
            Err(GraphError::OutOfRange { index: 3, n: 3 })
        );
    }

    #[test]
    fn isolates_of_small_graphs() {
        let empty = Network::empty(3, false);
        assert_eq!(empty.isolates().iter().collect::<Vec<_>>(), vec![0, 1, 2]);
        assert_eq!(triangle_plus(4).isolates().iter().collect::<Vec<_>>(), vec![3]);
        let d = Network::from_edges(3, true, [(0, 1)]).unwrap();
        assert_eq!(d.isolates().iter().collect::<Vec<_>>(), vec![2]);
    }

    #[test]
    fn shared_partners_use_bit_rows() {
        let n = 130;
        let mut y = Network::empty(n, false);
        for k in [5, 70, 129] {
            y.set(0, k, true);
            y.set(1, k, true);
        }
        y.set(0, 1, true);
        assert_eq!(y.shared_partners(0, 1), 3);
        assert_eq!(y.common_neighbors(0, 1).collect::<Vec<_>>(), vec![5, 70, 129]);
        assert_eq!(y.neighbors(0).collect::<Vec<_>>(), vec![1, 5, 70, 129]);
    }

    #[test]
    fn completions_count_is_power_of_two() {
        let y = triangle_plus(5);
        assert_eq!(PartialNetwork::full(&y).completions_count(), Ok(1));
        // S = {0, 1}: missing pairs are those among {2, 3, 4}.
        let pattern = ObservationPattern::from_selected(NodeSet::from_nodes(5, [0, 1]).unwrap(), false);
        let partial = PartialNetwork::restrict(&y, pattern).unwrap();
        assert_eq!(partial.missing_dyads().len(), 3);
        assert_eq!(partial.completions_count(), Ok(8));
    }

    #[test]
    fn completion_count_overflow_is_signalled() {
        let n = 36;
        let pattern = ObservationPattern::from_selected(NodeSet::from_nodes(n, [0, 1]).unwrap(), false);
        assert_eq!(pattern.observed_count(), 69);
        let partial = PartialNetwork::restrict(&Network::empty(n, false), pattern).unwrap();
        assert_eq!(partial.missing_dyads().len(), 561);
        assert_eq!(partial.completions_count(), Err(GraphError::CountOverflow(561)));
    }

    #[test]
    fn overlay_identity_and_errors() {
        let y = triangle_plus(4);
        let full = PartialNetwork::full(&y);
        assert_eq!(full.overlay(&Network::empty(4, false)).unwrap(), y);

        let none = PartialNetwork::restrict(&y, ObservationPattern::from_selected(NodeSet::empty(4), false)).unwrap();
        assert_eq!(none.overlay(&y).unwrap(), y);

        let half = PartialNetwork::restrict(
            &y,
            ObservationPattern::from_selected(NodeSet::from_nodes(4, [0]).unwrap(), false),
        )
        .unwrap();
        let bad = Network::from_edges(4, false, [(0, 1)]).unwrap();
        assert!(matches!(
            half.overlay(&bad),
            Err(GraphError::CompletionOnObservedDyad(_))
        ));
        assert!(half.overlay(&Network::empty(4, true)).is_err());
    }

    #[test]
    fn overlapping_waves_rejected() {
        let a = NodeSet::from_nodes(3, [0, 1]).unwrap();
        let b = NodeSet::from_nodes(3, [1]).unwrap();
        assert_eq!(
            ObservationPattern::from_waves(3, false, vec![a, b]),
            Err(GraphError::OverlappingWaves(1))
        );
    }

    #[test]
    fn node_masks_match_the_selection_rule_exhaustively() {
        for n in 2..=6usize {
            for directed in [false, true] {
                for bits in 0u64..(1 << n) {
                    let s = NodeSet::from_mask(n, bits);
                    let p = ObservationPattern::from_selected(s.clone(), directed);
                    for i in 0..n {
                        for j in 0..n {
                            if i == j {
                                continue;
                            }
                            let expected = if directed {
                                s.contains(i)
                            } else {
                                s.contains(i) || s.contains(j)
                            };
                            assert_eq!(p.is_observed(i, j), expected);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn completions_match_explicit_enumeration() {
        // every completion of a small partial is distinct and agrees on the mask
        let y = Network::from_edges(5, false, [(0, 1), (1, 2), (2, 3), (3, 4)]).unwrap();
        let pattern = ObservationPattern::from_selected(NodeSet::from_nodes(5, [1]).unwrap(), false);
        let partial = PartialNetwork::restrict(&y, pattern).unwrap();
        let missing = partial.missing_dyads();
        let count = partial.completions_count().unwrap() as usize;
        let mut seen = std::collections::HashSet::new();
        for code in 0..count {
            let net = partial.overlay_values(&missing, (0..missing.len()).map(|k| (code >> k) & 1 == 1));
            for d in partial.pattern().observed_dyads() {
                assert_eq!(Some(net.has_edge(d.i, d.j)), partial.value(d.i, d.j));
            }
            seen.insert(net);
        }
        assert_eq!(seen.len(), count);
        assert_eq!(count, 1 << 6);
    }
}
