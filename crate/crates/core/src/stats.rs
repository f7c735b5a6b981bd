//! Sufficient statistics and their single-dyad change statistics.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attrs::{AttributeError, NodeAttributes};
use crate::graph::{Dyad, Network};

/// Decay used for the collaboration-network GWESP term.
pub const LAZEGA_GWESP_DECAY: f64 = 0.7781;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum StatsError {
    #[error(transparent)]
    Attribute(#[from] AttributeError),
    #[error("GWESP is only defined here for undirected networks")]
    DirectedGwesp,
    #[error("GWESP decay must be finite and nonnegative, got {0}")]
    BadDecay(f64),
    #[error("self-loop dyad ({0}, {0})")]
    SelfLoop(usize),
    #[error("node index {0} out of range")]
    OutOfRange(usize),
    #[error("attributes cover {attrs} nodes, network has {network}")]
    SizeMismatch { attrs: usize, network: usize },
    #[error("cannot parse statistic `{0}`")]
    Parse(String),
}

/// One model term.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum StatisticSpec {
    Edges,
    /// Geometrically weighted edgewise shared partners with a fixed decay.
    Gwesp { decay: f64 },
    /// `Σ_{i,j} y_ij X_i`: for undirected ties, `Σ_{i<j} y_ij (X_i + X_j)`.
    NodalMain { attribute: String },
    /// `Σ_{i<j} y_ij 1(X_i = X_j)`.
    HomophilyMatch { attribute: String },
}

impl StatisticSpec {
    pub fn gwesp(decay: f64) -> Self {
        StatisticSpec::Gwesp { decay }
    }

    pub fn nodal(attribute: &str) -> Self {
        StatisticSpec::NodalMain {
            attribute: attribute.to_string(),
        }
    }

    pub fn matching(attribute: &str) -> Self {
        StatisticSpec::HomophilyMatch {
            attribute: attribute.to_string(),
        }
    }

    /// Short label used in tables and file headers.
    pub fn label(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for StatisticSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            StatisticSpec::Edges => write!(f, "edges"),
            StatisticSpec::Gwesp { decay } => write!(f, "gwesp({decay})"),
            StatisticSpec::NodalMain { attribute } => write!(f, "nodal({attribute})"),
            StatisticSpec::HomophilyMatch { attribute } => write!(f, "match({attribute})"),
        }
    }
}

impl FromStr for StatisticSpec {
    type Err = StatsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        let err = || StatsError::Parse(s.to_string());
        if s == "edges" {
            return Ok(StatisticSpec::Edges);
        }
        let (head, rest) = s.split_once('(').ok_or_else(err)?;
        let arg = rest.strip_suffix(')').ok_or_else(err)?.trim();
        if arg.is_empty() {
            return Err(err());
        }
        match head.trim() {
            "gwesp" => {
                let decay: f64 = arg.parse().map_err(|_| err())?;
                Ok(StatisticSpec::Gwesp { decay })
            }
            "nodal" | "nodecov" => Ok(StatisticSpec::nodal(arg)),
            "match" | "nodematch" => Ok(StatisticSpec::matching(arg)),
            _ => Err(err()),
        }
    }
}

/// Parses a comma-separated term list such as `edges,gwesp(0.7781),match(office)`.
pub fn parse_specs(list: &str) -> Result<Vec<StatisticSpec>, StatsError> {
    let mut specs = Vec::new();
    let mut depth = 0usize;
    let mut start = 0usize;
    for (pos, ch) in list.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth = depth.saturating_sub(1),
            ',' if depth == 0 => {
                specs.push(list[start..pos].parse()?);
                start = pos + 1;
            }
            _ => {}
        }
    }
    if !list[start..].trim().is_empty() {
        specs.push(list[start..].parse()?);
    }
    Ok(specs)
}

/// The seven-term collaboration model: edges, GWESP(0.7781), seniority and
/// practice main effects, and practice/gender/office homophily.
pub fn lazega_specs() -> Vec<StatisticSpec> {
    vec![
        StatisticSpec::Edges,
        StatisticSpec::gwesp(LAZEGA_GWESP_DECAY),
        StatisticSpec::nodal("seniority"),
        StatisticSpec::nodal("practice"),
        StatisticSpec::matching("practice"),
        StatisticSpec::matching("gender"),
        StatisticSpec::matching("office"),
    ]
}

/// Values of `Z(y)`, in the order of the terms that produced them.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatVector(pub Vec<f64>);

impl StatVector {
    pub fn zeros(p: usize) -> Self {
        StatVector(vec![0.0; p])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dot(&self, eta: &[f64]) -> f64 {
        dot(&self.0, eta)
    }
}

impl std::ops::Index<usize> for StatVector {
    type Output = f64;
    fn index(&self, k: usize) -> &f64 {
        &self.0[k]
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[derive(Debug, Clone)]
enum Term {
    Edges,
    Gwesp {
        scale: f64,
        // (1 - e^-decay)^m for m = 0..=n
        powers: Vec<f64>,
    },
    Nodal(Vec<f64>),
    Match(Vec<f64>),
}

impl Term {
    fn gwesp_weight(scale: f64, powers: &[f64], shared: usize) -> f64 {
        if shared == 0 {
            0.0
        } else {
            scale * (1.0 - powers[shared])
        }
    }
}

/// A list of terms bound to a network size and attribute table, ready for the
/// MCMC inner loop.
#[derive(Debug, Clone)]
pub struct Statistics {
    n: usize,
    directed: bool,
    terms: Vec<Term>,
}

impl Statistics {
    pub fn new(
        specs: &[StatisticSpec],
        attrs: &NodeAttributes,
        n: usize,
        directed: bool,
    ) -> Result<Self, StatsError> {
        let needs_attrs = specs.iter().any(|s| {
            matches!(
                s,
                StatisticSpec::NodalMain { .. } | StatisticSpec::HomophilyMatch { .. }
            )
        });
        if needs_attrs && attrs.n() != n {
            return Err(StatsError::SizeMismatch {
                attrs: attrs.n(),
                network: n,
            });
        }
        let terms = specs
            .iter()
            .map(|spec| {
                Ok(match spec {
                    StatisticSpec::Edges => Term::Edges,
                    StatisticSpec::Gwesp { decay } => {
                        if directed {
                            return Err(StatsError::DirectedGwesp);
                        }
                        if !decay.is_finite() || *decay < 0.0 {
                            return Err(StatsError::BadDecay(*decay));
                        }
                        let q = 1.0 - (-decay).exp();
                        Term::Gwesp {
                            scale: decay.exp(),
                            powers: (0..=n).map(|m| q.powi(m as i32)).collect(),
                        }
                    }
                    StatisticSpec::NodalMain { attribute } => {
                        Term::Nodal(attrs.require(attribute)?.to_vec())
                    }
                    StatisticSpec::HomophilyMatch { attribute } => {
                        Term::Match(attrs.require(attribute)?.to_vec())
                    }
                })
            })
            .collect::<Result<Vec<_>, StatsError>>()?;
        Ok(Statistics { n, directed, terms })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn is_directed(&self) -> bool {
        self.directed
    }

    /// `Z(y)` by full recomputation.
    pub fn compute(&self, y: &Network) -> StatVector {
        debug_assert_eq!(y.n(), self.n);
        let mut out = vec![0.0; self.terms.len()];
        for (value, term) in out.iter_mut().zip(&self.terms) {
            *value = match term {
                Term::Edges => y.edge_count() as f64,
                Term::Gwesp { scale, powers } => y
                    .edges()
                    .map(|d| Term::gwesp_weight(*scale, powers, y.shared_partners(d.i, d.j)))
                    .sum(),
                Term::Nodal(x) => y
                    .edges()
                    .map(|d| if self.directed { x[d.i] } else { x[d.i] + x[d.j] })
                    .sum(),
                Term::Match(x) => y.edges().filter(|d| x[d.i] == x[d.j]).count() as f64,
            };
        }
        StatVector(out)
    }

    /// Writes `Z(y + ij) − Z(y − ij)` into `out`.
    #[inline]
    pub fn change_into(&self, y: &Network, i: usize, j: usize, out: &mut [f64]) {
        for (value, term) in out.iter_mut().zip(&self.terms) {
            *value = match term {
                Term::Edges => 1.0,
                Term::Gwesp { scale, powers } => self.gwesp_change(y, i, j, *scale, powers),
                Term::Nodal(x) => {
                    if self.directed {
                        x[i]
                    } else {
                        x[i] + x[j]
                    }
                }
                Term::Match(x) => {
                    if x[i] == x[j] {
                        1.0
                    } else {
                        0.0
                    }
                }
            };
        }
    }

    pub fn change(&self, y: &Network, i: usize, j: usize) -> StatVector {
        let mut out = vec![0.0; self.terms.len()];
        self.change_into(y, i, j, &mut out);
        StatVector(out)
    }

    fn gwesp_change(&self, y: &Network, i: usize, j: usize, scale: f64, powers: &[f64]) -> f64 {
        // Shared partners of (i, j) do not depend on the (i, j) tie itself.
        // Each common neighbour k gains one partner on (i, k) and on (j, k);
        // w(m + 1) − w(m) = (1 − e^-decay)^m.
        let on = usize::from(y.has_edge(i, j));
        let row_i = y.row_bits(i);
        let row_j = y.row_bits(j);
        let mut shared = 0usize;
        let mut delta = 0.0;
        for (w, (a, b)) in row_i.iter().zip(row_j).enumerate() {
            let mut common = a & b;
            while common != 0 {
                let k = w * 64 + common.trailing_zeros() as usize;
                common &= common - 1;
                shared += 1;
                delta += powers[y.shared_partners(i, k) - on] + powers[y.shared_partners(j, k) - on];
            }
        }
        delta + Term::gwesp_weight(scale, powers, shared)
    }
}

fn check_dyad(y: &Network, dyad: Dyad) -> Result<(), StatsError> {
    if dyad.i >= y.n() {
        return Err(StatsError::OutOfRange(dyad.i));
    }
    if dyad.j >= y.n() {
        return Err(StatsError::OutOfRange(dyad.j));
    }
    if dyad.i == dyad.j {
        return Err(StatsError::SelfLoop(dyad.i));
    }
    Ok(())
}

pub fn compute_stats(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
) -> Result<StatVector, StatsError> {
    Ok(Statistics::new(specs, attrs, y.n(), y.is_directed())?.compute(y))
}

pub fn change_stats(
    y: &Network,
    attrs: &NodeAttributes,
    specs: &[StatisticSpec],
    dyad: Dyad,
) -> Result<StatVector, StatsError> {
    check_dyad(y, dyad)?;
    Ok(Statistics::new(specs, attrs, y.n(), y.is_directed())?.change(y, dyad.i, dyad.j))
}

/// `EP_1..EP_{n−2}`: number of edges whose endpoints share exactly k partners.
pub fn esp_histogram(y: &Network) -> Result<Vec<u64>, StatsError> {
    if y.is_directed() {
        return Err(StatsError::DirectedGwesp);
    }
    let mut hist = vec![0u64; y.n().saturating_sub(2)];
    for d in y.edges() {
        let k = y.shared_partners(d.i, d.j);
        if k > 0 {
            hist[k - 1] += 1;
        }
    }
    Ok(hist)
}
