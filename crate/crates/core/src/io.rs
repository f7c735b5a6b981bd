//! Reading and writing networks, attributes, partial networks, fits and
//! study tables.
//!
//! Adjacency CSV: a header row of node labels, then one 0/1 row per node,
//! optionally led by the node's label (the header then starts with an empty
//! cell). `NA` marks an unobserved dyad in partial-network matrices.
//! Edge lists: two whitespace-separated 1-based node numbers per line; `#`
//! starts a comment.

use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::attrs::{AttributeError, NodeAttributes};
use crate::graph::{Dyad, GraphError, Network, ObservationPattern, PartialNetwork};
use crate::mle::FitResult;
use crate::study::{Figure2Row, StudyRecord, StudySummary};

pub const TOOL_NAME: &str = "ergm-sampled";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Column order of the collaboration-network attribute file.
pub const LAZEGA_ATTRIBUTE_COLUMNS: [&str; 4] = ["seniority", "practice", "gender", "office"];

#[derive(Debug, Error)]
pub enum IoError {
    #[error("cannot access {}", path.display())]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("line {line}: {message}")]
    Parse { line: u64, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Attribute(#[from] AttributeError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error("{0}")]
    Invalid(String),
}

fn parse_err(line: u64, message: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        message: message.into(),
    }
}

pub fn open(path: &Path) -> Result<File, IoError> {
    File::open(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

pub fn create(path: &Path) -> Result<File, IoError> {
    File::create(path).map_err(|source| IoError::File {
        path: path.to_path_buf(),
        source,
    })
}

/// A parsed adjacency matrix; `None` cells are unobserved.
struct Matrix {
    labels: Vec<String>,
    cells: Vec<Vec<Option<bool>>>,
}

fn read_matrix<R: Read>(reader: R) -> Result<Matrix, IoError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut records = csv.records();
    let header = records
        .next()
        .ok_or_else(|| parse_err(1, "empty adjacency file"))??;
    let labelled = header.get(0).is_some_and(str::is_empty);
    let labels: Vec<String> = header.iter().skip(usize::from(labelled)).map(str::to_string).collect();
    let n = labels.len();
    let mut cells = Vec::with_capacity(n);
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        let values: Vec<&str> = record.iter().skip(usize::from(labelled)).collect();
        if values.len() != n {
            return Err(parse_err(line, format!("expected {n} cells, found {}", values.len())));
        }
        if labelled && record.get(0) != Some(labels[cells.len().min(n - 1)].as_str()) {
            return Err(parse_err(line, format!("row label `{}` does not match header order", &record[0])));
        }
        let row = values
            .iter()
            .enumerate()
            .map(|(col, v)| match *v {
                "0" => Ok(Some(false)),
                "1" => Ok(Some(true)),
                "NA" | "na" | "" => Ok(None),
                other => Err(parse_err(line, format!("column {}: `{other}` is not 0, 1 or NA", col + 1))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        cells.push(row);
        if cells.len() > n {
            return Err(parse_err(line, format!("more than {n} rows")));
        }
    }
    if cells.len() != n {
        return Err(IoError::Invalid(format!("{} rows for {n} header labels", cells.len())));
    }
    Ok(Matrix { labels, cells })
}

fn check_symmetric(m: &Matrix) -> Result<(), IoError> {
    let n = m.labels.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if m.cells[i][j] != m.cells[j][i] {
                return Err(IoError::Invalid(format!(
                    "asymmetric undirected adjacency at ({}, {})",
                    m.labels[i], m.labels[j]
                )));
            }
        }
    }
    Ok(())
}

/// A network with its node labels.
#[derive(Debug, Clone, PartialEq)]
pub struct LabelledNetwork {
    pub network: Network,
    pub labels: Vec<String>,
}

/// Dense 0/1 adjacency CSV.
pub fn read_adjacency_csv<R: Read>(reader: R, directed: bool) -> Result<LabelledNetwork, IoError> {
    let m = read_matrix(reader)?;
    if !directed {
        check_symmetric(&m)?;
    }
    let n = m.labels.len();
    let mut y = Network::empty(n, directed);
    for (i, row) in m.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            match cell {
                None => return Err(IoError::Invalid(format!("NA at ({}, {}) in a complete network", i + 1, j + 1))),
                Some(true) if i == j => return Err(GraphError::SelfLoop(i).into()),
                Some(true) => y.set(i, j, true),
                Some(false) => {}
            }
        }
    }
    Ok(LabelledNetwork { network: y, labels: m.labels })
}

/// Adjacency CSV with `NA` for unobserved dyads.
pub fn read_partial_adjacency_csv<R: Read>(reader: R, directed: bool) -> Result<PartialNetwork, IoError> {
    let m = read_matrix(reader)?;
    if !directed {
        check_symmetric(&m)?;
    }
    let n = m.labels.len();
    let mut observed = Vec::new();
    let mut ties = Network::empty(n, directed);
    for (i, row) in m.cells.iter().enumerate() {
        for (j, cell) in row.iter().enumerate() {
            if i == j || (!directed && j < i) {
                continue;
            }
            if let Some(v) = cell {
                observed.push(Dyad::new(i, j));
                ties.set(i, j, *v);
            }
        }
    }
    let pattern = ObservationPattern::from_observed_dyads(n, directed, observed)?;
    Ok(PartialNetwork::new(pattern, &ties)?)
}

pub fn write_adjacency_csv<W: Write>(writer: W, y: &Network, labels: Option<&[String]>) -> Result<(), IoError> {
    let n = y.n();
    let default: Vec<String>;
    let labels = match labels {
        Some(l) => l,
        None => {
            default = (1..=n).map(|k| k.to_string()).collect();
            &default
        }
    };
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(labels)?;
    for i in 0..n {
        w.write_record((0..n).map(|j| if i != j && y.has_edge(i, j) { "1" } else { "0" }))?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_partial_adjacency_csv<W: Write>(writer: W, partial: &PartialNetwork) -> Result<(), IoError> {
    let n = partial.n();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record((1..=n).map(|k| k.to_string()))?;
    for i in 0..n {
        w.write_record((0..n).map(|j| match (i == j, partial.value(i, j)) {
            (true, _) | (false, Some(false)) => "0",
            (false, Some(true)) => "1",
            (false, None) => "NA",
        }))?;
    }
    w.flush()?;
    Ok(())
}

/// Edge list of 1-based node numbers. Without `n`, the largest number seen
/// sets the size.
pub fn read_edge_list<R: Read>(reader: R, n: Option<usize>, directed: bool) -> Result<Network, IoError> {
    let mut edges = Vec::new();
    for (k, line) in BufReader::new(reader).lines().enumerate() {
        let line_no = k as u64 + 1;
        let line = line?;
        let content = line.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let fields: Vec<&str> = content.split_whitespace().collect();
        if fields.len() != 2 {
            return Err(parse_err(line_no, format!("expected two node numbers, found {}", fields.len())));
        }
        let parse = |s: &str| -> Result<usize, IoError> {
            match s.parse::<usize>() {
                Ok(v) if v >= 1 => Ok(v - 1),
                _ => Err(parse_err(line_no, format!("`{s}` is not a 1-based node number"))),
            }
        };
        let (i, j) = (parse(fields[0])?, parse(fields[1])?);
        if i == j {
            return Err(parse_err(line_no, format!("self-loop on node {}", i + 1)));
        }
        if let Some(n) = n {
            if i.max(j) >= n {
                return Err(parse_err(line_no, format!("node {} exceeds n = {n}", i.max(j) + 1)));
            }
        }
        edges.push((i, j));
    }
    let n = n.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    Ok(Network::from_edges(n, directed, edges)?)
}

pub fn write_edge_list<W: Write>(mut writer: W, y: &Network) -> Result<(), IoError> {
    writeln!(writer, "# n = {}", y.n())?;
    for d in y.edges() {
        writeln!(writer, "{} {}", d.i + 1, d.j + 1)?;
    }
    Ok(())
}

/// Attribute CSV with a `node` column of 1-based numbers or labels and one
/// numeric column per attribute.
pub fn read_attributes_csv<R: Read>(reader: R, labels: Option<&[String]>, n: usize) -> Result<NodeAttributes, IoError> {
    let mut csv = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(reader);
    let mut records = csv.records();
    let header = records.next().ok_or_else(|| parse_err(1, "empty attribute file"))??;
    if header.get(0) != Some("node") {
        return Err(parse_err(1, "first column must be `node`"));
    }
    let names: Vec<String> = header.iter().skip(1).map(str::to_string).collect();
    let mut columns = vec![vec![f64::NAN; n]; names.len()];
    let mut seen = vec![false; n];
    for record in records {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        if record.iter().all(str::is_empty) {
            continue;
        }
        if record.len() != names.len() + 1 {
            return Err(parse_err(line, format!("expected {} fields, found {}", names.len() + 1, record.len())));
        }
        let key = &record[0];
        let node = labels
            .and_then(|l| l.iter().position(|x| x == key))
            .or_else(|| key.parse::<usize>().ok().filter(|&v| v >= 1).map(|v| v - 1))
            .filter(|&v| v < n)
            .ok_or_else(|| parse_err(line, format!("unknown node `{key}`")))?;
        if std::mem::replace(&mut seen[node], true) {
            return Err(parse_err(line, format!("node `{key}` listed twice")));
        }
        for (c, value) in record.iter().skip(1).enumerate() {
            columns[c][node] = value
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| parse_err(line, format!("`{value}` in column `{}` is not a number", names[c])))?;
        }
    }
    if let Some(missing) = seen.iter().position(|s| !s) {
        return Err(IoError::Invalid(format!("no attribute row for node {}", missing + 1)));
    }
    let mut attrs = NodeAttributes::new(n);
    for (name, values) in names.iter().zip(columns) {
        attrs.insert(name, values)?;
    }
    attrs.validate_known_domains()?;
    Ok(attrs)
}

pub fn write_attributes_csv<W: Write>(writer: W, attrs: &NodeAttributes, labels: Option<&[String]>) -> Result<(), IoError> {
    let names: Vec<&str> = attrs.names().collect();
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(std::iter::once("node").chain(names.iter().copied()))?;
    for i in 0..attrs.n() {
        let label = labels.map_or_else(|| (i + 1).to_string(), |l| l[i].clone());
        let mut row = vec![label];
        for name in &names {
            row.push(attrs.get(name).expect("listed")[i].to_string());
        }
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum AdjacencySource {
    Matrix(PathBuf),
    EdgeList { path: PathBuf, n: Option<usize> },
}

/// Where a network and its attributes live on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct DatasetPaths {
    pub adjacency: AdjacencySource,
    pub attributes: Option<PathBuf>,
    pub directed: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DatasetBundle {
    pub network: Network,
    pub attrs: NodeAttributes,
    pub labels: Vec<String>,
}

pub fn load_dataset(paths: &DatasetPaths) -> Result<DatasetBundle, IoError> {
    let located = |path: &Path, e: IoError| match e {
        IoError::Parse { line, message } => IoError::Invalid(format!("{}:{line}: {message}", path.display())),
        IoError::Invalid(message) => IoError::Invalid(format!("{}: {message}", path.display())),
        other => other,
    };
    let LabelledNetwork { network, labels } = match &paths.adjacency {
        AdjacencySource::Matrix(path) => read_adjacency_csv(open(path)?, paths.directed).map_err(|e| located(path, e))?,
        AdjacencySource::EdgeList { path, n } => {
            let network = read_edge_list(open(path)?, *n, paths.directed).map_err(|e| located(path, e))?;
            let labels = (1..=network.n()).map(|k| k.to_string()).collect();
            LabelledNetwork { network, labels }
        }
    };
    let attrs = match &paths.attributes {
        Some(path) => read_attributes_csv(open(path)?, Some(&labels), network.n()).map_err(|e| located(path, e))?,
        None => NodeAttributes::new(network.n()),
    };
    Ok(DatasetBundle { network, attrs, labels })
}

/// The collaboration-network bundle: `adjacency.csv` and `attributes.csv`
/// in `dir`.
pub fn load_lazega(dir: &Path) -> Result<DatasetBundle, IoError> {
    let bundle = load_dataset(&DatasetPaths {
        adjacency: AdjacencySource::Matrix(dir.join("adjacency.csv")),
        attributes: Some(dir.join("attributes.csv")),
        directed: false,
    })?;
    for name in LAZEGA_ATTRIBUTE_COLUMNS {
        bundle.attrs.require(name)?;
    }
    Ok(bundle)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct PartialNetworkFile {
    n: usize,
    directed: bool,
    /// Row-major matrix of 0, 1 or null.
    matrix: Vec<Vec<Option<u8>>>,
}

pub fn write_partial_json<W: Write>(writer: W, partial: &PartialNetwork) -> Result<(), IoError> {
    let n = partial.n();
    let matrix = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Some(0) } else { partial.value(i, j).map(u8::from) })
                .collect()
        })
        .collect();
    serde_json::to_writer_pretty(
        writer,
        &PartialNetworkFile {
            n,
            directed: partial.is_directed(),
            matrix,
        },
    )?;
    Ok(())
}

pub fn read_partial_json<R: Read>(reader: R) -> Result<PartialNetwork, IoError> {
    let file: PartialNetworkFile = serde_json::from_reader(reader)?;
    let n = file.n;
    if file.matrix.len() != n || file.matrix.iter().any(|r| r.len() != n) {
        return Err(IoError::Invalid(format!("matrix is not {n} x {n}")));
    }
    let mut observed = Vec::new();
    let mut ties = Network::empty(n, file.directed);
    for i in 0..n {
        for j in 0..n {
            if i == j || (!file.directed && j < i) {
                continue;
            }
            let cell = file.matrix[i][j];
            if !file.directed && cell != file.matrix[j][i] {
                return Err(IoError::Invalid(format!("asymmetric undirected matrix at ({}, {})", i + 1, j + 1)));
            }
            match cell {
                None => {}
                Some(v @ (0 | 1)) => {
                    observed.push(Dyad::new(i, j));
                    ties.set(i, j, v == 1);
                }
                Some(v) => return Err(IoError::Invalid(format!("cell ({}, {}) = {v}", i + 1, j + 1))),
            }
        }
    }
    let pattern = ObservationPattern::from_observed_dyads(n, file.directed, observed)?;
    Ok(PartialNetwork::new(pattern, &ties)?)
}

/// Any result written as JSON, stamped with the producing tool.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Envelope<T> {
    pub tool: String,
    pub version: String,
    pub kind: String,
    pub result: T,
}

impl<T> Envelope<T> {
    pub fn new(kind: &str, result: T) -> Self {
        Envelope {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            kind: kind.to_string(),
            result,
        }
    }
}

pub fn write_json<W: Write, T: Serialize>(mut writer: W, kind: &str, result: &T) -> Result<(), IoError> {
    serde_json::to_writer_pretty(&mut writer, &Envelope::new(kind, result))?;
    writeln!(writer)?;
    Ok(())
}

pub fn read_fit_json<R: Read>(reader: R) -> Result<FitResult, IoError> {
    let envelope: Envelope<FitResult> = serde_json::from_reader(reader)?;
    Ok(envelope.result)
}

pub fn write_fit_json<W: Write>(writer: W, fit: &FitResult) -> Result<(), IoError> {
    write_json(writer, "fit", fit)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub parameter: String,
    pub complete_value: f64,
    pub bias_pct: f64,
    pub rmse_pct: f64,
    pub eff_loss_pct: Option<f64>,
}

/// One row per parameter and parameterisation, named `natural/<term>` and
/// `mean_value/<term>`.
pub fn summary_rows(summary: &StudySummary) -> Vec<SummaryRow> {
    let tag = |prefix: &str, s: &crate::study::ParameterSummary| SummaryRow {
        parameter: format!("{prefix}/{}", s.parameter),
        complete_value: s.complete_value,
        bias_pct: s.bias_pct,
        rmse_pct: s.rmse_pct,
        eff_loss_pct: s.eff_loss_pct,
    };
    summary
        .natural
        .iter()
        .map(|s| tag("natural", s))
        .chain(summary.mean_value.iter().map(|s| tag("mean_value", s)))
        .collect()
}

pub fn write_summary_csv<W: Write>(writer: W, summary: &StudySummary) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    for row in summary_rows(summary) {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_summary_csv<R: Read>(reader: R) -> Result<Vec<SummaryRow>, IoError> {
    let mut r = csv::Reader::from_reader(reader);
    Ok(r.deserialize().collect::<Result<_, _>>()?)
}

pub fn write_figure2_csv<W: Write>(writer: W, rows: &[Figure2Row]) -> Result<(), IoError> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["seed_i", "seed_j", "n_observed_dyads", "kl", "kl_se", "outlier"])?;
    for r in rows {
        w.write_record([
            (r.seed_pair.0 + 1).to_string(),
            (r.seed_pair.1 + 1).to_string(),
            r.n_observed_dyads.to_string(),
            r.kl.to_string(),
            r.kl_se.to_string(),
            r.outlier.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn write_records_json<W: Write>(writer: W, records: &[StudyRecord]) -> Result<(), IoError> {
    write_json(writer, "study_records", &records)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn adjacency_round_trip_with_labels() {
        let text = ",a,b,c\na,0,1,0\nb,1,0,1\nc,0,1,0\n";
        let net = read_adjacency_csv(text.as_bytes(), false).unwrap();
        assert_eq!(net.labels, vec!["a", "b", "c"]);
        assert_eq!(net.network.edge_count(), 2);
        let mut out = Vec::new();
        write_adjacency_csv(&mut out, &net.network, Some(&net.labels)).unwrap();
        let again = read_adjacency_csv(out.as_slice(), false).unwrap();
        assert_eq!(again.network, net.network);
    }

    #[test]
    fn adjacency_errors() {
        assert!(matches!(
            read_adjacency_csv("1,2\n0,1\n0,0\n".as_bytes(), false),
            Err(IoError::Invalid(_))
        ));
        match read_adjacency_csv("1,2\n0,1\n1,x\n".as_bytes(), false) {
            Err(IoError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(read_adjacency_csv("1,2\n1,1\n1,0\n".as_bytes(), false).is_err());
    }

    #[test]
    fn edge_lists() {
        let y = read_edge_list("# none\n".as_bytes(), Some(4), false).unwrap();
        assert_eq!((y.n(), y.edge_count()), (4, 0));
        let y = read_edge_list("1 2\n2\t3 # tab\n\n".as_bytes(), None, false).unwrap();
        assert_eq!((y.n(), y.edge_count()), (3, 2));
        match read_edge_list("1 2\n3 3\n".as_bytes(), None, false) {
            Err(IoError::Parse { line: 2, message }) => assert!(message.contains("self-loop")),
            other => panic!("{other:?}"),
        }
        let mut out = Vec::new();
        write_edge_list(&mut out, &y).unwrap();
        assert_eq!(read_edge_list(out.as_slice(), Some(3), false).unwrap(), y);
    }

    #[test]
    fn attributes() {
        let text = "node,seniority,practice,gender,office\n2,1.0,0,1,2\n1,0.5,1,0,1\n";
        let attrs = read_attributes_csv(text.as_bytes(), None, 2).unwrap();
        assert_eq!(attrs.get("seniority"), Some(&[0.5, 1.0][..]));
        let mut out = Vec::new();
        write_attributes_csv(&mut out, &attrs, None).unwrap();
        assert_eq!(read_attributes_csv(out.as_slice(), None, 2).unwrap(), attrs);
        match read_attributes_csv("node,office\n1,1\n2,x\n".as_bytes(), None, 2) {
            Err(IoError::Parse { line: 3, .. }) => {}
            other => panic!("{other:?}"),
        }
        assert!(read_attributes_csv("node,office\n1,1\n".as_bytes(), None, 2).is_err());
        assert!(matches!(
            read_attributes_csv("node,office\n1,1\n2,7\n".as_bytes(), None, 2),
            Err(IoError::Attribute(_))
        ));
    }

    #[test]
    fn partial_round_trips() {
        let y = Network::from_edges(4, false, [(0, 1), (2, 3)]).unwrap();
        let pattern = ObservationPattern::from_selected(crate::graph::NodeSet::from_nodes(4, [0]).unwrap(), false);
        let partial = PartialNetwork::restrict(&y, pattern).unwrap();
        let mut json = Vec::new();
        write_partial_json(&mut json, &partial).unwrap();
        let back = read_partial_json(json.as_slice()).unwrap();
        assert_eq!(back.missing_dyads(), partial.missing_dyads());
        assert_eq!(back.observed_ties(), partial.observed_ties());
        let mut csv = Vec::new();
        write_partial_adjacency_csv(&mut csv, &partial).unwrap();
        let back = read_partial_adjacency_csv(csv.as_slice(), false).unwrap();
        assert_eq!(back.missing_dyads(), partial.missing_dyads());
    }
}
