//! Per-node covariates.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AttributeError {
    #[error("unknown attribute `{0}`")]
    Unknown(String),
    #[error("attribute `{name}` has {got} values, expected {expected}")]
    Length {
        name: String,
        got: usize,
        expected: usize,
    },
    #[error("attribute `{name}` is declared twice")]
    Duplicate { name: String },
    #[error("attribute `{name}` value {value} at node {node} is outside {domain}")]
    Domain {
        name: String,
        node: usize,
        value: f64,
        domain: &'static str,
    },
}

/// Named numeric columns, one value per node.
///
/// Categorical covariates are stored by level code.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct NodeAttributes {
    n: usize,
    columns: Vec<(String, Vec<f64>)>,
}

impl NodeAttributes {
    pub fn new(n: usize) -> Self {
        NodeAttributes {
            n,
            columns: Vec::new(),
        }
    }

    pub fn with(mut self, name: &str, values: Vec<f64>) -> Result<Self, AttributeError> {
        self.insert(name, values)?;
        Ok(self)
    }

    pub fn insert(&mut self, name: &str, values: Vec<f64>) -> Result<(), AttributeError> {
        if values.len() != self.n {
            return Err(AttributeError::Length {
                name: name.to_string(),
                got: values.len(),
                expected: self.n,
            });
        }
        if self.get(name).is_some() {
            return Err(AttributeError::Duplicate {
                name: name.to_string(),
            });
        }
        self.columns.push((name.to_string(), values));
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, name: &str) -> Option<&[f64]> {
        self.columns
            .iter()
            .find(|(col, _)| col == name)
            .map(|(_, v)| v.as_slice())
    }

    pub fn require(&self, name: &str) -> Result<&[f64], AttributeError> {
        self.get(name)
            .ok_or_else(|| AttributeError::Unknown(name.to_string()))
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.columns.iter().map(|(name, _)| name.as_str())
    }

    /// Checks the declared domains of the collaboration-network covariates:
    /// seniority in (0, 1], practice and gender in {0, 1}, office in {1, 2, 3}.
    /// Columns with other names are not constrained.
    pub fn validate_known_domains(&self) -> Result<(), AttributeError> {
        for (name, values) in &self.columns {
            let (check, domain): (fn(f64) -> bool, &'static str) = match name.as_str() {
                "seniority" => (|v| v > 0.0 && v <= 1.0, "(0, 1]"),
                "practice" | "gender" => (|v| v == 0.0 || v == 1.0, "{0, 1}"),
                "office" => (|v| v == 1.0 || v == 2.0 || v == 3.0, "{1, 2, 3}"),
                _ => continue,
            };
            if let Some((node, &value)) = values.iter().enumerate().find(|(_, &v)| !check(v)) {
                return Err(AttributeError::Domain {
                    name: name.clone(),
                    node,
                    value,
                    domain,
                });
            }
        }
        Ok(())
    }
}
