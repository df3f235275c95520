//! Categorical node covariates and their resolution against a graph.

use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{CommunityAssignment, Graph};

/// Node-keyed table of categorical covariate columns. Values are kept as
/// strings; `None` marks a missing entry.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct CovariateTable {
    node_labels: Vec<String>,
    row_index: HashMap<String, usize>,
    columns: Vec<(String, Vec<Option<String>>)>,
}

impl CovariateTable {
    /// Builds a table from rows of (node label, per-column values). Column
    /// count per row must match `columns`; duplicate node labels error.
    pub fn new(
        columns: Vec<String>,
        rows: impl IntoIterator<Item = (String, Vec<Option<String>>)>,
    ) -> Result<CovariateTable> {
        let mut table = CovariateTable {
            node_labels: Vec::new(),
            row_index: HashMap::new(),
            columns: columns.into_iter().map(|c| (c, Vec::new())).collect(),
        };
        for (label, values) in rows {
            table.push_row(label, values)?;
        }
        Ok(table)
    }

    pub(crate) fn push_row(&mut self, label: String, values: Vec<Option<String>>) -> Result<()> {
        if values.len() != self.columns.len() {
            return Err(Error::LengthMismatch {
                what: format!("covariate row for node {label:?}"),
                expected: self.columns.len(),
                got: values.len(),
            });
        }
        if self.row_index.contains_key(&label) {
            return Err(Error::DuplicateLabel { label });
        }
        self.row_index.insert(label.clone(), self.node_labels.len());
        self.node_labels.push(label);
        for (column, value) in self.columns.iter_mut().zip(values) {
            column.1.push(value);
        }
        Ok(())
    }

    /// Appends a row with every column missing.
    pub(crate) fn push_empty_row(&mut self, label: String) -> Result<()> {
        let values = vec![None; self.columns.len()];
        self.push_row(label, values)
    }

    /// Registers a column if absent; returns its index. Existing rows get
    /// missing values for the new column.
    pub(crate) fn ensure_column(&mut self, name: &str) -> usize {
        if let Some(idx) = self.columns.iter().position(|(c, _)| c == name) {
            return idx;
        }
        self.columns
            .push((name.to_string(), vec![None; self.node_labels.len()]));
        self.columns.len() - 1
    }

    pub(crate) fn set(&mut self, row: usize, column: usize, value: String) {
        self.columns[column].1[row] = Some(value);
    }

    pub fn is_empty(&self) -> bool {
        self.node_labels.is_empty()
    }

    pub fn node_labels(&self) -> &[String] {
        &self.node_labels
    }

    pub fn column_names(&self) -> Vec<&str> {
        self.columns.iter().map(|(c, _)| c.as_str()).collect()
    }

    pub fn has_column(&self, name: &str) -> bool {
        self.columns.iter().any(|(c, _)| c == name)
    }

    /// Value for one node in one column; `None` when either the node has no
    /// row or the entry is missing.
    pub fn get(&self, node: &str, column: &str) -> Option<&str> {
        let row = *self.row_index.get(node)?;
        let col = self.columns.iter().find(|(c, _)| c == column)?;
        col.1[row].as_deref()
    }
}

/// What to do with graph nodes that have no covariate value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MissingPolicy {
    /// Error naming the first uncovered node.
    #[default]
    Error,
    /// Restrict the test to the induced subgraph of covered nodes.
    Drop,
}

/// A covariate column matched against a graph: possibly a reduced graph,
/// the assignment over its nodes, and what was dropped on the way.
#[derive(Debug, Clone)]
pub struct ResolvedAssignment {
    pub graph: Graph,
    pub assignment: CommunityAssignment,
    /// Labels of nodes removed for missing values.
    pub dropped_missing: Vec<String>,
    pub warnings: Vec<String>,
}

/// Reads a covariate table from CSV. The header row is required; the first
/// column holds node labels, every other column becomes a categorical
/// covariate. Empty fields are missing values.
pub fn read_covariates_table(path: impl AsRef<Path>) -> Result<CovariateTable> {
    let path = path.as_ref();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_path(path)
        .map_err(Error::from)?;
    let headers = reader.headers()?.clone();
    if headers.is_empty() {
        return Err(Error::Parse {
            path: path.display().to_string(),
            line: 1,
            message: "covariate CSV needs a header row with at least one column".into(),
        });
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut table = CovariateTable::new(columns, [])?;
    for record in reader.records() {
        let record = record?;
        let label = record.get(0).unwrap_or("").to_string();
        if label.is_empty() {
            return Err(Error::Parse {
                path: path.display().to_string(),
                line: record.position().map_or(0, |p| p.line()),
                message: "empty node label in first column".into(),
            });
        }
        let values = record
            .iter()
            .skip(1)
            .map(|v| if v.is_empty() { None } else { Some(v.to_string()) })
            .collect();
        table.push_row(label, values)?;
    }
    Ok(table)
}

/// Matches one covariate column against a graph and builds the community
/// assignment. Under [`MissingPolicy::Error`] every graph node must have a
/// value; under [`MissingPolicy::Drop`] uncovered nodes are removed and the
/// induced subgraph returned, with a warning.
pub fn resolve_assignment(
    g: &Graph,
    table: &CovariateTable,
    column: &str,
    policy: MissingPolicy,
) -> Result<ResolvedAssignment> {
    if !table.has_column(column) {
        return Err(Error::UnknownColumn {
            column: column.into(),
            available: table.column_names().iter().map(|s| s.to_string()).collect(),
        });
    }
    let mut covered = Vec::new();
    let mut missing = Vec::new();
    for i in 0..g.n() {
        match table.get(g.node_label(i), column) {
            Some(_) => covered.push(i),
            None => missing.push(g.node_label(i).to_string()),
        }
    }
    if !missing.is_empty() && policy == MissingPolicy::Error {
        return Err(Error::MissingCovariate {
            node: missing[0].clone(),
            column: column.into(),
        });
    }
    let mut warnings = Vec::new();
    let (graph, values): (Graph, Vec<&str>) = if missing.is_empty() {
        let values = (0..g.n())
            .map(|i| table.get(g.node_label(i), column).unwrap())
            .collect();
        (g.clone(), values)
    } else {
        warnings.push(format!(
            "column {column:?}: dropped {} of {} nodes with no covariate value",
            missing.len(),
            g.n()
        ));
        let sub = g.induced(&covered);
        let values = (0..sub.n())
            .map(|i| table.get(sub.node_label(i), column).unwrap())
            .collect();
        (sub, values)
    };
    let assignment = CommunityAssignment::from_values(&values);
    Ok(ResolvedAssignment {
        graph,
        assignment,
        dropped_missing: missing,
        warnings,
    })
}

/// Strict one-call form: reads the CSV and resolves `column` against the
/// graph, requiring every node to be covered.
pub fn read_covariates(
    path: impl AsRef<Path>,
    column: &str,
    g: &Graph,
) -> Result<CommunityAssignment> {
    let table = read_covariates_table(path)?;
    Ok(resolve_assignment(g, &table, column, MissingPolicy::Error)?.assignment)
}
