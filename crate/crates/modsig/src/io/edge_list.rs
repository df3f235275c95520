//! Tab-separated edge lists: `u<TAB>v[<TAB>weight]` per line, weight
//! defaulting to 1, `#` comment lines and blank lines ignored.

use std::fs;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::graph::{build_graph, Graph, SelfLoopPolicy};

/// Reads a graph from a tab-separated edge list file. Repeated pairs are
/// summed; self-loops follow `policy`, reported with their line number.
pub fn read_edge_list(path: impl AsRef<Path>, policy: SelfLoopPolicy) -> Result<Graph> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_edge_list(&text, &path.display().to_string(), policy)
}

/// Parses edge-list text. `source` names the input in error messages.
pub fn parse_edge_list(text: &str, source: &str, policy: SelfLoopPolicy) -> Result<Graph> {
    let mut records: Vec<(String, String, f64)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = raw.trim_end_matches('\r');
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut fields = line.split('\t');
        let u = fields.next().unwrap_or("");
        let v = fields.next().ok_or_else(|| Error::Parse {
            path: source.into(),
            line: line_no,
            message: "expected at least two tab-separated fields".into(),
        })?;
        if u.is_empty() || v.is_empty() {
            return Err(Error::Parse {
                path: source.into(),
                line: line_no,
                message: "empty node label".into(),
            });
        }
        let weight = match fields.next() {
            None => 1.0,
            Some(w) => w.parse::<f64>().map_err(|_| Error::Parse {
                path: source.into(),
                line: line_no,
                message: format!("cannot parse weight {w:?}"),
            })?,
        };
        if let Some(extra) = fields.next() {
            return Err(Error::Parse {
                path: source.into(),
                line: line_no,
                message: format!("unexpected extra field {extra:?}"),
            });
        }
        if !weight.is_finite() || weight < 0.0 {
            return Err(Error::InvalidWeight {
                u: u.into(),
                v: v.into(),
                weight,
                line: Some(line_no),
            });
        }
        if u == v {
            match policy {
                SelfLoopPolicy::Reject => {
                    return Err(Error::SelfLoop {
                        node: u.into(),
                        line: Some(line_no),
                    })
                }
                SelfLoopPolicy::Drop => continue,
            }
        }
        records.push((u.into(), v.into(), weight));
    }
    build_graph(records, policy)
}

/// Writes a graph as a tab-separated edge list, one `u<TAB>v<TAB>weight`
/// line per edge in the graph's edge order.
pub fn write_edge_list(path: impl AsRef<Path>, g: &Graph) -> Result<()> {
    let path = path.as_ref();
    let mut out = Vec::new();
    for &(i, j, w) in g.edges() {
        writeln!(out, "{}\t{}\t{w}", g.node_label(i), g.node_label(j))
            .expect("writing to a vector cannot fail");
    }
    fs::write(path, out).map_err(|e| Error::io(path, e))
}
